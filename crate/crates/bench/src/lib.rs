//! Criterion benchmarks for the pqc-core kernels live in `benches/`.
