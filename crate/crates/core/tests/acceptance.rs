//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use pqc_core::approx::*;
use pqc_core::circuits::*;
use pqc_core::mat2::C64;
use pqc_core::poly::*;
use pqc_core::qsp::completion::completion_angles;
use pqc_core::qsp::*;
use pqc_core::sim::dense::{circuit_matrix, distance_up_to_phase};
use pqc_core::sim::{decompose_mcu, lower_circuit, Angle, Circuit, Gate, Op, Part};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
/// Degree, residual and the completion gap when one was computed.
type SynthRun = (usize, f64, Option<f64>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Random parity-definite polynomial of degree `l` with sup norm `0.99`.
fn random_parity_poly(rng: &mut ChaCha8Rng, l: usize) -> ParityPolynomial {
    let mut c = vec![0.0; l + 1];
    for k in (l % 2..=l).step_by(2) {
        c[k] = rng.gen_range(-1.0..1.0);
    }
    c[l] = if c[l] >= 0.0 { c[l] + 0.2 } else { c[l] - 0.2 };
    let s = ChebSeries::new(c);
    let sup = verification_grid(l)
        .into_iter()
        .map(|x| s.eval(x).abs())
        .fold(0.0, f64::max);
    ParityPolynomial::from_chebyshev(s.scale(0.99 / sup), Parity::of_degree(l)).expect("scaled into range")
}

fn c1_qsp() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let targets: Vec<ParityPolynomial> = (0..100)
        .map(|_| {
            let l = rng.gen_range(0..=24);
            random_parity_poly(&mut rng, l)
        })
        .collect();
    let results: Vec<Result<SynthRun, String>> = targets
        .par_iter()
        .map(|p| {
            let a = qsp_synthesize(p, DEFAULT_TOL).map_err(e2s)?;
            let r = qsp_residual(&a, &|x| p.eval(x), &qsp_grid(a.layers()));
            let cross = if p.degree() <= 8 {
                let b = completion_angles(p).map_err(e2s)?;
                let grid = verification_grid(p.degree());
                Some(
                    grid.iter()
                        .map(|&x| (qsp_block(&a, x).unwrap() - qsp_block(&b, x).unwrap()).norm())
                        .fold(0.0, f64::max),
                )
            } else {
                None
            };
            Ok((p.degree(), r, cross))
        })
        .collect();
    let mut worst: f64 = 0.0;
    let mut worst_cross: f64 = 0.0;
    let mut crossed = 0;
    for r in results {
        let (deg, res, cross) = r?;
        ensure(res <= 1e-8, || format!("degree {deg}: residual {res:.2e}"))?;
        worst = worst.max(res);
        if let Some(c) = cross {
            ensure(c <= 1e-7, || format!("degree {deg}: completion disagrees by {c:.2e}"))?;
            worst_cross = worst_cross.max(c);
            crossed += 1;
        }
    }
    Ok(format!(
        "100 targets, max residual {worst:.1e}; {crossed} completion cross-checks, max gap {worst_cross:.1e}"
    ))
}

fn c2_monomials() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut count = 0;
    let mut worst: f64 = 0.0;
    for d in 1..=4 {
        for alpha in MultiIndex::all_up_to(d, 6) {
            let c: f64 = rng.gen_range(-1.0..1.0);
            let b = build_monomial_pqc(c, &alpha).map_err(e2s)?;
            let xs: Vec<Vec<f64>> = (0..100).map(|_| (0..d).map(|_| rng.gen::<f64>()).collect()).collect();
            let vals = b.values(&xs).map_err(e2s)?;
            for (x, v) in xs.iter().zip(vals) {
                let want = c * x
                    .iter()
                    .zip(alpha.entries())
                    .map(|(v, &k)| v.powi(k as i32))
                    .product::<f64>();
                let err = (v - C64::new(want, 0.0)).norm();
                ensure(err <= 1e-8, || format!("alpha {alpha} at {x:?}: error {err:.2e}"))?;
                worst = worst.max(err);
            }
            let r = b.resources().map_err(e2s)?;
            let s = alpha.one_norm() as usize;
            ensure(r.depth <= 2 * s + 1 && r.trainable_params <= s + d, || {
                format!(
                    "alpha {alpha}: depth {} params {} exceed {} / {}",
                    r.depth,
                    r.trainable_params,
                    2 * s + 1,
                    s + d
                )
            })?;
            count += 1;
        }
    }
    Ok(format!(
        "{count} monomials x 100 points, max error {worst:.1e}; depth and params within caps"
    ))
}

fn random_unit(rng: &mut ChaCha8Rng, i: usize) -> BlockCircuit {
    let mut c = Circuit::new(1, format!("u{i}"));
    c.ry(0, Angle::Trainable(rng.gen_range(-PI..PI))).unwrap();
    c.rz(0, Angle::Trainable(rng.gen_range(-PI..PI))).unwrap();
    c.rx(0, Angle::Trainable(rng.gen_range(-PI..PI))).unwrap();
    let mut prep = Circuit::new(1, "prep");
    prep.h(0).unwrap();
    BlockCircuit::from_gates(c, prep, 1.0, false).unwrap()
}

/// `<+|U|+>` from the dense matrix of a unit.
fn dense_block(u: &BlockCircuit) -> C64 {
    let m = circuit_matrix(&u.circuit().unwrap(), None).unwrap();
    (m[(0, 0)] + m[(0, 1)] + m[(1, 0)] + m[(1, 1)]) / 2.0
}

fn c3_lcu() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for t in [1usize, 2, 3, 5, 8] {
        let units: Vec<BlockCircuit> = (0..t).map(|i| random_unit(&mut rng, i)).collect();
        let mean = units.iter().map(dense_block).sum::<C64>() / t as f64;
        let lcu = lcu_combine(units, format!("T={t}")).map_err(e2s)?;
        let padded = t.next_power_of_two();
        let sv = lcu.block_value_statevector(&[]).map_err(e2s)?;
        // Pads add nothing: the padded mean times P/T is the plain mean.
        let err = (sv * padded as f64 / t as f64 - mean).norm();
        ensure(err <= 1e-10, || format!("T={t}: statevector {sv} vs mean {mean}"))?;
        ensure((lcu.rescale() - padded as f64).abs() < 1e-15, || {
            format!("T={t}: rescale {}", lcu.rescale())
        })?;
        worst = worst.max(err);
    }
    Ok(format!("T in {{1,2,3,5,8}}, max deviation {worst:.1e}"))
}

fn c4_bernstein_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for d in 1..=2 {
        let f = builtin_target("gauss_bump", d, 2.0).map_err(e2s)?;
        for n in 1..=4u64 {
            let b = build_bernstein_pqc(&f, n).map_err(e2s)?;
            let table = BernsteinTable::new(&f, n).map_err(e2s)?;
            let xs: Vec<Vec<f64>> = (0..200).map(|_| (0..d).map(|_| rng.gen::<f64>()).collect()).collect();
            for (x, v) in xs.iter().zip(b.values(&xs).map_err(e2s)?) {
                let err = (v.re - table.eval(x).unwrap()).abs();
                ensure(err <= 1e-6, || format!("d={d} n={n} at {x:?}: {err:.2e}"))?;
                worst = worst.max(err);
            }
        }
    }
    let mut one_err: f64 = 0.0;
    for d in 1..=2 {
        let one = TargetFunctionSpec::new("one", d, |_| 1.0);
        let b = build_bernstein_pqc(&one, 3).map_err(e2s)?;
        for _ in 0..5 {
            let x: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
            let v = b.block_value_statevector(&x).map_err(e2s)?.re * b.rescale();
            one_err = one_err.max((v - 1.0).abs());
        }
    }
    ensure(one_err <= 1e-8, || format!("f = 1 reproduced only to {one_err:.2e}"))?;
    Ok(format!(
        "max deviation from classical {worst:.1e}; f = 1 via statevector to {one_err:.1e}"
    ))
}

fn c5_lipschitz_bound() -> Outcome {
    let mut lines = Vec::new();
    for d in 1..=2usize {
        let f = builtin_target("abs_centered", d, 2.0).map_err(e2s)?;
        let grid = GridSpec::with_defaults(d, Region::FullCube).map_err(e2s)?;
        let mut last = f64::INFINITY;
        for n in [4u64, 16, 64] {
            let b = build_bernstein_pqc(&f, n).map_err(e2s)?;
            let bound = thm2_simplified(d, 1.0, n, 0.3);
            let errs = pointwise_errors(&f, &b, &grid).map_err(e2s)?;
            let sup = errs.iter().map(|p| p.error).fold(0.0, f64::max);
            ensure(errs.iter().all(|p| p.error <= bound + b.tol_agg()), || {
                format!("d={d} n={n}: sup {sup} > {bound}")
            })?;
            ensure(sup <= last, || {
                format!("d={d}: error rose from {last} to {sup} at n={n}")
            })?;
            last = sup;
            lines.push(format!("d={d} n={n}: {sup:.4} <= {bound:.3}"));
        }
    }
    Ok(lines.join("; "))
}

fn c6_localization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut parts = Vec::new();
    for k in [2u32, 4, 8] {
        let kf = k as f64;
        let delta = 0.05f64.min(0.999 / (3.0 * kf));
        let eps = 0.1 / kf;
        let spec = LocalizationSpec::new(k, delta, eps).map_err(e2s)?;
        let l = LocalizationPqc::new(&spec, 1).map_err(e2s)?;
        let mut sampled = 0;
        let mut worst: f64 = 0.0;
        while sampled < 500 {
            let x: f64 = rng.gen();
            let Some(eta) = spec.band_of(x) else { continue };
            sampled += 1;
            let out = l.eval(&[x]).map_err(e2s)?;
            let off = out[0] - eta as f64 / kf;
            ensure((0.0..eps).contains(&off), || {
                format!("K={k} x={x}: offset {off} outside [0, {eps})")
            })?;
            ensure(round_to_eta(&out, k).entries() == [eta], || {
                format!("K={k} x={x}: rounded to the wrong cell")
            })?;
            worst = worst.max(off);
        }
        parts.push(format!(
            "K={k} (delta={delta:.4}, degree {}): max offset {worst:.4} < {eps:.4}",
            l.poly.degree()
        ));
    }
    Ok(parts.join("; "))
}

/// Gap and accuracy used for the nested Taylor runs: `Delta = min(K^-d, 1/(4K))`.
fn taylor_spec(k: u32, d: usize) -> LocalizationSpec {
    let kf = k as f64;
    LocalizationSpec::new(k, kf.powi(-(d as i32)).min(0.25 / kf), 0.5 / kf).unwrap()
}

fn nested_sup(f: &TargetFunctionSpec, k: u32) -> Result<(f64, f64, f64), String> {
    let spec = taylor_spec(k, f.dims);
    let h = f.holder.unwrap();
    let pqc = NestedTaylorPqc::build(f, &spec, h.s()).map_err(e2s)?;
    let grid = GridSpec::with_defaults(f.dims, Region::UnionQEta { k, delta: spec.delta() }).map_err(e2s)?;
    let sup = sup_error(f, &pqc, &grid).map_err(e2s)?;
    let bound = thm_bounds(
        BoundKind::Thm3,
        &BoundParams {
            d: f.dims,
            s: h.s(),
            beta: h.beta,
            k,
            ..Default::default()
        },
    );
    Ok((sup, bound, pqc.tol_agg()))
}

fn c7_holder_bound() -> Outcome {
    let f = builtin_target("halfsine", 1, 2.0).map_err(e2s)?;
    let mut pts = Vec::new();
    let mut parts = Vec::new();
    for k in [2u32, 4, 8] {
        let (sup, bound, tol) = nested_sup(&f, k)?;
        ensure(sup <= bound + tol, || format!("halfsine K={k}: {sup} > {bound}"))?;
        pts.push((k as f64, sup));
        parts.push(format!("K={k}: {sup:.2e} <= {bound:.4}"));
    }
    let rate = rate_fit(&pts).map_err(e2s)?;
    ensure((-2.6..=-1.4).contains(&rate), || {
        format!("fitted exponent {rate:.3} outside [-2.6, -1.4]")
    })?;
    parts.push(format!("exponent {rate:.2}"));
    let g = builtin_target("product_sines", 2, 2.0).map_err(e2s)?;
    for k in [2u32, 4] {
        let (sup, bound, tol) = nested_sup(&g, k)?;
        ensure(sup <= bound + tol, || format!("product_sines K={k}: {sup} > {bound}"))?;
        parts.push(format!("d=2 K={k}: {sup:.2e} <= {bound:.4}"));
    }
    Ok(parts.join("; "))
}

fn c8_l2() -> Outcome {
    let f = builtin_target("halfsine", 1, 2.0).map_err(e2s)?;
    let (k, d) = (4u32, 1usize);
    let spec = taylor_spec(k, d);
    let pqc = NestedTaylorPqc::build(&f, &spec, 1).map_err(e2s)?;
    let est = l2_error(&f, &pqc, k, spec.delta(), 20_000, 8).map_err(e2s)?;
    ensure(est.trifling_mass_ok(), || {
        format!(
            "trifling mass {} > {} + 3 x {}",
            est.trifling_mass, est.trifling_bound, est.trifling_sigma
        )
    })?;
    let bound = thm_bounds(
        BoundKind::L2Corollary,
        &BoundParams {
            d,
            s: 1,
            beta: 2.0,
            k,
            ..Default::default()
        },
    );
    ensure(est.mean_square <= bound + 3.0 * est.stderr, || {
        format!("L2 {} > {bound}", est.mean_square)
    })?;
    Ok(format!(
        "delta={}: trifling mass {:.4} <= {:.4}; L2 {:.2e} <= {bound:.4}",
        spec.delta(),
        est.trifling_mass,
        est.trifling_bound + 3.0 * est.trifling_sigma,
        est.mean_square
    ))
}

fn c9_trig() -> Outcome {
    let cos =
        MultivariateTrigPolynomial::from_terms(1, [(vec![1], C64::new(0.45, 0.0)), (vec![-1], C64::new(0.45, 0.0))])
            .map_err(e2s)?;
    let b = build_trig_poly_pqc(&cos).map_err(e2s)?;
    let xs: Vec<Vec<f64>> = (0..100).map(|i| vec![2.0 * PI * i as f64 / 100.0]).collect();
    let mut worst: f64 = 0.0;
    for (x, v) in xs.iter().zip(b.values(&xs).map_err(e2s)?) {
        worst = worst.max((v - C64::new(0.9 * x[0].cos(), 0.0)).norm());
    }
    let m = build_trig_monomial_pqc(C64::new(0.5, 0.0), &[1, -1]).map_err(e2s)?;
    let ys: Vec<Vec<f64>> = (0..100)
        .map(|i| vec![2.0 * PI * (i / 10) as f64 / 10.0, 2.0 * PI * (i % 10) as f64 / 10.0])
        .collect();
    for (y, v) in ys.iter().zip(m.values(&ys).map_err(e2s)?) {
        worst = worst.max((v - C64::from_polar(0.5, y[0] - y[1])).norm());
    }
    ensure(worst <= 1e-6, || format!("trig reproduction error {worst:.2e}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let d = rng.gen_range(1..=3usize);
        let n: Vec<i32> = (0..d).map(|_| rng.gen_range(-3..=3)).collect();
        let s: usize = n.iter().map(|v| v.unsigned_abs() as usize).sum();
        let r = build_trig_monomial_pqc(C64::from_polar(rng.gen_range(0.1..1.0), rng.gen_range(-PI..PI)), &n)
            .map_err(e2s)?
            .resources()
            .map_err(e2s)?;
        ensure(r.depth <= 6 * s + 3 && r.trainable_params <= 4 * s + 3 * d, || {
            format!(
                "n={n:?}: depth {} params {} exceed {} / {}",
                r.depth,
                r.trainable_params,
                6 * s + 3,
                4 * s + 3 * d
            )
        })?;
    }
    Ok(format!(
        "max error {worst:.1e}; 20 random monomials within depth and parameter caps"
    ))
}

fn c10_lowering() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for m in 1..=4usize {
        for _ in 0..10 {
            let mut qubits: Vec<usize> = (0..m + 1).collect();
            for i in (1..qubits.len()).rev() {
                qubits.swap(i, rng.gen_range(0..=i));
            }
            // Angles far outside [-pi, pi] exercise the wrap-around.
            let a = Angle::Fixed(rng.gen_range(-6.0 * PI..6.0 * PI));
            let op = match rng.gen_range(0..4) {
                0 => Op::Rx(a),
                1 => Op::Ry(a),
                2 => Op::Rz(a),
                _ => Op::X,
            };
            let g = Gate::controlled(op, qubits[1..].to_vec(), qubits[0]);
            let mut native = Circuit::new(m + 1, "native");
            native.push(g.clone()).map_err(e2s)?;
            let lowered = lower_circuit(&native).map_err(e2s)?;
            ensure(decompose_mcu(&g).map_err(e2s)?.len() == lowered.gates.len(), || {
                "lowering is not gate-wise".into()
            })?;
            ensure(
                lowered
                    .gates
                    .iter()
                    .all(|h| h.controls.is_empty() || (h.controls.len() == 1 && h.op == Op::X)),
                || format!("{m} controls: lowered circuit keeps a non-CNOT controlled gate"),
            )?;
            let dist = distance_up_to_phase(
                &circuit_matrix(&lowered, None).map_err(e2s)?,
                &circuit_matrix(&native, None).map_err(e2s)?,
            );
            ensure(dist <= 1e-9, || format!("{m} controls, {op:?}: distance {dist:.2e}"))?;
            worst = worst.max(dist);
            cases += 1;
        }
    }
    Ok(format!("{cases} gates with 1 to 4 controls, max distance {worst:.1e}"))
}

fn c11_shots() -> Outcome {
    let f = builtin_target("abs_centered", 1, 2.0).map_err(e2s)?;
    let b = build_bernstein_pqc(&f, 8).map_err(e2s)?;
    let x = [0.3];
    let exact = b.block_value(&x).map_err(e2s)?.re;
    let shots = 10_000u64;
    let estimates: Vec<f64> = (0..20u64)
        .map(|s| b.sample(&x, Part::Real, shots, s).map(|e| e.estimate))
        .collect::<Result<_, _>>()
        .map_err(e2s)?;
    let again = b.sample(&x, Part::Real, shots, 7).map_err(e2s)?.estimate;
    ensure(again == estimates[7], || "seed 7 did not reproduce".into())?;
    let mean = estimates.iter().sum::<f64>() / 20.0;
    let limit = 5.0 / ((shots * 20) as f64).sqrt();
    ensure((mean - exact).abs() <= limit, || {
        format!("mean {mean} vs exact {exact}, limit {limit}")
    })?;
    Ok(format!(
        "|mean - exact| = {:.1e} <= {limit:.1e}; seeds reproducible",
        (mean - exact).abs()
    ))
}

fn c12_resources() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    for s in 1..=3u32 {
        for d in 1..=3usize {
            let terms = MultiIndex::all_up_to(d, s)
                .into_iter()
                .map(|a| (a, rng.gen_range(-1.0..1.0)));
            let p = MultivariatePolynomial::from_terms(d, terms).map_err(e2s)?;
            let r = build_poly_pqc(&p).map_err(e2s)?.resources().map_err(e2s)?;
            let ratio = r.trainable_params as f64 / (s as f64 * (d as f64).powi(s as i32) * (s as f64 + d as f64));
            worst = worst.max(ratio);
        }
    }
    ensure(worst <= 8.0, || format!("params ratio reached {worst:.3}"))?;
    Ok(format!("max params / (s d^s (s+d)) = {worst:.3} <= 8"))
}

fn c13_fnn() -> Outcome {
    let ratios: Vec<f64> = (10..=30)
        .map(|d| fnn_compare(&FnnComparisonSpec::new(d, 5, 0.1, 0.5).unwrap()).map(|c| c.ln_param_ratio))
        .collect::<Result<_, _>>()
        .map_err(e2s)?;
    ensure(ratios.windows(2).all(|w| w[1] < w[0]), || {
        format!("not decreasing: {ratios:?}")
    })?;
    Ok(format!(
        "ln(param ratio) falls from {:.1} at d=10 to {:.1} at d=30",
        ratios[0], ratios[20]
    ))
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("QSP synthesis and completion cross-check", c1_qsp),
        ("monomial PQCs: values, depth and parameter caps", c2_monomials),
        ("LCU exactness with padding", c3_lcu),
        ("Bernstein PQC equals classical Bernstein", c4_bernstein_equivalence),
        ("Lipschitz bound compliance, monotone in n", c5_lipschitz_bound),
        ("localization offsets and cell recovery", c6_localization),
        ("Hölder bound compliance and rate", c7_holder_bound),
        ("L2 error with trifling region", c8_l2),
        ("trigonometric PQCs", c9_trig),
        ("multi-controlled gate lowering", c10_lowering),
        ("shot estimator", c11_shots),
        ("resource accounting order check", c12_resources),
        ("PQC vs FNN parameter ratio decreasing in d", c13_fnn),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1}s): {why}", i + 1)
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
