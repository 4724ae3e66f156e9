use super::block::BlockCircuit;
use super::units::{qsp_leaf, synthesize_cached};
use crate::error::{PqcError, Result};
use crate::poly::{localization_poly, LocalizationPoly, LocalizationSpec, MultiIndex};
use crate::qsp::DEFAULT_TOL;

/// Per-coordinate localization circuits and the polynomial they realize.
#[derive(Clone, Debug)]
pub struct LocalizationPqc {
    pub spec: LocalizationSpec,
    pub poly: LocalizationPoly,
    /// One single-qubit QSP block per coordinate; unit `j` reads `x[j]`.
    pub units: Vec<BlockCircuit>,
}

impl LocalizationPqc {
    pub fn new(spec: &LocalizationSpec, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(PqcError::InvalidInput(
                "localization needs at least one coordinate".into(),
            ));
        }
        let poly = localization_poly(spec)?;
        let angles = synthesize_cached(&poly.poly, DEFAULT_TOL)?;
        let units = (0..d)
            .map(|j| {
                qsp_leaf(
                    &angles,
                    j,
                    1.0,
                    0.0,
                    DEFAULT_TOL,
                    format!("localize x{j} K={}", spec.k()),
                )
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            spec: *spec,
            poly,
            units,
        })
    }

    /// The localized vector `f_D(x)`, one entry per coordinate.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.units.len() {
            return Err(PqcError::DimensionMismatch {
                expected: self.units.len(),
                found: x.len(),
            });
        }
        self.units.iter().map(|u| u.real_value(x)).collect()
    }
}

/// One localization block per coordinate, each realizing the staircase
/// polynomial of `spec` on its own qubit.
pub fn build_localization_pqc(spec: &LocalizationSpec, d: usize) -> Result<Vec<BlockCircuit>> {
    Ok(LocalizationPqc::new(spec, d)?.units)
}

/// Grid address `floor(K v)` per coordinate, clamped to `{0, ..., K-1}`.
pub fn round_to_eta(values: &[f64], k: u32) -> MultiIndex {
    let top = k.saturating_sub(1);
    MultiIndex::new(
        values
            .iter()
            .map(|&v| {
                let e = (k as f64 * v).floor();
                if e.is_nan() || e <= 0.0 {
                    0
                } else {
                    (e as u64).min(top as u64) as u32
                }
            })
            .collect(),
    )
}
