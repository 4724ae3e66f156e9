use super::block::{lcu_combine, BlockCircuit};
use super::localization::{round_to_eta, LocalizationPqc};
use super::units::shifted_monomial;
use crate::error::{PqcError, Result};
use crate::poly::{taylor_expand, LocalizationSpec, MultiIndex, TargetFunctionSpec};
use crate::qsp::DEFAULT_TOL;
use crate::sim::{Angle, Circuit, Gate, Op, ResourceCount};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Taylor coefficients `xi[eta][alpha] = d^alpha f(eta / K) / alpha!` for every
/// grid cell `eta` in `{0..K-1}^d` and every `|alpha|_1 <= s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaylorCoeffTable {
    k: u32,
    s: u32,
    d: usize,
    xi: BTreeMap<MultiIndex, BTreeMap<MultiIndex, f64>>,
}

impl TaylorCoeffTable {
    /// Expands `f` at every grid point; fails if a coefficient exceeds 1 in magnitude.
    pub fn new(f: &TargetFunctionSpec, k: u32, s: u32) -> Result<Self> {
        if k == 0 {
            return Err(PqcError::InvalidInput("K must be positive".into()));
        }
        let d = f.dims;
        let etas = MultiIndex::grid(d, k);
        let rows = etas
            .par_iter()
            .map(|eta| {
                let x0: Vec<f64> = eta.entries().iter().map(|&e| e as f64 / k as f64).collect();
                let t = taylor_expand(f, &x0, s)?;
                let row = MultiIndex::all_up_to(d, s).into_iter().map(|a| {
                    let c = t.coefficient(&a);
                    (a, c)
                });
                Ok((eta.clone(), row.collect()))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Self::from_values(k, s, d, rows)
    }

    /// Checks that `xi` covers every `(eta, alpha)` and that `|xi| <= 1`.
    pub fn from_values(k: u32, s: u32, d: usize, xi: BTreeMap<MultiIndex, BTreeMap<MultiIndex, f64>>) -> Result<Self> {
        let alphas = MultiIndex::all_up_to(d, s);
        for eta in MultiIndex::grid(d, k) {
            let row = xi
                .get(&eta)
                .ok_or_else(|| PqcError::InvalidInput(format!("table is missing grid cell {eta}")))?;
            for a in &alphas {
                let v = *row
                    .get(a)
                    .ok_or_else(|| PqcError::InvalidInput(format!("table is missing alpha {a} at {eta}")))?;
                if !(v.abs() <= 1.0 + 1e-9) {
                    return Err(PqcError::CoefficientBound { value: v });
                }
            }
        }
        Ok(Self { k, s, d, xi })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn dims(&self) -> usize {
        self.d
    }

    pub fn xi(&self, eta: &MultiIndex, alpha: &MultiIndex) -> Option<f64> {
        self.xi.get(eta).and_then(|r| r.get(alpha)).copied()
    }

    pub fn alphas(&self) -> Vec<MultiIndex> {
        MultiIndex::all_up_to(self.d, self.s)
    }

    pub fn etas(&self) -> Vec<MultiIndex> {
        MultiIndex::grid(self.d, self.k)
    }

    /// Address qubits per coordinate, `ceil(log2 K)`.
    pub fn address_bits(&self) -> usize {
        address_bits(self.k)
    }
}

fn address_bits(k: u32) -> usize {
    (u32::BITS - k.saturating_sub(1).leading_zeros()) as usize
}

/// Basis-encoding bits of `eta`: per coordinate big-endian, coordinates in order.
fn eta_bits(eta: &MultiIndex, b: usize) -> Vec<bool> {
    eta.entries()
        .iter()
        .flat_map(|&e| (0..b).map(move |i| (e >> (b - 1 - i)) & 1 == 1))
        .collect()
}

/// Coefficient register `sum_eta |eta><eta| (x) R_X(2 arccos xi_{eta, alpha})` on
/// `d ceil(log2 K)` address qubits plus one coefficient qubit (the last). One
/// multi-controlled rotation per cell; X gates steer the controls between cells.
pub fn build_taylor_coeff_pqc(table: &TaylorCoeffTable, alpha: &MultiIndex) -> Result<Circuit> {
    if alpha.dims() != table.d || alpha.one_norm() > table.s {
        return Err(PqcError::InvalidInput(format!(
            "alpha {alpha} is not covered by the table"
        )));
    }
    let b = table.address_bits();
    let na = table.d * b;
    let mut c = Circuit::new(na + 1, format!("U_co alpha={alpha}"));
    let mut flipped = vec![false; na];
    let controls: Vec<usize> = (0..na).collect();
    for eta in table.etas() {
        let xi = table.xi(&eta, alpha).expect("table covers alpha");
        if xi.abs() > 1.0 + 1e-9 {
            return Err(PqcError::CoefficientBound { value: xi });
        }
        let want: Vec<bool> = eta_bits(&eta, b).iter().map(|&bit| !bit).collect();
        for q in 0..na {
            if want[q] != flipped[q] {
                c.x(q)?;
            }
        }
        flipped = want;
        let theta = 2.0 * xi.clamp(-1.0, 1.0).acos();
        c.push(Gate::controlled(Op::Rx(Angle::Trainable(theta)), controls.clone(), na))?;
    }
    for (q, f) in flipped.iter().enumerate() {
        if *f {
            c.x(q)?;
        }
    }
    Ok(c)
}

/// Taylor-series PQC at grid cell `eta`: an LCU over `alpha` of the coefficient
/// register (address prepared in `|eta>`) tensored with the monomial unit for
/// `(x - eta/K)^alpha`.
pub fn build_taylor_series_pqc(table: &TaylorCoeffTable, eta: &MultiIndex) -> Result<BlockCircuit> {
    let coeff: Vec<Circuit> = table
        .alphas()
        .iter()
        .map(|a| build_taylor_coeff_pqc(table, a))
        .collect::<Result<_>>()?;
    series_with(table, eta, &table.alphas(), &coeff)
}

fn series_with(
    table: &TaylorCoeffTable,
    eta: &MultiIndex,
    alphas: &[MultiIndex],
    coeff: &[Circuit],
) -> Result<BlockCircuit> {
    if eta.dims() != table.d || eta.entries().iter().any(|&e| e >= table.k) {
        return Err(PqcError::InvalidInput(format!(
            "eta {eta} is not a grid cell for K = {}",
            table.k
        )));
    }
    let b = table.address_bits();
    let mut prep = Circuit::new(table.d * b + 1, "prep");
    for (q, bit) in eta_bits(eta, b).into_iter().enumerate() {
        if bit {
            prep.x(q)?;
        }
    }
    let shift: Vec<f64> = eta.entries().iter().map(|&e| e as f64 / table.k as f64).collect();
    let units = alphas
        .iter()
        .zip(coeff)
        .map(|(a, u)| {
            let reg = BlockCircuit::from_gates(u.clone(), prep.clone(), 1.0, true)?;
            let mono = shifted_monomial(1.0, a, &shift, DEFAULT_TOL)?;
            BlockCircuit::tensor(vec![reg, mono], format!("term alpha={a}"))
        })
        .collect::<Result<Vec<_>>>()?;
    lcu_combine(units, format!("taylor series eta={eta}"))
}

/// Outcome of one nested evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NestedEvaluation {
    pub value: f64,
    pub eta: MultiIndex,
    pub localized: Vec<f64>,
    /// False when `x` lies in the excluded region between bands, where the
    /// error guarantee does not apply.
    pub in_bands: bool,
}

/// Localization followed by the Taylor series of the cell it selects.
#[derive(Clone, Debug)]
pub struct NestedTaylorPqc {
    pub localization: LocalizationPqc,
    pub table: TaylorCoeffTable,
    series: Vec<BlockCircuit>,
}

impl NestedTaylorPqc {
    /// Builds the localization blocks and the series block of every cell.
    pub fn build(f: &TargetFunctionSpec, spec: &LocalizationSpec, s: u32) -> Result<Self> {
        let d = f.dims;
        let localization = LocalizationPqc::new(spec, d)?;
        let table = TaylorCoeffTable::new(f, spec.k(), s)?;
        let alphas = table.alphas();
        let coeff: Vec<Circuit> = alphas
            .iter()
            .map(|a| build_taylor_coeff_pqc(&table, a))
            .collect::<Result<_>>()?;
        let series = table
            .etas()
            .par_iter()
            .map(|eta| series_with(&table, eta, &alphas, &coeff))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            localization,
            table,
            series,
        })
    }

    pub fn spec(&self) -> &LocalizationSpec {
        &self.localization.spec
    }

    /// Series block of cell `eta`.
    pub fn series(&self, eta: &MultiIndex) -> Result<&BlockCircuit> {
        let k = self.table.k as usize;
        if eta.dims() != self.table.d || eta.entries().iter().any(|&e| e >= self.table.k) {
            return Err(PqcError::InvalidInput(format!("eta {eta} is not a grid cell")));
        }
        let idx = eta.entries().iter().fold(0usize, |acc, &e| acc * k + e as usize);
        Ok(&self.series[idx])
    }

    /// Localize, round to the cell address, prepare it and read the series block.
    pub fn eval(&self, x: &[f64]) -> Result<NestedEvaluation> {
        if x.len() != self.table.d {
            return Err(PqcError::DimensionMismatch {
                expected: self.table.d,
                found: x.len(),
            });
        }
        if x.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(PqcError::Domain(format!("point {x:?} outside [0,1]^d")));
        }
        let localized = self.localization.eval(x)?;
        let eta = round_to_eta(&localized, self.table.k);
        let value = self.series(&eta)?.real_value(x)?;
        let in_bands = x.iter().all(|&v| self.spec().band_of(v).is_some());
        Ok(NestedEvaluation {
            value,
            eta,
            localized,
            in_bands,
        })
    }

    pub fn eval_many(&self, xs: &[Vec<f64>]) -> Result<Vec<NestedEvaluation>> {
        xs.par_iter().map(|x| self.eval(x)).collect()
    }

    /// Accuracy of the series readout implied by the synthesis tolerances (the
    /// localization only feeds the rounding step).
    pub fn tol_agg(&self) -> f64 {
        self.series.iter().map(|b| b.tol_agg()).fold(0.0, f64::max)
    }

    /// Resources of one series block; every cell has the same shape.
    pub fn series_resources(&self) -> Result<ResourceCount> {
        self.series[0].resources()
    }

    /// Resources of the per-coordinate localization blocks run side by side.
    pub fn localization_resources(&self) -> Result<ResourceCount> {
        let per: Vec<ResourceCount> = self
            .localization
            .units
            .iter()
            .map(|u| u.resources())
            .collect::<Result<_>>()?;
        Ok(ResourceCount {
            width: per.iter().map(|r| r.width).sum(),
            depth: per.iter().map(|r| r.depth).max().unwrap_or(0),
            trainable_params: per.iter().map(|r| r.trainable_params).sum(),
            gate_total: per.iter().map(|r| r.gate_total).sum(),
        })
    }

    /// Combined tally: localization and series registers side by side, the series
    /// running after the localization readout.
    pub fn resources(&self) -> Result<ResourceCount> {
        let (l, s) = (self.localization_resources()?, self.series_resources()?);
        Ok(ResourceCount {
            width: l.width + s.width,
            depth: l.depth + s.depth,
            trainable_params: l.trainable_params + s.trainable_params,
            gate_total: l.gate_total + s.gate_total,
        })
    }
}

/// One-shot nested evaluation at `x`; builds the full pipeline first.
pub fn eval_nested_taylor(
    f: &TargetFunctionSpec,
    spec: &LocalizationSpec,
    s: u32,
    x: &[f64],
) -> Result<NestedEvaluation> {
    NestedTaylorPqc::build(f, spec, s)?.eval(x)
}
