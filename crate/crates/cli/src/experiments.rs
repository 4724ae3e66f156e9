use crate::config::{Experiment, ExperimentConfig};
use crate::CliError;
use pqc_core::approx::{
    builtin_target, fnn_compare, l2_error, ErrorReport, FnnComparisonSpec, GridSpec, PointError, Region,
};
use pqc_core::circuits::{
    build_bernstein_pqc_with, build_poly_pqc_with, build_trig_poly_pqc, qsp_leaf, round_to_eta, BlockCircuit,
    LocalizationPqc, MultivariateTrigPolynomial, NestedTaylorPqc,
};
use pqc_core::mat2::C64;
use pqc_core::poly::{
    thm2_simplified, thm_bounds, BernsteinTable, BoundKind, BoundParams, LocalizationSpec, MultiIndex,
    MultivariatePolynomial, Parity, ParityPolynomial, Polynomial, TargetFunctionSpec,
};
use pqc_core::qsp::{qsp_block, qsp_grid, qsp_residual, qsp_synthesize, QspAngleSequence, DEFAULT_TOL};
use pqc_core::sim::{Part, ResourceCount};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::f64::consts::PI;

type Res<T> = Result<T, CliError>;

/// What a block circuit is compared against.
pub enum Reference {
    Poly(MultivariatePolynomial),
    Target(TargetFunctionSpec),
    Trig(MultivariateTrigPolynomial),
}

/// A constructed model, ready to evaluate or serialize.
pub enum Built {
    Qsp {
        poly: ParityPolynomial,
        angles: QspAngleSequence,
        leaf: BlockCircuit,
    },
    Block {
        block: BlockCircuit,
        reference: Reference,
    },
    Localization(LocalizationPqc),
    Taylor {
        pqc: NestedTaylorPqc,
        target: TargetFunctionSpec,
    },
}

fn side_by_side(parts: &[ResourceCount]) -> ResourceCount {
    ResourceCount {
        width: parts.iter().map(|r| r.width).sum(),
        depth: parts.iter().map(|r| r.depth).max().unwrap_or(0),
        trainable_params: parts.iter().map(|r| r.trainable_params).sum(),
        gate_total: parts.iter().map(|r| r.gate_total).sum(),
    }
}

impl Built {
    pub fn resources(&self) -> Res<ResourceCount> {
        Ok(match self {
            Built::Qsp { leaf, .. } => leaf.resources()?,
            Built::Block { block, .. } => block.resources()?,
            Built::Localization(l) => {
                side_by_side(&l.units.iter().map(|u| u.resources()).collect::<Result<Vec<_>, _>>()?)
            }
            Built::Taylor { pqc, .. } => pqc.resources()?,
        })
    }

    /// Serialized gate list. The localization experiment emits the first
    /// coordinate's block and the nested Taylor model the series block of cell 0.
    pub fn circuit_text(&self) -> Res<String> {
        Ok(match self {
            Built::Qsp { leaf, .. } => leaf.to_text()?,
            Built::Block { block, .. } => block.to_text()?,
            Built::Localization(l) => l.units[0].to_text()?,
            Built::Taylor { pqc, .. } => pqc.series(&MultiIndex::zeros(pqc.table.dims()))?.to_text()?,
        })
    }

    pub fn eval_json(&self, x: &[f64]) -> Res<Value> {
        Ok(match self {
            Built::Qsp { poly, leaf, .. } => {
                let [v] = x else {
                    return Err(CliError::Config("qsp models take one coordinate".into()));
                };
                json!({ "x": x, "model": leaf.real_value(x)?, "target": poly.eval(*v) })
            }
            Built::Block { block, reference } => {
                let m = block.value(x)?;
                match reference {
                    Reference::Poly(p) => json!({ "x": x, "model": m.re, "target": p.eval(x) }),
                    Reference::Target(f) => json!({ "x": x, "model": m.re, "target": f.eval(x) }),
                    Reference::Trig(t) => {
                        let v = t.eval(x);
                        json!({ "x": x, "model": [m.re, m.im], "target": [v.re, v.im] })
                    }
                }
            }
            Built::Localization(l) => {
                let out = l.eval(x)?;
                json!({ "x": x, "localized": out, "eta": round_to_eta(&out, l.spec.k()).entries() })
            }
            Built::Taylor { pqc, target } => {
                let e = pqc.eval(x)?;
                json!({ "x": x, "model": e.value, "target": target.eval(x), "eta": e.eta.entries(), "in_bands": e.in_bands })
            }
        })
    }
}

fn parity_polynomial(p: &MultivariatePolynomial) -> Res<ParityPolynomial> {
    if p.dims() != 1 {
        return Err(CliError::Config("qsp targets are univariate".into()));
    }
    let deg = p.total_degree() as usize;
    let coeffs: Vec<f64> = (0..=deg)
        .map(|k| p.coefficient(&MultiIndex::new(vec![k as u32])))
        .collect();
    let vanishes = |parity: Parity| coeffs.iter().enumerate().all(|(k, &c)| parity.matches(k) || c == 0.0);
    let parity = if vanishes(Parity::Even) {
        Parity::Even
    } else if vanishes(Parity::Odd) {
        Parity::Odd
    } else {
        return Err(CliError::Config("qsp targets must be even or odd".into()));
    };
    Ok(ParityPolynomial::new(Polynomial::new(coeffs), parity)?)
}

fn target_spec(cfg: &ExperimentConfig) -> Res<&crate::config::TargetSpec> {
    cfg.target
        .as_ref()
        .ok_or_else(|| CliError::Config(format!("experiment {} needs a target", cfg.experiment.name())))
}

fn builtin(cfg: &ExperimentConfig) -> Res<TargetFunctionSpec> {
    match target_spec(cfg)? {
        crate::config::TargetSpec::Builtin(name) => {
            Ok(builtin_target(name, cfg.d.unwrap_or(1), cfg.beta.unwrap_or(2.0))?)
        }
        _ => Err(CliError::Config(format!(
            "experiment {} needs a builtin target",
            cfg.experiment.name()
        ))),
    }
}

/// Localization band parameters: the given values or the experiment defaults.
fn localization_spec(cfg: &ExperimentConfig) -> Res<LocalizationSpec> {
    let k = cfg.require(cfg.k, "k")?;
    let kf = k as f64;
    let d = cfg.d.unwrap_or(1) as i32;
    let (delta, eps) = match cfg.experiment {
        // Narrowest admissible gap that still matches K^-d where possible.
        Experiment::Taylor => (kf.powi(-d).min(1.0 / (4.0 * kf)), 0.5 / kf),
        _ => (0.05f64.min(0.999 / (3.0 * kf)), 0.1 / kf),
    };
    Ok(LocalizationSpec::new(
        k,
        cfg.delta.unwrap_or(delta),
        cfg.eps.unwrap_or(eps),
    )?)
}

/// Builds the model an experiment evaluates.
pub fn build(cfg: &ExperimentConfig) -> Res<Built> {
    cfg.validate()?;
    let tol = cfg.tol.unwrap_or(DEFAULT_TOL);
    match cfg.experiment {
        Experiment::Qsp => {
            let poly = parity_polynomial(&target_spec(cfg)?.polynomial()?)?;
            let angles = qsp_synthesize(&poly, tol)?;
            let leaf = qsp_leaf(&angles, 0, 1.0, 0.0, tol, "qsp")?;
            Ok(Built::Qsp { poly, angles, leaf })
        }
        Experiment::Poly => {
            let p = target_spec(cfg)?.polynomial()?;
            Ok(Built::Block {
                block: build_poly_pqc_with(&p, tol)?,
                reference: Reference::Poly(p),
            })
        }
        Experiment::Bernstein => {
            let f = builtin(cfg)?;
            let n = cfg.require(cfg.n, "n")?;
            Ok(Built::Block {
                block: build_bernstein_pqc_with(&f, n, tol)?,
                reference: Reference::Target(f),
            })
        }
        Experiment::Trig => {
            let t = target_spec(cfg)?.trig()?;
            Ok(Built::Block {
                block: build_trig_poly_pqc(&t)?,
                reference: Reference::Trig(t),
            })
        }
        Experiment::Localization => Ok(Built::Localization(LocalizationPqc::new(
            &localization_spec(cfg)?,
            cfg.d.unwrap_or(1),
        )?)),
        Experiment::Taylor => {
            let f = builtin(cfg)?;
            let holder = f
                .holder
                .ok_or_else(|| CliError::Config(format!("target {} has no Hölder class", f.name)))?;
            if cfg.s.is_some_and(|s| s != holder.s()) {
                return Err(CliError::Config(format!(
                    "s must equal ceil(beta) - 1 = {}",
                    holder.s()
                )));
            }
            let pqc = NestedTaylorPqc::build(&f, &localization_spec(cfg)?, holder.s())?;
            Ok(Built::Taylor { pqc, target: f })
        }
        Experiment::FnnCompare => Err(CliError::Config(
            "fnn_compare evaluates formulas and builds no circuit".into(),
        )),
    }
}

/// Angles for the qsp target or the localization polynomial.
pub fn synthesize(cfg: &ExperimentConfig) -> Res<Value> {
    match build(cfg)? {
        Built::Qsp { poly, angles, .. } => {
            let residual = qsp_residual(&angles, &|x| poly.eval(x), &qsp_grid(angles.angles.len() - 1));
            Ok(
                json!({ "parity": format!("{:?}", poly.parity()).to_lowercase(), "degree": poly.degree(), "angles": angles.angles, "residual": residual }),
            )
        }
        Built::Localization(l) => {
            let angles = pqc_core::circuits::synthesize_cached(&l.poly.poly, DEFAULT_TOL)?;
            Ok(
                json!({ "degree": l.poly.degree(), "k": l.spec.k(), "delta": l.spec.delta(), "eps": l.spec.eps(), "angles": angles.angles }),
            )
        }
        _ => Err(CliError::Config(
            "synth supports the qsp and localization experiments".into(),
        )),
    }
}

fn grid(cfg: &ExperimentConfig, d: usize, region: Region) -> Res<GridSpec> {
    let m = cfg.points_per_axis.unwrap_or_else(|| GridSpec::default_points(d));
    Ok(GridSpec::new(d, m, region)?)
}

/// Largest Hadamard-test sampling deviation at up to five grid points.
fn shot_deviation(block: &BlockCircuit, xs: &[Vec<f64>], shots: u64, seed: u64) -> Res<f64> {
    let step = (xs.len() / 5).max(1);
    let mut worst: f64 = 0.0;
    for (i, x) in xs.iter().step_by(step).take(5).enumerate() {
        let est = block.sample(x, Part::Real, shots, seed.wrapping_add(i as u64))?;
        worst = worst.max((est.estimate - block.block_value(x)?.re).abs());
    }
    Ok(worst)
}

fn report_block(cfg: &ExperimentConfig, block: &BlockCircuit, reference: &Reference) -> Res<ErrorReport> {
    let d = match reference {
        Reference::Poly(p) => p.dims(),
        Reference::Target(f) => f.dims,
        Reference::Trig(t) => t.dims(),
    };
    let g = grid(cfg, d, Region::FullCube)?;
    let mut xs = g.points();
    if let Reference::Trig(_) = reference {
        xs.iter_mut().flatten().for_each(|v| *v *= 2.0 * PI);
    }
    let values = block.values(&xs)?;
    let points: Vec<PointError> = xs
        .into_par_iter()
        .zip(values)
        .map(|(x, m)| {
            let t: C64 = match reference {
                Reference::Poly(p) => p.eval(&x).into(),
                Reference::Target(f) => f.eval(&x).into(),
                Reference::Trig(t) => t.eval(&x),
            };
            PointError {
                error: (m - t).norm(),
                target: t.re,
                model: m.re,
                x,
            }
        })
        .collect();
    let sup = points.iter().map(|p| p.error).fold(0.0, f64::max);
    let region = if let Reference::Trig(_) = reference {
        "torus_grid"
    } else {
        "full_cube"
    };
    let resources = block.resources()?;
    let (bound, bound_name, target_name) = match reference {
        Reference::Poly(_) => (
            0.0,
            "exact_polynomial".to_string(),
            cfg.target.as_ref().map(|t| t.label()).unwrap_or_default(),
        ),
        Reference::Trig(_) => (
            0.0,
            "exact_trig_polynomial".to_string(),
            cfg.target.as_ref().map(|t| t.label()).unwrap_or_default(),
        ),
        Reference::Target(f) => {
            let l = f
                .lipschitz
                .ok_or_else(|| CliError::Config(format!("target {} has no Lipschitz constant", f.name)))?;
            let p = BoundParams {
                d,
                lipschitz: l,
                n: block_n(cfg)?,
                eps: cfg.eps.unwrap_or(0.3),
                ..Default::default()
            };
            (thm_bounds(BoundKind::Thm2, &p), "thm2".to_string(), f.name.clone())
        }
    };
    let mut r = ErrorReport::new(
        cfg.experiment.name(),
        target_name,
        sup,
        bound,
        bound_name,
        block.tol_agg(),
        resources,
        region,
    )
    .with_detail("rescale", block.rescale())
    .with_detail("points", points.len() as f64);
    if let Reference::Target(f) = reference {
        let n = block_n(cfg)?;
        let eps = cfg.eps.unwrap_or(0.3);
        let table = BernsteinTable::new(f, n)?;
        let dev = points
            .par_iter()
            .map(|p| table.eval(&p.x).map(|c| (c - p.model).abs()))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .fold(0.0, f64::max);
        r = r
            .with_detail("eps", eps)
            .with_detail(
                "thm2_simplified",
                thm2_simplified(d, f.lipschitz.unwrap_or(0.0), n, eps),
            )
            .with_detail("classical_deviation", dev)
            .with_check("matches_classical", dev <= block.tol_agg() + 1e-9);
    }
    if let Some(shots) = cfg.shots.filter(|&s| s > 0) {
        let seed = cfg.require(cfg.seed, "seed")?;
        let xs: Vec<Vec<f64>> = points.iter().map(|p| p.x.clone()).collect();
        let dev = shot_deviation(block, &xs, shots, seed)?;
        let limit = 5.0 / (shots as f64).sqrt();
        r = r
            .with_seed(seed)
            .with_detail("shots", shots as f64)
            .with_detail("shot_max_deviation", dev)
            .with_check("shots_within_5_sigma", dev <= limit);
    }
    if cfg.per_point {
        r = r.with_per_point(points);
    }
    Ok(r)
}

fn block_n(cfg: &ExperimentConfig) -> Res<u64> {
    cfg.require(cfg.n, "n")
}

fn report_qsp(
    cfg: &ExperimentConfig,
    poly: &ParityPolynomial,
    angles: &QspAngleSequence,
    leaf: &BlockCircuit,
) -> Res<ErrorReport> {
    let tol = cfg.tol.unwrap_or(DEFAULT_TOL);
    let xs = qsp_grid(angles.angles.len() - 1);
    let residual = qsp_residual(angles, &|x| poly.eval(x), &xs);
    let mut circuit_gap: f64 = 0.0;
    let mut points = Vec::with_capacity(xs.len());
    for &x in &xs {
        let m = leaf.value(&[x])?;
        circuit_gap = circuit_gap.max((m - qsp_block(angles, x)?).norm());
        points.push(PointError {
            x: vec![x],
            target: poly.eval(x),
            model: m.re,
            error: (m.re - poly.eval(x)).abs(),
        });
    }
    let mut r = ErrorReport::new(
        "qsp",
        target_spec(cfg)?.label(),
        residual,
        tol,
        "qsp_tol",
        0.0,
        leaf.resources()?,
        "chebyshev_grid",
    )
    .with_detail("degree", poly.degree() as f64)
    .with_detail("circuit_gap", circuit_gap)
    .with_check("circuit_matches_angles", circuit_gap <= 1e-10);
    if cfg.per_point {
        r = r.with_per_point(points);
    }
    Ok(r)
}

fn report_localization(cfg: &ExperimentConfig, l: &LocalizationPqc) -> Res<ErrorReport> {
    let spec = l.spec;
    let (k, eps) = (spec.k(), spec.eps());
    let d = l.units.len();
    let xs = grid(cfg, d, Region::UnionQEta { k, delta: spec.delta() })?.points();
    let rows = xs
        .par_iter()
        .map(|x| {
            let out = l.eval(x)?;
            let bands: Vec<u32> = x
                .iter()
                .map(|&v| spec.band_of(v).expect("grid point inside a band"))
                .collect();
            let offsets: Vec<f64> = out.iter().zip(&bands).map(|(o, &b)| o - b as f64 / k as f64).collect();
            let routed = round_to_eta(&out, k).entries() == bands.as_slice();
            Ok((offsets, routed))
        })
        .collect::<Result<Vec<_>, pqc_core::PqcError>>()?;
    let all: Vec<f64> = rows.iter().flat_map(|(o, _)| o.iter().copied()).collect();
    let sup = all.iter().map(|o| o.abs()).fold(0.0, f64::max);
    let misrouted = rows.iter().filter(|(_, ok)| !ok).count();
    let tol_agg = l.units.iter().map(|u| u.tol_agg()).fold(0.0, f64::max);
    let resources = side_by_side(&l.units.iter().map(|u| u.resources()).collect::<Result<Vec<_>, _>>()?);
    let mut r = ErrorReport::new(
        "localization",
        "staircase",
        sup,
        eps,
        "localization_eps",
        tol_agg,
        resources,
        format!("union_q_eta(K={k}, delta={})", spec.delta()),
    )
    .with_detail("degree", l.poly.degree() as f64)
    .with_detail("delta", spec.delta())
    .with_detail("misrouted", misrouted as f64)
    .with_detail("points", xs.len() as f64)
    .with_check("offsets_nonnegative", all.iter().all(|&o| o >= -tol_agg))
    .with_check("offsets_below_eps", all.iter().all(|&o| o < eps))
    .with_check("round_to_eta_exact", misrouted == 0);
    if cfg.per_point {
        let pts = xs
            .into_iter()
            .zip(&rows)
            .map(|(x, (o, _))| {
                let worst = o
                    .iter()
                    .copied()
                    .fold(0.0, |a: f64, b| if b.abs() > a.abs() { b } else { a });
                PointError {
                    x,
                    target: 0.0,
                    model: worst,
                    error: worst.abs(),
                }
            })
            .collect();
        r = r.with_per_point(pts);
    }
    Ok(r)
}

fn report_taylor(cfg: &ExperimentConfig, pqc: &NestedTaylorPqc, f: &TargetFunctionSpec) -> Res<ErrorReport> {
    let spec = *pqc.spec();
    let (k, delta) = (spec.k(), spec.delta());
    let d = f.dims;
    let holder = f.holder.expect("checked at build time");
    let xs = grid(cfg, d, Region::UnionQEta { k, delta })?.points();
    let evals = pqc.eval_many(&xs)?;
    let mut misrouted = 0usize;
    let points: Vec<PointError> = xs
        .into_iter()
        .zip(evals)
        .map(|(x, e)| {
            let bands: Vec<u32> = x.iter().map(|&v| spec.band_of(v).unwrap_or(u32::MAX)).collect();
            if e.eta.entries() != bands.as_slice() {
                misrouted += 1;
            }
            let t = f.eval(&x);
            PointError {
                error: (t - e.value).abs(),
                target: t,
                model: e.value,
                x,
            }
        })
        .collect();
    let sup = points.iter().map(|p| p.error).fold(0.0, f64::max);
    let params = BoundParams {
        d,
        s: holder.s(),
        beta: holder.beta,
        k,
        ..Default::default()
    };
    let bound = thm_bounds(BoundKind::Thm3, &params);
    let seed = cfg.seed.unwrap_or(0);
    let samples = cfg.l2_samples.unwrap_or(10_000);
    let l2 = l2_error(f, pqc, k, delta, samples, seed)?;
    let l2_bound = thm_bounds(BoundKind::L2Corollary, &params);
    let mut r = ErrorReport::new(
        "taylor",
        f.name.clone(),
        sup,
        bound,
        "thm3",
        pqc.tol_agg(),
        pqc.resources()?,
        format!("union_q_eta(K={k}, delta={delta})"),
    )
    .with_l2(l2.mean_square)
    .with_seed(seed)
    .with_detail("beta", holder.beta)
    .with_detail("s", holder.s() as f64)
    .with_detail("delta", delta)
    .with_detail("eps", spec.eps())
    .with_detail("localization_degree", pqc.localization.poly.degree() as f64)
    .with_detail("misrouted", misrouted as f64)
    .with_detail("l2_bound", l2_bound)
    .with_detail("l2_stderr", l2.stderr)
    .with_detail("l2_samples", samples as f64)
    .with_detail("trifling_mass", l2.trifling_mass)
    .with_detail("trifling_bound", l2.trifling_bound)
    .with_check("routing_exact", misrouted == 0)
    .with_check("l2_corollary", l2.mean_square <= l2_bound + 3.0 * l2.stderr)
    .with_check("trifling_mass", l2.trifling_mass_ok());
    if cfg.per_point {
        r = r.with_per_point(points);
    }
    Ok(r)
}

fn report_fnn(cfg: &ExperimentConfig) -> Res<ErrorReport> {
    let spec = FnnComparisonSpec::new(
        cfg.require(cfg.d, "d")?,
        cfg.require(cfg.s, "s")?,
        cfg.eps.unwrap_or(0.1),
        cfg.lambda0.unwrap_or(0.5),
    )?;
    let c = fnn_compare(&spec)?;
    let next = fnn_compare(&FnnComparisonSpec { d: spec.d + 1, ..spec })?;
    Ok(ErrorReport::new(
        "fnn_compare",
        "formulas",
        0.0,
        0.0,
        "none",
        0.0,
        ResourceCount::default(),
        "none",
    )
    .with_detail("d", spec.d as f64)
    .with_detail("s", spec.s as f64)
    .with_detail("eps", spec.eps)
    .with_detail("lambda0", spec.lambda0)
    .with_detail("ln_k_pqc", c.ln_k_pqc)
    .with_detail("ln_k_fnn", c.ln_k_fnn)
    .with_detail("ln_pqc_size", c.pqc.ln_size())
    .with_detail("ln_fnn_size", c.fnn.ln_size())
    .with_detail("ln_pqc_params", c.pqc.ln_params)
    .with_detail("ln_fnn_params", c.fnn.ln_params)
    .with_detail("ln_size_ratio", c.ln_size_ratio)
    .with_detail("ln_param_ratio", c.ln_param_ratio)
    .with_detail("ln_param_ratio_next_d", next.ln_param_ratio))
}

/// Builds, measures and checks the configured experiment.
pub fn run_experiment(cfg: &ExperimentConfig) -> Res<ErrorReport> {
    cfg.validate()?;
    if cfg.experiment == Experiment::FnnCompare {
        return report_fnn(cfg);
    }
    match build(cfg)? {
        Built::Qsp { poly, angles, leaf } => report_qsp(cfg, &poly, &angles, &leaf),
        Built::Block { block, reference } => report_block(cfg, &block, &reference),
        Built::Localization(l) => report_localization(cfg, &l),
        Built::Taylor { pqc, target } => report_taylor(cfg, &pqc, &target),
    }
}

/// Writes the report JSON to the configured output path, if any, and returns it.
pub fn write_report(cfg: &ExperimentConfig, report: &ErrorReport) -> Res<String> {
    let text = report.to_json()?;
    if let Some(path) = &cfg.output_path {
        std::fs::write(path, format!("{text}\n"))?;
    }
    Ok(text)
}
