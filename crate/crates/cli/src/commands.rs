use std::path::Path;

use qroc_core::asymptotics::{
    check_hoeffding_saturation, error_exponents, logconvexity_check, stein_exponents, ExponentPair,
    LogConvexityReport, NCopy, SaturationReport,
};
use qroc_core::bounds::{bound_curve, uniform_grid, BoundSpec};
use qroc_core::exact::{default_p_grid, roc_curve_exact};
use qroc_core::gaussian::{gaussian_fidelity_truncated, gaussian_qs_evaluator, GaussianQs};
use qroc_core::sequences::{adaptive_errors, adaptive_identity_residual, nonadaptive_three_copy, ThreeCopyRule};
use qroc_core::states::{
    chernoff_s_star, fidelity, overlap_decomposition, relative_entropies, ChernoffOptimum, OverlapDecomposition,
};
use qroc_core::{BoundKind, DensityMatrix, EntropyUnit, QrocError, QsEvaluator};
use serde::Serialize;

use crate::failure::Failure;
use crate::input::{pure_pair, read_pair, Pair};
use crate::output::{records_from_curve, render_svg, sort_records, write_csv, write_text, CurveRecord};
use crate::{PlotArgs, RuleArg};

/// Largest Hilbert-space dimension for which the exact curve of an
/// explicit tensor power is computed.
const MAX_EXACT_DIM: usize = 128;
const SINGLE_MODE_CUTOFF: usize = 80;
const TWO_MODE_CUTOFF: usize = 64;

fn note(value: serde_json::Value) {
    eprintln!("{value}");
}

fn emit(records: &mut [CurveRecord], groups: &[String], out: Option<&Path>, plot: &PlotArgs) -> Result<(), Failure> {
    sort_records(records, groups);
    write_csv(records, out)?;
    if let Some(svg) = &plot.svg {
        write_text(svg, &render_svg(records, groups, plot.log))?;
    }
    Ok(())
}

pub fn exact(state1: &Path, state2: &Path, grid: usize, out: Option<&Path>, plot: &PlotArgs) -> Result<(), Failure> {
    let (r1, r2) = match read_pair(state1, Some(state2))? {
        Pair::Density(a, b) => (a, b),
        other => return Err(Failure::capability(format!("exact curves need density inputs, got {}", kind_of(&other)))),
    };
    let curve = roc_curve_exact(&r1, &r2, &default_p_grid(grid.max(2)), None)?;
    let groups = vec!["exact".to_string()];
    emit(&mut records_from_curve("exact", &curve), &groups, out, plot)
}

fn kind_of(p: &Pair) -> &'static str {
    match p {
        Pair::Density(..) => "density",
        Pair::Gaussian(..) => "gaussian",
        Pair::PureOverlap(_) => "pure-overlap",
    }
}

pub struct BoundsRequest<'a> {
    pub state1: &'a Path,
    pub state2: Option<&'a Path>,
    pub bounds: &'a [String],
    pub copies: u32,
    pub grid: usize,
    pub s0: Option<f64>,
    pub cutoff: Option<usize>,
}

/// Everything the bound formulas need, for one copy.
struct PairData {
    fidelity: f64,
    qs: Evaluator,
    /// Nats; infinite when divergent.
    s12: f64,
    s21: f64,
    /// Explicit states, when the exact curve can be drawn.
    states: Option<(DensityMatrix, DensityMatrix)>,
    pure: bool,
}

enum Evaluator {
    Finite(OverlapDecomposition),
    Gaussian(Box<GaussianQs>),
}

impl Evaluator {
    fn as_dyn(&self) -> &dyn QsEvaluator {
        match self {
            Evaluator::Finite(d) => d,
            Evaluator::Gaussian(g) => g.as_ref(),
        }
    }
}

fn default_cutoff(modes: usize) -> usize {
    if modes == 1 {
        SINGLE_MODE_CUTOFF
    } else {
        TWO_MODE_CUTOFF
    }
}

fn finite_data(r1: DensityMatrix, r2: DensityMatrix, pure: bool) -> Result<PairData, Failure> {
    let d = overlap_decomposition(&r1, &r2)?;
    let ent = relative_entropies(&d, EntropyUnit::Nats);
    let (d12, d21) = stein_exponents(&d);
    Ok(PairData {
        fidelity: fidelity(&r1, &r2)?,
        s12: if ent.s12.is_finite() { d12 } else { f64::INFINITY },
        s21: if ent.s21.is_finite() { d21 } else { f64::INFINITY },
        qs: Evaluator::Finite(d),
        states: Some((r1, r2)),
        pure,
    })
}

fn pair_data(pair: Pair, cutoff: Option<usize>, want_fidelity: bool) -> Result<PairData, Failure> {
    match pair {
        Pair::Density(a, b) => finite_data(a, b, false),
        Pair::PureOverlap(f) => {
            let (a, b) = pure_pair(f);
            let mut data = finite_data(a, b, true)?;
            data.fidelity = f;
            Ok(data)
        }
        Pair::Gaussian(g1, g2) => {
            let qs = gaussian_qs_evaluator(&g1, &g2)?;
            let (s12, s21) = stein_exponents(&qs);
            let fidelity = if want_fidelity {
                let t = gaussian_fidelity_truncated(&g1, &g2, cutoff.unwrap_or_else(|| default_cutoff(g1.modes)))?;
                note(serde_json::json!({"note": "truncated-fidelity", "fidelity": t.fidelity, "error": t.error}));
                t.fidelity
            } else {
                f64::NAN
            };
            Ok(PairData {
                fidelity,
                qs: Evaluator::Gaussian(Box::new(qs)),
                s12,
                s21,
                states: None,
                pure: false,
            })
        }
    }
}

fn exact_states(data: &PairData, copies: u32) -> Result<(DensityMatrix, DensityMatrix), Failure> {
    let Some((r1, r2)) = &data.states else {
        return Err(Failure::capability("the exact curve is unavailable for Gaussian inputs"));
    };
    if data.pure {
        return Ok(pure_pair(data.fidelity.powi(copies as i32)));
    }
    let dim = (r1.dim() as f64).powi(copies as i32);
    if dim > MAX_EXACT_DIM as f64 {
        return Err(Failure::capability(format!(
            "exact curve of {copies} copies needs dimension {dim}, above the limit {MAX_EXACT_DIM}"
        )));
    }
    Ok((r1.tensor_power(copies as usize), r2.tensor_power(copies as usize)))
}

const ALL_BOUNDS: [&str; 7] = [
    "exact",
    "fidelity-lower",
    "fidelity-upper",
    "caqcb",
    "oaqcb",
    "qre-lower-alpha",
    "qre-lower-beta",
];

pub fn bounds(req: BoundsRequest<'_>, out: Option<&Path>, plot: &PlotArgs) -> Result<(), Failure> {
    if req.copies == 0 {
        return Err(QrocError::ParameterOutOfRange { name: "copies", value: 0.0 }.into());
    }
    let pair = read_pair(req.state1, req.state2)?;
    let gaussian = matches!(pair, Pair::Gaussian(..));
    let requested: Vec<String> = if req.bounds.is_empty() {
        ALL_BOUNDS
            .iter()
            .filter(|b| !(gaussian && **b == "exact"))
            .map(|b| b.to_string())
            .collect()
    } else {
        req.bounds.iter().map(|b| b.trim().to_string()).collect()
    };
    for b in &requested {
        if b != "exact" && BoundKind::parse(b).is_none() {
            return Err(QrocError::Malformed(format!("unknown bound `{b}`")).into());
        }
    }
    let needs_fidelity = requested.iter().any(|b| b.starts_with("fidelity"));
    let data = pair_data(pair, req.cutoff, needs_fidelity)?;

    let n = req.copies;
    let nf = n as f64;
    let qs = NCopy {
        single: data.qs.as_dyn(),
        copies: n,
    };
    let fid = data.fidelity.powi(n as i32);
    let bits = |s: f64| nf * s / std::f64::consts::LN_2;
    let grid = uniform_grid(req.grid.max(2));

    let mut records = Vec::new();
    for name in &requested {
        let curve = if name == "exact" {
            let (r1, r2) = exact_states(&data, n)?;
            roc_curve_exact(&r1, &r2, &default_p_grid(req.grid.max(2)), None)?
        } else {
            let spec = match BoundKind::parse(name).expect("validated above") {
                BoundKind::FidelityLower => BoundSpec::FidelityLower { fidelity: fid },
                BoundKind::FidelityUpper => BoundSpec::FidelityUpper { fidelity: fid },
                BoundKind::Caqcb => {
                    let s0 = match req.s0 {
                        Some(s) => s,
                        None => chernoff_s_star(&qs).s_star,
                    }
                    .clamp(1e-6, 1.0 - 1e-6);
                    BoundSpec::Caqcb { q_s0: qs.value(s0), s0 }
                }
                BoundKind::Oaqcb => BoundSpec::Oaqcb { qs: &qs },
                BoundKind::QreLowerAlpha => BoundSpec::QreLowerAlpha { s21_bits: bits(data.s21) },
                BoundKind::QreLowerBeta => BoundSpec::QreLowerBeta { s12_bits: bits(data.s12) },
            };
            bound_curve(&spec, &grid)?
        };
        records.extend(records_from_curve(name, &curve));
    }
    emit(&mut records, &requested, out, plot)
}

#[derive(Serialize)]
struct ExponentRow {
    p: f64,
    #[serde(flatten)]
    exponents: ExponentPair,
}

#[derive(Serialize)]
struct SteinLimits {
    /// `null` when divergent.
    s12_nats: f64,
    s21_nats: f64,
    s12_bits: f64,
    s21_bits: f64,
}

#[derive(Serialize)]
struct AsymptoticsReport {
    kind: &'static str,
    chernoff: ChernoffOptimum,
    stein: SteinLimits,
    exponents: Vec<ExponentRow>,
    saturation: SaturationReport,
    log_convexity: LogConvexityReport,
    trivial: bool,
}

pub fn asymptotics(state1: &Path, state2: Option<&Path>, p_grid: &[f64], out: Option<&Path>) -> Result<(), Failure> {
    let pair = read_pair(state1, state2)?;
    let kind = kind_of(&pair);
    let data = pair_data(pair, None, false)?;
    let qs = data.qs.as_dyn();
    let grid: Vec<f64> = if p_grid.is_empty() {
        (1..=9).map(|i| i as f64 / 10.0).collect()
    } else {
        p_grid.to_vec()
    };
    let exponents = grid
        .iter()
        .map(|&p| Ok(ExponentRow { p, exponents: error_exponents(qs, p)? }))
        .collect::<Result<Vec<_>, QrocError>>()?;
    let saturation = check_hoeffding_saturation(qs, &grid, 1e-6)?;
    let ln2 = std::f64::consts::LN_2;
    let report = AsymptoticsReport {
        kind,
        chernoff: chernoff_s_star(qs),
        stein: SteinLimits {
            s12_nats: data.s12,
            s21_nats: data.s21,
            s12_bits: data.s12 / ln2,
            s21_bits: data.s21 / ln2,
        },
        trivial: saturation.trivial,
        exponents,
        saturation,
        log_convexity: logconvexity_check(qs, 99, 1e-9),
    };
    let text = serde_json::to_string_pretty(&report).map_err(|e| Failure::io(e.to_string()))? + "\n";
    match out {
        Some(path) => write_text(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn sequence(rule: RuleArg, fidelities: &[f64], p0: Option<f64>, grid: usize, out: Option<&Path>) -> Result<(), Failure> {
    let ps: Vec<f64> = match p0 {
        Some(p) => vec![p],
        None => {
            let n = grid.max(1);
            (1..=n).map(|i| i as f64 / (n + 1) as f64).collect()
        }
    };
    type PointFn<'a> = Box<dyn Fn(f64) -> Result<(f64, f64), QrocError> + 'a>;
    let (label, point): (&str, PointFn<'_>) = match rule {
        RuleArg::Adaptive => ("adaptive", Box::new(|p| adaptive_errors(p, fidelities))),
        fixed => {
            let [f1] = fidelities else {
                return Err(QrocError::Malformed("three-copy rules take exactly one fidelity".into()).into());
            };
            let (label, r) = match fixed {
                RuleArg::A => ("rule-a", ThreeCopyRule::A),
                RuleArg::B => ("rule-b", ThreeCopyRule::B),
                _ => ("rule-c", ThreeCopyRule::C),
            };
            let f1 = *f1;
            (label, Box::new(move |p| nonadaptive_three_copy(f1, p, r)))
        }
    };
    let mut records = Vec::with_capacity(ps.len());
    let mut residual: f64 = 0.0;
    for &p in &ps {
        let (alpha, beta) = point(p)?;
        if rule == RuleArg::Adaptive {
            residual = residual.max(adaptive_identity_residual(p, fidelities)?);
        }
        records.push(CurveRecord {
            group: label.to_string(),
            bound: label.to_string(),
            p: Some(p),
            q: None,
            beta,
            alpha,
        });
    }
    if rule == RuleArg::Adaptive {
        note(serde_json::json!({"note": "adaptive-identity", "max_residual": residual}));
    }
    sort_records(&mut records, &[label.to_string()]);
    write_csv(&records, out)
}
