//! CSV records and SVG plots.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use qroc_core::{PointKind, RocCurve};

use crate::failure::{Failure, EXIT_NUMERICAL};

pub const CSV_HEADER: [&str; 5] = ["bound", "p", "q", "beta", "alpha"];

/// One output row. `group` orders rows of the same curve together even when
/// their tags differ (exact points and kernel-segment endpoints).
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRecord {
    pub group: String,
    pub bound: String,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub beta: f64,
    pub alpha: f64,
}

pub fn records_from_curve(group: &str, curve: &RocCurve) -> Vec<CurveRecord> {
    curve
        .points
        .iter()
        .map(|pt| CurveRecord {
            group: group.to_string(),
            bound: match pt.kind {
                PointKind::Exact => group.to_string(),
                PointKind::KernelSegment => "kernel-segment".to_string(),
                PointKind::Bound(_) => group.to_string(),
            },
            p: pt.p,
            q: pt.q,
            beta: pt.beta,
            alpha: pt.alpha,
        })
        .collect()
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Sorts by curve, then `β`, then decreasing `α`; stable, so identical
/// inputs give identical bytes.
pub fn sort_records(records: &mut [CurveRecord], group_order: &[String]) {
    let rank = |g: &str| group_order.iter().position(|x| x == g).unwrap_or(usize::MAX);
    records.sort_by(|a, b| {
        rank(&a.group)
            .cmp(&rank(&b.group))
            .then(a.beta.total_cmp(&b.beta))
            .then(b.alpha.total_cmp(&a.alpha))
    });
}

pub fn write_csv(records: &[CurveRecord], out: Option<&Path>) -> Result<(), Failure> {
    for r in records {
        let finite = r.beta.is_finite() && r.alpha.is_finite() && r.p.is_none_or(f64::is_finite) && r.q.is_none_or(f64::is_finite);
        if !finite {
            return Err(Failure {
                error: "NonFinite".into(),
                message: format!("non-finite value in curve `{}`", r.bound),
                exit_code: EXIT_NUMERICAL,
            });
        }
    }
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(std::fs::File::create(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    let io = |e: csv::Error| Failure::io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in records {
        let opt = |x: Option<f64>| x.map(fmt).unwrap_or_default();
        w.write_record([r.bound.clone(), opt(r.p), opt(r.q), fmt(r.beta), fmt(r.alpha)])
            .map_err(io)?;
    }
    w.flush().map_err(|e| Failure::io(e.to_string()))
}

const COLORS: [&str; 8] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666"];
const LOG_FLOOR: f64 = -12.0;

/// α against β, one polyline per curve.
pub fn render_svg(records: &[CurveRecord], groups: &[String], log: bool) -> String {
    let (w, h, m) = (640.0, 480.0, 60.0);
    let axis = |v: f64| -> Option<f64> {
        if log {
            (v > 0.0).then(|| ((v.log10() - LOG_FLOOR) / -LOG_FLOOR).max(0.0))
        } else {
            Some(v.clamp(0.0, 1.0))
        }
    };
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect x="{m}" y="{m}" width="{}" height="{}" fill="none" stroke="black"/>"#, w - 2.0 * m, h - 2.0 * m);
    let scale = if log { "log10" } else { "linear" };
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">beta ({scale})</text>"#, w / 2.0, h - 15.0);
    let _ = writeln!(
        s,
        r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">alpha ({scale})</text>"#,
        h / 2.0,
        h / 2.0
    );
    for (gi, g) in groups.iter().enumerate() {
        let color = COLORS[gi % COLORS.len()];
        let pts: Vec<String> = records
            .iter()
            .filter(|r| &r.group == g)
            .filter_map(|r| {
                let x = axis(r.beta)?;
                let y = axis(r.alpha)?;
                Some(format!("{:.2},{:.2}", m + x * (w - 2.0 * m), h - m - y * (h - 2.0 * m)))
            })
            .collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        let _ = writeln!(s, r#"<text x="{}" y="{}" fill="{color}">{g}</text>"#, w - m - 150.0, m + 18.0 * (gi as f64 + 1.0));
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}
