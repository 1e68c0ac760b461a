//! Points and curves in the `(β, α)` error plane.

use serde::Serialize;

/// Which analytic bound produced a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    FidelityLower,
    FidelityUpper,
    Caqcb,
    Oaqcb,
    /// `α ≥ 2^{-(S(ρ2‖ρ1)+h(β))/(1-β)}`.
    QreLowerAlpha,
    /// `β ≥ 2^{-(S(ρ1‖ρ2)+h(α))/(1-α)}`.
    QreLowerBeta,
}

impl BoundKind {
    pub const ALL: [BoundKind; 6] = [
        BoundKind::FidelityLower,
        BoundKind::FidelityUpper,
        BoundKind::Caqcb,
        BoundKind::Oaqcb,
        BoundKind::QreLowerAlpha,
        BoundKind::QreLowerBeta,
    ];

    pub fn label(self) -> &'static str {
        match self {
            BoundKind::FidelityLower => "fidelity-lower",
            BoundKind::FidelityUpper => "fidelity-upper",
            BoundKind::Caqcb => "caqcb",
            BoundKind::Oaqcb => "oaqcb",
            BoundKind::QreLowerAlpha => "qre-lower-alpha",
            BoundKind::QreLowerBeta => "qre-lower-beta",
        }
    }

    pub fn parse(s: &str) -> Option<BoundKind> {
        BoundKind::ALL.into_iter().find(|k| k.label() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointKind {
    /// Optimal measurement at a grid value of `p` with the kernel sent to ρ2.
    Exact,
    /// Endpoint of a linear segment produced by a nontrivial kernel.
    KernelSegment,
    Bound(BoundKind),
}

/// One operating point. `p` and `q` are absent for bounds that are not
/// parametrised by them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RocPoint {
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub beta: f64,
    pub alpha: f64,
    pub kind: PointKind,
}

/// A curve ordered by non-decreasing `β` (ties broken by decreasing `α`).
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
}

impl RocCurve {
    pub fn from_points(mut points: Vec<RocPoint>) -> RocCurve {
        points.sort_by(|a, b| a.beta.total_cmp(&b.beta).then(b.alpha.total_cmp(&a.alpha)));
        RocCurve { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest increase of `α` between consecutive points.
    pub fn monotonicity_violation(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].alpha - w[0].alpha).max(0.0))
            .fold(0.0, f64::max)
    }

    /// Largest height of a vertex above the chord of its neighbours, over
    /// consecutive triples with distinct `β`.
    pub fn convexity_violation(&self) -> f64 {
        let pts = self.distinct_beta_vertices();
        pts.windows(3)
            .map(|w| {
                let (b0, a0) = w[0];
                let (b1, a1) = w[1];
                let (b2, a2) = w[2];
                let chord = a0 + (a2 - a0) * (b1 - b0) / (b2 - b0);
                (a1 - chord).max(0.0)
            })
            .fold(0.0, f64::max)
    }

    /// Keeps the lowest `α` for each distinct `β` (within `1e-15`).
    fn distinct_beta_vertices(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(self.points.len());
        for p in &self.points {
            match out.last_mut() {
                Some(last) if (p.beta - last.0).abs() <= 1e-15 => last.1 = last.1.min(p.alpha),
                _ => out.push((p.beta, p.alpha)),
            }
        }
        out
    }

    /// Piecewise-linear interpolation of `α` at `β`; `None` outside the
    /// covered range.
    pub fn alpha_at(&self, beta: f64) -> Option<f64> {
        let v = self.distinct_beta_vertices();
        let first = v.first()?;
        let last = v.last()?;
        if beta < first.0 || beta > last.0 {
            return None;
        }
        let i = v.partition_point(|x| x.0 < beta);
        if i == 0 {
            return Some(v[0].1);
        }
        let (b0, a0) = v[i - 1];
        let (b1, a1) = v[i.min(v.len() - 1)];
        if b1 <= b0 {
            return Some(a1);
        }
        Some(a0 + (a1 - a0) * (beta - b0) / (b1 - b0))
    }
}
