//! One-dimensional unimodal search.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`,
/// stopping once the bracket is narrower than `tol`. The endpoints are
/// compared at the end, so a minimum sitting on the boundary is returned
/// exactly. Returns `(x_min, f_min)`.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (a, b);
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    let mid = 0.5 * (lo + hi);
    let mut best = (mid, f(mid));
    for x in [a, b] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Maximum of a unimodal `f` on `[a, b]`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (x, neg) = golden_section_min(|x| -f(x), a, b, tol);
    (x, -neg)
}

/// Coarse scan followed by golden-section refinement around the best grid
/// point. Robust for quasi-concave objectives with a flat far field.
pub fn scan_then_maximize<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    scan_points: usize,
    tol: f64,
) -> (f64, f64) {
    let n = scan_points.max(3);
    let h = (b - a) / (n - 1) as f64;
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for i in 0..n {
        let v = f(a + h * i as f64);
        if v > best_val {
            best_val = v;
            best = i;
        }
    }
    let lo = a + h * best.saturating_sub(1) as f64;
    let hi = (a + h * (best + 1) as f64).min(b);
    let (x, fx) = golden_section_max(&f, lo, hi, tol);
    if fx >= best_val {
        (x, fx)
    } else {
        (a + h * best as f64, best_val)
    }
}

/// Bisection for the transition point of a monotone predicate: `pred(lo)`
/// must hold and `pred(hi)` must fail. Returns the final bracket.
pub fn bisect_predicate<P: Fn(f64) -> bool>(pred: P, mut lo: f64, mut hi: f64, width: f64) -> (f64, f64) {
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}
