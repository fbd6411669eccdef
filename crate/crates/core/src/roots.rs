//! Scalar root location: dense grid bracketing, bisection, and safeguarded
//! Newton polish. The steppers in [`crate::dynamics`] compose these three
//! stages; they are exposed so tests can build independent fine-scan oracles.

/// A sign-change interval with the function values at its ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub g_lo: f64,
    pub g_hi: f64,
}

/// Extract sign-change brackets from tabulated samples. Non-finite samples
/// break the scan (no bracket may span them); exact zeros become zero-width
/// brackets.
pub fn brackets_from_samples(ts: &[f64], gs: &[f64]) -> Vec<Bracket> {
    assert_eq!(ts.len(), gs.len(), "sample grids must align");
    let mut out = Vec::new();
    for i in 0..ts.len().saturating_sub(1) {
        let (g0, g1) = (gs[i], gs[i + 1]);
        if !g0.is_finite() || !g1.is_finite() {
            continue;
        }
        if g0 == 0.0 {
            out.push(Bracket { lo: ts[i], hi: ts[i], g_lo: 0.0, g_hi: 0.0 });
        } else if g0 * g1 < 0.0 {
            out.push(Bracket { lo: ts[i], hi: ts[i + 1], g_lo: g0, g_hi: g1 });
        }
    }
    if let (Some(&t), Some(&g)) = (ts.last(), gs.last()) {
        if g == 0.0 {
            out.push(Bracket { lo: t, hi: t, g_lo: 0.0, g_hi: 0.0 });
        }
    }
    out
}

/// Evaluate `g` on a uniform grid of `cells` intervals over [start, end] and
/// collect the sign-change brackets.
pub fn scan_brackets(mut g: impl FnMut(f64) -> f64, start: f64, end: f64, cells: usize) -> Vec<Bracket> {
    assert!(cells > 0, "need at least one scan cell");
    let h = (end - start) / cells as f64;
    let ts: Vec<f64> = (0..=cells).map(|k| start + h * k as f64).collect();
    let gs: Vec<f64> = ts.iter().map(|&t| g(t)).collect();
    brackets_from_samples(&ts, &gs)
}

/// Bisect a bracket down to the given interval width. The bracket must carry
/// a genuine sign change (or be zero-width).
pub fn bisect(mut g: impl FnMut(f64) -> f64, bracket: Bracket, width_tol: f64) -> f64 {
    let Bracket { mut lo, mut hi, g_lo, g_hi } = bracket;
    if g_lo == 0.0 {
        return lo;
    }
    if g_hi == 0.0 {
        return hi;
    }
    debug_assert!(g_lo * g_hi < 0.0, "bisect needs a sign change");
    let sign_lo = g_lo.signum();
    for _ in 0..200 {
        if (hi - lo).abs() <= width_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break; // interval at floating-point resolution
        }
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if gm.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Newton iterations clamped to [lo, hi], keeping the iterate with the
/// smallest |g| seen. `g_dg` returns (g, g′).
pub fn newton_polish(
    mut g_dg: impl FnMut(f64) -> (f64, f64),
    x0: f64,
    lo: f64,
    hi: f64,
    iters: usize,
) -> f64 {
    let mut x = x0;
    let (mut best_x, mut best_g) = (x0, f64::INFINITY);
    for _ in 0..=iters {
        let (g, dg) = g_dg(x);
        if g.is_finite() && g.abs() < best_g {
            best_g = g.abs();
            best_x = x;
        }
        if g == 0.0 || dg == 0.0 || !g.is_finite() || !dg.is_finite() {
            break;
        }
        let next = (x - g / dg).clamp(lo, hi);
        if next == x {
            break;
        }
        x = next;
    }
    best_x
}
