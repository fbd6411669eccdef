//! Residual systems certifying that a table admits its conserved quantity,
//! and the implicit profile ODE whose solutions generate the integrable
//! surfaces of revolution.
//!
//! Each residual function vanishes identically (up to rounding) exactly on
//! the matching table family; evaluating it on sampled parameters gives a
//! numerical certificate, and evaluating it on perturbed tables gives the
//! negative controls.

use crate::geom::{Curve, SkewMatrix, SurfacePatch, VecN};
use thiserror::Error;

/// Partials must match the graph chart (r¹, r²) = (u₁, u₂) this tightly.
pub const CHART_TOL: f64 = 1e-12;
/// |c₂| below this (relative to the other coefficients) demotes the slope
/// quadratic to a linear equation.
pub const C2_TINY: f64 = 1e-12;
/// Discriminants below this stop the profile integration.
pub const DISC_TOL: f64 = 1e-12;
/// Slopes beyond this magnitude mean the followed branch has escaped
/// (profile turning point).
pub const SLOPE_CAP: f64 = 1e6;
/// Relative slope jump between consecutive selections that counts as losing
/// the branch.
pub const SLOPE_JUMP: f64 = 0.5;

/// Why a residual or the profile integration could not be evaluated.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrabilityError {
    #[error("parametrization is axis-aligned here: γ̇₁γ̇₂ = {speed_product:.3e}")]
    SingularParametrizationPoint { speed_product: f64 },
    #[error("patch is not a graph chart at (u1, u2) = ({u1:.6}, {u2:.6})")]
    ChartMismatch { u1: f64, u2: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("profile branch lost at t = {t} (discriminant {discriminant:.3e})")]
    BranchLoss { t: f64, discriminant: f64 },
    #[error("slope equation degenerates at t = {t}")]
    Degenerate { t: f64 },
    #[error("invalid problem: {reason}")]
    InvalidProblem { reason: &'static str },
}

// ─────────────────────── planar residual systems ───────────────────────

/// Which planar table family a parametrized curve is tested against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlanarResidualKind {
    /// Circles centered at (−b, a); conserve M + av₁ + bv₂.
    Circle { a: f64, b: f64 },
    /// The parabola family conserving Mv₂ + λv₁².
    Parabola { lambda: f64 },
    /// The confocal conic family conserving M² + λv₁².
    Conic { lambda: f64 },
}

/// Scalar residual of the planar system at one curve point (γ, γ̇).
///
/// Circle returns the h-eliminated combined form
/// aγ̇₂ − γ̇₂γ₂ − bγ̇₁ − γ̇₁γ₁; Parabola and Conic return
/// λ − γ₁ + γ₂(γ̇₁² − γ̇₂²)/(2γ̇₁γ̇₂) and
/// λ − γ₁² + γ₂² + γ₁γ₂(γ̇₁² − γ̇₂²)/(γ̇₁γ̇₂) respectively, which are
/// undefined where γ̇₁γ̇₂ = 0 (axis-aligned tangent).
pub fn residual_planar(
    kind: PlanarResidualKind,
    gamma: &VecN,
    gamma_dot: &VecN,
) -> Result<f64, IntegrabilityError> {
    if gamma.dim() != 2 || gamma_dot.dim() != 2 {
        return Err(IntegrabilityError::DimensionMismatch {
            expected: 2,
            got: if gamma.dim() != 2 { gamma.dim() } else { gamma_dot.dim() },
        });
    }
    let (g1, g2) = (gamma[0], gamma[1]);
    let (d1, d2) = (gamma_dot[0], gamma_dot[1]);
    match kind {
        PlanarResidualKind::Circle { a, b } => Ok(a * d2 - d2 * g2 - b * d1 - d1 * g1),
        PlanarResidualKind::Parabola { lambda } => {
            let prod = d1 * d2;
            if prod == 0.0 {
                return Err(IntegrabilityError::SingularParametrizationPoint {
                    speed_product: prod,
                });
            }
            Ok(lambda - g1 + g2 * (d1 * d1 - d2 * d2) / (2.0 * prod))
        }
        PlanarResidualKind::Conic { lambda } => {
            let prod = d1 * d2;
            if prod == 0.0 {
                return Err(IntegrabilityError::SingularParametrizationPoint {
                    speed_product: prod,
                });
            }
            Ok(lambda - g1 * g1 + g2 * g2 + g1 * g2 * (d1 * d1 - d2 * d2) / prod)
        }
    }
}

/// Raw two-equation circle system with the multiplier h recovered by least
/// squares: returns (a − γ₂ − hγ̇₁, b + γ₁ − hγ̇₂, h). Combining the two as
/// r₁γ̇₂ − r₂γ̇₁ eliminates h and gives the [`residual_planar`] Circle form.
pub fn circle_system_residuals(
    a: f64,
    b: f64,
    gamma: &VecN,
    gamma_dot: &VecN,
) -> Result<(f64, f64, f64), IntegrabilityError> {
    if gamma.dim() != 2 || gamma_dot.dim() != 2 {
        return Err(IntegrabilityError::DimensionMismatch {
            expected: 2,
            got: if gamma.dim() != 2 { gamma.dim() } else { gamma_dot.dim() },
        });
    }
    let speed2 = gamma_dot.norm_squared();
    if speed2 == 0.0 {
        return Err(IntegrabilityError::SingularParametrizationPoint { speed_product: 0.0 });
    }
    let h = ((a - gamma[1]) * gamma_dot[0] + (b + gamma[0]) * gamma_dot[1]) / speed2;
    let r1 = a - gamma[1] - h * gamma_dot[0];
    let r2 = b + gamma[0] - h * gamma_dot[1];
    Ok((r1, r2, h))
}

// ─────────────────────── wire and surface residuals ───────────────────────

/// Defect of the linear tangent system: γ̇(t) − Aγ(t) − b. Zero exactly on
/// curves of the form γ(t) = e^{At}γ₀ + (drift solving the affine part).
pub fn residual_wire_linear(
    a: &SkewMatrix,
    b: &VecN,
    curve: &dyn Curve,
    t: f64,
) -> Result<VecN, IntegrabilityError> {
    let n = curve.dim();
    if a.dim() != n || b.dim() != n {
        return Err(IntegrabilityError::DimensionMismatch {
            expected: n,
            got: if a.dim() != n { a.dim() } else { b.dim() },
        });
    }
    let gamma = curve.eval(t);
    let a_gamma = a.apply(&gamma).map_err(|_| IntegrabilityError::DimensionMismatch {
        expected: n,
        got: a.dim(),
    })?;
    Ok(curve.deriv(t).sub(&a_gamma).sub(b))
}

/// Twist-matching residual β − αu₁r³_{u₂} + αu₂r³_{u₁} on a graph chart
/// r = (u₁, u₂, r³(u₁, u₂)). Vanishes exactly when the surface admits the
/// axial integral αM₃ + βv₃.
pub fn residual_axial_surface(
    alpha: f64,
    beta: f64,
    patch: &dyn SurfacePatch,
    u1: f64,
    u2: f64,
) -> Result<f64, IntegrabilityError> {
    let r = patch.eval(u1, u2);
    let (ru1, ru2) = patch.partials(u1, u2);
    let graph_defect = (r[0] - u1)
        .abs()
        .max((r[1] - u2).abs())
        .max((ru1[0] - 1.0).abs())
        .max(ru1[1].abs())
        .max(ru2[0].abs())
        .max((ru2[1] - 1.0).abs());
    if graph_defect > CHART_TOL {
        return Err(IntegrabilityError::ChartMismatch { u1, u2 });
    }
    Ok(beta - alpha * u1 * ru2[2] + alpha * u2 * ru1[2])
}

// ─────────────────────── the profile ODE ───────────────────────

/// The implicit profile equation
/// 𝓕(t, f, f′) = b + 4(at − c)f′ − 4af²f′ − 4btf′² − f(2a − 4bf′ − 8atf′²),
/// evaluated exactly as written. Profiles z = f(x² + y²) of integrable
/// surfaces of revolution satisfy 𝓕 ≡ 0.
pub fn ode_residual_f(a: f64, b: f64, c: f64, t: f64, f: f64, fp: f64) -> f64 {
    b + 4.0 * (a * t - c) * fp - 4.0 * a * f * f * fp - 4.0 * b * t * fp * fp
        - f * (2.0 * a - 4.0 * b * fp - 8.0 * a * t * fp * fp)
}

/// The same equation grouped as a quadratic in f′:
/// c₂f′² + c₁f′ + c₀ with c₂ = 4t(2af − b), c₁ = 4(at − c) − 4af² + 4bf,
/// c₀ = b − 2af. Note c₂ ≡ −4t·c₀, so for t ≥ 0 the discriminant
/// c₁² + 16t·c₀² never becomes negative: the turning point of a conic
/// profile shows up as the followed root escaping, not as a complex pair.
pub fn ode_coefficients(a: f64, b: f64, c: f64, t: f64, f: f64) -> (f64, f64, f64) {
    let c2 = 4.0 * t * (2.0 * a * f - b);
    let c1 = 4.0 * (a * t - c) - 4.0 * a * f * f + 4.0 * b * f;
    let c0 = b - 2.0 * a * f;
    (c2, c1, c0)
}

/// Initial-value problem for reconstructing a profile from the implicit
/// equation: integrate f′(t) chosen from the quadratic branch whose sign at
/// (t₀, f₀) matches `branch`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImplicitOdeProblem {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub t0: f64,
    pub f0: f64,
    /// Sign (+1 or −1) of f′ at the initial point.
    pub branch: i8,
    pub step: f64,
    pub t_end: f64,
}

/// Sampled reconstruction (tᵢ, fᵢ, f′ᵢ) of a profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSolution {
    pub ts: Vec<f64>,
    pub fs: Vec<f64>,
    pub fps: Vec<f64>,
}

/// Picks f′ at (t, f): solves the slope quadratic, demoting to the linear
/// equation when c₂ is negligible. `anchor` carries the previously selected
/// slope for continuity; `branch` breaks the tie at the initial point.
fn select_slope(
    a: f64,
    b: f64,
    c: f64,
    t: f64,
    f: f64,
    anchor: Option<f64>,
    branch: i8,
) -> Result<f64, IntegrabilityError> {
    if !f.is_finite() {
        return Err(IntegrabilityError::BranchLoss { t, discriminant: f64::NAN });
    }
    let (c2, c1, c0) = ode_coefficients(a, b, c, t, f);
    let disc = c1 * c1 - 4.0 * c2 * c0;
    let scale = c1.abs() + c0.abs() + 1.0;
    let fp = if c2.abs() <= C2_TINY * scale {
        if c1.abs() <= C2_TINY * (c0.abs() + 1.0) {
            return Err(IntegrabilityError::Degenerate { t });
        }
        -c0 / c1
    } else {
        if disc < DISC_TOL {
            return Err(IntegrabilityError::BranchLoss { t, discriminant: disc });
        }
        let sgn = if c1 >= 0.0 { 1.0 } else { -1.0 };
        let q = -0.5 * (c1 + sgn * disc.sqrt());
        let r1 = q / c2;
        let r2 = if q != 0.0 { c0 / q } else { r1 };
        match anchor {
            Some(p) => {
                if (r1 - p).abs() <= (r2 - p).abs() {
                    r1
                } else {
                    r2
                }
            }
            None => {
                let want = f64::from(branch);
                match (r1 * want >= 0.0, r2 * want >= 0.0) {
                    (true, false) => r1,
                    (false, true) => r2,
                    _ => {
                        return Err(IntegrabilityError::InvalidProblem {
                            reason: "initial branch sign does not select a unique slope",
                        })
                    }
                }
            }
        }
    };
    if !fp.is_finite() || fp.abs() > SLOPE_CAP {
        return Err(IntegrabilityError::BranchLoss { t, discriminant: disc });
    }
    if let Some(p) = anchor {
        if (fp - p).abs() > SLOPE_JUMP * (1.0 + p.abs()) {
            return Err(IntegrabilityError::BranchLoss { t, discriminant: disc });
        }
    }
    Ok(fp)
}

/// Integrates the selected f′ branch with the classical 4th-order
/// Runge–Kutta scheme, anchoring root selection stage by stage. Stops with
/// [`IntegrabilityError::BranchLoss`] at a profile turning point instead of
/// switching branches.
pub fn solve_profile_ode(p: &ImplicitOdeProblem) -> Result<ProfileSolution, IntegrabilityError> {
    if !(p.step > 0.0 && p.step.is_finite()) {
        return Err(IntegrabilityError::InvalidProblem { reason: "step must be positive" });
    }
    if !(p.t_end > p.t0) {
        return Err(IntegrabilityError::InvalidProblem { reason: "t_end must exceed t0" });
    }
    if !(p.f0.is_finite() && p.t0.is_finite()) {
        return Err(IntegrabilityError::InvalidProblem { reason: "initial point must be finite" });
    }
    if p.branch != 1 && p.branch != -1 {
        return Err(IntegrabilityError::InvalidProblem { reason: "branch must be +1 or -1" });
    }
    if p.a == 0.0 && p.b == 0.0 {
        // The equation collapses to −4c f′ = 0: only flat profiles, no
        // slope information to integrate.
        return Err(IntegrabilityError::Degenerate { t: p.t0 });
    }
    let (a, b, c) = (p.a, p.b, p.c);
    let mut t = p.t0;
    let mut f = p.f0;
    let mut fp = select_slope(a, b, c, t, f, None, p.branch)?;
    let mut ts = vec![t];
    let mut fs = vec![f];
    let mut fps = vec![fp];
    let end_tol = 1e-12 * (1.0 + p.t_end.abs());
    while t < p.t_end - end_tol {
        let h = p.step.min(p.t_end - t);
        let k1 = fp;
        let k2 = select_slope(a, b, c, t + 0.5 * h, f + 0.5 * h * k1, Some(k1), p.branch)?;
        let k3 = select_slope(a, b, c, t + 0.5 * h, f + 0.5 * h * k2, Some(k2), p.branch)?;
        let k4 = select_slope(a, b, c, t + h, f + h * k3, Some(k3), p.branch)?;
        f += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
        fp = select_slope(a, b, c, t, f, Some(k4), p.branch)?;
        ts.push(t);
        fs.push(f);
        fps.push(fp);
    }
    Ok(ProfileSolution { ts, fs, fps })
}
