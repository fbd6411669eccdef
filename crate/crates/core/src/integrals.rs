//! Velocity-polynomial conserved quantities: evaluation, chord evaluation on
//! wires, multiplier identities on surfaces of revolution, and per-orbit
//! conservation audits.
//!
//! Every quantity here is a function F(x, v), polynomial in v, that is
//! constant along straight-line motion (it depends on x only through the
//! angular momenta Mᵢⱼ = xᵢvⱼ − xⱼvᵢ) and is preserved by reflection on the
//! matching table.

use crate::dynamics::Orbit;
use crate::geom::{Curve, SkewMatrix, SurfacePatch, VecN};
use thiserror::Error;

/// Relative drift is measured against max(|F₀|, this floor) so orbits with
/// F₀ ≈ 0 do not divide by zero.
pub const DRIFT_REL_FLOOR: f64 = 1e-3;

/// Chart determinants and multiplier denominators below this are degenerate.
pub const MULTIPLIER_TOL: f64 = 1e-12;

/// Why an integral could not be evaluated.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegralError {
    #[error("state dimension {got} does not match the integral's dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("chord endpoints at s = {s}, t = {t} coincide")]
    DegenerateChord { s: f64, t: f64 },
    #[error("chart determinant {det:.3e} too small at (u1, u2) = ({u1:.6}, {u2:.6})")]
    DegenerateChart { u1: f64, u2: f64, det: f64 },
    #[error("multiplier denominator {value:.3e} vanishes ({what})")]
    DegenerateMultiplier { what: &'static str, value: f64 },
    #[error("velocity must be nonzero to evaluate the identity")]
    ZeroVelocity,
}

// ─────────────────────────── angular momenta ───────────────────────────

/// All pairwise angular momenta Mᵢⱼ = xᵢvⱼ − xⱼvᵢ of a state, stored as a
/// skew matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularMomenta {
    m: SkewMatrix,
}

impl AngularMomenta {
    /// Computes every Mᵢⱼ for i < j.
    pub fn new(x: &VecN, v: &VecN) -> Result<Self, IntegralError> {
        if x.dim() != v.dim() {
            return Err(IntegralError::DimensionMismatch { expected: x.dim(), got: v.dim() });
        }
        let n = x.dim();
        let mut m = SkewMatrix::zeros(n);
        for i in 0..n {
            for j in (i + 1)..n {
                m.set(i, j, x[i] * v[j] - x[j] * v[i]);
            }
        }
        Ok(AngularMomenta { m })
    }

    /// Mᵢⱼ with the antisymmetry Mⱼᵢ = −Mᵢⱼ built in.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.m.entry(i, j)
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    /// In ℝ³, the classical components (M₁, M₂, M₃) = x × v.
    pub fn axial(&self) -> Option<(f64, f64, f64)> {
        (self.dim() == 3).then(|| (self.entry(1, 2), self.entry(2, 0), self.entry(0, 1)))
    }
}

// ─────────────────────────── tangential data ───────────────────────────

/// Velocity components along the surface partials: S₁ = (v, r_{u₁}),
/// S₂ = (v, r_{u₂}). Reflection on the surface preserves both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentialData {
    pub s1: f64,
    pub s2: f64,
}

/// Tangential data of a velocity at a surface parameter point.
pub fn surface_tangential(patch: &dyn SurfacePatch, u1: f64, u2: f64, v: &VecN) -> TangentialData {
    let (ru1, ru2) = patch.partials(u1, u2);
    TangentialData { s1: v.dot(&ru1), s2: v.dot(&ru2) }
}

/// Curve analogue S = (v, γ̇); reflection on a wire preserves it.
pub fn curve_tangential(curve: &dyn Curve, t: f64, v: &VecN) -> f64 {
    v.dot(&curve.deriv(t))
}

// ─────────────────────────── integral catalog ───────────────────────────

/// A conserved quantity, polynomial in velocity.
///
/// Positions are written x = (x₁, …) with the plane convention
/// M = x₁v₂ − x₂v₁; in ℝ³ the components of x × v are
/// M₁ = x₂v₃ − x₃v₂, M₂ = x₃v₁ − x₁v₃, M₃ = x₁v₂ − x₂v₁.
#[derive(Debug, Clone, PartialEq)]
pub enum IntegralSpec {
    /// F = ⟨x, Av⟩ + ⟨b, v⟩ for a skew matrix A; conserved on wires whose
    /// defining system is γ̇ = −Aγ + b (see [`wire_integral`]).
    LinearMomentum { a: SkewMatrix, b: VecN },
    /// F = M + av₁ + bv₂ in the plane; conserved on circles centered at
    /// (−b, a).
    PlanarDeg1 { a: f64, b: f64 },
    /// F = Mv₂ + λv₁² in the plane; conserved on the parabola family with
    /// focal parameter tied to λ.
    ParabolaIntegral { lambda: f64 },
    /// F = M² + λv₁² in the plane; conserved on the confocal conic with
    /// parameter λ.
    ConicIntegral { lambda: f64 },
    /// F = αM₃ + βv₃ in ℝ³; conserved on the matching helicoidal graph
    /// surface.
    AxialDeg1 { alpha: f64, beta: f64 },
    /// F₂ = a(M₁² + M₂²) + b(M₁v₂ − M₂v₁) + c(v₁² + v₂²) in ℝ³; conserved
    /// on surfaces of revolution z = f(x² + y²) whose profile satisfies the
    /// matching closure equation.
    Degree2Axial { a: f64, b: f64, c: f64 },
}

impl IntegralSpec {
    /// Ambient dimension the integral is defined on.
    pub fn dim(&self) -> usize {
        match self {
            IntegralSpec::LinearMomentum { a, .. } => a.dim(),
            IntegralSpec::PlanarDeg1 { .. }
            | IntegralSpec::ParabolaIntegral { .. }
            | IntegralSpec::ConicIntegral { .. } => 2,
            IntegralSpec::AxialDeg1 { .. } | IntegralSpec::Degree2Axial { .. } => 3,
        }
    }

    /// Compact identifier used in CSV headers and reports; round-trips
    /// through the CLI's integral grammar.
    pub fn id(&self) -> String {
        match self {
            IntegralSpec::LinearMomentum { .. } => "wire".to_string(),
            IntegralSpec::PlanarDeg1 { a, b } if *a == 0.0 && *b == 0.0 => "M".to_string(),
            IntegralSpec::PlanarDeg1 { a, b } => format!("planar_deg1({a},{b})"),
            IntegralSpec::ParabolaIntegral { lambda } => format!("parabola({lambda})"),
            IntegralSpec::ConicIntegral { lambda } => format!("conic({lambda})"),
            IntegralSpec::AxialDeg1 { alpha, beta } if *alpha == 1.0 && *beta == 0.0 => {
                "M3".to_string()
            }
            IntegralSpec::AxialDeg1 { alpha, beta } => format!("axial({alpha},{beta})"),
            IntegralSpec::Degree2Axial { a, b, c } => format!("deg2({a},{b},{c})"),
        }
    }

    /// Evaluates F(x, v). Pure; errors only on dimension mismatch.
    pub fn eval(&self, x: &VecN, v: &VecN) -> Result<f64, IntegralError> {
        let expected = self.dim();
        if x.dim() != expected || v.dim() != expected {
            return Err(IntegralError::DimensionMismatch {
                expected,
                got: if x.dim() != expected { x.dim() } else { v.dim() },
            });
        }
        Ok(match self {
            IntegralSpec::LinearMomentum { a, b } => {
                let av = a.apply(v).map_err(|_| IntegralError::DimensionMismatch {
                    expected,
                    got: b.dim(),
                })?;
                x.dot(&av) + b.dot(v)
            }
            IntegralSpec::PlanarDeg1 { a, b } => x[0] * v[1] - x[1] * v[0] + a * v[0] + b * v[1],
            IntegralSpec::ParabolaIntegral { lambda } => {
                (x[0] * v[1] - x[1] * v[0]) * v[1] + lambda * v[0] * v[0]
            }
            IntegralSpec::ConicIntegral { lambda } => {
                let m = x[0] * v[1] - x[1] * v[0];
                m * m + lambda * v[0] * v[0]
            }
            IntegralSpec::AxialDeg1 { alpha, beta } => {
                alpha * (x[0] * v[1] - x[1] * v[0]) + beta * v[2]
            }
            IntegralSpec::Degree2Axial { a, b, c } => {
                let m1 = x[1] * v[2] - x[2] * v[1];
                let m2 = x[2] * v[0] - x[0] * v[2];
                a * (m1 * m1 + m2 * m2) + b * (m1 * v[1] - m2 * v[0])
                    + c * (v[0] * v[0] + v[1] * v[1])
            }
        })
    }
}

/// The conserved quantity of a wire whose tangent satisfies the linear
/// system γ̇ = A_c γ + b_c: F = ⟨A_c x + b_c, v⟩, stored in ⟨x, Av⟩ + ⟨b, v⟩
/// form with A = −A_c (skew transpose).
pub fn wire_integral(a_c: &SkewMatrix, b_c: &VecN) -> IntegralSpec {
    IntegralSpec::LinearMomentum { a: a_c.negated(), b: b_c.clone() }
}

/// Evaluates an integral on the directed chord γ(s) → γ(t): x = γ(s) and
/// v = the unit chord direction. Because F depends on x only through the
/// angular momenta, evaluating at γ(t) instead gives the same value.
pub fn wire_chord_integral(
    curve: &dyn Curve,
    s: f64,
    t: f64,
    spec: &IntegralSpec,
) -> Result<f64, IntegralError> {
    let p = curve.eval(s);
    let q = curve.eval(t);
    let d = q.sub(&p);
    let v = d.normalized().map_err(|_| IntegralError::DegenerateChord { s, t })?;
    spec.eval(&p, &v)
}

// ─────────────────────────── orbit audits ───────────────────────────

/// Drift statistics of one integral over one orbit.
///
/// `drift_series[k]` is F(impact k) − F₀ evaluated on the outgoing state of
/// impact k; `max_abs_drift`/`max_rel_drift` are the exact maxima of that
/// series. The incoming/outgoing comparison at each impact and the check at
/// free-flight segment midpoints are reported separately as
/// `reflection_gap` and `midpoint_gap`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservationReport {
    pub integral: String,
    pub f0: f64,
    pub max_abs_drift: f64,
    pub max_rel_drift: f64,
    pub reflection_gap: f64,
    pub midpoint_gap: f64,
    pub n_impacts: usize,
    pub drift_series: Vec<f64>,
}

/// Maximum that ignores nothing: NaN poisons the result, which is the
/// honest outcome for a NaN integrand.
fn max_keep_nan(acc: f64, x: f64) -> f64 {
    if x > acc || x.is_nan() {
        x
    } else {
        acc
    }
}

fn fold_max(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, max_keep_nan)
}

/// Audits an orbit against a list of integrals. The initial sample fixes
/// F₀; every impact contributes its outgoing value to the drift series and
/// its incoming/outgoing difference to the reflection gap; every free-flight
/// segment contributes its midpoint value to the midpoint gap.
pub fn audit_orbit(
    orbit: &Orbit,
    specs: &[IntegralSpec],
) -> Result<Vec<ConservationReport>, IntegralError> {
    specs
        .iter()
        .map(|spec| {
            let f0 = spec.eval(&orbit.initial.point, &orbit.initial.dir)?;
            let mut drift_series = Vec::with_capacity(orbit.bounces.len());
            let mut reflection_gap = 0.0_f64;
            let mut midpoint_gap = 0.0_f64;
            let mut prev_point = &orbit.initial.point;
            for bounce in &orbit.bounces {
                let f_out = spec.eval(&bounce.point, &bounce.v_out)?;
                let f_in = spec.eval(&bounce.point, &bounce.v_in)?;
                drift_series.push(f_out - f0);
                reflection_gap = max_keep_nan(reflection_gap, (f_in - f_out).abs());
                let mid = prev_point.add(&bounce.point).scale(0.5);
                let f_mid = spec.eval(&mid, &bounce.v_in)?;
                midpoint_gap = max_keep_nan(midpoint_gap, (f_mid - f0).abs());
                prev_point = &bounce.point;
            }
            let max_abs_drift = fold_max(drift_series.iter().map(|d| d.abs()));
            let max_rel_drift = max_abs_drift / f0.abs().max(DRIFT_REL_FLOOR);
            Ok(ConservationReport {
                integral: spec.id(),
                f0,
                max_abs_drift,
                max_rel_drift,
                reflection_gap,
                midpoint_gap,
                n_impacts: orbit.bounces.len(),
                drift_series,
            })
        })
        .collect()
}

/// Drift statistics of a bare value series (first entry fixes F₀), as used
/// when re-auditing a trajectory read back from disk.
pub fn drift_stats(series: &[f64]) -> Option<(f64, f64, f64)> {
    let (&f0, rest) = series.split_first()?;
    let max_abs = fold_max(rest.iter().map(|f| (f - f0).abs()));
    Some((f0, max_abs, max_abs / f0.abs().max(DRIFT_REL_FLOOR)))
}

// ─────────────────── multiplier identities on surfaces ───────────────────

/// Multipliers (h₁, h₂) expressing the axial integral through tangential
/// data on a surface of revolution: αM₃ + βv₃ = h₁S₁ + h₂S₂.
///
/// With r = (r¹, r², r³)(u₁, u₂),
/// h₁ = α(r¹ r¹_{u₂} + r² r²_{u₂}) / (r¹_{u₂} r²_{u₁} − r¹_{u₁} r²_{u₂}),
/// h₂ = α(r¹ r¹_{u₁} + r² r²_{u₁}) / (r¹_{u₁} r²_{u₂} − r¹_{u₂} r²_{u₁}).
/// On a graph chart r = (u₁, u₂, ·) these reduce to h₁ = −αu₂, h₂ = αu₁.
pub fn axial_multipliers(
    alpha: f64,
    patch: &dyn SurfacePatch,
    u1: f64,
    u2: f64,
) -> Result<(f64, f64), IntegralError> {
    let r = patch.eval(u1, u2);
    let (ru1, ru2) = patch.partials(u1, u2);
    let det = ru1[0] * ru2[1] - ru2[0] * ru1[1];
    if det.abs() <= MULTIPLIER_TOL {
        return Err(IntegralError::DegenerateChart { u1, u2, det });
    }
    let h1 = alpha * (r[0] * ru2[0] + r[1] * ru2[1]) / (-det);
    let h2 = alpha * (r[0] * ru1[0] + r[1] * ru1[1]) / det;
    Ok((h1, h2))
}

/// Pointwise defect of the axial identity αM₃ + βv₃ − (h₁S₁ + h₂S₂) at a
/// surface point. Vanishes when the surface's twist matches (α, β).
pub fn axial_identity_residual(
    alpha: f64,
    beta: f64,
    patch: &dyn SurfacePatch,
    u1: f64,
    u2: f64,
    v: &VecN,
) -> Result<f64, IntegralError> {
    let x = patch.eval(u1, u2);
    let f = IntegralSpec::AxialDeg1 { alpha, beta }.eval(&x, v)?;
    let (h1, h2) = axial_multipliers(alpha, patch, u1, u2)?;
    let tang = surface_tangential(patch, u1, u2, v);
    Ok(f - (h1 * tang.s1 + h2 * tang.s2))
}

/// Multipliers (h₁₁, h) expressing the degree-2 axial integral through
/// tangential data on z = f(u₁² + u₂²): for unit velocities,
/// F₂ = h₁₁ (S₁² + S₂²) + h with h₁₁ = (b − 2af)/(4f′) and
/// h = at − 4h₁₁ t f′². Arguments are t = u₁² + u₂², f = f(t), fp = f′(t).
pub fn deg2_multipliers(
    a: f64,
    b: f64,
    t: f64,
    f: f64,
    fp: f64,
) -> Result<(f64, f64), IntegralError> {
    if fp.abs() <= MULTIPLIER_TOL {
        return Err(IntegralError::DegenerateMultiplier { what: "profile slope f'", value: fp });
    }
    let h11 = (b - 2.0 * a * f) / (4.0 * fp);
    let h = a * t - 4.0 * h11 * t * fp * fp;
    Ok((h11, h))
}

/// Pointwise defect of the degree-2 identity
/// F₂ − (h₁₁(S₁² + S₂²) + h) at the surface point (u₁, u₂, f) with
/// t = u₁² + u₂². The velocity is normalized internally (the identity is
/// stated for unit speed). Vanishes when (a, b, c, f) satisfy the closure
/// equation h₁₁(1 − 4tf′²) = af² − bf + c − at.
#[allow(clippy::too_many_arguments)]
pub fn deg2_identity_residual(
    a: f64,
    b: f64,
    c: f64,
    u1: f64,
    u2: f64,
    f: f64,
    fp: f64,
    v: &VecN,
) -> Result<f64, IntegralError> {
    let v = v.normalized().map_err(|_| IntegralError::ZeroVelocity)?;
    let t = u1 * u1 + u2 * u2;
    let x = crate::geom::vec3(u1, u2, f);
    let f2 = IntegralSpec::Degree2Axial { a, b, c }.eval(&x, &v)?;
    let (h11, h) = deg2_multipliers(a, b, t, f, fp)?;
    let s1 = v[0] + 2.0 * u1 * fp * v[2];
    let s2 = v[1] + 2.0 * u2 * fp * v[2];
    Ok(f2 - (h11 * (s1 * s1 + s2 * s2) + h))
}

/// Closure residual h₁₁(1 − 4tf′²) − (af² − bf + c − at). Zero exactly on
/// both closed-form profile families; the degree-2 identity holds wherever
/// this vanishes.
pub fn deg2_constraint(a: f64, b: f64, c: f64, t: f64, f: f64, fp: f64) -> Result<f64, IntegralError> {
    let (h11, _) = deg2_multipliers(a, b, t, f, fp)?;
    Ok(h11 * (1.0 - 4.0 * t * fp * fp) - (a * f * f - b * f + c - a * t))
}

/// Reduced closure residual h₁₁(1 − 4tf′²) − ((a − b)f + (c − at)): an
/// alternative linearized form that agrees with [`deg2_constraint`] only
/// when a = 0. Kept as a consistency diagnostic; a nonzero value on a
/// profile with a ≠ 0 is expected and reported as a warning, never a
/// failure.
pub fn deg2_constraint_reduced(
    a: f64,
    b: f64,
    c: f64,
    t: f64,
    f: f64,
    fp: f64,
) -> Result<f64, IntegralError> {
    let (h11, _) = deg2_multipliers(a, b, t, f, fp)?;
    Ok(h11 * (1.0 - 4.0 * t * fp * fp) - ((a - b) * f + (c - a * t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{propagate, BranchPolicy, InitialCondition};
    use crate::geom::{vec2, vec3};
    use crate::tables::{
        ArctanSurface, ExpWire, LinearProfile, PlanarTable, ProfileFamily, SpiralWire, Table,
        WireTable,
    };
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};
    use std::sync::Arc;

    #[test]
    fn conic_integral_example_value() {
        let spec = IntegralSpec::ConicIntegral { lambda: 1.0 };
        let f = spec.eval(&vec2(0.0, 1.0), &vec2(1.0, 0.0)).unwrap();
        assert_eq!(f, 2.0, "M = -1 so F = 1 + 1");
    }

    #[test]
    fn spiral_momentum_matches_direct_formula() {
        let spiral = SpiralWire::new(1.5, 0.7).unwrap();
        let (a_c, b_c) = WireTable::Spiral(spiral).defining_system();
        let spec = wire_integral(&a_c, &b_c);
        // F = y v₁ − x v₂ + a v₃ with a = 0.7.
        let f = spec.eval(&vec3(0.0, 1.5, 0.0), &vec3(1.0, 0.0, 0.0)).unwrap();
        assert!((f - 1.5).abs() < 1e-15, "F = {f}");
        let x = vec3(0.3, -1.1, 2.5);
        let v = vec3(0.6, 0.64, 0.48);
        let direct = x[1] * v[0] - x[0] * v[1] + 0.7 * v[2];
        let f = spec.eval(&x, &v).unwrap();
        assert!((f - direct).abs() < 1e-15, "F = {f}, direct = {direct}");
    }

    #[test]
    fn degree2_on_axis_reduces_to_height_times_speed() {
        let spec = IntegralSpec::Degree2Axial { a: 0.0, b: 1.0, c: 0.0 };
        for (x3, v) in [(2.0, vec3(0.6, 0.8, 0.0)), (-1.3, vec3(0.0, 0.28, 0.96))] {
            let f = spec.eval(&vec3(0.0, 0.0, x3), &v).unwrap();
            let expect = -x3 * (v[0] * v[0] + v[1] * v[1]);
            assert!((f - expect).abs() < 1e-15, "axis value {f} vs {expect}");
        }
    }

    #[test]
    fn integral_ids_round_trip_format() {
        assert_eq!(IntegralSpec::PlanarDeg1 { a: 0.0, b: 0.0 }.id(), "M");
        assert_eq!(IntegralSpec::PlanarDeg1 { a: 0.5, b: -2.0 }.id(), "planar_deg1(0.5,-2)");
        assert_eq!(IntegralSpec::AxialDeg1 { alpha: 1.0, beta: 0.0 }.id(), "M3");
        assert_eq!(IntegralSpec::AxialDeg1 { alpha: 1.0, beta: 1.0 }.id(), "axial(1,1)");
        assert_eq!(IntegralSpec::Degree2Axial { a: 0.0, b: 2.0, c: 1.0 }.id(), "deg2(0,2,1)");
        assert_eq!(IntegralSpec::ConicIntegral { lambda: 1.0 }.id(), "conic(1)");
        assert_eq!(IntegralSpec::ParabolaIntegral { lambda: 0.0 }.id(), "parabola(0)");
    }

    #[test]
    fn eval_rejects_dimension_mismatch() {
        let spec = IntegralSpec::AxialDeg1 { alpha: 1.0, beta: 0.0 };
        let err = spec.eval(&vec2(1.0, 0.0), &vec2(0.0, 1.0)).unwrap_err();
        assert!(matches!(err, IntegralError::DimensionMismatch { expected: 3, got: 2 }));
    }

    #[test]
    fn angular_momenta_axial_components() {
        let x = vec3(1.0, 2.0, 3.0);
        let v = vec3(-0.5, 0.25, 1.0);
        let m = AngularMomenta::new(&x, &v).unwrap();
        let (m1, m2, m3) = m.axial().unwrap();
        let cross = x.cross(&v);
        assert_eq!((m1, m2, m3), (cross[0], cross[1], cross[2]));
        assert_eq!(m.entry(2, 1), -m.entry(1, 2), "antisymmetry");
    }

    #[test]
    fn wire_chord_value_matches_hand_computation() {
        // Spiral R = 1, a = 1, chord from t = 0 to t = π/2:
        // γ(0) = (0, 1, 0), γ(π/2) = (1, 0, π/2), so
        // F = y v₁ − x v₂ + v₃ = (1 + π/2)/√(2 + π²/4).
        let spiral = SpiralWire::new(1.0, 1.0).unwrap();
        let (a_c, b_c) = WireTable::Spiral(spiral.clone()).defining_system();
        let spec = wire_integral(&a_c, &b_c);
        let f = wire_chord_integral(&spiral, 0.0, FRAC_PI_2, &spec).unwrap();
        let expect = (1.0 + FRAC_PI_2) / (2.0 + FRAC_PI_2 * FRAC_PI_2).sqrt();
        assert!((f - expect).abs() < 1e-15, "F = {f}, expected {expect}");
    }

    #[test]
    fn chord_value_is_endpoint_independent() {
        let wire = ExpWire::new(
            SkewMatrix::block_rotations(&[2.0, 3.0]),
            VecN::new(vec![1.0, 0.0, 1.0, 0.0]),
        )
        .unwrap();
        let (a_c, b_c) = WireTable::Exp(wire.clone()).defining_system();
        let spec = wire_integral(&a_c, &b_c);
        for (s, t) in [(0.0, 0.9), (0.3, 2.1), (-1.0, 0.4), (2.0, 5.5)] {
            let p = wire.eval(s);
            let q = wire.eval(t);
            let v = q.sub(&p).normalized().unwrap();
            let at_s = spec.eval(&p, &v).unwrap();
            let at_t = spec.eval(&q, &v).unwrap();
            assert!(
                (at_s - at_t).abs() < 1e-13,
                "chord ({s}, {t}): {at_s} vs {at_t}"
            );
        }
    }

    #[test]
    fn zero_length_chord_is_rejected() {
        let spiral = SpiralWire::new(1.0, 0.0).unwrap();
        let spec = IntegralSpec::PlanarDeg1 { a: 0.0, b: 0.0 };
        let err = wire_chord_integral(&spiral, 1.0, 1.0 + 2.0 * PI, &spec).unwrap_err();
        assert!(matches!(err, IntegralError::DegenerateChord { .. }));
    }

    #[test]
    fn audit_single_bounce_circle_orbit() {
        let table = Table::Planar(PlanarTable::circle((0.0, 0.0), 1.0).unwrap());
        let init = InitialCondition::Phase {
            x: vec2(1.0, 0.0),
            v: vec2(-std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2),
        };
        let orbit = propagate(&table, &init, 1, BranchPolicy::Forward);
        let specs = [IntegralSpec::PlanarDeg1 { a: 0.0, b: 0.0 }];
        let reports = audit_orbit(&orbit, &specs).unwrap();
        let r = &reports[0];
        assert_eq!(r.n_impacts, 1);
        assert_eq!(r.integral, "M");
        assert!((r.f0 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(r.max_abs_drift <= 1e-15, "drift {:.3e}", r.max_abs_drift);
        assert!(r.midpoint_gap <= 1e-15, "along-segment gap {:.3e}", r.midpoint_gap);
        assert!(r.reflection_gap <= 1e-15, "reflection gap {:.3e}", r.reflection_gap);
    }

    #[test]
    fn audit_of_terminated_at_start_orbit_is_empty() {
        let table = Table::Planar(PlanarTable::circle((0.0, 0.0), 1.0).unwrap());
        // Starting outside the table terminates immediately with no impacts.
        let init = InitialCondition::Phase { x: vec2(2.0, 0.0), v: vec2(-1.0, 0.0) };
        let orbit = propagate(&table, &init, 5, BranchPolicy::Forward);
        let reports =
            audit_orbit(&orbit, &[IntegralSpec::PlanarDeg1 { a: 0.0, b: 0.0 }]).unwrap();
        assert_eq!(reports[0].n_impacts, 0);
        assert_eq!(reports[0].max_abs_drift, 0.0);
        assert!(reports[0].drift_series.is_empty());
    }

    #[test]
    fn drift_stats_match_audit_convention() {
        let series = [2.0, 2.0 + 3e-9, 2.0 - 1e-9];
        let (f0, max_abs, max_rel) = drift_stats(&series).unwrap();
        assert_eq!(f0, 2.0);
        assert!((max_abs - 3e-9).abs() < 1e-15);
        assert!((max_rel - 1.5e-9).abs() < 1e-15);
        assert!(drift_stats(&[]).is_none());
    }

    #[test]
    fn axial_multipliers_on_graph_chart() {
        let surf = ArctanSurface::new(
            1.3,
            0.6,
            Arc::new(LinearProfile { slope: 0.8, offset: 0.2 }),
        )
        .unwrap();
        for (u1, u2) in [(0.4, 1.1), (-0.7, 2.0), (1.9, 0.3)] {
            let (h1, h2) = axial_multipliers(1.3, &surf, u1, u2).unwrap();
            assert!((h1 - (-1.3 * u2)).abs() < 1e-12, "h1 = {h1} at ({u1}, {u2})");
            assert!((h2 - 1.3 * u1).abs() < 1e-12, "h2 = {h2} at ({u1}, {u2})");
        }
    }

    #[test]
    fn axial_identity_holds_on_matching_surface() {
        let (alpha, beta) = (1.3, 0.6);
        let surf = ArctanSurface::new(
            alpha,
            beta,
            Arc::new(LinearProfile { slope: 0.8, offset: 0.2 }),
        )
        .unwrap();
        // Fixed sample grid over chart points and directions.
        for k in 0..40 {
            let u1 = -1.5 + 0.077 * k as f64;
            let u2 = 0.4 + 0.061 * k as f64;
            let ang = 0.37 * k as f64;
            let v = vec3(ang.cos() * 0.8, ang.sin() * 0.8, 0.6);
            let res = axial_identity_residual(alpha, beta, &surf, u1, u2, &v).unwrap();
            assert!(res.abs() < 1e-10, "residual {res:.3e} at sample {k}");
        }
    }

    #[test]
    fn deg2_multipliers_frozen_values() {
        // Profile z = -t/2 + 1 (slope -1/2) with (a, b) = (0, 2):
        // h₁₁ = 2/(4·(−1/2)) = −1 and h = −4·(−1)·t·(1/4) = t.
        let (h11, h) = deg2_multipliers(0.0, 2.0, 0.6, -0.3 + 1.0, -0.5).unwrap();
        assert!((h11 - (-1.0)).abs() < 1e-15);
        assert!((h - 0.6).abs() < 1e-15);
        // Flat profile degenerates.
        assert!(matches!(
            deg2_multipliers(0.0, 2.0, 0.6, 1.0, 0.0),
            Err(IntegralError::DegenerateMultiplier { .. })
        ));
    }

    #[test]
    fn deg2_identity_holds_on_both_profile_families() {
        let cases = [
            (0.0, 2.0, 1.0, ProfileFamily::linear(2.0, 1.0, 1.0).unwrap(), 1.8),
            (0.0, 2.0, 1.0, ProfileFamily::linear(2.0, 1.0, -0.5).unwrap(), 1.8),
            (1.0, 0.0, 1.0, ProfileFamily::conic(1.0, 0.0, 1.0, 1.0, 1).unwrap(), 1.8),
            (1.0, 0.0, 1.0, ProfileFamily::conic(1.0, 0.0, 1.0, 1.0, -1).unwrap(), 1.8),
            (1.0, 0.0, 1.0, ProfileFamily::conic(1.0, 0.0, 1.0, -0.5, 1).unwrap(), 2.0),
        ];
        for (idx, (a, b, c, family, t_max)) in cases.iter().enumerate() {
            for k in 1..25 {
                let t = t_max * k as f64 / 25.0;
                let (f, fp) = match family.eval(t) {
                    Ok(pair) => pair,
                    Err(_) => continue,
                };
                let phi = 0.7 * k as f64;
                let (u1, u2) = (t.sqrt() * phi.cos(), t.sqrt() * phi.sin());
                let v = vec3(
                    (1.3 * phi).sin() * 0.7,
                    (0.9 * phi).cos() * 0.7,
                    (0.5 + 0.4 * phi.sin()).max(0.1),
                );
                let res = deg2_identity_residual(*a, *b, *c, u1, u2, f, fp, &v).unwrap();
                assert!(
                    res.abs() < 1e-9,
                    "family {idx}: residual {res:.3e} at t = {t}"
                );
            }
        }
    }

    #[test]
    fn deg2_constraint_vanishes_and_reduced_form_deviates() {
        // Conic profile (a = 1): the full closure residual vanishes, the
        // reduced form does not.
        let family = ProfileFamily::conic(1.0, 0.0, 1.0, 1.0, 1).unwrap();
        let (f, fp) = family.eval(0.5).unwrap();
        let full = deg2_constraint(1.0, 0.0, 1.0, 0.5, f, fp).unwrap();
        assert!(full.abs() < 1e-12, "closure residual {full:.3e}");
        let reduced = deg2_constraint_reduced(1.0, 0.0, 1.0, 0.5, f, fp).unwrap();
        assert!(
            (reduced - (f * f - f)).abs() < 1e-12 && reduced.abs() > 1e-3,
            "reduced residual should equal a·f(f−1) = {:.6}, got {reduced:.6}",
            f * f - f
        );
        // Linear profile (a = 0): both forms agree and vanish.
        let family = ProfileFamily::linear(2.0, 1.0, -0.5).unwrap();
        let (f, fp) = family.eval(0.7).unwrap();
        let full = deg2_constraint(0.0, 2.0, 1.0, 0.7, f, fp).unwrap();
        let reduced = deg2_constraint_reduced(0.0, 2.0, 1.0, 0.7, f, fp).unwrap();
        assert!(full.abs() < 1e-12 && reduced.abs() < 1e-12);
        assert_eq!(full, reduced, "forms coincide when a = 0");
    }

    proptest! {
        #[test]
        fn linear_momentum_matches_double_sum(
            entries in proptest::collection::vec(-2.0_f64..2.0, 6),
            xs in proptest::collection::vec(-2.0_f64..2.0, 4),
            vs in proptest::collection::vec(-2.0_f64..2.0, 4),
        ) {
            let a = SkewMatrix::from_upper(4, entries.clone());
            let x = VecN::new(xs);
            let v = VecN::new(vs);
            let spec = IntegralSpec::LinearMomentum { a: a.clone(), b: VecN::zeros(4) };
            let f = spec.eval(&x, &v).unwrap();
            let mut sum = 0.0;
            for i in 0..4 {
                for j in (i + 1)..4 {
                    sum += a.entry(i, j) * (v[j] * x[i] - v[i] * x[j]);
                }
            }
            prop_assert!((f - sum).abs() < 1e-13, "⟨x, Av⟩ = {f} vs double sum {sum}");
        }

        #[test]
        fn transposing_the_matrix_negates_the_integral(
            entries in proptest::collection::vec(-2.0_f64..2.0, 3),
            xs in proptest::collection::vec(-2.0_f64..2.0, 3),
            vs in proptest::collection::vec(-2.0_f64..2.0, 3),
        ) {
            let a = SkewMatrix::from_upper(3, entries);
            let x = VecN::new(xs);
            let v = VecN::new(vs);
            let f = IntegralSpec::LinearMomentum { a: a.clone(), b: VecN::zeros(3) }
                .eval(&x, &v).unwrap();
            let f_t = IntegralSpec::LinearMomentum { a: a.negated(), b: VecN::zeros(3) }
                .eval(&x, &v).unwrap();
            prop_assert!((f + f_t).abs() < 1e-14);
        }

        #[test]
        fn integrals_are_invariant_along_lines(
            px in -2.0_f64..2.0, py in -2.0_f64..2.0, pz in -2.0_f64..2.0,
            wx in -1.0_f64..1.0, wy in -1.0_f64..1.0, wz in -1.0_f64..1.0,
            lambda in -10.0_f64..10.0,
            a in -1.5_f64..1.5, b in -1.5_f64..1.5, c in -1.5_f64..1.5,
        ) {
            prop_assume!((wx * wx + wy * wy + wz * wz).sqrt() > 1e-3);
            let v3 = vec3(wx, wy, wz).normalized().unwrap();
            let v2 = vec2(wx, wy).normalized();
            let x3 = vec3(px, py, pz);
            let x2 = vec2(px, py);
            let mut skew = SkewMatrix::zeros(3);
            skew.set(0, 1, a);
            skew.set(0, 2, b);
            skew.set(1, 2, c);
            let specs3 = [
                IntegralSpec::AxialDeg1 { alpha: a, beta: b },
                IntegralSpec::Degree2Axial { a, b, c },
                IntegralSpec::LinearMomentum { a: skew, b: vec3(c, a, b) },
            ];
            for spec in &specs3 {
                let f = spec.eval(&x3, &v3).unwrap();
                let shifted = spec.eval(&x3.add_scaled(lambda, &v3), &v3).unwrap();
                prop_assert!(
                    (f - shifted).abs() < 1e-12 * (1.0 + f.abs()),
                    "{}: {f} vs {shifted}", spec.id()
                );
            }
            if let Ok(v2) = v2 {
                let specs2 = [
                    IntegralSpec::PlanarDeg1 { a, b },
                    IntegralSpec::ParabolaIntegral { lambda: c },
                    IntegralSpec::ConicIntegral { lambda: c },
                ];
                for spec in &specs2 {
                    let f = spec.eval(&x2, &v2).unwrap();
                    let shifted = spec.eval(&x2.add_scaled(lambda, &v2), &v2).unwrap();
                    prop_assert!(
                        (f - shifted).abs() < 1e-12 * (1.0 + f.abs()),
                        "{}: {f} vs {shifted}", spec.id()
                    );
                }
            }
        }

        #[test]
        fn angular_momenta_orthogonal_to_velocity(
            px in -3.0_f64..3.0, py in -3.0_f64..3.0, pz in -3.0_f64..3.0,
            wx in -1.0_f64..1.0, wy in -1.0_f64..1.0, wz in -1.0_f64..1.0,
        ) {
            let x = vec3(px, py, pz);
            let v = vec3(wx, wy, wz);
            let m = AngularMomenta::new(&x, &v).unwrap();
            let (m1, m2, m3) = m.axial().unwrap();
            let dot = m1 * wx + m2 * wy + m3 * wz;
            prop_assert!(dot.abs() < 1e-13, "M·v = {dot}");
        }
    }
}
