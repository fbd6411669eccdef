//! The table catalog: planar conic boundaries, wire curves in ℝⁿ, the
//! arctan-graph surface, and piecewise quadric-of-revolution solids (the
//! parabolic lens and the confocal tetragon torus).
//!
//! Construction validates parameters up front and returns [`TableError`];
//! after that, tables are immutable and freely shareable.

use crate::geom::{matrix_exp, matrix_exp_action};
use crate::geom::{vec2, vec3, Curve, SkewMatrix, SurfacePatch, VecN};
use std::sync::Arc;
use thiserror::Error;

/// Errors raised by table constructors and profile evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TableError {
    /// A parameter violated the constructor's precondition.
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    /// The requested region has no interior.
    #[error("table region is empty: {reason}")]
    EmptyRegion { reason: &'static str },
    /// A solid of revolution reaches the rotation axis R = 0.
    #[error("table touches the rotation axis (min radius^2 = {r2_min:.3e})")]
    AxisTouching { r2_min: f64 },
    /// A profile was evaluated outside the branch domain.
    #[error("profile undefined at t = {t}: radicand {radicand:.3e} < 0")]
    OutOfDomain { t: f64, radicand: f64 },
}

fn require(ok: bool, name: &'static str, value: f64, reason: &'static str) -> Result<(), TableError> {
    if ok {
        Ok(())
    } else {
        Err(TableError::InvalidParameter { name, value, reason })
    }
}

// ─────────────────────────── planar tables ───────────────────────────

/// Which conic bounds a planar table.
#[derive(Debug, Clone, PartialEq)]
pub enum PlanarKind {
    /// Circle of radius `r` centered at `center`.
    Circle { center: (f64, f64), r: f64 },
    /// x²/a² + y²/(a² − λ) = 1 with a² > λ (ellipse; circle when λ = 0).
    Ellipse { a2: f64, lambda: f64 },
    /// Same equation with a² − λ < 0: the two-branch hyperbola.
    Hyperbola { a2: f64, lambda: f64 },
    /// p² − 2pλ + 2px = y², opening toward +x.
    Parabola { p: f64, lambda: f64 },
}

/// A billiard table bounded by a single conic.
///
/// Both representations are kept: the implicit quadratic (used by the ray
/// stepper and the interior test, with interior Φ < 0) and a parametrization
/// (used by residual sweeps and boundary-parameter reporting).
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarTable {
    kind: PlanarKind,
    /// Implicit conic coefficients (qxx, qyy, qx, qy, q0):
    /// Φ(x, y) = qxx·x² + qyy·y² + qx·x + qy·y + q0.
    conic: [f64; 5],
}

impl PlanarTable {
    pub fn circle(center: (f64, f64), r: f64) -> Result<Self, TableError> {
        require(r > 0.0, "r", r, "circle radius must be positive")?;
        let (cx, cy) = center;
        Ok(PlanarTable {
            kind: PlanarKind::Circle { center, r },
            conic: [1.0, 1.0, -2.0 * cx, -2.0 * cy, cx * cx + cy * cy - r * r],
        })
    }

    pub fn ellipse(a2: f64, lambda: f64) -> Result<Self, TableError> {
        require(a2 > 0.0, "a2", a2, "semi-axis^2 must be positive")?;
        require(a2 - lambda > 0.0, "lambda", lambda, "need a2 - lambda > 0 for an ellipse")?;
        Ok(PlanarTable {
            kind: PlanarKind::Ellipse { a2, lambda },
            conic: [1.0 / a2, 1.0 / (a2 - lambda), 0.0, 0.0, -1.0],
        })
    }

    pub fn hyperbola(a2: f64, lambda: f64) -> Result<Self, TableError> {
        require(a2 > 0.0, "a2", a2, "semi-axis^2 must be positive")?;
        require(a2 - lambda < 0.0, "lambda", lambda, "need a2 - lambda < 0 for a hyperbola")?;
        Ok(PlanarTable {
            kind: PlanarKind::Hyperbola { a2, lambda },
            conic: [1.0 / a2, 1.0 / (a2 - lambda), 0.0, 0.0, -1.0],
        })
    }

    pub fn parabola(p: f64, lambda: f64) -> Result<Self, TableError> {
        require(p > 0.0, "p", p, "focal parameter must be positive")?;
        Ok(PlanarTable {
            kind: PlanarKind::Parabola { p, lambda },
            conic: [0.0, 1.0, -2.0 * p, 0.0, 2.0 * p * lambda - p * p],
        })
    }

    pub fn kind(&self) -> &PlanarKind {
        &self.kind
    }

    /// Implicit value Φ(p); the interior of the table is Φ < 0.
    pub fn implicit(&self, p: &VecN) -> f64 {
        let [qxx, qyy, qx, qy, q0] = self.conic;
        let (x, y) = (p[0], p[1]);
        qxx * x * x + qyy * y * y + qx * x + qy * y + q0
    }

    /// Gradient ∇Φ(p).
    pub fn gradient(&self, p: &VecN) -> VecN {
        let [qxx, qyy, qx, qy, _] = self.conic;
        vec2(2.0 * qxx * p[0] + qx, 2.0 * qyy * p[1] + qy)
    }

    /// Quadratic coefficients (A, B, C) of Φ(x + λv) in λ.
    pub fn ray_coefficients(&self, x: &VecN, v: &VecN) -> (f64, f64, f64) {
        let [qxx, qyy, qx, qy, _] = self.conic;
        let a = qxx * v[0] * v[0] + qyy * v[1] * v[1];
        let b = 2.0 * (qxx * x[0] * v[0] + qyy * x[1] * v[1]) + qx * v[0] + qy * v[1];
        let c = self.implicit(x);
        (a, b, c)
    }

    /// Interior membership with a small boundary tolerance.
    pub fn contains(&self, p: &VecN, tol: f64) -> bool {
        self.implicit(p) <= tol
    }

    /// Boundary parameter of a point assumed to lie on the conic: the angle
    /// for circle/ellipse, y for the parabola, asinh(y/B) for the hyperbola
    /// (branch not encoded; positions disambiguate).
    pub fn param_at(&self, p: &VecN) -> f64 {
        match self.kind {
            PlanarKind::Circle { center, .. } => (p[1] - center.1).atan2(p[0] - center.0),
            PlanarKind::Ellipse { a2, lambda } => {
                (p[1] / (a2 - lambda).sqrt()).atan2(p[0] / a2.sqrt())
            }
            PlanarKind::Hyperbola { a2, lambda } => (p[1] / (lambda - a2).sqrt()).asinh(),
            PlanarKind::Parabola { .. } => p[1],
        }
    }
}

impl Curve for PlanarTable {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, t: f64) -> VecN {
        match self.kind {
            PlanarKind::Circle { center, r } => {
                vec2(center.0 + r * t.cos(), center.1 + r * t.sin())
            }
            PlanarKind::Ellipse { a2, lambda } => {
                vec2(a2.sqrt() * t.cos(), (a2 - lambda).sqrt() * t.sin())
            }
            // Right branch; the left branch is its mirror image.
            PlanarKind::Hyperbola { a2, lambda } => {
                vec2(a2.sqrt() * t.cosh(), (lambda - a2).sqrt() * t.sinh())
            }
            PlanarKind::Parabola { p, lambda } => {
                vec2((t * t - p * p + 2.0 * p * lambda) / (2.0 * p), t)
            }
        }
    }

    fn deriv(&self, t: f64) -> VecN {
        match self.kind {
            PlanarKind::Circle { r, .. } => vec2(-r * t.sin(), r * t.cos()),
            PlanarKind::Ellipse { a2, lambda } => {
                vec2(-a2.sqrt() * t.sin(), (a2 - lambda).sqrt() * t.cos())
            }
            PlanarKind::Hyperbola { a2, lambda } => {
                vec2(a2.sqrt() * t.sinh(), (lambda - a2).sqrt() * t.cosh())
            }
            PlanarKind::Parabola { p, .. } => vec2(t / p, 1.0),
        }
    }

    fn period(&self) -> Option<f64> {
        match self.kind {
            PlanarKind::Circle { .. } | PlanarKind::Ellipse { .. } => {
                Some(std::f64::consts::TAU)
            }
            _ => None,
        }
    }
}

// ─────────────────────────── wire tables ───────────────────────────

/// Wire defined by the flow γ(t) = e^{At} γ₀ of a skew matrix.
#[derive(Debug, Clone)]
pub struct ExpWire {
    a: SkewMatrix,
    gamma0: VecN,
}

impl ExpWire {
    pub fn new(a: SkewMatrix, gamma0: VecN) -> Result<Self, TableError> {
        if gamma0.dim() != a.dim() {
            return Err(TableError::InvalidParameter {
                name: "gamma0",
                value: gamma0.dim() as f64,
                reason: "dimension must match the generator matrix",
            });
        }
        require(
            gamma0.norm() > 0.0,
            "gamma0",
            0.0,
            "base point must be nonzero (the flow of 0 is a point)",
        )?;
        require(
            a.norm() > 0.0,
            "a",
            0.0,
            "generator must be nonzero (the flow of a zero matrix is a point)",
        )?;
        Ok(ExpWire { a, gamma0 })
    }

    pub fn generator(&self) -> &SkewMatrix {
        &self.a
    }

    pub fn base_point(&self) -> &VecN {
        &self.gamma0
    }
}

impl Curve for ExpWire {
    fn dim(&self) -> usize {
        self.gamma0.dim()
    }

    fn eval(&self, t: f64) -> VecN {
        matrix_exp_action(&self.a, t, &self.gamma0).expect("dimensions checked at construction")
    }

    fn deriv(&self, t: f64) -> VecN {
        // γ̇ = A e^{At} γ0
        self.a.apply(&self.eval(t)).expect("dimensions checked at construction")
    }

    /// Grid evaluation by repeated application of the fixed step matrix
    /// e^{A·step}, re-anchored with a full exponential every 256 points to
    /// keep accumulated roundoff far below bracketing resolution.
    fn eval_grid(&self, start: f64, step: f64, count: usize) -> Vec<VecN> {
        let mut r = self.a.to_dense();
        r.scale_in_place(step);
        let r = matrix_exp(&r);
        let mut out = Vec::with_capacity(count);
        let mut current = VecN::zeros(self.dim());
        for k in 0..count {
            if k % 256 == 0 {
                current = self.eval(start + k as f64 * step);
            } else {
                current = r.mat_vec(&current);
            }
            out.push(current.clone());
        }
        out
    }
}

/// Helical wire (R sin t, R cos t, a t); a closed circle when a = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SpiralWire {
    pub r: f64,
    pub a: f64,
}

impl SpiralWire {
    pub fn new(r: f64, a: f64) -> Result<Self, TableError> {
        require(r > 0.0, "r", r, "spiral radius must be positive")?;
        Ok(SpiralWire { r, a })
    }
}

impl Curve for SpiralWire {
    fn dim(&self) -> usize {
        3
    }

    fn eval(&self, t: f64) -> VecN {
        vec3(self.r * t.sin(), self.r * t.cos(), self.a * t)
    }

    fn deriv(&self, t: f64) -> VecN {
        vec3(self.r * t.cos(), -self.r * t.sin(), self.a)
    }

    fn period(&self) -> Option<f64> {
        if self.a == 0.0 {
            Some(std::f64::consts::TAU)
        } else {
            None
        }
    }
}

/// Closed curve (a cos kt, a sin kt, b cos mt, b sin mt) on a torus in ℝ⁴.
#[derive(Debug, Clone, PartialEq)]
pub struct ToricKnotWire {
    pub a: f64,
    pub b: f64,
    pub k: i32,
    pub m: i32,
}

impl ToricKnotWire {
    pub fn new(a: f64, b: f64, k: i32, m: i32) -> Result<Self, TableError> {
        require(a > 0.0, "a", a, "first torus radius must be positive")?;
        require(b > 0.0, "b", b, "second torus radius must be positive")?;
        require(k != 0, "k", k as f64, "winding number must be nonzero")?;
        require(m != 0, "m", m as f64, "winding number must be nonzero")?;
        Ok(ToricKnotWire { a, b, k, m })
    }
}

impl Curve for ToricKnotWire {
    fn dim(&self) -> usize {
        4
    }

    fn eval(&self, t: f64) -> VecN {
        let (kt, mt) = (self.k as f64 * t, self.m as f64 * t);
        VecN::new(vec![
            self.a * kt.cos(),
            self.a * kt.sin(),
            self.b * mt.cos(),
            self.b * mt.sin(),
        ])
    }

    fn deriv(&self, t: f64) -> VecN {
        let (kf, mf) = (self.k as f64, self.m as f64);
        let (kt, mt) = (kf * t, mf * t);
        VecN::new(vec![
            -self.a * kf * kt.sin(),
            self.a * kf * kt.cos(),
            -self.b * mf * mt.sin(),
            self.b * mf * mt.cos(),
        ])
    }

    fn period(&self) -> Option<f64> {
        Some(std::f64::consts::TAU)
    }
}

/// A wire billiard table: a curve in ℝⁿ with its defining linear system.
#[derive(Debug, Clone)]
pub enum WireTable {
    Exp(ExpWire),
    Spiral(SpiralWire),
    ToricKnot(ToricKnotWire),
}

impl WireTable {
    pub fn curve(&self) -> &dyn Curve {
        match self {
            WireTable::Exp(w) => w,
            WireTable::Spiral(w) => w,
            WireTable::ToricKnot(w) => w,
        }
    }

    pub fn dim(&self) -> usize {
        self.curve().dim()
    }

    /// The linear system (A, b) with γ̇ = Aγ + b satisfied by the wire.
    pub fn defining_system(&self) -> (SkewMatrix, VecN) {
        match self {
            WireTable::Exp(w) => (w.generator().clone(), VecN::zeros(w.dim())),
            WireTable::Spiral(w) => {
                // (R sin, R cos, at)' = ((R cos), (-R sin), a): rotation block
                // with upper entry +1 plus a constant vertical drift.
                let mut a = SkewMatrix::zeros(3);
                a.set(0, 1, 1.0);
                (a, vec3(0.0, 0.0, w.a))
            }
            WireTable::ToricKnot(w) => (
                SkewMatrix::block_rotations(&[w.k as f64, w.m as f64]),
                VecN::zeros(4),
            ),
        }
    }
}

// ─────────────────────────── profiles ───────────────────────────

/// A meridian profile t ↦ f(t) (t = u₁² + u₂²) with its derivative.
pub trait Profile: Send + Sync {
    fn value(&self, t: f64) -> f64;
    fn deriv(&self, t: f64) -> f64;
}

/// f(t) = slope·t + offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearProfile {
    pub slope: f64,
    pub offset: f64,
}

impl Profile for LinearProfile {
    fn value(&self, t: f64) -> f64 {
        self.slope * t + self.offset
    }
    fn deriv(&self, _t: f64) -> f64 {
        self.slope
    }
}

/// The two closed-form solution families of the meridian-profile equation
/// with coefficients (a, b, c):
///
/// * a = 0: f(t) = s·t + (4sc − b)/(4sb), a paraboloid profile;
/// * a ≠ 0: (f − b/(2a))² + 𝒜·t − s = 0 with 𝒜 = 4a²s/(4a²s − b² + 4ac),
///   a conic-of-revolution profile; the branch sign σ selects the half.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileFamily {
    Linear { b: f64, c: f64, s: f64 },
    Conic { a: f64, b: f64, c: f64, s: f64, branch: i8 },
}

impl ProfileFamily {
    pub fn linear(b: f64, c: f64, s: f64) -> Result<Self, TableError> {
        require(b != 0.0, "b", b, "linear family needs b != 0")?;
        require(s != 0.0, "s", s, "family parameter s must be nonzero")?;
        Ok(ProfileFamily::Linear { b, c, s })
    }

    pub fn conic(a: f64, b: f64, c: f64, s: f64, branch: i8) -> Result<Self, TableError> {
        require(a != 0.0, "a", a, "conic family needs a != 0")?;
        require(s != 0.0, "s", s, "family parameter s must be nonzero")?;
        require(
            branch == 1 || branch == -1,
            "branch",
            branch as f64,
            "branch must be +1 or -1",
        )?;
        let denom = 4.0 * a * a * s - b * b + 4.0 * a * c;
        require(denom != 0.0, "s", s, "amplitude denominator 4a^2 s - b^2 + 4ac vanishes")?;
        Ok(ProfileFamily::Conic { a, b, c, s, branch })
    }

    /// The (a, b, c) coefficients of the underlying profile equation.
    pub fn coefficients(&self) -> (f64, f64, f64) {
        match *self {
            ProfileFamily::Linear { b, c, .. } => (0.0, b, c),
            ProfileFamily::Conic { a, b, c, .. } => (a, b, c),
        }
    }

    /// 𝒜 = 4a²s/(4a²s − b² + 4ac) for the conic family.
    pub fn amplitude(&self) -> Option<f64> {
        match *self {
            ProfileFamily::Linear { .. } => None,
            ProfileFamily::Conic { a, b, c, s, .. } => {
                Some(4.0 * a * a * s / (4.0 * a * a * s - b * b + 4.0 * a * c))
            }
        }
    }

    /// (f(t), f′(t)); for the conic family errors outside the branch domain
    /// s − 𝒜t > 0 (the derivative blows up at the turning radicand).
    pub fn eval(&self, t: f64) -> Result<(f64, f64), TableError> {
        match *self {
            ProfileFamily::Linear { b, c, s } => {
                Ok((s * t + (4.0 * s * c - b) / (4.0 * s * b), s))
            }
            ProfileFamily::Conic { a, b, s, branch, .. } => {
                let amp = self.amplitude().expect("conic family has an amplitude");
                let radicand = s - amp * t;
                if radicand <= 0.0 {
                    return Err(TableError::OutOfDomain { t, radicand });
                }
                let root = radicand.sqrt();
                let sigma = branch as f64;
                Ok((b / (2.0 * a) + sigma * root, -sigma * amp / (2.0 * root)))
            }
        }
    }
}

// ─────────────────────── arctan-graph surface ───────────────────────

/// The graph surface r(u) = (u₁, u₂, −(β/α)·atan2(u₁, u₂) + f(u₁² + u₂²)).
///
/// The default chart is the half-plane u₂ > 0, where atan2(u₁, u₂) agrees
/// with arctan(u₁/u₂); for β = 0 the angular term vanishes and the chart
/// extends to the punctured plane.
pub struct ArctanSurface {
    pub alpha: f64,
    pub beta: f64,
    profile: Arc<dyn Profile>,
}

impl Clone for ArctanSurface {
    fn clone(&self) -> Self {
        ArctanSurface {
            alpha: self.alpha,
            beta: self.beta,
            profile: Arc::clone(&self.profile),
        }
    }
}

impl std::fmt::Debug for ArctanSurface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ArctanSurface")
            .field("alpha", &self.alpha)
            .field("beta", &self.beta)
            .finish_non_exhaustive()
    }
}

impl ArctanSurface {
    pub fn new(alpha: f64, beta: f64, profile: Arc<dyn Profile>) -> Result<Self, TableError> {
        require(alpha != 0.0, "alpha", alpha, "the angular coefficient must be nonzero")?;
        Ok(ArctanSurface { alpha, beta, profile })
    }

    pub fn profile(&self) -> &dyn Profile {
        self.profile.as_ref()
    }

    /// Height of the graph over (u₁, u₂).
    pub fn height(&self, u1: f64, u2: f64) -> f64 {
        let t = u1 * u1 + u2 * u2;
        -(self.beta / self.alpha) * u1.atan2(u2) + self.profile.value(t)
    }

    /// Gradient of the height function.
    pub fn height_gradient(&self, u1: f64, u2: f64) -> (f64, f64) {
        let t = u1 * u1 + u2 * u2;
        let fp = self.profile.deriv(t);
        let q = self.beta / self.alpha;
        (-q * u2 / t + 2.0 * u1 * fp, q * u1 / t + 2.0 * u2 * fp)
    }
}

impl SurfacePatch for ArctanSurface {
    fn eval(&self, u1: f64, u2: f64) -> VecN {
        vec3(u1, u2, self.height(u1, u2))
    }

    fn partials(&self, u1: f64, u2: f64) -> (VecN, VecN) {
        let (g1, g2) = self.height_gradient(u1, u2);
        (vec3(1.0, 0.0, g1), vec3(0.0, 1.0, g2))
    }

    fn contains_param(&self, u1: f64, u2: f64) -> bool {
        if self.beta != 0.0 {
            u2 > 0.0
        } else {
            u1 * u1 + u2 * u2 > 0.0
        }
    }
}

// ──────────────────── piecewise quadric solids ────────────────────

/// Rotationally invariant quadric Q(x) = q_rr(x² + y²) + q_zz z² + q_z z + q0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadricOfRevolution {
    pub q_rr: f64,
    pub q_zz: f64,
    pub q_z: f64,
    pub q_0: f64,
}

impl QuadricOfRevolution {
    pub fn value(&self, p: &VecN) -> f64 {
        let r2 = p[0] * p[0] + p[1] * p[1];
        self.q_rr * r2 + self.q_zz * p[2] * p[2] + self.q_z * p[2] + self.q_0
    }

    pub fn gradient(&self, p: &VecN) -> VecN {
        vec3(
            2.0 * self.q_rr * p[0],
            2.0 * self.q_rr * p[1],
            2.0 * self.q_zz * p[2] + self.q_z,
        )
    }

    /// Quadratic coefficients (A, B, C) of Q(x + λv) in λ.
    pub fn ray_coefficients(&self, x: &VecN, v: &VecN) -> (f64, f64, f64) {
        let a = self.q_rr * (v[0] * v[0] + v[1] * v[1]) + self.q_zz * v[2] * v[2];
        let b = 2.0 * self.q_rr * (x[0] * v[0] + x[1] * v[1])
            + 2.0 * self.q_zz * x[2] * v[2]
            + self.q_z * v[2];
        (a, b, self.value(x))
    }
}

/// Validity region of a quadric patch, in cylindrical data (R² and z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PatchRegion {
    /// Graph-type patch: R² within bounds, optionally on one side of
    /// z = z_split (sign = ±1; 0 means both sides).
    RadiusRange {
        r2_min: Option<f64>,
        r2_max: Option<f64>,
        z_split: f64,
        z_sign: i8,
    },
    /// Side patch of revolution bounded by two heights.
    HeightRange { z_min: f64, z_max: f64 },
}

impl PatchRegion {
    /// Signed classification: distance to the nearest region edge in the
    /// natural coordinate (radius for radius ranges, height otherwise).
    /// Negative means outside the region.
    pub fn edge_distance(&self, p: &VecN) -> f64 {
        match *self {
            PatchRegion::RadiusRange { r2_min, r2_max, z_split, z_sign } => {
                let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
                let mut d = f64::INFINITY;
                if let Some(r2) = r2_min {
                    d = d.min(r - r2.sqrt());
                }
                if let Some(r2) = r2_max {
                    d = d.min(r2.sqrt() - r);
                }
                if z_sign != 0 {
                    let side = (p[2] - z_split) * z_sign as f64;
                    // The branch split is not a physical edge, only a chart
                    // guard; points on the wrong side are simply outside.
                    if side < 0.0 {
                        return -f64::INFINITY;
                    }
                }
                d
            }
            PatchRegion::HeightRange { z_min, z_max } => (p[2] - z_min).min(z_max - p[2]),
        }
    }
}

/// One face of a piecewise solid of revolution.
#[derive(Debug, Clone)]
pub struct QuadricPatch {
    pub label: &'static str,
    pub quadric: QuadricOfRevolution,
    /// Inward unit normal = `inward` · ∇Q/|∇Q|.
    pub inward: f64,
    pub region: PatchRegion,
    /// Meridian profile of this face and the (t = R²) range it occupies,
    /// used by residual sweeps. Side patches store their upper half.
    pub profile: ProfileFamily,
    pub t_range: (f64, f64),
}

/// Which solid a [`PiecewiseSurfaceTable`] describes.
#[derive(Debug, Clone, PartialEq)]
pub enum SolidKind {
    /// Region between two coaxial paraboloids z = s·R² + κ(s), s₁ > 0 > s₂.
    Lens {
        b: f64,
        c: f64,
        s1: f64,
        s2: f64,
        /// Shared edge circle: radius² and height.
        r2_edge: f64,
        z_edge: f64,
    },
    /// Solid torus bounded by arcs of two confocal ellipses (top and bottom,
    /// on opposite meridian branches) and two confocal hyperbolas (sides).
    Tetragon {
        a: f64,
        b: f64,
        c: f64,
        s_e1: f64,
        s_e2: f64,
        s_h_inner: f64,
        s_h_outer: f64,
        /// (4ac − b²)/(4a²), the confocal shift.
        d: f64,
        /// Meridian symmetry height b/(2a).
        z_center: f64,
        /// Corner circles (R, z): [upper-inner, upper-outer, lower-inner,
        /// lower-outer].
        corners: [(f64, f64); 4],
    },
}

/// A solid of revolution bounded by quadric patches, with an interior test.
#[derive(Debug, Clone)]
pub struct PiecewiseSurfaceTable {
    patches: Vec<QuadricPatch>,
    kind: SolidKind,
}

impl PiecewiseSurfaceTable {
    /// Lens between the paraboloids z = s·R² + (4sc − b)/(4sb) for s = s₁, s₂.
    /// Requires b ≠ 0 and s₁ > 0 > s₂; the two sheets must actually cross.
    pub fn parabolic_lens(b: f64, c: f64, s1: f64, s2: f64) -> Result<Self, TableError> {
        require(b != 0.0, "b", b, "profile family needs b != 0")?;
        if !(s1 > 0.0 && s2 < 0.0) {
            return Err(TableError::EmptyRegion {
                reason: "lens needs s1 > 0 > s2 (one sheet opening up, one down)",
            });
        }
        let kappa = |s: f64| (4.0 * s * c - b) / (4.0 * s * b);
        let (k1, k2) = (kappa(s1), kappa(s2));
        let r2_edge = (k2 - k1) / (s1 - s2);
        if r2_edge <= 0.0 {
            return Err(TableError::EmptyRegion {
                reason: "paraboloid sheets do not cross (apexes in the wrong order)",
            });
        }
        let z_edge = s1 * r2_edge + k1;
        let face = |s: f64, k: f64, inward: f64, label: &'static str| QuadricPatch {
            label,
            quadric: QuadricOfRevolution { q_rr: -s, q_zz: 0.0, q_z: 1.0, q_0: -k },
            inward,
            region: PatchRegion::RadiusRange {
                r2_min: None,
                r2_max: Some(r2_edge),
                z_split: 0.0,
                z_sign: 0,
            },
            profile: ProfileFamily::linear(b, c, s).expect("validated above"),
            t_range: (0.0, r2_edge),
        };
        Ok(PiecewiseSurfaceTable {
            patches: vec![
                face(s1, k1, 1.0, "lower paraboloid"),
                face(s2, k2, -1.0, "upper paraboloid"),
            ],
            kind: SolidKind::Lens { b, c, s1, s2, r2_edge, z_edge },
        })
    }

    /// Solid torus bounded by four confocal conics of revolution
    /// (z − b/2a)²/s + R²/(s + D) = 1, D = (4ac − b²)/(4a²): ellipse arcs
    /// s_e1 (bottom, σ = −1) and s_e2 (top, σ = +1), hyperbola sheets for the
    /// two s_h (inner/outer sides). Corner circles come from the pairwise
    /// conic intersections R² = (s_e + D)(s_h + D)/D, (z − b/2a)² = −s_e·s_h/D.
    pub fn tetragon_torus(
        a: f64,
        b: f64,
        c: f64,
        s_e1: f64,
        s_e2: f64,
        s_h1: f64,
        s_h2: f64,
    ) -> Result<Self, TableError> {
        require(a != 0.0, "a", a, "conic family needs a != 0")?;
        let d = (4.0 * a * c - b * b) / (4.0 * a * a);
        require(d > 0.0, "c", c, "confocal shift (4ac - b^2)/(4a^2) must be positive")?;
        require(s_e1 > 0.0, "s_e1", s_e1, "ellipse parameter must be positive")?;
        require(s_e2 > 0.0, "s_e2", s_e2, "ellipse parameter must be positive")?;
        if s_e1 >= s_e2 {
            return Err(TableError::EmptyRegion {
                reason: "need s_e1 < s_e2 for a nonempty band between the ellipses",
            });
        }
        for (name, s_h) in [("s_h1", s_h1), ("s_h2", s_h2)] {
            require(s_h < 0.0, name, s_h, "hyperbola parameter must be negative")?;
            if s_h + d <= 0.0 {
                // The one-sheet hyperboloid degenerates onto the axis.
                return Err(TableError::AxisTouching { r2_min: s_h + d });
            }
        }
        if s_h1 == s_h2 {
            return Err(TableError::EmptyRegion {
                reason: "need distinct hyperbola parameters for a nonempty band",
            });
        }
        // Inner side = smaller waist radius² = smaller s_h + D.
        let (s_in, s_out) = if s_h1 + d < s_h2 + d { (s_h1, s_h2) } else { (s_h2, s_h1) };
        let z0 = b / (2.0 * a);

        let corner = |s_e: f64, s_h: f64, sign: f64| {
            let r2 = (s_e + d) * (s_h + d) / d;
            let zeta2 = -s_e * s_h / d;
            (r2.sqrt(), z0 + sign * zeta2.sqrt())
        };
        let ul = corner(s_e2, s_in, 1.0);
        let ur = corner(s_e2, s_out, 1.0);
        let ll = corner(s_e1, s_in, -1.0);
        let lr = corner(s_e1, s_out, -1.0);

        // (z − z0)²/s + R²/(s + D) − 1 = 0, expanded in raw z.
        let conic_quadric = |s: f64| QuadricOfRevolution {
            q_rr: 1.0 / (s + d),
            q_zz: 1.0 / s,
            q_z: -2.0 * z0 / s,
            q_0: z0 * z0 / s - 1.0,
        };

        let patches = vec![
            QuadricPatch {
                label: "top ellipse arc",
                quadric: conic_quadric(s_e2),
                inward: -1.0,
                region: PatchRegion::RadiusRange {
                    r2_min: Some(ul.0 * ul.0),
                    r2_max: Some(ur.0 * ur.0),
                    z_split: z0,
                    z_sign: 1,
                },
                profile: ProfileFamily::conic(a, b, c, s_e2, 1)?,
                t_range: (ul.0 * ul.0, ur.0 * ur.0),
            },
            QuadricPatch {
                label: "bottom ellipse arc",
                quadric: conic_quadric(s_e1),
                inward: -1.0,
                region: PatchRegion::RadiusRange {
                    r2_min: Some(ll.0 * ll.0),
                    r2_max: Some(lr.0 * lr.0),
                    z_split: z0,
                    z_sign: -1,
                },
                profile: ProfileFamily::conic(a, b, c, s_e1, -1)?,
                t_range: (ll.0 * ll.0, lr.0 * lr.0),
            },
            QuadricPatch {
                label: "inner hyperbola arc",
                quadric: conic_quadric(s_in),
                inward: 1.0,
                region: PatchRegion::HeightRange { z_min: ll.1, z_max: ul.1 },
                profile: ProfileFamily::conic(a, b, c, s_in, 1)?,
                t_range: (s_in + d, ul.0 * ul.0),
            },
            QuadricPatch {
                label: "outer hyperbola arc",
                quadric: conic_quadric(s_out),
                inward: -1.0,
                region: PatchRegion::HeightRange { z_min: lr.1, z_max: ur.1 },
                profile: ProfileFamily::conic(a, b, c, s_out, 1)?,
                t_range: (s_out + d, ur.0 * ur.0),
            },
        ];

        Ok(PiecewiseSurfaceTable {
            patches,
            kind: SolidKind::Tetragon {
                a,
                b,
                c,
                s_e1,
                s_e2,
                s_h_inner: s_in,
                s_h_outer: s_out,
                d,
                z_center: z0,
                corners: [ul, ur, ll, lr],
            },
        })
    }

    pub fn patches(&self) -> &[QuadricPatch] {
        &self.patches
    }

    pub fn kind(&self) -> &SolidKind {
        &self.kind
    }

    /// Interior membership (with boundary tolerance `tol` on the implicit
    /// values), used for segment-midpoint audits.
    pub fn contains(&self, p: &VecN, tol: f64) -> bool {
        match &self.kind {
            SolidKind::Lens { b, c, s1, s2, .. } => {
                let kappa = |s: f64| (4.0 * s * c - b) / (4.0 * s * b);
                let r2 = p[0] * p[0] + p[1] * p[1];
                p[2] >= s1 * r2 + kappa(*s1) - tol && p[2] <= s2 * r2 + kappa(*s2) + tol
            }
            SolidKind::Tetragon { z_center, .. } => {
                // Between the hyperboloid sheets, and inside the ellipse of
                // revolution that caps the hit half (top or bottom).
                let inner = &self.patches[2];
                let outer = &self.patches[3];
                if inner.quadric.value(p) < -tol || outer.quadric.value(p) > tol {
                    return false;
                }
                let cap = if p[2] >= *z_center { &self.patches[0] } else { &self.patches[1] };
                cap.quadric.value(p) <= tol
            }
        }
    }
}

/// Any table in the catalog, for kind-generic propagation and the CLI.
#[derive(Debug, Clone)]
pub enum Table {
    Planar(PlanarTable),
    Wire(WireTable),
    Arctan(ArctanSurface),
    Piecewise(PiecewiseSurfaceTable),
}

impl Table {
    /// Dimension of the ambient space states live in.
    pub fn ambient_dim(&self) -> usize {
        match self {
            Table::Planar(_) => 2,
            Table::Wire(w) => w.dim(),
            Table::Arctan(_) | Table::Piecewise(_) => 3,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::curve_deriv_fd;

    const TAU: f64 = std::f64::consts::TAU;

    #[test]
    fn planar_constructors_validate() {
        assert!(PlanarTable::circle((0.0, 0.0), 1.0).is_ok());
        assert!(PlanarTable::circle((0.0, 0.0), -1.0).is_err());
        assert!(PlanarTable::ellipse(2.0, 1.0).is_ok());
        // a2 - lambda < 0 is a hyperbola, not an ellipse.
        assert!(PlanarTable::ellipse(1.0, 2.0).is_err());
        assert!(PlanarTable::hyperbola(1.0, 2.0).is_ok());
        assert!(PlanarTable::hyperbola(2.0, 1.0).is_err());
        assert!(PlanarTable::parabola(1.0, 0.0).is_ok());
        assert!(PlanarTable::parabola(0.0, 0.0).is_err());
    }

    #[test]
    fn planar_parametrizations_lie_on_implicit() {
        let tables = [
            PlanarTable::circle((0.3, -0.4), 2.0).unwrap(),
            PlanarTable::ellipse(2.0, 1.0).unwrap(),
            PlanarTable::hyperbola(1.0, 3.0).unwrap(),
            PlanarTable::parabola(1.0, 0.5).unwrap(),
        ];
        for table in &tables {
            for k in 0..500 {
                let t = -2.5 + 5.0 * k as f64 / 499.0;
                let p = table.eval(t);
                assert!(
                    table.implicit(&p).abs() < 1e-12,
                    "{:?} off its implicit at t = {t}: {:.3e}",
                    table.kind(),
                    table.implicit(&p)
                );
            }
        }
    }

    #[test]
    fn planar_derivatives_match_finite_differences() {
        let tables = [
            PlanarTable::circle((0.3, -0.4), 2.0).unwrap(),
            PlanarTable::ellipse(2.0, 1.0).unwrap(),
            PlanarTable::hyperbola(1.0, 3.0).unwrap(),
            PlanarTable::parabola(1.0, 0.5).unwrap(),
        ];
        for table in &tables {
            for k in 0..100 {
                let t = -2.0 + 4.0 * k as f64 / 99.0;
                let fd = curve_deriv_fd(table, t, 1e-6);
                let an = table.deriv(t);
                let scale = 1.0 + an.norm();
                assert!(
                    fd.sub(&an).norm() / scale < 1e-6,
                    "derivative mismatch at t = {t} for {:?}",
                    table.kind()
                );
            }
        }
    }

    #[test]
    fn circle_param_roundtrip() {
        let c = PlanarTable::circle((1.0, 2.0), 0.5).unwrap();
        for k in 0..16 {
            let t = -3.0 + 6.0 * k as f64 / 15.0;
            let p = c.eval(t);
            let back = c.param_at(&p);
            let diff = (back - t).rem_euclid(TAU).min((t - back).rem_euclid(TAU));
            assert!(diff < 1e-12, "param roundtrip: {t} vs {back}");
        }
    }

    #[test]
    fn wire_tangent_examples() {
        // Helix with R = 1, a = 1 at t = 0: tangent (1, 0, 1)/sqrt(2).
        let spiral = SpiralWire::new(1.0, 1.0).unwrap();
        let tau = crate::geom::unit_tangent(&spiral, 0.0).unwrap();
        let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
        assert!((tau[0] - inv_sqrt2).abs() < 1e-15);
        assert!(tau[1].abs() < 1e-15);
        assert!((tau[2] - inv_sqrt2).abs() < 1e-15);

        // Torus curve with windings (2, 3) at t = 0: tangent (0, 2, 0, 3)/sqrt(13).
        let knot = ToricKnotWire::new(1.0, 1.0, 2, 3).unwrap();
        let tau = crate::geom::unit_tangent(&knot, 0.0).unwrap();
        let n = 13.0_f64.sqrt();
        for (i, expect) in [0.0, 2.0 / n, 0.0, 3.0 / n].iter().enumerate() {
            assert!((tau[i] - expect).abs() < 1e-15, "component {i}");
        }
    }

    #[test]
    fn wire_defining_systems_are_satisfied() {
        let wires = [
            WireTable::Exp(
                ExpWire::new(
                    SkewMatrix::block_rotations(&[2.0, 3.0]),
                    VecN::new(vec![1.0, 0.0, 1.0, 0.0]),
                )
                .unwrap(),
            ),
            WireTable::Spiral(SpiralWire::new(1.5, 0.7).unwrap()),
            WireTable::ToricKnot(ToricKnotWire::new(1.0, 0.5, 2, 3).unwrap()),
        ];
        for wire in &wires {
            let (a, b) = wire.defining_system();
            for k in 0..200 {
                let t = -3.0 + 6.0 * k as f64 / 199.0;
                let gamma = wire.curve().eval(t);
                let dot = wire.curve().deriv(t);
                let res = dot.sub(&a.apply(&gamma).unwrap()).sub(&b).norm();
                assert!(res < 1e-12, "linear system residual {res:.3e} at t = {t}");
            }
        }
    }

    #[test]
    fn exp_wire_grid_matches_pointwise_eval() {
        let wire = ExpWire::new(
            SkewMatrix::block_rotations(&[2.0, 3.0]),
            VecN::new(vec![1.0, 0.0, 1.0, 0.0]),
        )
        .unwrap();
        let grid = wire.eval_grid(0.4, 0.003, 1500);
        for (k, p) in grid.iter().enumerate() {
            let exact = wire.eval(0.4 + 0.003 * k as f64);
            assert!(
                p.sub(&exact).norm() < 1e-12,
                "grid point {k} drifted {:.3e}",
                p.sub(&exact).norm()
            );
        }
    }

    #[test]
    fn profile_family_linear_matches_lens_sheets() {
        // b = 2, c = 1, s = 1: f(t) = t + 1/4.
        let f = ProfileFamily::linear(2.0, 1.0, 1.0).unwrap();
        let (v, d) = f.eval(0.3).unwrap();
        assert!((v - 0.55).abs() < 1e-15);
        assert_eq!(d, 1.0);
        // s = -1/2: f(t) = -t/2 + 1.
        let f = ProfileFamily::linear(2.0, 1.0, -0.5).unwrap();
        let (v, d) = f.eval(0.0).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        assert_eq!(d, -0.5);
    }

    #[test]
    fn profile_family_conic_amplitude_and_domain() {
        // (a, b, c, s) = (1, 0, 1, 1): amplitude 1/2, f(0) = ±1.
        let f = ProfileFamily::conic(1.0, 0.0, 1.0, 1.0, 1).unwrap();
        assert!((f.amplitude().unwrap() - 0.5).abs() < 1e-15);
        let (v, d) = f.eval(0.0).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        assert!((d + 0.25).abs() < 1e-15);
        // Domain ends where the radicand s - At hits zero: t = 2.
        assert!(matches!(f.eval(2.5), Err(TableError::OutOfDomain { .. })));
        let lower = ProfileFamily::conic(1.0, 0.0, 1.0, 1.0, -1).unwrap();
        let (v, d) = lower.eval(0.0).unwrap();
        assert!((v + 1.0).abs() < 1e-15);
        assert!((d - 0.25).abs() < 1e-15);
    }

    #[test]
    fn arctan_surface_partials_match_finite_differences() {
        let surf = ArctanSurface::new(
            1.0,
            1.0,
            Arc::new(LinearProfile { slope: 1.0, offset: 0.0 }),
        )
        .unwrap();
        for &(u1, u2) in &[(0.3, 0.8), (-1.2, 2.0), (0.0, 1.0), (2.0, 0.4)] {
            let (a1, a2) = surf.partials(u1, u2);
            let (f1, f2) = crate::geom::surface_partials_fd(&surf, u1, u2, 1e-6);
            assert!(a1.sub(&f1).norm() < 1e-7, "r_u1 mismatch at ({u1}, {u2})");
            assert!(a2.sub(&f2).norm() < 1e-7, "r_u2 mismatch at ({u1}, {u2})");
        }
        assert!(surf.contains_param(0.0, 1.0));
        assert!(!surf.contains_param(0.0, -1.0));
        assert!(ArctanSurface::new(0.0, 1.0, Arc::new(LinearProfile { slope: 1.0, offset: 0.0 })).is_err());
    }

    #[test]
    fn lens_edge_circle_and_focus() {
        // b = 2, c = 1, s = (1, -1/2): sheets z = R² + 1/4 and z = -R²/2 + 1,
        // meeting at R = 1/sqrt(2), z = 3/4.
        let lens = PiecewiseSurfaceTable::parabolic_lens(2.0, 1.0, 1.0, -0.5).unwrap();
        let SolidKind::Lens { r2_edge, z_edge, b, c, s1, s2 } = *lens.kind() else {
            panic!("expected lens kind")
        };
        assert!((r2_edge - 0.5).abs() < 1e-15);
        assert!((z_edge - 0.75).abs() < 1e-15);
        // Every sheet of the family shares the focus height c/b.
        for s in [s1, s2] {
            let kappa = (4.0 * s * c - b) / (4.0 * s * b);
            assert!((kappa + 1.0 / (4.0 * s) - c / b).abs() < 1e-15);
        }
        // Interior test: between the sheets in, outside out.
        assert!(lens.contains(&vec3(0.0, 0.0, 0.5), 1e-12));
        assert!(!lens.contains(&vec3(0.0, 0.0, 1.5), 1e-12));
        assert!(!lens.contains(&vec3(1.0, 0.0, 0.75), 1e-12));
    }

    #[test]
    fn lens_rejects_bad_parameters() {
        assert!(matches!(
            PiecewiseSurfaceTable::parabolic_lens(2.0, 1.0, 1.0, 1.0),
            Err(TableError::EmptyRegion { .. })
        ));
        assert!(matches!(
            PiecewiseSurfaceTable::parabolic_lens(0.0, 1.0, 1.0, -0.5),
            Err(TableError::InvalidParameter { .. })
        ));
    }

    #[test]
    fn tetragon_default_corners() {
        let tet = PiecewiseSurfaceTable::tetragon_torus(1.0, 0.0, 1.0, 1.0, 2.0, -0.25, -0.5).unwrap();
        let SolidKind::Tetragon { d, z_center, corners, s_h_inner, s_h_outer, .. } = *tet.kind()
        else {
            panic!("expected tetragon kind")
        };
        assert!((d - 1.0).abs() < 1e-15);
        assert_eq!(z_center, 0.0);
        assert_eq!(s_h_inner, -0.5);
        assert_eq!(s_h_outer, -0.25);
        let expect = [
            (1.5_f64.sqrt(), 1.0),                  // upper-inner
            (1.5, 0.5_f64.sqrt()),                  // upper-outer
            (1.0, -(0.5_f64.sqrt())),               // lower-inner
            (1.5_f64.sqrt(), -0.5),                 // lower-outer
        ];
        for (got, want) in corners.iter().zip(&expect) {
            assert!(
                (got.0 - want.0).abs() < 1e-14 && (got.1 - want.1).abs() < 1e-14,
                "corner {got:?} vs {want:?}"
            );
        }
        // Confocality makes the boundary conics cross at right angles: the
        // meridian gradients of the two implicit forms are orthogonal.
        for (i_e, i_h) in [(0usize, 2usize), (0, 3), (1, 2), (1, 3)] {
            let (qe, qh) = (&tet.patches()[i_e].quadric, &tet.patches()[i_h].quadric);
            for corner in &corners {
                let p = vec3(corner.0, 0.0, corner.1);
                if (qe.value(&p).abs() < 1e-12) && (qh.value(&p).abs() < 1e-12) {
                    let (ge, gh) = (qe.gradient(&p), qh.gradient(&p));
                    assert!(
                        ge.dot(&gh).abs() < 1e-12,
                        "non-orthogonal crossing at {corner:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn tetragon_corners_solve_both_conics() {
        // Independent check of the closed-form corners: plug each corner
        // circle into both meridian equations.
        let (a, b, c) = (1.0, 0.0, 1.0);
        let tet = PiecewiseSurfaceTable::tetragon_torus(a, b, c, 1.0, 2.0, -0.25, -0.5).unwrap();
        let SolidKind::Tetragon { d, z_center, corners, .. } = *tet.kind() else { unreachable!() };
        let on_conic = |s: f64, r: f64, z: f64| {
            let zeta = z - z_center;
            (zeta * zeta / s + r * r / (s + d) - 1.0).abs()
        };
        let [ul, ur, ll, lr] = corners;
        for (s_e, s_h, corner) in [
            (2.0, -0.5, ul),
            (2.0, -0.25, ur),
            (1.0, -0.5, ll),
            (1.0, -0.25, lr),
        ] {
            assert!(on_conic(s_e, corner.0, corner.1) < 1e-13);
            assert!(on_conic(s_h, corner.0, corner.1) < 1e-13);
        }
    }

    #[test]
    fn tetragon_membership_probes() {
        let tet = PiecewiseSurfaceTable::tetragon_torus(1.0, 0.0, 1.0, 1.0, 2.0, -0.25, -0.5).unwrap();
        // In the pinch near the equator.
        assert!(tet.contains(&vec3(0.75, 0.0, 0.0), 1e-12));
        // Well inside the upper lobe.
        assert!(tet.contains(&vec3(1.0, 0.0, 0.55), 1e-12));
        // Outside: beyond the outer hyperboloid at the equator.
        assert!(!tet.contains(&vec3(1.0, 0.0, 0.0), 1e-12));
        // Outside: below the bottom ellipse arc.
        assert!(!tet.contains(&vec3(1.2, 0.0, -0.54), 1e-12));
        // Outside: south-east of the lower-outer corner (beyond the bottom
        // ellipse's equatorial width, between the extended hyperboloids).
        assert!(!tet.contains(&vec3(1.43, 0.0, -0.66), 1e-12));
        // On the axis: never inside a solid torus.
        assert!(!tet.contains(&vec3(0.0, 0.0, 0.0), 1e-12));
    }

    #[test]
    fn tetragon_rejects_degenerate_parameters() {
        assert!(matches!(
            PiecewiseSurfaceTable::tetragon_torus(1.0, 0.0, 1.0, 1.0, 2.0, -0.25, -1.5),
            Err(TableError::AxisTouching { .. })
        ));
        assert!(matches!(
            PiecewiseSurfaceTable::tetragon_torus(1.0, 0.0, 1.0, 2.0, 1.0, -0.25, -0.5),
            Err(TableError::EmptyRegion { .. })
        ));
        assert!(matches!(
            PiecewiseSurfaceTable::tetragon_torus(1.0, 0.0, 1.0, 1.0, 2.0, -0.25, -0.25),
            Err(TableError::EmptyRegion { .. })
        ));
        assert!(matches!(
            PiecewiseSurfaceTable::tetragon_torus(0.0, 0.0, 1.0, 1.0, 2.0, -0.25, -0.5),
            Err(TableError::InvalidParameter { .. })
        ));
    }

    #[test]
    fn patch_profiles_match_patch_quadrics() {
        // On each patch, the meridian profile and the implicit quadric agree:
        // Q(R, 0, f(R²)) = 0 over the patch's t-range.
        let tables = [
            PiecewiseSurfaceTable::parabolic_lens(2.0, 1.0, 1.0, -0.5).unwrap(),
            PiecewiseSurfaceTable::tetragon_torus(1.0, 0.0, 1.0, 1.0, 2.0, -0.25, -0.5).unwrap(),
        ];
        for table in &tables {
            for patch in table.patches() {
                let (t_lo, t_hi) = patch.t_range;
                for k in 1..60 {
                    let t = t_lo + (t_hi - t_lo) * k as f64 / 60.0;
                    let Ok((f, _)) = patch.profile.eval(t) else { continue };
                    let p = vec3(t.sqrt(), 0.0, f);
                    assert!(
                        patch.quadric.value(&p).abs() < 1e-12,
                        "{}: profile/quadric disagree at t = {t}",
                        patch.label
                    );
                }
            }
        }
    }
}
