//! Dimension-generic vectors, skew-symmetric matrices, matrix exponential
//! action, and the curve/surface traits the rest of the crate builds on.
//!
//! Everything here is plain `f64` numerics. Vectors carry their dimension at
//! runtime (`VecN`); the billiard catalog only needs n ≤ 6, so no effort is
//! spent on static dimensions or SIMD.

use thiserror::Error;

/// Errors from low-level geometric primitives.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    /// Two arguments disagreed in dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// A curve derivative was too short to normalize.
    #[error("degenerate tangent at t = {t}: |d| = {norm:.3e}")]
    DegenerateTangent { t: f64, norm: f64 },
    /// Surface partials were (numerically) collinear.
    #[error("degenerate normal at u = ({u1}, {u2}): |r_u1 x r_u2| = {norm:.3e}")]
    DegenerateNormal { u1: f64, u2: f64, norm: f64 },
    /// A vector that must be nonzero (e.g. a direction) was numerically zero.
    #[error("cannot normalize near-zero vector: |v| = {norm:.3e}")]
    ZeroVector { norm: f64 },
}

/// Tangent/normal vectors shorter than this are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

// ─────────────────────────── vectors ───────────────────────────

/// A point or direction in ℝⁿ, n ≥ 1, with finite components.
#[derive(Debug, Clone, PartialEq)]
pub struct VecN(Vec<f64>);

impl VecN {
    pub fn new(components: Vec<f64>) -> Self {
        debug_assert!(
            components.iter().all(|c| c.is_finite()),
            "VecN components must be finite, got {components:?}"
        );
        VecN(components)
    }

    pub fn from_slice(components: &[f64]) -> Self {
        Self::new(components.to_vec())
    }

    pub fn zeros(n: usize) -> Self {
        VecN(vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, other: &VecN) -> f64 {
        debug_assert_eq!(self.dim(), other.dim(), "dot of mismatched dimensions");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn scale(&self, k: f64) -> VecN {
        VecN(self.0.iter().map(|a| k * a).collect())
    }

    pub fn add(&self, other: &VecN) -> VecN {
        debug_assert_eq!(self.dim(), other.dim());
        VecN(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &VecN) -> VecN {
        debug_assert_eq!(self.dim(), other.dim());
        VecN(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// `self + k * other`, the common ray/update form.
    pub fn add_scaled(&self, k: f64, other: &VecN) -> VecN {
        debug_assert_eq!(self.dim(), other.dim());
        VecN(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + k * b)
                .collect(),
        )
    }

    pub fn distance(&self, other: &VecN) -> f64 {
        self.sub(other).norm()
    }

    /// Unit vector along `self`; error if the norm is below [`DEGENERACY_TOL`].
    pub fn normalized(&self) -> Result<VecN, GeomError> {
        let n = self.norm();
        if n <= DEGENERACY_TOL {
            return Err(GeomError::ZeroVector { norm: n });
        }
        Ok(self.scale(1.0 / n))
    }

    /// Cross product, defined for n = 3 only.
    pub fn cross(&self, other: &VecN) -> VecN {
        assert_eq!(self.dim(), 3, "cross product requires dimension 3");
        assert_eq!(other.dim(), 3, "cross product requires dimension 3");
        let (a, b) = (&self.0, &other.0);
        VecN(vec![
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ])
    }
}

impl std::ops::Index<usize> for VecN {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for VecN {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

/// Convenience constructor for 2-vectors.
pub fn vec2(x: f64, y: f64) -> VecN {
    VecN::new(vec![x, y])
}

/// Convenience constructor for 3-vectors.
pub fn vec3(x: f64, y: f64, z: f64) -> VecN {
    VecN::new(vec![x, y, z])
}

// ─────────────────────── skew matrices & exp ───────────────────────

/// Skew-symmetric n×n matrix stored as its strict upper triangle, so
/// A + Aᵀ = 0 holds exactly by construction.
///
/// Upper entries are laid out row-major: (0,1), (0,2), …, (0,n−1), (1,2), …
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix {
    n: usize,
    upper: Vec<f64>,
}

impl SkewMatrix {
    /// Build from the strict upper triangle (row-major). Panics on a length
    /// that does not match n(n−1)/2.
    pub fn from_upper(n: usize, upper: Vec<f64>) -> Self {
        assert_eq!(
            upper.len(),
            n * (n - 1) / 2,
            "upper triangle of an {n}x{n} skew matrix needs {} entries",
            n * (n - 1) / 2
        );
        SkewMatrix { n, upper }
    }

    pub fn zeros(n: usize) -> Self {
        SkewMatrix {
            n,
            upper: vec![0.0; n * (n - 1) / 2],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn upper_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n);
        // Entries before row i: (n-1) + (n-2) + ... + (n-i)
        i * self.n - i * (i + 1) / 2 + (j - i - 1)
    }

    /// Entry A[i][j] with skew symmetry applied.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => self.upper[self.upper_index(i, j)],
            Greater => -self.upper[self.upper_index(j, i)],
            Equal => 0.0,
        }
    }

    /// Set the (i, j) entry, i ≠ j; the (j, i) entry follows by skewness.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert_ne!(i, j, "diagonal of a skew matrix is fixed at zero");
        if i < j {
            let k = self.upper_index(i, j);
            self.upper[k] = value;
        } else {
            let k = self.upper_index(j, i);
            self.upper[k] = -value;
        }
    }

    /// Matrix–vector product A·x.
    pub fn apply(&self, x: &VecN) -> Result<VecN, GeomError> {
        if x.dim() != self.n {
            return Err(GeomError::DimensionMismatch {
                expected: self.n,
                got: x.dim(),
            });
        }
        let mut y = VecN::zeros(self.n);
        for i in 0..self.n {
            let mut acc = 0.0;
            for j in 0..self.n {
                if i != j {
                    acc += self.entry(i, j) * x[j];
                }
            }
            y[i] = acc;
        }
        Ok(y)
    }

    /// Negated matrix (equals the transpose for a skew matrix).
    pub fn negated(&self) -> SkewMatrix {
        SkewMatrix {
            n: self.n,
            upper: self.upper.iter().map(|a| -a).collect(),
        }
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> MatN {
        let mut m = MatN::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(i, j, self.entry(i, j));
            }
        }
        m
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        (2.0 * self.upper.iter().map(|a| a * a).sum::<f64>()).sqrt()
    }

    /// Block-diagonal matrix of 2×2 rotation generators: for each ω the block
    /// [[0, −ω], [ω, 0]], whose exponential rotates that coordinate pair by
    /// +ωt. Dimension is 2·len(omegas).
    pub fn block_rotations(omegas: &[f64]) -> SkewMatrix {
        let n = 2 * omegas.len();
        let mut a = SkewMatrix::zeros(n);
        for (b, &w) in omegas.iter().enumerate() {
            a.set(2 * b, 2 * b + 1, -w);
        }
        a
    }
}

/// Small dense square matrix, row-major. Internal helper for the exponential
/// series; not a general linear-algebra type.
#[derive(Debug, Clone, PartialEq)]
pub struct MatN {
    n: usize,
    data: Vec<f64>,
}

impl MatN {
    pub fn zeros(n: usize) -> Self {
        MatN {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn scale_in_place(&mut self, k: f64) {
        for v in &mut self.data {
            *v *= k;
        }
    }

    pub fn add_assign(&mut self, other: &MatN) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn mat_mul(&self, other: &MatN) -> MatN {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = MatN::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += aik * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn mat_vec(&self, x: &VecN) -> VecN {
        debug_assert_eq!(self.n, x.dim());
        let mut y = VecN::zeros(self.n);
        for i in 0..self.n {
            let mut acc = 0.0;
            for j in 0..self.n {
                acc += self.get(i, j) * x[j];
            }
            y[i] = acc;
        }
        y
    }

    /// Max row-sum (infinity) norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Relative truncation tolerance for the exponential Taylor series.
const EXP_SERIES_TOL: f64 = 1e-15;

/// Dense matrix exponential by scaling-and-squaring on the truncated series.
///
/// The argument is scaled down until its norm is below 1/2, the series is
/// summed to a 1e−15 relative term bound, then the result is squared back up.
pub fn matrix_exp(b: &MatN) -> MatN {
    let norm = b.norm_inf();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let mut c = b.clone();
    c.scale_in_place(0.5_f64.powi(squarings as i32));

    // exp(C) = I + C + C²/2! + …
    let n = b.dim();
    let mut result = MatN::identity(n);
    let mut term = MatN::identity(n);
    for k in 1..=40 {
        term = term.mat_mul(&c);
        term.scale_in_place(1.0 / k as f64);
        result.add_assign(&term);
        if term.norm_inf() <= EXP_SERIES_TOL * result.norm_inf() {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.mat_mul(&result);
    }
    result
}

/// Computes e^{At} x₀ for a skew-symmetric A.
///
/// For n = 2 the closed-form plane rotation is used; otherwise the dense
/// scaling-and-squaring exponential. Because A is exactly skew, the result
/// preserves |x₀| to roundoff, which the flow-norm tests rely on.
pub fn matrix_exp_action(a: &SkewMatrix, t: f64, x0: &VecN) -> Result<VecN, GeomError> {
    if x0.dim() != a.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: a.dim(),
            got: x0.dim(),
        });
    }
    if a.dim() == 2 {
        // A = [[0, u], [−u, 0]] acts as rotation by angle −ut... exp gives
        // [[cos φ, sin φ], [−sin φ, cos φ]] with φ = u t.
        let phi = a.entry(0, 1) * t;
        let (s, c) = phi.sin_cos();
        return Ok(vec2(c * x0[0] + s * x0[1], -s * x0[0] + c * x0[1]));
    }
    let mut b = a.to_dense();
    b.scale_in_place(t);
    Ok(matrix_exp(&b).mat_vec(x0))
}

// ─────────────────────── curves & surfaces ───────────────────────

/// A parametric curve t ↦ γ(t) ∈ ℝⁿ with an analytic derivative.
pub trait Curve {
    /// Ambient dimension n.
    fn dim(&self) -> usize;
    /// Point γ(t).
    fn eval(&self, t: f64) -> VecN;
    /// Derivative γ̇(t).
    fn deriv(&self, t: f64) -> VecN;
    /// Parameter period for closed curves, `None` for open ones.
    fn period(&self) -> Option<f64> {
        None
    }
    /// Evaluate γ on the uniform grid start + k·step, k = 0..count.
    /// Implementations with expensive `eval` may override this with an
    /// incremental scheme; the default just loops.
    fn eval_grid(&self, start: f64, step: f64, count: usize) -> Vec<VecN> {
        (0..count).map(|k| self.eval(start + k as f64 * step)).collect()
    }
}

/// Unit tangent γ̇/|γ̇|; degenerate below [`DEGENERACY_TOL`].
pub fn unit_tangent(curve: &dyn Curve, t: f64) -> Result<VecN, GeomError> {
    let d = curve.deriv(t);
    let n = d.norm();
    if n <= DEGENERACY_TOL {
        return Err(GeomError::DegenerateTangent { t, norm: n });
    }
    Ok(d.scale(1.0 / n))
}

/// A parametric surface patch (u₁, u₂) ↦ r(u) ∈ ℝ³ with analytic partials.
pub trait SurfacePatch {
    /// Point r(u₁, u₂).
    fn eval(&self, u1: f64, u2: f64) -> VecN;
    /// Partials (r_{u₁}, r_{u₂}).
    fn partials(&self, u1: f64, u2: f64) -> (VecN, VecN);
    /// Chart/domain membership of the parameter point.
    fn contains_param(&self, u1: f64, u2: f64) -> bool;
}

/// Unit normal r_{u₁} × r_{u₂} / |·|. Orientation follows the chart; callers
/// doing dynamics re-orient against the incoming velocity.
pub fn surface_normal(patch: &dyn SurfacePatch, u1: f64, u2: f64) -> Result<VecN, GeomError> {
    let (ru1, ru2) = patch.partials(u1, u2);
    let n = ru1.cross(&ru2);
    let len = n.norm();
    if len <= DEGENERACY_TOL {
        return Err(GeomError::DegenerateNormal { u1, u2, norm: len });
    }
    Ok(n.scale(1.0 / len))
}

// ───────────────────── finite-difference checks ─────────────────────

/// Central finite difference of a curve's `eval`, for validating `deriv`.
pub fn curve_deriv_fd(curve: &dyn Curve, t: f64, h: f64) -> VecN {
    curve.eval(t + h).sub(&curve.eval(t - h)).scale(1.0 / (2.0 * h))
}

/// Central finite differences of a patch's `eval`, for validating `partials`.
pub fn surface_partials_fd(patch: &dyn SurfacePatch, u1: f64, u2: f64, h: f64) -> (VecN, VecN) {
    let du1 = patch
        .eval(u1 + h, u2)
        .sub(&patch.eval(u1 - h, u2))
        .scale(1.0 / (2.0 * h));
    let du2 = patch
        .eval(u1, u2 + h)
        .sub(&patch.eval(u1, u2 - h))
        .scale(1.0 / (2.0 * h));
    (du1, du2)
}
