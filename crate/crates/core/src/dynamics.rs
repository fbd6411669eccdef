//! Reflection dynamics: planar chord stepping on conic tables, equal-angle
//! chord stepping on wires, ray stepping on surfaces, and orbit propagation.
//!
//! Every stepper is pure: it maps a state to the next impact or a typed
//! error, and [`propagate`] turns step errors into orbit termination flags
//! without panicking.

use crate::geom::{unit_tangent, Curve, VecN};
use crate::roots::{bisect, brackets_from_samples, newton_polish, scan_brackets, Bracket};
use crate::tables::{
    ArctanSurface, PiecewiseSurfaceTable, PlanarTable, QuadricPatch, Table, WireTable,
};
use thiserror::Error;

/// Minimum ray/arc advance before the next impact is accepted; prevents
/// re-detecting the impact the state is currently sitting on.
pub const MIN_ADVANCE: f64 = 1e-9;
/// |v·n| below this is a grazing hit; the reflection law degenerates.
pub const TANGENTIAL_TOL: f64 = 1e-10;
/// Impacts within this distance of a patch boundary terminate the orbit
/// (no reflection law is defined on the edge circles).
pub const EDGE_BAND: f64 = 1e-7;
/// Number of cells in a dense root scan.
pub const SCAN_CELLS: usize = 2048;
/// Bisection refines a bracket to this width.
pub const BISECT_WIDTH: f64 = 1e-13;
/// Newton iterations after bisection.
pub const NEWTON_ITERS: usize = 5;
/// Accepted equal-angle defect at a wire reflection root.
pub const CHORD_G_TOL: f64 = 1e-12;
/// A candidate chord endpoint this close to the incoming endpoint is the
/// retraced incoming chord, excluded unless it is the only root.
pub const RETRACE_TOL: f64 = 1e-9;
/// Quadratic discriminants below this are treated as ray tangency.
pub const TANGENCY_DISC: f64 = 1e-14;
/// Scan window (in curve parameter) for wires with no period.
pub const OPEN_WINDOW: f64 = 4.0 * std::f64::consts::PI;
/// Ray-parameter scan window for unbounded surface charts.
pub const SURFACE_RAY_WINDOW: f64 = 64.0;

/// Why a step (and hence an orbit) stopped.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    #[error("ray never meets the boundary")]
    NoIntersection,
    #[error("tangential impact: |v.n| = {dot:.3e}")]
    TangentialImpact { dot: f64 },
    #[error("impact within {dist:.3e} of a patch edge")]
    EdgeImpact { dist: f64 },
    #[error("no admissible reflection root in the window after t = {t}")]
    NoReflection { t: f64 },
    #[error("branch policy tie between roots {lo} and {hi}")]
    AmbiguousBranch { lo: f64, hi: f64 },
    #[error("invalid chord: endpoints at s = {s}, t = {t} coincide")]
    InvalidChord { s: f64, t: f64 },
    #[error("impact left the chart at (u1, u2) = ({u1:.6}, {u2:.6})")]
    OutOfChart { u1: f64, u2: f64 },
    #[error("invalid state: {reason}")]
    InvalidState { reason: &'static str },
}

/// Position and unit velocity of a free-flying particle.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub x: VecN,
    pub v: VecN,
}

impl PhaseState {
    /// Builds a state, normalizing the velocity to unit length.
    pub fn new(x: VecN, v: VecN) -> Result<Self, StepError> {
        if x.dim() != v.dim() {
            return Err(StepError::InvalidState { reason: "position/velocity dimension mismatch" });
        }
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(StepError::InvalidState { reason: "velocity must be nonzero and finite" });
        }
        Ok(PhaseState { x, v: v.scale(1.0 / n) })
    }
}

/// Mirror reflection v − 2(v·n)n about the plane with unit normal n.
pub fn reflect(v: &VecN, n: &VecN) -> VecN {
    v.add_scaled(-2.0 * v.dot(n), n)
}

/// How the next wire chord is chosen when several roots satisfy the
/// equal-angle condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchPolicy {
    /// Smallest root strictly ahead of the current parameter.
    Forward,
    /// Root minimizing |s₁ − t|, excluding the retraced incoming chord.
    Nearest,
}

/// One recorded reflection: boundary parameter(s) of the impact point, the
/// point itself, and the directions just before and after.
///
/// Parameter conventions: planar tables record the boundary curve parameter;
/// wires record the outgoing chord (t, s₁); graph surfaces record the chart
/// coordinates (u₁, u₂); solids of revolution record (atan2(y, x), z).
#[derive(Debug, Clone, PartialEq)]
pub struct Bounce {
    pub params: Vec<f64>,
    pub point: VecN,
    pub v_in: VecN,
    pub v_out: VecN,
}

/// Starting data resolved to a point and a direction (plus wire chord
/// parameters when applicable), mirroring the layout of a [`Bounce`].
#[derive(Debug, Clone, PartialEq)]
pub struct InitialSample {
    pub params: Vec<f64>,
    pub point: VecN,
    pub dir: VecN,
}

/// User-facing initial condition for [`propagate`].
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// Free-flight state for planar and surface tables.
    Phase { x: VecN, v: VecN },
    /// Directed chord γ(s) → γ(t) for wire tables.
    Chord { s: f64, t: f64 },
}

/// A propagated orbit: the initial sample, all recorded bounces, and the
/// reason the run stopped early (if it did).
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub initial: InitialSample,
    pub bounces: Vec<Bounce>,
    pub termination: Option<StepError>,
}

impl Orbit {
    /// The polyline of positions: initial point, then every impact point.
    pub fn points(&self) -> Vec<&VecN> {
        std::iter::once(&self.initial.point)
            .chain(self.bounces.iter().map(|b| &b.point))
            .collect()
    }

    /// Midpoints of all free-flight segments, for domain-membership audits.
    pub fn segment_midpoints(&self) -> Vec<VecN> {
        let pts = self.points();
        pts.windows(2)
            .map(|w| w[0].add(w[1]).scale(0.5))
            .collect()
    }
}

// ─────────────────────────── planar stepping ───────────────────────────

/// Real roots of Aλ² + Bλ + C, computed with the cancellation-stable
/// quadratic formula. Near-zero discriminants count as tangency (no
/// crossing), returning no roots.
fn quadric_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a.abs() < 1e-300 {
        if b != 0.0 {
            return vec![-c / b];
        }
        return Vec::new();
    }
    let disc = b * b - 4.0 * a * c;
    if disc < TANGENCY_DISC {
        return Vec::new();
    }
    let sgn = if b >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (b + sgn * disc.sqrt());
    if q == 0.0 {
        return vec![0.0]; // b = 0 and c = 0: double root at the origin
    }
    vec![q / a, c / q]
}

/// Smallest real root beyond `min_advance`, if any.
fn smallest_quadratic_root(a: f64, b: f64, c: f64, min_advance: f64) -> Option<f64> {
    quadric_roots(a, b, c)
        .into_iter()
        .filter(|l| l.is_finite() && *l > min_advance)
        .fold(None, |acc: Option<f64>, l| Some(acc.map_or(l, |m| m.min(l))))
}

/// Advance to the next impact on a planar conic table and reflect.
/// Returns the recorded bounce and the post-reflection state.
pub fn planar_step(table: &PlanarTable, state: &PhaseState) -> Result<(Bounce, PhaseState), StepError> {
    let (a, b, c) = table.ray_coefficients(&state.x, &state.v);
    let lambda = smallest_quadratic_root(a, b, c, MIN_ADVANCE).ok_or(StepError::NoIntersection)?;
    // One Newton iteration on Φ(x + λv) sharpens the closed-form root.
    let lambda = {
        let p = state.x.add_scaled(lambda, &state.v);
        let grad = table.gradient(&p);
        let dphi = grad.dot(&state.v);
        let polished = if dphi != 0.0 { lambda - table.implicit(&p) / dphi } else { lambda };
        if polished.is_finite() && polished > MIN_ADVANCE { polished } else { lambda }
    };
    let point = state.x.add_scaled(lambda, &state.v);
    let normal = table
        .gradient(&point)
        .normalized()
        .map_err(|_| StepError::InvalidState { reason: "degenerate boundary normal" })?;
    let dot = state.v.dot(&normal);
    if dot.abs() < TANGENTIAL_TOL {
        return Err(StepError::TangentialImpact { dot });
    }
    let v_out = reflect(&state.v, &normal);
    let bounce = Bounce {
        params: vec![table.param_at(&point)],
        point: point.clone(),
        v_in: state.v.clone(),
        v_out: v_out.clone(),
    };
    Ok((bounce, PhaseState { x: point, v: v_out }))
}

// ─────────────────────────── wire stepping ───────────────────────────

/// Result of one wire reflection: the outgoing chord parameter and the
/// directions at the reflection point γ(t).
#[derive(Debug, Clone, PartialEq)]
pub struct WireStep {
    pub s_next: f64,
    pub point: VecN,
    pub v_in: VecN,
    pub v_out: VecN,
}

struct ChordRoot {
    sigma: f64,
    endpoint: VecN,
}

/// Reflect the chord γ(s) → γ(t) at γ(t): find s₁ with the outgoing chord
/// γ(t) → γ(s₁) making an equal angle with the tangent at γ(t).
pub fn wire_step(
    curve: &dyn Curve,
    s: f64,
    t: f64,
    policy: BranchPolicy,
) -> Result<WireStep, StepError> {
    let gamma_s = curve.eval(s);
    let gamma_t = curve.eval(t);
    let chord = gamma_t.sub(&gamma_s);
    let len = chord.norm();
    if len <= 1e-12 {
        return Err(StepError::InvalidChord { s, t });
    }
    let u_in = chord.scale(1.0 / len);
    let tau = unit_tangent(curve, t)
        .map_err(|_| StepError::InvalidState { reason: "degenerate curve tangent" })?;
    let c = u_in.dot(&tau);
    let window = curve.period().unwrap_or(OPEN_WINDOW);

    // g(σ) = ⟨u_out(σ), τ⟩ − c, NaN when the trial chord collapses.
    let g_at = |endpoint: &VecN| -> f64 {
        let d = endpoint.sub(&gamma_t);
        let l = d.norm();
        if l < 1e-12 {
            return f64::NAN;
        }
        d.dot(&tau) / l - c
    };
    let g_exact = |sigma: f64| -> f64 { g_at(&curve.eval(sigma)) };

    let mut spans: Vec<(f64, f64)> = vec![(t + MIN_ADVANCE, t + window)];
    if policy == BranchPolicy::Nearest {
        spans.push((t - window, t - MIN_ADVANCE));
    }

    let mut brackets: Vec<Bracket> = Vec::new();
    for (start, end) in spans {
        let h = (end - start) / SCAN_CELLS as f64;
        let points = curve.eval_grid(start, h, SCAN_CELLS + 1);
        let ts: Vec<f64> = (0..=SCAN_CELLS).map(|k| start + h * k as f64).collect();
        let gs: Vec<f64> = points.iter().map(|p| g_at(p)).collect();
        brackets.extend(brackets_from_samples(&ts, &gs));
    }
    if brackets.is_empty() {
        return Err(StepError::NoReflection { t });
    }

    // Refine every bracket: bisection to width, then safeguarded Newton with
    // the analytic derivative of the unit-chord direction.
    let mut roots: Vec<ChordRoot> = Vec::new();
    for bracket in brackets {
        let coarse = bisect(g_exact, bracket, BISECT_WIDTH);
        let (lo, hi) = if bracket.lo == bracket.hi {
            (bracket.lo - BISECT_WIDTH, bracket.hi + BISECT_WIDTH)
        } else {
            (bracket.lo, bracket.hi)
        };
        let sigma = newton_polish(
            |sg| {
                let p = curve.eval(sg);
                let dp = curve.deriv(sg);
                let d = p.sub(&gamma_t);
                let l = d.norm();
                if l < 1e-12 {
                    return (f64::NAN, f64::NAN);
                }
                let u = d.scale(1.0 / l);
                let du = dp.sub(&u.scale(u.dot(&dp))).scale(1.0 / l);
                (u.dot(&tau) - c, du.dot(&tau))
            },
            coarse,
            lo,
            hi,
            NEWTON_ITERS,
        );
        if g_exact(sigma).abs() <= CHORD_G_TOL.max(1e3 * f64::EPSILON) {
            roots.push(ChordRoot { sigma, endpoint: curve.eval(sigma) });
        } else {
            // Keep the bisection root: the bracket carries a true sign change
            // even when the defect tolerance is out of reach numerically.
            roots.push(ChordRoot { sigma: coarse, endpoint: curve.eval(coarse) });
        }
    }

    // Deduplicate physically identical chords (same endpoint reached at
    // parameters differing by a period), keeping the representative with the
    // smallest |σ − t|.
    roots.sort_by(|p, q| {
        (p.sigma - t).abs().partial_cmp(&(q.sigma - t).abs()).expect("finite distances")
    });
    let mut unique: Vec<ChordRoot> = Vec::new();
    for root in roots {
        if !unique.iter().any(|u| u.endpoint.distance(&root.endpoint) < RETRACE_TOL) {
            unique.push(root);
        }
    }

    // Exclude the retraced incoming chord unless nothing else exists.
    let retrace = |r: &ChordRoot| r.endpoint.distance(&gamma_s) <= RETRACE_TOL;
    let admissible: Vec<&ChordRoot> = {
        let non_retrace: Vec<&ChordRoot> = unique.iter().filter(|r| !retrace(r)).collect();
        if non_retrace.is_empty() {
            unique.iter().collect()
        } else {
            non_retrace
        }
    };

    let chosen = match policy {
        BranchPolicy::Forward => admissible
            .iter()
            .filter(|r| r.sigma > t)
            .min_by(|p, q| p.sigma.partial_cmp(&q.sigma).expect("finite roots"))
            .copied()
            .ok_or(StepError::NoReflection { t })?,
        BranchPolicy::Nearest => {
            let best = admissible
                .iter()
                .min_by(|p, q| {
                    (p.sigma - t).abs().partial_cmp(&(q.sigma - t).abs()).expect("finite roots")
                })
                .copied()
                .ok_or(StepError::NoReflection { t })?;
            let tie_tol = 1e-10 * (1.0 + (best.sigma - t).abs());
            let tied: Vec<&&ChordRoot> = admissible
                .iter()
                .filter(|r| {
                    ((r.sigma - t).abs() - (best.sigma - t).abs()).abs() <= tie_tol
                        && r.endpoint.distance(&best.endpoint) > RETRACE_TOL
                })
                .collect();
            if let Some(other) = tied.first() {
                return Err(StepError::AmbiguousBranch { lo: best.sigma.min(other.sigma), hi: best.sigma.max(other.sigma) });
            }
            best
        }
    };

    let out = chosen.endpoint.sub(&gamma_t);
    let v_out = out.scale(1.0 / out.norm());
    Ok(WireStep { s_next: chosen.sigma, point: gamma_t, v_in: u_in, v_out })
}

// ─────────────────────────── surface stepping ───────────────────────────

/// Advance a ray to its next impact on the arctan graph surface (within
/// `lambda_max` of ray parameter) and reflect.
pub fn arctan_step(
    surface: &ArctanSurface,
    state: &PhaseState,
    lambda_max: f64,
) -> Result<(Bounce, PhaseState), StepError> {
    use crate::geom::SurfacePatch;
    let psi = |lambda: f64| -> f64 {
        let p = state.x.add_scaled(lambda, &state.v);
        if !surface.contains_param(p[0], p[1]) {
            return f64::NAN;
        }
        p[2] - surface.height(p[0], p[1])
    };
    let brackets = scan_brackets(psi, MIN_ADVANCE, lambda_max, SCAN_CELLS);
    let bracket = *brackets.first().ok_or(StepError::NoIntersection)?;
    let coarse = bisect(psi, bracket, BISECT_WIDTH);
    let (lo, hi) = if bracket.lo == bracket.hi {
        (bracket.lo - BISECT_WIDTH, bracket.hi + BISECT_WIDTH)
    } else {
        (bracket.lo, bracket.hi)
    };
    let lambda = newton_polish(
        |l| {
            let p = state.x.add_scaled(l, &state.v);
            if !surface.contains_param(p[0], p[1]) {
                return (f64::NAN, f64::NAN);
            }
            let (g1, g2) = surface.height_gradient(p[0], p[1]);
            (
                p[2] - surface.height(p[0], p[1]),
                state.v[2] - g1 * state.v[0] - g2 * state.v[1],
            )
        },
        coarse,
        lo,
        hi,
        NEWTON_ITERS,
    );
    let hit = state.x.add_scaled(lambda, &state.v);
    let (u1, u2) = (hit[0], hit[1]);
    if !surface.contains_param(u1, u2) {
        return Err(StepError::OutOfChart { u1, u2 });
    }
    let normal = crate::geom::surface_normal(surface, u1, u2)
        .map_err(|_| StepError::InvalidState { reason: "degenerate surface normal" })?;
    let dot = state.v.dot(&normal);
    if dot.abs() < TANGENTIAL_TOL {
        return Err(StepError::TangentialImpact { dot });
    }
    // Re-seat the impact exactly on the graph to stop height error from
    // accumulating over long orbits.
    let point = surface.eval(u1, u2);
    let v_out = reflect(&state.v, &normal);
    let bounce = Bounce {
        params: vec![u1, u2],
        point: point.clone(),
        v_in: state.v.clone(),
        v_out: v_out.clone(),
    };
    Ok((bounce, PhaseState { x: point, v: v_out }))
}

/// Candidate impact on one quadric patch.
struct PatchHit {
    lambda: f64,
    patch_idx: usize,
    point: VecN,
    edge_distance: f64,
}

/// Advance to the next impact on a piecewise quadric solid and reflect.
pub fn piecewise_step(
    table: &PiecewiseSurfaceTable,
    state: &PhaseState,
) -> Result<(Bounce, PhaseState), StepError> {
    let mut best: Option<PatchHit> = None;
    for (idx, patch) in table.patches().iter().enumerate() {
        let (a, b, c) = patch.quadric.ray_coefficients(&state.x, &state.v);
        for lambda in quadric_roots(a, b, c) {
            if !(lambda.is_finite() && lambda > MIN_ADVANCE) {
                continue;
            }
            // One Newton iteration against this patch's implicit form.
            let lambda = {
                let p = state.x.add_scaled(lambda, &state.v);
                let d = patch.quadric.gradient(&p).dot(&state.v);
                let polished = if d != 0.0 { lambda - patch.quadric.value(&p) / d } else { lambda };
                if polished.is_finite() && polished > MIN_ADVANCE { polished } else { lambda }
            };
            let point = state.x.add_scaled(lambda, &state.v);
            let edge_distance = patch.region.edge_distance(&point);
            if edge_distance < -EDGE_BAND {
                continue; // cleanly outside this patch's validity region
            }
            if best.as_ref().map_or(true, |h| lambda < h.lambda) {
                best = Some(PatchHit { lambda, patch_idx: idx, point, edge_distance });
            }
        }
    }
    let hit = best.ok_or(StepError::NoIntersection)?;
    if hit.edge_distance <= EDGE_BAND {
        return Err(StepError::EdgeImpact { dist: hit.edge_distance });
    }
    let patch: &QuadricPatch = &table.patches()[hit.patch_idx];
    let normal = patch
        .quadric
        .gradient(&hit.point)
        .scale(patch.inward)
        .normalized()
        .map_err(|_| StepError::InvalidState { reason: "degenerate patch normal" })?;
    let dot = state.v.dot(&normal);
    if dot.abs() < TANGENTIAL_TOL {
        return Err(StepError::TangentialImpact { dot });
    }
    let v_out = reflect(&state.v, &normal);
    let bounce = Bounce {
        params: vec![hit.point[1].atan2(hit.point[0]), hit.point[2]],
        point: hit.point.clone(),
        v_in: state.v.clone(),
        v_out: v_out.clone(),
    };
    Ok((bounce, PhaseState { x: hit.point, v: v_out }))
}

// ─────────────────────────── propagation ───────────────────────────

fn orbit_stub(initial: InitialSample, err: StepError) -> Orbit {
    Orbit { initial, bounces: Vec::new(), termination: Some(err) }
}

/// Run up to `n_steps` reflections on any catalog table. Step errors become
/// the orbit's termination flag; the function itself never fails.
pub fn propagate(
    table: &Table,
    initial: &InitialCondition,
    n_steps: usize,
    policy: BranchPolicy,
) -> Orbit {
    match (table, initial) {
        (Table::Wire(wire), InitialCondition::Chord { s, t }) => {
            propagate_wire(wire, *s, *t, n_steps, policy)
        }
        (Table::Wire(_), InitialCondition::Phase { x, v }) => orbit_stub(
            InitialSample { params: Vec::new(), point: x.clone(), dir: v.clone() },
            StepError::InvalidState { reason: "wire tables start from a chord, not a phase point" },
        ),
        (_, InitialCondition::Chord { s, t }) => orbit_stub(
            InitialSample { params: vec![*s, *t], point: VecN::zeros(1), dir: VecN::zeros(1) },
            StepError::InvalidState { reason: "chord initial conditions apply to wire tables only" },
        ),
        (_, InitialCondition::Phase { x, v }) => {
            let state = match PhaseState::new(x.clone(), v.clone()) {
                Ok(s) => s,
                Err(e) => {
                    return orbit_stub(
                        InitialSample { params: Vec::new(), point: x.clone(), dir: v.clone() },
                        e,
                    )
                }
            };
            let initial = InitialSample {
                params: Vec::new(),
                point: state.x.clone(),
                dir: state.v.clone(),
            };
            let inside_check: Option<StepError> = match table {
                Table::Planar(t) => (state.x.dim() != 2 || !t.contains(&state.x, 1e-9))
                    .then_some(StepError::InvalidState {
                        reason: "initial position outside the planar table",
                    }),
                Table::Piecewise(t) => (state.x.dim() != 3 || !t.contains(&state.x, 1e-9))
                    .then_some(StepError::InvalidState {
                        reason: "initial position outside the solid region",
                    }),
                Table::Arctan(_) => (state.x.dim() != 3).then_some(StepError::InvalidState {
                    reason: "surface rays live in three dimensions",
                }),
                Table::Wire(_) => unreachable!("wire handled above"),
            };
            if let Some(err) = inside_check {
                return orbit_stub(initial, err);
            }
            let mut orbit = Orbit { initial, bounces: Vec::new(), termination: None };
            let mut state = state;
            for _ in 0..n_steps {
                let step = match table {
                    Table::Planar(t) => planar_step(t, &state),
                    Table::Arctan(t) => arctan_step(t, &state, SURFACE_RAY_WINDOW),
                    Table::Piecewise(t) => piecewise_step(t, &state),
                    Table::Wire(_) => unreachable!("wire handled above"),
                };
                match step {
                    Ok((bounce, next)) => {
                        orbit.bounces.push(bounce);
                        state = next;
                    }
                    Err(e) => {
                        orbit.termination = Some(e);
                        break;
                    }
                }
            }
            orbit
        }
    }
}

fn propagate_wire(wire: &WireTable, s0: f64, t0: f64, n_steps: usize, policy: BranchPolicy) -> Orbit {
    let curve = wire.curve();
    let start = curve.eval(s0);
    let end = curve.eval(t0);
    let chord = end.sub(&start);
    let len = chord.norm();
    let initial = InitialSample {
        params: vec![s0, t0],
        point: start.clone(),
        dir: if len > 0.0 { chord.scale(1.0 / len) } else { chord.clone() },
    };
    if len <= 1e-12 {
        return orbit_stub(initial, StepError::InvalidChord { s: s0, t: t0 });
    }
    let mut orbit = Orbit { initial, bounces: Vec::new(), termination: None };
    let (mut s, mut t) = (s0, t0);
    for _ in 0..n_steps {
        match wire_step(curve, s, t, policy) {
            Ok(step) => {
                orbit.bounces.push(Bounce {
                    params: vec![t, step.s_next],
                    point: step.point,
                    v_in: step.v_in,
                    v_out: step.v_out,
                });
                (s, t) = (t, step.s_next);
            }
            Err(e) => {
                orbit.termination = Some(e);
                break;
            }
        }
    }
    orbit
}
