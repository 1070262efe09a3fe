//! Numerical verification layer for the planar system: adaptive integration,
//! separatrix shooting, asymptotic-rate regression, first-integral drift and
//! phase-portrait sampling.
//!
//! The integrator is an embedded Dormand-Prince 5(4) pair with PI step
//! control. Everything is plain deterministic floating point: identical
//! inputs produce bit-identical trajectories.

use crate::dynamics::{self, DynParams, Equilibrium};
use crate::error::{Error, Result};

/// How an integration ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    TimeLimit,
    ReachedEquilibrium,
    Escaped,
    LeftHalfPlane,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Termination::TimeLimit => "TimeLimit",
            Termination::ReachedEquilibrium => "ReachedEquilibrium",
            Termination::Escaped => "Escaped",
            Termination::LeftHalfPlane => "LeftHalfPlane",
        };
        write!(f, "{s}")
    }
}

/// A numerically integrated orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Accepted steps as `(t, x, y)`, `t` strictly increasing.
    pub samples: Vec<(f64, f64, f64)>,
    pub tol_used: f64,
    pub steps_accepted: u64,
    pub steps_rejected: u64,
    pub terminated: Termination,
}

impl Trajectory {
    pub fn last_state(&self) -> (f64, f64) {
        let &(_, x, y) = self.samples.last().expect("trajectory is never empty");
        (x, y)
    }

    /// Polygonal arc length of the sample sequence.
    pub fn arc_length(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| {
                let dx = w[1].1 - w[0].1;
                let dy = w[1].2 - w[0].2;
                (dx * dx + dy * dy).sqrt()
            })
            .sum()
    }
}

/// Controls for one integration run.
#[derive(Debug, Clone, Copy)]
pub struct IntegrateOptions {
    pub t_max: f64,
    pub tol: f64,
    /// Distance at which an orbit is declared to have reached an equilibrium.
    pub equilibrium_radius: f64,
    /// Norm at which an orbit is declared escaped.
    pub escape_radius: f64,
    /// Optional cap on the step size (useful to force dense sampling).
    pub max_step: Option<f64>,
}

impl IntegrateOptions {
    pub fn new(t_max: f64, tol: f64) -> Result<Self> {
        if t_max.is_nan() || t_max.is_infinite() || t_max <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "t_max must be positive and finite, got {t_max}"
            )));
        }
        if !(1e-13..=1e-3).contains(&tol) {
            return Err(Error::InvalidParameter(format!(
                "tol must lie in [1e-13, 1e-3], got {tol}"
            )));
        }
        Ok(Self {
            t_max,
            tol,
            equilibrium_radius: 1e-9,
            escape_radius: 1e6,
            max_step: None,
        })
    }

    pub fn with_equilibrium_radius(mut self, r: f64) -> Self {
        self.equilibrium_radius = r;
        self
    }

    pub fn with_escape_radius(mut self, r: f64) -> Self {
        self.escape_radius = r;
        self
    }

    pub fn with_max_step(mut self, h: f64) -> Self {
        self.max_step = Some(h);
        self
    }
}

/// Right-hand side `(x', y') = (y, a_bar x + b_bar y - Q x^alpha)`.
/// The fractional power requires `x >= 0`.
pub fn vector_field(dp: &DynParams, x: f64, y: f64) -> Result<(f64, f64)> {
    if x < 0.0 {
        return Err(Error::Domain(format!(
            "vector field is defined on the half-plane x >= 0 (got x = {x})"
        )));
    }
    Ok(field_unchecked(dp, x, y))
}

/// Same field with the power term continued by zero for `x <= 0`; used by
/// the integrator, whose stages may poke marginally across the axis before
/// the half-plane exit is detected.
fn field_unchecked(dp: &DynParams, x: f64, y: f64) -> (f64, f64) {
    let power = if x > 0.0 { x.powf(dp.alpha) } else { 0.0 };
    (y, dp.a_bar * x + dp.b_bar * y - dp.q_coef * power)
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Error coefficients: 5th-order weights minus the embedded 4th-order ones.
const E1: f64 = B1 - 5179.0 / 57600.0;
const E3: f64 = B3 - 7571.0 / 16695.0;
const E4: f64 = B4 - 393.0 / 640.0;
const E5: f64 = B5 + 92097.0 / 339200.0;
const E6: f64 = B6 - 187.0 / 2100.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_SCALE: f64 = 0.2;
const MAX_SCALE: f64 = 5.0;
// PI controller exponents for a 5th-order error estimate.
const K_ERR: f64 = 0.14;
const K_PREV: f64 = 0.08;

struct Stepper<'a> {
    dp: &'a DynParams,
    sign: f64,
}

impl Stepper<'_> {
    fn f(&self, s: (f64, f64)) -> (f64, f64) {
        let (dx, dy) = field_unchecked(self.dp, s.0, s.1);
        (self.sign * dx, self.sign * dy)
    }

    /// One Dormand-Prince step from `s` with step `h`. Returns the
    /// 5th-order proposal and the error estimate normalized against
    /// `tol (1 + |s|)`.
    fn step(&self, s: (f64, f64), h: f64, tol: f64) -> ((f64, f64), f64) {
        let k1 = self.f(s);
        let k2 = self.f((s.0 + h * A21 * k1.0, s.1 + h * A21 * k1.1));
        let k3 = self.f((
            s.0 + h * (A31 * k1.0 + A32 * k2.0),
            s.1 + h * (A31 * k1.1 + A32 * k2.1),
        ));
        let k4 = self.f((
            s.0 + h * (A41 * k1.0 + A42 * k2.0 + A43 * k3.0),
            s.1 + h * (A41 * k1.1 + A42 * k2.1 + A43 * k3.1),
        ));
        let k5 = self.f((
            s.0 + h * (A51 * k1.0 + A52 * k2.0 + A53 * k3.0 + A54 * k4.0),
            s.1 + h * (A51 * k1.1 + A52 * k2.1 + A53 * k3.1 + A54 * k4.1),
        ));
        let k6 = self.f((
            s.0 + h * (A61 * k1.0 + A62 * k2.0 + A63 * k3.0 + A64 * k4.0 + A65 * k5.0),
            s.1 + h * (A61 * k1.1 + A62 * k2.1 + A63 * k3.1 + A64 * k4.1 + A65 * k5.1),
        ));
        let y5 = (
            s.0 + h * (B1 * k1.0 + B3 * k3.0 + B4 * k4.0 + B5 * k5.0 + B6 * k6.0),
            s.1 + h * (B1 * k1.1 + B3 * k3.1 + B4 * k4.1 + B5 * k5.1 + B6 * k6.1),
        );
        let k7 = self.f(y5);
        let err = (
            h * (E1 * k1.0 + E3 * k3.0 + E4 * k4.0 + E5 * k5.0 + E6 * k6.0 + E7 * k7.0),
            h * (E1 * k1.1 + E3 * k3.1 + E4 * k4.1 + E5 * k5.1 + E6 * k6.1 + E7 * k7.1),
        );
        let sc0 = tol * (1.0 + s.0.abs().max(y5.0.abs()));
        let sc1 = tol * (1.0 + s.1.abs().max(y5.1.abs()));
        let e0 = err.0 / sc0;
        let e1 = err.1 / sc1;
        let err_norm = (0.5 * (e0 * e0 + e1 * e1)).sqrt();
        (y5, err_norm)
    }
}

fn integrate_signed(
    dp: &DynParams,
    init: (f64, f64),
    opts: &IntegrateOptions,
    sign: f64,
) -> Result<Trajectory> {
    if init.0 < 0.0 {
        return Err(Error::Domain(format!(
            "initial state must have x >= 0 (got x = {})",
            init.0
        )));
    }
    let stepper = Stepper { dp, sign };
    let targets: Vec<(f64, f64)> = dynamics::equilibria(dp)
        .iter()
        .map(|eq| eq.location)
        .collect();

    let mut samples = vec![(0.0, init.0, init.1)];
    let mut accepted: u64 = 0;
    let mut rejected: u64 = 0;

    let near_equilibrium = |s: (f64, f64), r: f64| {
        targets
            .iter()
            .any(|&(ex, ey)| ((s.0 - ex).powi(2) + (s.1 - ey).powi(2)).sqrt() < r)
    };

    if near_equilibrium(init, opts.equilibrium_radius) {
        return Ok(Trajectory {
            samples,
            tol_used: opts.tol,
            steps_accepted: 0,
            steps_rejected: 0,
            terminated: Termination::ReachedEquilibrium,
        });
    }

    let mut t = 0.0;
    let mut state = init;
    // deterministic initial step guess
    let f0 = stepper.f(state);
    let norm_s = (state.0 * state.0 + state.1 * state.1).sqrt();
    let norm_f = (f0.0 * f0.0 + f0.1 * f0.1).sqrt();
    let mut h = (0.01 * (1.0 + norm_s) / (1.0 + norm_f))
        .min(opts.t_max / 10.0)
        .max(1e-10);
    if let Some(cap) = opts.max_step {
        h = h.min(cap);
    }
    let mut err_prev: f64 = 1.0;
    let h_floor = 1e-14 * opts.t_max;

    loop {
        let remaining = opts.t_max - t;
        // a remaining span below the step floor is the end of the run, not
        // a stiffness failure
        if remaining <= h_floor {
            return Ok(Trajectory {
                samples,
                tol_used: opts.tol,
                steps_accepted: accepted,
                steps_rejected: rejected,
                terminated: Termination::TimeLimit,
            });
        }
        if h < h_floor {
            return Err(Error::StepUnderflow { t, h });
        }
        let mut h_step = h.min(remaining);
        if let Some(cap) = opts.max_step {
            h_step = h_step.min(cap);
        }

        let (proposal, err) = stepper.step(state, h_step, opts.tol);
        if !(proposal.0.is_finite() && proposal.1.is_finite()) {
            // treat a non-finite proposal as a hard rejection
            rejected += 1;
            h = h_step * MIN_SCALE;
            continue;
        }
        if err <= 1.0 {
            t += h_step;
            state = proposal;
            accepted += 1;
            samples.push((t, state.0, state.1));

            let grow = SAFETY * err.max(1e-10).powf(-K_ERR) * err_prev.max(1e-10).powf(K_PREV);
            h = h_step * grow.clamp(MIN_SCALE, MAX_SCALE);
            err_prev = err.max(1e-10);

            if state.0 < 0.0 {
                return Ok(Trajectory {
                    samples,
                    tol_used: opts.tol,
                    steps_accepted: accepted,
                    steps_rejected: rejected,
                    terminated: Termination::LeftHalfPlane,
                });
            }
            let norm = (state.0 * state.0 + state.1 * state.1).sqrt();
            if norm > opts.escape_radius {
                return Ok(Trajectory {
                    samples,
                    tol_used: opts.tol,
                    steps_accepted: accepted,
                    steps_rejected: rejected,
                    terminated: Termination::Escaped,
                });
            }
            if near_equilibrium(state, opts.equilibrium_radius) {
                return Ok(Trajectory {
                    samples,
                    tol_used: opts.tol,
                    steps_accepted: accepted,
                    steps_rejected: rejected,
                    terminated: Termination::ReachedEquilibrium,
                });
            }
        } else {
            rejected += 1;
            let shrink = SAFETY * err.powf(-0.2);
            h = h_step * shrink.clamp(MIN_SCALE, 1.0);
        }
    }
}

/// Integrate the system forward from `init` until a termination condition
/// fires.
pub fn integrate(dp: &DynParams, init: (f64, f64), opts: &IntegrateOptions) -> Result<Trajectory> {
    integrate_signed(dp, init, opts, 1.0)
}

/// Integrate the time-reversed system (field negated) forward from `init`.
/// Sample times are the reversed-flow times, still increasing.
pub fn integrate_backward(
    dp: &DynParams,
    init: (f64, f64),
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    integrate_signed(dp, init, opts, -1.0)
}

/// Launch a trajectory a small offset along one eigendirection of an
/// equilibrium, approximating the local invariant manifold.
///
/// `direction` indexes the equilibrium's real eigenpairs (0 = smaller
/// eigenvalue). `negate_offset` picks the opposite ray. For an unstable
/// direction pass `backward = true`: the field is negated so the unstable
/// manifold is traced as a decaying orbit.
pub fn shoot_separatrix(
    dp: &DynParams,
    eq: &Equilibrium,
    direction: usize,
    negate_offset: bool,
    offset: f64,
    backward: bool,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    if !(1e-8..=1e-2).contains(&offset) {
        return Err(Error::InvalidParameter(format!(
            "offset must lie in [1e-8, 1e-2], got {offset}"
        )));
    }
    let pairs = eq.real_eigenpairs();
    let (_, v) = pairs.get(direction).ok_or_else(|| {
        Error::InvalidParameter(format!(
            "equilibrium has {} real eigendirections; requested index {direction}",
            pairs.len()
        ))
    })?;
    let sgn = if negate_offset { -1.0 } else { 1.0 };
    let init = (
        eq.location.0 + sgn * offset * v[0],
        eq.location.1 + sgn * offset * v[1],
    );
    if backward {
        integrate_backward(dp, init, opts)
    } else {
        integrate(dp, init, opts)
    }
}

/// Least-squares fit of an asymptotic decay rate.
#[derive(Debug, Clone, Copy)]
pub struct ExponentFit {
    /// Slope of `ln || w(t) - w_eq ||` against `t`.
    pub rate: f64,
    pub r_squared: f64,
    /// True when the fit used the peak envelope instead of raw samples
    /// (oscillatory decay toward a focus).
    pub used_envelope: bool,
    pub samples_used: usize,
}

/// Estimate the decay rate toward `eq` from the samples inside the window
/// `t in [window.0, window.1]`.
///
/// Monotone decay is fitted directly. If the distance is not monotone the
/// decay is oscillatory and the raw regression is meaningless; in that case
/// the sequence of local maxima of the log-distance is fitted instead.
pub fn estimate_exponent(
    traj: &Trajectory,
    window: (f64, f64),
    eq: (f64, f64),
) -> Result<ExponentFit> {
    const MIN_SAMPLES: usize = 20;
    let pts: Vec<(f64, f64)> = traj
        .samples
        .iter()
        .filter(|&&(t, _, _)| t >= window.0 && t <= window.1)
        .filter_map(|&(t, x, y)| {
            let r = ((x - eq.0).powi(2) + (y - eq.1).powi(2)).sqrt();
            (r > 0.0).then(|| (t, r.ln()))
        })
        .collect();
    if pts.len() < MIN_SAMPLES {
        return Err(Error::InsufficientSamples {
            found: pts.len(),
            required: MIN_SAMPLES,
        });
    }

    let monotone = pts
        .windows(2)
        .all(|w| w[1].1 <= w[0].1 + 1e-9 * w[0].1.abs().max(1.0));
    let (fit_pts, used_envelope) = if monotone {
        (pts.clone(), false)
    } else {
        let mut peaks = Vec::new();
        for i in 1..pts.len() - 1 {
            if pts[i].1 > pts[i - 1].1 && pts[i].1 >= pts[i + 1].1 {
                peaks.push(pts[i]);
            }
        }
        if peaks.len() >= 4 {
            (peaks, true)
        } else {
            (pts.clone(), false)
        }
    };

    let n = fit_pts.len() as f64;
    let sx: f64 = fit_pts.iter().map(|p| p.0).sum();
    let sy: f64 = fit_pts.iter().map(|p| p.1).sum();
    let sxx: f64 = fit_pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = fit_pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        return Err(Error::InsufficientSamples {
            found: fit_pts.len(),
            required: MIN_SAMPLES,
        });
    }
    let rate = (n * sxy - sx * sy) / denom;
    let intercept = (sy - rate * sx) / n;
    let mean_y = sy / n;
    let ss_tot: f64 = fit_pts.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = fit_pts
        .iter()
        .map(|p| (p.1 - (intercept + rate * p.0)).powi(2))
        .sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    Ok(ExponentFit {
        rate,
        r_squared,
        used_envelope,
        samples_used: fit_pts.len(),
    })
}

/// Maximum relative drift of the first integral along a trajectory of the
/// critical system. The drift is normalized by `max(|I_0|, scale)` where
/// `scale` is the interior-equilibrium energy when it exists (the natural
/// energy scale; the homoclinic level is exactly zero) and `1` otherwise.
pub fn hamiltonian_drift(dp: &DynParams, traj: &Trajectory) -> Result<f64> {
    let (t0, x0, y0) = traj.samples[0];
    debug_assert_eq!(t0, 0.0);
    let i0 = dynamics::first_integral(dp, x0, y0)?;
    let scale = dynamics::first_integral_at_w2(dp)
        .map(|e| e.abs())
        .unwrap_or(1.0)
        .max(i0.abs());
    let mut max_drift: f64 = 0.0;
    for &(_, x, y) in &traj.samples {
        let i = dynamics::first_integral(dp, x.max(0.0), y)?;
        max_drift = max_drift.max((i - i0).abs());
    }
    Ok(max_drift / scale)
}

/// Times at which the trajectory crosses `y = 0` upward, located by linear
/// interpolation between samples. For an orbit around the interior center
/// consecutive upcrossings delimit one period.
pub fn y_upcrossings(traj: &Trajectory) -> Vec<f64> {
    let mut times = Vec::new();
    for w in traj.samples.windows(2) {
        let (t0, _, y0) = w[0];
        let (t1, _, y1) = w[1];
        if y0 < 0.0 && y1 >= 0.0 {
            let frac = y0 / (y0 - y1);
            times.push(t0 + frac * (t1 - t0));
        }
    }
    times
}

/// Grid of seed states for a portrait run.
#[derive(Debug, Clone, Copy)]
pub struct PortraitSpec {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub nx: u32,
    pub ny: u32,
    pub t_max: f64,
    pub tol: f64,
}

impl PortraitSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.x_range.0 <= self.x_range.1 && self.y_range.0 <= self.y_range.1) {
            return Err(Error::InvalidParameter(
                "portrait ranges must be nonempty intervals".to_string(),
            ));
        }
        for v in [
            self.x_range.0,
            self.x_range.1,
            self.y_range.0,
            self.y_range.1,
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(
                    "portrait ranges must be finite".to_string(),
                ));
            }
        }
        if self.t_max.is_nan() || self.t_max <= 0.0 || !(1e-13..=1e-3).contains(&self.tol) {
            return Err(Error::InvalidParameter(
                "portrait needs t_max > 0 and tol in [1e-13, 1e-3]".to_string(),
            ));
        }
        Ok(())
    }
}

/// One seeded trajectory of a portrait run; failures are recorded per seed
/// rather than aborting the sweep.
#[derive(Debug, Clone)]
pub struct PortraitTrajectory {
    pub seed: (f64, f64),
    pub result: std::result::Result<Trajectory, Error>,
}

fn linspace(lo: f64, hi: f64, n: u32) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n)
            .map(|k| lo + f64::from(k) * (hi - lo) / f64::from(n - 1))
            .collect(),
    }
}

/// Integrate one trajectory per grid seed, in row-major seed order
/// (x outer, y inner), skipping seeds with `x < 0`. Deterministic for fixed
/// inputs.
pub fn sample_portrait(dp: &DynParams, spec: &PortraitSpec) -> Result<Vec<PortraitTrajectory>> {
    spec.validate()?;
    let opts = IntegrateOptions::new(spec.t_max, spec.tol)?;
    let mut out = Vec::new();
    for &x in &linspace(spec.x_range.0, spec.x_range.1, spec.nx) {
        if x < 0.0 {
            continue;
        }
        for &y in &linspace(spec.y_range.0, spec.y_range.1, spec.ny) {
            let result = integrate(dp, (x, y), &opts);
            out.push(PortraitTrajectory {
                seed: (x, y),
                result,
            });
        }
    }
    Ok(out)
}
