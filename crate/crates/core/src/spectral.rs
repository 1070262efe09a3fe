//! Mode-by-mode analysis of the linear problem on the cone.
//!
//! Separating variables over `S^p x S^q` turns the linear equation into a
//! family of radial ODEs indexed by a pair of sphere-eigenvalue indices
//! `(i, j)`:
//!
//! ```text
//! u'' + (n-1)/l u' + [ Q1 - K_ij / l^2 ] u = 0
//! ```
//!
//! with coupling constant `K_ij`. Near the tip the equation is Euler-type;
//! its indicial roots `nu_minus <= nu_plus` set the possible power-law
//! behaviors, and a power series on the `nu_plus` branch solves the equation
//! to all orders. Membership of either branch in the weighted Sobolev scale
//! follows from the exponent rule implemented by [`sobolev_verdict`].

use crate::error::{Error, Result};
use crate::geometry::{self, CaseSign, ConeParams};

/// Discriminant threshold below which the two indicial roots are treated as
/// a double root (the two-solution power basis degenerates).
pub const DOUBLE_ROOT_TOL: f64 = 1e-14;

/// Threshold on the recursion denominator; smaller magnitudes are reported
/// as a resonance instead of silently dividing.
pub const SINGULAR_DENOMINATOR_TOL: f64 = 1e-13;

/// Default series truncation; with the factorial-type denominator growth
/// the dropped tail is below 1e-15 once `Q1 * l^2 <= 1`.
pub const DEFAULT_TRUNCATION: usize = 25;

/// One Fourier mode `(i, j)` with its spectral data.
#[derive(Debug, Clone, Copy)]
pub struct SpectralMode {
    pub i: u32,
    pub j: u32,
    /// `i`-th distinct eigenvalue of the Laplacian on the unit `S^p`.
    pub lambda_p: f64,
    /// `j`-th distinct eigenvalue of the Laplacian on the unit `S^q`.
    pub lambda_q: f64,
    pub coupling: f64,
    pub nu_minus: f64,
    pub nu_plus: f64,
}

/// Truncated power-series solution `l^nu * sum_m a_{2m} l^{2m}` on the
/// `nu_plus` branch. Odd coefficients vanish identically and are not stored.
#[derive(Debug, Clone)]
pub struct SeriesSolution {
    pub nu: f64,
    pub q1: f64,
    /// `a_0, a_2, ..., a_{2M}`.
    pub coeffs: Vec<f64>,
    pub truncation_m: usize,
}

/// Membership of a power-law profile `u ~ l^q` in the weighted Sobolev
/// scale: order `k` membership holds iff `k < q + n/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevVerdict {
    pub exponent_q: f64,
    /// Largest order `k` with `k < q + n/2`; `-1` means not even `L_2`.
    pub max_order: i32,
    pub in_l2: bool,
    pub in_h1: bool,
    pub in_h2: bool,
}

/// Verdicts for the two indicial branches of one mode.
#[derive(Debug, Clone, Copy)]
pub struct ModeMembership {
    pub plus_branch: SobolevVerdict,
    pub minus_branch: SobolevVerdict,
}

/// Outcome of the positivity analysis of the quadratic form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositivityClass {
    PositiveDefinite,
    ConditionallyPositive,
    Indefinite,
    Unknown,
}

impl std::fmt::Display for PositivityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PositivityClass::PositiveDefinite => "PositiveDefinite",
            PositivityClass::ConditionallyPositive => "ConditionallyPositive",
            PositivityClass::Indefinite => "Indefinite",
            PositivityClass::Unknown => "Unknown",
        };
        write!(f, "{s}")
    }
}

/// Coupling constant of mode `(i, j)`:
/// `K_ij = (n-2)/(4(n-1)) * lambda + 2 lambda_i^p / r_p^2 + 2 lambda_j^q / r_q^2`.
pub fn coupling_constant(cone: &ConeParams, i: u32, j: u32) -> f64 {
    let n = f64::from(cone.n());
    let lambda = geometry::lambda_factor(cone);
    (n - 2.0) / (4.0 * (n - 1.0)) * lambda
        + 2.0 * geometry::sphere_eigenvalue(cone.p(), i) / (cone.r_p() * cone.r_p())
        + 2.0 * geometry::sphere_eigenvalue(cone.q(), j) / (cone.r_q() * cone.r_q())
}

/// Alternate evaluation through `mu^2`:
/// `K_ij = 2 lambda_i^p / r_p^2 + 2 lambda_j^q / r_q^2 + (n-2)^2 (mu^2 - 1) / 4`.
pub fn coupling_constant_rewritten(cone: &ConeParams, i: u32, j: u32) -> f64 {
    let n = f64::from(cone.n());
    let mu_sq = geometry::mu_squared_from_lambda(geometry::lambda_factor(cone), cone.n());
    2.0 * geometry::sphere_eigenvalue(cone.p(), i) / (cone.r_p() * cone.r_p())
        + 2.0 * geometry::sphere_eigenvalue(cone.q(), j) / (cone.r_q() * cone.r_q())
        + (n - 2.0) * (n - 2.0) * (mu_sq - 1.0) / 4.0
}

/// Indicial roots `nu = -(n-2)/2 +- sqrt(((n-2)/2)^2 + K_ij)` of the Euler
/// part of the mode equation, returned as `(nu_minus, nu_plus)`.
pub fn indicial_exponents(cone: &ConeParams, i: u32, j: u32) -> Result<(f64, f64)> {
    let k = coupling_constant(cone, i, j);
    indicial_from_coupling(k, cone.n())
}

/// Indicial roots from a raw coupling constant.
pub fn indicial_from_coupling(k: f64, n: u32) -> Result<(f64, f64)> {
    let half = (f64::from(n) - 2.0) / 2.0;
    let disc = half * half + k;
    if disc < DOUBLE_ROOT_TOL {
        return Err(Error::DegenerateRoots {
            discriminant: disc,
            tolerance: DOUBLE_ROOT_TOL,
        });
    }
    let root = disc.sqrt();
    Ok((-half - root, -half + root))
}

/// Assemble the full spectral data of one mode.
pub fn spectral_mode(cone: &ConeParams, i: u32, j: u32) -> Result<SpectralMode> {
    let coupling = coupling_constant(cone, i, j);
    let (nu_minus, nu_plus) = indicial_from_coupling(coupling, cone.n())?;
    Ok(SpectralMode {
        i,
        j,
        lambda_p: geometry::sphere_eigenvalue(cone.p(), i),
        lambda_q: geometry::sphere_eigenvalue(cone.q(), j),
        coupling,
        nu_minus,
        nu_plus,
    })
}

/// Build the even-coefficient recursion
/// `a_{m+2} = -Q1 a_m / ((m+2)(2 nu + m + n))` for even `m`, starting from
/// `a_0`. Valid when `nu` is an indicial root, which is what collapses the
/// quadratic denominator to the product form.
pub fn series_coefficients(
    nu: f64,
    n: u32,
    q1: f64,
    a0: f64,
    truncation_m: usize,
) -> Result<SeriesSolution> {
    let nf = f64::from(n);
    let mut coeffs = Vec::with_capacity(truncation_m + 1);
    coeffs.push(a0);
    let mut a = a0;
    for t in 0..truncation_m {
        let m = (2 * t) as f64;
        let denom = (m + 2.0) * (2.0 * nu + m + nf);
        if denom.abs() < SINGULAR_DENOMINATOR_TOL {
            return Err(Error::SingularDenominator {
                m: 2 * t,
                value: denom,
            });
        }
        a = -q1 * a / denom;
        coeffs.push(a);
    }
    Ok(SeriesSolution {
        nu,
        q1,
        coeffs,
        truncation_m,
    })
}

impl SeriesSolution {
    /// Value together with first and second radial derivatives at `ell`,
    /// by termwise differentiation of the stored truncation.
    pub fn eval_with_derivatives(&self, ell: f64) -> (f64, f64, f64) {
        let mut u = 0.0;
        let mut du = 0.0;
        let mut ddu = 0.0;
        for (m_half, &a) in self.coeffs.iter().enumerate() {
            let s = self.nu + 2.0 * m_half as f64;
            let pow = ell.powf(s);
            u += a * pow;
            du += a * s * pow / ell;
            ddu += a * s * (s - 1.0) * pow / (ell * ell);
        }
        (u, du, ddu)
    }
}

/// Evaluate the truncated series at `ell`. Guarded to the range
/// `Q1 * ell^2 <= 4` where the factorial denominators make the dropped tail
/// negligible; outside it the truncation error is not controlled.
pub fn eval_series(sol: &SeriesSolution, ell: f64) -> Result<f64> {
    if ell.is_nan() || ell <= 0.0 {
        return Err(Error::Domain(format!(
            "series evaluation needs ell > 0 (got {ell})"
        )));
    }
    if sol.q1 * ell * ell > 4.0 {
        return Err(Error::Domain(format!(
            "ell = {ell} outside the convergence-safe range Q1 * ell^2 <= 4 (Q1 = {})",
            sol.q1
        )));
    }
    // Horner in ell^2 for the bracketed polynomial, then the leading power.
    let e2 = ell * ell;
    let mut acc = 0.0;
    for &a in sol.coeffs.iter().rev() {
        acc = acc * e2 + a;
    }
    Ok(ell.powf(sol.nu) * acc)
}

/// Residual of the radial mode operator
/// `u'' + (n-1)/l u' + (Q1 - K/l^2) u` applied to a truncated series.
///
/// For an exact-arithmetic truncation this is the single leftover monomial
/// `Q1 a_{2M} l^{nu+2M}`; in floating point the value is additionally noisy
/// at roughly `eps * K * a_0 * l^{nu-2}`, which limits how small a residual
/// can be observed. Exposed for the verification suites.
pub fn series_ode_residual(sol: &SeriesSolution, k: f64, n: u32, ell: f64) -> f64 {
    let (u, du, ddu) = sol.eval_with_derivatives(ell);
    ddu + (f64::from(n) - 1.0) / ell * du + (sol.q1 - k / (ell * ell)) * u
}

/// Membership of `u ~ l^q` in the weighted scale: order `k` iff `k < q + n/2`.
pub fn sobolev_verdict(exponent_q: f64, n: u32) -> SobolevVerdict {
    let threshold = exponent_q + f64::from(n) / 2.0;
    // Largest integer k with k < threshold (strict).
    let max_order = if threshold > 0.0 {
        let ceil = threshold.ceil();
        let k = if ceil == threshold {
            threshold - 1.0
        } else {
            ceil - 1.0
        };
        k as i32
    } else {
        -1
    };
    SobolevVerdict {
        exponent_q,
        max_order: max_order.max(-1),
        in_l2: 0.0 < threshold,
        in_h1: 1.0 < threshold,
        in_h2: 2.0 < threshold,
    }
}

/// Verdicts for both indicial branches of mode `(i, j)`.
///
/// The plus branch is always first-order admissible and is second-order
/// admissible exactly in the plus case of the dichotomy; the minus branch is
/// never first-order admissible and is square-integrable exactly in the
/// minus case.
pub fn mode_membership_report(cone: &ConeParams, i: u32, j: u32) -> Result<ModeMembership> {
    let mode = spectral_mode(cone, i, j)?;
    Ok(ModeMembership {
        plus_branch: sobolev_verdict(mode.nu_plus, cone.n()),
        minus_branch: sobolev_verdict(mode.nu_minus, cone.n()),
    })
}

/// All modes with `K_ij <= 0` inside the `(0..=i_max, 0..=j_max)` window,
/// in lexicographic order.
///
/// `K_ij` is strictly increasing in each index, so the scan stops early:
/// once a row starts positive every later row is positive too.
pub fn negative_modes(cone: &ConeParams, i_max: u32, j_max: u32) -> Vec<(u32, u32, f64)> {
    let mut out = Vec::new();
    for i in 0..=i_max {
        let row_head = coupling_constant(cone, i, 0);
        if row_head > 0.0 {
            break;
        }
        for j in 0..=j_max {
            let k = coupling_constant(cone, i, j);
            if k > 0.0 {
                break;
            }
            out.push((i, j, k));
        }
    }
    out
}

/// Positivity classification of the quadratic form.
///
/// * `lambda > 0`: positive definite outright.
/// * `lambda <= 0` with `K_10 > 0` and `K_01 > 0`: positivity is decided by
///   the sign of the total-curvature integral, which lives on data this
///   library does not model; the caller supplies it as a flag.
/// * anything else: undecided here.
pub fn positivity_report(cone: &ConeParams, integral_r_positive: bool) -> PositivityClass {
    let lambda = geometry::lambda_factor(cone);
    if lambda > 0.0 {
        return PositivityClass::PositiveDefinite;
    }
    let k10 = coupling_constant(cone, 1, 0);
    let k01 = coupling_constant(cone, 0, 1);
    if k10 > 0.0 && k01 > 0.0 {
        if integral_r_positive {
            PositivityClass::ConditionallyPositive
        } else {
            PositivityClass::Indefinite
        }
    } else {
        PositivityClass::Unknown
    }
}

/// Plus/minus sign of the strict inequality that separates the branches of
/// mode `(i, j)`: compares
/// `mu^2 + 8/(n-2)^2 (lambda_i^p / r_p^2 + lambda_j^q / r_q^2)` against
/// `4/(n-2)^2`. For `(0, 0)` this is exactly the cone dichotomy.
pub fn mode_case_sign(cone: &ConeParams, i: u32, j: u32) -> CaseSign {
    let n = f64::from(cone.n());
    let half_sq = (n - 2.0) * (n - 2.0) / 4.0;
    let lhs = geometry::mu_squared(cone)
        + (geometry::sphere_eigenvalue(cone.p(), i) / (cone.r_p() * cone.r_p())
            + geometry::sphere_eigenvalue(cone.q(), j) / (cone.r_q() * cone.r_q()))
            * 2.0
            / half_sq;
    crate::geometry::case_sign_from_comparison(lhs, 1.0 / half_sq)
}
