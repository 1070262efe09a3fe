//! Closed-form geometry of the metric cone over a product of round spheres
//! `S^p(r_p) x S^q(r_q)`.
//!
//! The cone sits in `R^{n+1}` with `n = p + q + 1`. All geometric content
//! needed downstream reduces to a handful of constants: the curvature factor
//! `lambda` (scalar curvature is `lambda / l^2` at cone distance `l`), the
//! derived parameter `mu^2 = 1 + lambda / ((n-1)(n-2))`, the radial volume
//! density, and the eigenvalues of the sphere Laplacians. Everything here is
//! a pure function of the cone parameters.

use crate::error::{Error, Result};

/// Relative tolerance used to call the plus/minus dichotomy a tie.
pub const CASE_SIGN_REL_TOL: f64 = 1e-12;

/// Parameters of the cone over `S^p(r_p) x S^q(r_q)`.
///
/// Invariants enforced on construction: `p, q >= 1`, radii positive and
/// finite. The ambient dimension `n = p + q + 1` is then automatically `>= 3`.
/// Several classification results downstream are only proved for `n >= 5`;
/// [`ConeParams::dimension_warning`] reports that situation without
/// forbidding it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeParams {
    p: u32,
    q: u32,
    r_p: f64,
    r_q: f64,
}

impl ConeParams {
    pub fn new(p: u32, q: u32, r_p: f64, r_q: f64) -> Result<Self> {
        if p < 1 || q < 1 {
            return Err(Error::InvalidParameter(format!(
                "sphere dimensions must satisfy p >= 1 and q >= 1 (got p = {p}, q = {q})"
            )));
        }
        for (name, r) in [("r_p", r_p), ("r_q", r_q)] {
            if r.is_nan() || r.is_infinite() || r <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "radius {name} must be a positive finite real (got {r})"
                )));
            }
        }
        Ok(Self { p, q, r_p, r_q })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn r_p(&self) -> f64 {
        self.r_p
    }

    pub fn r_q(&self) -> f64 {
        self.r_q
    }

    /// Ambient dimension `n = p + q + 1`.
    pub fn n(&self) -> u32 {
        self.p + self.q + 1
    }

    /// Some membership statements assume `n >= 5`; warn but do not forbid.
    pub fn dimension_warning(&self) -> Option<String> {
        if self.n() < 5 {
            Some(format!(
                "n = {} < 5: Sobolev classification results assume n >= 5 and are \
                 reported on an as-is basis",
                self.n()
            ))
        } else {
            None
        }
    }
}

/// Which side of the structural dichotomy a cone falls on.
///
/// `Plus` means `p(p-1)/r_p^2 + q(q-1)/r_q^2 > 2(n-1)/(n-2)` strictly,
/// `Minus` the reverse strict inequality, `Boundary` a tie within relative
/// tolerance [`CASE_SIGN_REL_TOL`]. Equivalently `Plus <=> mu > 2/(n-2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseSign {
    Plus,
    Minus,
    Boundary,
}

impl std::fmt::Display for CaseSign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CaseSign::Plus => write!(f, "Plus"),
            CaseSign::Minus => write!(f, "Minus"),
            CaseSign::Boundary => write!(f, "Boundary"),
        }
    }
}

/// Headline constants of a cone, bundled for reporting.
#[derive(Debug, Clone, Copy)]
pub struct GeometrySummary {
    pub lambda: f64,
    pub mu_sq: f64,
    pub mu: f64,
    pub case: CaseSign,
    pub n: u32,
}

/// Curvature factor in its defining form:
/// `lambda = p(p-1)(2 - r_p^2)/r_p^2 + q(q-1)(2 - r_q^2)/r_q^2 - 2pq`.
pub fn lambda_factor(cone: &ConeParams) -> f64 {
    let p = f64::from(cone.p);
    let q = f64::from(cone.q);
    let rp2 = cone.r_p * cone.r_p;
    let rq2 = cone.r_q * cone.r_q;
    p * (p - 1.0) * (2.0 - rp2) / rp2 + q * (q - 1.0) * (2.0 - rq2) / rq2 - 2.0 * p * q
}

/// The same constant rewritten against the ambient dimension:
/// `lambda = -(n-1)(n-2) + 2 [ p(p-1)/r_p^2 + q(q-1)/r_q^2 ]`.
///
/// Kept as an independent evaluation route; the identity suite checks the
/// two forms agree to a few ulps.
pub fn lambda_factor_rewritten(cone: &ConeParams) -> f64 {
    let n = f64::from(cone.n());
    -(n - 1.0) * (n - 2.0) + 2.0 * sphere_curvature_sum(cone)
}

/// `p(p-1)/r_p^2 + q(q-1)/r_q^2`, the quantity the plus/minus dichotomy and
/// `mu^2` are built from.
pub fn sphere_curvature_sum(cone: &ConeParams) -> f64 {
    let p = f64::from(cone.p);
    let q = f64::from(cone.q);
    p * (p - 1.0) / (cone.r_p * cone.r_p) + q * (q - 1.0) / (cone.r_q * cone.r_q)
}

/// `mu^2`, evaluated in the manifestly nonnegative form
/// `2 [ p(p-1)/r_p^2 + q(q-1)/r_q^2 ] / ((n-1)(n-2))`.
///
/// Identical (as an algebraic identity, via `p(p-1) + q(q-1) + 2pq =
/// (n-1)(n-2)`) to `1 + lambda / ((n-1)(n-2))`. Strictly positive whenever
/// one sphere factor has dimension at least two; the edge cone `p = q = 1`
/// has `mu = 0` exactly and its indicial roots collapse.
pub fn mu_squared(cone: &ConeParams) -> f64 {
    let n = f64::from(cone.n());
    2.0 * sphere_curvature_sum(cone) / ((n - 1.0) * (n - 2.0))
}

/// `mu^2` through the curvature factor, the second evaluation route.
pub fn mu_squared_from_lambda(lambda: f64, n: u32) -> f64 {
    let n = f64::from(n);
    1.0 + lambda / ((n - 1.0) * (n - 2.0))
}

/// Scalar curvature of the cone metric at distance `ell` from the tip.
pub fn scalar_curvature(cone: &ConeParams, ell: f64) -> Result<f64> {
    if ell.is_nan() || ell <= 0.0 {
        return Err(Error::Domain(format!(
            "scalar curvature blows up at the tip; need ell > 0 (got {ell})"
        )));
    }
    Ok(lambda_factor(cone) / (ell * ell))
}

/// Radial factor of the volume density, `r_p^p r_q^q ell^{n-1} / 2^{(n-1)/2}`.
/// The angular sphere measures are excluded by contract.
pub fn volume_density(cone: &ConeParams, ell: f64) -> Result<f64> {
    if ell.is_nan() || ell <= 0.0 {
        return Err(Error::Domain(format!(
            "volume density is defined for ell > 0 (got {ell})"
        )));
    }
    let n = f64::from(cone.n());
    let radial = cone.r_p.powi(cone.p as i32) * cone.r_q.powi(cone.q as i32);
    Ok(radial * ell.powf(n - 1.0) / 2f64.powf((n - 1.0) / 2.0))
}

/// `k`-th distinct eigenvalue of the Laplacian on the unit sphere `S^dim`:
/// `k (k + dim - 1)`. Multiplicities are deliberately not tracked; no
/// downstream formula needs them.
pub fn sphere_eigenvalue(dim: u32, k: u32) -> f64 {
    let k = f64::from(k);
    k * (k + f64::from(dim) - 1.0)
}

/// The curvature factor as a function of a real-valued `p` with `n` fixed
/// (`q = n - 1 - p`), in the upward-opening quadratic form.
pub fn lambda_of_real_p(n: u32, r_p: f64, r_q: f64, p: f64) -> f64 {
    let n = f64::from(n);
    let ip2 = 1.0 / (r_p * r_p);
    let iq2 = 1.0 / (r_q * r_q);
    2.0 * p * p * (ip2 + iq2) - 2.0 * p * ((ip2 + iq2) + 2.0 * (n - 2.0) * iq2)
        + (n - 1.0) * (n - 2.0) * (2.0 * iq2 - 1.0)
}

/// Extremal analysis of `lambda(p)` over real `p` with `n` fixed.
#[derive(Debug, Clone, Copy)]
pub struct LambdaExtrema {
    /// Continuous minimiser of `lambda(p)`.
    pub p_min: f64,
    /// `q` at the minimiser, `(n-1) - p_min`.
    pub q_min: f64,
    /// Value at the minimiser.
    pub lambda_min: f64,
    /// Endpoint value at `p = 1`.
    pub lambda_p1: f64,
    /// Endpoint value at `p = n - 2`.
    pub lambda_pn2: f64,
}

/// Minimiser and endpoint values of `lambda(p)` treating `p` as real.
///
/// `p_min = 1/2 + (n-2)/(1 + r_q^2/r_p^2)`, which always lies in
/// `(1/2, n - 3/2)`, and
/// `lambda(p_min) = -(n-1)(n-2) - (r_p^{-2} + r_q^{-2})/2 + 2(n-2)^2/(r_p^2 + r_q^2)`.
pub fn lambda_extrema(n: u32, r_p: f64, r_q: f64) -> Result<LambdaExtrema> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "extremal analysis needs n >= 3 (got {n})"
        )));
    }
    if r_p.is_nan() || r_q.is_nan() || r_p <= 0.0 || r_q <= 0.0 {
        return Err(Error::InvalidParameter(
            "radii must be positive".to_string(),
        ));
    }
    let nf = f64::from(n);
    let p_min = 0.5 + (nf - 2.0) / (1.0 + (r_q * r_q) / (r_p * r_p));
    let q_min = (nf - 1.0) - p_min;
    let lambda_min = -(nf - 1.0) * (nf - 2.0) - 0.5 * (1.0 / (r_p * r_p) + 1.0 / (r_q * r_q))
        + 2.0 * (nf - 2.0) * (nf - 2.0) / (r_p * r_p + r_q * r_q);
    let lambda_p1 = -(nf - 1.0) * (nf - 2.0) + (nf - 2.0) * (nf - 3.0) * 2.0 / (r_q * r_q);
    let lambda_pn2 = -(nf - 1.0) * (nf - 2.0) + (nf - 2.0) * (nf - 3.0) * 2.0 / (r_p * r_p);
    Ok(LambdaExtrema {
        p_min,
        q_min,
        lambda_min,
        lambda_p1,
        lambda_pn2,
    })
}

/// Classify the cone by the strict inequality
/// `p(p-1)/r_p^2 + q(q-1)/r_q^2 >< 2(n-1)/(n-2)`, with ties (relative
/// tolerance `1e-12`) reported as `Boundary`.
pub fn case_sign(cone: &ConeParams) -> CaseSign {
    let lhs = sphere_curvature_sum(cone);
    let n = f64::from(cone.n());
    let rhs = 2.0 * (n - 1.0) / (n - 2.0);
    case_sign_from_comparison(lhs, rhs)
}

pub(crate) fn case_sign_from_comparison(lhs: f64, rhs: f64) -> CaseSign {
    let scale = lhs.abs().max(rhs.abs());
    if (lhs - rhs).abs() <= CASE_SIGN_REL_TOL * scale {
        CaseSign::Boundary
    } else if lhs > rhs {
        CaseSign::Plus
    } else {
        CaseSign::Minus
    }
}

/// Bundle the headline constants of a cone.
pub fn geometry_summary(cone: &ConeParams) -> GeometrySummary {
    let lambda = lambda_factor(cone);
    let mu_sq = mu_squared(cone);
    GeometrySummary {
        lambda,
        mu_sq,
        mu: mu_sq.sqrt(),
        case: case_sign(cone),
        n: cone.n(),
    }
}
