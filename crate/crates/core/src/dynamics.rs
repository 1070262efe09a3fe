//! Reduction of the radial nonlinear problem to an autonomous planar system
//! and its complete case analysis.
//!
//! Writing `u(l) = l^{-2/(alpha-1)} w(-ln l)` and `x = w`, `y = w'` turns the
//! radial equation into
//!
//! ```text
//! x' = y
//! y' = a_bar x + b_bar y - Q x^alpha
//! ```
//!
//! on the half-plane `x >= 0` (positive solutions only). The coefficients
//! `a_bar`, `b_bar` depend on the cone through the curvature factor and on
//! the nonlinearity exponent `alpha in (1, alpha*]`. The qualitative phase
//! portrait is decided by the signs of `a_bar` and `Q`, a node/focus
//! discriminant at the interior equilibrium, and the two boundary regimes
//! `a_bar = 0` and `alpha = alpha*`; each regime carries a fixed catalogue
//! of solution families with asymptotic exponents and Sobolev verdicts.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{self, CaseSign, ConeParams};
use crate::spectral::{self, SobolevVerdict};

/// Absolute tolerance for treating the indicial/node discriminants as zero.
pub const DISCRIMINANT_TOL: f64 = 1e-14;

/// Critical nonlinearity exponent `alpha* = (n+2)/(n-2)`.
pub fn alpha_star(n: u32) -> f64 {
    (f64::from(n) + 2.0) / (f64::from(n) - 2.0)
}

/// Tolerance band half-width for `alpha ~ alpha*`.
pub fn alpha_star_tol(n: u32) -> f64 {
    1e-12 * alpha_star(n).max(1.0)
}

/// Tolerance band half-width for `a_bar ~ 0`.
pub fn a_bar_tol(n: u32) -> f64 {
    let scale = (f64::from(n) - 2.0) * (f64::from(n) - 2.0);
    1e-9 * scale.max(1.0)
}

/// Coefficients of the planar system together with the derived bookkeeping.
#[derive(Debug, Clone, Copy)]
pub struct DynParams {
    pub alpha: f64,
    /// Sign-carrying constant on the nonlinear term.
    pub q_coef: f64,
    pub n: u32,
    /// Curvature factor behind `a_bar` (back-solved for raw parameter sets).
    pub lambda: f64,
    pub a_bar: f64,
    pub b_bar: f64,
    /// `s = (alpha - 1)(n - 2)/4`, in `(0, 1]`.
    pub s: f64,
    /// `2/(alpha - 1)`, the exponent shift between `w` and `u`.
    pub shift: f64,
}

fn validate_alpha(alpha: f64, n: u32) -> Result<()> {
    let astar = alpha_star(n);
    if alpha.is_nan() || alpha <= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "alpha must satisfy 1 < alpha <= (n+2)/(n-2) = {astar}; got {alpha} \
             (the linear problem alpha = 1 is handled by the spectral analysis)"
        )));
    }
    if alpha > astar + alpha_star_tol(n) {
        return Err(Error::InvalidParameter(format!(
            "alpha must satisfy 1 < alpha <= (n+2)/(n-2) = {astar}; got {alpha}"
        )));
    }
    Ok(())
}

/// Build the planar-system coefficients from a cone and `(alpha, Q)`:
/// `b_bar = (n-2) - 4/(alpha-1)` and
/// `a_bar = -4/(alpha-1)^2 + 2(n-2)/(alpha-1) + (n-2) lambda / (4(n-1))`.
pub fn dyn_params(cone: &ConeParams, alpha: f64, q_coef: f64) -> Result<DynParams> {
    let n = cone.n();
    validate_alpha(alpha, n)?;
    let nf = f64::from(n);
    let lambda = geometry::lambda_factor(cone);
    let x = alpha - 1.0;
    let b_bar = (nf - 2.0) - 4.0 / x;
    let a_bar = -4.0 / (x * x) + 2.0 * (nf - 2.0) / x + (nf - 2.0) / (4.0 * (nf - 1.0)) * lambda;
    Ok(DynParams {
        alpha,
        q_coef,
        n,
        lambda,
        a_bar,
        b_bar,
        s: x * (nf - 2.0) / 4.0,
        shift: 2.0 / x,
    })
}

impl DynParams {
    /// Wrap an explicit `(a_bar, b_bar, Q, alpha, n)` tuple, e.g. a stored
    /// figure parameter set. The curvature factor consistent with `a_bar`
    /// is back-solved; `b_bar` is stored as given and may deviate from the
    /// cone-derived relation for rounded inputs.
    pub fn from_raw(a_bar: f64, b_bar: f64, q_coef: f64, alpha: f64, n: u32) -> Result<Self> {
        validate_alpha(alpha, n)?;
        if n < 3 {
            return Err(Error::InvalidParameter(format!("need n >= 3, got {n}")));
        }
        let nf = f64::from(n);
        let x = alpha - 1.0;
        let lambda = (a_bar + 4.0 / (x * x) - 2.0 * (nf - 2.0) / x) * 4.0 * (nf - 1.0) / (nf - 2.0);
        Ok(DynParams {
            alpha,
            q_coef,
            n,
            lambda,
            a_bar,
            b_bar,
            s: x * (nf - 2.0) / 4.0,
            shift: 2.0 / x,
        })
    }

    /// Discriminant `b_bar^2/4 + a_bar` at the origin; equals
    /// `((n-2)/2)^2 mu^2` for cone-derived coefficients.
    pub fn origin_discriminant(&self) -> f64 {
        self.b_bar * self.b_bar / 4.0 + self.a_bar
    }

    /// Discriminant `b_bar^2/4 - a_bar (alpha - 1)` at the interior
    /// equilibrium.
    pub fn interior_discriminant(&self) -> f64 {
        self.b_bar * self.b_bar / 4.0 - self.a_bar * (self.alpha - 1.0)
    }

    /// `mu^2` implied by the coefficients through
    /// `b_bar^2/4 + a_bar = ((n-2)/2)^2 mu^2`.
    pub fn mu_squared_implied(&self) -> f64 {
        let half = (f64::from(self.n) - 2.0) / 2.0;
        self.origin_discriminant() / (half * half)
    }

    /// Plus/minus dichotomy implied by the coefficients
    /// (`Plus <=> b_bar^2/4 + a_bar > 1`).
    pub fn implied_case_sign(&self) -> CaseSign {
        geometry::case_sign_from_comparison(self.origin_discriminant(), 1.0)
    }

    /// Interior equilibrium abscissa `x_2 = (a_bar / Q)^{1/(alpha-1)}`,
    /// present only when `a_bar / Q > 0`.
    pub fn x2(&self) -> Option<f64> {
        if self.q_coef != 0.0 && self.a_bar / self.q_coef > 0.0 {
            Some((self.a_bar / self.q_coef).powf(1.0 / (self.alpha - 1.0)))
        } else {
            None
        }
    }

    pub fn at_critical_alpha(&self) -> bool {
        (self.alpha - alpha_star(self.n)).abs() <= alpha_star_tol(self.n)
    }
}

/// `alpha_0 = 1 + 4 / ((n-2)(1 + mu))`, the exponent where `a_bar` changes
/// sign from negative to positive.
pub fn alpha_zero(cone: &ConeParams) -> f64 {
    alpha_zero_from_mu(geometry::mu_squared(cone).sqrt(), cone.n())
}

pub fn alpha_zero_from_mu(mu: f64, n: u32) -> f64 {
    1.0 + 4.0 / ((f64::from(n) - 2.0) * (1.0 + mu))
}

/// Decay exponent of the fast separatrix solution,
/// `sigma = (n-2)(mu - 1)/2`. Coincides with the upper indicial exponent of
/// the base linear mode.
pub fn sigma_exponent(cone: &ConeParams) -> f64 {
    let n = f64::from(cone.n());
    (n - 2.0) / 2.0 * (geometry::mu_squared(cone).sqrt() - 1.0)
}

/// Local type of an equilibrium of the planar system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumKind {
    Saddle,
    StableFocus,
    StableNode,
    Center,
    DegenerateNode,
    WeakSaddle,
}

impl std::fmt::Display for EquilibriumKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            EquilibriumKind::Saddle => "Saddle",
            EquilibriumKind::StableFocus => "StableFocus",
            EquilibriumKind::StableNode => "StableNode",
            EquilibriumKind::Center => "Center",
            EquilibriumKind::DegenerateNode => "DegenerateNode",
            EquilibriumKind::WeakSaddle => "WeakSaddle",
        };
        write!(f, "{s}")
    }
}

/// An equilibrium with its linearisation data. The linearisation is a
/// companion matrix, so eigenvectors always have the form `(1, eigenvalue)`.
#[derive(Debug, Clone, Copy)]
pub struct Equilibrium {
    pub location: (f64, f64),
    /// Ordered with the smaller real part first.
    pub eigenvalues: (Complex64, Complex64),
    pub eigenvectors: ([Complex64; 2], [Complex64; 2]),
    pub kind: EquilibriumKind,
}

impl Equilibrium {
    /// Real eigenpairs `(eigenvalue, unit eigenvector)`, empty for a focus
    /// or center.
    pub fn real_eigenpairs(&self) -> Vec<(f64, [f64; 2])> {
        let mut out = Vec::new();
        for lam in [self.eigenvalues.0, self.eigenvalues.1] {
            if lam.im == 0.0 {
                let norm = (1.0 + lam.re * lam.re).sqrt();
                out.push((lam.re, [1.0 / norm, lam.re / norm]));
            }
        }
        out
    }
}

fn companion_eigen(
    trace_half: f64,
    disc: f64,
) -> ((Complex64, Complex64), ([Complex64; 2], [Complex64; 2])) {
    if disc >= 0.0 {
        let r = disc.sqrt();
        let lo = Complex64::new(trace_half - r, 0.0);
        let hi = Complex64::new(trace_half + r, 0.0);
        (
            (lo, hi),
            (
                [Complex64::new(1.0, 0.0), lo],
                [Complex64::new(1.0, 0.0), hi],
            ),
        )
    } else {
        let r = (-disc).sqrt();
        let lo = Complex64::new(trace_half, -r);
        let hi = Complex64::new(trace_half, r);
        (
            (lo, hi),
            (
                [Complex64::new(1.0, 0.0), lo],
                [Complex64::new(1.0, 0.0), hi],
            ),
        )
    }
}

/// Equilibria of the planar system with full linearisation data. Always
/// contains the origin; contains `w_2 = (x_2, 0)` iff `a_bar / Q > 0`.
pub fn equilibria(dp: &DynParams) -> Vec<Equilibrium> {
    let eps_a = a_bar_tol(dp.n);
    let mut out = Vec::new();

    let disc1 = dp.origin_discriminant();
    let (vals1, vecs1) = companion_eigen(dp.b_bar / 2.0, disc1);
    let kind1 = if dp.a_bar.abs() <= eps_a {
        if dp.q_coef < 0.0 {
            EquilibriumKind::WeakSaddle
        } else {
            EquilibriumKind::DegenerateNode
        }
    } else if dp.a_bar > 0.0 {
        EquilibriumKind::Saddle
    } else if disc1 > DISCRIMINANT_TOL {
        EquilibriumKind::StableNode
    } else if disc1 < -DISCRIMINANT_TOL {
        EquilibriumKind::StableFocus
    } else {
        EquilibriumKind::DegenerateNode
    };
    out.push(Equilibrium {
        location: (0.0, 0.0),
        eigenvalues: vals1,
        eigenvectors: vecs1,
        kind: kind1,
    });

    if let Some(x2) = dp.x2() {
        let disc2 = dp.interior_discriminant();
        let (vals2, vecs2) = companion_eigen(dp.b_bar / 2.0, disc2);
        let kind2 = if dp.a_bar < 0.0 {
            EquilibriumKind::Saddle
        } else if dp.at_critical_alpha() && disc2 < -DISCRIMINANT_TOL {
            EquilibriumKind::Center
        } else if disc2 < -DISCRIMINANT_TOL {
            EquilibriumKind::StableFocus
        } else if disc2 > DISCRIMINANT_TOL {
            EquilibriumKind::StableNode
        } else {
            EquilibriumKind::DegenerateNode
        };
        out.push(Equilibrium {
            location: (x2, 0.0),
            eigenvalues: vals2,
            eigenvectors: vecs2,
            kind: kind2,
        });
    }
    out
}

/// The eleven qualitative regimes of the planar system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseId {
    C1,
    C2,
    C3,
    C3prime,
    C4,
    C5plus,
    C5minus,
    C6plus,
    C6minus,
    C7plus,
    C7minus,
}

impl CaseId {
    pub fn name(&self) -> &'static str {
        match self {
            CaseId::C1 => "C1",
            CaseId::C2 => "C2",
            CaseId::C3 => "C3",
            CaseId::C3prime => "C3prime",
            CaseId::C4 => "C4",
            CaseId::C5plus => "C5plus",
            CaseId::C5minus => "C5minus",
            CaseId::C6plus => "C6plus",
            CaseId::C6minus => "C6minus",
            CaseId::C7plus => "C7plus",
            CaseId::C7minus => "C7minus",
        }
    }

    pub fn all() -> [CaseId; 11] {
        [
            CaseId::C1,
            CaseId::C2,
            CaseId::C3,
            CaseId::C3prime,
            CaseId::C4,
            CaseId::C5plus,
            CaseId::C5minus,
            CaseId::C6plus,
            CaseId::C6minus,
            CaseId::C7plus,
            CaseId::C7minus,
        ]
    }
}

impl std::fmt::Display for CaseId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// A case label with a human-readable statement of its defining conditions.
#[derive(Debug, Clone)]
pub struct CaseLabel {
    pub id: CaseId,
    pub description: String,
}

/// Classify the parameter set into exactly one of the eleven regimes.
///
/// Tie handling, in precedence order: `alpha` within `1e-12` of `alpha*`
/// (and `Q != 0`) is critical; `Q == 0` exactly is the linear regime, split
/// by the sign of `a_bar`; `|a_bar|` inside its tolerance band is the
/// degenerate regime, split by the sign of `Q`; otherwise the generic sign
/// table applies, with the node/focus discriminant splitting C3 from C3'.
/// A vanishing discriminant is filed under C3' (node side).
pub fn classify_case(dp: &DynParams) -> CaseLabel {
    let id = classify_case_id(dp);
    CaseLabel {
        id,
        description: case_description(id).to_string(),
    }
}

fn classify_case_id(dp: &DynParams) -> CaseId {
    if dp.at_critical_alpha() && dp.q_coef != 0.0 {
        return if dp.q_coef > 0.0 {
            CaseId::C7plus
        } else {
            CaseId::C7minus
        };
    }
    if dp.q_coef == 0.0 {
        return if dp.a_bar > 0.0 {
            CaseId::C5plus
        } else {
            CaseId::C5minus
        };
    }
    if dp.a_bar.abs() <= a_bar_tol(dp.n) {
        return if dp.q_coef > 0.0 {
            CaseId::C6plus
        } else {
            CaseId::C6minus
        };
    }
    if dp.a_bar < 0.0 {
        if dp.q_coef < 0.0 {
            CaseId::C1
        } else {
            CaseId::C2
        }
    } else if dp.q_coef < 0.0 {
        CaseId::C4
    } else if dp.interior_discriminant() < 0.0 {
        CaseId::C3
    } else {
        CaseId::C3prime
    }
}

fn case_description(id: CaseId) -> &'static str {
    match id {
        CaseId::C1 => "a_bar < 0, Q < 0: stable node at the origin, saddle at w2",
        CaseId::C2 => "a_bar < 0, Q > 0: stable node at the origin, no interior equilibrium",
        CaseId::C3 => "a_bar > 0, Q > 0, b_bar^2/4 - a_bar(alpha-1) < 0: saddle at the origin, stable focus at w2",
        CaseId::C3prime => "a_bar > 0, Q > 0, b_bar^2/4 - a_bar(alpha-1) > 0: saddle at the origin, stable node at w2",
        CaseId::C4 => "a_bar > 0, Q < 0: saddle at the origin, no interior equilibrium",
        CaseId::C5plus => "Q = 0, a_bar > 0: linear saddle",
        CaseId::C5minus => "Q = 0, a_bar < 0: linear stable node",
        CaseId::C6plus => "a_bar = 0, Q > 0: weak stable node (one zero eigenvalue)",
        CaseId::C6minus => "a_bar = 0, Q < 0: weak saddle (one zero eigenvalue)",
        CaseId::C7plus => "alpha = alpha*, Q > 0: conservative; saddle at the origin, center at w2",
        CaseId::C7minus => "alpha = alpha*, Q < 0: conservative; saddle at the origin only",
    }
}

/// Admissible solution families of the phase system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Unbounded solutions; `u` grows strictly faster than the
    /// `alpha`-basic rate.
    CInfinity,
    /// Generic solutions into the origin along the slow direction `v_plus`.
    CZero,
    /// The fast separatrix into the origin along `v_minus`.
    SeparatrixS,
    /// Trajectories entering the interior saddle; exactly alpha-basic.
    SeparatrixIncoming,
    /// Solutions locked to the alpha-basic rate at `w2` (or oscillating
    /// around it in the conservative regime).
    Fowler,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::CInfinity => "C_infinity",
            Family::CZero => "C_zero",
            Family::SeparatrixS => "Separatrix_s",
            Family::SeparatrixIncoming => "Separatrix_incoming",
            Family::Fowler => "Fowler",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// One admissible family with its asymptotic data.
#[derive(Debug, Clone)]
pub struct FamilyDescriptor {
    pub family: Family,
    /// Decay rate of `w` in `t` (an eigenvalue of the relevant
    /// linearisation, or `0` when `w` tends to a nonzero constant); absent
    /// for unbounded or periodic families.
    pub w_exponent: Option<f64>,
    /// Power `q` with `u ~ l^q`; absent when only a growth bound is known.
    pub u_exponent: Option<f64>,
    /// Full membership verdict when the exponent is known.
    pub verdict: Option<SobolevVerdict>,
    /// Square-integrability when decidable (also set for families where
    /// only the L2 side is known).
    pub in_l2: Option<bool>,
    pub notes: String,
}

fn descriptor_from_exponent(
    family: Family,
    w_exponent: Option<f64>,
    dp: &DynParams,
    notes: String,
) -> FamilyDescriptor {
    // grouped so that u + (shift + w) vanishes identically in floating point
    let u_exponent = w_exponent.map(|w| -(dp.shift + w));
    let verdict = u_exponent.map(|q| spectral::sobolev_verdict(q, dp.n));
    FamilyDescriptor {
        family,
        w_exponent,
        u_exponent,
        verdict,
        in_l2: verdict.map(|v| v.in_l2),
        notes,
    }
}

fn growth_family(dp: &DynParams) -> FamilyDescriptor {
    let l2_threshold = (f64::from(dp.n) + 4.0) / f64::from(dp.n);
    let decided_not_l2 =
        dp.alpha <= l2_threshold || (dp.a_bar < 0.0 && dp.implied_case_sign() == CaseSign::Plus);
    let notes = if decided_not_l2 {
        "unbounded; u grows faster than the alpha-basic rate and is not square-integrable"
    } else {
        "unbounded; u grows faster than the alpha-basic rate; square-integrability undetermined"
    };
    FamilyDescriptor {
        family: Family::CInfinity,
        w_exponent: None,
        u_exponent: None,
        verdict: None,
        in_l2: if decided_not_l2 { Some(false) } else { None },
        notes: notes.to_string(),
    }
}

/// Enumerate the solution families the case admits, with exponents and
/// verdicts. `label` must be the classification of `dp`.
///
/// The exponent bookkeeping is uniform: a family whose `w` decays like
/// `e^{w_exp t}` has `u ~ l^q` with `q = -2/(alpha-1) - w_exp`, and the
/// membership verdict follows from the exponent rule. For cone-derived
/// coefficients the fast separatrix lands on `q = (n-2)(mu-1)/2`, first-order
/// admissible always and second-order admissible exactly in the plus case.
pub fn solution_families(dp: &DynParams, label: &CaseLabel) -> Vec<FamilyDescriptor> {
    let disc1 = dp.origin_discriminant();
    let (lam_minus, lam_plus) = if disc1 >= -DISCRIMINANT_TOL {
        let r = disc1.max(0.0).sqrt();
        (Some(dp.b_bar / 2.0 - r), Some(dp.b_bar / 2.0 + r))
    } else {
        (None, None)
    };

    let separatrix = |dp: &DynParams| {
        descriptor_from_exponent(
            Family::SeparatrixS,
            lam_minus,
            dp,
            "fast separatrix along v_minus; u_s ~ l^q with q = -2/(alpha-1) - lambda_minus \
             (the sign convention fixed by this derivation; equals sigma = (n-2)(mu-1)/2 \
             for cone-derived coefficients)"
                .to_string(),
        )
    };
    let slow_family = |dp: &DynParams| {
        descriptor_from_exponent(
            Family::CZero,
            lam_plus,
            dp,
            "generic decay into the origin along v_plus".to_string(),
        )
    };
    let basic_rate = |family: Family, w_exp: Option<f64>, notes: &str, dp: &DynParams| {
        let verdict = spectral::sobolev_verdict(-dp.shift, dp.n);
        FamilyDescriptor {
            family,
            w_exponent: w_exp,
            u_exponent: Some(-dp.shift),
            verdict: Some(verdict),
            in_l2: Some(verdict.in_l2),
            notes: notes.to_string(),
        }
    };

    match label.id {
        CaseId::C1 => vec![
            growth_family(dp),
            slow_family(dp),
            basic_rate(
                Family::SeparatrixIncoming,
                Some(0.0),
                "two trajectories into the interior saddle w2; exactly alpha-basic",
                dp,
            ),
            separatrix(dp),
        ],
        CaseId::C2 | CaseId::C5minus | CaseId::C6plus => vec![slow_family(dp), separatrix(dp)],
        CaseId::C3 | CaseId::C3prime => vec![
            basic_rate(
                Family::Fowler,
                Some(0.0),
                "solutions attracted to w2; locked to the alpha-basic rate",
                dp,
            ),
            separatrix(dp),
        ],
        CaseId::C4 | CaseId::C5plus | CaseId::C6minus | CaseId::C7minus => {
            vec![growth_family(dp), separatrix(dp)]
        }
        CaseId::C7plus => vec![
            basic_rate(
                Family::Fowler,
                None,
                "periodic orbits around the center w2; u oscillates between two \
                 alpha-basic envelopes x_min l^{-(n-2)/2} and x_max l^{-(n-2)/2}",
                dp,
            ),
            separatrix(dp),
        ],
    }
}

/// First integral of the critical system (`alpha = alpha*`, `b_bar = 0`):
/// `I(x, y) = y^2/2 - a_bar x^2/2 + Q x^{alpha+1} / (alpha+1)`.
pub fn first_integral(dp: &DynParams, x: f64, y: f64) -> Result<f64> {
    if !dp.at_critical_alpha() {
        return Err(Error::InvalidParameter(format!(
            "the first integral exists only at alpha = alpha* = {}; got alpha = {}",
            alpha_star(dp.n),
            dp.alpha
        )));
    }
    if x < 0.0 {
        return Err(Error::Domain(format!(
            "first integral is defined on the half-plane x >= 0 (got x = {x})"
        )));
    }
    Ok(
        y * y / 2.0 - dp.a_bar * x * x / 2.0
            + dp.q_coef * x.powf(dp.alpha + 1.0) / (dp.alpha + 1.0),
    )
}

/// Value of the first integral at the interior equilibrium,
/// `I(w_2) = -(Q/n) (a_bar/Q)^{n/2}`.
pub fn first_integral_at_w2(dp: &DynParams) -> Result<f64> {
    if !dp.at_critical_alpha() {
        return Err(Error::InvalidParameter(
            "interior-equilibrium energy exists only at alpha = alpha*".to_string(),
        ));
    }
    let ratio = dp.a_bar / dp.q_coef;
    if ratio <= 0.0 {
        return Err(Error::Domain(
            "no interior equilibrium: a_bar / Q <= 0".to_string(),
        ));
    }
    let nf = f64::from(dp.n);
    Ok(-(dp.q_coef / nf) * ratio.powf(nf / 2.0))
}

/// Map cylindrical samples `(t, w)` back to radial samples `(l, u)` via
/// `l = e^{-t}`, `u = l^{-2/(alpha-1)} w`. Output is ordered by increasing
/// `l` (the reverse of increasing `t`).
pub fn u_from_w(alpha: f64, t_samples: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    if alpha.is_nan() || alpha <= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "transform needs alpha > 1, got {alpha}"
        )));
    }
    let shift = 2.0 / (alpha - 1.0);
    let mut out: Vec<(f64, f64)> = t_samples
        .iter()
        .rev()
        .map(|&(t, w)| {
            let ell = (-t).exp();
            (ell, ell.powf(-shift) * w)
        })
        .collect();
    // rev() already flips the order; keep it strictly increasing in l
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(out)
}

/// Growth and Lipschitz data for the nonlinear term on `|x| <= delta`,
/// the hypotheses under which solutions tending to the origin inherit the
/// asymptotics of the linearised flow.
#[derive(Debug, Clone, Copy)]
pub struct PerturbationBound {
    /// `|Q x^alpha| <= coefficient * |x|^{1 + rho}` with `rho = alpha - 1`.
    pub rho: f64,
    pub coefficient: f64,
    /// Supremum of the derivative `|alpha Q x^{alpha-1}|` over `[0, delta]`;
    /// shrinks to zero with `delta`.
    pub derivative_sup: f64,
}

pub fn perturbation_bound(dp: &DynParams, delta: f64) -> Result<PerturbationBound> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "need delta > 0, got {delta}"
        )));
    }
    if dp.alpha.is_nan() || dp.alpha <= 1.0 {
        return Err(Error::InvalidParameter(
            "growth bound requires alpha > 1".to_string(),
        ));
    }
    Ok(PerturbationBound {
        rho: dp.alpha - 1.0,
        coefficient: dp.q_coef.abs(),
        derivative_sup: (dp.alpha * dp.q_coef).abs() * delta.powf(dp.alpha - 1.0),
    })
}
