//! Runtime verification suites behind the `verify` subcommand. Each check
//! prints the worst observed residual against its tolerance; all random
//! draws are seeded, so output is deterministic.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cone_yamabe::dynamics::{self, DynParams};
use cone_yamabe::geometry::{self, ConeParams};
use cone_yamabe::ode::{self, IntegrateOptions};
use cone_yamabe::spectral;

use crate::error::{CliError, CliResult};
use crate::report;

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub worst: f64,
    pub tol: f64,
    pub passed: bool,
}

impl CheckResult {
    fn new(name: &str, worst: f64, tol: f64) -> Self {
        CheckResult {
            name: name.to_string(),
            worst,
            tol,
            passed: worst <= tol,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{}: max residual {:.3e} (tol {:.1e}) {}",
            self.name,
            self.worst,
            self.tol,
            if self.passed { "ok" } else { "FAIL" }
        )
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn random_cone(rng: &mut impl Rng) -> ConeParams {
    ConeParams::new(
        rng.gen_range(1..=9),
        rng.gen_range(1..=9),
        rng.gen_range(0.3..3.0),
        rng.gen_range(0.3..3.0),
    )
    .expect("in-range parameters")
}

fn random_alpha(rng: &mut impl Rng, n: u32) -> f64 {
    let astar = dynamics::alpha_star(n);
    1.0 + rng.gen_range(1e-4..=1.0) * (astar - 1.0)
}

/// Closed-form identity battery over random parameter draws.
pub fn identities_suite(draws: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut lambda_worst: f64 = 0.0;
    let mut mu_worst: f64 = 0.0;
    let mut coupling_worst: f64 = 0.0;
    let mut origin_disc_worst: f64 = 0.0;
    let mut vieta_worst: f64 = 0.0;
    let mut s0_worst: f64 = 0.0;
    let mut alpha0_worst: f64 = 0.0;

    for _ in 0..draws {
        let c = random_cone(&mut rng);
        let n = f64::from(c.n());
        let curv = geometry::sphere_curvature_sum(&c);
        let big = (n - 1.0) * (n - 2.0) + 2.0 * curv;

        // (a) curvature factor, defining form vs dimension form
        let direct = geometry::lambda_factor(&c);
        let rewritten = geometry::lambda_factor_rewritten(&c);
        lambda_worst = lambda_worst.max((direct - rewritten).abs() / big.max(1.0));

        // (b) mu^2, positive form vs 1 + lambda/((n-1)(n-2))
        let m2 = geometry::mu_squared(&c);
        let m2_l = geometry::mu_squared_from_lambda(direct, c.n());
        mu_worst = mu_worst.max((m2 - m2_l).abs() / m2.abs().max(1.0));

        // (c) coupling constant, two routes
        let i = rng.gen_range(0..5);
        let j = rng.gen_range(0..5);
        let ka = spectral::coupling_constant(&c, i, j);
        let kb = spectral::coupling_constant_rewritten(&c, i, j);
        let k_scale = ka.abs().max(big).max(1.0);
        coupling_worst = coupling_worst.max((ka - kb).abs() / k_scale);

        // (d) b^2/4 + a = ((n-2)/2)^2 mu^2
        let alpha = random_alpha(&mut rng, c.n());
        let dp = dynamics::dyn_params(&c, alpha, 1.0).expect("valid alpha");
        let expected = (n - 2.0) * (n - 2.0) / 4.0 * m2;
        let disc_scale = expected
            .abs()
            .max(dp.a_bar.abs())
            .max(dp.b_bar * dp.b_bar / 4.0)
            .max(1.0);
        origin_disc_worst =
            origin_disc_worst.max((dp.origin_discriminant() - expected).abs() / disc_scale);

        // (e) indicial root relations (redraw past the degenerate edge)
        if let Ok((lo, hi)) = spectral::indicial_from_coupling(ka, c.n()) {
            let sum_scale = lo.abs().max(hi.abs()).max(n - 2.0);
            vieta_worst = vieta_worst.max((lo + hi + (n - 2.0)).abs() / sum_scale);
            let prod_scale = ka.abs().max((n - 2.0) * (n - 2.0) / 4.0).max(1.0);
            vieta_worst = vieta_worst.max((lo * hi + ka).abs() / prod_scale);
        }

        // (f) root residuals of s0 and alpha0
        let mu = m2.sqrt();
        let s0 = 1.0 / (1.0 + mu);
        let coeff = direct / ((n - 1.0) * (n - 2.0));
        let s0_res = (coeff * s0 * s0 + 2.0 * s0 - 1.0).abs() / coeff.abs().max(1.0);
        s0_worst = s0_worst.max(s0_res);
        let a0 = dynamics::alpha_zero(&c);
        let dp0 = dynamics::dyn_params(&c, a0, 1.0).expect("alpha_zero in range");
        alpha0_worst = alpha0_worst.max(dp0.a_bar.abs() / ((n - 2.0) * (n - 2.0)));
    }

    let tol = 1e-10;
    SuiteReport {
        suite: "identities".to_string(),
        checks: vec![
            CheckResult::new("identities/lambda_two_forms", lambda_worst, tol),
            CheckResult::new("identities/mu_sq_two_forms", mu_worst, tol),
            CheckResult::new("identities/coupling_two_forms", coupling_worst, tol),
            CheckResult::new("identities/origin_discriminant", origin_disc_worst, tol),
            CheckResult::new("identities/indicial_vieta", vieta_worst, tol),
            CheckResult::new("identities/s0_root", s0_worst, tol),
            CheckResult::new("identities/alpha0_root", alpha0_worst, tol),
        ],
    }
}

/// Series checks that are observable in double precision: the coefficient
/// recursion against the operator law, and the residual slope at a small
/// truncation where the leftover monomial stays far above roundoff.
pub fn series_suite() -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut law_worst: f64 = 0.0;
    let mut slope_worst: f64 = 0.0;
    let ells: [f64; 5] = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3];

    let mut done = 0;
    while done < 20 {
        let c = random_cone(&mut rng);
        let i = rng.gen_range(0..3);
        let j = rng.gen_range(0..3);
        let q1 = rng.gen_range(0.05..=5.0);
        let k = spectral::coupling_constant(&c, i, j);
        let Ok((_, nu)) = spectral::indicial_from_coupling(k, c.n()) else {
            continue;
        };
        done += 1;
        let n = f64::from(c.n());

        let sol = spectral::series_coefficients(nu, c.n(), q1, 1.0, 25).expect("plus branch");
        for (t, pair) in sol.coeffs.windows(2).enumerate() {
            let m = 2.0 * t as f64;
            let denom = (m + 2.0) * (2.0 * nu + m + n);
            let res = (denom * pair[1] + q1 * pair[0]).abs() / (q1 * pair[0]).abs().max(1e-300);
            law_worst = law_worst.max(res);
        }

        let small = spectral::series_coefficients(nu, c.n(), q1, 1.0, 1).expect("plus branch");
        let pts: Vec<(f64, f64)> = ells
            .iter()
            .map(|&ell| {
                (
                    ell.ln(),
                    spectral::series_ode_residual(&small, k, c.n(), ell)
                        .abs()
                        .ln(),
                )
            })
            .collect();
        let slope = fit_slope(&pts);
        slope_worst = slope_worst.max((slope - (nu + 2.0)).abs());
    }

    SuiteReport {
        suite: "series".to_string(),
        checks: vec![
            CheckResult::new("series/recursion_law", law_worst, 1e-10),
            CheckResult::new("series/residual_slope_m1", slope_worst, 0.15),
        ],
    }
}

fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Membership-rule cross-checks: the square-integrability threshold of the
/// borderline profile, the agreement of the second-order membership flip
/// with the geometric dichotomy along a radius path, and the identity of
/// the separatrix exponent with the base indicial exponent.
pub fn sobolev_suite() -> SuiteReport {
    // (a) the L2 verdict of the borderline profile flips at alpha = (n+4)/n:
    // bisect the flip location in alpha and compare with the closed form
    // (the threshold itself is not exactly representable, so the pointwise
    // value there is rounding-determined)
    let mut threshold_worst: f64 = 0.0;
    for n in 5..=12u32 {
        let at = (f64::from(n) + 4.0) / f64::from(n);
        let in_l2 = |alpha: f64| spectral::sobolev_verdict(-2.0 / (alpha - 1.0), n).in_l2;
        let (mut lo, mut hi) = (at - 1e-6, at + 1e-6);
        if in_l2(lo) || !in_l2(hi) {
            threshold_worst = 1.0;
            continue;
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if in_l2(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        threshold_worst = threshold_worst.max((0.5 * (lo + hi) - at).abs() / at);
    }

    // (b) bisect the H2 flip of the base plus-branch and the dichotomy flip
    // along r_q for p = q = 2, r_p = 1; both cross at r_q = sqrt(3)
    let h2_at = |r_q: f64| {
        let c = ConeParams::new(2, 2, 1.0, r_q).expect("valid");
        spectral::mode_membership_report(&c, 0, 0)
            .expect("nondegenerate")
            .plus_branch
            .in_h2
    };
    let plus_at = |r_q: f64| {
        let c = ConeParams::new(2, 2, 1.0, r_q).expect("valid");
        geometry::sphere_curvature_sum(&c) > 2.0 * 4.0 / 3.0
    };
    let bisect = |pred: &dyn Fn(f64) -> bool| {
        let (mut lo, mut hi) = (1.2f64, 2.2f64);
        assert!(pred(lo) && !pred(hi));
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if pred(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let flip_h2 = bisect(&h2_at);
    let flip_case = bisect(&plus_at);
    let flip_worst = (flip_h2 - flip_case).abs() / flip_case;

    // (c) sigma equals the upper indicial exponent of the base mode
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut sigma_worst: f64 = 0.0;
    let mut done = 0;
    while done < 1000 {
        let c = random_cone(&mut rng);
        let Ok((_, nu_plus)) = spectral::indicial_exponents(&c, 0, 0) else {
            continue;
        };
        done += 1;
        let sigma = dynamics::sigma_exponent(&c);
        sigma_worst = sigma_worst.max((sigma - nu_plus).abs() / sigma.abs().max(1.0));
    }

    SuiteReport {
        suite: "sobolev".to_string(),
        checks: vec![
            CheckResult::new("sobolev/l2_threshold_flip", threshold_worst, 1e-12),
            CheckResult::new("sobolev/h2_flip_matches_dichotomy", flip_worst, 1e-12),
            CheckResult::new("sobolev/sigma_equals_nu00", sigma_worst, 1e-12),
        ],
    }
}

/// Nonpositive-mode enumeration: the fixture cases plus brute-force window
/// agreement on random cones.
pub fn modes_suite() -> SuiteReport {
    let mut fixture_worst: f64 = 0.0;

    let unit33 = ConeParams::new(3, 3, 1.0, 1.0).expect("valid");
    let modes = spectral::negative_modes(&unit33, 3, 3);
    if modes.len() != 1 || modes[0].0 != 0 || modes[0].1 != 0 {
        fixture_worst = 1.0;
    } else {
        fixture_worst = fixture_worst.max((modes[0].2 + 1.25).abs());
    }

    let positive = ConeParams::new(3, 3, 0.5, 0.5).expect("valid");
    if geometry::lambda_factor(&positive) <= 0.0
        || !spectral::negative_modes(&positive, 6, 6).is_empty()
    {
        fixture_worst = 1.0;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut brute_worst: f64 = 0.0;
    for _ in 0..200 {
        let c = random_cone(&mut rng);
        let fast = spectral::negative_modes(&c, 8, 8);
        let mut brute = Vec::new();
        for i in 0..=8 {
            for j in 0..=8 {
                let k = spectral::coupling_constant(&c, i, j);
                if k <= 0.0 {
                    brute.push((i, j, k));
                }
            }
        }
        if fast.len() != brute.len()
            || fast
                .iter()
                .zip(brute.iter())
                .any(|(a, b)| a.0 != b.0 || a.1 != b.1)
        {
            brute_worst = 1.0;
        }
    }

    SuiteReport {
        suite: "modes".to_string(),
        checks: vec![
            CheckResult::new("modes/fixtures", fixture_worst, 1e-12),
            CheckResult::new("modes/brute_force_agreement", brute_worst, 0.5),
        ],
    }
}

/// First-integral conservation in the critical regime for n = 5, 6, 7.
pub fn conservation_suite() -> SuiteReport {
    let mut drift_worst: f64 = 0.0;
    let mut structure_worst: f64 = 0.0;
    for (p, q) in [(2u32, 2u32), (2, 3), (3, 3)] {
        let cone = ConeParams::new(p, q, 1.0, 1.0).expect("valid");
        let n = cone.n();
        let dp = dynamics::dyn_params(&cone, dynamics::alpha_star(n), 1.0).expect("critical");
        match report::fowler_conservation(&dp, 1e-10) {
            Ok(value) => {
                // pull the numbers back out of the report object
                let drift = extract_float(&value, "drift").unwrap_or(f64::INFINITY);
                let periods = extract_float(&value, "periods_detected").unwrap_or(0.0);
                let in_range = extract_bool(&value, "energy_in_range").unwrap_or(false);
                drift_worst = drift_worst.max(drift);
                if periods < 10.0 || !in_range {
                    structure_worst = 1.0;
                }
            }
            Err(_) => structure_worst = 1.0,
        }
    }
    SuiteReport {
        suite: "conservation".to_string(),
        checks: vec![
            CheckResult::new("conservation/first_integral_drift", drift_worst, 1e-8),
            CheckResult::new(
                "conservation/periods_and_energy_range",
                structure_worst,
                0.5,
            ),
        ],
    }
}

fn extract_float(value: &crate::json::Value, key: &str) -> Option<f64> {
    if let crate::json::Value::Object(fields) = value {
        for (k, v) in fields {
            if k == key {
                return match v {
                    crate::json::Value::Float(x) => Some(*x),
                    crate::json::Value::Int(i) => Some(*i as f64),
                    _ => None,
                };
            }
        }
    }
    None
}

fn extract_bool(value: &crate::json::Value, key: &str) -> Option<bool> {
    if let crate::json::Value::Object(fields) = value {
        for (k, v) in fields {
            if k == key {
                if let crate::json::Value::Bool(b) = v {
                    return Some(*b);
                }
            }
        }
    }
    None
}

/// One tuned shooting experiment per generic regime, fitted rate against
/// the analytic eigenvalue at 1% tolerance and a 5 s per-case budget.
pub fn dynamics_suite() -> SuiteReport {
    struct Probe {
        name: &'static str,
        dp: DynParams,
        direction: usize,
        window: (f64, f64),
        t_max: f64,
        offset: f64,
    }
    let probes = vec![
        Probe {
            name: "C1",
            dp: DynParams::from_raw(-50.0, -15.0, -10.0, 1.2, 7).expect("valid"),
            direction: 0,
            window: (0.01, 0.40),
            t_max: 0.8,
            offset: 1e-6,
        },
        Probe {
            name: "C2",
            dp: DynParams::from_raw(-50.0, -15.0, 10.0, 1.2, 7).expect("valid"),
            direction: 0,
            window: (0.01, 0.40),
            t_max: 0.8,
            offset: 1e-6,
        },
        Probe {
            name: "C3",
            dp: DynParams::from_raw(50.0 / 9.0, -5.0 / 3.0, 5.0, 1.6, 7).expect("valid"),
            direction: 0,
            window: (0.05, 1.20),
            t_max: 1.4,
            offset: 1e-6,
        },
        Probe {
            name: "C4",
            dp: DynParams::from_raw(5.5, -5.0 / 3.0, -5.0, 1.6, 7).expect("valid"),
            direction: 0,
            window: (0.05, 1.20),
            t_max: 1.4,
            offset: 1e-6,
        },
    ];

    let mut rate_worst: f64 = 0.0;
    let mut time_worst: f64 = 0.0;
    let mut checks = Vec::new();
    for probe in probes {
        let start = Instant::now();
        let eqs = dynamics::equilibria(&probe.dp);
        let expected = eqs[0].real_eigenpairs()[probe.direction].0;
        let opts = IntegrateOptions::new(probe.t_max, 1e-10)
            .expect("valid options")
            .with_max_step(probe.t_max / 400.0)
            .with_equilibrium_radius(1e-12);
        let rel = ode::shoot_separatrix(
            &probe.dp,
            &eqs[0],
            probe.direction,
            false,
            probe.offset,
            false,
            &opts,
        )
        .and_then(|traj| ode::estimate_exponent(&traj, probe.window, eqs[0].location))
        .map(|fit| (fit.rate - expected).abs() / expected.abs())
        .unwrap_or(f64::INFINITY);
        let elapsed = start.elapsed().as_secs_f64();
        rate_worst = rate_worst.max(rel);
        time_worst = time_worst.max(elapsed);
        checks.push(CheckResult::new(
            &format!("dynamics/separatrix_rate_{}", probe.name),
            rel,
            0.01,
        ));
    }
    checks.push(CheckResult::new(
        "dynamics/per_case_runtime_s",
        time_worst,
        5.0,
    ));
    SuiteReport {
        suite: "dynamics".to_string(),
        checks,
    }
}

pub fn run_suites(which: &str, draws: u64) -> CliResult<Vec<SuiteReport>> {
    let all = [
        "identities",
        "series",
        "sobolev",
        "modes",
        "conservation",
        "dynamics",
    ];
    let selected: Vec<&str> = if which == "all" {
        all.to_vec()
    } else if all.contains(&which) {
        vec![which]
    } else {
        return Err(CliError::Validation(format!(
            "unknown suite {which:?}; expected one of {}, all",
            all.join(", ")
        )));
    };
    Ok(selected
        .into_iter()
        .map(|s| match s {
            "identities" => identities_suite(draws),
            "series" => series_suite(),
            "sobolev" => sobolev_suite(),
            "modes" => modes_suite(),
            "conservation" => conservation_suite(),
            "dynamics" => dynamics_suite(),
            _ => unreachable!(),
        })
        .collect())
}
