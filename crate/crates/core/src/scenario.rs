//! Named parameter sets: the built-in figure registry plus user
//! configuration in a flat `key=value` format.
//!
//! A scenario is either a cone (`p, q, rp, rq`) with a nonlinearity
//! `(alpha, Q)`, or a raw coefficient tuple `(a_bar, b_bar, Q, alpha, n)`
//! for the planar system directly. The built-in registry stores the eleven
//! reference portraits as raw records, exactly as printed, with notes where
//! the printed and derived values differ.

use std::collections::BTreeMap;

use crate::dynamics::{self, DynParams};
use crate::error::{Error, Result};
use crate::geometry::ConeParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioSource {
    Figure,
    UserConfig,
}

/// Exactly one of the two parameter forms.
#[derive(Debug, Clone)]
pub enum ScenarioParams {
    Cone {
        cone: ConeParams,
        alpha: f64,
        q_coef: f64,
    },
    Raw {
        a_bar: f64,
        b_bar: f64,
        q_coef: f64,
        alpha: f64,
        n: u32,
    },
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub source: ScenarioSource,
    pub params: ScenarioParams,
    pub notes: String,
}

impl Scenario {
    /// Planar-system coefficients for this scenario.
    pub fn dyn_params(&self) -> Result<DynParams> {
        match &self.params {
            ScenarioParams::Cone {
                cone,
                alpha,
                q_coef,
            } => dynamics::dyn_params(cone, *alpha, *q_coef),
            ScenarioParams::Raw {
                a_bar,
                b_bar,
                q_coef,
                alpha,
                n,
            } => DynParams::from_raw(*a_bar, *b_bar, *q_coef, *alpha, *n),
        }
    }

    pub fn cone(&self) -> Option<&ConeParams> {
        match &self.params {
            ScenarioParams::Cone { cone, .. } => Some(cone),
            ScenarioParams::Raw { .. } => None,
        }
    }

    /// The scenario's parameters in the `key=value` configuration format.
    pub fn to_config(&self) -> Vec<(String, String)> {
        let mut out = vec![("name".to_string(), self.name.clone())];
        match &self.params {
            ScenarioParams::Cone {
                cone,
                alpha,
                q_coef,
            } => {
                out.push(("p".to_string(), cone.p().to_string()));
                out.push(("q".to_string(), cone.q().to_string()));
                out.push(("rp".to_string(), format!("{:.17e}", cone.r_p())));
                out.push(("rq".to_string(), format!("{:.17e}", cone.r_q())));
                out.push(("alpha".to_string(), format!("{:.17e}", alpha)));
                out.push(("Q".to_string(), format!("{:.17e}", q_coef)));
            }
            ScenarioParams::Raw {
                a_bar,
                b_bar,
                q_coef,
                alpha,
                n,
            } => {
                out.push(("a_bar".to_string(), format!("{:.17e}", a_bar)));
                out.push(("b_bar".to_string(), format!("{:.17e}", b_bar)));
                out.push(("Q".to_string(), format!("{:.17e}", q_coef)));
                out.push(("alpha".to_string(), format!("{:.17e}", alpha)));
                out.push(("n".to_string(), n.to_string()));
            }
        }
        out
    }
}

fn figure(name: &str, a_bar: f64, b_bar: f64, q_coef: f64, alpha: f64, notes: &str) -> Scenario {
    Scenario {
        name: name.to_string(),
        source: ScenarioSource::Figure,
        params: ScenarioParams::Raw {
            a_bar,
            b_bar,
            q_coef,
            alpha,
            n: 7,
        },
        notes: notes.to_string(),
    }
}

/// The eleven built-in reference portraits. All use n = 7.
pub fn figure_scenarios() -> Vec<Scenario> {
    vec![
        figure(
            "fig7_1",
            -50.0,
            -15.0,
            -10.0,
            1.2,
            "a_bar < 0, Q < 0; coefficients are the exact flat-cone values \
             (lambda = 0, n = 7, alpha = 1.2, s = 1/4)",
        ),
        figure(
            "fig7_2",
            -50.0,
            -15.0,
            10.0,
            1.2,
            "a_bar < 0, Q > 0; coefficients are the exact flat-cone values \
             (lambda = 0, n = 7, alpha = 1.2, s = 1/4)",
        ),
        figure(
            "fig7_3",
            5.5,
            -5.0 / 3.0,
            5.0,
            1.6,
            "a_bar > 0, Q > 0, focus regime; a_bar printed rounded: the flat-cone \
             derivation (lambda = 0, n = 7, alpha = 1.6) gives a_bar = 50/9 = \
             5.5555555555555554 and b_bar = -5/3 exactly",
        ),
        figure(
            "fig7_3p",
            5.5,
            -21.5,
            5.0,
            1.56,
            "a_bar > 0, Q > 0, node regime b_bar^2/4 - a_bar(alpha-1) > 0; that \
             condition needs |b_bar| > 3.51, so the damping is stored as -21.5 \
             (a reading of -2.15 would fall in the focus regime of fig7_3)",
        ),
        figure(
            "fig7_4",
            5.5,
            -5.0 / 3.0,
            -5.0,
            1.6,
            "a_bar > 0, Q < 0, s = 3/4; a_bar printed rounded (derived 50/9)",
        ),
        figure(
            "fig7_5p",
            5.5,
            -5.0 / 3.0,
            0.0,
            1.6,
            "linear regime Q = 0 with a_bar > 0 (saddle), s = 3/4",
        ),
        figure(
            "fig7_5m",
            -50.0,
            -15.0,
            0.0,
            1.2,
            "linear regime Q = 0 with a_bar < 0 (stable node), s = 1/4",
        ),
        figure(
            "fig7_6p",
            0.0,
            -5.0,
            5.0,
            1.4,
            "degenerate a_bar = 0, Q > 0 (weak stable node); alpha = 1.4 is the \
             exact sign-change exponent of the flat family, s = 1/2",
        ),
        figure(
            "fig7_6m",
            0.0,
            -5.0,
            -5.0,
            1.4,
            "degenerate a_bar = 0, Q < 0 (weak saddle), s = 1/2",
        ),
        figure(
            "fig7_7p",
            1.0,
            0.0,
            1.0,
            1.8,
            "critical alpha = alpha* = 1.8 (n = 7) with Q > 0: conservative center \
             regime with periodic orbits; mirrors fig7_7m with the sign of Q flipped",
        ),
        figure(
            "fig7_7m",
            1.0,
            0.0,
            -1.0,
            1.8,
            "critical alpha = alpha* = 1.8 (n = 7) with Q < 0: saddle only",
        ),
    ]
}

pub fn find_figure(name: &str) -> Option<Scenario> {
    figure_scenarios().into_iter().find(|s| s.name == name)
}

const CONE_KEYS: [&str; 4] = ["p", "q", "rp", "rq"];
const RAW_KEYS: [&str; 3] = ["a_bar", "b_bar", "n"];
const SHARED_KEYS: [&str; 4] = ["alpha", "Q", "name", "notes"];

/// Parse the flat `key=value` configuration format (UTF-8, `#` comments,
/// blank lines ignored). Exactly one of the two parameter forms must be
/// present; all derived invariants are enforced before a scenario is
/// returned.
pub fn parse_config(text: &str) -> Result<Scenario> {
    let mut values: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::InvalidParameter(format!(
                "config line {line_no}: expected key=value, got {line:?}"
            )));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !CONE_KEYS.contains(&key.as_str())
            && !RAW_KEYS.contains(&key.as_str())
            && !SHARED_KEYS.contains(&key.as_str())
        {
            return Err(Error::InvalidParameter(format!(
                "config line {line_no}: unknown key {key:?}"
            )));
        }
        if values.insert(key.clone(), (line_no, value)).is_some() {
            return Err(Error::InvalidParameter(format!(
                "config line {line_no}: duplicate key {key:?}"
            )));
        }
    }

    let has_cone = CONE_KEYS.iter().any(|k| values.contains_key(*k));
    let has_raw = RAW_KEYS.iter().any(|k| values.contains_key(*k));
    if has_cone && has_raw {
        return Err(Error::InvalidParameter(
            "config mixes the cone form (p, q, rp, rq) with the raw form \
             (a_bar, b_bar, n); exactly one form is allowed"
                .to_string(),
        ));
    }
    if !has_cone && !has_raw {
        return Err(Error::InvalidParameter(
            "config must provide either p, q, rp, rq, alpha, Q or \
             a_bar, b_bar, Q, alpha, n"
                .to_string(),
        ));
    }

    let get_f64 = |values: &BTreeMap<String, (usize, String)>, key: &str| -> Result<f64> {
        let (line_no, raw) = values
            .get(key)
            .ok_or_else(|| Error::InvalidParameter(format!("config is missing key {key:?}")))?;
        raw.parse::<f64>().map_err(|_| {
            Error::InvalidParameter(format!(
                "config line {line_no}: value for {key:?} is not a number: {raw:?}"
            ))
        })
    };
    let get_u32 = |values: &BTreeMap<String, (usize, String)>, key: &str| -> Result<u32> {
        let (line_no, raw) = values
            .get(key)
            .ok_or_else(|| Error::InvalidParameter(format!("config is missing key {key:?}")))?;
        raw.parse::<u32>().map_err(|_| {
            Error::InvalidParameter(format!(
                "config line {line_no}: value for {key:?} is not a nonnegative integer: {raw:?}"
            ))
        })
    };

    let name = values
        .get("name")
        .map(|(_, v)| v.clone())
        .unwrap_or_else(|| "user".to_string());
    let notes = values
        .get("notes")
        .map(|(_, v)| v.clone())
        .unwrap_or_default();
    let alpha = get_f64(&values, "alpha")?;
    let q_coef = get_f64(&values, "Q")?;

    let params = if has_cone {
        let cone = ConeParams::new(
            get_u32(&values, "p")?,
            get_u32(&values, "q")?,
            get_f64(&values, "rp")?,
            get_f64(&values, "rq")?,
        )?;
        // validates the alpha range against this cone's dimension
        dynamics::dyn_params(&cone, alpha, q_coef)?;
        ScenarioParams::Cone {
            cone,
            alpha,
            q_coef,
        }
    } else {
        let a_bar = get_f64(&values, "a_bar")?;
        let b_bar = get_f64(&values, "b_bar")?;
        let n = get_u32(&values, "n")?;
        DynParams::from_raw(a_bar, b_bar, q_coef, alpha, n)?;
        ScenarioParams::Raw {
            a_bar,
            b_bar,
            q_coef,
            alpha,
            n,
        }
    };

    Ok(Scenario {
        name,
        source: ScenarioSource::UserConfig,
        params,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{classify_case, CaseId};

    #[test]
    fn registry_has_eleven_read_only_figures() {
        let all = figure_scenarios();
        assert_eq!(all.len(), 11);
        assert!(all.iter().all(|s| s.source == ScenarioSource::Figure));
        assert!(find_figure("fig7_3p").is_some());
        assert!(find_figure("fig9_9").is_none());
    }

    #[test]
    fn figures_classify_to_their_captioned_cases() {
        let expected = [
            ("fig7_1", CaseId::C1),
            ("fig7_2", CaseId::C2),
            ("fig7_3", CaseId::C3),
            ("fig7_3p", CaseId::C3prime),
            ("fig7_4", CaseId::C4),
            ("fig7_5p", CaseId::C5plus),
            ("fig7_5m", CaseId::C5minus),
            ("fig7_6p", CaseId::C6plus),
            ("fig7_6m", CaseId::C6minus),
            ("fig7_7p", CaseId::C7plus),
            ("fig7_7m", CaseId::C7minus),
        ];
        for (name, case) in expected {
            let s = find_figure(name).unwrap();
            let dp = s.dyn_params().unwrap();
            assert_eq!(classify_case(&dp).id, case, "{name}");
        }
    }

    #[test]
    fn parse_minimal_cone_config() {
        let s = parse_config("p=3\nq=3\nrp=1.0\nrq=1.0\nalpha=1.2\nQ=-10\n").unwrap();
        assert_eq!(s.source, ScenarioSource::UserConfig);
        let cone = s.cone().unwrap();
        assert_eq!((cone.p(), cone.q()), (3, 3));
        let dp = s.dyn_params().unwrap();
        assert!(dp.lambda < 0.0);
    }

    #[test]
    fn parse_raw_config_with_comments() {
        let text = "# reference portrait\nname = custom\na_bar = -50\nb_bar = -15\nQ = -10 # sign matters\nalpha = 1.2\nn = 7\n";
        let s = parse_config(text).unwrap();
        assert_eq!(s.name, "custom");
        let dp = s.dyn_params().unwrap();
        assert_eq!(dp.a_bar, -50.0);
    }

    #[test]
    fn parse_rejects_alpha_beyond_critical_naming_the_bound() {
        let err = parse_config("p=3\nq=3\nrp=1\nrq=1\nalpha=2.0\nQ=1\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("(n+2)/(n-2)"), "message was: {msg}");
    }

    #[test]
    fn parse_rejects_mixed_forms_and_bad_lines() {
        assert!(parse_config("p=3\na_bar=1\nalpha=1.2\nQ=1\n").is_err());
        let err = parse_config("p=3\nq 3\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "got: {err}");
        let err = parse_config("bogus=1\n").unwrap_err();
        assert!(err.to_string().contains("unknown key"));
        let err = parse_config("p=3\np=4\n").unwrap_err();
        assert!(err.to_string().contains("duplicate"));
        let err = parse_config("p=3\nq=3\nrp=zzz\nrq=1\nalpha=1.2\nQ=1\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "got: {err}");
        assert!(parse_config("").is_err());
    }

    #[test]
    fn config_round_trips_through_to_config() {
        let s = find_figure("fig7_4").unwrap();
        let text: String = s
            .to_config()
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect();
        let reparsed = parse_config(&text).unwrap();
        assert_eq!(reparsed.name, "fig7_4");
        let a = s.dyn_params().unwrap();
        let b = reparsed.dyn_params().unwrap();
        assert_eq!(a.a_bar, b.a_bar);
        assert_eq!(a.b_bar, b.b_bar);
        assert_eq!(a.alpha, b.alpha);
        assert_eq!(a.q_coef, b.q_coef);
    }
}
