//! Experiment configuration: parsing, defaults and validation.
//!
//! A spec is a TOML file (or JSON, chosen by the `.json` extension):
//!
//! ```toml
//! kind = "cue-moments"
//! seed = 7
//!
//! [params]
//! n = [128, 256]
//! alpha = 0.5
//! eps = 0.05
//! gamma = 0.5
//!
//! [tolerances]
//! rel_gap = 0.02
//! ```
//!
//! Any list parameter also accepts a single number.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use mesochaos::covariance::{KernelParams, Mollifier};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    BoCheck,
    CueLaplace,
    CueMoments,
    SineLaplace,
    SineGap,
    SineMoments,
    GmcSimulate,
    CovarianceSuite,
    SelbergTable,
}

impl Kind {
    pub const ALL: [Kind; 9] = [
        Kind::BoCheck,
        Kind::CueLaplace,
        Kind::CueMoments,
        Kind::SineLaplace,
        Kind::SineGap,
        Kind::SineMoments,
        Kind::GmcSimulate,
        Kind::CovarianceSuite,
        Kind::SelbergTable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::BoCheck => "bo-check",
            Kind::CueLaplace => "cue-laplace",
            Kind::CueMoments => "cue-moments",
            Kind::SineLaplace => "sine-laplace",
            Kind::SineGap => "sine-gap",
            Kind::SineMoments => "sine-moments",
            Kind::GmcSimulate => "gmc-simulate",
            Kind::CovarianceSuite => "covariance-suite",
            Kind::SelbergTable => "selberg-table",
        }
    }

    /// Result in the source article that the experiment exercises.
    pub fn anchor(self) -> &'static str {
        match self {
            Kind::BoCheck => "Thm 3.5",
            Kind::CueLaplace => "Prop 3.3",
            Kind::CueMoments => "Thm 1.3",
            Kind::SineLaplace => "Prop 1.9",
            Kind::SineGap => "Thm 1.5",
            Kind::SineMoments => "Thm 1.8",
            Kind::GmcSimulate => "Prop 1.6",
            Kind::CovarianceSuite => "Cor 2.12",
            Kind::SelbergTable => "Thm 1.3",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Kind::BoCheck => "Borodin–Okounkov identity for Toeplitz determinants",
            Kind::CueLaplace => "CUE mesoscopic Laplace transform against its Gaussian limit",
            Kind::CueMoments => "CUE chaos mass moments and Selberg-type limits",
            Kind::SineLaplace => "sine-process Laplace transform asymptotics",
            Kind::SineGap => "sine-process gap probabilities via Fredholm determinants",
            Kind::SineMoments => "sine-process chaos mass moments",
            Kind::GmcSimulate => "regularized Gaussian multiplicative chaos simulation",
            Kind::CovarianceSuite => "covariance kernel assumption checks",
            Kind::SelbergTable => "Selberg and Dyson integrals against quadrature",
        }
    }

    pub fn is_moment(self) -> bool {
        matches!(
            self,
            Kind::CueMoments | Kind::SineMoments | Kind::GmcSimulate
        )
    }

    pub fn is_cue(self) -> bool {
        matches!(self, Kind::BoCheck | Kind::CueLaplace | Kind::CueMoments)
    }

    /// Tolerance keys accepted in `[tolerances]`, with defaults.
    pub fn tolerance_defaults(self) -> &'static [(&'static str, f64)] {
        match self {
            Kind::BoCheck => &[("residual", 1e-8)],
            Kind::SelbergTable => &[("rel_gap", 1e-6), ("sigmas", 4.0)],
            Kind::CueMoments => &[("rel_gap", 0.02), ("sigmas", 4.0)],
            Kind::SineMoments => &[("rel_gap", 0.03), ("sigmas", 4.0)],
            Kind::GmcSimulate | Kind::SineGap => &[("sigmas", 4.0)],
            Kind::CovarianceSuite => &[("growth", 0.1), ("halving", 0.5), ("band", 2.0)],
            Kind::CueLaplace | Kind::SineLaplace => &[],
        }
    }

    pub fn default_figure(self) -> Option<FigureStyle> {
        match self {
            Kind::CueLaplace | Kind::SineLaplace | Kind::CovarianceSuite => {
                Some(FigureStyle::LoglogDecay)
            }
            Kind::CueMoments | Kind::SineMoments | Kind::GmcSimulate => {
                Some(FigureStyle::MomentCompare)
            }
            _ => None,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FigureStyle {
    LoglogDecay,
    MomentCompare,
    DensitySnapshot,
}

impl fmt::Display for FigureStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FigureStyle::LoglogDecay => "loglog-decay",
            FigureStyle::MomentCompare => "moment-compare",
            FigureStyle::DensitySnapshot => "density-snapshot",
        })
    }
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(f64),
        Many(Vec<f64>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(x) => vec![x],
        OneOrMany::Many(v) => v,
    })
}

/// Raw numeric parameters. Empty lists and missing values fall back to
/// per-kind defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Matrix sizes (CUE) or densities (sine).
    #[serde(
        default,
        deserialize_with = "one_or_many",
        skip_serializing_if = "Vec::is_empty"
    )]
    pub n: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(
        default,
        deserialize_with = "one_or_many",
        skip_serializing_if = "Vec::is_empty"
    )]
    pub eps: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<f64>,
    /// `ℓ = N^β` instead of a fixed `ℓ`.
    #[serde(
        default,
        deserialize_with = "one_or_many",
        skip_serializing_if = "Vec::is_empty"
    )]
    pub beta: Vec<f64>,
    #[serde(
        default,
        deserialize_with = "one_or_many",
        skip_serializing_if = "Vec::is_empty"
    )]
    pub gamma: Vec<f64>,
    /// `γ²` values, used by `selberg-table`.
    #[serde(
        default,
        deserialize_with = "one_or_many",
        skip_serializing_if = "Vec::is_empty"
    )]
    pub gamma2: Vec<f64>,
    #[serde(
        default,
        deserialize_with = "one_or_many",
        skip_serializing_if = "Vec::is_empty"
    )]
    pub q: Vec<f64>,
    /// Statistic centers, or the lattice for `covariance-suite`.
    #[serde(
        default,
        deserialize_with = "one_or_many",
        skip_serializing_if = "Vec::is_empty"
    )]
    pub u: Vec<f64>,
    /// Gap lengths for `sine-gap`.
    #[serde(
        default,
        deserialize_with = "one_or_many",
        skip_serializing_if = "Vec::is_empty"
    )]
    pub lengths: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mollifier: Option<String>,
    /// Length of the weight interval `[0, r]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Height of the Gaussian bump in `sine-laplace`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: Kind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub params: Params,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure: Option<FigureStyle>,
}

impl ExperimentSpec {
    pub fn new(kind: Kind) -> Self {
        Self {
            kind,
            seed: 0,
            params: Params::default(),
            tolerances: BTreeMap::new(),
            output: None,
            figure: None,
        }
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let parsed = if json {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|message| HarnessError::Parse {
            path: path.to_owned(),
            message,
        })
    }

    /// Applies defaults and checks every constraint, collecting all problems.
    pub fn resolve(&self) -> Result<Resolved> {
        let kind = self.kind;
        let p = &self.params;
        let mut issues = Vec::new();
        let or = |v: &Vec<f64>, d: &[f64]| if v.is_empty() { d.to_vec() } else { v.clone() };

        let (n_def, eps_def, gamma_def): (&[f64], &[f64], &[f64]) = match kind {
            Kind::BoCheck => (&[4.0, 8.0, 16.0], &[0.3], &[1.0]),
            Kind::CueLaplace => (&[64.0, 128.0, 256.0, 512.0], &[0.1], &[1.0]),
            Kind::CueMoments => (&[128.0], &[0.05], &[0.5]),
            Kind::SineLaplace => (&[4.0, 8.0, 16.0, 32.0, 64.0], &[0.05], &[1.0]),
            Kind::SineGap => (&[1.0], &[0.1], &[1.0]),
            Kind::SineMoments => (&[16.0], &[0.05], &[0.5]),
            Kind::GmcSimulate => (&[1.0], &[0.1, 0.05], &[0.5]),
            Kind::CovarianceSuite => (&[1.0], &[0.1, 0.01, 0.001], &[1.0]),
            Kind::SelbergTable => (&[1.0], &[0.1], &[1.0]),
        };
        let n = or(&p.n, n_def);
        let eps = or(&p.eps, eps_def);
        let gamma = or(&p.gamma, gamma_def);
        let q_def: &[f64] = match kind {
            Kind::GmcSimulate => &[1.0, 2.0],
            _ => &[2.0],
        };
        let q_raw = or(&p.q, q_def);
        let u_def: Vec<f64> = match kind {
            Kind::CovarianceSuite => (0..=8).map(|i| -2.0 + 0.5 * i as f64).collect(),
            Kind::CueLaplace => vec![0.0, 0.5],
            _ => vec![0.0],
        };
        let u = or(&p.u, &u_def);
        let gamma2 = or(&p.gamma2, &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]);
        let lengths = or(&p.lengths, &[0.25, 0.5, 1.0, 1.5]);
        let alpha = p.alpha.unwrap_or(0.5);
        let r = p.r.unwrap_or(1.0);
        let amplitude = p.amplitude.unwrap_or(0.5);
        let trials = p.trials.or(match kind {
            Kind::GmcSimulate => Some(1000),
            _ => None,
        });

        let mollifier = match p.mollifier.as_deref().map(Mollifier::from_str).transpose() {
            Ok(m) => m.unwrap_or(Mollifier::Gaussian),
            Err(e) => {
                issues.push(e.to_string());
                Mollifier::Gaussian
            }
        };
        let ell = match p.ell.map(KernelParams::new).transpose() {
            Ok(e) => e,
            Err(e) => {
                issues.push(format!("ell: {e}"));
                None
            }
        };
        if ell.is_some() && !p.beta.is_empty() {
            issues.push("give either ell or beta, not both".into());
        }

        let positive = |name: &str, v: &[f64], issues: &mut Vec<String>| {
            if v.is_empty() {
                issues.push(format!("{name} must not be empty"));
            }
            for x in v {
                if !(x.is_finite() && *x > 0.0) {
                    issues.push(format!("{name} entries must be positive, got {x}"));
                }
            }
        };
        positive("n", &n, &mut issues);
        positive("eps", &eps, &mut issues);
        positive("lengths", &lengths, &mut issues);
        if !(r.is_finite() && r > 0.0) {
            issues.push(format!("r must be positive, got {r}"));
        }
        if kind.is_cue() {
            for x in &n {
                if x.fract() != 0.0 {
                    issues.push(format!("CUE matrix size must be an integer, got {x}"));
                }
            }
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            issues.push(format!("alpha must lie in (0, 1), got {alpha}"));
        }
        for b in &p.beta {
            if !(*b >= 0.0 && *b < alpha) {
                issues.push(format!(
                    "beta must lie in [0, alpha) so that ℓ = N^β stays mesoscopic, got {b}"
                ));
            }
        }
        for g in &gamma {
            if !(g.is_finite() && *g >= 0.0) {
                issues.push(format!("gamma must be nonnegative, got {g}"));
            }
        }
        for g in &gamma2 {
            if !(g.is_finite() && *g > 0.0) {
                issues.push(format!("gamma2 must be positive, got {g}"));
            }
        }
        let mut q = Vec::new();
        for &x in &q_raw {
            if x.fract() != 0.0 || x < 1.0 {
                issues.push(format!("q must be a positive integer, got {x}"));
            } else {
                q.push(x as u32);
            }
        }
        if kind.is_moment() {
            for g in &gamma {
                for &qq in &q {
                    if g * g * qq as f64 >= 2.0 {
                        issues.push(format!(
                            "subcritical guard γ²q < 2 fails for γ = {g}, q = {qq}"
                        ));
                    }
                }
            }
        }
        if kind == Kind::SelbergTable {
            for g in &gamma2 {
                for &qq in &q {
                    if g * qq as f64 >= 2.0 {
                        issues.push(format!("Selberg integral diverges for γ² = {g}, q = {qq}"));
                    }
                }
            }
            if q.iter().any(|&qq| qq > 3) {
                issues.push("selberg-table supports q ≤ 3".into());
            }
        }
        if kind == Kind::CovarianceSuite && u.len() < 2 {
            issues.push("covariance-suite needs at least two lattice points".into());
        }

        let defaults = kind.tolerance_defaults();
        let mut tolerances: BTreeMap<String, f64> =
            defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        for (k, v) in &self.tolerances {
            if !defaults.iter().any(|(d, _)| d == k) {
                let known: Vec<_> = defaults.iter().map(|(d, _)| *d).collect();
                issues.push(format!(
                    "unknown tolerance `{k}` for {kind} (known: {known:?})"
                ));
            } else if !(v.is_finite() && *v > 0.0) {
                issues.push(format!("tolerance `{k}` must be positive, got {v}"));
            } else {
                tolerances.insert(k.clone(), *v);
            }
        }

        if !issues.is_empty() {
            return Err(HarnessError::Invalid(issues));
        }
        Ok(Resolved {
            kind,
            seed: self.seed,
            n,
            alpha,
            eps,
            ell: ell.unwrap_or(KernelParams { ell: 1.0 }),
            beta: p.beta.clone(),
            gamma,
            gamma2,
            q,
            u,
            lengths,
            trials,
            mollifier,
            r,
            amplitude,
            tolerances,
        })
    }
}

/// A validated spec with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub kind: Kind,
    pub seed: u64,
    pub n: Vec<f64>,
    pub alpha: f64,
    pub eps: Vec<f64>,
    pub ell: KernelParams,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub gamma2: Vec<f64>,
    pub q: Vec<u32>,
    pub u: Vec<f64>,
    pub lengths: Vec<f64>,
    pub trials: Option<u64>,
    pub mollifier: Mollifier,
    pub r: f64,
    pub amplitude: f64,
    pub tolerances: BTreeMap<String, f64>,
}

impl Resolved {
    pub fn tol(&self, key: &str) -> f64 {
        self.tolerances[key]
    }

    /// `ℓ` values to sweep for size `n`: the fixed `ℓ`, or `N^β` per β.
    pub fn ells(&self, n: f64) -> Vec<f64> {
        if self.beta.is_empty() {
            vec![self.ell.ell]
        } else {
            self.beta.iter().map(|b| n.powf(*b)).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> ExperimentSpec {
        toml::from_str(text).unwrap()
    }

    #[test]
    fn scalars_and_lists_both_accepted() {
        let s = parse("kind = \"cue-moments\"\n[params]\nn = 64\neps = [0.1, 0.05]\n");
        assert_eq!(s.params.n, vec![64.0]);
        assert_eq!(s.params.eps, vec![0.1, 0.05]);
        let r = s.resolve().unwrap();
        assert_eq!(r.gamma, vec![0.5]);
        assert_eq!(r.tol("rel_gap"), 0.02);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(
            toml::from_str::<ExperimentSpec>("kind = \"bo-check\"\n[params]\nnn = 3\n").is_err()
        );
        assert!(toml::from_str::<ExperimentSpec>("kind = \"no-such\"\n").is_err());
        let mut s = ExperimentSpec::new(Kind::BoCheck);
        s.tolerances.insert("rel_gap".into(), 1.0);
        assert!(matches!(s.resolve(), Err(HarnessError::Invalid(_))));
    }

    #[test]
    fn subcritical_guard() {
        let mut s = ExperimentSpec::new(Kind::GmcSimulate);
        s.params.gamma = vec![1.1];
        s.params.q = vec![2.0];
        let Err(HarnessError::Invalid(issues)) = s.resolve() else {
            panic!("expected diagnostics");
        };
        assert!(issues.iter().any(|i| i.contains("γ²q < 2")), "{issues:?}");
        s.params.gamma = vec![0.9];
        assert!(s.resolve().is_ok());
    }

    #[test]
    fn all_problems_reported_together() {
        let mut s = ExperimentSpec::new(Kind::CueLaplace);
        s.params.n = vec![10.5];
        s.params.alpha = Some(1.5);
        s.params.eps = vec![-1.0];
        s.params.mollifier = Some("boxcar".into());
        let Err(HarnessError::Invalid(issues)) = s.resolve() else {
            panic!("expected diagnostics");
        };
        assert_eq!(issues.len(), 4, "{issues:?}");
    }

    #[test]
    fn beta_mode() {
        let mut s = ExperimentSpec::new(Kind::CueMoments);
        s.params.beta = vec![0.2, 0.3];
        let r = s.resolve().unwrap();
        let ells = r.ells(256.0);
        assert!((ells[0] - 256f64.powf(0.2)).abs() < 1e-12);
        s.params.beta = vec![0.6];
        assert!(s.resolve().is_err());
        s.params.beta = vec![0.2];
        s.params.ell = Some(2.0);
        assert!(s.resolve().is_err());
    }

    #[test]
    fn json_and_toml_agree() {
        let t =
            parse("kind = \"sine-gap\"\nseed = 3\n[params]\nlengths = [0.5, 1.0]\ntrials = 10\n");
        let j: ExperimentSpec = serde_json::from_str(
            r#"{"kind":"sine-gap","seed":3,"params":{"lengths":[0.5,1.0],"trials":10}}"#,
        )
        .unwrap();
        assert_eq!(t, j);
        let back: ExperimentSpec =
            serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(back, t);
    }
}
