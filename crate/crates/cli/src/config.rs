use std::path::Path;

use diffeo_core::algebra::{parse_rational, Symbol};
use diffeo_core::rules::{DiffeoSpec, Interaction, NonlocalSpec, Propagator, TheorySpec};
use diffeo_core::verify::{CheckParams, Fault};
use diffeo_core::{Rf, Scalar};
use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Pretty,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagatorKind {
    #[default]
    Standard,
    Generalized,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum InteractionConfig {
    Power(usize),
    Coupled { s: usize, lambda: String },
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoryConfig {
    #[serde(default)]
    pub propagator: PropagatorKind,
    /// Exact rational `"p/q"` or a symbol name; `msq` when absent.
    pub mass_sq: Option<String>,
    #[serde(default)]
    pub interactions: Vec<InteractionConfig>,
    /// `beta_0, beta_1, ...` of a generalized propagator.
    pub beta: Option<Vec<String>>,
    /// `alpha_0 = 1, alpha_1, ...` of a non-local transformation; sets `beta`.
    pub alpha: Option<Vec<String>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffeoConfig {
    /// `a_0 = 1, a_1, ...`; symbolic `a_j` when absent.
    pub a: Option<Vec<String>>,
    /// Highest symbolic `a_j` when `a` is absent.
    pub order: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub checks: Option<Vec<String>>,
    pub max_n: Option<usize>,
    pub s: Option<usize>,
    pub order: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub dim: Option<usize>,
    pub jobs: Option<usize>,
    pub fault: Option<Fault>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub format: Option<Format>,
    #[serde(default)]
    pub trace: bool,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub theory: TheoryConfig,
    #[serde(default)]
    pub diffeo: DiffeoConfig,
    #[serde(default)]
    pub suite: SuiteConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// `"p/q"`, an integer, or a symbol name with an optional leading `-`.
pub fn parse_value(text: &str) -> Result<Rf, CliError> {
    let text = text.trim();
    if let Ok(q) = parse_rational(text) {
        return Ok(Rf::constant(Scalar::from(q)));
    }
    let (neg, name) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let sym = Symbol::parse(name).ok_or_else(|| CliError::Config(format!("cannot read value {text:?}: expected \"p/q\" or a symbol name")))?;
    if sym.is_edge() {
        return Err(CliError::Config(format!("edge variable {text:?} is not allowed in a configuration value")));
    }
    let v = Rf::var(sym);
    Ok(if neg { -v } else { v })
}

fn parse_list(values: &[String]) -> Result<Vec<Rf>, CliError> {
    values.iter().map(|v| parse_value(v)).collect()
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.theory()?;
        cfg.diffeo()?;
        Ok(cfg)
    }

    pub fn theory(&self) -> Result<TheorySpec, CliError> {
        let t = &self.theory;
        let mass_sq = match &t.mass_sq {
            Some(m) => parse_value(m)?,
            None => Rf::var(Symbol::MassSq),
        };
        let interactions = t
            .interactions
            .iter()
            .map(|i| match i {
                InteractionConfig::Power(s) => Ok(Interaction { s: *s, lambda: Rf::var(Symbol::Coupling(*s as u32)) }),
                InteractionConfig::Coupled { s, lambda } => Ok(Interaction { s: *s, lambda: parse_value(lambda)? }),
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let theory = match t.propagator {
            PropagatorKind::Standard => {
                if t.beta.is_some() || t.alpha.is_some() {
                    return Err(CliError::Config("beta and alpha need \"propagator\": \"generalized\"".into()));
                }
                TheorySpec { propagator: Propagator::Standard { mass_sq }, interactions }
            }
            PropagatorKind::Generalized => match (&t.beta, &t.alpha) {
                (Some(beta), None) => TheorySpec { propagator: Propagator::Generalized { beta: parse_list(beta)? }, interactions },
                (None, Some(alpha)) => {
                    let spec = NonlocalSpec::new(parse_list(alpha)?, mass_sq).map_err(|e| CliError::Config(e.to_string()))?;
                    let mut theory = spec.theory().map_err(|e| CliError::Config(e.to_string()))?;
                    theory.interactions = interactions;
                    theory
                }
                (None, None) => {
                    let beta = (0..3).map(|k| Rf::var(Symbol::PropagatorBeta(k))).collect();
                    TheorySpec { propagator: Propagator::Generalized { beta }, interactions }
                }
                (Some(_), Some(_)) => return Err(CliError::Config("give either beta or alpha, not both".into())),
            },
        };
        theory.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(theory)
    }

    pub fn diffeo(&self) -> Result<DiffeoSpec, CliError> {
        match &self.diffeo.a {
            Some(a) => DiffeoSpec::from_coeffs(parse_list(a)?).map_err(|e| CliError::Config(e.to_string())),
            None => Ok(DiffeoSpec::symbolic(self.diffeo.order.unwrap_or(9))),
        }
    }

    pub fn params(&self) -> CheckParams {
        let d = CheckParams::default();
        let s = &self.suite;
        CheckParams {
            max_n: s.max_n.unwrap_or(d.max_n),
            s: s.s.unwrap_or(d.s),
            order: s.order.unwrap_or(d.order),
            trials: s.trials.unwrap_or(d.trials),
            seed: s.seed.unwrap_or(d.seed),
            dim: s.dim.unwrap_or(d.dim),
        }
    }
}
