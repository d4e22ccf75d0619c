//! Theorem checks with structured reports and failure witnesses.

mod checks;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraError;
use crate::rules::RuleError;
use crate::series::SeriesError;
use crate::trees::TreeError;
use crate::Rf;

pub use checks::{default_suite, reproduce};

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("invalid parameters for {check}: {reason}")]
    InvalidParams { check: CheckName, reason: String },
    #[error("no case {0:?} in this check")]
    UnknownCase(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Bn,
    SmatrixFree,
    Interaction,
    Bprime,
    Adiabatic,
    Generalized,
    Nonlocal,
    Kinematics,
    Series,
}

impl CheckName {
    pub const ALL: [CheckName; 9] = [
        CheckName::Bn,
        CheckName::SmatrixFree,
        CheckName::Interaction,
        CheckName::Bprime,
        CheckName::Adiabatic,
        CheckName::Generalized,
        CheckName::Nonlocal,
        CheckName::Kinematics,
        CheckName::Series,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::Bn => "bn",
            CheckName::SmatrixFree => "smatrix_free",
            CheckName::Interaction => "interaction",
            CheckName::Bprime => "bprime",
            CheckName::Adiabatic => "adiabatic",
            CheckName::Generalized => "generalized",
            CheckName::Nonlocal => "nonlocal",
            CheckName::Kinematics => "kinematics",
            CheckName::Series => "series",
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CheckName::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| {
            let known: Vec<&str> = CheckName::ALL.iter().map(|c| c.as_str()).collect();
            format!("unknown check {s:?}; known checks: {}", known.join(", "))
        })
    }
}

/// Knobs shared by all checks; each check reads the ones it needs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckParams {
    pub max_n: usize,
    /// Interaction power.
    pub s: usize,
    /// Truncation order of power series.
    pub order: usize,
    /// Number of random kinematic or series samples.
    pub trials: usize,
    pub seed: u64,
    /// Spacetime dimension of sampled momenta.
    pub dim: usize,
}

impl Default for CheckParams {
    fn default() -> Self {
        CheckParams { max_n: 7, s: 3, order: 10, trials: 50, seed: 2024, dim: 4 }
    }
}

/// Deliberate corruption of one input, to show a check can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Fault {
    /// Adds 1 to `a_index` on the computed side of every comparison.
    PerturbDiffeoCoefficient { index: usize },
    /// Adds 1 to the expected value of the case for `n`.
    PerturbExpected { n: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckSpec {
    pub name: CheckName,
    pub params: CheckParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<Fault>,
}

impl CheckSpec {
    pub fn new(name: CheckName, params: CheckParams) -> Self {
        CheckSpec { name, params, fault: None }
    }

    pub fn with_fault(mut self, fault: Fault) -> Self {
        self.fault = Some(fault);
        self
    }

    /// Rejects parameters outside the range each check supports.
    pub fn validate(&self) -> Result<(), VerifyError> {
        let p = &self.params;
        let bad = |reason: String| Err(VerifyError::InvalidParams { check: self.name, reason });
        let (lo, hi) = match self.name {
            CheckName::Bn => (2, 9),
            CheckName::SmatrixFree => (3, 8),
            CheckName::Interaction => (3, 9),
            CheckName::Bprime | CheckName::Adiabatic => (1, 8),
            CheckName::Generalized | CheckName::Nonlocal => (3, 7),
            CheckName::Kinematics => (3, 7),
            CheckName::Series => (0, usize::MAX),
        };
        if p.max_n < lo || p.max_n > hi {
            return bad(format!("max_n = {} is outside {lo}..={hi}", p.max_n));
        }
        if matches!(self.name, CheckName::Interaction | CheckName::Bprime | CheckName::Adiabatic) && !(3..=8).contains(&p.s) {
            return bad(format!("s = {} is outside 3..=8", p.s));
        }
        if p.order == 0 || p.order > 20 {
            return bad(format!("order = {} is outside 1..=20", p.order));
        }
        if p.trials == 0 {
            return bad("trials must be positive".into());
        }
        if p.dim < 2 {
            return bad(format!("dim = {} is below 2", p.dim));
        }
        if let Some(Fault::PerturbDiffeoCoefficient { index: 0 }) = self.fault {
            return bad("a_0 is fixed to 1 and cannot be perturbed".into());
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        })
    }
}

/// The first non-zero residual of a failing check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// `case/part` label; [`reproduce`] re-evaluates exactly this residual.
    pub case: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tree: Option<String>,
    pub residual: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub check: CheckName,
    pub params: CheckParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fault: Option<Fault>,
    pub status: Status,
    /// Number of residuals found to be zero.
    pub residuals_checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Not serialized, so equal inputs give byte-identical output.
    #[serde(skip)]
    pub wall_ms: u128,
}

/// One unit of work inside a check: named residuals that must vanish.
pub(crate) struct Case<'a> {
    pub label: String,
    pub n: Option<usize>,
    pub tree: Option<String>,
    pub eval: Box<dyn Fn() -> Result<Vec<(String, Rf)>, VerifyError> + Send + Sync + 'a>,
}

impl<'a> Case<'a> {
    pub fn new(
        label: impl Into<String>,
        n: Option<usize>,
        eval: impl Fn() -> Result<Vec<(String, Rf)>, VerifyError> + Send + Sync + 'a,
    ) -> Self {
        Case { label: label.into(), n, tree: None, eval: Box::new(eval) }
    }

    pub fn with_tree(mut self, tree: impl Into<String>) -> Self {
        self.tree = Some(tree.into());
        self
    }
}

fn run_cases(cases: Vec<Case<'_>>) -> (Status, usize, Option<Witness>) {
    if cases.is_empty() {
        return (Status::Skipped, 0, None);
    }
    let mut checked = 0;
    for case in cases {
        let fail = |part: &str, residual: String| Witness {
            case: if part.is_empty() { case.label.clone() } else { format!("{}/{part}", case.label) },
            n: case.n,
            tree: case.tree.clone(),
            residual,
        };
        match (case.eval)() {
            Err(e) => return (Status::Fail, checked, Some(fail("", format!("error: {e}")))),
            Ok(parts) => {
                for (part, r) in parts {
                    if !num_traits::Zero::is_zero(&r) {
                        return (Status::Fail, checked, Some(fail(&part, r.to_string())));
                    }
                    checked += 1;
                }
            }
        }
    }
    (Status::Pass, checked, None)
}

/// Runs one check. Invalid parameters give a failing report whose witness
/// carries the reason.
pub fn run_check(spec: &CheckSpec) -> Report {
    let start = Instant::now();
    let (status, residuals_checked, witness) = match spec.validate().and_then(|_| checks::cases(spec)) {
        Ok(cases) => run_cases(cases),
        Err(e) => (Status::Fail, 0, Some(Witness { case: "parameters".into(), n: None, tree: None, residual: format!("error: {e}") })),
    };
    Report {
        check: spec.name,
        params: spec.params.clone(),
        fault: spec.fault,
        status,
        residuals_checked,
        witness,
        wall_ms: start.elapsed().as_millis(),
    }
}

/// Runs checks concurrently; reports come back in input order.
pub fn run_suite(specs: &[CheckSpec]) -> Vec<Report> {
    specs.par_iter().map(run_check).collect()
}

/// The suite passes iff no report failed.
pub fn suite_passes(reports: &[Report]) -> bool {
    reports.iter().all(|r| r.status != Status::Fail)
}
