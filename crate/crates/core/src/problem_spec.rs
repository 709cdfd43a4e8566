//! JSON problem specifications.
//!
//! ```json
//! {
//!   "spec_version": 1,
//!   "problem": {"name": "reduction16", "family": "sum", "input_size": 16},
//!   "subproblems": [{"id": "x", "family": "sum", "size": 8, "operator": "sum8"}],
//!   "dependencies": [["dependent", "prerequisite"]],
//!   "operators": [{"op_id": "sum8", "beta_calc": 7}]
//! }
//! ```
//!
//! `beta_calc` accepts a JSON integer, a decimal number or a `"p/q"` string.

use crate::algorithm::{Algorithm, AlgorithmError, Operator, OperatorSet};
use crate::dag::ElementId;
use crate::decomposition::{
    generate_reduction, reduction_operator, ComputationalProblem, Decomposition,
    DecompositionError, Subproblem,
};
use crate::rational::{parse_rational, to_decimal, Rational};
use num::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use thiserror::Error;

pub const SPEC_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{}{message}", line_prefix(*.line))]
    Invalid { line: Option<usize>, message: String },
}

fn line_prefix(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

impl SpecError {
    pub fn line(&self) -> Option<usize> {
        match self {
            SpecError::Parse { line, .. } => Some(*line),
            SpecError::Invalid { line, .. } => *line,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemHeader {
    pub name: String,
    pub family: String,
    pub input_size: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubproblemEntry {
    pub id: String,
    pub family: String,
    pub size: u64,
    pub operator: String,
}

/// Operator cost as written in the file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BetaValue {
    Number(serde_json::Number),
    Text(String),
}

impl BetaValue {
    pub fn to_rational(&self) -> Option<Rational> {
        match self {
            BetaValue::Number(n) => parse_rational(&n.to_string()).ok(),
            BetaValue::Text(s) => parse_rational(s).ok(),
        }
    }

    /// Integers as JSON numbers, everything else as `"p/q"`.
    pub fn from_rational(r: &Rational) -> Self {
        match (r.is_integer(), r.to_integer().to_i64()) {
            (true, Some(v)) => BetaValue::Number(v.into()),
            _ => BetaValue::Text(r.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorEntry {
    pub op_id: String,
    pub beta_calc: BetaValue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub spec_version: u32,
    pub problem: ProblemHeader,
    pub subproblems: Vec<SubproblemEntry>,
    #[serde(default)]
    pub dependencies: Vec<(String, String)>,
    pub operators: Vec<OperatorEntry>,
}

/// Parsed specification that still carries its source text for diagnostics.
#[derive(Clone, Debug)]
pub struct LoadedSpec {
    pub spec: ProblemSpec,
    source: String,
}

impl LoadedSpec {
    /// Parses JSON text; semantic checks happen in [`LoadedSpec::to_algorithm`].
    pub fn parse(source: &str) -> Result<Self, SpecError> {
        let spec: ProblemSpec = serde_json::from_str(source).map_err(|e| SpecError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let loaded = LoadedSpec {
            spec,
            source: source.to_string(),
        };
        if loaded.spec.spec_version != SPEC_VERSION {
            return Err(loaded.invalid(
                "\"spec_version\"",
                format!(
                    "unsupported spec_version {} (expected {SPEC_VERSION})",
                    loaded.spec.spec_version
                ),
            ));
        }
        Ok(loaded)
    }

    /// First line containing every needle, 1-based.
    fn line_of(&self, needles: &[&str]) -> Option<usize> {
        self.source
            .lines()
            .position(|l| needles.iter().all(|n| l.contains(n)))
            .map(|i| i + 1)
    }

    fn invalid(&self, needle: &str, message: String) -> SpecError {
        SpecError::Invalid {
            line: self.line_of(&[needle]),
            message,
        }
    }

    fn invalid_at(&self, key: &str, value: &str, message: String) -> SpecError {
        SpecError::Invalid {
            line: self
                .line_of(&[key, &Self::quoted(value)])
                .or_else(|| self.line_of(&[&Self::quoted(value)])),
            message,
        }
    }

    fn quoted(s: &str) -> String {
        format!("\"{s}\"")
    }

    /// Validates references, sizes and dependencies and binds operators.
    pub fn to_algorithm(&self) -> Result<Algorithm, SpecError> {
        let spec = &self.spec;
        let parent = ComputationalProblem::new(&spec.problem.family, spec.problem.input_size)
            .map_err(|e| self.invalid("\"input_size\"", e.to_string()))?;

        let mut ops = Vec::new();
        for entry in &spec.operators {
            let beta = entry.beta_calc.to_rational().ok_or_else(|| {
                self.invalid_at(
                    "\"op_id\"",
                    &entry.op_id,
                    format!("operator `{}`: beta_calc is not a rational number", entry.op_id),
                )
            })?;
            let op = Operator::new(&entry.op_id, beta)
                .map_err(|e| self.invalid_at("\"op_id\"", &entry.op_id, e.to_string()))?;
            ops.push(op);
        }
        let ops = OperatorSet::new(ops).map_err(|e| match &e {
            AlgorithmError::DuplicateOperator(id) => self.invalid_at("\"op_id\"", id, e.to_string()),
            _ => self.invalid("\"operators\"", e.to_string()),
        })?;

        let mut subproblems = Vec::new();
        let mut assignment = BTreeMap::new();
        for entry in &spec.subproblems {
            let problem = ComputationalProblem::new(&entry.family, entry.size)
                .map_err(|e| {
                    self.invalid_at("\"id\"", &entry.id, format!("subproblem `{}`: {e}", entry.id))
                })?;
            subproblems.push(Subproblem::new(entry.id.as_str(), problem));
            if assignment
                .insert(ElementId::from(entry.id.as_str()), entry.operator.clone())
                .is_some()
            {
                return Err(self.invalid_at(
                    "\"id\"",
                    &entry.id,
                    format!("duplicate subproblem `{}`", entry.id),
                ));
            }
        }
        let deps: Vec<(ElementId, ElementId)> = spec
            .dependencies
            .iter()
            .map(|(a, b)| (ElementId::from(a.as_str()), ElementId::from(b.as_str())))
            .collect();

        let single_whole = spec.subproblems.len() == 1
            && deps.is_empty()
            && subproblems[0].problem == parent;
        let decomposition = if single_whole {
            Decomposition::atomic(parent, subproblems[0].id.clone())
        } else {
            Decomposition::new(parent, subproblems, deps).map_err(|e| self.decomposition_error(e))?
        };
        Algorithm::bind(Arc::new(decomposition), &assignment, &ops).map_err(|e| match &e {
            AlgorithmError::UnknownOperator(op) => self.invalid_at("\"operator\"", op, e.to_string()),
            AlgorithmError::UnboundSubproblem(id) | AlgorithmError::UnknownSubproblem(id) => {
                self.invalid_at("\"id\"", id.as_str(), e.to_string())
            }
            _ => self.invalid("\"subproblems\"", e.to_string()),
        })
    }

    fn decomposition_error(&self, e: DecompositionError) -> SpecError {
        use crate::dag::DagError;
        match &e {
            DecompositionError::SubproblemTooLarge { id, .. }
            | DecompositionError::Dag(DagError::DuplicateElement(id)) => {
                self.invalid_at("\"id\"", id.as_str(), e.to_string())
            }
            DecompositionError::Dag(DagError::UnknownElement(id)) => {
                self.invalid(&Self::quoted(id.as_str()), e.to_string())
            }
            DecompositionError::Dag(DagError::Cycle { .. }) => self.invalid("\"dependencies\"", e.to_string()),
            _ => self.invalid("\"subproblems\"", e.to_string()),
        }
    }
}

impl ProblemSpec {
    /// Serializes an algorithm; subproblems and dependencies come out sorted.
    pub fn from_algorithm(name: &str, a: &Algorithm) -> Self {
        let d = a.decomposition();
        let subproblems = d
            .subproblems()
            .iter()
            .map(|s| SubproblemEntry {
                id: s.id.to_string(),
                family: s.problem.family().to_string(),
                size: s.problem.input_size(),
                operator: a.operator(&s.id).expect("bound").op_id().to_string(),
            })
            .collect();
        let dependencies = d
            .dag()
            .edges()
            .into_iter()
            .map(|(x, y)| (x.to_string(), y.to_string()))
            .collect();
        let mut seen = BTreeSet::new();
        let operators = a
            .binding()
            .values()
            .filter(|op| seen.insert(op.op_id().to_string()))
            .map(|op| OperatorEntry {
                op_id: op.op_id().to_string(),
                beta_calc: BetaValue::from_rational(op.beta_calc()),
            })
            .collect::<Vec<_>>();
        let mut operators = operators;
        operators.sort_by(|x, y| x.op_id.cmp(&y.op_id));
        ProblemSpec {
            spec_version: SPEC_VERSION,
            problem: ProblemHeader {
                name: name.to_string(),
                family: d.parent().family().to_string(),
                input_size: d.parent().input_size(),
            },
            subproblems,
            dependencies,
            operators,
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }
}

/// Refinement level of a generated reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefinementLevel {
    /// 1-based level; 1 is the coarsest split.
    Level(usize),
    Full,
}

/// Algorithm for a level of the pairwise-sum reduction of `n` numbers.
/// Blocks of `m > 2` numbers use a `sum{m}` operator of cost `m - 1`; every
/// pairwise addition uses `add` of cost 1.
pub fn reduction_algorithm(n: u64, level: RefinementLevel) -> Result<Algorithm, DecompositionError> {
    let (_, mut levels) = generate_reduction(n)?;
    let d = match level {
        RefinementLevel::Full => levels.pop().expect("at least one level"),
        RefinementLevel::Level(l) if l >= 1 && l <= levels.len() => levels.swap_remove(l - 1),
        RefinementLevel::Level(level) => {
            return Err(DecompositionError::NoSuchLevel {
                level,
                levels: levels.len(),
            })
        }
    };
    Ok(Algorithm::bind_with(Arc::new(d), |s| {
        let (op, beta) = reduction_operator(s.problem.input_size());
        Operator::new(op, beta).expect("reduction costs are at least 1")
    }))
}

/// Decimal rendering of an operator cost, for tables.
pub fn beta_display(beta: &Rational) -> String {
    if beta.is_integer() {
        beta.to_string()
    } else {
        format!("{beta} ({})", to_decimal(beta))
    }
}
