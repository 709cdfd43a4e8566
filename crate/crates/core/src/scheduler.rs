//! Mapping algorithms onto `P` processing elements.
//!
//! An [`ExecutionMatrix`] has one column per processor and one row per time
//! step. Rows run one after another; a row lasts as long as its most
//! expensive operator.

use crate::algorithm::{Algorithm, Operator};
use crate::dag::{DependencyDag, DependencyMatrix, ElementId, ValidationReport};
use crate::rational::Rational;
use num::One;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("processor count must be at least 1")]
    ZeroProcessors,
    #[error("decomposition is not perfectly decomposed (it has empty cells or a single column)")]
    NotPerfectlyDecomposed,
    #[error("cannot split {c_d} columns into {n} row groups: n must divide c_D and be below it (or 1)")]
    InvalidDivisor { c_d: usize, n: usize },
    #[error("row {row} has {len} cells, expected {processors}")]
    RaggedRow { row: usize, len: usize, processors: usize },
    #[error("execution matrix holds no operator")]
    NoOperators,
    #[error("element `{0}` scheduled more than once")]
    DuplicateElement(ElementId),
    #[error("element `{0}` has no bound operator")]
    Unbound(ElementId),
    #[error("operator cost {0} is below 1")]
    BetaBelowOne(Rational),
}

/// One operator instance placed in an execution matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScheduledOp {
    pub element: ElementId,
    pub op_id: String,
    #[serde(with = "crate::rational::exact")]
    pub beta: Rational,
}

impl ScheduledOp {
    pub fn new(element: impl Into<ElementId>, op_id: impl Into<String>, beta: Rational) -> Self {
        ScheduledOp {
            element: element.into(),
            op_id: op_id.into(),
            beta,
        }
    }

    fn from_binding(element: &ElementId, op: &Operator) -> Self {
        ScheduledOp::new(element.clone(), op.op_id(), op.beta_calc().clone())
    }
}

/// `r_E x c_E` grid of operator instances, `c_E = P`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecutionMatrix {
    processors: usize,
    rows: Vec<Vec<Option<ScheduledOp>>>,
}

impl ExecutionMatrix {
    /// Checks shape, cost floor, element uniqueness and that at least one
    /// operator is present.
    pub fn new(processors: usize, rows: Vec<Vec<Option<ScheduledOp>>>) -> Result<Self, ScheduleError> {
        if processors == 0 {
            return Err(ScheduleError::ZeroProcessors);
        }
        let mut seen = BTreeSet::new();
        for (r, row) in rows.iter().enumerate() {
            if row.len() != processors {
                return Err(ScheduleError::RaggedRow {
                    row: r,
                    len: row.len(),
                    processors,
                });
            }
            for op in row.iter().flatten() {
                if op.beta < Rational::one() {
                    return Err(ScheduleError::BetaBelowOne(op.beta.clone()));
                }
                if !seen.insert(&op.element) {
                    return Err(ScheduleError::DuplicateElement(op.element.clone()));
                }
            }
        }
        if seen.is_empty() {
            return Err(ScheduleError::NoOperators);
        }
        Ok(ExecutionMatrix { processors, rows })
    }

    /// `c_E`.
    pub fn processors(&self) -> usize {
        self.processors
    }

    /// `r_E`.
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Option<ScheduledOp>>] {
        &self.rows
    }

    pub fn cell(&self, row: usize, col: usize) -> Option<&ScheduledOp> {
        self.rows.get(row)?.get(col)?.as_ref()
    }

    /// Non-empty cells, i.e. the algorithm's complexity `k`.
    pub fn op_count(&self) -> usize {
        self.rows.iter().flatten().flatten().count()
    }

    pub fn ops(&self) -> impl Iterator<Item = &ScheduledOp> {
        self.rows.iter().flatten().flatten()
    }

    pub fn row_widths(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.iter().flatten().count()).collect()
    }

    /// Empty cells per row.
    pub fn sparsity(&self) -> Vec<usize> {
        self.row_widths().iter().map(|w| self.processors - w).collect()
    }

    pub fn total_sparsity(&self) -> usize {
        self.sparsity().iter().sum()
    }

    pub fn empty_row_count(&self) -> usize {
        self.row_widths().iter().filter(|&&w| w == 0).count()
    }

    pub fn is_uniform(&self) -> bool {
        self.ops().all(|op| op.beta.is_one())
    }

    /// The single-processor schedule of the same operators: one per row,
    /// rows in order, ascending id within a row.
    pub fn serialize(&self) -> ExecutionMatrix {
        let rows = self
            .rows
            .iter()
            .flat_map(|row| {
                let mut ops: Vec<&ScheduledOp> = row.iter().flatten().collect();
                ops.sort_by(|a, b| a.element.cmp(&b.element));
                ops.into_iter().map(|op| vec![Some(op.clone())])
            })
            .collect();
        ExecutionMatrix {
            processors: 1,
            rows,
        }
    }

    pub fn classify(&self) -> Classification {
        classify(self)
    }

    pub fn row_profile(&self) -> RowProfile {
        row_profile(self)
    }

    /// JSON view: grids of operator ids and element ids, `null` for empty.
    pub fn to_json(&self) -> serde_json::Value {
        let grid = |f: &dyn Fn(&ScheduledOp) -> String| -> Vec<Vec<Option<String>>> {
            self.rows
                .iter()
                .map(|r| r.iter().map(|c| c.as_ref().map(f)).collect())
                .collect()
        };
        serde_json::json!({
            "processors": self.processors,
            "rows": self.row_count(),
            "operators": self.op_count(),
            "empty_cells": self.total_sparsity(),
            "classification": self.classify(),
            "grid": grid(&|op| op.op_id.clone()),
            "elements": grid(&|op| op.element.to_string()),
        })
    }
}

impl fmt::Display for ExecutionMatrix {
    /// ASCII grid, one line per row, `.` for empty cells.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = |c: &Option<ScheduledOp>| match c {
            Some(op) => format!("{}:{}", op.element, op.op_id),
            None => ".".to_string(),
        };
        let width = self.rows.iter().flatten().map(|c| label(c).len()).max().unwrap_or(1);
        let rule = format!(
            "+{}+",
            vec!["-".repeat(width + 2); self.processors].join("+")
        );
        writeln!(f, "{rule}")?;
        for row in &self.rows {
            write!(f, "|")?;
            for c in row {
                write!(f, " {:<width$} |", label(c))?;
            }
            writeln!(f)?;
        }
        write!(f, "{rule}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    PerfectlyParallel,
    Sequential,
    Parallel,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::PerfectlyParallel => "perfectly parallel",
            Classification::Sequential => "sequential",
            Classification::Parallel => "parallel",
        })
    }
}

pub fn classify(m: &ExecutionMatrix) -> Classification {
    if m.processors == 1 {
        Classification::Sequential
    } else if m.total_sparsity() == 0 {
        Classification::PerfectlyParallel
    } else {
        Classification::Parallel
    }
}

/// Row counts by number of occupied cells.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowProfile {
    /// Rows with exactly one operator.
    pub r_seq: usize,
    /// `r_par[i]`: rows with exactly `i` operators, `i` in `1..=P`.
    pub r_par: BTreeMap<usize, usize>,
    /// Rows with no operator at all.
    pub r_empty: usize,
    /// Empty cells per row.
    pub sparsity: Vec<usize>,
}

impl RowProfile {
    pub fn r_par_i(&self, i: usize) -> usize {
        self.r_par.get(&i).copied().unwrap_or(0)
    }

    /// Rows with more than one operator.
    pub fn r_par_total(&self) -> usize {
        self.r_par.iter().filter(|(&i, _)| i > 1).map(|(_, c)| c).sum()
    }
}

pub fn row_profile(m: &ExecutionMatrix) -> RowProfile {
    let widths = m.row_widths();
    let mut r_par = BTreeMap::new();
    for &w in widths.iter().filter(|&&w| w > 0) {
        *r_par.entry(w).or_insert(0) += 1;
    }
    RowProfile {
        r_seq: r_par.get(&1).copied().unwrap_or(0),
        r_par,
        r_empty: widths.iter().filter(|&&w| w == 0).count(),
        sparsity: m.sparsity(),
    }
}

fn lookup<'a>(a: &'a Algorithm, id: &ElementId) -> Result<&'a Operator, ScheduleError> {
    a.operator(id).ok_or_else(|| ScheduleError::Unbound(id.clone()))
}

/// Splits every decomposition row of width `w` into `ceil(w / P)` execution
/// rows, filled left to right in canonical cell order.
pub fn schedule_level_chunked(
    a: &Algorithm,
    m_d: &DependencyMatrix,
    processors: usize,
) -> Result<ExecutionMatrix, ScheduleError> {
    if processors == 0 {
        return Err(ScheduleError::ZeroProcessors);
    }
    let mut rows = Vec::new();
    for r in 0..m_d.dependency_degree() {
        let ops = m_d
            .row_elements(r)
            .map(|id| Ok(ScheduledOp::from_binding(id, lookup(a, id)?)))
            .collect::<Result<Vec<_>, ScheduleError>>()?;
        for chunk in ops.chunks(processors) {
            let mut row: Vec<Option<ScheduledOp>> = chunk.iter().cloned().map(Some).collect();
            row.resize(processors, None);
            rows.push(row);
        }
    }
    ExecutionMatrix::new(processors, rows)
}

/// Row-synchronous greedy list scheduling: each row takes up to `P` ready
/// operators (all prerequisites in earlier rows), smallest id first.
pub fn schedule_greedy_list(
    a: &Algorithm,
    dag: &DependencyDag,
    processors: usize,
) -> Result<ExecutionMatrix, ScheduleError> {
    if processors == 0 {
        return Err(ScheduleError::ZeroProcessors);
    }
    let n = dag.len();
    let mut remaining: Vec<usize> = (0..n).map(|i| dag.prereq_indices(i).len()).collect();
    // indices order like ids
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| remaining[i] == 0).collect();
    let mut rows = Vec::new();
    while !ready.is_empty() {
        let taken: Vec<usize> = ready.iter().copied().take(processors).collect();
        let mut row = Vec::with_capacity(processors);
        for &i in &taken {
            ready.remove(&i);
            let id = dag.id(i);
            row.push(Some(ScheduledOp::from_binding(id, lookup(a, id)?)));
        }
        row.resize(processors, None);
        rows.push(row);
        for &i in &taken {
            for &d in dag.dependent_indices(i) {
                remaining[d] -= 1;
                if remaining[d] == 0 {
                    ready.insert(d);
                }
            }
        }
    }
    ExecutionMatrix::new(processors, rows)
}

/// Reshapes a perfectly decomposed `r_D x c_D` matrix into an
/// `(n r_D) x (c_D / n)` execution matrix with no empty cell.
pub fn build_perfectly_parallel(
    a: &Algorithm,
    m_d: &DependencyMatrix,
    n: usize,
) -> Result<ExecutionMatrix, ScheduleError> {
    if !m_d.is_perfectly_decomposed() {
        return Err(ScheduleError::NotPerfectlyDecomposed);
    }
    let c_d = m_d.concurrency_degree();
    if n == 0 || !c_d.is_multiple_of(n) || (n >= c_d && n != 1) {
        return Err(ScheduleError::InvalidDivisor { c_d, n });
    }
    schedule_level_chunked(a, m_d, c_d / n)
}

/// Scheduling policy selectable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchedulerKind {
    /// Level-chunked; the default.
    Level,
    Greedy,
    /// Perfectly parallel reshape with row-group divisor `n`.
    Perfect { n: usize },
}

impl SchedulerKind {
    pub fn name(&self) -> &'static str {
        match self {
            SchedulerKind::Level => "level",
            SchedulerKind::Greedy => "greedy",
            SchedulerKind::Perfect { .. } => "perfect",
        }
    }
}

/// Runs the chosen policy. For [`SchedulerKind::Perfect`] the processor
/// count is `c_D / n` and `processors`, if given, must match it.
pub fn schedule(
    a: &Algorithm,
    kind: SchedulerKind,
    processors: Option<usize>,
) -> Result<ExecutionMatrix, ScheduleError> {
    let m_d = a.decomposition().matrix();
    match kind {
        SchedulerKind::Level => {
            schedule_level_chunked(a, &m_d, processors.ok_or(ScheduleError::ZeroProcessors)?)
        }
        SchedulerKind::Greedy => {
            schedule_greedy_list(a, a.dag(), processors.ok_or(ScheduleError::ZeroProcessors)?)
        }
        SchedulerKind::Perfect { n } => {
            let m = build_perfectly_parallel(a, &m_d, n)?;
            match processors {
                Some(p) if p != m.processors() => Err(ScheduleError::InvalidDivisor {
                    c_d: m_d.concurrency_degree(),
                    n,
                }),
                _ => Ok(m),
            }
        }
    }
}

/// Violated condition found while checking an execution matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExecutionViolation {
    /// A prerequisite is not in a strictly earlier row than its dependent.
    DependencyOrder {
        dependent: ElementId,
        dependent_row: usize,
        prerequisite: ElementId,
        prerequisite_row: usize,
    },
    UnknownElement { element: ElementId },
    DuplicateElement { element: ElementId },
    MissingElement { element: ElementId },
    RaggedRow { row: usize, len: usize },
}

impl fmt::Display for ExecutionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExecutionViolation::DependencyOrder {
                dependent,
                dependent_row,
                prerequisite,
                prerequisite_row,
            } => write!(
                f,
                "`{dependent}` (row {dependent_row}) is not after its prerequisite `{prerequisite}` (row {prerequisite_row})"
            ),
            ExecutionViolation::UnknownElement { element } => {
                write!(f, "unknown element `{element}`")
            }
            ExecutionViolation::DuplicateElement { element } => {
                write!(f, "element `{element}` scheduled twice")
            }
            ExecutionViolation::MissingElement { element } => {
                write!(f, "element `{element}` never scheduled")
            }
            ExecutionViolation::RaggedRow { row, len } => {
                write!(f, "row {row} has {len} cells")
            }
        }
    }
}

/// Checks inherited dependencies and operator conservation.
pub fn validate_execution_matrix(
    m: &ExecutionMatrix,
    dag: &DependencyDag,
) -> ValidationReport<ExecutionViolation> {
    let mut violations = Vec::new();
    let mut row_of: HashMap<&ElementId, usize> = HashMap::new();
    for (r, row) in m.rows.iter().enumerate() {
        if row.len() != m.processors {
            violations.push(ExecutionViolation::RaggedRow { row: r, len: row.len() });
        }
        for op in row.iter().flatten() {
            if !dag.contains(&op.element) {
                violations.push(ExecutionViolation::UnknownElement {
                    element: op.element.clone(),
                });
            } else if row_of.insert(&op.element, r).is_some() {
                violations.push(ExecutionViolation::DuplicateElement {
                    element: op.element.clone(),
                });
            }
        }
    }
    for id in dag.elements() {
        if !row_of.contains_key(id) {
            violations.push(ExecutionViolation::MissingElement { element: id.clone() });
        }
    }
    for (a, b) in dag.edges() {
        if let (Some(&ra), Some(&rb)) = (row_of.get(&a), row_of.get(&b)) {
            if rb >= ra {
                violations.push(ExecutionViolation::DependencyOrder {
                    dependent: a,
                    dependent_row: ra,
                    prerequisite: b,
                    prerequisite_row: rb,
                });
            }
        }
    }
    ValidationReport { violations }
}
