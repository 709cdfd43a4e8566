//! Dependency structures and their levelized dependency matrices.
//!
//! A [`DependencyDag`] is a strict partial order over opaque element ids,
//! given by its direct "depends on" pairs. [`levelize`] lays the elements out
//! in a [`DependencyMatrix`]: every row holds mutually independent elements
//! and every element past the first row has a direct prerequisite in the row
//! right above it.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

/// Opaque identifier of an element of a dependency structure.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(String);

impl ElementId {
    pub fn new(id: impl Into<String>) -> Self {
        ElementId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ElementId {
    fn from(s: &str) -> Self {
        ElementId(s.to_string())
    }
}

impl From<String> for ElementId {
    fn from(s: String) -> Self {
        ElementId(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DagError {
    #[error("dependency cycle: {}", display_cycle(.cycle))]
    Cycle { cycle: Vec<ElementId> },
    #[error("unknown element `{0}`")]
    UnknownElement(ElementId),
    #[error("duplicate element `{0}`")]
    DuplicateElement(ElementId),
}

fn display_cycle(cycle: &[ElementId]) -> String {
    let mut parts: Vec<&str> = cycle.iter().map(ElementId::as_str).collect();
    if let Some(first) = cycle.first() {
        parts.push(first.as_str());
    }
    parts.join(" <- ")
}

/// Fixed-size bit set over element indices.
#[derive(Clone, Debug, PartialEq, Eq)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(len: usize) -> Self {
        BitSet(vec![0; len.div_ceil(64)])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] & (1 << (i % 64)) != 0
    }

    fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= *b;
        }
    }
}

/// A validated strict partial order given by direct dependencies.
///
/// Elements are stored in ascending id order; the transitive closure is
/// computed once at construction and the value is immutable afterwards.
#[derive(Clone, Debug)]
pub struct DependencyDag {
    ids: Vec<ElementId>,
    index: HashMap<ElementId, usize>,
    /// `prereqs[a]` = direct prerequisites `b` with `a <- b`, ascending.
    prereqs: Vec<Vec<usize>>,
    dependents: Vec<Vec<usize>>,
    /// `closure[a]` contains every `b` that `a` transitively depends on.
    closure: Vec<BitSet>,
    topo: Vec<usize>,
}

impl PartialEq for DependencyDag {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids && self.prereqs == other.prereqs
    }
}

impl Eq for DependencyDag {}

impl DependencyDag {
    /// Builds a DAG from its elements and `(dependent, prerequisite)` pairs.
    pub fn new<I, E>(elements: I, depends_on: E) -> Result<Self, DagError>
    where
        I: IntoIterator<Item = ElementId>,
        E: IntoIterator<Item = (ElementId, ElementId)>,
    {
        let mut ids: Vec<ElementId> = elements.into_iter().collect();
        ids.sort();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(DagError::DuplicateElement(w[0].clone()));
        }
        let index: HashMap<ElementId, usize> =
            ids.iter().cloned().enumerate().map(|(i, id)| (id, i)).collect();

        let n = ids.len();
        let mut prereq_sets = vec![BTreeSet::new(); n];
        for (a, b) in depends_on {
            let ai = *index.get(&a).ok_or_else(|| DagError::UnknownElement(a.clone()))?;
            let bi = *index.get(&b).ok_or_else(|| DagError::UnknownElement(b.clone()))?;
            if ai == bi {
                return Err(DagError::Cycle { cycle: vec![a] });
            }
            prereq_sets[ai].insert(bi);
        }
        let prereqs: Vec<Vec<usize>> = prereq_sets
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect();
        let mut dependents = vec![Vec::new(); n];
        for (a, ps) in prereqs.iter().enumerate() {
            for &b in ps {
                dependents[b].push(a);
            }
        }

        let topo = topological_order(&prereqs).map_err(|cycle| DagError::Cycle {
            cycle: cycle.into_iter().map(|i| ids[i].clone()).collect(),
        })?;

        let mut closure = vec![BitSet::new(n); n];
        for &a in &topo {
            let mut reach = BitSet::new(n);
            for &b in &prereqs[a] {
                reach.insert(b);
                reach.union_with(&closure[b]);
            }
            closure[a] = reach;
        }

        Ok(DependencyDag {
            ids,
            index,
            prereqs,
            dependents,
            closure,
            topo,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Element ids in ascending order.
    pub fn elements(&self) -> &[ElementId] {
        &self.ids
    }

    pub fn contains(&self, id: &ElementId) -> bool {
        self.index.contains_key(id)
    }

    pub fn index_of(&self, id: &ElementId) -> Result<usize, DagError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| DagError::UnknownElement(id.clone()))
    }

    pub fn id(&self, index: usize) -> &ElementId {
        &self.ids[index]
    }

    /// Direct `(dependent, prerequisite)` pairs, sorted.
    pub fn edges(&self) -> Vec<(ElementId, ElementId)> {
        self.prereqs
            .iter()
            .enumerate()
            .flat_map(|(a, ps)| ps.iter().map(move |&b| (a, b)))
            .map(|(a, b)| (self.ids[a].clone(), self.ids[b].clone()))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.prereqs.iter().map(Vec::len).sum()
    }

    pub(crate) fn prereq_indices(&self, a: usize) -> &[usize] {
        &self.prereqs[a]
    }

    pub(crate) fn dependent_indices(&self, b: usize) -> &[usize] {
        &self.dependents[b]
    }

    /// Direct prerequisites of `id`.
    pub fn prerequisites(&self, id: &ElementId) -> Result<Vec<&ElementId>, DagError> {
        let a = self.index_of(id)?;
        Ok(self.prereqs[a].iter().map(|&b| &self.ids[b]).collect())
    }

    /// Direct dependents of `id`.
    pub fn dependents(&self, id: &ElementId) -> Result<Vec<&ElementId>, DagError> {
        let b = self.index_of(id)?;
        Ok(self.dependents[b].iter().map(|&a| &self.ids[a]).collect())
    }

    /// Elements without prerequisites.
    pub fn sources(&self) -> Vec<&ElementId> {
        (0..self.len())
            .filter(|&i| self.prereqs[i].is_empty())
            .map(|i| &self.ids[i])
            .collect()
    }

    /// Elements nothing depends on.
    pub fn sinks(&self) -> Vec<&ElementId> {
        (0..self.len())
            .filter(|&i| self.dependents[i].is_empty())
            .map(|i| &self.ids[i])
            .collect()
    }

    /// True if `a` depends on `b` directly.
    pub fn depends_directly(&self, a: &ElementId, b: &ElementId) -> Result<bool, DagError> {
        let (a, b) = (self.index_of(a)?, self.index_of(b)?);
        Ok(self.prereqs[a].binary_search(&b).is_ok())
    }

    /// True if `a` depends on `b` through the transitive closure.
    pub fn depends_on(&self, a: &ElementId, b: &ElementId) -> Result<bool, DagError> {
        let (a, b) = (self.index_of(a)?, self.index_of(b)?);
        Ok(self.closure[a].contains(b))
    }

    pub(crate) fn reaches(&self, a: usize, b: usize) -> bool {
        self.closure[a].contains(b)
    }

    /// Neither element depends on the other. An element is not independent
    /// of itself.
    pub fn is_independent(&self, a: &ElementId, b: &ElementId) -> Result<bool, DagError> {
        let (ai, bi) = (self.index_of(a)?, self.index_of(b)?);
        Ok(ai != bi && !self.closure[ai].contains(bi) && !self.closure[bi].contains(ai))
    }

    /// A topological order (prerequisites first), smallest id first among
    /// the ready elements.
    pub fn topological_order(&self) -> Vec<&ElementId> {
        self.topo.iter().map(|&i| &self.ids[i]).collect()
    }

    /// Length (in elements) of the longest dependency chain ending at each element.
    pub(crate) fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0usize; self.len()];
        for &a in &self.topo {
            depth[a] = self.prereqs[a].iter().map(|&b| depth[b] + 1).max().unwrap_or(0);
        }
        depth
    }

    /// Builds the dependency matrix of this DAG.
    pub fn levelize(&self) -> DependencyMatrix {
        levelize(self)
    }
}

/// Kahn's algorithm with a min-heap on index (= ascending id). On failure
/// returns one cycle as a list of indices `c0 <- c1 <- ... <- c0`.
fn topological_order(prereqs: &[Vec<usize>]) -> Result<Vec<usize>, Vec<usize>> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let n = prereqs.len();
    let mut remaining: Vec<usize> = prereqs.iter().map(Vec::len).collect();
    let mut dependents = vec![Vec::new(); n];
    for (a, ps) in prereqs.iter().enumerate() {
        for &b in ps {
            dependents[b].push(a);
        }
    }
    let mut heap: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&i| remaining[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(b)) = heap.pop() {
        order.push(b);
        for &a in &dependents[b] {
            remaining[a] -= 1;
            if remaining[a] == 0 {
                heap.push(Reverse(a));
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // Every unfinished element has an unfinished prerequisite; walking
    // prerequisites from any of them must revisit a node.
    let start = (0..n).find(|&i| remaining[i] > 0).unwrap_or(0);
    let mut seen = vec![usize::MAX; n];
    let mut path = Vec::new();
    let mut cur = start;
    while seen[cur] == usize::MAX {
        seen[cur] = path.len();
        path.push(cur);
        cur = *prereqs[cur]
            .iter()
            .find(|&&b| remaining[b] > 0)
            .expect("unfinished element without unfinished prerequisite");
    }
    Err(path.split_off(seen[cur]))
}

/// Rectangular grid of element ids, right-padded with empty cells.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyMatrix {
    rows: Vec<Vec<Option<ElementId>>>,
}

impl DependencyMatrix {
    /// Wraps hand-built rows, padding them to the widest row.
    pub fn from_rows(rows: Vec<Vec<Option<ElementId>>>) -> Self {
        let width = rows.iter().map(Vec::len).max().unwrap_or(0);
        let rows = rows
            .into_iter()
            .map(|mut r| {
                r.resize(width, None);
                r
            })
            .collect();
        DependencyMatrix { rows }
    }

    pub fn rows(&self) -> &[Vec<Option<ElementId>>] {
        &self.rows
    }

    pub fn cell(&self, row: usize, col: usize) -> Option<&ElementId> {
        self.rows.get(row)?.get(col)?.as_ref()
    }

    /// `c_D`: number of columns.
    pub fn concurrency_degree(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// `r_D`: number of rows.
    pub fn dependency_degree(&self) -> usize {
        self.rows.len()
    }

    /// Non-empty cell count per row.
    pub fn row_widths(&self) -> Vec<usize> {
        self.rows
            .iter()
            .map(|r| r.iter().filter(|c| c.is_some()).count())
            .collect()
    }

    pub fn non_empty_count(&self) -> usize {
        self.row_widths().iter().sum()
    }

    pub fn has_empty_cells(&self) -> bool {
        self.rows.iter().flatten().any(Option::is_none)
    }

    /// More than one column and no empty cell.
    pub fn is_perfectly_decomposed(&self) -> bool {
        self.concurrency_degree() > 1 && !self.has_empty_cells()
    }

    /// Non-empty cells of one row, in column order.
    pub fn row_elements(&self, row: usize) -> impl Iterator<Item = &ElementId> {
        self.rows[row].iter().flatten()
    }
}

/// Lays the DAG out by longest-chain depth; rows are sorted by id and padded.
pub fn levelize(dag: &DependencyDag) -> DependencyMatrix {
    let depths = dag.depths();
    let r_d = depths.iter().map(|d| d + 1).max().unwrap_or(0);
    let mut rows: Vec<Vec<Option<ElementId>>> = vec![Vec::new(); r_d];
    // indices ascend with ids, so rows come out in canonical order
    for (i, &d) in depths.iter().enumerate() {
        rows[d].push(Some(dag.id(i).clone()));
    }
    DependencyMatrix::from_rows(rows)
}

/// Violated condition found while checking a dependency matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatrixViolation {
    /// Two cells of one row are ordered by the dependency relation.
    DependentInRow {
        row: usize,
        dependent: ElementId,
        prerequisite: ElementId,
    },
    /// A cell below the first row has no direct prerequisite in the row above.
    NoPredecessorAbove { row: usize, col: usize, element: ElementId },
    UnknownElement { row: usize, col: usize, element: ElementId },
    DuplicateElement { element: ElementId },
    MissingElement { element: ElementId },
}

impl fmt::Display for MatrixViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixViolation::DependentInRow {
                row,
                dependent,
                prerequisite,
            } => write!(
                f,
                "row {row}: `{dependent}` depends on `{prerequisite}` in the same row (row independence)"
            ),
            MatrixViolation::NoPredecessorAbove { row, col, element } => write!(
                f,
                "cell ({row}, {col}) `{element}` has no direct prerequisite in row {} (row chaining)",
                row - 1
            ),
            MatrixViolation::UnknownElement { row, col, element } => {
                write!(f, "cell ({row}, {col}) holds unknown element `{element}`")
            }
            MatrixViolation::DuplicateElement { element } => {
                write!(f, "element `{element}` appears more than once")
            }
            MatrixViolation::MissingElement { element } => {
                write!(f, "element `{element}` is missing from the matrix")
            }
        }
    }
}

/// List of violations; empty iff the checked object is valid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport<V> {
    pub violations: Vec<V>,
}

impl<V> ValidationReport<V> {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks row independence, row chaining and cell conservation of `m`
/// against `dag`.
pub fn validate_dependency_matrix(
    m: &DependencyMatrix,
    dag: &DependencyDag,
) -> ValidationReport<MatrixViolation> {
    let mut violations = Vec::new();
    let mut seen = vec![false; dag.len()];
    // per row: known element indices
    let mut row_members: Vec<Vec<(usize, usize)>> = Vec::with_capacity(m.rows.len());

    for (r, row) in m.rows.iter().enumerate() {
        let mut members = Vec::new();
        for (c, cell) in row.iter().enumerate() {
            let Some(id) = cell else { continue };
            match dag.index_of(id) {
                Ok(i) => {
                    if seen[i] {
                        violations.push(MatrixViolation::DuplicateElement { element: id.clone() });
                    }
                    seen[i] = true;
                    members.push((c, i));
                }
                Err(_) => violations.push(MatrixViolation::UnknownElement {
                    row: r,
                    col: c,
                    element: id.clone(),
                }),
            }
        }
        row_members.push(members);
    }

    for (r, members) in row_members.iter().enumerate() {
        for (x, &(_, a)) in members.iter().enumerate() {
            for &(_, b) in &members[x + 1..] {
                if dag.reaches(a, b) {
                    violations.push(MatrixViolation::DependentInRow {
                        row: r,
                        dependent: dag.id(a).clone(),
                        prerequisite: dag.id(b).clone(),
                    });
                } else if dag.reaches(b, a) {
                    violations.push(MatrixViolation::DependentInRow {
                        row: r,
                        dependent: dag.id(b).clone(),
                        prerequisite: dag.id(a).clone(),
                    });
                }
            }
        }
        if r == 0 {
            continue;
        }
        let above: BTreeSet<usize> = row_members[r - 1].iter().map(|&(_, i)| i).collect();
        for &(c, a) in members {
            if !dag.prereq_indices(a).iter().any(|b| above.contains(b)) {
                violations.push(MatrixViolation::NoPredecessorAbove {
                    row: r,
                    col: c,
                    element: dag.id(a).clone(),
                });
            }
        }
    }

    for (i, s) in seen.iter().enumerate() {
        if !s {
            violations.push(MatrixViolation::MissingElement {
                element: dag.id(i).clone(),
            });
        }
    }
    ValidationReport { violations }
}
