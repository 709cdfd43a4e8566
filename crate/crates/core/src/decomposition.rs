//! Computational problems, their decompositions into smaller subproblems,
//! and recursive refinement.

use crate::dag::{levelize, DagError, DependencyDag, DependencyMatrix, ElementId};
use crate::rational::{int, Rational};
use num::{BigInt, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompositionError {
    #[error("input size must be at least 1")]
    InvalidSize,
    #[error("a decomposition needs at least one subproblem")]
    Empty,
    #[error("subproblem sizes sum to {sum}, less than the parent size {parent}")]
    SizeSum { sum: u64, parent: u64 },
    #[error("subproblem `{id}` has size {size}, not smaller than the parent size {parent}")]
    SubproblemTooLarge { id: ElementId, size: u64, parent: u64 },
    #[error(transparent)]
    Dag(#[from] DagError),
    #[error("unknown subproblem `{0}`")]
    UnknownTarget(ElementId),
    #[error("cannot refine `{target}`: refinement solves {found}, target is {expected}")]
    TargetMismatch {
        target: ElementId,
        expected: String,
        found: String,
    },
    #[error("subproblem id `{0}` already used")]
    DuplicateId(ElementId),
    #[error("refinement level {level} does not exist (1..={levels})")]
    NoSuchLevel { level: usize, levels: usize },
    #[error("{0} is not a power of two of at least 2")]
    NotPowerOfTwo(u64),
    #[error("{n} is not divisible by {mu}")]
    Indivisible { n: u64, mu: u64 },
    #[error("leading coefficient must be non-zero")]
    ZeroLeadingCoefficient,
    #[error("complexity polynomial gives {value} operators for size {size}, not a positive integer")]
    DegenerateCardinality { size: u64, value: Rational },
}

/// A problem of a given family (input/output relation) and input size.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComputationalProblem {
    family: String,
    input_size: u64,
}

impl ComputationalProblem {
    pub fn new(family: impl Into<String>, input_size: u64) -> Result<Self, DecompositionError> {
        if input_size == 0 {
            return Err(DecompositionError::InvalidSize);
        }
        Ok(ComputationalProblem {
            family: family.into(),
            input_size,
        })
    }

    pub fn family(&self) -> &str {
        &self.family
    }

    pub fn input_size(&self) -> u64 {
        self.input_size
    }

    /// Same family, any size.
    pub fn is_similar(&self, other: &ComputationalProblem) -> bool {
        self.family == other.family
    }
}

impl std::fmt::Display for ComputationalProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}({})", self.family, self.input_size)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subproblem {
    pub id: ElementId,
    pub problem: ComputationalProblem,
}

impl Subproblem {
    pub fn new(id: impl Into<ElementId>, problem: ComputationalProblem) -> Self {
        Subproblem {
            id: id.into(),
            problem,
        }
    }
}

/// A problem split into strictly smaller subproblems whose sizes cover the
/// parent, together with the dependency order among them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    parent: ComputationalProblem,
    /// Sorted by id.
    subproblems: Vec<Subproblem>,
    dag: DependencyDag,
}

impl Decomposition {
    /// Validates sizes and dependencies. `deps` holds `(dependent, prerequisite)`.
    pub fn new(
        parent: ComputationalProblem,
        subproblems: Vec<Subproblem>,
        deps: Vec<(ElementId, ElementId)>,
    ) -> Result<Self, DecompositionError> {
        if subproblems.is_empty() {
            return Err(DecompositionError::Empty);
        }
        let n_r = parent.input_size;
        if let Some(big) = subproblems.iter().find(|s| s.problem.input_size >= n_r) {
            return Err(DecompositionError::SubproblemTooLarge {
                id: big.id.clone(),
                size: big.problem.input_size,
                parent: n_r,
            });
        }
        let sum: u64 = subproblems.iter().map(|s| s.problem.input_size).sum();
        if sum < n_r {
            return Err(DecompositionError::SizeSum { sum, parent: n_r });
        }
        Self::assemble(parent, subproblems, deps)
    }

    /// The problem solved in one piece: a single subproblem equal to the
    /// parent. This is the only decomposition where a subproblem is not
    /// strictly smaller than the parent.
    pub fn atomic(parent: ComputationalProblem, id: impl Into<ElementId>) -> Self {
        let sub = Subproblem::new(id, parent.clone());
        Self::assemble(parent, vec![sub], Vec::new()).expect("single element DAG is valid")
    }

    fn assemble(
        parent: ComputationalProblem,
        mut subproblems: Vec<Subproblem>,
        deps: Vec<(ElementId, ElementId)>,
    ) -> Result<Self, DecompositionError> {
        subproblems.sort_by(|a, b| a.id.cmp(&b.id));
        let dag = DependencyDag::new(subproblems.iter().map(|s| s.id.clone()), deps)?;
        Ok(Decomposition {
            parent,
            subproblems,
            dag,
        })
    }

    pub fn is_atomic(&self) -> bool {
        self.subproblems.len() == 1 && self.subproblems[0].problem == self.parent
    }

    pub fn parent(&self) -> &ComputationalProblem {
        &self.parent
    }

    pub fn subproblems(&self) -> &[Subproblem] {
        &self.subproblems
    }

    pub fn subproblem(&self, id: &ElementId) -> Option<&Subproblem> {
        self.subproblems
            .binary_search_by(|s| s.id.cmp(id))
            .ok()
            .map(|i| &self.subproblems[i])
    }

    pub fn dag(&self) -> &DependencyDag {
        &self.dag
    }

    /// Cardinality `k`.
    pub fn k(&self) -> usize {
        self.subproblems.len()
    }

    pub fn matrix(&self) -> DependencyMatrix {
        levelize(&self.dag)
    }

    /// Same cardinality and the same multiset of (family, size rank) pairs,
    /// where the rank orders the distinct subproblem sizes.
    pub fn is_similar(&self, other: &Decomposition) -> bool {
        self.k() == other.k()
            && self.parent.is_similar(&other.parent)
            && self.similarity_signature() == other.similarity_signature()
    }

    fn similarity_signature(&self) -> Vec<(String, usize)> {
        let sizes: BTreeSet<u64> = self.subproblems.iter().map(|s| s.problem.input_size).collect();
        let rank: BTreeMap<u64, usize> = sizes.into_iter().enumerate().map(|(r, s)| (s, r)).collect();
        let mut sig: Vec<(String, usize)> = self
            .subproblems
            .iter()
            .map(|s| (s.problem.family.clone(), rank[&s.problem.input_size]))
            .collect();
        sig.sort();
        sig
    }

    /// Replaces subproblem `target` by the subproblems of `sub`. Edges into
    /// the target are redirected to every sink of `sub`; the target's own
    /// prerequisites become prerequisites of every source of `sub`.
    pub fn refine(&self, target: &ElementId, sub: &Decomposition) -> Result<Decomposition, DecompositionError> {
        let target_problem = &self
            .subproblem(target)
            .ok_or_else(|| DecompositionError::UnknownTarget(target.clone()))?
            .problem;
        if sub.parent != *target_problem || sub.is_atomic() {
            return Err(DecompositionError::TargetMismatch {
                target: target.clone(),
                expected: target_problem.to_string(),
                found: if sub.is_atomic() {
                    format!("{} (atomic)", sub.parent)
                } else {
                    sub.parent.to_string()
                },
            });
        }
        for s in &sub.subproblems {
            if s.id != *target && self.subproblem(&s.id).is_some() {
                return Err(DecompositionError::DuplicateId(s.id.clone()));
            }
        }

        let sources: Vec<ElementId> = sub.dag.sources().into_iter().cloned().collect();
        let sinks: Vec<ElementId> = sub.dag.sinks().into_iter().cloned().collect();
        let mut deps = Vec::new();
        for (a, b) in self.dag.edges() {
            match (a == *target, b == *target) {
                (false, false) => deps.push((a, b)),
                (false, true) => deps.extend(sinks.iter().map(|s| (a.clone(), s.clone()))),
                (true, false) => deps.extend(sources.iter().map(|s| (s.clone(), b.clone()))),
                (true, true) => unreachable!("self loops are rejected at build time"),
            }
        }
        deps.extend(sub.dag.edges());

        let subproblems: Vec<Subproblem> = self
            .subproblems
            .iter()
            .filter(|s| s.id != *target)
            .chain(sub.subproblems.iter())
            .cloned()
            .collect();
        Decomposition::new(self.parent.clone(), subproblems, deps)
    }
}

/// `a_d x^d + ... + a_0`, coefficients stored highest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolynomialComplexity {
    coefficients: Vec<Rational>,
}

impl PolynomialComplexity {
    pub fn new(coefficients: Vec<Rational>) -> Result<Self, DecompositionError> {
        match coefficients.first() {
            Some(lead) if !lead.is_zero() => Ok(PolynomialComplexity { coefficients }),
            _ => Err(DecompositionError::ZeroLeadingCoefficient),
        }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Highest degree first.
    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coefficients
            .iter()
            .fold(Rational::zero(), |acc, a| acc * x + a)
    }

    /// True when every coefficient below the leading one is zero.
    pub fn is_pure_power(&self) -> bool {
        self.coefficients[1..].iter().all(Zero::is_zero)
    }
}

/// Cardinalities of `mu` similar chunks of size `N_r / mu` solved side by side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcatDescriptor {
    pub mu: u64,
    pub chunk_size: u64,
    /// Operators per chunk, `P(N_r / mu)`.
    pub chunk_cardinality: BigInt,
    /// Total operators, `mu * P(N_r / mu)`.
    pub cardinality: BigInt,
}

pub fn concat_similar(
    parent: &ComputationalProblem,
    mu: u64,
    complexity: &PolynomialComplexity,
) -> Result<ConcatDescriptor, DecompositionError> {
    let n = parent.input_size;
    if mu == 0 || mu > n || !n.is_multiple_of(mu) {
        return Err(DecompositionError::Indivisible { n, mu });
    }
    let chunk_size = n / mu;
    let value = complexity.eval(&int(chunk_size as i64));
    if !value.is_integer() || !value.is_positive() {
        return Err(DecompositionError::DegenerateCardinality {
            size: chunk_size,
            value,
        });
    }
    let chunk_cardinality = value.to_integer();
    Ok(ConcatDescriptor {
        mu,
        chunk_size,
        cardinality: &chunk_cardinality * BigInt::from(mu),
        chunk_cardinality,
    })
}

/// Family tag used by the reduction generator.
pub const REDUCTION_FAMILY: &str = "sum";

/// Refinement levels of the pairwise-sum reduction of `n` numbers.
///
/// Level 1 splits the sum into two halves plus the final addition; each
/// further level splits every remaining block of more than two numbers the
/// same way, down to the full binary tree of `n - 1` pairwise additions.
/// For `n = 2` the only level is the atomic single addition.
pub fn generate_reduction(
    n: u64,
) -> Result<(ComputationalProblem, Vec<Decomposition>), DecompositionError> {
    if n < 2 || !n.is_power_of_two() {
        return Err(DecompositionError::NotPowerOfTwo(n));
    }
    let width = n.to_string().len();
    let problem = ComputationalProblem::new(REDUCTION_FAMILY, n)?;
    if n == 2 {
        let id = combiner_id(2, 0, width);
        return Ok((problem.clone(), vec![Decomposition::atomic(problem, id)]));
    }
    let mut levels = vec![split_block(0, n, width)];
    let mut block = n / 2;
    while block > 2 {
        let prev = levels.last().expect("at least one level");
        let mut next = prev.clone();
        for lo in (0..n).step_by(block as usize) {
            next = next.refine(&block_id(block, lo, width), &split_block(lo, block, width))?;
        }
        levels.push(next);
        block /= 2;
    }
    Ok((problem, levels))
}

/// Id of an unsplit block of `size` numbers starting at `lo`.
pub fn block_id(size: u64, lo: u64, width: usize) -> ElementId {
    if size == 2 {
        return combiner_id(2, lo, width);
    }
    ElementId::new(format!("L{size:0width$}_{lo:0width$}"))
}

/// Id of the addition that combines the two halves of `[lo, lo + span)`.
pub fn combiner_id(span: u64, lo: u64, width: usize) -> ElementId {
    ElementId::new(format!("C{span:0width$}_{lo:0width$}"))
}

fn split_block(lo: u64, size: u64, width: usize) -> Decomposition {
    let half = size / 2;
    let sum = |s| ComputationalProblem::new(REDUCTION_FAMILY, s).expect("positive size");
    let left = block_id(half, lo, width);
    let right = block_id(half, lo + half, width);
    let top = combiner_id(size, lo, width);
    Decomposition::new(
        sum(size),
        vec![
            Subproblem::new(left.clone(), sum(half)),
            Subproblem::new(right.clone(), sum(half)),
            Subproblem::new(top.clone(), sum(2)),
        ],
        vec![(top.clone(), left), (top, right)],
    )
    .expect("block split is a valid decomposition")
}

/// Operator id and cost used for a reduction subproblem of `size` numbers:
/// `size - 1` unit additions.
pub fn reduction_operator(size: u64) -> (String, Rational) {
    if size == 2 {
        ("add".to_string(), Rational::one())
    } else {
        (format!("sum{size}"), int(size as i64 - 1))
    }
}
