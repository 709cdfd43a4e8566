//! Machine operators and algorithms: a decomposition whose subproblems are
//! each bound to an operator of the machine.

use crate::dag::{DependencyDag, ElementId};
use crate::decomposition::Decomposition;
use crate::rational::Rational;
use num::One;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgorithmError {
    #[error("operator `{op_id}` has cost {beta} < 1")]
    BetaBelowOne { op_id: String, beta: Rational },
    #[error("operator `{0}` defined twice")]
    DuplicateOperator(String),
    #[error("subproblem `{0}` is not bound to an operator")]
    UnboundSubproblem(ElementId),
    #[error("assignment names unknown subproblem `{0}`")]
    UnknownSubproblem(ElementId),
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
}

/// A computing operator and its cost in units of `tcalc`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Operator {
    op_id: String,
    #[serde(with = "crate::rational::exact")]
    beta_calc: Rational,
}

impl Operator {
    pub fn new(op_id: impl Into<String>, beta_calc: Rational) -> Result<Self, AlgorithmError> {
        let op_id = op_id.into();
        if beta_calc < Rational::one() {
            return Err(AlgorithmError::BetaBelowOne {
                op_id,
                beta: beta_calc,
            });
        }
        Ok(Operator { op_id, beta_calc })
    }

    pub fn op_id(&self) -> &str {
        &self.op_id
    }

    pub fn beta_calc(&self) -> &Rational {
        &self.beta_calc
    }
}

/// Operators a machine offers, keyed by id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OperatorSet {
    ops: BTreeMap<String, Operator>,
}

impl OperatorSet {
    pub fn new(ops: impl IntoIterator<Item = Operator>) -> Result<Self, AlgorithmError> {
        let mut map = BTreeMap::new();
        for op in ops {
            if map.contains_key(&op.op_id) {
                return Err(AlgorithmError::DuplicateOperator(op.op_id));
            }
            map.insert(op.op_id.clone(), op);
        }
        Ok(OperatorSet { ops: map })
    }

    pub fn get(&self, op_id: &str) -> Option<&Operator> {
        self.ops.get(op_id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Operator> {
        self.ops.values()
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

/// A decomposition with every subproblem bound to one operator.
///
/// Several subproblems may share an operator; each binding is a separate
/// operator instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algorithm {
    decomposition: Arc<Decomposition>,
    binding: BTreeMap<ElementId, Operator>,
}

impl Algorithm {
    /// Binds each subproblem to an operator id from `ops`.
    pub fn bind(
        decomposition: Arc<Decomposition>,
        assignment: &BTreeMap<ElementId, String>,
        ops: &OperatorSet,
    ) -> Result<Self, AlgorithmError> {
        if let Some(extra) = assignment
            .keys()
            .find(|id| decomposition.subproblem(id).is_none())
        {
            return Err(AlgorithmError::UnknownSubproblem(extra.clone()));
        }
        let mut binding = BTreeMap::new();
        for sub in decomposition.subproblems() {
            let op_id = assignment
                .get(&sub.id)
                .ok_or_else(|| AlgorithmError::UnboundSubproblem(sub.id.clone()))?;
            let op = ops
                .get(op_id)
                .ok_or_else(|| AlgorithmError::UnknownOperator(op_id.clone()))?;
            binding.insert(sub.id.clone(), op.clone());
        }
        Ok(Algorithm {
            decomposition,
            binding,
        })
    }

    /// Binds every subproblem with `choose`.
    pub fn bind_with(
        decomposition: Arc<Decomposition>,
        mut choose: impl FnMut(&crate::decomposition::Subproblem) -> Operator,
    ) -> Self {
        let binding = decomposition
            .subproblems()
            .iter()
            .map(|s| (s.id.clone(), choose(s)))
            .collect();
        Algorithm {
            decomposition,
            binding,
        }
    }

    pub fn decomposition(&self) -> &Decomposition {
        &self.decomposition
    }

    pub fn shared_decomposition(&self) -> &Arc<Decomposition> {
        &self.decomposition
    }

    pub fn dag(&self) -> &DependencyDag {
        self.decomposition.dag()
    }

    pub fn operator(&self, id: &ElementId) -> Option<&Operator> {
        self.binding.get(id)
    }

    /// Binding in ascending subproblem id order.
    pub fn binding(&self) -> &BTreeMap<ElementId, Operator> {
        &self.binding
    }

    /// Number of operators, equal to the decomposition cardinality.
    pub fn complexity(&self) -> usize {
        self.binding.len()
    }

    /// Distinct operator ids used.
    pub fn granularity_set(&self) -> BTreeSet<&str> {
        self.binding.values().map(Operator::op_id).collect()
    }

    pub fn same_granularity(&self, other: &Algorithm) -> bool {
        self.granularity_set() == other.granularity_set()
    }

    /// Both algorithms come from the same decomposition.
    pub fn same_class(&self, other: &Algorithm) -> bool {
        Arc::ptr_eq(&self.decomposition, &other.decomposition)
            || self.decomposition == other.decomposition
    }

    /// Operators in execution order (a topological order of the subproblems).
    pub fn operator_sequence(&self) -> Vec<(&ElementId, &Operator)> {
        self.dag()
            .topological_order()
            .into_iter()
            .map(|id| (id, &self.binding[id]))
            .collect()
    }

    /// Sum of all operator costs.
    pub fn total_beta(&self) -> Rational {
        self.binding.values().map(|op| op.beta_calc.clone()).sum()
    }

    /// Every operator has cost exactly 1.
    pub fn is_uniform(&self) -> bool {
        self.binding.values().all(|op| op.beta_calc.is_one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::generate_reduction;
    use crate::rational::{int, ratio};

    fn add() -> Operator {
        Operator::new("add", int(1)).unwrap()
    }

    fn levels() -> Vec<Arc<Decomposition>> {
        generate_reduction(16).unwrap().1.into_iter().map(Arc::new).collect()
    }

    fn assign_all(d: &Decomposition, f: impl Fn(u64) -> &'static str) -> BTreeMap<ElementId, String> {
        d.subproblems()
            .iter()
            .map(|s| (s.id.clone(), f(s.problem.input_size()).to_string()))
            .collect()
    }

    #[test]
    fn operator_cost_floor() {
        assert!(Operator::new("x", ratio(1, 2)).is_err());
        assert!(Operator::new("x", int(1)).is_ok());
        assert!(matches!(
            OperatorSet::new([add(), add()]),
            Err(AlgorithmError::DuplicateOperator(_))
        ));
    }

    #[test]
    fn bind_full_tree() {
        let lv = levels();
        let ops = OperatorSet::new([add()]).unwrap();
        let a = Algorithm::bind(lv[2].clone(), &assign_all(&lv[2], |_| "add"), &ops).unwrap();
        assert_eq!(a.complexity(), 15);
        assert_eq!(a.granularity_set(), BTreeSet::from(["add"]));
        assert!(a.is_uniform());
        assert_eq!(a.complexity(), a.decomposition().matrix().non_empty_count());
        assert_eq!(a.operator_sequence().len(), 15);
    }

    #[test]
    fn bind_d3_heterogeneous() {
        let lv = levels();
        let ops = OperatorSet::new([add(), Operator::new("sum8", int(7)).unwrap()]).unwrap();
        let a = Algorithm::bind(
            lv[0].clone(),
            &assign_all(&lv[0], |n| if n == 8 { "sum8" } else { "add" }),
            &ops,
        )
        .unwrap();
        assert_eq!(a.complexity(), 3);
        assert_eq!(a.granularity_set(), BTreeSet::from(["add", "sum8"]));
        assert_eq!(a.total_beta(), int(15));
        assert!(!a.is_uniform());
    }

    #[test]
    fn bind_errors() {
        let lv = levels();
        let ops = OperatorSet::new([add()]).unwrap();
        let mut partial = assign_all(&lv[0], |_| "add");
        let removed = partial.keys().next().unwrap().clone();
        partial.remove(&removed);
        assert_eq!(
            Algorithm::bind(lv[0].clone(), &partial, &ops).unwrap_err(),
            AlgorithmError::UnboundSubproblem(removed)
        );
        assert_eq!(
            Algorithm::bind(lv[0].clone(), &assign_all(&lv[0], |_| "mul"), &ops).unwrap_err(),
            AlgorithmError::UnknownOperator("mul".into())
        );
        let mut extra = assign_all(&lv[0], |_| "add");
        extra.insert(ElementId::from("ghost"), "add".into());
        assert!(matches!(
            Algorithm::bind(lv[0].clone(), &extra, &ops),
            Err(AlgorithmError::UnknownSubproblem(_))
        ));
    }

    #[test]
    fn class_membership() {
        let lv = levels();
        let cheap = Algorithm::bind_with(lv[2].clone(), |_| add());
        let dear = Algorithm::bind_with(lv[2].clone(), |_| Operator::new("add", int(3)).unwrap());
        let other = Algorithm::bind_with(lv[1].clone(), |_| add());
        assert!(cheap.same_class(&dear));
        assert!(dear.same_class(&cheap));
        assert!(cheap.same_class(&cheap));
        assert!(!cheap.same_class(&other));
        // structural equality, not pointer identity
        let copy = Algorithm::bind_with(Arc::new((*lv[2]).clone()), |_| add());
        assert!(copy.same_class(&cheap));
        assert_eq!(copy, cheap);
        assert!(cheap.same_granularity(&other));
    }
}
