//! Property tests with brute-force oracles that share no code with the
//! implementation paths they check.

use num::{One, Zero};
use parcalc::metrics;
use parcalc::rational::{int, ratio};
use parcalc::{
    levelize, schedule_greedy_list, schedule_level_chunked, validate_dependency_matrix,
    validate_execution_matrix, Algorithm, ComputationalProblem, Decomposition, DependencyDag,
    ElementId, ExecutionMatrix, Operator, Rational, ScheduledOp, Subproblem,
};
use proptest::prelude::*;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Random DAG as (node count, edges (dependent, prerequisite) over indices,
/// label permutation). Edges only point from higher to lower index.
fn dag_parts(max_nodes: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize)>, Vec<usize>)> {
    (1..=max_nodes).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (
            Just(n),
            proptest::collection::vec(prop::bool::weighted(0.15), pairs),
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
        )
            .prop_map(move |(n, bits, perm)| {
                let mut edges = Vec::new();
                let mut bit = 0;
                for a in 0..n {
                    for b in 0..a {
                        if bits[bit] {
                            edges.push((a, b));
                        }
                        bit += 1;
                    }
                }
                (n, edges, perm)
            })
    })
}

fn label(i: usize, perm: &[usize]) -> ElementId {
    ElementId::new(format!("e{:03}", perm[i]))
}

fn build(n: usize, edges: &[(usize, usize)], perm: &[usize]) -> DependencyDag {
    DependencyDag::new(
        (0..n).map(|i| label(i, perm)),
        edges.iter().map(|&(a, b)| (label(a, perm), label(b, perm))),
    )
    .unwrap()
}

/// Plain adjacency-list reachability by DFS.
fn reach_oracle(n: usize, edges: &[(usize, usize)], from: usize, to: usize) -> bool {
    let mut stack = vec![from];
    let mut seen = vec![false; n];
    while let Some(x) = stack.pop() {
        for &(a, b) in edges {
            if a == x && !seen[b] {
                if b == to {
                    return true;
                }
                seen[b] = true;
                stack.push(b);
            }
        }
    }
    false
}

/// Longest chain ending at `v`, by exhaustive path enumeration.
fn chain_oracle(edges: &[(usize, usize)], v: usize) -> usize {
    1 + edges
        .iter()
        .filter(|&&(a, _)| a == v)
        .map(|&(_, b)| chain_oracle(edges, b))
        .max()
        .unwrap_or(0)
}

fn algorithm_for(dag: &DependencyDag, betas: &[Rational]) -> Algorithm {
    let n = dag.len();
    let sum = |s| ComputationalProblem::new("work", s).unwrap();
    let subs: Vec<Subproblem> = dag
        .elements()
        .iter()
        .map(|id| Subproblem::new(id.clone(), sum(2)))
        .collect();
    let d = if n == 1 {
        Decomposition::atomic(sum(2), dag.elements()[0].clone())
    } else {
        Decomposition::new(sum(2 * n as u64), subs, dag.edges()).unwrap()
    };
    let mut i = 0;
    Algorithm::bind_with(Arc::new(d), |_| {
        let op = Operator::new("op", betas[i % betas.len()].clone()).unwrap();
        i += 1;
        op
    })
}

fn beta_strategy() -> impl Strategy<Value = Rational> {
    (1i64..=4).prop_flat_map(|den| (den..=10 * den).prop_map(move |num| ratio(num, den)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn levelized_matrix_is_valid((n, edges, perm) in dag_parts(50)) {
        let dag = build(n, &edges, &perm);
        let m = levelize(&dag);
        prop_assert!(validate_dependency_matrix(&m, &dag).is_valid());
        prop_assert_eq!(m.non_empty_count(), n);
        // rows: no reachable pair (independent DFS oracle)
        for r in 0..m.dependency_degree() {
            let ids: Vec<usize> = m.row_elements(r).map(|id| dag.index_of(id).unwrap()).collect();
            for &a in &ids {
                for &b in &ids {
                    prop_assert!(a == b || !reach_oracle_by_label(&dag, &edges, &perm, a, b));
                }
            }
        }
    }

    #[test]
    fn independence_matches_reachability((n, edges, perm) in dag_parts(20), x in 0usize..20, y in 0usize..20) {
        let dag = build(n, &edges, &perm);
        let (x, y) = (x % n, y % n);
        let expected = x != y && !reach_oracle(n, &edges, x, y) && !reach_oracle(n, &edges, y, x);
        prop_assert_eq!(dag.is_independent(&label(x, &perm), &label(y, &perm)).unwrap(), expected);
        prop_assert_eq!(dag.depends_on(&label(x, &perm), &label(y, &perm)).unwrap(), reach_oracle(n, &edges, x, y));
    }

    #[test]
    fn degrees_match_brute_force((n, edges, perm) in dag_parts(12)) {
        let dag = build(n, &edges, &perm);
        let m = levelize(&dag);
        let chains: Vec<usize> = (0..n).map(|v| chain_oracle(&edges, v)).collect();
        prop_assert_eq!(m.dependency_degree(), *chains.iter().max().unwrap());
        let mut per_level = BTreeMap::new();
        for c in &chains {
            *per_level.entry(c).or_insert(0usize) += 1;
        }
        prop_assert_eq!(m.concurrency_degree(), *per_level.values().max().unwrap());
    }

    #[test]
    fn relabeling_keeps_row_cardinalities((n, edges, perm) in dag_parts(30), seed in any::<u64>()) {
        let a = levelize(&build(n, &edges, &perm));
        let mut other: Vec<usize> = perm.clone();
        other.rotate_left((seed as usize) % n);
        let b = levelize(&build(n, &edges, &other));
        prop_assert_eq!(a.row_widths(), b.row_widths());
    }

    #[test]
    fn schedules_are_safe_and_bounded(
        (n, edges, perm) in dag_parts(50),
        betas in proptest::collection::vec(beta_strategy(), 1..8),
        p in 1usize..10,
    ) {
        let dag = build(n, &edges, &perm);
        let a = algorithm_for(&dag, &betas);
        let m_d = a.decomposition().matrix();
        let r_d = m_d.dependency_degree();
        for m in [
            schedule_level_chunked(&a, &m_d, p).unwrap(),
            schedule_greedy_list(&a, a.dag(), p).unwrap(),
        ] {
            prop_assert!(validate_execution_matrix(&m, a.dag()).is_valid());
            prop_assert_eq!(m.op_count(), n);
            prop_assert!(m.row_count() >= r_d);
            prop_assert_eq!(m.empty_row_count(), 0);
            if p <= m_d.concurrency_degree() {
                prop_assert!(m.row_widths().iter().all(|&w| w <= m_d.concurrency_degree()));
            }
            let r = metrics::report(&m).unwrap();
            prop_assert!(r.t >= int(r_d as i64) * &r.r_calc);
            prop_assert!(r.beta_me >= int(r.r_e as i64));
            prop_assert!(r.r_calc >= Rational::one());
        }
    }

    #[test]
    fn level_schedule_rows_shrink_with_processors((n, edges, perm) in dag_parts(40)) {
        let dag = build(n, &edges, &perm);
        let a = algorithm_for(&dag, &[int(1)]);
        let m_d = a.decomposition().matrix();
        let rows: Vec<usize> = (1..=12)
            .map(|p| schedule_level_chunked(&a, &m_d, p).unwrap().row_count())
            .collect();
        prop_assert!(rows.windows(2).all(|w| w[0] >= w[1]), "{:?}", rows);
        prop_assert_eq!(rows[0], n);
    }

    #[test]
    fn metric_identities_and_bounds(m in execution_matrix(8, false)) {
        let s = m.serialize();
        let r = metrics::report(&m).unwrap();
        let p = int(m.processors() as i64);
        let ratio_r = &r.r_calc_seq / &r.r_calc;
        prop_assert_eq!(metrics::amdahl_generalized(&m, &s).unwrap().speed_up, r.speed_up.clone());
        prop_assert!(r.speed_up <= r.speed_up_ideal);
        prop_assert!(r.speed_up_ideal <= &p * &ratio_r);
        prop_assert!(r.efficiency <= ratio_r);
        prop_assert!(r.overhead >= r.overhead_ideal);
        prop_assert_eq!(&r.t_seq + &r.t_par, r.t.clone());
        let alpha_total: Rational = r.alpha.values().cloned().sum();
        prop_assert_eq!(alpha_total, ratio(r.r_e as i64, r.k as i64));
        prop_assert_eq!(&r.speed_up / &p, r.efficiency.clone());
        if m.is_uniform() {
            prop_assert_eq!(r.overhead, int(r.sparsity as i64));
        }
    }

    #[test]
    fn small_matrices_match_row_simulation(m in execution_matrix(4, true)) {
        let (t, sp) = simulate(&m);
        prop_assert_eq!(metrics::exec_time(&m), t.clone());
        prop_assert_eq!(metrics::speed_up(&m), sp);
    }

    #[test]
    fn problem_similarity_is_an_equivalence(
        xs in proptest::collection::vec((0usize..3, 1u64..20), 3)
    ) {
        let fam = ["sum", "sort", "scan"];
        let ps: Vec<ComputationalProblem> =
            xs.iter().map(|&(f, s)| ComputationalProblem::new(fam[f], s).unwrap()).collect();
        for a in &ps {
            prop_assert!(a.is_similar(a));
            for b in &ps {
                prop_assert_eq!(a.is_similar(b), b.is_similar(a));
                for c in &ps {
                    if a.is_similar(b) && b.is_similar(c) {
                        prop_assert!(a.is_similar(c));
                    }
                }
            }
        }
    }

    #[test]
    fn refinement_keeps_bounds_and_acyclicity(choices in proptest::collection::vec(any::<prop::sample::Index>(), 1..6)) {
        // start from the coarse split of 64 numbers and refine random blocks
        let (_, levels) = parcalc::generate_reduction(64).unwrap();
        let mut d = levels[0].clone();
        let width = 2;
        for pick in choices {
            let blocks: Vec<(ElementId, u64)> = d
                .subproblems()
                .iter()
                .filter(|s| s.id.as_str().starts_with('L'))
                .map(|s| (s.id.clone(), s.problem.input_size()))
                .collect();
            if blocks.is_empty() {
                break;
            }
            let (target, size) = pick.get(&blocks).clone();
            let lo: u64 = target.as_str()[4..].parse().unwrap();
            let sub = split(lo, size, width);
            let k_before = d.k();
            d = d.refine(&target, &sub).unwrap();
            prop_assert_eq!(d.k(), k_before - 1 + sub.k());
            let total: u64 = d.subproblems().iter().map(|s| s.problem.input_size()).sum();
            prop_assert!(total >= 64);
            prop_assert!(d.subproblems().iter().all(|s| s.problem.input_size() < 64));
            prop_assert!(validate_dependency_matrix(&d.matrix(), d.dag()).is_valid());
        }
    }
}

fn reach_oracle_by_label(
    dag: &DependencyDag,
    edges: &[(usize, usize)],
    perm: &[usize],
    a: usize,
    b: usize,
) -> bool {
    // translate sorted-index back to generation index
    let gen = |i: usize| {
        let id = dag.elements()[i].clone();
        (0..perm.len()).find(|&g| label(g, perm) == id).unwrap()
    };
    reach_oracle(perm.len(), edges, gen(a), gen(b))
}

fn split(lo: u64, size: u64, width: usize) -> Decomposition {
    let sum = |s| ComputationalProblem::new("sum", s).unwrap();
    let half = size / 2;
    let block = |s: u64, at: u64| {
        if s == 2 {
            parcalc::decomposition::combiner_id(2, at, width)
        } else {
            parcalc::decomposition::block_id(s, at, width)
        }
    };
    let (l, r) = (block(half, lo), block(half, lo + half));
    let top = parcalc::decomposition::combiner_id(size, lo, width);
    Decomposition::new(
        sum(size),
        vec![
            Subproblem::new(l.clone(), sum(half)),
            Subproblem::new(r.clone(), sum(half)),
            Subproblem::new(top.clone(), sum(2)),
        ],
        vec![(top.clone(), l), (top, r)],
    )
    .unwrap()
}

/// Random matrix up to `max x max`; every row holds at least one operator.
fn execution_matrix(max: usize, allow_empty_rows: bool) -> impl Strategy<Value = ExecutionMatrix> {
    (1..=max, 1..=max).prop_flat_map(move |(rows, cols)| {
        proptest::collection::vec(
            proptest::collection::vec(proptest::option::weighted(0.6, beta_strategy()), cols),
            rows,
        )
        .prop_map(move |grid| {
            let mut next = 0usize;
            let rows: Vec<Vec<Option<ScheduledOp>>> = grid
                .into_iter()
                .map(|row| {
                    let mut row: Vec<Option<ScheduledOp>> = row
                        .into_iter()
                        .map(|b| {
                            b.map(|beta| {
                                next += 1;
                                ScheduledOp::new(format!("o{next:03}"), "op", beta)
                            })
                        })
                        .collect();
                    if !allow_empty_rows && row.iter().all(Option::is_none) {
                        next += 1;
                        row[0] = Some(ScheduledOp::new(format!("o{next:03}"), "op", int(1)));
                    }
                    row
                })
                .collect();
            rows
        })
        .prop_filter_map("needs an operator", move |rows| ExecutionMatrix::new(cols, rows).ok())
    })
}

/// Walks every cell: per-row maximum, summed; speed-up against the plain sum.
fn simulate(m: &ExecutionMatrix) -> (Rational, Rational) {
    let mut total = Rational::zero();
    let mut work = Rational::zero();
    for r in 0..m.row_count() {
        let mut row_max = Rational::zero();
        for c in 0..m.processors() {
            if let Some(op) = m.cell(r, c) {
                work += &op.beta;
                if op.beta > row_max {
                    row_max = op.beta.clone();
                }
            }
        }
        total += row_max;
    }
    let sp = &work / &total;
    (total, sp)
}
