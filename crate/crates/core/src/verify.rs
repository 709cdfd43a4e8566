//! Checks every structural property and metric identity on one instance.

use crate::algorithm::Algorithm;
use crate::dag::{validate_dependency_matrix, DependencyDag, ElementId};
use crate::metrics::{self, MetricsReport};
use crate::problem_spec::LoadedSpec;
use crate::rational::{int, Rational};
use crate::scheduler::{
    build_perfectly_parallel, schedule, validate_execution_matrix, Classification, ExecutionMatrix,
    SchedulerKind,
};
use serde::Serialize;
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(CheckResult {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }
}

/// Longest chain (in elements) by memoized search over prerequisites.
fn longest_chain(dag: &DependencyDag) -> usize {
    fn depth<'a>(dag: &'a DependencyDag, id: &'a ElementId, memo: &mut HashMap<&'a ElementId, usize>) -> usize {
        if let Some(&d) = memo.get(id) {
            return d;
        }
        let d = 1 + dag
            .prerequisites(id)
            .expect("known element")
            .into_iter()
            .map(|p| depth(dag, p, memo))
            .max()
            .unwrap_or(0);
        memo.insert(id, d);
        d
    }
    let mut memo = HashMap::new();
    dag.elements().iter().map(|id| depth(dag, id, &mut memo)).max().unwrap_or(0)
}

/// Loads the spec and verifies it; a spec that does not form a valid
/// decomposition is reported as a failed check.
pub fn verify_spec(spec: &LoadedSpec, processors: &[usize]) -> VerificationReport {
    match spec.to_algorithm() {
        Ok(a) => verify_algorithm(&a, processors),
        Err(e) => {
            let mut report = VerificationReport::default();
            report.check("valid decomposition (strict partial order, size bounds, bindings)", false, e.to_string());
            report
        }
    }
}

pub fn verify_algorithm(a: &Algorithm, processors: &[usize]) -> VerificationReport {
    let mut report = VerificationReport::default();
    report.check("valid decomposition (strict partial order, size bounds, bindings)", true, "");

    let dag = a.dag();
    let m_d = a.decomposition().matrix();
    let v = validate_dependency_matrix(&m_d, dag);
    report.check(
        "dependency matrix: rows independent and chained",
        v.is_valid(),
        v.violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "),
    );
    let chain = longest_chain(dag);
    report.check(
        "dependency degree equals longest chain",
        chain == m_d.dependency_degree(),
        format!("r_D = {}, longest chain = {chain}", m_d.dependency_degree()),
    );
    report.check(
        "complexity equals non-empty matrix cells",
        a.complexity() == m_d.non_empty_count(),
        format!("k = {}, cells = {}", a.complexity(), m_d.non_empty_count()),
    );

    let r_d = m_d.dependency_degree();
    for kind in [SchedulerKind::Level, SchedulerKind::Greedy] {
        let mut by_p = Vec::new();
        for &p in processors {
            let label = format!("{} P={p}", kind.name());
            match schedule(a, kind, Some(p)) {
                Ok(m) => {
                    check_schedule(&mut report, &label, a, &m, r_d);
                    by_p.push((p, m.row_count()));
                }
                Err(e) => report.check(format!("{label}: schedule"), false, e.to_string()),
            }
        }
        if kind == SchedulerKind::Level {
            by_p.sort();
            let bad = by_p
                .windows(2)
                .find(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1);
            report.check(
                "level: more processors never add rows",
                bad.is_none(),
                bad.map(|w| format!("P={} has {} rows, P={} has {}", w[0].0, w[0].1, w[1].0, w[1].1))
                    .unwrap_or_default(),
            );
        }
    }

    if m_d.is_perfectly_decomposed() {
        let c_d = m_d.concurrency_degree();
        for n in (1..c_d).filter(|n| c_d.is_multiple_of(*n)) {
            let label = format!("perfect n={n}");
            match build_perfectly_parallel(a, &m_d, n) {
                Ok(m) => {
                    check_schedule(&mut report, &label, a, &m, r_d);
                    check_perfect(&mut report, &label, &m);
                }
                Err(e) => report.check(format!("{label}: schedule"), false, e.to_string()),
            }
        }
    }
    report
}

fn check_schedule(
    report: &mut VerificationReport,
    label: &str,
    a: &Algorithm,
    m: &ExecutionMatrix,
    r_d: usize,
) {
    let v = validate_execution_matrix(m, a.dag());
    report.check(
        format!("{label}: dependencies inherited, operators conserved"),
        v.is_valid(),
        v.violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "),
    );
    report.check(
        format!("{label}: r_E >= r_D"),
        m.row_count() >= r_d,
        format!("r_E = {}, r_D = {r_d}", m.row_count()),
    );
    let r = match metrics::report(m) {
        Ok(r) => r,
        Err(e) => {
            report.check(format!("{label}: metric identities"), false, e.to_string());
            return;
        }
    };
    let m_1 = m.serialize();
    let p = int(m.processors() as i64);
    let ratio = &r.r_calc_seq / &r.r_calc;
    let k = int(r.k as i64);

    let amdahl = metrics::amdahl_generalized(m, &m_1).map(|b| b.speed_up);
    report.check(
        format!("{label}: generalized Amdahl = direct speed-up"),
        amdahl.as_ref() == Ok(&r.speed_up),
        format!("{amdahl:?} vs {}", r.speed_up),
    );
    report.check(
        format!("{label}: T = T_seq + T_par"),
        &r.t_seq + &r.t_par == r.t,
        format!("{} + {} vs {}", r.t_seq, r.t_par, r.t),
    );
    bound(report, label, "Sp <= P R1/RP", &r.speed_up, &(&p * &ratio));
    bound(report, label, "Sp <= Sp_ideal", &r.speed_up, &r.speed_up_ideal);
    bound(report, label, "Ef <= R1/RP", &r.efficiency, &ratio);
    bound(report, label, "k (RP - R1) <= Oh", &(&k * (&r.r_calc - &r.r_calc_seq)), &r.overhead);
    bound(report, label, "r_D RP <= T", &(int(r_d as i64) * &r.r_calc), &r.t);
    report.check(
        format!("{label}: Ef = Sp / P"),
        r.efficiency == &r.speed_up / &p,
        "",
    );

    if m.is_uniform() {
        report.check(
            format!("{label}: Oh = sparsity (unit costs)"),
            r.overhead == int(r.sparsity as i64),
            format!("Oh = {}, sparsity = {}", r.overhead, r.sparsity),
        );
        report.check(
            format!("{label}: Sp_ideal = P, Sp = k / r_E (unit costs)"),
            r.speed_up_ideal == p && r.speed_up == Rational::new((r.k as i64).into(), (r.r_e as i64).into()),
            format!("Sp_ideal = {}, Sp = {}", r.speed_up_ideal, r.speed_up),
        );
    }

    let widths = m.row_widths();
    if widths.iter().all(|&w| w == 1 || w == m.processors()) {
        let classical =
            metrics::amdahl_classical(r.r_seq, r.k, m.processors(), &r.r_calc_seq, &r.r_calc);
        report.check(
            format!("{label}: classical Amdahl = direct speed-up"),
            classical.as_ref() == Ok(&r.speed_up),
            format!("{classical:?} vs {}", r.speed_up),
        );
    }
    if r.classification == Classification::PerfectlyParallel {
        check_equalities(report, label, &r);
    }
}

fn bound(report: &mut VerificationReport, label: &str, name: &str, lhs: &Rational, rhs: &Rational) {
    report.check(format!("{label}: {name}"), lhs <= rhs, format!("{lhs} vs {rhs}"));
}

fn check_equalities(report: &mut VerificationReport, label: &str, r: &MetricsReport) {
    report.check(
        format!("{label}: Sp = Sp_ideal, Oh = Oh_ideal, Ef = Ef_ideal"),
        r.speed_up == r.speed_up_ideal
            && r.overhead == r.overhead_ideal
            && r.efficiency == r.efficiency_ideal,
        format!(
            "Sp {} / {}, Oh {} / {}, Ef {} / {}",
            r.speed_up, r.speed_up_ideal, r.overhead, r.overhead_ideal, r.efficiency, r.efficiency_ideal
        ),
    );
}

fn check_perfect(report: &mut VerificationReport, label: &str, m: &ExecutionMatrix) {
    report.check(
        format!("{label}: classified perfectly parallel"),
        m.classify() == Classification::PerfectlyParallel,
        m.classify().to_string(),
    );
    let m_1 = m.serialize();
    let p = int(m.processors() as i64);
    let t_p = metrics::exec_time(m);
    let expected = metrics::exec_time(&m_1) / &p * (metrics::r_calc(m) / metrics::r_calc(&m_1));
    report.check(
        format!("{label}: T_P = T_1 / P * RP / R1"),
        t_p == expected,
        format!("{t_p} vs {expected}"),
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem_spec::{reduction_algorithm, ProblemSpec, RefinementLevel};

    #[test]
    fn generated_reductions_pass() {
        for level in [RefinementLevel::Level(1), RefinementLevel::Level(2), RefinementLevel::Full] {
            let a = reduction_algorithm(16, level).unwrap();
            let r = verify_algorithm(&a, &[1, 2, 3, 4, 8, 16]);
            assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        }
        let full = verify_algorithm(&reduction_algorithm(16, RefinementLevel::Full).unwrap(), &[8]);
        assert!(full.checks.iter().any(|c| c.name.contains("Oh = sparsity")));
    }

    #[test]
    fn cycle_fails_verification() {
        let a = reduction_algorithm(4, RefinementLevel::Full).unwrap();
        let mut spec = ProblemSpec::from_algorithm("r4", &a);
        let (dep, pre) = spec.dependencies[0].clone();
        spec.dependencies.push((pre, dep));
        let loaded = LoadedSpec::parse(&spec.to_json_pretty()).unwrap();
        let r = verify_spec(&loaded, &[2]);
        assert!(!r.passed());
        assert!(r.checks[0].detail.contains("cycle"));
    }

    #[test]
    fn longest_chain_oracle() {
        let a = reduction_algorithm(32, RefinementLevel::Full).unwrap();
        assert_eq!(longest_chain(a.dag()), 5);
    }
}
