//! Performance metrics of execution matrices, in units of `tcalc`.
//!
//! All quantities are exact rationals. Functions that compare a schedule with
//! its single-processor counterpart take both matrices; [`report`] builds the
//! counterpart itself with [`ExecutionMatrix::serialize`].

use crate::algorithm::Algorithm;
use crate::decomposition::{DecompositionError, PolynomialComplexity};
use crate::rational::{int, Rational};
use crate::scheduler::{Classification, ExecutionMatrix};
use num::{One, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("row {row} out of range (matrix has {rows} rows)")]
    RowOutOfRange { row: usize, rows: usize },
    #[error("granularity sets differ: {left:?} vs {right:?}")]
    GranularityMismatch { left: Vec<String>, right: Vec<String> },
    #[error("{n} is not divisible by {mu}")]
    Indivisible { n: u64, mu: u64 },
    #[error("complexity polynomial vanishes at {0}")]
    DegenerateComplexity(Rational),
    #[error("overhead equals sparsity only when every operator costs 1")]
    NonUniformBeta,
    #[error("reference is not a single-processor schedule of the same {k} operators")]
    NotSerialization { k: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal identity violated: {0}")]
    InternalIdentityViolation(String),
}

impl From<DecompositionError> for MetricsError {
    fn from(e: DecompositionError) -> Self {
        match e {
            DecompositionError::Indivisible { n, mu } => MetricsError::Indivisible { n, mu },
            other => MetricsError::InvalidArgument(other.to_string()),
        }
    }
}

fn ratio_of(num: usize, den: usize) -> Rational {
    Rational::new((num as i64).into(), (den as i64).into())
}

/// Most expensive operator of row `r`; an empty row costs 0.
pub fn row_time(m: &ExecutionMatrix, r: usize) -> Result<Rational, MetricsError> {
    let row = m.rows().get(r).ok_or(MetricsError::RowOutOfRange {
        row: r,
        rows: m.row_count(),
    })?;
    Ok(row
        .iter()
        .flatten()
        .map(|op| op.beta.clone())
        .max()
        .unwrap_or_else(Rational::zero))
}

pub fn row_times(m: &ExecutionMatrix) -> Vec<Rational> {
    (0..m.row_count())
        .map(|r| row_time(m, r).expect("row index in range"))
        .collect()
}

/// Sum of row maxima, the execution time of the schedule.
pub fn exec_time(m: &ExecutionMatrix) -> Rational {
    row_times(m).into_iter().sum()
}

/// Sum of all operator costs.
pub fn beta_sum(m: &ExecutionMatrix) -> Rational {
    m.ops().map(|op| op.beta.clone()).sum()
}

/// `(T_seq, T_par)`: time of single-operator rows and of the remaining rows.
pub fn time_split(m: &ExecutionMatrix) -> (Rational, Rational) {
    let mut seq = Rational::zero();
    let mut par = Rational::zero();
    for (t, w) in row_times(m).into_iter().zip(m.row_widths()) {
        if w == 1 {
            seq += t;
        } else {
            par += t;
        }
    }
    (seq, par)
}

/// Average row time.
pub fn r_calc(m: &ExecutionMatrix) -> Rational {
    exec_time(m) / int(m.row_count() as i64)
}

/// Ratio of complexities of two algorithms with the same granularity set.
pub fn scale_up(a_i: &Algorithm, a_j: &Algorithm) -> Result<Rational, MetricsError> {
    if !a_i.same_granularity(a_j) {
        let names = |a: &Algorithm| a.granularity_set().into_iter().map(String::from).collect();
        return Err(MetricsError::GranularityMismatch {
            left: names(a_i),
            right: names(a_j),
        });
    }
    Ok(ratio_of(a_i.complexity(), a_j.complexity()))
}

/// Scale-up of one problem of size `n_r` against `mu` similar chunks of size
/// `n_r / mu`, both with complexity `c`. Returns `(xi, scup)` with
/// `scup = xi * mu^(d-1)`.
pub fn scale_up_polynomial(
    c: &PolynomialComplexity,
    n_r: u64,
    mu: u64,
) -> Result<(Rational, Rational), MetricsError> {
    if mu == 0 || mu > n_r || !n_r.is_multiple_of(mu) {
        return Err(MetricsError::Indivisible { n: n_r, mu });
    }
    let d = c.degree();
    let n = int(n_r as i64);
    let mu_r = int(mu as i64);
    // a_d + a_{d-1}/N + ... + a_0/N^d  over  a_d + a_{d-1} mu/N + ... + a_0 mu^d/N^d
    let mut top = Rational::zero();
    let mut bottom = Rational::zero();
    let mut inv_n = Rational::one();
    let mut mu_pow = Rational::one();
    for a in c.coefficients() {
        top += a * &inv_n;
        bottom += a * &mu_pow * &inv_n;
        inv_n /= &n;
        mu_pow *= &mu_r;
    }
    if bottom.is_zero() {
        return Err(MetricsError::DegenerateComplexity(int((n_r / mu) as i64)));
    }
    let xi = top / bottom;
    let scup = &xi * num::pow(mu_r, d.saturating_sub(1));
    let scup = if d == 0 { &xi / int(mu as i64) } else { scup };
    Ok((xi, scup))
}

/// `beta_sum / beta_ME`.
pub fn speed_up(m_p: &ExecutionMatrix) -> Rational {
    beta_sum(m_p) / exec_time(m_p)
}

/// Speed-up against a sequential algorithm of complexity `k_prime` from
/// another decomposition of the same problem.
pub fn speed_up_cross(m_p: &ExecutionMatrix, k_prime: usize) -> Rational {
    ratio_of(k_prime, m_p.op_count()) * speed_up(m_p)
}

/// [`speed_up_cross`] with the reference given as an algorithm; checks the
/// granularity sets.
pub fn speed_up_cross_algorithm(
    m_p: &ExecutionMatrix,
    a: &Algorithm,
    reference: &Algorithm,
) -> Result<Rational, MetricsError> {
    scale_up(reference, a)?;
    Ok(speed_up_cross(m_p, reference.complexity()))
}

/// Speed-up of a `P`-processor schedule over a `Q`-processor schedule,
/// `beta_ME(Q) / beta_ME(P)`.
pub fn speed_up_between(m_p: &ExecutionMatrix, m_q: &ExecutionMatrix) -> Rational {
    exec_time(m_q) / exec_time(m_p)
}

fn check_serial(m_p: &ExecutionMatrix, m_1: &ExecutionMatrix) -> Result<(), MetricsError> {
    if m_1.processors() != 1 || m_1.op_count() != m_p.op_count() {
        return Err(MetricsError::NotSerialization { k: m_p.op_count() });
    }
    Ok(())
}

/// `R^1 / R^P`.
fn r_ratio(m_p: &ExecutionMatrix, m_1: &ExecutionMatrix) -> Rational {
    r_calc(m_1) / r_calc(m_p)
}

/// `P * R^1 / R^P`.
pub fn ideal_speed_up(m_p: &ExecutionMatrix, m_1: &ExecutionMatrix) -> Result<Rational, MetricsError> {
    check_serial(m_p, m_1)?;
    Ok(int(m_p.processors() as i64) * r_ratio(m_p, m_1))
}

/// Row-width fractions and the speed-up they imply.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AmdahlBreakdown {
    /// `alpha[i] = r_par_i / k` for every occupied width `i`.
    #[serde(serialize_with = "crate::rational::exact::map")]
    pub alpha: BTreeMap<usize, Rational>,
    #[serde(with = "crate::rational::exact")]
    pub speed_up: Rational,
}

/// Generalized Amdahl's law: `Sp = (R^1 / R^P) / sum_i alpha_i`.
///
/// Rows without any operator carry no fraction; on matrices that have such
/// rows the result differs from [`speed_up`].
pub fn amdahl_generalized(
    m: &ExecutionMatrix,
    m_1: &ExecutionMatrix,
) -> Result<AmdahlBreakdown, MetricsError> {
    check_serial(m, m_1)?;
    let k = m.op_count();
    let alpha: BTreeMap<usize, Rational> = m
        .row_profile()
        .r_par
        .into_iter()
        .map(|(i, count)| (i, ratio_of(count, k)))
        .collect();
    let total: Rational = alpha.values().cloned().sum();
    Ok(AmdahlBreakdown {
        speed_up: r_ratio(m, m_1) / total,
        alpha,
    })
}

/// Classical Amdahl's law for schedules whose rows hold either one or `P`
/// operators: `(r1 / rp) / (alpha + (1 - alpha) / P)`, `alpha = r_seq / k`.
pub fn amdahl_classical(
    r_seq: usize,
    k: usize,
    processors: usize,
    r1: &Rational,
    rp: &Rational,
) -> Result<Rational, MetricsError> {
    if k == 0 || processors == 0 || r_seq > k {
        return Err(MetricsError::InvalidArgument(format!(
            "need k > 0, P > 0 and r_seq <= k (got r_seq={r_seq}, k={k}, P={processors})"
        )));
    }
    if rp.is_zero() {
        return Err(MetricsError::InvalidArgument("R^P must be non-zero".into()));
    }
    let alpha = ratio_of(r_seq, k);
    let denom = &alpha + (Rational::one() - &alpha) / int(processors as i64);
    Ok((r1 / rp) / denom)
}

/// Processors times execution time, `c_E * beta_ME`.
pub fn cost(m: &ExecutionMatrix) -> Rational {
    int(m.processors() as i64) * exec_time(m)
}

/// `Q(P) - Q(1)`.
pub fn overhead(m_p: &ExecutionMatrix, m_1: &ExecutionMatrix) -> Result<Rational, MetricsError> {
    check_serial(m_p, m_1)?;
    Ok(cost(m_p) - cost(m_1))
}

/// `k (R^P - R^1)`, a lower bound of [`overhead`].
pub fn ideal_overhead(m_p: &ExecutionMatrix, m_1: &ExecutionMatrix) -> Result<Rational, MetricsError> {
    check_serial(m_p, m_1)?;
    Ok(int(m_p.op_count() as i64) * (r_calc(m_p) - r_calc(m_1)))
}

/// Total empty cells; the overhead when every operator costs 1.
pub fn overhead_sparsity(m: &ExecutionMatrix) -> Result<Rational, MetricsError> {
    if !m.is_uniform() {
        return Err(MetricsError::NonUniformBeta);
    }
    Ok(int(m.total_sparsity() as i64))
}

/// `beta_sum / (r_E c_E R^P)`, equal to `Sp / P`.
pub fn efficiency(m_p: &ExecutionMatrix, m_1: &ExecutionMatrix) -> Result<Rational, MetricsError> {
    check_serial(m_p, m_1)?;
    let cells = int((m_p.row_count() * m_p.processors()) as i64);
    Ok(beta_sum(m_1) / (cells * r_calc(m_p)))
}

/// `R^1 / R^P`.
pub fn ideal_efficiency(m_p: &ExecutionMatrix, m_1: &ExecutionMatrix) -> Result<Rational, MetricsError> {
    check_serial(m_p, m_1)?;
    Ok(r_ratio(m_p, m_1))
}

/// Every metric of one schedule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MetricsReport {
    /// Time unit of the time-valued fields: `tcalc`, or `s` after scaling.
    pub unit: String,
    #[serde(with = "crate::rational::exact")]
    pub tcalc: Rational,
    pub k: usize,
    pub processors: usize,
    pub r_e: usize,
    pub classification: Classification,
    #[serde(serialize_with = "crate::rational::exact::vec")]
    pub beta_row: Vec<Rational>,
    #[serde(with = "crate::rational::exact")]
    pub beta_me: Rational,
    #[serde(with = "crate::rational::exact")]
    pub beta_sum: Rational,
    /// `R^P`.
    #[serde(with = "crate::rational::exact")]
    pub r_calc: Rational,
    /// `R^1`.
    #[serde(with = "crate::rational::exact")]
    pub r_calc_seq: Rational,
    #[serde(with = "crate::rational::exact")]
    pub t: Rational,
    #[serde(with = "crate::rational::exact")]
    pub t_seq: Rational,
    #[serde(with = "crate::rational::exact")]
    pub t_par: Rational,
    #[serde(with = "crate::rational::exact")]
    pub t_1: Rational,
    #[serde(with = "crate::rational::exact")]
    pub speed_up: Rational,
    #[serde(with = "crate::rational::exact")]
    pub speed_up_ideal: Rational,
    #[serde(with = "crate::rational::exact")]
    pub cost: Rational,
    #[serde(with = "crate::rational::exact")]
    pub overhead: Rational,
    #[serde(with = "crate::rational::exact")]
    pub overhead_ideal: Rational,
    #[serde(with = "crate::rational::exact")]
    pub efficiency: Rational,
    #[serde(with = "crate::rational::exact")]
    pub efficiency_ideal: Rational,
    pub r_seq: usize,
    pub r_par: BTreeMap<usize, usize>,
    #[serde(serialize_with = "crate::rational::exact::map")]
    pub alpha: BTreeMap<usize, Rational>,
    pub sparsity: usize,
    pub warnings: Vec<String>,
}

impl MetricsReport {
    /// Expresses time-valued fields in seconds given the duration of `tcalc`.
    pub fn with_tcalc(mut self, seconds: Rational) -> Self {
        for field in [
            &mut self.t,
            &mut self.t_seq,
            &mut self.t_par,
            &mut self.t_1,
            &mut self.cost,
            &mut self.overhead,
            &mut self.overhead_ideal,
        ] {
            *field = &*field * &seconds;
        }
        self.unit = "s".to_string();
        self.tcalc = seconds;
        self
    }
}

fn ensure(ok: bool, what: &str) -> Result<(), MetricsError> {
    if ok {
        Ok(())
    } else {
        Err(MetricsError::InternalIdentityViolation(what.to_string()))
    }
}

/// Evaluates all metrics of `m_p` against its serialization.
pub fn report(m_p: &ExecutionMatrix) -> Result<MetricsReport, MetricsError> {
    let m_1 = m_p.serialize();
    let profile = m_p.row_profile();
    let beta_row = row_times(m_p);
    let beta_me: Rational = beta_row.iter().cloned().sum();
    let (t_seq, t_par) = time_split(m_p);
    let sp = speed_up(m_p);
    let amdahl = amdahl_generalized(m_p, &m_1)?;
    let p = int(m_p.processors() as i64);
    let ef = efficiency(m_p, &m_1)?;

    let mut warnings = Vec::new();
    ensure(&t_seq + &t_par == beta_me, "T = T_seq + T_par")?;
    ensure(&sp / &p == ef, "Ef = Sp / P")?;
    ensure(exec_time(&m_1) == beta_sum(m_p), "T(1) = beta_sum")?;
    if profile.r_empty > 0 {
        warnings.push(format!(
            "{} row(s) hold no operator; generalized Amdahl form not checked",
            profile.r_empty
        ));
    } else {
        ensure(amdahl.speed_up == sp, "generalized Amdahl speed-up = direct speed-up")?;
    }

    Ok(MetricsReport {
        unit: "tcalc".to_string(),
        tcalc: Rational::one(),
        k: m_p.op_count(),
        processors: m_p.processors(),
        r_e: m_p.row_count(),
        classification: m_p.classify(),
        r_calc: r_calc(m_p),
        r_calc_seq: r_calc(&m_1),
        t: beta_me.clone(),
        t_1: exec_time(&m_1),
        beta_sum: beta_sum(m_p),
        beta_me,
        beta_row,
        t_seq,
        t_par,
        speed_up: sp,
        speed_up_ideal: ideal_speed_up(m_p, &m_1)?,
        cost: cost(m_p),
        overhead: overhead(m_p, &m_1)?,
        overhead_ideal: ideal_overhead(m_p, &m_1)?,
        efficiency: ef,
        efficiency_ideal: ideal_efficiency(m_p, &m_1)?,
        r_seq: profile.r_seq,
        r_par: profile.r_par,
        alpha: amdahl.alpha,
        sparsity: m_p.total_sparsity(),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithm::Operator;
    use crate::decomposition::generate_reduction;
    use crate::rational::ratio;
    use crate::scheduler::{schedule_level_chunked, ScheduledOp};
    use std::sync::Arc;

    fn op(e: &str, beta: i64) -> Option<ScheduledOp> {
        Some(ScheduledOp::new(e, "op", int(beta)))
    }

    /// `[[2, 1], [1, 3]]`, perfectly parallel on 2 processors.
    fn two_by_two() -> ExecutionMatrix {
        ExecutionMatrix::new(2, vec![vec![op("a", 2), op("b", 1)], vec![op("c", 1), op("d", 3)]]).unwrap()
    }

    fn d15_at(p: usize) -> ExecutionMatrix {
        let d = generate_reduction(16).unwrap().1.pop().unwrap();
        let a = Algorithm::bind_with(Arc::new(d), |_| Operator::new("add", int(1)).unwrap());
        schedule_level_chunked(&a, &a.decomposition().matrix(), p).unwrap()
    }

    #[test]
    fn row_times() {
        let m = ExecutionMatrix::new(3, vec![vec![op("a", 2), op("b", 5), None], vec![None, None, None], vec![op("c", 1), None, None]]).unwrap();
        assert_eq!(row_time(&m, 0).unwrap(), int(5));
        assert_eq!(row_time(&m, 1).unwrap(), int(0));
        assert_eq!(row_time(&m, 2).unwrap(), int(1));
        assert_eq!(row_time(&m, 3).unwrap_err(), MetricsError::RowOutOfRange { row: 3, rows: 3 });
    }

    #[test]
    fn exec_times() {
        assert_eq!(exec_time(&d15_at(8)), int(4));
        assert_eq!(exec_time(&two_by_two()), int(5));
        assert_eq!(exec_time(&d15_at(1)), int(15));
    }

    #[test]
    fn split() {
        assert_eq!(time_split(&d15_at(8)), (int(1), int(3)));
        assert_eq!(time_split(&two_by_two()), (int(0), int(5)));
        assert_eq!(time_split(&d15_at(1)), (int(15), int(0)));
    }

    #[test]
    fn r_calc_values() {
        assert_eq!(r_calc(&d15_at(8)), int(1));
        assert_eq!(r_calc(&d15_at(3)), int(1));
        assert_eq!(r_calc(&two_by_two()), ratio(5, 2));
        assert_eq!(r_calc(&two_by_two().serialize()), ratio(7, 4));
    }

    #[test]
    fn speed_ups() {
        assert_eq!(speed_up(&d15_at(8)), ratio(15, 4));
        assert_eq!(speed_up(&two_by_two()), ratio(7, 5));
        assert_eq!(speed_up(&d15_at(1)), int(1));
        assert_eq!(speed_up_cross(&d15_at(8), 15), speed_up(&d15_at(8)));
        assert_eq!(speed_up_cross(&d15_at(8), 30), ratio(15, 2));
        assert!(speed_up_cross(&d15_at(8), 30) <= ratio(30, 15) * int(8));
        assert_eq!(speed_up_between(&d15_at(8), &d15_at(4)), ratio(5, 4));
        assert_eq!(speed_up_between(&d15_at(8), &d15_at(1)), speed_up(&d15_at(8)));
    }

    #[test]
    fn ideal_speed_ups() {
        let m = d15_at(8);
        assert_eq!(ideal_speed_up(&m, &m.serialize()).unwrap(), int(8));
        assert!(ideal_speed_up(&m, &m.serialize()).unwrap() >= speed_up(&m));
        let m = two_by_two();
        assert_eq!(ideal_speed_up(&m, &m.serialize()).unwrap(), ratio(7, 5));
        assert!(matches!(
            ideal_speed_up(&m, &m),
            Err(MetricsError::NotSerialization { .. })
        ));
    }

    #[test]
    fn amdahl_forms() {
        let m = d15_at(8);
        let b = amdahl_generalized(&m, &m.serialize()).unwrap();
        let f = ratio(1, 15);
        assert_eq!(
            b.alpha,
            BTreeMap::from([(1, f.clone()), (2, f.clone()), (4, f.clone()), (8, f)])
        );
        assert_eq!(b.speed_up, ratio(15, 4));

        let m = two_by_two();
        let b = amdahl_generalized(&m, &m.serialize()).unwrap();
        assert_eq!(b.alpha.keys().copied().collect::<Vec<_>>(), vec![2]);
        assert_eq!(b.speed_up, int(2) * ratio(7, 4) / ratio(5, 2));

        let m = d15_at(1);
        let b = amdahl_generalized(&m, &m.serialize()).unwrap();
        assert_eq!(b.alpha, BTreeMap::from([(1, int(1))]));
        assert_eq!(b.speed_up, int(1));
    }

    #[test]
    fn amdahl_classical_values() {
        let one = Rational::one();
        assert_eq!(amdahl_classical(1, 15, 7, &one, &one).unwrap(), int(5));
        assert_eq!(amdahl_classical(0, 12, 4, &int(3), &int(2)).unwrap(), int(4) * ratio(3, 2));
        assert_eq!(amdahl_classical(12, 12, 4, &int(3), &int(2)).unwrap(), ratio(3, 2));
        assert!(amdahl_classical(13, 12, 4, &one, &one).is_err());
        assert!(amdahl_classical(1, 12, 0, &one, &one).is_err());
        assert!(amdahl_classical(1, 12, 4, &one, &int(0)).is_err());
    }

    #[test]
    fn cost_and_overhead() {
        let m = d15_at(8);
        let s = m.serialize();
        assert_eq!(cost(&m), int(32));
        assert_eq!(cost(&s), beta_sum(&m));
        assert_eq!(overhead(&m, &s).unwrap(), int(17));
        assert_eq!(overhead_sparsity(&m).unwrap(), int(17));
        assert_eq!(overhead_sparsity(&d15_at(4)).unwrap(), int(5));
        assert_eq!(overhead(&s, &s).unwrap(), int(0));

        let m = two_by_two();
        let s = m.serialize();
        assert_eq!(cost(&m), int(10));
        assert_eq!(overhead(&m, &s).unwrap(), int(3));
        assert_eq!(ideal_overhead(&m, &s).unwrap(), int(3));
        assert_eq!(overhead_sparsity(&m).unwrap_err(), MetricsError::NonUniformBeta);

        let full = ExecutionMatrix::new(2, vec![vec![op("a", 1), op("b", 1)]]).unwrap();
        assert_eq!(overhead_sparsity(&full).unwrap(), int(0));
    }

    #[test]
    fn efficiencies() {
        let m = d15_at(8);
        assert_eq!(efficiency(&m, &m.serialize()).unwrap(), ratio(15, 32));
        let m = two_by_two();
        assert_eq!(efficiency(&m, &m.serialize()).unwrap(), ratio(7, 10));
        assert_eq!(ideal_efficiency(&m, &m.serialize()).unwrap(), ratio(7, 10));
        let m = d15_at(1);
        assert_eq!(efficiency(&m, &m.serialize()).unwrap(), int(1));
    }

    #[test]
    fn polynomial_scale_up() {
        let minus_one = PolynomialComplexity::new(vec![int(1), int(-1)]).unwrap();
        assert_eq!(
            scale_up_polynomial(&minus_one, 16, 2).unwrap(),
            (ratio(15, 14), ratio(15, 14))
        );
        let square = PolynomialComplexity::new(vec![int(1), int(0), int(0)]).unwrap();
        assert_eq!(scale_up_polynomial(&square, 16, 4).unwrap(), (int(1), int(4)));
        assert_eq!(scale_up_polynomial(&minus_one, 16, 1).unwrap().1, int(1));
        assert_eq!(
            scale_up_polynomial(&minus_one, 16, 3).unwrap_err(),
            MetricsError::Indivisible { n: 16, mu: 3 }
        );
        assert!(matches!(
            scale_up_polynomial(&minus_one, 16, 16),
            Err(MetricsError::DegenerateComplexity(_))
        ));
        // constant complexity: every chunk costs the same as the whole
        let constant = PolynomialComplexity::new(vec![int(5)]).unwrap();
        assert_eq!(scale_up_polynomial(&constant, 16, 4).unwrap(), (int(1), ratio(1, 4)));
    }

    #[test]
    fn report_values() {
        let r = report(&d15_at(8)).unwrap();
        assert_eq!(r.k, 15);
        assert_eq!(r.t, int(4));
        assert_eq!(r.speed_up, ratio(15, 4));
        assert_eq!(r.efficiency, ratio(15, 32));
        assert_eq!(r.cost, int(32));
        assert_eq!(r.overhead, int(17));
        assert_eq!(r.sparsity, 17);
        assert!(r.warnings.is_empty());

        let r = report(&d15_at(1)).unwrap();
        assert_eq!((r.speed_up.clone(), r.efficiency.clone(), r.overhead.clone()), (int(1), int(1), int(0)));
        assert_eq!(r.cost, r.t_1);

        let r = report(&two_by_two()).unwrap();
        assert_eq!(r.t, int(5));
        assert_eq!(r.speed_up, ratio(7, 5));
        assert_eq!(r.efficiency, ratio(7, 10));
        assert_eq!(r.cost, int(10));
        assert_eq!(r.overhead, int(3));

        let scaled = report(&two_by_two()).unwrap().with_tcalc(ratio(1, 1000));
        assert_eq!(scaled.t, ratio(5, 1000));
        assert_eq!(scaled.speed_up, ratio(7, 5));
        assert_eq!(scaled.unit, "s");
    }

    #[test]
    fn report_warns_on_empty_rows() {
        let m = ExecutionMatrix::new(2, vec![vec![op("a", 1), op("b", 1)], vec![None, None], vec![op("c", 2), None]]).unwrap();
        let r = report(&m).unwrap();
        assert_eq!(r.warnings.len(), 1);
        assert_eq!(r.beta_row[1], int(0));
    }

    #[test]
    fn scale_up_needs_matching_granularity() {
        let (_, levels) = generate_reduction(16).unwrap();
        let add = || Operator::new("add", int(1)).unwrap();
        let full = Algorithm::bind_with(Arc::new(levels[2].clone()), |_| add());
        assert_eq!(scale_up(&full, &full).unwrap(), int(1));
        let mixed = Algorithm::bind_with(Arc::new(levels[0].clone()), |s| {
            if s.problem.input_size() == 2 {
                add()
            } else {
                Operator::new("sum8", int(7)).unwrap()
            }
        });
        assert!(matches!(
            scale_up(&full, &mixed),
            Err(MetricsError::GranularityMismatch { .. })
        ));
    }
}
