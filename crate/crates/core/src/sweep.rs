//! Parameter sweeps over processor counts and chunk counts.

use crate::algorithm::Algorithm;
use crate::decomposition::PolynomialComplexity;
use crate::metrics::{self, scale_up_polynomial, MetricsError};
use crate::rational::{to_decimal, Rational};
use crate::scheduler::{schedule, ScheduleError, SchedulerKind};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SweepError {
    #[error("P = {p}: {source}")]
    Schedule { p: usize, source: ScheduleError },
    #[error("P = {p}: {source}")]
    Metrics { p: usize, source: MetricsError },
}

/// Metrics of one processor count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepRow {
    pub p: usize,
    pub r_e: usize,
    pub t: Rational,
    pub sp: Rational,
    pub sp_ideal: Rational,
    pub ef: Rational,
    pub q: Rational,
    pub oh: Rational,
    pub sparsity: usize,
}

impl SweepRow {
    /// Rational columns are followed by their decimal rendering.
    pub const HEADER: [&'static str; 15] = [
        "P",
        "r_E",
        "T",
        "T_decimal",
        "Sp",
        "Sp_decimal",
        "Sp_ideal",
        "Sp_ideal_decimal",
        "Ef",
        "Ef_decimal",
        "Q",
        "Q_decimal",
        "Oh",
        "Oh_decimal",
        "sparsity",
    ];

    pub fn record(&self) -> Vec<String> {
        let mut out = vec![self.p.to_string(), self.r_e.to_string()];
        for v in [&self.t, &self.sp, &self.sp_ideal, &self.ef, &self.q, &self.oh] {
            out.push(v.to_string());
            out.push(to_decimal(v));
        }
        out.push(self.sparsity.to_string());
        out
    }
}

/// One row per entry of `processors`, in the given order.
pub fn sweep_processors(
    a: &Algorithm,
    kind: SchedulerKind,
    processors: &[usize],
) -> Result<Vec<SweepRow>, SweepError> {
    processors
        .iter()
        .map(|&p| {
            let m = schedule(a, kind, Some(p)).map_err(|source| SweepError::Schedule { p, source })?;
            let r = metrics::report(&m).map_err(|source| SweepError::Metrics { p, source })?;
            Ok(SweepRow {
                p,
                r_e: r.r_e,
                t: r.t,
                sp: r.speed_up,
                sp_ideal: r.speed_up_ideal,
                ef: r.efficiency,
                q: r.cost,
                oh: r.overhead,
                sparsity: r.sparsity,
            })
        })
        .collect()
}

/// Scale-up of one chunk count; invalid counts keep their error message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuRow {
    pub mu: u64,
    pub result: Result<(Rational, Rational), String>,
}

impl MuRow {
    pub const HEADER: [&'static str; 7] =
        ["mu", "valid", "xi", "xi_decimal", "scup", "scup_decimal", "error"];

    pub fn record(&self) -> Vec<String> {
        match &self.result {
            Ok((xi, scup)) => vec![
                self.mu.to_string(),
                "true".into(),
                xi.to_string(),
                to_decimal(xi),
                scup.to_string(),
                to_decimal(scup),
                String::new(),
            ],
            Err(e) => vec![
                self.mu.to_string(),
                "false".into(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                e.clone(),
            ],
        }
    }
}

pub fn sweep_mu(c: &PolynomialComplexity, n_r: u64, mus: &[u64]) -> Vec<MuRow> {
    mus.iter()
        .map(|&mu| MuRow {
            mu,
            result: scale_up_polynomial(c, n_r, mu).map_err(|e| e.to_string()),
        })
        .collect()
}
