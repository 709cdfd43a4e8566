//! Plain-text views for `--format table`.

use parcalc::{to_decimal, ExecutionMatrix, MetricsReport, Rational, VerificationReport};
use std::fmt::Write;

/// `PARCALC_COLOR=1` turns on ANSI styling; anything else leaves it off.
pub fn color_enabled() -> bool {
    std::env::var("PARCALC_COLOR").is_ok_and(|v| v == "1")
}

struct Style(bool);

impl Style {
    fn bold(&self, s: &str) -> String {
        self.wrap("1", s)
    }

    fn green(&self, s: &str) -> String {
        self.wrap("32", s)
    }

    fn red(&self, s: &str) -> String {
        self.wrap("31", s)
    }

    fn wrap(&self, code: &str, s: &str) -> String {
        if self.0 {
            format!("\x1b[{code}m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }
}

fn exact(r: &Rational) -> String {
    if r.is_integer() {
        r.to_string()
    } else {
        format!("{r} ({})", to_decimal(r))
    }
}

pub fn report_table(r: &MetricsReport, color: bool) -> String {
    let s = Style(color);
    let mut out = String::new();
    let rows: Vec<(&str, String)> = vec![
        ("unit", r.unit.clone()),
        ("tcalc", exact(&r.tcalc)),
        ("k", r.k.to_string()),
        ("P", r.processors.to_string()),
        ("r_E", r.r_e.to_string()),
        ("classification", r.classification.to_string()),
        ("beta_ME", exact(&r.beta_me)),
        ("beta_sum", exact(&r.beta_sum)),
        ("R^P", exact(&r.r_calc)),
        ("R^1", exact(&r.r_calc_seq)),
        ("T", exact(&r.t)),
        ("T_seq", exact(&r.t_seq)),
        ("T_par", exact(&r.t_par)),
        ("T(1)", exact(&r.t_1)),
        ("Sp", exact(&r.speed_up)),
        ("Sp_ideal", exact(&r.speed_up_ideal)),
        ("Q", exact(&r.cost)),
        ("Oh", exact(&r.overhead)),
        ("Oh_ideal", exact(&r.overhead_ideal)),
        ("Ef", exact(&r.efficiency)),
        ("Ef_ideal", exact(&r.efficiency_ideal)),
        ("r_seq", r.r_seq.to_string()),
        ("sparsity", r.sparsity.to_string()),
    ];
    let _ = writeln!(out, "{}", s.bold("metric           value"));
    for (name, value) in rows {
        let _ = writeln!(out, "{name:<16} {value}");
    }
    for (width, count) in &r.r_par {
        let _ = writeln!(out, "{:<16} {count}", format!("r_par[{width}]"));
    }
    for (width, a) in &r.alpha {
        let _ = writeln!(out, "{:<16} {}", format!("alpha[{width}]"), exact(a));
    }
    for w in &r.warnings {
        let _ = writeln!(out, "{} {w}", s.red("warning:"));
    }
    out
}

pub fn matrix_table(m: &ExecutionMatrix, color: bool) -> String {
    let s = Style(color);
    format!(
        "{}\n{m}\n",
        s.bold(&format!(
            "P = {}, r_E = {}, operators = {}, empty cells = {}, {}",
            m.processors(),
            m.row_count(),
            m.op_count(),
            m.total_sparsity(),
            m.classify()
        ))
    )
}

pub fn verification_table(r: &VerificationReport, color: bool) -> String {
    let s = Style(color);
    let mut out = String::new();
    for c in &r.checks {
        let mark = if c.passed { s.green("PASS") } else { s.red("FAIL") };
        if c.passed || c.detail.is_empty() {
            let _ = writeln!(out, "{mark} {}", c.name);
        } else {
            let _ = writeln!(out, "{mark} {}: {}", c.name, c.detail);
        }
    }
    let failed = r.failures().count();
    let _ = writeln!(
        out,
        "{}",
        s.bold(&format!("{} checks, {failed} failed", r.checks.len()))
    );
    out
}
