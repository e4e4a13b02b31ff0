//! Human-readable and CSV renderings of reports.

use std::fmt::Write;

use anyhow::Result;
use collegeapp::{Certificate, FrontierView, ReportView};

/// `x` with six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn certificate(c: &Certificate) -> String {
    match c {
        Certificate::Exact => "exact".into(),
        Certificate::Approximate { epsilon, .. } => {
            format!("within a factor {} of optimal", sig6(1.0 - epsilon))
        }
        Certificate::Heuristic => "heuristic, no guarantee".into(),
    }
}

fn join(ids: &[usize]) -> String {
    ids.iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn report(v: &ReportView) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "algorithm   {} ({})",
        v.algorithm,
        certificate(&v.certificate)
    );
    let _ = writeln!(s, "portfolio   {{{}}}", join(&v.portfolio));
    let _ = writeln!(s, "value       {}", sig6(v.value));
    let _ = writeln!(s, "cost        {} of {}", sig6(v.cost), sig6(v.budget));
    if let Some(order) = &v.entry_order {
        let _ = writeln!(s, "entry order {}", join(order));
    }
    if let Some(ms) = v.wall_time_ms {
        let _ = writeln!(s, "time        {} ms", sig6(ms));
    }
    if !v.attendance.schools.is_empty() {
        let _ = writeln!(s, "attendance");
        let width = v
            .attendance
            .schools
            .iter()
            .map(|a| a.label.len())
            .max()
            .unwrap_or(0);
        for a in &v.attendance.schools {
            let _ = writeln!(
                s,
                "  {:>4}  {:<width$}  {}",
                a.school,
                a.label,
                sig6(a.probability)
            );
        }
        let _ = writeln!(
            s,
            "  {:>4}  {:<width$}  {}",
            "-",
            "none",
            sig6(v.attendance.none)
        );
    }
    s
}

pub fn report_csv(v: &ReportView) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["school", "label", "probability"])?;
    for a in &v.attendance.schools {
        w.write_record([
            a.school.to_string(),
            a.label.clone(),
            a.probability.to_string(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn frontier(v: &FrontierView) -> String {
    let mut s = String::new();
    let width = v.labels.iter().map(String::len).max().unwrap_or(0).max(5);
    let _ = writeln!(s, "{:>4}  {:>6}  {:<width$}  value", "h", "school", "label");
    for p in &v.points {
        let _ = writeln!(
            s,
            "{:>4}  {:>6}  {:<width$}  {}",
            p.h,
            p.school,
            p.label,
            sig6(p.value)
        );
    }
    s
}

pub fn frontier_csv(v: &FrontierView) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["h", "school", "label", "value"])?;
    for p in &v.points {
        w.write_record([
            p.h.to_string(),
            p.school.to_string(),
            p.label.clone(),
            p.value.to_string(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}
