//! Plot-ready CSV: UTF-8, LF line endings, numbers printed like C's `%.17g`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::Result;
use crate::schemes::time::SolutionRecord;

/// Formats `x` as C's `printf("%.17g", x)` does.
pub fn format_g17(x: f64) -> String {
    format_g(x, 17)
}

fn format_g(x: f64, precision: usize) -> String {
    if x.is_nan() {
        return if x.is_sign_negative() { "-nan" } else { "nan" }.to_string();
    }
    if x.is_infinite() {
        return if x < 0.0 { "-inf" } else { "inf" }.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    let p = precision.max(1);
    // the exponent after rounding to p significant digits decides the style
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific formatting has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn row(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(format_g17).collect::<Vec<_>>().join(",")
}

/// `x,<names>` then one row per DOF of the final snapshot.
pub fn solution_csv(record: &SolutionRecord) -> String {
    let mut out = format!("x,{}\n", record.component_names.join(","));
    let snap = record.final_snapshot();
    for (x, u) in record.positions.iter().zip(&snap.values) {
        let _ = writeln!(out, "{}", row(std::iter::once(*x).chain(u.iter().copied())));
    }
    out
}

/// Final point values for schemes that carry them.
pub fn points_csv(record: &SolutionRecord) -> Option<String> {
    let positions = record.point_positions.as_ref()?;
    let points = record.final_snapshot().points.as_ref()?;
    let mut out = format!("x,{}\n", record.component_names.join(","));
    for (x, u) in positions.iter().zip(points) {
        let _ = writeln!(out, "{}", row(std::iter::once(*x).chain(u.iter().copied())));
    }
    Some(out)
}

/// `step,time,<totals>,entropy,alpha_max,fallback_cells`; the totals are
/// `mass` for scalar models and `mass,momentum,energy` for Euler.
pub fn ledger_csv(record: &SolutionRecord) -> String {
    let totals = if record.component_names.len() == 3 {
        "mass,momentum,energy"
    } else {
        "mass"
    };
    let mut out = format!("step,time,{totals},entropy,alpha_max,fallback_cells\n");
    for r in &record.ledger {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.step,
            format_g17(r.time),
            row(r.totals.iter().copied()),
            format_g17(r.entropy),
            format_g17(r.alpha_max),
            r.fallback_cells
        );
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, text)?;
    Ok(())
}
