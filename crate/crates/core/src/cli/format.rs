//! CSV output: shortest round-trip decimal, scientific outside `[1e-5, 1e16)`.

use std::fmt::Write as _;

pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Header line plus one row per index; every column has the same length.
pub fn csv(header: &[&str], columns: &[&[f64]]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    let rows = columns.first().map_or(0, |c| c.len());
    for i in 0..rows {
        for (k, c) in columns.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            out.push_str(&fmt_num(c[i]));
        }
        out.push('\n');
    }
    out
}

/// `# key = value` metadata line.
pub fn meta(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "# {key} = {value}");
}
