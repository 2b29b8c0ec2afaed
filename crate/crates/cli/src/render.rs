//! Plain-text table and CSV helpers. Rationals always render as reduced
//! `p/q` strings so output reparses exactly.

use lonely_core::exact::{format_rat, Rat};
use serde_json::Value;

pub fn rat_str(r: &Rat) -> String {
    format_rat(r)
}

pub fn rat_json(r: &Rat) -> Value {
    Value::String(format_rat(r))
}

pub fn edges_json(edges: &[(usize, usize)]) -> Value {
    Value::Array(
        edges
            .iter()
            .map(|&(i, j)| Value::Array(vec![i.into(), j.into()]))
            .collect(),
    )
}

/// Left-aligned columns separated by two spaces.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let render = |cells: Vec<&str>, out: &mut String| {
        let mut line = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            line.push_str(cell);
            let pad = widths[i].saturating_sub(cell.len());
            if i + 1 < cells.len() {
                line.extend(std::iter::repeat(' ').take(pad));
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    };
    render(headers.to_vec(), &mut out);
    for row in rows {
        render(row.iter().map(String::as_str).collect(), &mut out);
    }
    out
}

/// Comma-joined line; all values here are commas-free by construction.
pub fn csv_line(fields: &[String]) -> String {
    fields.join(",")
}

pub fn print_json(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("valid JSON tree"));
}
