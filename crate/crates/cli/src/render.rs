//! Plain-text rendering: aligned tables, fractions in lowest terms.

use kolmocensor::ch::ChReport;
use kolmocensor::orsay::{OrsayTables, NAMES};
use kolmocensor::polytope::{CorrelationVector, MembershipVerdict};
use kolmocensor::space::KolmogorovSpace;

fn width(s: &str) -> usize {
    s.chars().count()
}

fn pad(s: &str, w: usize) -> String {
    format!("{s}{}", " ".repeat(w.saturating_sub(width(s))))
}

/// Left-aligned columns separated by two spaces.
pub fn columns(rows: &[Vec<String>]) -> String {
    let ncol = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..ncol)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| width(s)).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r.iter().enumerate().map(|(c, s)| pad(s, widths[c])).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Boxed grid where every cell is a label line over a value line.
fn grid(cells: &[Vec<(String, String)>]) -> String {
    let ncol = cells[0].len();
    let w = cells
        .iter()
        .flatten()
        .map(|(l, v)| width(l).max(width(v)))
        .max()
        .unwrap_or(0)
        + 2;
    let rule = format!("+{}\n", format!("{}+", "-".repeat(w)).repeat(ncol));
    let mut out = rule.clone();
    for row in cells {
        for line in 0..2 {
            out.push('|');
            for (label, value) in row {
                let s = if line == 0 { label } else { value };
                out.push_str(&format!(" {}|", pad(s, w - 1)));
            }
            out.push('\n');
        }
        out.push_str(&rule);
    }
    out
}

fn literal(name: &str, on: bool) -> String {
    if on {
        name.to_string()
    } else {
        format!("¬{name}")
    }
}

pub fn context_tables(t: &OrsayTables) -> String {
    let mut out = String::new();
    for ctx in &t.contexts {
        let (l, r) = (NAMES[ctx.left], NAMES[ctx.right]);
        let cells: Vec<Vec<(String, String)>> = [true, false]
            .iter()
            .enumerate()
            .map(|(i, &lo)| {
                [true, false]
                    .iter()
                    .enumerate()
                    .map(|(j, &ro)| (format!("{}∩{}", literal(l, lo), literal(r, ro)), ctx.cells[i][j].to_string()))
                    .collect()
            })
            .collect();
        out.push_str(&format!("{}\n{}\n", ctx.title(), grid(&cells)));
    }
    out
}

pub fn censored_table(t: &OrsayTables) -> String {
    let rows = [("A", true), ("A", false), ("A'", true), ("A'", false)];
    let cols = [("B", true), ("B", false), ("B'", true), ("B'", false)];
    let cells: Vec<Vec<(String, String)>> = rows
        .iter()
        .enumerate()
        .map(|(i, (l, lo))| {
            cols.iter()
                .enumerate()
                .map(|(j, (r, ro))| (format!("{}∩{}", literal(l, *lo), literal(r, *ro)), t.censored[i][j].to_string()))
                .collect()
        })
        .collect();
    format!("censored representation\n{}", grid(&cells))
}

pub fn verdict(p: &CorrelationVector, v: &MembershipVerdict) -> String {
    match v {
        MembershipVerdict::Inside { weights } => {
            let mut rows = vec![vec!["eps".to_string(), "weight".to_string()]];
            rows.extend(weights.iter().map(|(e, w)| vec![e.to_string(), w.to_string()]));
            format!("inside: convex combination of {} vertices\n{}", weights.len(), columns(&rows))
        }
        MembershipVerdict::Outside { certificate } => {
            let mut rows = vec![vec!["I".to_string(), "c".to_string()]];
            rows.extend(
                p.scheme()
                    .sets()
                    .iter()
                    .zip(&certificate.coefficients)
                    .map(|(s, c)| vec![s.to_string(), c.to_string()]),
            );
            format!(
                "outside: c·p + c0 = {} > 0 while c·u + c0 <= {} on every vertex\nc0 = {}\n{}",
                certificate.apply(p.values()),
                certificate.max_over_vertices(p.scheme()),
                certificate.constant,
                columns(&rows)
            )
        }
    }
}

pub fn ch(report: &ChReport) -> String {
    let mut rows = vec![["inequality", "value", "slack", ""].map(String::from).to_vec()];
    for r in &report.rows {
        rows.push(vec![
            r.label.clone(),
            r.value.to_string(),
            r.slack.to_string(),
            if r.satisfied { "ok" } else { "VIOLATED" }.to_string(),
        ]);
    }
    let verdict = if report.holds { "all inequalities hold" } else { "violated" };
    format!("{}{verdict}\n", columns(&rows))
}

pub fn space(s: &KolmogorovSpace) -> String {
    let mut rows = vec![["point", "mass", "events"].map(String::from).to_vec()];
    for k in 0..s.len() {
        rows.push(vec![s.points()[k].clone(), s.masses()[k].to_string(), s.events_of(k).join(" ")]);
    }
    columns(&rows)
}
