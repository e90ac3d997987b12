//! Text and CSV renderings of the reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use twistfock_core::algebra::GeneratorDictionary;
use twistfock_core::character::{CharacterTable, HwvReport};
use twistfock_core::fock::FockVector;
use twistfock_core::lattice::{Lattice, LatticeVector};
use twistfock_core::scalar::{rational_to_string, Rational, Scalar};

use crate::{Status, VerifyConfig, VerifyReport, What};

/// A rectangular table of strings.
#[derive(Serialize)]
pub struct StaticTable {
    pub what: What,
    pub rank: usize,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// `p/1` shown as `p` in text tables.
fn pretty(c: &str) -> String {
    match c.strip_suffix("/1") {
        Some(p) if p.parse::<i64>().is_ok() => p.to_string(),
        _ => c.to_string(),
    }
}

fn aligned(headers: &[String], rows: &[Vec<String>]) -> String {
    let rows: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|c| pretty(c)).collect()).collect();
    let mut width: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for r in &rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let mut s = String::new();
        for (i, (c, w)) in cells.iter().zip(&width).enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            s.push_str(c);
            s.extend(std::iter::repeat_n(' ', w - c.chars().count()));
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(headers);
    out += &line(&width.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>());
    for r in &rows {
        out += &line(r);
    }
    out
}

fn csv_string(headers: &[String], rows: &[Vec<String>]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(headers)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn opt_scalar(s: &Option<Scalar>) -> String {
    s.as_ref().map(|x| x.to_string()).unwrap_or_else(|| "-".into())
}

fn opt_bool(b: Option<bool>) -> String {
    b.map(|x| x.to_string()).unwrap_or_else(|| "-".into())
}

fn bracket_rows(report: &VerifyReport) -> (Vec<String>, Vec<Vec<String>>) {
    let headers = ["family", "case", "a", "b", "parity", "fitted", "stated", "matches", "consistent"].map(String::from).to_vec();
    let rows = report
        .brackets
        .iter()
        .flatten()
        .map(|r| {
            vec![
                r.pair.family.name().to_string(),
                r.pair.subcase.map(|c| c.to_string()).unwrap_or_default(),
                r.pair.a.to_string(),
                r.pair.b.to_string(),
                format!("{}{}", r.parity.0, r.parity.1),
                opt_scalar(&r.fitted),
                opt_scalar(&r.reference),
                opt_bool(r.matches_reference),
                r.consistent.to_string(),
            ]
        })
        .collect();
    (headers, rows)
}

pub fn verify_text(config: &VerifyConfig, report: &VerifyReport, status: &Status) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "verify: l={} depth={} modes={} convention={} seed={}",
        config.rank,
        pretty(&config.depth),
        config.modes,
        config.phase_convention.name(),
        config.seed
    );
    let suite_line = |out: &mut String, name: &str, checks: usize, failures: &[String]| {
        let _ = writeln!(out, "{name}: {checks} checks, {} failures", failures.len());
        for f in failures {
            let _ = writeln!(out, "  fails: {f}");
        }
    };
    if let Some(s) = &report.heisenberg {
        suite_line(&mut out, "heisenberg", s.checks, &s.failures);
    }
    if let Some(s) = &report.grading {
        suite_line(&mut out, "grading", s.checks, &s.failures);
    }
    if let Some(s) = &report.contraction {
        suite_line(&mut out, "contraction", s.checks, &s.failures);
    }
    if let Some(c) = &report.covariance {
        let fails: Vec<String> = c.failures.iter().map(|r| format!("[{}({}/2), X_{}({})]", r.h, r.twice_n, r.d.value(), r.alpha)).collect();
        suite_line(&mut out, "covariance", c.checks, &fails);
    }
    if let Some(b) = &report.brackets {
        let inconsistent = b.iter().filter(|r| !r.consistent).count();
        let mismatched = b.iter().filter(|r| r.matches_reference == Some(false)).count();
        let _ = writeln!(out, "brackets: {} reports, {inconsistent} inconsistent, {mismatched} differ from the stated constant", b.len());
        let (headers, rows) = bracket_rows(report);
        let rows: Vec<Vec<String>> = rows.into_iter().filter(|r| r[0] != "vanishing").collect();
        let vanishing = b.len() - rows.len();
        out += &aligned(&headers, &rows);
        let _ = writeln!(out, "({vanishing} vanishing reports omitted)");
    }
    if let Some(c) = &report.cartan {
        let _ = writeln!(out, "cartan: {} failures", c.failures.len());
        for row in &c.gcm {
            let _ = writeln!(out, "  {}", row.iter().map(|x| format!("{x:>3}")).collect::<String>());
        }
        let _ = writeln!(out, "  kappa: {}", c.kappa.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(", "));
        let _ = writeln!(out, "  [e0, f0] = id - 2 theta(0): {}", c.literal_h0_holds);
        let _ = writeln!(out, "  central element acts as identity: {}", c.central_is_identity);
        for f in &c.failures {
            let _ = writeln!(out, "  fails: {f}");
        }
    }
    if let Some(j) = &report.jacobi {
        let _ = writeln!(out, "jacobi: {} triples on {} vectors, {} failures", j.triples, j.vectors, j.failures.len());
        for f in &j.failures {
            let _ = writeln!(out, "  fails: {f}");
        }
    }
    let _ = writeln!(out, "status: {} failures, {} warnings", status.failures, status.warnings);
    out
}

pub fn verify_csv(report: &VerifyReport) -> anyhow::Result<String> {
    let headers = ["suite", "case", "a", "b", "parity", "fitted", "stated", "matches", "consistent", "checks", "failures"]
        .map(String::from)
        .to_vec();
    let mut rows = Vec::new();
    let summary = |name: &str, checks: usize, failures: usize| {
        let mut r = vec![name.to_string()];
        r.extend(std::iter::repeat_n(String::new(), 8));
        r.push(checks.to_string());
        r.push(failures.to_string());
        r
    };
    for (name, s) in [("heisenberg", &report.heisenberg), ("grading", &report.grading), ("contraction", &report.contraction)] {
        if let Some(s) = s {
            rows.push(summary(name, s.checks, s.failures.len()));
        }
    }
    if let Some(c) = &report.covariance {
        rows.push(summary("covariance", c.checks, c.failures.len()));
    }
    let (_, brackets) = bracket_rows(report);
    for b in brackets {
        let mut r = vec!["brackets".to_string(), if b[1].is_empty() { b[0].clone() } else { format!("{} {}", b[0], b[1]) }];
        r.extend(b[2..].iter().cloned());
        r.push("1".into());
        r.push(if b[8] == "true" { "0" } else { "1" }.into());
        rows.push(r);
    }
    if let Some(c) = &report.cartan {
        rows.push(summary("cartan", c.gcm.len() * c.gcm.len(), c.failures.len()));
    }
    if let Some(j) = &report.jacobi {
        rows.push(summary("jacobi", j.triples, j.failures.len()));
    }
    csv_string(&headers, &rows)
}

fn weight_headers(l: usize) -> Vec<String> {
    (1..=l).map(|i| format!("h_{i}")).collect()
}

fn character_rows(table: &CharacterTable) -> (Vec<String>, Vec<Vec<String>>) {
    let mut headers = weight_headers(table.l);
    headers.push("degree_offset".into());
    headers.push("multiplicity".into());
    let rows = table
        .weights
        .iter()
        .map(|w| {
            let mut r: Vec<String> = w.weight.finite.iter().map(rational_to_string).collect();
            r.push(rational_to_string(&w.offset));
            r.push(w.multiplicity.to_string());
            r
        })
        .collect();
    (headers, rows)
}

pub fn character_text(table: &CharacterTable, dims: &BTreeMap<Rational, u64>, oracle: Option<bool>) -> String {
    let mut out = format!(
        "character: l={} depth={} height={} complete={}\n",
        table.l,
        table.depth,
        table.height,
        table.complete
    );
    let (headers, rows) = character_rows(table);
    out += &aligned(&headers, &rows);
    out += "graded dimensions:\n";
    for (k, v) in dims {
        let _ = writeln!(out, "  {k:>5}  {v}");
    }
    if let Some(ok) = oracle {
        let _ = writeln!(out, "generating function agrees: {ok}");
    }
    out
}

pub fn character_csv(table: &CharacterTable) -> anyhow::Result<String> {
    let (headers, rows) = character_rows(table);
    csv_string(&headers, &rows)
}

fn hwv_rows(report: &HwvReport) -> (Vec<String>, Vec<Vec<String>>) {
    let mut headers = weight_headers(report.l);
    headers.push("degree".into());
    headers.push("vector".into());
    let rows = report
        .vectors
        .iter()
        .map(|v| {
            let mut r: Vec<String> = v.weight.finite.iter().map(rational_to_string).collect();
            r.push(rational_to_string(&v.weight.degree));
            r.push(FockVector::from_json(&v.vector).map(|x| x.to_string()).unwrap_or_default());
            r
        })
        .collect();
    (headers, rows)
}

pub fn hwv_text(report: &HwvReport) -> String {
    let mut out = format!(
        "hwv: l={} depth={}: {} vector(s) in {} weight spaces over {} monomials\n",
        report.l,
        report.depth,
        report.vectors.len(),
        report.weight_spaces,
        report.basis_size
    );
    let (headers, rows) = hwv_rows(report);
    out += &aligned(&headers, &rows);
    let _ = writeln!(out, "unique vacuum: {}", report.is_unique_vacuum());
    let _ = writeln!(out, "X_1/2(-2 theta) kills the vacuum: {}", report.x_half_on_vacuum_vanishes);
    let _ = writeln!(out, "X_1(-2 theta) kills the vacuum: {}", report.x1_on_vacuum_vanishes);
    out
}

pub fn hwv_csv(report: &HwvReport) -> anyhow::Result<String> {
    let (headers, rows) = hwv_rows(report);
    csv_string(&headers, &rows)
}

fn simple_labels(l: usize) -> Vec<String> {
    (1..=l).map(|i| format!("α{i}")).collect()
}

pub fn static_table(lattice: &Lattice, what: What) -> StaticTable {
    let rank = lattice.rank();
    let l = rank.get();
    let (headers, rows): (Vec<String>, Vec<Vec<String>>) = match what {
        What::Roots => (
            ["class", "root", "norm"].map(String::from).to_vec(),
            lattice
                .roots()
                .all()
                .into_iter()
                .map(|(c, r)| vec![c.name().to_string(), r.to_string(), rational_to_string(&lattice.gram(&r, &r).expect("same rank"))])
                .collect(),
        ),
        What::Cocycle => {
            let mut h = vec!["ε".to_string()];
            h.extend(simple_labels(l));
            let rows = (1..=l)
                .map(|i| {
                    let mut r = vec![format!("α{i}")];
                    let a = LatticeVector::alpha(rank, i);
                    r.extend((1..=l).map(|j| lattice.cocycle(&a, &LatticeVector::alpha(rank, j)).expect("in Q").to_string()));
                    r
                })
                .collect();
            (h, rows)
        }
        What::PMap => (
            ["class", "root", "p", "p0"].map(String::from).to_vec(),
            lattice
                .roots()
                .all()
                .into_iter()
                .map(|(c, r)| {
                    vec![
                        c.name().to_string(),
                        r.to_string(),
                        lattice.p_map(&r).expect("in Q").to_string(),
                        lattice.p0_map(&r).expect("in Q").to_string(),
                    ]
                })
                .collect(),
        ),
        What::Gram => {
            let mut labels = simple_labels(l);
            labels.push("β".into());
            let mut h = vec![String::new()];
            h.extend(labels.clone());
            let rows = (0..=l)
                .map(|i| {
                    let mut r = vec![labels[i].clone()];
                    r.extend((0..=l).map(|j| rational_to_string(&lattice.gram_entry(i, j))));
                    r
                })
                .collect();
            (h, rows)
        }
        What::Gcm => {
            let gcm = GeneratorDictionary::gcm(lattice);
            let mut h = vec![String::new()];
            h.extend((0..=l).map(|j| format!("α{j}")));
            let rows = gcm
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    let mut r = vec![format!("α{i}")];
                    r.extend(row.iter().map(|x| x.to_string()));
                    r
                })
                .collect();
            (h, rows)
        }
    };
    StaticTable { what, rank: l, headers, rows }
}

pub fn table_text(table: &StaticTable) -> String {
    aligned(&table.headers, &table.rows)
}

pub fn table_csv(table: &StaticTable) -> anyhow::Result<String> {
    csv_string(&table.headers, &table.rows)
}
