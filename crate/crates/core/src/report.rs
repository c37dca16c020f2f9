//! Tab-separated and plain-text renderings of reports and matrices.
//!
//! Every rendering starts with the caller's metadata lines, each prefixed
//! with `# `. Numbers use 12 decimals; missing values are `NA`.

use std::fmt::Write;

use crate::importance::{ContextCell, ImportanceReport};
use crate::oracle::{DefinitionChecks, TheoremCheck, TheoremReport};
use crate::pairwise::InteractionMatrix;

/// Output flavour.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Tsv,
    Text,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Tsv => "tsv",
            Format::Text => "txt",
        }
    }
}

pub fn num(x: f64) -> String {
    let s = format!("{x:.12}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), num)
}

fn header(out: &mut String, meta: &[String]) {
    for line in meta {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
}

fn row(out: &mut String, fields: &[String]) {
    out.push_str(&fields.join("\t"));
    out.push('\n');
}

fn cell_label(c: &ContextCell) -> String {
    c.label.map_or("NA".to_string(), |l| l.as_str().to_string())
}

fn significance(p: Option<f64>, level: f64) -> String {
    match p {
        Some(p) if p < level => "*".into(),
        Some(_) => "".into(),
        None => "NA".into(),
    }
}

/// One row per variable. Columns: `variable`, `imp`, then per context value
/// the baseline, abs score and its p-value, signed score and its p-value,
/// then `global_context`, and per context value the label and rank.
/// Columns whose values are all missing are left out.
pub fn importance_tsv(report: &ImportanceReport, meta: &[String], level: f64) -> String {
    let mut out = String::new();
    header(&mut out, meta);
    let labels = &report.context_labels;
    let cells = || report.variables.iter().flat_map(|v| v.contexts.iter());
    let has_base = cells().any(|c| c.baseline.is_some());
    let has_p = cells().any(|c| c.pvalue_abs.is_some());
    let has_label = cells().any(|c| c.label.is_some());

    let mut cols = vec!["variable".to_string(), "imp".to_string()];
    if has_base {
        cols.extend(labels.iter().map(|l| format!("imp_given_{l}")));
    }
    for l in labels {
        cols.push(format!("abs_{l}"));
        if has_p {
            cols.push(format!("pvalue_abs_{l}"));
            cols.push(format!("significant_abs_{l}"));
        }
    }
    for l in labels {
        cols.push(format!("signed_{l}"));
        if has_p {
            cols.push(format!("pvalue_signed_{l}"));
        }
    }
    if !labels.is_empty() {
        cols.push("global_context".into());
    }
    if has_label {
        cols.extend(labels.iter().map(|l| format!("label_{l}")));
        cols.extend(labels.iter().map(|l| format!("rank_{l}")));
    }
    row(&mut out, &cols);

    for v in &report.variables {
        let mut f = vec![v.name.clone(), num(v.imp)];
        if has_base {
            f.extend(v.contexts.iter().map(|c| opt(c.baseline)));
        }
        for c in &v.contexts {
            f.push(num(c.abs));
            if has_p {
                f.push(opt(c.pvalue_abs));
                f.push(significance(c.pvalue_abs, level));
            }
        }
        for c in &v.contexts {
            f.push(num(c.signed));
            if has_p {
                f.push(opt(c.pvalue_signed));
            }
        }
        if !labels.is_empty() {
            f.push(opt(v.global_context));
        }
        if has_label {
            f.extend(v.contexts.iter().map(cell_label));
            f.extend(
                v.contexts
                    .iter()
                    .map(|c| c.rank.map_or("NA".to_string(), |r| r.to_string())),
            );
        }
        row(&mut out, &f);
    }
    out
}

/// Indented plain-text rendering of the same content.
pub fn importance_text(report: &ImportanceReport, meta: &[String], level: f64) -> String {
    let mut out = String::new();
    header(&mut out, meta);
    let m = &report.meta;
    let _ = writeln!(out, "target: {}", report.target);
    let _ = writeln!(out, "context: {}", report.context.as_deref().unwrap_or("none"));
    let _ = writeln!(out, "source: {}", m.source);
    let _ = writeln!(out, "impurity: {}", m.impurity.name());
    if let Some(e) = m.epsilon {
        let _ = writeln!(out, "epsilon: {}", num(e));
    }
    for v in &report.variables {
        let _ = writeln!(out, "\nvariable {}", v.name);
        let _ = writeln!(out, "  imp: {}", num(v.imp));
        if let Some(g) = v.global_context {
            let _ = writeln!(out, "  global_context: {}", num(g));
        }
        for (label, c) in report.context_labels.iter().zip(&v.contexts) {
            let _ = writeln!(out, "  context {label}:");
            let _ = writeln!(out, "    abs: {}", num(c.abs));
            let _ = writeln!(out, "    signed: {}", num(c.signed));
            if let Some(b) = c.baseline {
                let _ = writeln!(out, "    imp_given: {}", num(b));
            }
            if let Some(p) = c.pvalue_abs {
                let star = if p < level { " *" } else { "" };
                let _ = writeln!(out, "    pvalue_abs: {}{star}", num(p));
            }
            if let Some(p) = c.pvalue_signed {
                let _ = writeln!(out, "    pvalue_signed: {}", num(p));
            }
            if let Some(l) = c.label {
                let _ = writeln!(out, "    label: {}", l.as_str());
            }
            if let Some(r) = c.rank {
                let _ = writeln!(out, "    rank: {r}");
            }
        }
    }
    out
}

pub fn render_importance(
    report: &ImportanceReport,
    meta: &[String],
    level: f64,
    format: Format,
) -> String {
    match format {
        Format::Tsv => importance_tsv(report, meta, level),
        Format::Text => importance_text(report, meta, level),
    }
}

fn yes(b: bool) -> String {
    if b { "true" } else { "false" }.to_string()
}

fn theorem_line(name: &str, t: &TheoremCheck) -> Vec<String> {
    vec![
        name.to_string(),
        if t.holds { "pass" } else { "fail" }.to_string(),
        t.witness.clone().unwrap_or_default(),
    ]
}

/// Relevance, condition and sign-audit verdicts, then theorem checks.
pub fn definitions_tsv(
    checks: &[DefinitionChecks],
    theorems: &TheoremReport,
    context_labels: &[String],
    meta: &[String],
) -> String {
    let mut out = String::new();
    header(&mut out, meta);
    let mut cols = vec!["variable".to_string(), "relevant".to_string()];
    if let Some(first) = checks.first() {
        cols.extend(first.conditions.iter().map(|(c, _)| format!("condition_{}", c.number())));
    }
    cols.extend(context_labels.iter().map(|l| format!("exact_{l}")));
    row(&mut out, &cols);
    for c in checks {
        let mut f = vec![c.name.clone(), yes(c.relevant)];
        f.extend(c.conditions.iter().map(|(_, b)| yes(*b)));
        f.extend(
            c.exact
                .iter()
                .map(|e| e.map_or("NA".to_string(), |e| e.to_string())),
        );
        row(&mut out, &f);
    }
    out.push('\n');
    row(&mut out, &["theorem".into(), "result".into(), "witness".into()]);
    row(&mut out, &theorem_line("irrelevant_context", &theorems.irrelevant_context));
    row(&mut out, &theorem_line("zero_abs_score", &theorems.zero_abs_score));
    row(
        &mut out,
        &theorem_line("sign_characterization", &theorems.sign_characterization),
    );
    out
}

/// Square matrix with targets as rows and inputs as columns.
pub fn matrix_tsv(
    m: &InteractionMatrix,
    meta: &[String],
    value: impl Fn(&crate::pairwise::PairCell) -> String,
) -> String {
    let mut out = String::new();
    header(&mut out, meta);
    let mut cols = vec!["target".to_string()];
    cols.extend(m.names.iter().cloned());
    row(&mut out, &cols);
    for (i, name) in m.names.iter().enumerate() {
        let mut f = vec![name.clone()];
        f.extend(m.cells[i].iter().map(|c| c.as_ref().map_or("NA".to_string(), &value)));
        row(&mut out, &f);
    }
    out
}

/// The four matrices of one context value, keyed by file stem.
pub fn matrix_files(m: &InteractionMatrix, meta: &[String]) -> Vec<(&'static str, String)> {
    vec![
        ("matrix_absscore", matrix_tsv(m, meta, |c| num(c.abs))),
        ("matrix_signed", matrix_tsv(m, meta, |c| num(c.signed))),
        ("matrix_pvalue", matrix_tsv(m, meta, |c| num(c.pvalue))),
        (
            "matrix_significant",
            matrix_tsv(m, meta, |c| if c.significant { "1" } else { "0" }.to_string()),
        ),
    ]
}

/// Long format: one line per directed pair.
pub fn cells_tsv(m: &InteractionMatrix, meta: &[String]) -> String {
    let mut out = String::new();
    header(&mut out, meta);
    row(
        &mut out,
        &["target", "input", "abs", "signed", "pvalue", "significant"].map(String::from),
    );
    for (i, r) in m.cells.iter().enumerate() {
        for (j, c) in r.iter().enumerate() {
            if let Some(c) = c {
                row(
                    &mut out,
                    &[
                        m.names[i].clone(),
                        m.names[j].clone(),
                        num(c.abs),
                        num(c.signed),
                        num(c.pvalue),
                        if c.significant { "1" } else { "0" }.to_string(),
                    ],
                );
            }
        }
    }
    out
}
