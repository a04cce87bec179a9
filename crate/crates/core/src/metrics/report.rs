use std::fmt::{Display, Write as _};

use super::{AttachmentScore, BracketScore, Counts};

const TSV_HEADER: &str = "section\tkey\tgold\tpredicted\tmatched\tprecision\trecall\tf1\n";

fn tsv_row(out: &mut String, section: &str, key: impl Display, c: &Counts) {
    let _ = writeln!(
        out,
        "{}\t{}\t{}\t{}\t{}\t{:.2}\t{:.2}\t{:.2}",
        section,
        key,
        c.gold,
        c.predicted,
        c.matched,
        c.precision(),
        c.recall(),
        c.f1()
    );
}

fn text_table<K: Display>(out: &mut String, title: &str, rows: impl Iterator<Item = (K, Counts)>) {
    let rows: Vec<(String, Counts)> = rows.map(|(k, c)| (k.to_string(), c)).collect();
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0).max(title.len());
    let _ = writeln!(
        out,
        "{:<width$}  {:>7}  {:>7}  {:>7}  {:>7}  {:>7}  {:>7}",
        title,
        "gold",
        "pred",
        "match",
        "P",
        "R",
        "F1",
        width = width
    );
    for (k, c) in rows {
        let _ = writeln!(
            out,
            "{:<width$}  {:>7}  {:>7}  {:>7}  {:>7.2}  {:>7.2}  {:>7.2}",
            k,
            c.gold,
            c.predicted,
            c.matched,
            c.precision(),
            c.recall(),
            c.f1(),
            width = width
        );
    }
}

/// Aligned plain-text summary; `breakdowns` adds the per-length and
/// per-label tables.
pub fn bracket_report(score: &BracketScore, breakdowns: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Sentences          {}", score.sentences);
    let _ = writeln!(out, "Exact match        {}", score.exact);
    let _ = writeln!(
        out,
        "Brackets           gold {}  predicted {}  matched {}",
        score.overall.gold, score.overall.predicted, score.overall.matched
    );
    let _ = writeln!(out, "Bracketing P       {:.2}", score.precision());
    let _ = writeln!(out, "Bracketing R       {:.2}", score.recall());
    let _ = writeln!(out, "Bracketing F1      {:.2}", score.f1());
    if breakdowns {
        out.push('\n');
        let rows = score
            .per_length
            .iter()
            .map(|(k, c)| (k.to_string(), *c))
            .chain(std::iter::once(("sentence".to_owned(), score.whole_sentence)));
        text_table(&mut out, "span length", rows);
        out.push('\n');
        text_table(&mut out, "span label", score.per_label.iter().map(|(k, c)| (k, *c)));
    }
    out
}

/// One row per bucket: `overall`, `length` (whole-sentence spans under key
/// `sentence`) and `label` sections.
pub fn bracket_tsv(score: &BracketScore) -> String {
    let mut out = String::from(TSV_HEADER);
    tsv_row(&mut out, "overall", "all", &score.overall);
    for (k, c) in &score.per_length {
        tsv_row(&mut out, "length", k, c);
    }
    tsv_row(&mut out, "length", "sentence", &score.whole_sentence);
    for (k, c) in &score.per_label {
        tsv_row(&mut out, "label", k, c);
    }
    out
}

pub fn attachment_report(score: &AttachmentScore, breakdowns: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Tokens   {}", score.tokens);
    let _ = writeln!(out, "UAS      {:.2}", score.uas());
    let _ = writeln!(out, "LAS      {:.2}", score.las());
    if breakdowns {
        out.push('\n');
        let rows = std::iter::once(("root".to_owned(), score.root))
            .chain(score.per_displacement.iter().map(|(k, c)| (format!("{:+}", k), *c)));
        text_table(&mut out, "displacement", rows);
        out.push('\n');
        text_table(&mut out, "relation", score.per_relation.iter().map(|(k, c)| (k, *c)));
    }
    out
}

/// One row per bucket: `overall` (LAS as matched), `displacement` (root
/// attachments under key `root`) and `relation` sections.
pub fn attachment_tsv(score: &AttachmentScore) -> String {
    let mut out = String::from(TSV_HEADER);
    let _ = writeln!(
        out,
        "overall\tuas\t{t}\t{t}\t{}\t{:.2}\t{:.2}\t{:.2}",
        score.head_correct,
        score.uas(),
        score.uas(),
        score.uas(),
        t = score.tokens
    );
    let _ = writeln!(
        out,
        "overall\tlas\t{t}\t{t}\t{}\t{:.2}\t{:.2}\t{:.2}",
        score.labeled_correct,
        score.las(),
        score.las(),
        score.las(),
        t = score.tokens
    );
    tsv_row(&mut out, "displacement", "root", &score.root);
    for (k, c) in &score.per_displacement {
        tsv_row(&mut out, "displacement", format!("{:+}", k), c);
    }
    for (k, c) in &score.per_relation {
        tsv_row(&mut out, "relation", k, c);
    }
    out
}
