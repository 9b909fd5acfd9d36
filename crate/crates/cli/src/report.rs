use std::fmt::Write as _;

use distress_lda::{GroupLabel, ScoringMode, YearRow, ZoneLabel, Zones};

use crate::commands::{ClassifyReport, DiagnoseReport, EvaluateReport, FitReport};

/// Aligned plain-text table; the first column is left-aligned.
fn table(header: &[String], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &[String]| {
        let mut s = String::new();
        for (i, cell) in cells.iter().enumerate().take(cols) {
            let pad = widths[i] - cell.chars().count();
            if i == 0 {
                s.push_str(cell);
                s.push_str(&" ".repeat(pad));
            } else {
                s.push_str("  ");
                s.push_str(&" ".repeat(pad));
                s.push_str(cell);
            }
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(header);
    for row in rows {
        line(row);
    }
    out
}

fn strings<const N: usize>(cells: [&str; N]) -> Vec<String> {
    cells.iter().map(|s| s.to_string()).collect()
}

fn f3(x: f64) -> String {
    format!("{x:.3}")
}

fn pct(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{:.1}%", 100.0 * v),
        None => "n.a".into(),
    }
}

fn group_name(g: GroupLabel) -> &'static str {
    match g {
        GroupLabel::Bankrupt => "Bankrupt",
        GroupLabel::NonBankrupt => "Nonbankrupt",
    }
}

fn zones_line(mode: ScoringMode, zones: &Zones) -> String {
    let grey = match zones.grey {
        Some(g) => format!("grey zone [{:.6}, {:.6}]", g.lo, g.hi),
        None => "no grey zone".into(),
    };
    format!(
        "scoring mode {mode}; zones {} (cut-off {:.6}, {grey})",
        zones.source, zones.cutoff
    )
}

fn notices(out: &mut String, notes: &[String]) {
    for n in notes {
        let _ = writeln!(out, "note: {n}");
    }
}

pub fn render_fit(r: &FitReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Case processing summary (window {})", r.window);
    let rows: Vec<Vec<String>> = r
        .cases
        .iter()
        .map(|c| {
            vec![
                c.variable.to_string(),
                group_name(c.group).into(),
                c.valid.to_string(),
                format!("{:.1}%", c.valid_percent),
                c.missing.to_string(),
                format!("{:.1}%", c.missing_percent),
                c.total.to_string(),
            ]
        })
        .collect();
    out += &table(
        &strings([
            "Variable",
            "Group",
            "Valid",
            "Valid %",
            "Missing",
            "Missing %",
            "Total",
        ]),
        &rows,
    );

    out += "\nNormalization (training mean and sd; normalized columns check)\n";
    let rows: Vec<Vec<String>> = r
        .normalization
        .iter()
        .zip(&r.z_check)
        .map(|(s, z)| {
            vec![
                s.variable.clone(),
                format!("{:.5}", s.mean),
                format!("{:.5}", s.sd),
                format!("{:.5}", if z.mean.abs() < 5e-6 { 0.0 } else { z.mean }),
                format!("{:.5}", z.sd),
            ]
        })
        .collect();
    out += &table(
        &strings(["Variable", "Mean", "Sd", "z mean", "z sd"]),
        &rows,
    );

    out += "\nDiscriminant function coefficients\n";
    let rows: Vec<Vec<String>> = r
        .coefficients
        .iter()
        .map(|(v, b)| vec![v.clone(), f3(*b), f3(r.standardized_coefficients[v])])
        .collect();
    out += &table(
        &strings(["Variable", "Unstandardized", "Standardized"]),
        &rows,
    );
    let _ = writeln!(out, "constant {}", f3(r.constant));

    let _ = writeln!(
        out,
        "\nClassification function coefficients (priors {}: bankrupt {:.3}, nonbankrupt {:.3})",
        r.fisher.priors,
        r.fisher.prior_probabilities.bankrupt,
        r.fisher.prior_probabilities.nonbankrupt
    );
    let mut rows: Vec<Vec<String>> = r
        .fisher
        .bankrupt
        .iter()
        .map(|(v, w)| vec![v.clone(), f3(*w), f3(r.fisher.nonbankrupt[v])])
        .collect();
    rows.push(vec![
        "(constant)".into(),
        f3(r.fisher.bankrupt_constant),
        f3(r.fisher.nonbankrupt_constant),
    ]);
    out += &table(&strings(["Variable", "Bankrupt", "Nonbankrupt"]), &rows);

    out += "\nFunctions at group centroids\n";
    let rows: Vec<Vec<String>> = GroupLabel::BOTH
        .iter()
        .map(|&g| {
            vec![
                group_name(g).into(),
                r.group_sizes.get(g).to_string(),
                f3(*r.centroids.get(g)),
                f3(*r.group_score_sd.get(g)),
            ]
        })
        .collect();
    out += &table(&strings(["Group", "N", "Centroid", "Score sd"]), &rows);
    let _ = writeln!(
        out,
        "eigenvalue {}  canonical correlation {}  Wilks' Lambda {}",
        f3(r.eigenvalue),
        f3(r.canonical_correlation),
        f3(r.wilks_lambda)
    );

    out += "\nTraining scores\n";
    let rows: Vec<Vec<String>> = r
        .training_scores
        .iter()
        .map(|(bank, g, s)| vec![bank.clone(), group_name(*g).into(), f3(*s)])
        .collect();
    out += &table(&strings(["Bank", "Group", "Score"]), &rows);

    out += "\nClassification results (training cases)\n";
    let rows: Vec<Vec<String>> = GroupLabel::BOTH
        .iter()
        .map(|&a| {
            let mut row = vec![group_name(a).to_string()];
            for p in GroupLabel::BOTH {
                row.push(format!(
                    "{} ({})",
                    r.confusion.get(a, p),
                    pct(r.confusion.row_percent(a, p).map(|x| x / 100.0))
                ));
            }
            row.push(r.confusion.row_total(a).to_string());
            row
        })
        .collect();
    out += &table(
        &strings([
            "Actual",
            "Predicted bankrupt",
            "Predicted nonbankrupt",
            "Total",
        ]),
        &rows,
    );
    let _ = writeln!(
        out,
        "{} of {} training cases correctly classified ({})",
        r.confusion.correct(),
        r.confusion.total(),
        pct(r.confusion.percent_correct().map(|x| x / 100.0))
    );
    if let Some(path) = &r.model_file {
        let _ = writeln!(out, "\nmodel written to {path}");
    }
    out
}

pub fn render_diagnose(r: &DiagnoseReport) -> String {
    let mut out = String::new();
    if let Some(c) = &r.collinearity {
        let _ = writeln!(
            out,
            "Pooled within-groups correlation (collinearity threshold {})",
            c.threshold
        );
        let mut header = vec![String::new()];
        header.extend(c.variables.iter().cloned());
        let rows: Vec<Vec<String>> = c
            .variables
            .iter()
            .zip(&c.matrix)
            .map(|(v, row)| {
                let mut cells = vec![v.clone()];
                cells.extend(row.iter().map(|x| f3(*x)));
                cells
            })
            .collect();
        out += &table(&header, &rows);
        if c.flagged.is_empty() {
            out += "no pair exceeds the threshold\n";
        }
        for f in &c.flagged {
            let _ = writeln!(out, "collinear: {} / {} r = {}", f.first, f.second, f3(f.r));
        }
        out.push('\n');
    }

    let _ = writeln!(
        out,
        "Wilks' Lambda ({} cases, {} variables)",
        r.cases, r.variables
    );
    let w = &r.wilks.result;
    out += &table(
        &strings([
            "Test of function",
            "Wilks' Lambda",
            "Chi-square",
            "df",
            "Sig.",
        ]),
        &[vec![
            "1".into(),
            f3(w.lambda),
            f3(w.chi_square),
            w.df.to_string(),
            f3(w.p_value.value()),
        ]],
    );
    let _ = writeln!(out, "verdict (alpha {}): {}", r.alpha, r.wilks.verdict);

    if let Some(b) = &r.box_m {
        let m = &b.result;
        out += "\nBox's M (equality of group score variances)\n";
        out += &table(
            &strings(["Box's M", "F approx.", "df1", "df2", "Sig."]),
            &[vec![
                f3(m.m),
                f3(m.f_approx),
                format!("{}", m.df1),
                f3(m.df2),
                f3(m.p_value.value()),
            ]],
        );
        let _ = writeln!(out, "verdict (alpha {}): {}", r.alpha, b.verdict);
    }

    let c = &r.canonical;
    out += "\nEigenvalues\n";
    out += &table(
        &strings([
            "Function",
            "Eigenvalue",
            "% of variance",
            "Cumulative %",
            "Canonical correlation",
        ]),
        &[vec![
            "1".into(),
            f3(c.eigenvalue),
            format!("{:.1}", c.percent_variance),
            format!("{:.1}", c.cumulative_percent),
            f3(c.canonical_correlation),
        ]],
    );
    if !r.notices.is_empty() {
        out.push('\n');
        notices(&mut out, &r.notices);
    }
    out
}

fn score_cell(mode: ScoringMode, score: f64, zone: ZoneLabel) -> String {
    match mode {
        ScoringMode::Raw => format!("{} {:.2}%", zone.glyph(), 100.0 * score),
        ScoringMode::Normalized => format!("{} {:.3}", zone.glyph(), score),
    }
}

pub fn render_classify(r: &ClassifyReport) -> String {
    let mut out = zones_line(r.mode, &r.zones);
    out.push('\n');
    let rows: Vec<Vec<String>> = r
        .rows
        .iter()
        .map(|row| match (row.score, row.zone) {
            (Some(s), Some(z)) => vec![
                row.bank.clone(),
                row.year.to_string(),
                format!("{s:.6}"),
                format!("{} {}", z.glyph(), z.as_str()),
            ],
            _ => vec![
                row.bank.clone(),
                row.year.to_string(),
                "n.a".into(),
                "n.a".into(),
            ],
        })
        .collect();
    out += &table(&strings(["Bank", "Year", "Score", "Zone"]), &rows);
    notices(&mut out, &r.notices);
    out
}

/// Renders one yearly figure from a report row.
type Cell<'a> = &'a dyn Fn(&YearRow<f64>) -> String;

fn yearly_block(
    title: &str,
    years: &[i32],
    rows_of: &[(&str, Cell<'_>)],
    find: &dyn Fn(i32) -> Option<YearRow<f64>>,
) -> String {
    let mut header = vec![title.to_string()];
    header.extend(years.iter().map(|y| y.to_string()));
    let rows: Vec<Vec<String>> = rows_of
        .iter()
        .map(|(name, cell)| {
            let mut row = vec![name.to_string()];
            row.extend(years.iter().map(|&y| match find(y) {
                Some(yr) => cell(&yr),
                None => "n.a".into(),
            }));
            row
        })
        .collect();
    table(&header, &rows)
}

pub fn render_evaluate(r: &EvaluateReport) -> String {
    let grey = &r.evaluation.with_grey;
    let cut = &r.evaluation.cutoff_only;
    let years: Vec<i32> = r.years.iter().rev().copied().collect();

    let mut out = zones_line(grey.mode, &grey.zones);
    out.push_str("\n\n");

    let count = |f: fn(&YearRow<f64>) -> usize| move |y: &YearRow<f64>| f(y).to_string();
    let bankrupt = count(|y| y.counts.bankrupt);
    let greyc = count(|y| y.counts.grey);
    let healthy = count(|y| y.counts.nonbankrupt);
    let hits = count(|y| y.hits);
    let total = count(|y| y.total);
    let grey_pct = |y: &YearRow<f64>| pct(Some(y.counts.grey as f64 / y.total as f64));
    let t1 = |y: &YearRow<f64>| pct(y.type1);
    let t2 = |y: &YearRow<f64>| pct(y.type2);
    let acc = |y: &YearRow<f64>| pct(Some(y.accuracy));

    let find_grey = |y: i32| grey.year(y).cloned();
    out += &yearly_block(
        "With grey zone",
        &years,
        &[
            ("Bankrupt", &bankrupt),
            ("Grey zone", &greyc),
            ("Nonbankrupt", &healthy),
            ("Hit numbers", &hits),
            ("Total", &total),
            ("Grey %", &grey_pct),
            ("Type I %", &t1),
            ("Type II %", &t2),
            ("Accuracy", &acc),
        ],
        &find_grey,
    );
    out.push('\n');
    let find_cut = |y: i32| cut.year(y).cloned();
    out += &yearly_block(
        "Cut-off only",
        &years,
        &[
            ("Bankrupt", &bankrupt),
            ("Nonbankrupt", &healthy),
            ("Hit numbers", &hits),
            ("Total", &total),
            ("Type I %", &t1),
            ("Type II %", &t2),
            ("Accuracy", &acc),
        ],
        &find_cut,
    );

    out += "\nPer-bank scores (with grey zone)\n";
    let mut header = vec!["Bank".to_string()];
    header.extend(years.iter().map(|y| y.to_string()));
    let rows: Vec<Vec<String>> = r
        .banks
        .iter()
        .map(|bank| {
            let mut row = vec![bank.clone()];
            for &y in &years {
                let cell = grey
                    .year(y)
                    .and_then(|yr| yr.banks.iter().find(|b| &b.bank == bank));
                row.push(match cell {
                    Some(b) => score_cell(grey.mode, b.score, b.zone),
                    None => "n.a".into(),
                });
            }
            row
        })
        .collect();
    out += &table(&header, &rows);
    out += "▼ bankrupt zone, ■ grey zone, ▲ nonbankrupt zone\n";
    notices(&mut out, &r.notices);
    out
}
