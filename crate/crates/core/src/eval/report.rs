use serde::{Deserialize, Serialize};

use super::EvalReport;

/// Singular-modality rows and fusion rows, rendered as two tables.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportTable {
    pub singular: Vec<EvalReport>,
    pub fusion: Vec<EvalReport>,
}

impl ReportTable {
    pub fn render(&self) -> String {
        let mut out = render_table("Singular Modalities", &self.singular);
        if !self.fusion.is_empty() {
            out.push('\n');
            out.push_str(&render_table("Fusion Models", &self.fusion));
        }
        out
    }
}

const HEADERS: [&str; 3] = ["Model", "Median Ranking for 1st Rec", "Top 10% of 1st Rec"];

fn format_median(m: f64) -> String {
    if m.fract() == 0.0 {
        format!("{m:.0}")
    } else {
        format!("{m:.1}")
    }
}

pub fn render_table(title: &str, rows: &[EvalReport]) -> String {
    let cells: Vec<[String; 3]> = rows
        .iter()
        .map(|r| {
            [
                r.model.clone(),
                format_median(r.median_first_rec_rank),
                format!("{:.1}", r.top10_pct),
            ]
        })
        .collect();
    let width = |c: usize| {
        cells
            .iter()
            .map(|row| row[c].chars().count())
            .chain([HEADERS[c].len()])
            .max()
            .unwrap_or(0)
    };
    let widths = [width(0), width(1), width(2)];
    let line = |row: [&str; 3]| {
        format!(
            "{:<w0$} | {:>w1$} | {:>w2$}\n",
            row[0],
            row[1],
            row[2],
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2]
        )
    };
    let mut out = format!("{title}\n");
    out.push_str(&line(HEADERS));
    out.push_str(&format!(
        "{}-+-{}-+-{}\n",
        "-".repeat(widths[0]),
        "-".repeat(widths[1]),
        "-".repeat(widths[2])
    ));
    for row in &cells {
        out.push_str(&line([&row[0], &row[1], &row[2]]));
    }
    out
}
