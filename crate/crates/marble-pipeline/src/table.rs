//! Feature matrices as CSV: header `id,<feature names>`, one row per
//! sample, values in Rust's shortest round-trip float notation.

use marble_core::FeatureMatrix;

use crate::error::{PipelineError, Result};

pub fn write_matrix_csv(m: &FeatureMatrix) -> String {
    let mut out = String::from("id");
    for name in m.col_names() {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (r, id) in m.row_ids().iter().enumerate() {
        out.push_str(id);
        for v in m.row(r) {
            out.push(',');
            out.push_str(&format!("{v}"));
        }
        out.push('\n');
    }
    out
}

pub fn read_matrix_csv(text: &str) -> Result<FeatureMatrix> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| PipelineError::data("features csv is empty"))?;
    let mut cols = header.split(',');
    if cols.next().map(str::trim) != Some("id") {
        return Err(PipelineError::data(
            "features csv must start with an 'id' column",
        ));
    }
    let col_names: Vec<String> = cols.map(|c| c.trim().to_string()).collect();
    if col_names.is_empty() {
        return Err(PipelineError::data("features csv has no feature columns"));
    }

    let mut row_ids = Vec::new();
    let mut values = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let id = fields
            .next()
            .ok_or_else(|| PipelineError::data(format!("line {line_no}: missing id")))?
            .trim()
            .to_string();
        let row: Vec<f64> = fields
            .map(|f| {
                f.trim().parse::<f64>().map_err(|_| {
                    PipelineError::data(format!("line {line_no}: bad number '{}'", f.trim()))
                })
            })
            .collect::<Result<_>>()?;
        if row.len() != col_names.len() {
            return Err(PipelineError::data(format!(
                "line {line_no}: {} values for {} columns",
                row.len(),
                col_names.len()
            )));
        }
        row_ids.push(id);
        values.extend(row);
    }

    FeatureMatrix::new(row_ids, col_names, values)
        .map_err(|e| PipelineError::data(format!("features csv: {e}")))
}
