//! `trace.csv`: one row per sample, columns
//! `time_s`, per agent `x_i,y_i,vx_i,vy_i,ux_i,uy_i`, per pair
//! `h_i_j,h_r0_i_j`, then per agent `braking_i` (0 or 1).
//!
//! Floats are written with Rust's shortest round-trip formatting, so reading
//! the file back recovers every recorded value exactly.

use pcca_core::sim::Trace;

use crate::CliError;

pub fn header(n_agents: usize, pairs: &[(usize, usize)]) -> Vec<String> {
    let mut cols = vec!["time_s".to_string()];
    for i in 0..n_agents {
        for name in ["x", "y", "vx", "vy", "ux", "uy"] {
            cols.push(format!("{name}_{i}"));
        }
    }
    for (i, j) in pairs {
        cols.push(format!("h_{i}_{j}"));
        cols.push(format!("h_r0_{i}_{j}"));
    }
    for i in 0..n_agents {
        cols.push(format!("braking_{i}"));
    }
    cols
}

pub fn write_trace_csv(t: &Trace) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header(t.n_agents(), &t.pairs)).expect("in-memory write");
    for k in 0..t.len() {
        let mut row = vec![t.times[k].to_string()];
        for (x, u) in t.states[k].iter().zip(&t.controls[k]) {
            row.extend([x.position.x, x.position.y, x.velocity.x, x.velocity.y, u.x, u.y].map(|v| v.to_string()));
        }
        for (h, hr0) in t.h[k].iter().zip(&t.h_r0[k]) {
            row.push(h.to_string());
            row.push(hr0.to_string());
        }
        row.extend(t.braking[k].iter().map(|b| u8::from(*b).to_string()));
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

/// A parsed `trace.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl TraceTable {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let columns: Vec<String> = r
            .headers()
            .map_err(|e| CliError::Input(format!("trace header: {e}")))?
            .iter()
            .map(str::to_string)
            .collect();
        if columns.first().map(String::as_str) != Some("time_s") {
            return Err(CliError::Input("trace header must start with time_s".into()));
        }
        let rows = r
            .records()
            .map(|rec| {
                let rec = rec.map_err(|e| match e.position() {
                    Some(p) => CliError::Input(format!("trace line {}: {e}", p.line())),
                    None => CliError::Input(format!("trace: {e}")),
                })?;
                let line = rec.position().map(|p| p.line()).unwrap_or(0);
                rec.iter()
                    .map(|s| s.parse::<f64>())
                    .collect::<Result<Vec<f64>, _>>()
                    .map_err(|e| CliError::Input(format!("trace line {line}: {e}")))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { columns, rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn n_agents(&self) -> usize {
        self.columns.iter().filter(|c| c.starts_with("braking_")).count()
    }
}

/// Recomputes every `h_i_j` column from the recorded positions and returns
/// the largest absolute difference to the recorded values.
pub fn replay_h_error(table: &TraceTable, r: f64) -> Result<f64, CliError> {
    let n = table.n_agents();
    let missing = |c: &str| CliError::Input(format!("trace has no column {c}"));
    let mut pos = Vec::with_capacity(n);
    for i in 0..n {
        let x = table.column(&format!("x_{i}")).ok_or_else(|| missing("x"))?;
        let y = table.column(&format!("y_{i}")).ok_or_else(|| missing("y"))?;
        pos.push((x, y));
    }
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let name = format!("h_{i}_{j}");
            let recorded = table.column(&name).ok_or_else(|| missing(&name))?;
            for (k, h) in recorded.iter().enumerate() {
                let dx = pos[i].0[k] - pos[j].0[k];
                let dy = pos[i].1[k] - pos[j].1[k];
                worst = worst.max((dx * dx + dy * dy - r * r - h).abs());
            }
        }
    }
    Ok(worst)
}
