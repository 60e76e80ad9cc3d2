//! Serialized command output: a JSON document or a CSV table, both carrying
//! the run configuration, plus optional two-column plot data.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Rows of a CSV rendering.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table { headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

/// `(x, y)` pairs for external plotting.
#[derive(Clone, Debug, PartialEq)]
pub struct Plot {
    pub x: String,
    pub y: String,
    pub points: Vec<(String, String)>,
}

/// How a run ended, mapped to the process exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Complete,
    BudgetExhausted,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub result: Value,
    pub table: Table,
    pub plot: Option<Plot>,
    pub outcome: Outcome,
}

fn to_csv(headers: &[String], rows: &[Vec<String>], preamble: &[String]) -> Result<String> {
    let mut out = String::new();
    for line in preamble {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(headers).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    out.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
    Ok(out)
}

impl Report {
    pub fn to_json(&self) -> String {
        let doc = json!({
            "command": self.command,
            "config": self.config,
            "outcome": self.outcome,
            "result": self.result,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
        s.push('\n');
        s
    }

    /// The table, preceded by `#` lines echoing the command and configuration.
    pub fn to_csv(&self) -> Result<String> {
        let preamble = [
            format!("command: {}", self.command),
            format!("config: {}", self.config),
            format!("outcome: {}", serde_json::to_value(self.outcome).expect("enum serializes").as_str().unwrap_or("")),
        ];
        to_csv(&self.table.headers, &self.table.rows, &preamble)
    }

    pub fn plot_csv(&self) -> Result<Option<String>> {
        let Some(p) = &self.plot else { return Ok(None) };
        let rows: Vec<Vec<String>> = p.points.iter().map(|(x, y)| vec![x.clone(), y.clone()]).collect();
        to_csv(&[p.x.clone(), p.y.clone()], &rows, &[format!("command: {}", self.command)]).map(Some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_labels_with_commas() {
        let mut t = Table::new(&["point", "size"]);
        t.push(vec!["(1,2)".into(), "5".into()]);
        let r = Report {
            command: "x".into(),
            config: json!({"k": 1}),
            result: json!({}),
            table: t,
            plot: Some(Plot { x: "n".into(), y: "q".into(), points: vec![("1".into(), "0.5".into())] }),
            outcome: Outcome::Complete,
        };
        let csv = r.to_csv().unwrap();
        assert!(csv.starts_with("# command: x\n# config: {\"k\":1}\n"));
        assert!(csv.contains("\"(1,2)\",5\n"));
        assert_eq!(r.plot_csv().unwrap().unwrap(), "# command: x\nn,q\n1,0.5\n");
        assert!(r.to_json().ends_with("}\n"));
    }
}
