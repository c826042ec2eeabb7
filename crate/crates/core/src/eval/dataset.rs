use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::EvalError;

/// One row of a loghub-style structured CSV.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledRecord {
    /// 1-based.
    pub line_id: u64,
    pub content: String,
    pub event_id: String,
    pub event_template: Option<String>,
}

const REQUIRED: [&str; 3] = ["LineId", "Content", "EventId"];

pub fn load_labeled_dataset(path: impl AsRef<Path>) -> Result<Vec<LabeledRecord>, EvalError> {
    let file = File::open(path.as_ref())?;
    read_labeled_dataset(BufReader::new(file))
}

/// Reads a CSV with at least `LineId`, `Content` and `EventId` columns.
/// `EventTemplate` is optional; other columns are ignored.
pub fn read_labeled_dataset<R: Read>(reader: R) -> Result<Vec<LabeledRecord>, EvalError> {
    let mut csv = csv::ReaderBuilder::new().flexible(false).from_reader(reader);
    let headers = csv.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h.trim_start_matches('\u{feff}') == name);
    let mut index = [0usize; 3];
    for (slot, name) in index.iter_mut().zip(REQUIRED) {
        *slot = column(name).ok_or_else(|| EvalError::MissingColumn(name.to_owned()))?;
    }
    let [line_col, content_col, event_col] = index;
    let template_col = column("EventTemplate");

    let mut records = Vec::new();
    for row in csv.records() {
        let row = row?;
        let expected = records.len() as u64 + 1;
        let raw_id = &row[line_col];
        let line_id: u64 = raw_id.trim().parse().map_err(|_| EvalError::BadRecord {
            line_id: expected,
            reason: format!("LineId {raw_id:?} is not an integer"),
        })?;
        if line_id != expected {
            return Err(EvalError::BadRecord {
                line_id: expected,
                reason: format!("LineId {line_id} breaks the 1..n sequence"),
            });
        }
        let event_id = row[event_col].to_owned();
        if event_id.is_empty() {
            return Err(EvalError::BadRecord { line_id, reason: "empty EventId".into() });
        }
        records.push(LabeledRecord {
            line_id,
            content: row[content_col].to_owned(),
            event_id,
            event_template: template_col.map(|c| row[c].to_owned()),
        });
    }
    Ok(records)
}

/// Reads a raw log file, one message per line. Invalid UTF-8 is replaced,
/// trailing `\r` stripped.
pub fn read_raw_lines<R: BufRead>(mut reader: R) -> std::io::Result<Vec<String>> {
    let mut lines = Vec::new();
    let mut buf = Vec::new();
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            return Ok(lines);
        }
        if buf.last() == Some(&b'\n') {
            buf.pop();
        }
        if buf.last() == Some(&b'\r') {
            buf.pop();
        }
        lines.push(String::from_utf8_lossy(&buf).into_owned());
    }
}
