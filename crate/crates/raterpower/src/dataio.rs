//! Interchange formats for response matrices and JSON reports.
//!
//! JSON Lines: one `{"item_id": "...", "responses": [...]}` object per line.
//! CSV: header `item_id,r1,...,rK`; empty cells are allowed on load so ragged
//! items round-trip through JSONL but not through CSV.
//!
//! Raw responses may be numbers or string labels. They are mapped into
//! `[0, 1]` with a [`ValueMap`]; without one, numbers already in `[0, 1]`
//! are kept and integer scales (e.g. a 1..5 Likert) are mapped linearly onto
//! `{0, 1/(L-1), ..., 1}` between the observed minimum and maximum.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use raterpower_core::ResponseMatrix;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("item {item_id}: response {value} is outside [0, 1]")]
    ValueOutOfRange { item_id: String, value: f64 },
    #[error("item id {0} appears more than once")]
    DuplicateItemId(String),
    #[error("CSV needs the same number of responses for every item")]
    RaggedNotSupported,
    #[error("unsupported schema_version {0}")]
    SchemaVersion(u64),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] raterpower_core::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    JsonLines,
    Csv,
}

impl DatasetFormat {
    /// `.csv` is CSV, anything else JSON Lines.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => DatasetFormat::Csv,
            _ => DatasetFormat::JsonLines,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            DatasetFormat::JsonLines => "jsonl",
            DatasetFormat::Csv => "csv",
        }
    }
}

impl FromStr for DatasetFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "json" | "jsonlines" => Ok(DatasetFormat::JsonLines),
            "csv" => Ok(DatasetFormat::Csv),
            _ => Err(format!("unknown dataset format `{s}`")),
        }
    }
}

impl fmt::Display for DatasetFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

/// A raw response before mapping: its text form and its number, if any.
#[derive(Debug, Clone, PartialEq)]
struct Raw {
    label: String,
    number: Option<f64>,
}

impl Raw {
    fn number(v: f64, label: String) -> Self {
        Raw { label, number: Some(v) }
    }

    fn text(s: &str) -> Self {
        Raw {
            label: s.to_string(),
            number: s.trim().parse().ok(),
        }
    }
}

/// How raw responses become values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ValueMap {
    /// Numbers are used as they are.
    Identity,
    /// `(v - lo) / (hi - lo)`.
    Linear { lo: f64, hi: f64 },
    /// Exact label lookup; numbers are looked up by their written form.
    Labels { labels: BTreeMap<String, f64> },
}

impl ValueMap {
    pub fn from_json_file(path: &Path) -> Result<Self, DataError> {
        let text = std::fs::read_to_string(path)?;
        let value: Value = serde_json::from_str(&text)?;
        // a bare object is shorthand for a label table
        if value.get("kind").is_none() {
            let labels: BTreeMap<String, f64> = serde_json::from_value(value)?;
            return Ok(ValueMap::Labels { labels });
        }
        Ok(serde_json::from_value(value)?)
    }

    fn apply(&self, raw: &Raw) -> Option<f64> {
        match self {
            ValueMap::Identity => raw.number,
            ValueMap::Linear { lo, hi } => raw.number.map(|v| (v - lo) / (hi - lo)),
            ValueMap::Labels { labels } => labels.get(&raw.label).copied(),
        }
    }

    /// The default for a set of raw responses.
    fn infer(items: &[(String, Vec<Raw>, usize)]) -> Result<Self, DataError> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut integral = true;
        for (_, raws, line) in items {
            for raw in raws {
                let v = raw.number.ok_or_else(|| DataError::Parse {
                    line: *line,
                    reason: format!("label `{}` needs a value map", raw.label),
                })?;
                lo = lo.min(v);
                hi = hi.max(v);
                integral &= v.fract() == 0.0;
            }
        }
        if lo >= 0.0 && hi <= 1.0 {
            Ok(ValueMap::Identity)
        } else if integral && hi > lo {
            Ok(ValueMap::Linear { lo, hi })
        } else {
            Ok(ValueMap::Identity)
        }
    }
}

#[derive(Deserialize)]
struct JsonRecord {
    item_id: String,
    responses: Vec<Value>,
}

#[derive(Serialize)]
struct JsonRecordOut<'a> {
    item_id: &'a str,
    responses: &'a [f64],
}

fn read_jsonl(reader: impl BufRead) -> Result<Vec<(String, Vec<Raw>, usize)>, DataError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: JsonRecord = serde_json::from_str(&line).map_err(|e| DataError::Parse {
            line: line_no,
            reason: e.to_string(),
        })?;
        let raws = record
            .responses
            .iter()
            .map(|v| match v {
                Value::Number(n) => Ok(Raw::number(n.as_f64().unwrap_or(f64::NAN), n.to_string())),
                Value::String(s) => Ok(Raw::text(s)),
                other => Err(DataError::Parse {
                    line: line_no,
                    reason: format!("response {other} is neither a number nor a label"),
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.push((record.item_id, raws, line_no));
    }
    Ok(out)
}

fn read_csv(reader: impl io::Read) -> Result<Vec<(String, Vec<Raw>, usize)>, DataError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.get(0).map(str::trim) != Some("item_id") {
        return Err(DataError::Parse {
            line: 1,
            reason: "first column must be item_id".into(),
        });
    }
    let mut out = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let line_no = i + 2;
        let record = record?;
        let mut cells = record.iter();
        let id = cells.next().unwrap_or_default().to_string();
        let raws = cells.filter(|c| !c.trim().is_empty()).map(Raw::text).collect();
        out.push((id, raws, line_no));
    }
    Ok(out)
}

fn build_matrix(
    items: Vec<(String, Vec<Raw>, usize)>,
    value_map: Option<&ValueMap>,
) -> Result<ResponseMatrix, DataError> {
    let mut seen = HashSet::new();
    for (id, raws, line) in &items {
        if !seen.insert(id.as_str()) {
            return Err(DataError::DuplicateItemId(id.clone()));
        }
        if raws.is_empty() {
            return Err(DataError::Parse {
                line: *line,
                reason: format!("item {id} has no responses"),
            });
        }
    }
    let inferred;
    let map = match value_map {
        Some(m) => m,
        None => {
            inferred = ValueMap::infer(&items)?;
            &inferred
        }
    };
    let mut rows = Vec::with_capacity(items.len());
    for (id, raws, line) in items {
        let mut values = Vec::with_capacity(raws.len());
        for raw in &raws {
            let v = map.apply(raw).ok_or_else(|| DataError::Parse {
                line,
                reason: format!("no value for response `{}`", raw.label),
            })?;
            if !(0.0..=1.0).contains(&v) {
                return Err(DataError::ValueOutOfRange { item_id: id, value: v });
            }
            values.push(v);
        }
        rows.push((id, values));
    }
    Ok(ResponseMatrix::from_items(rows)?)
}

/// Loads a response matrix, mapping raw responses into `[0, 1]`.
pub fn load_responses(
    path: &Path,
    format: DatasetFormat,
    value_map: Option<&ValueMap>,
) -> Result<ResponseMatrix, DataError> {
    let file = File::open(path)?;
    read_responses(BufReader::new(file), format, value_map)
}

pub fn read_responses(
    reader: impl BufRead,
    format: DatasetFormat,
    value_map: Option<&ValueMap>,
) -> Result<ResponseMatrix, DataError> {
    let items = match format {
        DatasetFormat::JsonLines => read_jsonl(reader)?,
        DatasetFormat::Csv => read_csv(reader)?,
    };
    build_matrix(items, value_map)
}

pub fn write_matrix(m: &ResponseMatrix, writer: impl Write, format: DatasetFormat) -> Result<(), DataError> {
    let mut w = BufWriter::new(writer);
    match format {
        DatasetFormat::JsonLines => {
            for (item_id, responses) in m.items() {
                serde_json::to_writer(&mut w, &JsonRecordOut { item_id, responses })?;
                w.write_all(b"\n")?;
            }
        }
        DatasetFormat::Csv => {
            let k = m.rectangular_width().ok_or(DataError::RaggedNotSupported)?;
            let mut cw = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut w);
            let mut header = vec!["item_id".to_string()];
            header.extend((1..=k).map(|j| format!("r{j}")));
            cw.write_record(&header)?;
            for (id, responses) in m.items() {
                let mut row = vec![id.to_string()];
                row.extend(responses.iter().map(|v| v.to_string()));
                cw.write_record(&row)?;
            }
            cw.flush()?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn save_matrix(m: &ResponseMatrix, path: &Path, format: DatasetFormat) -> Result<(), DataError> {
    // check before creating the file so a rejected CSV leaves nothing behind
    if format == DatasetFormat::Csv && m.rectangular_width().is_none() {
        return Err(DataError::RaggedNotSupported);
    }
    write_matrix(m, File::create(path)?, format)
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    schema_version: u32,
    kind: &'a str,
    #[serde(flatten)]
    report: &'a T,
}

/// Pretty JSON of `report` with `schema_version` and `kind` at the top level.
pub fn report_to_string<T: Serialize>(report: &T, kind: &str) -> Result<String, DataError> {
    let envelope = Envelope {
        schema_version: SCHEMA_VERSION,
        kind,
        report,
    };
    let mut s = serde_json::to_string_pretty(&envelope)?;
    s.push('\n');
    Ok(s)
}

pub fn save_report<T: Serialize>(report: &T, kind: &str, path: &Path) -> Result<(), DataError> {
    std::fs::write(path, report_to_string(report, kind)?)?;
    Ok(())
}

/// Parses a report written by [`save_report`]; plain JSON without an
/// envelope is accepted too.
pub fn parse_report<T: DeserializeOwned>(text: &str) -> Result<T, DataError> {
    let mut value: Value = serde_json::from_str(text)?;
    if let Some(obj) = value.as_object_mut() {
        if let Some(v) = obj.remove("schema_version") {
            let version = v.as_u64().unwrap_or(0);
            if version != u64::from(SCHEMA_VERSION) {
                return Err(DataError::SchemaVersion(version));
            }
        }
        obj.remove("kind");
    }
    Ok(serde_json::from_value(value)?)
}

pub fn load_report<T: DeserializeOwned>(path: &Path) -> Result<T, DataError> {
    parse_report(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load_str(text: &str, format: DatasetFormat, map: Option<&ValueMap>) -> Result<ResponseMatrix, DataError> {
        read_responses(text.as_bytes(), format, map)
    }

    #[test]
    fn jsonl_line() {
        let m = load_str("{\"item_id\":\"a\",\"responses\":[0,1,1]}\n", DatasetFormat::JsonLines, None).unwrap();
        assert_eq!(m.item_id(0), "a");
        assert_eq!(m.item(0), &[0.0, 1.0, 1.0]);
    }

    #[test]
    fn likert_default_map() {
        let m = load_str("{\"item_id\":\"a\",\"responses\":[1,2,3,4,5]}", DatasetFormat::JsonLines, None).unwrap();
        assert_eq!(m.item(0), &[0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let text = "{\"item_id\":\"a\",\"responses\":[0]}\n{\"item_id\":\"a\",\"responses\":[1]}\n";
        assert!(matches!(
            load_str(text, DatasetFormat::JsonLines, None),
            Err(DataError::DuplicateItemId(id)) if id == "a"
        ));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "{\"item_id\":\"a\",\"responses\":[0]}\n\nnot json\n";
        assert!(matches!(
            load_str(text, DatasetFormat::JsonLines, None),
            Err(DataError::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn labels_need_a_map() {
        let text = "{\"item_id\":\"a\",\"responses\":[\"yes\",\"no\"]}";
        assert!(matches!(
            load_str(text, DatasetFormat::JsonLines, None),
            Err(DataError::Parse { line: 1, .. })
        ));
        let labels = [("yes".to_string(), 1.0), ("no".to_string(), 0.0)].into_iter().collect();
        let m = load_str(text, DatasetFormat::JsonLines, Some(&ValueMap::Labels { labels })).unwrap();
        assert_eq!(m.item(0), &[1.0, 0.0]);
    }

    #[test]
    fn out_of_range_after_mapping() {
        let text = "{\"item_id\":\"x\",\"responses\":[0.5,1.5]}";
        assert!(matches!(
            load_str(text, DatasetFormat::JsonLines, None),
            Err(DataError::ValueOutOfRange { item_id, value }) if item_id == "x" && value == 1.5
        ));
        let map = ValueMap::Linear { lo: 0.0, hi: 1.0 };
        assert!(matches!(
            load_str(text, DatasetFormat::JsonLines, Some(&map)),
            Err(DataError::ValueOutOfRange { .. })
        ));
    }

    #[test]
    fn csv_ragged_load_and_rectangular_save() {
        let m = load_str("item_id,r1,r2\na,0,1\nb,0.5,\n", DatasetFormat::Csv, None).unwrap();
        assert_eq!(m.item(1), &[0.5]);
        let mut out = Vec::new();
        assert!(matches!(
            write_matrix(&m, &mut out, DatasetFormat::Csv),
            Err(DataError::RaggedNotSupported)
        ));
        let r = ResponseMatrix::from_items([("a", vec![0.0, 1.0]), ("b,c", vec![0.25, 0.5])]).unwrap();
        let mut out = Vec::new();
        write_matrix(&r, &mut out, DatasetFormat::Csv).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "item_id,r1,r2\na,0,1\n\"b,c\",0.25,0.5\n");
        assert_eq!(load_str(&text, DatasetFormat::Csv, None).unwrap(), r);
    }

    #[test]
    fn report_envelope_round_trip() {
        let prior = raterpower_core::ItemPrior::toxicity();
        let text = report_to_string(&prior, "prior").unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["kind"], "prior");
        let back: raterpower_core::ItemPrior = parse_report(&text).unwrap();
        assert_eq!(back, prior);
        let bad = text.replace("\"schema_version\": 1", "\"schema_version\": 7");
        assert!(matches!(parse_report::<raterpower_core::ItemPrior>(&bad), Err(DataError::SchemaVersion(7))));
    }

    #[test]
    fn value_map_file_shorthand() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("map.json");
        std::fs::write(&p, "{\"low\": 0, \"high\": 1}").unwrap();
        let map = ValueMap::from_json_file(&p).unwrap();
        assert!(matches!(map, ValueMap::Labels { ref labels } if labels["high"] == 1.0));
        std::fs::write(&p, "{\"kind\": \"linear\", \"lo\": 1, \"hi\": 7}").unwrap();
        assert_eq!(ValueMap::from_json_file(&p).unwrap(), ValueMap::Linear { lo: 1.0, hi: 7.0 });
    }
}
