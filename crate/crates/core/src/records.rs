//! JSON-lines dataset and prediction records.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cxsmiles::{parse_cxsmiles, CxsmilesError, MarkushStructure};
use crate::markushrepr::{decode_text, SubstituentTable};

/// A piece of text in an image with its box `[x, y, width, height]` in pixels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OcrCell {
    pub text: String,
    pub bbox: [i32; 4],
}

impl OcrCell {
    pub fn new(text: impl Into<String>, x: i32, y: i32, width: i32, height: i32) -> Self {
        OcrCell {
            text: text.into(),
            bbox: [x, y, width, height],
        }
    }

    pub fn translated(&self, dx: i32, dy: i32) -> Self {
        let [x, y, w, h] = self.bbox;
        OcrCell {
            text: self.text.clone(),
            bbox: [x + dx, y + dy, w, h],
        }
    }

    pub fn within(&self, width: i32, height: i32) -> bool {
        let [x, y, w, h] = self.bbox;
        w > 0 && h > 0 && x >= 0 && y >= 0 && x + w <= width && y + h <= height
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    pub cxsmiles: String,
    pub optimized: String,
    pub description: String,
    pub table: SubstituentTable,
    pub ocr_cells: Vec<OcrCell>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_path: Option<String>,
}

impl DatasetRecord {
    pub fn structure(&self) -> Result<MarkushStructure, CxsmilesError> {
        parse_cxsmiles(&self.cxsmiles)
    }
}

/// Model output: either the raw optimized string or a pre-parsed pair.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimized: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cxsmiles: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<SubstituentTable>,
}

/// A prediction turned into comparable objects. Problems are listed in
/// `diagnostics`; an unusable prediction resolves to an empty structure.
#[derive(Debug, Clone, Default)]
pub struct ResolvedPrediction {
    pub structure: MarkushStructure,
    pub table: SubstituentTable,
    pub diagnostics: Vec<String>,
}

impl PredictionRecord {
    pub fn resolve(&self) -> ResolvedPrediction {
        if let Some(cx) = &self.cxsmiles {
            let table = self.table.clone().unwrap_or_default();
            return match parse_cxsmiles(cx) {
                Ok(structure) => ResolvedPrediction {
                    structure,
                    table,
                    diagnostics: Vec::new(),
                },
                Err(e) => ResolvedPrediction {
                    table,
                    diagnostics: vec![format!("cxsmiles: {e}")],
                    ..Default::default()
                },
            };
        }
        match &self.optimized {
            Some(text) => {
                let decoded = decode_text(text);
                ResolvedPrediction {
                    structure: decoded.structure,
                    table: self.table.clone().unwrap_or(decoded.table),
                    diagnostics: decoded.diagnostics.iter().map(|d| format!("optimized: {d}")).collect(),
                }
            }
            None => ResolvedPrediction {
                table: self.table.clone().unwrap_or_default(),
                diagnostics: vec!["no prediction".into()],
                ..Default::default()
            },
        }
    }
}

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("duplicate id '{0}'")]
    DuplicateId(String),
    #[error("prediction id '{0}' has no ground truth")]
    UnknownId(String),
    #[error("ground-truth id '{0}' has no prediction")]
    MissingPrediction(String),
}

/// Reads one JSON value per non-blank line.
pub fn read_jsonl<T: DeserializeOwned>(reader: impl BufRead) -> Result<Vec<T>, RecordError> {
    let mut out = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|source| RecordError::Json { line: k + 1, source })?);
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(mut writer: impl Write, records: &[T]) -> Result<(), RecordError> {
    for r in records {
        serde_json::to_writer(&mut writer, r).map_err(|source| RecordError::Json { line: 0, source })?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

/// Pairs predictions with ground truth by id, in ground-truth order. Every id
/// must appear exactly once on both sides.
pub fn pair_by_id(
    predictions: Vec<PredictionRecord>,
    ground_truth: Vec<DatasetRecord>,
) -> Result<Vec<(PredictionRecord, DatasetRecord)>, RecordError> {
    let mut gt_ids = HashSet::new();
    for g in &ground_truth {
        if !gt_ids.insert(g.id.as_str()) {
            return Err(RecordError::DuplicateId(g.id.clone()));
        }
    }
    let mut by_id = std::collections::HashMap::new();
    for p in predictions {
        if !gt_ids.contains(p.id.as_str()) {
            return Err(RecordError::UnknownId(p.id));
        }
        if by_id.contains_key(&p.id) {
            return Err(RecordError::DuplicateId(p.id));
        }
        by_id.insert(p.id.clone(), p);
    }
    ground_truth
        .into_iter()
        .map(|g| match by_id.remove(&g.id) {
            Some(p) => Ok((p, g)),
            None => Err(RecordError::MissingPrediction(g.id)),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> DatasetRecord {
        DatasetRecord {
            id: "s1".into(),
            cxsmiles: "C* |$;R1$|".into(),
            optimized: "C<i>0</i>{R1}<i>1</i><t><g>R1<v>Me".into(),
            description: "wherein R1 is Me".into(),
            table: [("R1", vec!["Me"])].into_iter().collect(),
            ocr_cells: vec![OcrCell::new("R1", 3, 4, 10, 8)],
            image_path: None,
        }
    }

    #[test]
    fn jsonl_round_trip_is_exact() {
        let records = vec![record(), DatasetRecord { id: "s2".into(), ..record() }];
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(r#"{"id":"s1","cxsmiles":"C* |$;R1$|","optimized":"#));
        assert!(text.contains(r#""bbox":[3,4,10,8]"#));
        let back: Vec<DatasetRecord> = read_jsonl(buf.as_slice()).unwrap();
        assert_eq!(back, records);
        let mut again = Vec::new();
        write_jsonl(&mut again, &back).unwrap();
        assert_eq!(again, buf);
    }

    #[test]
    fn bad_line_reports_position() {
        let err = read_jsonl::<DatasetRecord>("\n{\"id\":1}\n".as_bytes()).unwrap_err();
        assert!(matches!(err, RecordError::Json { line: 2, .. }));
    }

    #[test]
    fn prediction_forms() {
        let p = PredictionRecord {
            id: "s1".into(),
            optimized: Some(record().optimized),
            ..Default::default()
        };
        let r = p.resolve();
        assert!(r.diagnostics.is_empty());
        assert_eq!(r.table, record().table);
        let p = PredictionRecord {
            id: "s1".into(),
            cxsmiles: Some("C1CC".into()),
            ..Default::default()
        };
        let r = p.resolve();
        assert_eq!(r.structure.graph.n_atoms(), 0);
        assert_eq!(r.diagnostics.len(), 1);
    }

    #[test]
    fn pairing() {
        let gt = vec![record(), DatasetRecord { id: "s2".into(), ..record() }];
        let pred = |id: &str| PredictionRecord {
            id: id.into(),
            ..Default::default()
        };
        let pairs = pair_by_id(vec![pred("s2"), pred("s1")], gt.clone()).unwrap();
        assert_eq!(pairs[0].0.id, "s1");
        assert!(matches!(pair_by_id(vec![pred("s1")], gt.clone()), Err(RecordError::MissingPrediction(_))));
        assert!(matches!(pair_by_id(vec![pred("zz")], gt), Err(RecordError::UnknownId(_))));
    }
}
