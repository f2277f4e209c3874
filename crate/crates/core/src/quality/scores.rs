use std::path::Path;

use super::{nqm, Logits};
use crate::error::{Error, Result};

/// Quality score of one image.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRecord {
    pub id: String,
    /// Absent when the score file carried only the quality value.
    pub logits: Option<Logits>,
    pub nqm: f64,
}

impl ScoreRecord {
    pub fn from_logits(id: String, logits: Logits) -> Self {
        Self {
            id,
            logits: Some(logits),
            nqm: nqm(logits),
        }
    }
}

/// Writes `id,alpha,beta,nqm`, or `id,nqm` when any record lacks logits.
pub fn scores_to_csv(records: &[ScoreRecord]) -> String {
    let with_logits = records.iter().all(|r| r.logits.is_some());
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    if with_logits {
        w.write_record(["id", "alpha", "beta", "nqm"]).expect("in-memory write");
    } else {
        w.write_record(["id", "nqm"]).expect("in-memory write");
    }
    for r in records {
        match (with_logits, r.logits) {
            (true, Some(l)) => w.write_record([r.id.clone(), format!("{:?}", l.alpha), format!("{:?}", l.beta), format!("{:?}", r.nqm)]),
            _ => w.write_record([r.id.clone(), format!("{:?}", r.nqm)]),
        }
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// Parses a score file with header `id,alpha,beta[,nqm]` or `id,nqm`.
///
/// When logits are present the quality is recomputed from them.
pub fn parse_scores(text: &str) -> Result<Vec<ScoreRecord>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Schema(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let has_logits = match headers.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["id", "alpha", "beta"] | ["id", "alpha", "beta", "nqm"] => true,
        ["id", "nqm"] => false,
        _ => return Err(Error::Schema(format!("score header {:?}; expected id,alpha,beta or id,nqm", headers.join(",")))),
    };
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Schema(e.to_string()))?;
        let bad = |what: &str| Error::Schema(format!("score line {}: invalid {what}", i + 2));
        let num = |s: &str, what: &str| -> Result<f64> {
            s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| bad(what))
        };
        let id = rec[0].to_string();
        if !seen.insert(id.clone()) {
            return Err(Error::Schema(format!("duplicate score id {id:?}")));
        }
        let record = if has_logits {
            ScoreRecord::from_logits(id, Logits::new(num(&rec[1], "alpha")?, num(&rec[2], "beta")?))
        } else {
            let q = num(&rec[1], "nqm")?;
            if !(0.0..=1.0).contains(&q) {
                return Err(bad("nqm"));
            }
            ScoreRecord { id, logits: None, nqm: q }
        };
        out.push(record);
    }
    Ok(out)
}

pub fn read_scores(path: impl AsRef<Path>) -> Result<Vec<ScoreRecord>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scores(&text)
}

pub fn write_scores(records: &[ScoreRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, scores_to_csv(records)).map_err(|e| Error::io(path, e))
}
