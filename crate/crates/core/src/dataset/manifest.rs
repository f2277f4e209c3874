use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::DistortionModel;
use crate::numfmt::format_sig;

pub const MANIFEST_HEADER: [&str; 7] = ["source", "output", "label", "model", "lambda", "seed", "fill_fraction"];

/// Class of a generated image. `Skipped` rows record unreadable sources and
/// have no output file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Distorted,
    Undistorted,
    Skipped,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Distorted => "distorted",
            Label::Undistorted => "undistorted",
            Label::Skipped => "skipped",
        })
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distorted" | "1" => Ok(Label::Distorted),
            "undistorted" | "0" => Ok(Label::Undistorted),
            "skipped" => Ok(Label::Skipped),
            _ => Err(Error::parse("label", s)),
        }
    }
}

/// Provenance of one generated image.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub source: String,
    /// Path relative to the manifest's directory.
    pub output: String,
    pub label: Label,
    pub model: Option<DistortionModel>,
    pub lambda: f64,
    pub seed: u64,
    pub fill_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn count(&self, label: Label) -> usize {
        self.entries.iter().filter(|e| e.label == label).count()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(MANIFEST_HEADER).expect("writing to memory");
        for e in &self.entries {
            let model = e.model.map(|m| m.to_string()).unwrap_or_default();
            w.write_record([
                e.source.as_str(),
                e.output.as_str(),
                &e.label.to_string(),
                &model,
                &format_sig(e.lambda, 6),
                &e.seed.to_string(),
                &format_sig(e.fill_fraction, 6),
            ])
            .expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let headers = rdr.headers().map_err(|e| Error::Schema(e.to_string()))?.clone();
        if headers.iter().collect::<Vec<_>>() != MANIFEST_HEADER {
            return Err(Error::Schema(format!("manifest header must be {}", MANIFEST_HEADER.join(","))));
        }
        let mut entries = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Schema(e.to_string()))?;
            let row = i + 2;
            let bad = |what: &str| Error::Schema(format!("manifest line {row}: invalid {what}"));
            let model = match &rec[3] {
                "" => None,
                s => Some(s.parse::<DistortionModel>().map_err(|_| bad("model"))?),
            };
            entries.push(ManifestEntry {
                source: rec[0].to_string(),
                output: rec[1].to_string(),
                label: rec[2].parse().map_err(|_| bad("label"))?,
                model,
                lambda: rec[4].parse().map_err(|_| bad("lambda"))?,
                seed: rec[5].parse().map_err(|_| bad("seed"))?,
                fill_fraction: rec[6].parse().map_err(|_| bad("fill_fraction"))?,
            });
        }
        Ok(Self { entries })
    }

    /// Checks that every row's file exists under `root` and that every file
    /// under `root` other than `exclude` names has exactly one row.
    pub fn check_completeness(&self, root: &Path, exclude: &[&str]) -> Result<()> {
        let mut listed = BTreeSet::new();
        for e in self.entries.iter().filter(|e| e.label != Label::Skipped) {
            if !listed.insert(e.output.clone()) {
                return Err(Error::Schema(format!("{} listed twice", e.output)));
            }
            if !root.join(&e.output).is_file() {
                return Err(Error::Schema(format!("{} is listed but missing", e.output)));
            }
        }
        for file in super::list_files(root)? {
            if exclude.contains(&file.as_str()) {
                continue;
            }
            if !listed.contains(&file) {
                return Err(Error::Schema(format!("{file} exists but is not in the manifest")));
            }
        }
        Ok(())
    }
}
