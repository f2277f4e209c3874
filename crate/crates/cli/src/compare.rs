//! Pairwise comparisons with the toy embedding.

use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use radialkit::curves::ComparisonRecord;
use radialkit::dataset::{crop, CropSpec, DatasetManifest, Label};
use radialkit::imaging::read_image;
use radialkit::{Error, Result};

use crate::embedding::ToyEmbedding;

/// One requested comparison; ids are image paths as written in the pair list.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSpec {
    pub probe: String,
    pub reference: String,
    pub mated: bool,
}

/// Parses CSV `probe,reference,mated`.
pub fn parse_pairs(text: &str) -> Result<Vec<PairSpec>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| Error::Schema(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["probe", "reference", "mated"] {
        return Err(Error::Schema("pair list header must be probe,reference,mated".into()));
    }
    rdr.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec.map_err(|e| Error::Schema(e.to_string()))?;
            let mated = match &rec[2] {
                "1" => true,
                "0" => false,
                other => return Err(Error::Schema(format!("pair line {}: mated must be 0 or 1, got {other:?}", i + 2))),
            };
            Ok(PairSpec {
                probe: rec[0].to_string(),
                reference: rec[1].to_string(),
                mated,
            })
        })
        .collect()
}

/// Pairs from a generated dataset: each distorted image is a mated probe
/// against the undistorted image of the same source, and a non-mated probe
/// against the undistorted image of the next source.
pub fn manifest_pairs(manifest: &DatasetManifest) -> Result<Vec<PairSpec>> {
    let mut originals: Vec<(&str, &str)> = manifest
        .entries
        .iter()
        .filter(|e| e.label == Label::Undistorted)
        .map(|e| (e.source.as_str(), e.output.as_str()))
        .collect();
    originals.sort();
    if originals.is_empty() {
        return Err(Error::Schema("manifest has no undistorted rows to compare against".into()));
    }
    let index: HashMap<&str, usize> = originals.iter().enumerate().map(|(i, (s, _))| (*s, i)).collect();
    let mut pairs = Vec::new();
    for e in manifest.entries.iter().filter(|e| e.label == Label::Distorted) {
        let Some(&i) = index.get(e.source.as_str()) else { continue };
        pairs.push(PairSpec {
            probe: e.output.clone(),
            reference: originals[i].1.to_string(),
            mated: true,
        });
        if originals.len() > 1 {
            pairs.push(PairSpec {
                probe: e.output.clone(),
                reference: originals[(i + 1) % originals.len()].1.to_string(),
                mated: false,
            });
        }
    }
    Ok(pairs)
}

/// How images are cropped before embedding.
#[derive(Debug, Clone, Default)]
pub struct CropPolicy {
    /// Applied to every image without its own box.
    pub default: Option<CropSpec>,
    /// Boxes keyed by image id.
    pub boxes: HashMap<String, CropSpec>,
}

impl CropPolicy {
    fn for_id(&self, id: &str) -> Option<&CropSpec> {
        self.boxes.get(id).or(self.default.as_ref())
    }
}

/// Comparison results; pairs involving a flat image are set aside.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Comparisons {
    pub records: Vec<ComparisonRecord>,
    /// Pairs whose similarity is undefined because an image has no contrast.
    pub degenerate: Vec<PairSpec>,
}

fn resolve(root: &Path, id: &str) -> PathBuf {
    let p = Path::new(id);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        root.join(p)
    }
}

/// Embeds every image named in `pairs` (paths relative to `root`) and
/// computes cosine similarities.
pub fn compare_pairs(pairs: &[PairSpec], root: &Path, policy: &CropPolicy) -> Result<Comparisons> {
    let ids: BTreeSet<&str> = pairs.iter().flat_map(|p| [p.probe.as_str(), p.reference.as_str()]).collect();
    let embeddings: HashMap<&str, ToyEmbedding> = ids
        .into_par_iter()
        .map(|id| {
            let img = read_image(resolve(root, id))?;
            let img = match policy.for_id(id) {
                Some(c) => crop(&img, c)?.image,
                None => img,
            };
            Ok((id, ToyEmbedding::from_image(&img)?))
        })
        .collect::<Result<_>>()?;

    let mut out = Comparisons::default();
    for p in pairs {
        match embeddings[p.probe.as_str()].similarity(&embeddings[p.reference.as_str()]) {
            Some(s) => out.records.push(ComparisonRecord::new(&p.probe, &p.reference, s, p.mated)),
            None => out.degenerate.push(p.clone()),
        }
    }
    Ok(out)
}
