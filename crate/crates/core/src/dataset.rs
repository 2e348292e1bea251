//! Embedding datasets: validation, persistence and stratified splitting.
//!
//! Two on-disk formats are supported:
//!
//! * `EMB1`, a directory holding `meta.json`, `embeddings.f32le` (N·d
//!   little-endian `f32`, row-major) and `labels.u32le` (N little-endian `u32`).
//! * CSV with a `f0,…,f{d-1},label` header and one sample per line.
//!
//! Labels are always held in memory as dense ids `0..C`. When the source used
//! other ids, the original id of each dense class is kept in `label_map`.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeds;

pub const MAGIC: &str = "EMB1";
pub const META_FILE: &str = "meta.json";
pub const EMBEDDINGS_FILE: &str = "embeddings.f32le";
pub const LABELS_FILE: &str = "labels.u32le";

/// On-disk format of a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Binary,
    Csv,
}

impl Format {
    /// `.csv` files are CSV; anything else is treated as an EMB1 directory.
    pub fn infer(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Binary,
        }
    }
}

/// An immutable N×d embedding matrix with dense class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingDataset {
    name: String,
    extractor: String,
    x: Vec<f32>,
    n: usize,
    d: usize,
    labels: Vec<u32>,
    n_classes: usize,
    label_map: Option<Vec<i64>>,
}

impl EmbeddingDataset {
    /// Builds a dataset from a row-major matrix and dense labels.
    ///
    /// The class count is `max(label) + 1`; every class below it must occur.
    pub fn new(
        name: impl Into<String>,
        extractor: impl Into<String>,
        x: Vec<f32>,
        d: usize,
        labels: Vec<u32>,
    ) -> Result<Self> {
        let n_classes = labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
        Self::with_classes(name, extractor, x, d, labels, n_classes, None)
    }

    /// Builds a dataset from arbitrary integer label ids, remapping them to
    /// `0..C` in ascending id order.
    pub fn from_raw_labels(
        name: impl Into<String>,
        extractor: impl Into<String>,
        x: Vec<f32>,
        d: usize,
        raw: &[i64],
    ) -> Result<Self> {
        let (labels, map) = remap_labels(raw);
        let c = map.len();
        let identity = map.iter().enumerate().all(|(i, &id)| id == i as i64);
        Self::with_classes(
            name,
            extractor,
            x,
            d,
            labels,
            c,
            if identity { None } else { Some(map) },
        )
    }

    fn with_classes(
        name: impl Into<String>,
        extractor: impl Into<String>,
        x: Vec<f32>,
        d: usize,
        labels: Vec<u32>,
        n_classes: usize,
        label_map: Option<Vec<i64>>,
    ) -> Result<Self> {
        let n = labels.len();
        if d == 0 {
            return Err(Error::InvalidDataset("embedding dimension must be >= 1".into()));
        }
        if n < 2 {
            return Err(Error::InvalidDataset(format!("need at least 2 samples, got {n}")));
        }
        if x.len() != n * d {
            return Err(Error::ShapeMismatch(format!(
                "matrix has {} values, expected {n}x{d}",
                x.len()
            )));
        }
        if n_classes < 2 {
            return Err(Error::InvalidDataset(format!(
                "need at least 2 classes, got {n_classes}"
            )));
        }
        if let Some(map) = &label_map {
            if map.len() != n_classes {
                return Err(Error::InvalidDataset(format!(
                    "label map has {} entries for {n_classes} classes",
                    map.len()
                )));
            }
        }
        let mut counts = vec![0usize; n_classes];
        for &l in &labels {
            let l = l as usize;
            if l >= n_classes {
                return Err(Error::LabelOutOfRange {
                    label: l,
                    classes: n_classes,
                });
            }
            counts[l] += 1;
        }
        if let Some(class) = counts.iter().position(|&c| c == 0) {
            return Err(Error::EmptyClass { class });
        }
        for (row, chunk) in x.chunks_exact(d).enumerate() {
            if let Some(col) = chunk.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { row, col });
            }
            if chunk.iter().all(|&v| v == 0.0) {
                return Err(Error::ZeroRow { row });
            }
        }
        Ok(Self {
            name: name.into(),
            extractor: extractor.into(),
            x,
            n,
            d,
            labels,
            n_classes,
            label_map,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn extractor(&self) -> &str {
        &self.extractor
    }

    pub fn n_samples(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Row-major N×d values.
    pub fn values(&self) -> &[f32] {
        &self.x
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.x[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f32]> {
        self.x.chunks_exact(self.d)
    }

    pub fn label_map(&self) -> Option<&[i64]> {
        self.label_map.as_deref()
    }

    /// Original label id of a dense class index.
    pub fn original_label(&self, class: usize) -> i64 {
        match &self.label_map {
            Some(map) => map[class],
            None => class as i64,
        }
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        counts
    }

    /// Row indices grouped by class.
    pub fn class_indices(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.n_classes];
        for (i, &l) in self.labels.iter().enumerate() {
            groups[l as usize].push(i);
        }
        groups
    }

    /// Copy of the dataset restricted to `indices`, keeping the class space.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut x = Vec::with_capacity(indices.len() * self.d);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.n {
                return Err(Error::ShapeMismatch(format!(
                    "row index {i} out of bounds for {} rows",
                    self.n
                )));
            }
            x.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Self::with_classes(
            self.name.clone(),
            self.extractor.clone(),
            x,
            self.d,
            labels,
            self.n_classes,
            self.label_map.clone(),
        )
    }

    /// Copy with every row scaled to unit L2 norm (rounded to `f32`).
    pub fn l2_normalized(&self) -> Self {
        let mut out = self.clone();
        for row in out.x.chunks_exact_mut(self.d) {
            let norm = row
                .iter()
                .map(|&v| f64::from(v) * f64::from(v))
                .sum::<f64>()
                .sqrt();
            for v in row.iter_mut() {
                *v = (f64::from(*v) / norm) as f32;
            }
        }
        out
    }

    /// Same data under another dataset and extractor name.
    pub fn renamed(mut self, name: impl Into<String>, extractor: impl Into<String>) -> Self {
        self.name = name.into();
        self.extractor = extractor.into();
        self
    }
}

fn remap_labels(raw: &[i64]) -> (Vec<u32>, Vec<i64>) {
    let mut ids: Vec<i64> = raw.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let index: BTreeMap<i64, u32> = ids
        .iter()
        .enumerate()
        .map(|(i, &id)| (id, i as u32))
        .collect();
    (raw.iter().map(|id| index[id]).collect(), ids)
}

#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    magic: String,
    name: String,
    extractor: String,
    n: usize,
    d: usize,
    c: usize,
    label_map: Option<Vec<i64>>,
}

/// Reads a dataset in the given format.
pub fn load_dataset(path: &Path, format: Format) -> Result<EmbeddingDataset> {
    match format {
        Format::Binary => load_binary(path),
        Format::Csv => load_csv(path),
    }
}

/// Writes a dataset. Binary output is a directory, created if needed.
pub fn save_dataset(ds: &EmbeddingDataset, path: &Path, format: Format) -> Result<()> {
    match format {
        Format::Binary => save_binary(ds, path),
        Format::Csv => save_csv(ds, path),
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn load_binary(dir: &Path) -> Result<EmbeddingDataset> {
    let meta_path = dir.join(META_FILE);
    let meta_bytes = read_file(&meta_path)?;
    let meta: Meta =
        serde_json::from_slice(&meta_bytes).map_err(|e| Error::MalformedHeader {
            path: meta_path.clone(),
            reason: e.to_string(),
        })?;
    if meta.magic != MAGIC {
        return Err(Error::MalformedHeader {
            path: meta_path,
            reason: format!("expected magic {MAGIC:?}, found {:?}", meta.magic),
        });
    }
    if meta.d == 0 {
        return Err(Error::MalformedHeader {
            path: meta_path,
            reason: "d must be >= 1".into(),
        });
    }

    let emb_path = dir.join(EMBEDDINGS_FILE);
    let emb = read_file(&emb_path)?;
    let expected = (meta.n as u64) * (meta.d as u64) * 4;
    if emb.len() as u64 != expected {
        return Err(Error::PayloadSizeMismatch {
            path: emb_path,
            expected,
            actual: emb.len() as u64,
        });
    }
    let lab_path = dir.join(LABELS_FILE);
    let lab = read_file(&lab_path)?;
    let expected = meta.n as u64 * 4;
    if lab.len() as u64 != expected {
        return Err(Error::PayloadSizeMismatch {
            path: lab_path,
            expected,
            actual: lab.len() as u64,
        });
    }

    let x: Vec<f32> = emb
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .collect();
    let raw: Vec<u32> = lab
        .chunks_exact(4)
        .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .collect();

    // With a label map the stored labels are dense indices into it; without
    // one they are raw ids that may still need remapping.
    let (labels, label_map) = match meta.label_map {
        Some(map) => {
            if map.len() != meta.c {
                return Err(Error::MalformedHeader {
                    path: meta_path,
                    reason: format!("label_map has {} entries but c = {}", map.len(), meta.c),
                });
            }
            (raw, Some(map))
        }
        None => {
            let dense = raw.iter().all(|&l| (l as usize) < meta.c);
            if dense {
                (raw, None)
            } else {
                let ids: Vec<i64> = raw.iter().map(|&l| i64::from(l)).collect();
                let (labels, map) = remap_labels(&ids);
                if map.len() < meta.c {
                    return Err(Error::EmptyClass { class: map.len() });
                }
                (labels, Some(map))
            }
        }
    };
    EmbeddingDataset::with_classes(meta.name, meta.extractor, x, meta.d, labels, meta.c, label_map)
}

fn save_binary(ds: &EmbeddingDataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let meta = Meta {
        magic: MAGIC.to_string(),
        name: ds.name.clone(),
        extractor: ds.extractor.clone(),
        n: ds.n,
        d: ds.d,
        c: ds.n_classes,
        label_map: ds.label_map.clone(),
    };
    let meta_path = dir.join(META_FILE);
    let json = serde_json::to_vec_pretty(&meta)?;
    fs::write(&meta_path, json).map_err(|e| Error::io(&meta_path, e))?;

    let emb_path = dir.join(EMBEDDINGS_FILE);
    let bytes: Vec<u8> = ds.x.iter().flat_map(|v| v.to_le_bytes()).collect();
    fs::write(&emb_path, bytes).map_err(|e| Error::io(&emb_path, e))?;

    let lab_path = dir.join(LABELS_FILE);
    let bytes: Vec<u8> = ds.labels.iter().flat_map(|v| v.to_le_bytes()).collect();
    fs::write(&lab_path, bytes).map_err(|e| Error::io(&lab_path, e))?;
    Ok(())
}

fn load_csv(path: &Path) -> Result<EmbeddingDataset> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let header = reader.headers()?.clone();
    let malformed = |reason: String| Error::MalformedHeader {
        path: path.to_path_buf(),
        reason,
    };
    if header.len() < 2 || &header[header.len() - 1] != "label" {
        return Err(malformed("last column must be 'label'".into()));
    }
    let d = header.len() - 1;
    for (i, name) in header.iter().take(d).enumerate() {
        if name != format!("f{i}") {
            return Err(malformed(format!("column {i} is {name:?}, expected \"f{i}\"")));
        }
    }

    let mut x = Vec::new();
    let mut raw = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != d + 1 {
            return Err(Error::ShapeMismatch(format!(
                "row {row} has {} fields, expected {}",
                record.len(),
                d + 1
            )));
        }
        for (col, field) in record.iter().take(d).enumerate() {
            let v: f32 = field.trim().parse().map_err(|_| {
                Error::InvalidDataset(format!("row {row}, column {col}: not a number: {field:?}"))
            })?;
            x.push(v);
        }
        let label = record[d].trim();
        let id: i64 = label.parse().map_err(|_| {
            Error::InvalidDataset(format!("row {row}: label {label:?} is not an integer"))
        })?;
        raw.push(id);
    }
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset")
        .to_string();
    EmbeddingDataset::from_raw_labels(stem, "csv", x, d, &raw)
}

fn save_csv(ds: &EmbeddingDataset, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    let header: Vec<String> = (0..ds.d)
        .map(|i| format!("f{i}"))
        .chain(std::iter::once("label".to_string()))
        .collect();
    writeln!(w, "{}", header.join(",")).map_err(io)?;
    for (i, row) in ds.rows().enumerate() {
        for v in row {
            write!(w, "{v},").map_err(io)?;
        }
        writeln!(w, "{}", ds.original_label(ds.labels[i] as usize)).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// A stratified train/validation partition of one dataset.
#[derive(Debug, Clone)]
pub struct SplitDataset {
    pub train: EmbeddingDataset,
    pub val: EmbeddingDataset,
    pub train_indices: Vec<usize>,
    pub val_indices: Vec<usize>,
    pub seed: u64,
    pub ratio: f64,
}

pub const DEFAULT_SPLIT_RATIO: f64 = 0.8;

/// Splits every class so that about `ratio` of its rows land in train.
///
/// Each class keeps at least one row on each side, so every class appears in
/// both halves.
pub fn stratified_split(ds: &EmbeddingDataset, ratio: f64, seed: u64) -> Result<SplitDataset> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidConfig(format!("split ratio {ratio} not in (0, 1)")));
    }
    let mut rng = seeds::rng(seed, seeds::stream::SPLIT);
    let mut train_indices = Vec::new();
    let mut val_indices = Vec::new();
    for (class, mut idx) in ds.class_indices().into_iter().enumerate() {
        if idx.len() < 2 {
            return Err(Error::ClassTooSmall {
                class,
                count: idx.len(),
            });
        }
        idx.shuffle(&mut rng);
        let n_train = ((ratio * idx.len() as f64).round() as usize).clamp(1, idx.len() - 1);
        train_indices.extend_from_slice(&idx[..n_train]);
        val_indices.extend_from_slice(&idx[n_train..]);
    }
    train_indices.sort_unstable();
    val_indices.sort_unstable();
    Ok(SplitDataset {
        train: ds.subset(&train_indices)?,
        val: ds.subset(&val_indices)?,
        train_indices,
        val_indices,
        seed,
        ratio,
    })
}

/// Path helper used by callers that accept either format.
pub fn load_auto(path: &Path) -> Result<EmbeddingDataset> {
    load_dataset(path, Format::infer(path))
}

pub fn save_auto(ds: &EmbeddingDataset, path: &Path) -> Result<PathBuf> {
    save_dataset(ds, path, Format::infer(path))?;
    Ok(path.to_path_buf())
}
