//! File-based pipeline stages: ingest, featurize, train, predict, evaluate
//! and graph export. Every output directory or file gets a provenance record
//! carrying the config digest and the digests of its inputs.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::{ConfigError, PipelineConfig};
use crate::dataset::{
    featurize_pairs, ingest as ingest_records, read_dataset_dir, read_raw_tsv, split, write_dataset_dir,
    DatasetError, FeaturizeOptions, ReceptorResolver, Subset, DATASET_FILE,
};
use crate::eval::{evaluate as evaluate_metrics, EvalError, EvalReport};
use crate::export::{write_fingerprint_binary, write_fingerprint_csv, write_graph_line, ExportError, FeatureNames, GraphLine};
use crate::gbdt::{train as train_gbdt, GbdtError, GbdtModel, Matrix, TrainReport};
use crate::ligand::{edge_feature_names, ligand_graph_features, node_feature_names};
use crate::protein::{receptor_graph_features, receptor_node_feature_names, ProteinError, ResiduePropertyTable};

pub const FEATURES_FILE: &str = "features.csv";
pub const FINGERPRINTS_CSV: &str = "fingerprints.csv";
pub const FINGERPRINTS_BIN: &str = "fingerprints.afsf";
pub const PROVENANCE_FILE: &str = "provenance.json";
pub const CONFIG_ECHO: &str = "config.toml";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Data(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl PipelineError {
    /// 1 for configuration problems, 2 for bad or missing data, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 1,
            PipelineError::Io { .. } | PipelineError::Data(_) => 2,
            PipelineError::Internal(_) => 3,
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        PipelineError::Io { path: path.display().to_string(), source }
    }
}

impl From<DatasetError> for PipelineError {
    fn from(e: DatasetError) -> Self {
        match e {
            DatasetError::Io { path, source } => PipelineError::Io { path, source },
            other => PipelineError::Data(other.to_string()),
        }
    }
}

impl From<GbdtError> for PipelineError {
    fn from(e: GbdtError) -> Self {
        match e {
            GbdtError::InvalidParams(_) => PipelineError::Config(ConfigError::Invalid(e.to_string())),
            other => PipelineError::Data(other.to_string()),
        }
    }
}

impl From<EvalError> for PipelineError {
    fn from(e: EvalError) -> Self {
        PipelineError::Data(e.to_string())
    }
}

impl From<ExportError> for PipelineError {
    fn from(e: ExportError) -> Self {
        match e {
            ExportError::Io(source) => PipelineError::Io { path: "<export>".into(), source },
            other => PipelineError::Internal(other.to_string()),
        }
    }
}

impl From<ProteinError> for PipelineError {
    fn from(e: ProteinError) -> Self {
        PipelineError::Data(e.to_string())
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, PipelineError> {
    std::fs::read(path).map_err(|e| PipelineError::io(path, e))
}

fn read_text(path: &Path) -> Result<String, PipelineError> {
    String::from_utf8(read_bytes(path)?).map_err(|_| PipelineError::Data(format!("{}: not UTF-8", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), PipelineError> {
    std::fs::write(path, text).map_err(|e| PipelineError::io(path, e))
}

fn create_dir(dir: &Path) -> Result<(), PipelineError> {
    std::fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn file_digest(path: &Path) -> Result<String, PipelineError> {
    Ok(sha256_hex(&read_bytes(path)?))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), PipelineError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| PipelineError::Internal(e.to_string()))?;
    text.push('\n');
    write_text(path, &text)
}

/// Sidecar for single-file outputs: `<file>.provenance.json`.
fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".provenance.json");
    PathBuf::from(s)
}

fn property_table(cfg: &PipelineConfig) -> Result<ResiduePropertyTable, PipelineError> {
    match &cfg.paths.property_table {
        Some(p) => ResiduePropertyTable::from_path(p).map_err(|e| PipelineError::Config(ConfigError::Invalid(e.to_string()))),
        None => Ok(ResiduePropertyTable::builtin().clone()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestSummary {
    pub records: usize,
    pub dropped: usize,
    pub split_counts: [usize; 3],
}

/// Reads the raw TSV, curates, splits and writes the dataset directory.
pub fn ingest(input: &Path, out_dir: &Path, cfg: &PipelineConfig) -> Result<IngestSummary, PipelineError> {
    let bytes = read_bytes(input)?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| PipelineError::Data(format!("{}: not UTF-8", input.display())))?;
    let (raw, malformed) = read_raw_tsv(&text).map_err(|e| PipelineError::Data(format!("{}: {e}", input.display())))?;
    let base = input.parent().unwrap_or(Path::new("."));
    let d = ingest_records(&raw, cfg.ki_bounds(), &mut ReceptorResolver::new(base))?;
    // too few records to split: keep them unassigned so `--subset all` still works
    let mut d = if d.len() < 3 {
        log::warn!("{} records is too few to split; all are left unassigned", d.len());
        d
    } else {
        split(d, cfg.seed, cfg.ratios)?
    };
    let p = &mut d.provenance;
    if !malformed.is_empty() {
        p.dropped.insert("malformed_row".into(), malformed.len());
        p.input_rows += malformed.len();
    }
    p.source_sha256 = Some(sha256_hex(&bytes));
    p.config_sha256 = Some(cfg.digest());
    write_dataset_dir(out_dir, &d, cfg.histogram_bin_width)?;
    write_text(&out_dir.join(CONFIG_ECHO), &cfg.to_toml())?;
    Ok(IngestSummary {
        records: d.len(),
        dropped: d.provenance.dropped.values().sum(),
        split_counts: d.provenance.split_counts.unwrap_or_default(),
    })
}

#[derive(Serialize)]
struct FeaturizeProvenance<'a> {
    dataset_sha256: String,
    config_sha256: String,
    subset: &'a str,
    rows: usize,
    columns: usize,
    descriptor_columns: usize,
    fingerprint_radius: u32,
    fingerprint_nbits: u32,
}

/// Writes `features.csv` (header `id,log_ki,<labels>`), the fingerprint
/// exports and provenance for one subset of a curated dataset.
pub fn featurize(dataset_dir: &Path, subset: &str, out_dir: &Path, cfg: &PipelineConfig) -> Result<usize, PipelineError> {
    let which: Subset = subset.parse().map_err(PipelineError::Data)?;
    let d = read_dataset_dir(dataset_dir)?;
    let table = property_table(cfg)?;
    let opts = FeaturizeOptions { radius: cfg.fingerprint.radius, nbits: cfg.fingerprint.nbits, workers: cfg.workers };
    let fm = featurize_pairs(&d, which, &table, opts)?;
    create_dir(out_dir)?;

    let path = out_dir.join(FEATURES_FILE);
    let file = std::fs::File::create(&path).map_err(|e| PipelineError::io(&path, e))?;
    let mut w = BufWriter::new(file);
    let mut line = String::from("id,log_ki");
    for l in &fm.labels {
        line.push(',');
        line.push_str(l);
    }
    let io = |e| PipelineError::io(&path, e);
    writeln!(w, "{line}").map_err(io)?;
    for (i, row) in fm.x.rows().enumerate() {
        line.clear();
        write!(line, "{},{}", fm.ids[i], fm.y[i]).unwrap();
        for v in row {
            if *v == 0.0 {
                line.push_str(",0");
            } else if *v == 1.0 {
                line.push_str(",1");
            } else {
                write!(line, ",{v}").unwrap();
            }
        }
        writeln!(w, "{line}").map_err(io)?;
    }
    w.flush().map_err(io)?;

    let named: Vec<(String, _)> = fm.ids.iter().cloned().zip(fm.fingerprints.iter().cloned()).collect();
    let mut csv = Vec::new();
    write_fingerprint_csv(&mut csv, &named)?;
    std::fs::write(out_dir.join(FINGERPRINTS_CSV), csv).map_err(|e| PipelineError::io(&out_dir.join(FINGERPRINTS_CSV), e))?;
    let mut bin = Vec::new();
    write_fingerprint_binary(&mut bin, &fm.fingerprints)?;
    std::fs::write(out_dir.join(FINGERPRINTS_BIN), bin).map_err(|e| PipelineError::io(&out_dir.join(FINGERPRINTS_BIN), e))?;

    let desc_cols = fm.labels.len() - cfg.fingerprint.nbits as usize;
    write_json(
        &out_dir.join(PROVENANCE_FILE),
        &FeaturizeProvenance {
            dataset_sha256: file_digest(&dataset_dir.join(DATASET_FILE))?,
            config_sha256: cfg.digest(),
            subset,
            rows: fm.ids.len(),
            columns: fm.labels.len(),
            descriptor_columns: desc_cols,
            fingerprint_radius: cfg.fingerprint.radius,
            fingerprint_nbits: cfg.fingerprint.nbits,
        },
    )?;
    write_text(&out_dir.join(CONFIG_ECHO), &cfg.to_toml())?;
    Ok(fm.ids.len())
}

/// A feature table as read back from `features.csv`.
#[derive(Debug, Clone)]
pub struct FeatureTable {
    pub ids: Vec<String>,
    pub labels: Vec<String>,
    pub x: Matrix,
    pub y: Vec<f64>,
}

fn features_path(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join(FEATURES_FILE)
    } else {
        path.to_path_buf()
    }
}

/// Reads `features.csv`, or the one inside a featurize output directory.
pub fn read_features(path: &Path) -> Result<FeatureTable, PipelineError> {
    let path = features_path(path);
    let text = read_text(&path)?;
    let bad = |line: usize, msg: String| PipelineError::Data(format!("{}:{line}: {msg}", path.display()));
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
    if header.len() < 2 || header[0] != "id" || header[1] != "log_ki" {
        return Err(bad(1, "expected header starting with id,log_ki".into()));
    }
    let labels: Vec<String> = header[2..].iter().map(|s| s.to_string()).collect();
    let (mut ids, mut y, mut data) = (Vec::new(), Vec::new(), Vec::new());
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        ids.push(fields.next().unwrap_or("").to_string());
        let parse = |s: &str| s.parse::<f64>().map_err(|_| bad(i + 2, format!("bad number {s:?}")));
        y.push(parse(fields.next().unwrap_or(""))?);
        let before = data.len();
        for f in fields {
            data.push(parse(f)?);
        }
        if data.len() - before != labels.len() {
            return Err(bad(i + 2, format!("expected {} features, found {}", labels.len(), data.len() - before)));
        }
    }
    let x = Matrix::new(ids.len(), labels.len(), data)?;
    Ok(FeatureTable { ids, labels, x, y })
}

#[derive(Serialize)]
struct TrainProvenance<'a> {
    config_sha256: String,
    train_features_sha256: String,
    valid_features_sha256: Option<String>,
    model_sha256: String,
    report: &'a TrainReport,
}

pub fn train(train_dir: &Path, valid_dir: Option<&Path>, model_out: &Path, cfg: &PipelineConfig) -> Result<TrainReport, PipelineError> {
    let t = read_features(train_dir)?;
    let v = valid_dir.map(read_features).transpose()?;
    if let Some(v) = &v {
        if v.labels != t.labels {
            return Err(PipelineError::Data(format!(
                "validation features have {} columns that do not match the {} training columns",
                v.labels.len(),
                t.labels.len()
            )));
        }
    }
    let (model, report) = train_gbdt(&t.x, &t.y, v.as_ref().map(|v| (&v.x, v.y.as_slice())), &cfg.gbdt)?;
    if report.degenerate {
        log::warn!("all training targets are equal; the model is a constant");
    }
    if let Some(parent) = model_out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    model.save(model_out).map_err(|e| PipelineError::Io {
        path: model_out.display().to_string(),
        source: std::io::Error::other(e.to_string()),
    })?;
    write_json(
        &sidecar(model_out),
        &TrainProvenance {
            config_sha256: cfg.digest(),
            train_features_sha256: file_digest(&features_path(train_dir))?,
            valid_features_sha256: valid_dir.map(|p| file_digest(&features_path(p))).transpose()?,
            model_sha256: file_digest(model_out)?,
            report: &report,
        },
    )?;
    Ok(report)
}

fn load_model(path: &Path) -> Result<GbdtModel, PipelineError> {
    let text = read_text(path)?;
    Ok(GbdtModel::from_json(&text)?)
}

/// Writes `id,prediction` rows for every row of a feature table.
pub fn predict(model_path: &Path, features: &Path, out: &Path, cfg: &PipelineConfig) -> Result<usize, PipelineError> {
    let model = load_model(model_path)?;
    let t = read_features(features)?;
    let preds = model.predict_batch(&t.x)?;
    let mut text = String::from("id,prediction\n");
    for (id, p) in t.ids.iter().zip(&preds) {
        writeln!(text, "{id},{p}").unwrap();
    }
    write_text(out, &text)?;
    write_json(
        &sidecar(out),
        &serde_json::json!({
            "config_sha256": cfg.digest(),
            "model_sha256": file_digest(model_path)?,
            "features_sha256": file_digest(&features_path(features))?,
        }),
    )?;
    Ok(preds.len())
}

/// First two columns of a CSV: id and value. Reads prediction files and feature tables alike.
fn read_id_values(path: &Path) -> Result<Vec<(String, f64)>, PipelineError> {
    let path = features_path(path);
    let text = read_text(&path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.is_empty() {
            continue;
        }
        let mut f = line.splitn(3, ',');
        let id = f.next().unwrap_or("").to_string();
        let v = f.next().unwrap_or("");
        let v: f64 = v
            .parse()
            .map_err(|_| PipelineError::Data(format!("{}:{}: bad value {v:?}", path.display(), i + 1)))?;
        out.push((id, v));
    }
    Ok(out)
}

/// Scores predictions against truth, pairing rows by id. Writes the JSON
/// report to `out` and plot-ready bins next to it with a `.csv` extension.
pub fn evaluate(pred: &Path, truth: &Path, out: &Path, cfg: &PipelineConfig) -> Result<EvalReport, PipelineError> {
    let p = read_id_values(pred)?;
    let t = read_id_values(truth)?;
    let lookup: std::collections::HashMap<&str, f64> = p.iter().map(|(id, v)| (id.as_str(), *v)).collect();
    if lookup.len() != p.len() {
        return Err(PipelineError::Data(format!("{}: duplicate ids", pred.display())));
    }
    let mut pv = Vec::with_capacity(t.len());
    let mut tv = Vec::with_capacity(t.len());
    for (id, v) in &t {
        let Some(&x) = lookup.get(id.as_str()) else {
            return Err(PipelineError::Data(format!("no prediction for id {id}")));
        };
        pv.push(x);
        tv.push(*v);
    }
    if pv.len() != p.len() {
        return Err(PipelineError::Data(format!("{} predictions but {} truth rows", p.len(), t.len())));
    }
    let report = evaluate_metrics(&pv, &tv, &cfg.evaluation.bin_edges, cfg.evaluation.threshold)?;
    let mut json = serde_json::to_value(&report).map_err(|e| PipelineError::Internal(e.to_string()))?;
    json["config_sha256"] = cfg.digest().into();
    write_json(out, &json)?;
    let mut csv_path = out.with_extension("csv");
    if csv_path == out {
        csv_path = out.with_extension("bins.csv");
    }
    write_text(&csv_path, &report.to_csv())?;
    Ok(report)
}

/// Receptor graph file written next to the ligand graph file.
pub fn receptor_graph_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.receptors.jsonl"))
}

/// One ligand graph line per record (id = pair key) at `out`, and one line
/// per distinct receptor at [`receptor_graph_path`]. Returns the ligand line count.
pub fn export_graphs(dataset_dir: &Path, out: &Path, cfg: &PipelineConfig) -> Result<usize, PipelineError> {
    let d = read_dataset_dir(dataset_dir)?;
    let table = property_table(cfg)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    let ligand_names = FeatureNames { node: node_feature_names(), edge: edge_feature_names() };
    let mut lig = Vec::new();
    for r in &d.records {
        let g = ligand_graph_features(&r.ligand).map_err(|e| PipelineError::Data(format!("record {}: {e}", r.pair_key)))?;
        write_graph_line(
            &mut lig,
            &GraphLine {
                id: r.pair_key.to_string(),
                node_features: g.node_features,
                edge_list: g.edge_list,
                edge_features: g.edge_features,
                feature_names: ligand_names.clone(),
            },
        )?;
    }
    std::fs::write(out, lig).map_err(|e| PipelineError::io(out, e))?;

    let receptor_names = FeatureNames { node: receptor_node_feature_names(), edge: Vec::new() };
    let mut seen = HashSet::new();
    let mut rec = Vec::new();
    for r in &d.records {
        if !seen.insert(r.receptor.id().to_string()) {
            continue;
        }
        let g = receptor_graph_features(&table, &r.receptor)?;
        let edges = g.edge_list.len();
        write_graph_line(
            &mut rec,
            &GraphLine {
                id: r.receptor.id().to_string(),
                node_features: g.node_features,
                edge_list: g.edge_list,
                edge_features: vec![Vec::new(); edges],
                feature_names: receptor_names.clone(),
            },
        )?;
    }
    let rpath = receptor_graph_path(out);
    std::fs::write(&rpath, rec).map_err(|e| PipelineError::io(&rpath, e))?;
    write_json(
        &sidecar(out),
        &serde_json::json!({
            "config_sha256": cfg.digest(),
            "dataset_sha256": file_digest(&dataset_dir.join(DATASET_FILE))?,
            "ligand_graphs": d.len(),
            "receptor_graphs": seen.len(),
        }),
    )?;
    Ok(d.len())
}
