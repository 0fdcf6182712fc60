//! Batch featurization: every graph of a dataset mapped to a feature matrix
//! on a pool of workers, written in ascending graph-id order.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::controllability::ControllabilityConfig;
use crate::diagnostics::Diagnostics;
use crate::encoding::{concat_rank_with, metric_columns, one_hot_degree, FeatureMatrix, RankEncodingSpec, Scheme};
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphDataset};
use crate::io::load_dataset;
use crate::metric::MetricKind;

pub const FEATURE_FORMAT_VERSION: u32 = 1;

/// Per-graph math settings, independent of files and threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSettings {
    pub scheme: Scheme,
    pub rank: RankEncodingSpec,
    pub controllability: ControllabilityConfig,
    /// Column (nct-efa) or block (concat-rank) order.
    pub metrics: Vec<MetricKind>,
    /// One-hot degree width; fixed per dataset.
    pub degree_dim: usize,
}

impl FeatureSettings {
    /// Settings for `scheme` with its default metric list.
    pub fn new(scheme: Scheme) -> Self {
        FeatureSettings {
            scheme,
            rank: RankEncodingSpec::default(),
            controllability: ControllabilityConfig::default(),
            metrics: default_metrics(scheme),
            degree_dim: 1,
        }
    }

    pub fn dim(&self) -> usize {
        match self.scheme {
            Scheme::DegOnehot => self.degree_dim,
            Scheme::NctEfa => self.metrics.len(),
            Scheme::AcRank => self.rank.k(),
            Scheme::ConcatRank => self.rank.k() * self.metrics.len(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.metrics.is_empty() {
            return Err(Error::Contract("metric list is empty".into()));
        }
        let fixed = matches!(self.scheme, Scheme::DegOnehot | Scheme::AcRank);
        if fixed && self.metrics != default_metrics(self.scheme) {
            return Err(Error::Contract(format!(
                "scheme {} does not take a metric list",
                self.scheme
            )));
        }
        if self.scheme == Scheme::DegOnehot && self.degree_dim == 0 {
            return Err(Error::Contract("one-hot degree dimension must be at least 1".into()));
        }
        Ok(())
    }
}

pub fn default_metrics(scheme: Scheme) -> Vec<MetricKind> {
    match scheme {
        Scheme::DegOnehot => vec![MetricKind::Degree],
        Scheme::NctEfa => MetricKind::NCT_EFA.to_vec(),
        Scheme::AcRank => vec![MetricKind::AverageControllability],
        Scheme::ConcatRank => MetricKind::CONCAT_DEFAULT.to_vec(),
    }
}

/// Features of a single graph under `settings`.
pub fn featurize_graph(g: &Graph, settings: &FeatureSettings, diag: &mut Diagnostics) -> Result<FeatureMatrix<f64>> {
    let ac = &settings.controllability;
    let out = match settings.scheme {
        Scheme::DegOnehot => one_hot_degree(g, settings.degree_dim, diag),
        Scheme::NctEfa => metric_columns(g, ac, &settings.metrics, diag),
        Scheme::AcRank => concat_rank_with(g, ac, &settings.rank, &settings.metrics, diag).map(|f| {
            let data = f.data().clone();
            FeatureMatrix::new(g.id(), Scheme::AcRank, data).expect("one-hot entries are finite")
        }),
        Scheme::ConcatRank => concat_rank_with(g, ac, &settings.rank, &settings.metrics, diag),
    };
    out.map_err(|e| e.in_graph(g.id()))
}

/// Maps `items` on `threads` workers and hands results to `sink` strictly in
/// index order. Stops early once `sink` fails.
pub fn ordered_parallel_map<I, O, F, S>(items: &[I], threads: usize, work: F, mut sink: S) -> Result<()>
where
    I: Sync,
    O: Send,
    F: Fn(&I) -> O + Sync,
    S: FnMut(usize, O) -> Result<()>,
{
    let threads = threads.max(1).min(items.len().max(1));
    if threads == 1 {
        for (i, item) in items.iter().enumerate() {
            sink(i, work(item))?;
        }
        return Ok(());
    }
    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let (tx, rx) = mpsc::sync_channel::<(usize, O)>(threads * 4);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            let tx = tx.clone();
            let (next, stop, work) = (&next, &stop, &work);
            scope.spawn(move || loop {
                if stop.load(Ordering::Relaxed) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                if tx.send((i, work(&items[i]))).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        let mut pending = BTreeMap::new();
        let mut expected = 0;
        let mut result = Ok(());
        for (i, out) in rx.iter() {
            pending.insert(i, out);
            while let Some(out) = pending.remove(&expected) {
                if let Err(e) = sink(expected, out) {
                    result = Err(e);
                    break;
                }
                expected += 1;
            }
            if result.is_err() {
                break;
            }
        }
        if result.is_err() {
            stop.store(true, Ordering::Relaxed);
            // drain so blocked senders can exit
            for _ in rx.iter() {}
        }
        result
    })
}

/// Metadata line of a feature file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureFileMeta {
    pub format_version: u32,
    pub scheme: Scheme,
    pub dim: usize,
    pub k: usize,
    pub metrics: Vec<MetricKind>,
    pub horizon: f64,
    pub step: f64,
    pub dataset: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct MetaLine<M> {
    meta: M,
}

/// One graph's features as stored in a feature file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRecord {
    pub id: u64,
    pub label: u32,
    pub n: usize,
    pub x: Vec<Vec<f64>>,
}

impl FeatureRecord {
    fn from_matrix(label: u32, f: &FeatureMatrix<f64>) -> Self {
        FeatureRecord {
            id: f.graph_id(),
            label,
            n: f.rows(),
            x: (0..f.rows()).map(|v| f.row(v)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureFile {
    pub meta: FeatureFileMeta,
    pub records: Vec<FeatureRecord>,
}

/// Writes the metadata line followed by records.
pub struct FeatureWriter<W: Write> {
    out: W,
}

impl<W: Write> FeatureWriter<W> {
    pub fn new(mut out: W, meta: &FeatureFileMeta) -> std::io::Result<Self> {
        serde_json::to_writer(&mut out, &MetaLine { meta })?;
        out.write_all(b"\n")?;
        Ok(FeatureWriter { out })
    }

    pub fn write(&mut self, record: &FeatureRecord) -> std::io::Result<()> {
        serde_json::to_writer(&mut self.out, record)?;
        self.out.write_all(b"\n")
    }

    pub fn finish(mut self) -> std::io::Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

/// Parses a feature file, checking every record against the metadata.
pub fn read_feature_file(path: &Path) -> Result<FeatureFile> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::parse(path, "empty feature file"))?
        .map_err(|e| Error::io(path, e))?;
    let meta: MetaLine<FeatureFileMeta> =
        serde_json::from_str(&first).map_err(|e| Error::parse(path, format!("line 1: {e}")))?;
    let meta = meta.meta;
    if meta.format_version != FEATURE_FORMAT_VERSION {
        return Err(Error::parse(path, format!("unsupported format version {}", meta.format_version)));
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let rec: FeatureRecord =
            serde_json::from_str(&line).map_err(|e| Error::parse(path, format!("line {}: {e}", i + 2)))?;
        if rec.x.len() != rec.n || rec.x.iter().any(|row| row.len() != meta.dim) {
            return Err(Error::parse(
                path,
                format!("graph {}: rows do not match n = {} and dim = {}", rec.id, rec.n, meta.dim),
            ));
        }
        records.push(rec);
    }
    Ok(FeatureFile { meta, records })
}

/// Everything `featurize` needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeaturizeConfig {
    pub dataset: PathBuf,
    pub out: PathBuf,
    pub scheme: Scheme,
    pub rank: RankEncodingSpec,
    pub controllability: ControllabilityConfig,
    /// `None` selects the scheme's default list.
    pub metrics: Option<Vec<MetricKind>>,
    /// Per-dataset z-score of raw (nct-efa) columns.
    pub standardize: bool,
    pub threads: usize,
    pub skip_errors: bool,
}

impl FeaturizeConfig {
    pub fn new(dataset: impl Into<PathBuf>, out: impl Into<PathBuf>, scheme: Scheme) -> Self {
        FeaturizeConfig {
            dataset: dataset.into(),
            out: out.into(),
            scheme,
            rank: RankEncodingSpec::default(),
            controllability: ControllabilityConfig::default(),
            metrics: None,
            standardize: false,
            threads: 1,
            skip_errors: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedGraph {
    pub id: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// Outcome of a featurization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub dim: usize,
    pub graphs_written: usize,
    pub skipped: Vec<SkippedGraph>,
    pub diagnostics: Diagnostics,
    pub standardization: Option<Standardization>,
}

/// Sidecar written next to the feature file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub code_version: String,
    pub config: FeaturizeConfig,
    pub settings: FeatureSettings,
    pub dataset: String,
    pub wall_time_secs: f64,
    #[serde(flatten)]
    pub summary: RunSummary,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn zscore(records: &mut [(u32, FeatureMatrix<f64>)], dim: usize) -> Standardization {
    let mut count = 0usize;
    let mut sum = vec![0.0; dim];
    for (_, f) in records.iter() {
        count += f.rows();
        for (c, col) in f.data().column_iter().enumerate() {
            sum[c] += col.sum();
        }
    }
    let mean: Vec<f64> = sum.iter().map(|s| s / count.max(1) as f64).collect();
    let mut sq = vec![0.0; dim];
    for (_, f) in records.iter() {
        for (c, col) in f.data().column_iter().enumerate() {
            sq[c] += col.iter().map(|x| (x - mean[c]).powi(2)).sum::<f64>();
        }
    }
    let std: Vec<f64> = sq.iter().map(|s| (s / count.max(1) as f64).sqrt()).collect();
    for (_, f) in records.iter_mut() {
        let data: &mut DMatrix<f64> = f.data_mut();
        for (c, mut col) in data.column_iter_mut().enumerate() {
            let scale = if std[c] > 0.0 { std[c] } else { 1.0 };
            col.apply(|x| *x = (*x - mean[c]) / scale);
        }
    }
    Standardization { mean, std }
}

/// Featurizes `ds` and streams records to `out` in ascending id order.
///
/// Output bytes depend only on the dataset and `settings`, never on `threads`.
pub fn featurize_dataset<W: Write>(
    ds: &GraphDataset,
    settings: &FeatureSettings,
    threads: usize,
    skip_errors: bool,
    standardize: bool,
    out: W,
) -> Result<RunSummary> {
    settings.validate()?;
    if standardize && settings.scheme.is_one_hot() {
        return Err(Error::Contract("standardization applies to nct-efa features only".into()));
    }
    let dim = settings.dim();
    let meta = FeatureFileMeta {
        format_version: FEATURE_FORMAT_VERSION,
        scheme: settings.scheme,
        dim,
        k: settings.rank.k(),
        metrics: settings.metrics.clone(),
        horizon: settings.controllability.horizon.end(),
        step: settings.controllability.horizon.step(),
        dataset: ds.name().to_owned(),
    };
    let io_err = |e| Error::io("<feature output>", e);
    let mut writer = FeatureWriter::new(out, &meta).map_err(io_err)?;

    let mut diagnostics = Diagnostics::default();
    let mut skipped = Vec::new();
    let mut kept: Vec<(u32, FeatureMatrix<f64>)> = Vec::new();
    let mut written = 0usize;
    let graphs = ds.graphs();
    ordered_parallel_map(
        graphs,
        threads,
        |g| {
            let mut d = Diagnostics::default();
            let r = featurize_graph(g, settings, &mut d);
            (r, d)
        },
        |i, (result, d)| {
            diagnostics.merge(&d);
            let g = &graphs[i];
            match result {
                Ok(f) => {
                    debug_assert_eq!(f.dim(), dim);
                    let label = ds.label(g.id()).expect("dataset graphs are labelled");
                    if standardize {
                        kept.push((label, f));
                    } else {
                        writer.write(&FeatureRecord::from_matrix(label, &f)).map_err(io_err)?;
                        written += 1;
                    }
                    Ok(())
                }
                Err(e) if skip_errors => {
                    log::warn!("skipping graph {}: {e}", g.id());
                    skipped.push(SkippedGraph { id: g.id(), error: e.to_string() });
                    Ok(())
                }
                Err(e) => Err(e),
            }
        },
    )?;

    let standardization = if standardize {
        let s = zscore(&mut kept, dim);
        for (label, f) in &kept {
            writer.write(&FeatureRecord::from_matrix(*label, f)).map_err(io_err)?;
        }
        written = kept.len();
        Some(s)
    } else {
        None
    };
    writer.finish().map_err(io_err)?;
    Ok(RunSummary {
        dim,
        graphs_written: written,
        skipped,
        diagnostics,
        standardization,
    })
}

/// Loads the dataset, featurizes it, and writes the feature file plus its manifest.
pub fn run_featurize(cfg: &FeaturizeConfig) -> Result<RunManifest> {
    if cfg.threads == 0 {
        return Err(Error::Contract("worker count must be at least 1".into()));
    }
    let start = Instant::now();
    let ingested = load_dataset(&cfg.dataset)?;
    let ds = &ingested.dataset;
    let mut settings = FeatureSettings::new(cfg.scheme);
    settings.rank = cfg.rank;
    settings.controllability = cfg.controllability;
    if let Some(m) = &cfg.metrics {
        settings.metrics = m.clone();
    }
    settings.degree_dim = ds.max_degree() + 1;

    let file = File::create(&cfg.out).map_err(|e| Error::io(&cfg.out, e))?;
    let mut summary = featurize_dataset(ds, &settings, cfg.threads, cfg.skip_errors, cfg.standardize, BufWriter::new(file))?;
    let mut diagnostics = ingested.diagnostics.clone();
    diagnostics.merge(&summary.diagnostics);
    summary.diagnostics = diagnostics;
    if !summary.diagnostics.is_clean() {
        log::info!("diagnostics: {:?}", summary.diagnostics);
    }

    let manifest = RunManifest {
        code_version: env!("CARGO_PKG_VERSION").to_owned(),
        config: cfg.clone(),
        settings,
        dataset: ds.name().to_owned(),
        wall_time_secs: start.elapsed().as_secs_f64(),
        summary,
    };
    let mpath = manifest_path(&cfg.out);
    let mfile = File::create(&mpath).map_err(|e| Error::io(&mpath, e))?;
    serde_json::to_writer_pretty(BufWriter::new(mfile), &manifest)
        .map_err(|e| Error::io(&mpath, std::io::Error::other(e)))?;
    Ok(manifest)
}
