//! Dataset ingestion from the public edge-JSON / label-CSV layout, and the
//! canonical one-graph-per-line serialization.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::Diagnostics;
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphDataset};

pub const DATASET_FORMAT_VERSION: u32 = 1;

/// A dataset together with what ingestion had to repair.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub dataset: GraphDataset,
    pub diagnostics: Diagnostics,
    /// Graphs whose node ids were compacted, with the original ids in ascending order.
    pub remapped: BTreeMap<u64, Vec<u64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MetaLine {
    meta: DatasetMeta,
}

#[derive(Debug, Serialize, Deserialize)]
struct DatasetMeta {
    format_version: u32,
    name: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphRecord {
    id: u64,
    n: usize,
    edges: Vec<[usize; 2]>,
    label: u32,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

/// Reads the raw edge JSON (`{"<graph id>": [[u, v], ...], ...}`) and the
/// `id,target` label CSV.
///
/// Self-loops and duplicate edges are dropped. Graphs whose referenced node
/// ids are not exactly `0..=max` are compacted to `0..n` in ascending
/// original order.
pub fn ingest_dataset(edges_path: &Path, labels_path: &Path, name: &str) -> Result<Ingested> {
    let raw: BTreeMap<String, Vec<[i64; 2]>> = serde_json::from_reader(open(edges_path)?)
        .map_err(|e| Error::parse(edges_path, e.to_string()))?;
    let labels = read_labels(labels_path)?;

    let mut diagnostics = Diagnostics::default();
    let mut remapped = BTreeMap::new();
    let mut graphs = Vec::with_capacity(raw.len());
    for (key, pairs) in raw {
        let id: u64 = key
            .trim()
            .parse()
            .map_err(|_| Error::parse(edges_path, format!("graph id {key:?} is not a non-negative integer")))?;
        let mut nodes = Vec::with_capacity(pairs.len() * 2);
        for &[u, v] in &pairs {
            if u < 0 || v < 0 {
                return Err(Error::parse(
                    edges_path,
                    format!("graph {id}: negative node id in edge [{u}, {v}]"),
                ));
            }
            nodes.push(u as u64);
            nodes.push(v as u64);
        }
        nodes.sort_unstable();
        nodes.dedup();
        let Some(&max) = nodes.last() else {
            return Err(Error::Integrity(format!("graph {id} has no edges and no nodes")));
        };
        let n = nodes.len();
        let edges: Vec<(usize, usize)> = if max as usize + 1 == n {
            pairs.iter().map(|&[u, v]| (u as usize, v as usize)).collect()
        } else {
            let index = |x: i64| nodes.binary_search(&(x as u64)).expect("node collected above");
            let edges = pairs.iter().map(|&[u, v]| (index(u), index(v))).collect();
            diagnostics.graphs_remapped += 1;
            remapped.insert(id, nodes.clone());
            edges
        };
        graphs.push(Graph::build(id, n, edges, &mut diagnostics)?);
    }
    diagnostics.orphan_labels = labels
        .keys()
        .filter(|id| graphs.binary_search_by_key(*id, Graph::id).is_err())
        .count() as u64;

    let dataset = GraphDataset::new(name, graphs, labels)?;
    Ok(Ingested {
        dataset,
        diagnostics,
        remapped,
    })
}

fn read_labels(path: &Path) -> Result<BTreeMap<u64, u32>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(open(path)?);
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(path, e.to_string()))?
        .clone();
    if headers.len() != 2 || &headers[0] != "id" || &headers[1] != "target" {
        return Err(Error::parse(path, format!("expected header `id,target`, found `{}`", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut labels = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::parse(path, e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let id: u64 = record[0]
            .parse()
            .map_err(|_| Error::parse(path, format!("line {line}: bad graph id {:?}", &record[0])))?;
        let target: u32 = record[1]
            .parse()
            .map_err(|_| Error::parse(path, format!("line {line}: bad label {:?}", &record[1])))?;
        if labels.insert(id, target).is_some() {
            return Err(Error::Integrity(format!("graph {id} is labelled twice (line {line})")));
        }
    }
    Ok(labels)
}

/// Writes the canonical serialization: a metadata line, then one JSON object per graph.
pub fn write_dataset<W: Write>(ds: &GraphDataset, out: W) -> Result<()> {
    write_dataset_inner(ds, out).map_err(|e| Error::io("<dataset output>", e))
}

fn write_dataset_inner<W: Write>(ds: &GraphDataset, out: W) -> std::io::Result<()> {
    let mut out = BufWriter::new(out);
    let meta = MetaLine {
        meta: DatasetMeta {
            format_version: DATASET_FORMAT_VERSION,
            name: ds.name().to_owned(),
        },
    };
    serde_json::to_writer(&mut out, &meta)?;
    out.write_all(b"\n")?;
    for (g, label) in ds.iter() {
        let record = GraphRecord {
            id: g.id(),
            n: g.n(),
            edges: g.edges().iter().map(|&(u, v)| [u, v]).collect(),
            label,
        };
        serde_json::to_writer(&mut out, &record)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn save_dataset(ds: &GraphDataset, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_dataset_inner(ds, file).map_err(|e| Error::io(path, e))
}

/// Reads the canonical serialization produced by [`write_dataset`].
pub fn read_dataset<R: BufRead>(input: R, path: &Path) -> Result<Ingested> {
    let mut lines = input.lines().enumerate();
    let (_, first) = lines
        .next()
        .ok_or_else(|| Error::parse(path, "empty dataset file"))?;
    let first = first.map_err(|e| Error::io(path, e))?;
    let meta: MetaLine = serde_json::from_str(&first)
        .map_err(|e| Error::parse(path, format!("line 1: bad metadata line: {e}")))?;
    if meta.meta.format_version != DATASET_FORMAT_VERSION {
        return Err(Error::parse(
            path,
            format!("unsupported dataset format version {}", meta.meta.format_version),
        ));
    }

    let mut diagnostics = Diagnostics::default();
    let mut graphs = Vec::new();
    let mut labels = BTreeMap::new();
    for (idx, line) in lines {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: GraphRecord = serde_json::from_str(&line)
            .map_err(|e| Error::parse(path, format!("line {}: {e}", idx + 1)))?;
        let edges = record.edges.iter().map(|&[u, v]| (u, v));
        graphs.push(Graph::build(record.id, record.n, edges, &mut diagnostics)?);
        if labels.insert(record.id, record.label).is_some() {
            return Err(Error::Integrity(format!("graph {} appears twice", record.id)));
        }
    }
    Ok(Ingested {
        dataset: GraphDataset::new(meta.meta.name, graphs, labels)?,
        diagnostics,
        remapped: BTreeMap::new(),
    })
}

/// Loads a dataset from either a canonical file or a directory holding the
/// raw `*_edges.json` / `*_target.csv` pair (named after the directory).
pub fn load_dataset(path: &Path) -> Result<Ingested> {
    if path.is_dir() {
        let (edges, labels) = find_raw_pair(path)?;
        let name = path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".to_owned());
        ingest_dataset(&edges, &labels, &name)
    } else {
        read_dataset(open(path)?, path)
    }
}

fn find_raw_pair(dir: &Path) -> Result<(PathBuf, PathBuf)> {
    let mut edges = Vec::new();
    let mut labels = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let p = entry.map_err(|e| Error::io(dir, e))?.path();
        let fname = p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        if fname.ends_with("edges.json") {
            edges.push(p);
        } else if fname.ends_with("target.csv") {
            labels.push(p);
        }
    }
    match (edges.as_slice(), labels.as_slice()) {
        ([e], [l]) => Ok((e.clone(), l.clone())),
        _ => Err(Error::Integrity(format!(
            "{} must contain exactly one *edges.json and one *target.csv",
            dir.display()
        ))),
    }
}
