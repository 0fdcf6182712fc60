//! Per-dataset summary statistics (graph count, node counts, density, diameter).

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{graph_diameter, GraphDataset};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetStats {
    pub name: String,
    pub graphs: usize,
    pub nodes_min: usize,
    pub nodes_max: usize,
    pub nodes_mean: f64,
    /// Lower-middle element for even graph counts.
    pub nodes_median: usize,
    pub density_min: f64,
    pub density_max: f64,
    pub diameter_min: usize,
    pub diameter_max: usize,
    pub classes: usize,
}

pub fn dataset_stats(ds: &GraphDataset) -> Result<DatasetStats> {
    if ds.is_empty() {
        return Err(Error::Contract("statistics of an empty dataset".into()));
    }
    let mut nodes: Vec<usize> = ds.graphs().iter().map(|g| g.n()).collect();
    nodes.sort_unstable();
    let (mut dmin, mut dmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut diam_min, mut diam_max) = (usize::MAX, 0);
    let mut classes = BTreeSet::new();
    for (g, label) in ds.iter() {
        let d = g.density();
        dmin = dmin.min(d);
        dmax = dmax.max(d);
        let diam = graph_diameter(g);
        diam_min = diam_min.min(diam);
        diam_max = diam_max.max(diam);
        classes.insert(label);
    }
    Ok(DatasetStats {
        name: ds.name().to_owned(),
        graphs: ds.len(),
        nodes_min: nodes[0],
        nodes_max: nodes[nodes.len() - 1],
        nodes_mean: nodes.iter().sum::<usize>() as f64 / nodes.len() as f64,
        nodes_median: nodes[(nodes.len() - 1) / 2],
        density_min: dmin,
        density_max: dmax,
        diameter_min: diam_min,
        diameter_max: diam_max,
        classes: classes.len(),
    })
}

impl fmt::Display for DatasetStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "| Dataset | Graphs | Nodes min | Nodes max | Nodes mean | Nodes median | Density min | Density max | Diameter min | Diameter max | Classes |"
        )?;
        writeln!(f, "|---|---|---|---|---|---|---|---|---|---|---|")?;
        writeln!(
            f,
            "| {} | {} | {} | {} | {:.2} | {} | {:.3} | {:.3} | {} | {} | {} |",
            self.name,
            self.graphs,
            self.nodes_min,
            self.nodes_max,
            self.nodes_mean,
            self.nodes_median,
            self.density_min,
            self.density_max,
            self.diameter_min,
            self.diameter_max,
            self.classes
        )
    }
}
