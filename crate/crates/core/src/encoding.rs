//! Node feature matrices: one-hot degree, raw metric columns, and histogram
//! rank encoding.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::centrality::{betweenness_centrality, closeness_centrality, degree_vector, eigenvector_centrality_detailed};
use crate::controllability::{average_controllability_with, ControllabilityConfig, Horizon};
use crate::diagnostics::Diagnostics;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metric::{MetricKind, MetricVector};
use crate::scalar::{abs, from_usize, lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    DegOnehot,
    NctEfa,
    AcRank,
    ConcatRank,
}

impl Scheme {
    pub fn code(self) -> &'static str {
        match self {
            Scheme::DegOnehot => "deg-onehot",
            Scheme::NctEfa => "nct-efa",
            Scheme::AcRank => "ac-rank",
            Scheme::ConcatRank => "concat-rank",
        }
    }

    /// One-hot family: every k-wide block of a row holds a single 1.
    pub fn is_one_hot(self) -> bool {
        self != Scheme::NctEfa
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "deg-onehot" | "deg" => Scheme::DegOnehot,
            "nct-efa" => Scheme::NctEfa,
            "ac-rank" | "ac" => Scheme::AcRank,
            "concat-rank" | "concat" => Scheme::ConcatRank,
            other => return Err(Error::Contract(format!("unknown scheme {other:?}"))),
        })
    }
}

/// Histogram rank encoding with `k` bins spanning each graph's own min..max.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankEncodingSpec {
    k: usize,
}

impl Default for RankEncodingSpec {
    fn default() -> Self {
        RankEncodingSpec { k: 10 }
    }
}

impl RankEncodingSpec {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Contract("rank encoding needs at least one bin".into()));
        }
        Ok(RankEncodingSpec { k })
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// Node features of one graph: row `v` belongs to node `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<T: Scalar> {
    graph_id: u64,
    scheme: Scheme,
    data: DMatrix<T>,
}

impl<T: Scalar> FeatureMatrix<T> {
    pub fn new(graph_id: u64, scheme: Scheme, data: DMatrix<T>) -> Result<Self> {
        if let Some(i) = data.iter().position(|&x| !crate::scalar::is_finite(x)) {
            return Err(Error::Numeric(format!(
                "graph {graph_id}: non-finite feature at row {}",
                i % data.nrows().max(1)
            )));
        }
        Ok(FeatureMatrix { graph_id, scheme, data })
    }

    pub fn graph_id(&self) -> u64 {
        self.graph_id
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn dim(&self) -> usize {
        self.data.ncols()
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn data(&self) -> &DMatrix<T> {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut DMatrix<T> {
        &mut self.data
    }

    pub fn row(&self, v: usize) -> Vec<T> {
        self.data.row(v).iter().copied().collect()
    }

    pub fn with_graph_id(mut self, id: u64) -> Self {
        self.graph_id = id;
        self
    }
}

/// One-hot degree rows of width `dim`; degrees `≥ dim` land in the last slot.
pub fn one_hot_degree<T: Scalar>(g: &Graph, dim: usize, diag: &mut Diagnostics) -> Result<FeatureMatrix<T>> {
    if dim == 0 {
        return Err(Error::Contract("one-hot degree dimension must be at least 1".into()));
    }
    let mut data = DMatrix::zeros(g.n(), dim);
    for v in 0..g.n() {
        let d = g.degree(v);
        if d >= dim {
            diag.degrees_clipped += 1;
        }
        data[(v, d.min(dim - 1))] = T::one();
    }
    FeatureMatrix::new(g.id(), Scheme::DegOnehot, data)
}

// Spreads this small relative to the values count as a constant vector.
fn spread_tolerance<T: Scalar>() -> T {
    T::default_epsilon().sqrt()
}

// Bin positions within this distance of an integer boundary snap onto it.
fn boundary_snap<T: Scalar>() -> T {
    T::default_epsilon().powf(lit(1.0 / 3.0))
}

/// Histogram bin of every value: `min(⌊(x - lo) k / (hi - lo)⌋, k - 1)`.
///
/// Bins are half-open with the last one closed at `hi`. A constant vector
/// maps entirely to bin 0. Positions within rounding noise of a bin boundary
/// are snapped onto it, so values that are mathematically equal but computed
/// along different paths share a bin.
pub fn rank_bins<T: Scalar>(values: &[T], k: usize) -> Vec<usize> {
    let Some(&first) = values.first() else {
        return Vec::new();
    };
    let (lo, hi) = values
        .iter()
        .fold((first, first), |(lo, hi), &x| (if x < lo { x } else { lo }, if x > hi { x } else { hi }));
    let scale = abs(lo).max(abs(hi));
    if hi - lo <= spread_tolerance::<T>() * scale || hi == lo {
        return vec![0; values.len()];
    }
    let bins = from_usize::<T>(k);
    let snap = boundary_snap::<T>();
    values
        .iter()
        .map(|&x| {
            let mut pos = (x - lo) * bins / (hi - lo);
            let nearest = pos.round();
            if abs(pos - nearest) <= snap {
                pos = nearest;
            }
            let idx = crate::scalar::to_f64(pos.floor()).max(0.0) as usize;
            idx.min(k - 1)
        })
        .collect()
}

fn one_hot_block<T: Scalar>(bins: &[usize], k: usize) -> DMatrix<T> {
    let mut block = DMatrix::zeros(bins.len(), k);
    for (v, &b) in bins.iter().enumerate() {
        block[(v, b)] = T::one();
    }
    block
}

/// Rank-encodes one metric vector into an `n×k` one-hot matrix.
pub fn rank_encode<T: Scalar>(m: &MetricVector<T>, spec: &RankEncodingSpec) -> Result<FeatureMatrix<T>> {
    let bins = rank_bins(m.values(), spec.k());
    let scheme = if m.kind() == MetricKind::AverageControllability {
        Scheme::AcRank
    } else {
        Scheme::ConcatRank
    };
    FeatureMatrix::new(0, scheme, one_hot_block(&bins, spec.k()))
}

/// Computes one metric for `g`.
///
/// Eigenvector centrality of an edgeless graph falls back to zeros; both that
/// and a repeated leading eigenvalue are counted in `diag`.
pub fn compute_metric<T: Scalar>(
    g: &Graph,
    kind: MetricKind,
    ac: &ControllabilityConfig,
    diag: &mut Diagnostics,
) -> Result<MetricVector<T>> {
    match kind {
        MetricKind::AverageControllability => average_controllability_with(g, ac),
        MetricKind::Degree => Ok(degree_vector(g)),
        MetricKind::Closeness => Ok(closeness_centrality(g)),
        MetricKind::Betweenness => Ok(betweenness_centrality(g)),
        MetricKind::Eigenvector => {
            if g.edge_count() == 0 {
                diag.eigenvector_zero_fallbacks += 1;
                return MetricVector::new(MetricKind::Eigenvector, vec![T::zero(); g.n()]);
            }
            let e = eigenvector_centrality_detailed(g)?;
            if e.tied {
                diag.eigenvector_ties += 1;
            }
            Ok(e.vector)
        }
    }
}

/// Raw metric columns in the given order (no scaling).
pub fn metric_columns<T: Scalar>(
    g: &Graph,
    ac: &ControllabilityConfig,
    metrics: &[MetricKind],
    diag: &mut Diagnostics,
) -> Result<FeatureMatrix<T>> {
    if metrics.is_empty() {
        return Err(Error::Contract("metric list is empty".into()));
    }
    let mut data = DMatrix::zeros(g.n(), metrics.len());
    for (c, &kind) in metrics.iter().enumerate() {
        let m = compute_metric::<T>(g, kind, ac, diag)?;
        data.column_mut(c).copy_from_slice(m.values());
    }
    FeatureMatrix::new(g.id(), Scheme::NctEfa, data)
}

/// `n×4` raw features: average controllability, closeness, betweenness,
/// eigenvector centrality.
pub fn nct_efa_features<T: Scalar>(g: &Graph, horizon: &Horizon) -> Result<FeatureMatrix<T>> {
    let ac = ControllabilityConfig {
        horizon: *horizon,
        ..Default::default()
    };
    metric_columns(g, &ac, &MetricKind::NCT_EFA, &mut Diagnostics::default())
}

/// Rank-encodes each metric and concatenates the blocks in list order.
pub fn concat_rank_with<T: Scalar>(
    g: &Graph,
    ac: &ControllabilityConfig,
    spec: &RankEncodingSpec,
    metrics: &[MetricKind],
    diag: &mut Diagnostics,
) -> Result<FeatureMatrix<T>> {
    if metrics.is_empty() {
        return Err(Error::Contract("metric list is empty".into()));
    }
    let k = spec.k();
    let mut data = DMatrix::zeros(g.n(), k * metrics.len());
    for (b, &kind) in metrics.iter().enumerate() {
        let m = compute_metric::<T>(g, kind, ac, diag)?;
        for (v, bin) in rank_bins(m.values(), k).into_iter().enumerate() {
            data[(v, b * k + bin)] = T::one();
        }
    }
    FeatureMatrix::new(g.id(), Scheme::ConcatRank, data)
}

pub fn concat_rank_features<T: Scalar>(
    g: &Graph,
    horizon: &Horizon,
    spec: &RankEncodingSpec,
    metrics: &[MetricKind],
) -> Result<FeatureMatrix<T>> {
    let ac = ControllabilityConfig {
        horizon: *horizon,
        ..Default::default()
    };
    concat_rank_with(g, &ac, spec, metrics, &mut Diagnostics::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mv(kind: MetricKind, v: &[f64]) -> MetricVector<f64> {
        MetricVector::new(kind, v.to_vec()).unwrap()
    }

    fn rows(f: &FeatureMatrix<f64>) -> Vec<Vec<f64>> {
        (0..f.rows()).map(|v| f.row(v)).collect()
    }

    #[test]
    fn worked_example() {
        let m = mv(MetricKind::AverageControllability, &[0.1, 0.3, 0.5, 0.7, 0.9]);
        let f = rank_encode(&m, &RankEncodingSpec::new(3).unwrap()).unwrap();
        assert_eq!(f.scheme(), Scheme::AcRank);
        assert_eq!(
            rows(&f),
            vec![
                vec![1., 0., 0.],
                vec![1., 0., 0.],
                vec![0., 1., 0.],
                vec![0., 0., 1.],
                vec![0., 0., 1.]
            ]
        );
    }

    #[test]
    fn constant_vector_goes_to_first_bin() {
        let f = rank_encode(&mv(MetricKind::Degree, &[5., 5., 5.]), &RankEncodingSpec::default()).unwrap();
        for v in 0..3 {
            assert_eq!(f.row(v)[0], 1.0);
            assert_eq!(f.row(v).iter().sum::<f64>(), 1.0);
        }
    }

    #[test]
    fn rounding_noise_counts_as_constant() {
        let bins = rank_bins(&[2.0, 2.0 + 4e-16, 2.0 - 4e-16], 10);
        assert_eq!(bins, vec![0, 0, 0]);
    }

    #[test]
    fn boundary_values_are_stable_under_noise() {
        // 0.5 sits on the boundary between bins 0 and 1 for k = 2
        let exact = rank_bins(&[0.0, 0.5, 1.0], 2);
        let noisy = rank_bins(&[0.0, 0.5 - 1e-15, 1.0], 2);
        assert_eq!(exact, vec![0, 1, 1]);
        assert_eq!(noisy, exact);
    }

    #[test]
    fn histogram_is_column_sums() {
        let vals = [0.0, 0.05, 0.2, 0.21, 0.5, 0.99, 1.0];
        let f = rank_encode(&mv(MetricKind::Closeness, &vals), &RankEncodingSpec::new(4).unwrap()).unwrap();
        let sums: Vec<f64> = f.data().column_iter().map(|c| c.sum()).collect();
        assert_eq!(sums, vec![4., 0., 1., 2.]);
    }

    #[test]
    fn k_zero_rejected() {
        assert!(matches!(RankEncodingSpec::new(0), Err(Error::Contract(_))));
    }

    #[test]
    fn one_hot_degree_cases() {
        let mut d = Diagnostics::default();
        let p3 = Graph::new(0, 3, [(0, 1), (1, 2)]).unwrap();
        let f = one_hot_degree::<f64>(&p3, 3, &mut d).unwrap();
        assert_eq!(rows(&f), vec![vec![0., 1., 0.], vec![0., 0., 1.], vec![0., 1., 0.]]);
        let f = one_hot_degree::<f64>(&p3, 4, &mut d).unwrap();
        assert_eq!(f.row(1), vec![0., 0., 1., 0.]);
        let empty = Graph::new(0, 2, []).unwrap();
        let f = one_hot_degree::<f64>(&empty, 3, &mut d).unwrap();
        assert_eq!(rows(&f), vec![vec![1., 0., 0.]; 2]);
        assert!(d.is_clean());
        let f = one_hot_degree::<f64>(&p3, 2, &mut d).unwrap();
        assert_eq!(f.row(1), vec![0., 1.]);
        assert_eq!(d.degrees_clipped, 1);
        assert!(matches!(one_hot_degree::<f64>(&p3, 0, &mut d), Err(Error::Contract(_))));
    }

    #[test]
    fn nct_efa_k2() {
        let k2 = Graph::new(0, 2, [(0, 1)]).unwrap();
        let f = nct_efa_features::<f64>(&k2, &Horizon::default()).unwrap();
        assert_eq!(f.dim(), 4);
        for v in 0..2 {
            let r = f.row(v);
            assert!((r[0] - 1.813430).abs() < 1e-5);
            assert_eq!(r[1], 1.0);
            assert_eq!(r[2], 0.0);
            assert_relative_eq!(r[3], 0.5f64.sqrt(), epsilon = 1e-12);
        }
    }

    #[test]
    fn nct_efa_p3_center_dominates() {
        let p3 = Graph::new(0, 3, [(0, 1), (1, 2)]).unwrap();
        let f = nct_efa_features::<f64>(&p3, &Horizon::default()).unwrap();
        let (end, center) = (f.row(0), f.row(1));
        assert!(center.iter().zip(&end).all(|(c, e)| c > e), "{center:?} vs {end:?}");
    }

    #[test]
    fn edgeless_eigenvector_falls_back() {
        let g = Graph::new(4, 3, []).unwrap();
        let mut d = Diagnostics::default();
        let f = metric_columns::<f64>(&g, &Default::default(), &MetricKind::NCT_EFA, &mut d).unwrap();
        assert_eq!(f.data().column(3).iter().copied().collect::<Vec<_>>(), vec![0.0; 3]);
        assert_eq!(f.data().column(0).iter().copied().collect::<Vec<_>>(), vec![1.0; 3]);
        assert_eq!(d.eigenvector_zero_fallbacks, 1);
    }

    #[test]
    fn concat_dimensions() {
        let g = Graph::new(0, 5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 2)]).unwrap();
        let spec = RankEncodingSpec::default();
        let f = concat_rank_features::<f64>(&g, &Horizon::default(), &spec, &MetricKind::CONCAT_DEFAULT).unwrap();
        assert_eq!(f.dim(), 50);
        for v in 0..5 {
            let r = f.row(v);
            for block in r.chunks(10) {
                assert_eq!(block.iter().sum::<f64>(), 1.0);
            }
        }
        let single = concat_rank_features::<f64>(&g, &Horizon::default(), &spec, &[MetricKind::AverageControllability]).unwrap();
        let ac = average_controllability_with::<f64>(&g, &Default::default()).unwrap();
        assert_eq!(single.data(), rank_encode(&ac, &spec).unwrap().data());
        assert!(concat_rank_features::<f64>(&g, &Horizon::default(), &spec, &[]).is_err());
    }

    #[test]
    fn scheme_codes() {
        for s in [Scheme::DegOnehot, Scheme::NctEfa, Scheme::AcRank, Scheme::ConcatRank] {
            assert_eq!(s.code().parse::<Scheme>().unwrap(), s);
        }
    }
}
