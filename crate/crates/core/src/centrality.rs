//! Classical node centralities on unweighted graphs: degree, closeness,
//! betweenness (Brandes) and eigenvector centrality.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{adjacency, bfs_distances, Graph};
use crate::linalg::SymmetricSpectrum;
use crate::metric::{MetricKind, MetricVector};
use crate::scalar::{abs, from_usize, lit, Scalar};

pub fn degree_vector<T: Scalar>(g: &Graph) -> MetricVector<T> {
    let values = (0..g.n()).map(|v| from_usize(g.degree(v))).collect();
    MetricVector::new(MetricKind::Degree, values).expect("degrees are finite")
}

/// Closeness centrality, scaled by the reachable fraction on disconnected graphs.
///
/// For a node reaching `r` others at total distance `s`, the value is
/// `(r / (n-1)) · (r / s)`; on a connected graph this is `(n-1) / s`.
/// Nodes that reach nothing get 0.
pub fn closeness_centrality<T: Scalar>(g: &Graph) -> MetricVector<T> {
    let n = g.n();
    let values = (0..n)
        .map(|v| {
            let (reached, total) = bfs_distances(g, v)
                .into_iter()
                .flatten()
                .filter(|&d| d > 0)
                .fold((0usize, 0usize), |(r, s), d| (r + 1, s + d));
            if reached == 0 {
                T::zero()
            } else {
                let r = from_usize::<T>(reached);
                (r / from_usize(n - 1)) * (r / from_usize(total))
            }
        })
        .collect();
    MetricVector::new(MetricKind::Closeness, values).expect("closeness is finite")
}

/// Unnormalized betweenness: every unordered pair `{s, t}` counted once,
/// endpoints excluded.
pub fn betweenness_centrality<T: Scalar>(g: &Graph) -> MetricVector<T> {
    let n = g.n();
    let mut centrality = vec![T::zero(); n];
    let mut sigma = vec![T::zero(); n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![T::zero(); n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::with_capacity(n);

    for s in 0..n {
        sigma.fill(T::zero());
        dist.fill(usize::MAX);
        delta.fill(T::zero());
        preds.iter_mut().for_each(Vec::clear);
        order.clear();

        sigma[s] = T::one();
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in g.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    let sv = sigma[v];
                    sigma[w] += sv;
                    preds[w].push(v);
                }
            }
        }
        // dependency accumulation in reverse BFS order
        for &w in order.iter().rev() {
            let coeff = (T::one() + delta[w]) / sigma[w];
            for &v in &preds[w] {
                delta[v] += sigma[v] * coeff;
            }
            if w != s {
                centrality[w] += delta[w];
            }
        }
    }
    let half = lit::<T>(0.5);
    let values = centrality.into_iter().map(|c| c * half).collect();
    MetricVector::new(MetricKind::Betweenness, values).expect("betweenness is finite")
}

/// Eigenvector centrality together with the spectral details behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvectorCentrality<T: Scalar> {
    pub vector: MetricVector<T>,
    pub lambda_max: T,
    /// The leading eigenvalue is repeated (e.g. two identical components);
    /// the vector is then one arbitrary member of the eigenspace.
    pub tied: bool,
}

/// Unit eigenvector of the largest adjacency eigenvalue, signed so that its
/// largest-magnitude entry is positive.
pub fn eigenvector_centrality<T: Scalar>(g: &Graph) -> Result<MetricVector<T>> {
    eigenvector_centrality_detailed(g).map(|e| e.vector)
}

pub fn eigenvector_centrality_detailed<T: Scalar>(g: &Graph) -> Result<EigenvectorCentrality<T>> {
    if g.edge_count() == 0 {
        return Err(Error::DegenerateInput(format!(
            "graph {} has no edges; eigenvector centrality is undefined",
            g.id()
        )));
    }
    let a = adjacency::<T>(g).into_matrix();
    let spectrum = SymmetricSpectrum::new(&a).map_err(|e| e.in_graph(g.id()))?;
    let n = g.n();
    let lambda_max = spectrum.max();
    let tol = lit::<T>(1e-9) * lambda_max.max(T::one());
    let tied = n > 1 && lambda_max - spectrum.eigenvalues[n - 2] <= tol;

    let mut v: Vec<T> = spectrum.eigenvectors.column(n - 1).iter().copied().collect();
    let norm = v.iter().fold(T::zero(), |s, &x| s + x * x).sqrt();
    let mut lead = 0;
    for i in 1..n {
        if abs(v[i]) > abs(v[lead]) {
            lead = i;
        }
    }
    let sign = if v[lead] < T::zero() { -T::one() } else { T::one() };
    for x in &mut v {
        *x = *x * sign / norm;
    }
    Ok(EigenvectorCentrality {
        vector: MetricVector::new(MetricKind::Eigenvector, v)?,
        lambda_max,
        tied,
    })
}
