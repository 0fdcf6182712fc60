//! Undirected simple graphs, their dense adjacency view, and labelled datasets.

use std::collections::{BTreeMap, VecDeque};

use nalgebra::DMatrix;

use crate::diagnostics::Diagnostics;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Undirected simple graph on dense node ids `0..n`.
///
/// Edges are stored once as `(u, v)` with `u < v`, sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    id: u64,
    n: usize,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph, stripping self-loops and duplicate edges.
    pub fn new(id: u64, n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::build(id, n, edges, &mut Diagnostics::default())
    }

    /// Like [`Graph::new`], recording what was stripped in `diag`.
    pub fn build(
        id: u64,
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        diag: &mut Diagnostics,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Integrity(format!("graph {id} has no nodes")));
        }
        let mut canon = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Contract(format!(
                    "graph {id}: edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            if u == v {
                diag.self_loops_stripped += 1;
                continue;
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        let before = canon.len();
        canon.dedup();
        diag.duplicate_edges_stripped += (before - canon.len()) as u64;

        let mut neighbors = vec![Vec::new(); n];
        for &(u, v) in &canon {
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Ok(Graph {
            id,
            n,
            edges: canon,
            neighbors,
        })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    /// Node count.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `2|E| / (n(n-1))`, or 0 for a single node.
    pub fn density(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        2.0 * self.edges.len() as f64 / (self.n as f64 * (self.n as f64 - 1.0))
    }

    /// Returns the same graph with node `v` renamed to `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(Error::Contract(format!(
                "permutation of length {} applied to a graph with {} nodes",
                perm.len(),
                self.n
            )));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Contract("not a permutation".into()));
            }
        }
        Graph::new(
            self.id,
            self.n,
            self.edges.iter().map(|&(u, v)| (perm[u], perm[v])),
        )
    }

    /// Returns a copy with one extra isolated node appended (id `n`).
    pub fn with_isolated_node(&self) -> Graph {
        Graph::new(self.id, self.n + 1, self.edges.iter().copied())
            .expect("existing edges stay in range")
    }
}

/// Dense symmetric 0/1 adjacency matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyMatrix<T: Scalar>(DMatrix<T>);

impl<T: Scalar> AdjacencyMatrix<T> {
    pub fn of(g: &Graph) -> Self {
        let mut a = DMatrix::zeros(g.n(), g.n());
        for &(u, v) in g.edges() {
            a[(u, v)] = T::one();
            a[(v, u)] = T::one();
        }
        AdjacencyMatrix(a)
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.0
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }
}

/// Dense adjacency matrix of `g`.
pub fn adjacency<T: Scalar>(g: &Graph) -> AdjacencyMatrix<T> {
    AdjacencyMatrix::of(g)
}

/// Breadth-first hop distances from `source`; `None` for unreachable nodes.
pub fn bfs_distances(g: &Graph, source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.n()];
    let mut queue = VecDeque::new();
    dist[source] = Some(0);
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].expect("queued nodes have a distance");
        for &w in g.neighbors(v) {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Largest finite shortest-path length over all node pairs.
///
/// Disconnected graphs report their largest component diameter.
pub fn graph_diameter(g: &Graph) -> usize {
    (0..g.n())
        .map(|s| bfs_distances(g, s).into_iter().flatten().max().unwrap_or(0))
        .max()
        .unwrap_or(0)
}

/// Ordered collection of labelled graphs.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphDataset {
    name: String,
    graphs: Vec<Graph>,
    labels: BTreeMap<u64, u32>,
}

impl GraphDataset {
    /// Sorts graphs by id; every graph must carry exactly one label.
    ///
    /// Labels for ids without a graph are dropped.
    pub fn new(name: impl Into<String>, mut graphs: Vec<Graph>, labels: BTreeMap<u64, u32>) -> Result<Self> {
        graphs.sort_by_key(Graph::id);
        if let Some(w) = graphs.windows(2).find(|w| w[0].id() == w[1].id()) {
            return Err(Error::Integrity(format!("duplicate graph id {}", w[0].id())));
        }
        if let Some(g) = graphs.iter().find(|g| !labels.contains_key(&g.id())) {
            return Err(Error::Integrity(format!("no label for graph {}", g.id())));
        }
        let labels = graphs.iter().map(|g| (g.id(), labels[&g.id()])).collect();
        Ok(GraphDataset {
            name: name.into(),
            graphs,
            labels,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn graphs(&self) -> &[Graph] {
        &self.graphs
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn label(&self, id: u64) -> Option<u32> {
        self.labels.get(&id).copied()
    }

    /// Iterates `(graph, label)` in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = (&Graph, u32)> + '_ {
        self.graphs.iter().map(|g| (g, self.labels[&g.id()]))
    }

    pub fn max_degree(&self) -> usize {
        self.graphs.iter().map(Graph::max_degree).max().unwrap_or(0)
    }
}
