//! Random graph generators and brute-force oracles shared by the
//! integration tests. Nothing here calls into the library's numeric code.
#![allow(dead_code, clippy::needless_range_loop)]

use std::path::PathBuf;

use nctfeat::Graph;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/tiny")
}

pub fn erdos_renyi<R: Rng>(rng: &mut R, id: u64, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(id, n, edges).unwrap()
}

/// Random spanning tree plus extra edges with probability `p`.
pub fn connected<R: Rng>(rng: &mut R, id: u64, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(id, n, edges).unwrap()
}

pub fn random_tree<R: Rng>(rng: &mut R, id: u64, n: usize) -> Graph {
    connected(rng, id, n, 0.0)
}

pub fn random_permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

pub fn dense_adjacency(g: &Graph) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; g.n()]; g.n()];
    for &(u, v) in g.edges() {
        a[u][v] = 1.0;
        a[v][u] = 1.0;
    }
    a
}

/// All-pairs hop distances by Floyd–Warshall.
pub fn floyd(g: &Graph) -> Vec<Vec<Option<usize>>> {
    let n = g.n();
    let mut d = vec![vec![None; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = Some(0);
    }
    for &(u, v) in g.edges() {
        d[u][v] = Some(1);
        d[v][u] = Some(1);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

pub fn brute_diameter(g: &Graph) -> usize {
    floyd(g).into_iter().flatten().flatten().max().unwrap_or(0)
}

/// Component-scaled closeness from the distance table.
pub fn brute_closeness(g: &Graph) -> Vec<f64> {
    let n = g.n();
    let d = floyd(g);
    (0..n)
        .map(|v| {
            let reach: Vec<usize> = (0..n).filter(|&u| u != v).filter_map(|u| d[u][v]).collect();
            if reach.is_empty() {
                0.0
            } else {
                let r = reach.len() as f64;
                (r / (n - 1) as f64) * (r / reach.iter().sum::<usize>() as f64)
            }
        })
        .collect()
}

/// Every shortest path between `s` and `t`, listed explicitly.
pub fn shortest_paths(g: &Graph, d: &[Vec<Option<usize>>], s: usize, t: usize) -> Vec<Vec<usize>> {
    fn walk(g: &Graph, d: &[Vec<Option<usize>>], t: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let cur = *path.last().unwrap();
        if cur == t {
            out.push(path.clone());
            return;
        }
        for &w in g.neighbors(cur) {
            // step strictly closer to t
            if d[w][t].is_some() && d[w][t].unwrap() + 1 == d[cur][t].unwrap() {
                path.push(w);
                walk(g, d, t, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    if d[s][t].is_some() {
        walk(g, d, t, &mut vec![s], &mut out);
    }
    out
}

/// Betweenness by enumerating all shortest paths of every unordered pair.
pub fn brute_betweenness(g: &Graph) -> Vec<f64> {
    let n = g.n();
    let d = floyd(g);
    let mut b = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            let paths = shortest_paths(g, &d, s, t);
            if paths.is_empty() {
                continue;
            }
            let total = paths.len() as f64;
            for p in &paths {
                for &v in &p[1..p.len() - 1] {
                    b[v] += 1.0 / total;
                }
            }
        }
    }
    b
}

/// Cyclic Jacobi eigendecomposition; returns (eigenvalues, eigenvectors as columns of `v[row][col]`).
pub fn jacobi_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m = a.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[i][j] * m[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    ((0..n).map(|i| m[i][i]).collect(), v)
}

/// `(1 - e^{-2λT}) / (2λ)`, with the limit `T` at zero.
pub fn phi(lambda: f64, end: f64) -> f64 {
    if lambda == 0.0 {
        end
    } else {
        -(-2.0 * lambda * end).exp_m1() / (2.0 * lambda)
    }
}

/// Average controllability from the Jacobi spectrum: `W_vv = Σ_i φ(λ_i) q_vi²`.
pub fn oracle_ac(g: &Graph, end: f64) -> Vec<f64> {
    let (vals, vecs) = jacobi_eigen(&dense_adjacency(g));
    (0..g.n())
        .map(|v| vals.iter().enumerate().map(|(i, &l)| phi(l, end) * vecs[v][i] * vecs[v][i]).sum())
        .collect()
}

pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(1.0f64, |m, x| m.max(x.abs()));
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

/// Connected random graphs with ids `0..count`, sizes in `min_n..=max_n`, and labels `id % 2`.
pub fn synthetic_dataset<R: Rng>(
    rng: &mut R,
    name: &str,
    count: u64,
    min_n: usize,
    max_n: usize,
) -> nctfeat::GraphDataset {
    let graphs: Vec<Graph> = (0..count)
        .map(|id| {
            let n = rng.gen_range(min_n..=max_n);
            let p = rng.gen_range(0.02..0.3);
            connected(rng, id, n, p)
        })
        .collect();
    let labels = (0..count).map(|id| (id, (id % 2) as u32)).collect();
    nctfeat::GraphDataset::new(name, graphs, labels).unwrap()
}
