//! Queries over the weighted citation DAG.

use std::collections::{BinaryHeap, VecDeque};

use crate::error::{Error, Result};
use crate::sparse::{self, Sparse};

/// Row `m` of `W` as `(citer, weight)` pairs and its sum `AC_m`.
pub fn manuscript_capital(w: &Sparse, m: usize) -> Result<(f64, Vec<(usize, f64)>)> {
    if m >= w.rows() {
        return Err(Error::IndexOutOfRange {
            index: m,
            size: w.rows(),
        });
    }
    let row = w.outer_view(m).expect("row in range");
    let dist: Vec<(usize, f64)> = row.iter().map(|(c, &v)| (c, v)).collect();
    Ok((dist.iter().map(|(_, v)| v).sum(), dist))
}

/// `W + W^T`.
pub fn symmetrize(w: &Sparse) -> Sparse {
    let t = sparse::transpose(w);
    sparse::prune(&(w + &t))
}

/// `W^n`, `n >= 1`.
pub fn power(w: &Sparse, n: u32) -> Result<Sparse> {
    if n == 0 {
        return Err(Error::InvalidArgument("power must be at least 1".into()));
    }
    let mut out = w.clone();
    for _ in 1..n {
        out = sparse::product(&out, w)?;
    }
    Ok(out)
}

/// `G^T G`: shared outgoing references (bibliographic coupling).
pub fn gram(g: &Sparse) -> Sparse {
    sparse::product(&sparse::transpose(g), g).expect("conformant")
}

/// `G G^T`: shared incoming citations (co-citation).
pub fn transpose_gram(g: &Sparse) -> Sparse {
    sparse::product(g, &sparse::transpose(g)).expect("conformant")
}

/// Path length used by [`betweenness_centrality`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathLength {
    /// Every edge has length one.
    Hops,
    /// Edge length `1 / w`.
    InverseWeight,
}

/// Directed betweenness over citing -> cited edges: for every `y`, the sum
/// over ordered pairs `(x, z)` with `x != y != z` of the fraction of
/// shortest `x -> z` paths passing through `y`.
pub fn betweenness_centrality(w: &Sparse, length: PathLength) -> Vec<f64> {
    let n = w.rows();
    // adjacency citing -> cited: entry (x, y) of W is an edge y -> x
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (x, y, v) in sparse::entries(w) {
        if v != 0.0 {
            adj[y].push((x, v));
        }
    }
    let mut score = vec![0.0; n];
    for s in 0..n {
        let (order, preds, sigma) = match length {
            PathLength::Hops => bfs(&adj, s),
            PathLength::InverseWeight => dijkstra(&adj, s),
        };
        let mut delta = vec![0.0; n];
        for &v in order.iter().rev() {
            for &u in &preds[v] {
                delta[u] += sigma[u] / sigma[v] * (1.0 + delta[v]);
            }
            if v != s {
                score[v] += delta[v];
            }
        }
    }
    score
}

type Sssp = (Vec<usize>, Vec<Vec<usize>>, Vec<f64>);

fn bfs(adj: &[Vec<(usize, f64)>], s: usize) -> Sssp {
    let n = adj.len();
    let mut dist = vec![usize::MAX; n];
    let mut sigma = vec![0.0; n];
    let mut preds = vec![Vec::new(); n];
    let mut order = Vec::new();
    let mut q = VecDeque::new();
    dist[s] = 0;
    sigma[s] = 1.0;
    q.push_back(s);
    while let Some(v) = q.pop_front() {
        order.push(v);
        for &(u, _) in &adj[v] {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                q.push_back(u);
            }
            if dist[u] == dist[v] + 1 {
                sigma[u] += sigma[v];
                preds[u].push(v);
            }
        }
    }
    (order, preds, sigma)
}

#[derive(PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

fn dijkstra(adj: &[Vec<(usize, f64)>], s: usize) -> Sssp {
    let n = adj.len();
    let tol = 1e-12;
    let mut dist = vec![f64::INFINITY; n];
    let mut sigma = vec![0.0; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut done = vec![false; n];
    let mut order = Vec::new();
    let mut heap = BinaryHeap::new();
    dist[s] = 0.0;
    sigma[s] = 1.0;
    heap.push(Item(0.0, s));
    while let Some(Item(d, v)) = heap.pop() {
        if done[v] || d > dist[v] {
            continue;
        }
        done[v] = true;
        order.push(v);
        for &(u, wt) in &adj[v] {
            let nd = d + 1.0 / wt;
            if nd < dist[u] - tol * nd.max(1.0) {
                dist[u] = nd;
                sigma[u] = sigma[v];
                preds[u] = vec![v];
                heap.push(Item(nd, u));
            } else if (nd - dist[u]).abs() <= tol * nd.max(1.0) {
                sigma[u] += sigma[v];
                preds[u].push(v);
            }
        }
    }
    (order, preds, sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::citation_weighting::{base_weighted_matrix, unweighted_matrix};
    use crate::corpus::fixture;
    use approx::assert_abs_diff_eq;

    #[test]
    fn capital_of_m1() {
        let w = base_weighted_matrix(&fixture::corpus());
        let (ac, dist) = manuscript_capital(&w, 0).unwrap();
        assert_eq!(ac, 1.5);
        assert_eq!(dist, vec![(1, 1.0), (2, 0.5)]);
        assert_eq!(manuscript_capital(&w, 2).unwrap().0, 0.0);
        assert!(manuscript_capital(&w, 3).is_err());
    }

    #[test]
    fn symmetric_and_powers() {
        let w = base_weighted_matrix(&fixture::corpus());
        let s = symmetrize(&w);
        assert_eq!(sparse::get(&s, 0, 1), 1.0);
        assert_eq!(sparse::get(&s, 1, 0), 1.0);
        let w2 = power(&w, 2).unwrap();
        assert_eq!(sparse::get(&w2, 0, 2), 0.5);
        assert_eq!(power(&w, 3).unwrap().nnz(), 0);
        assert_eq!(power(&w, 1).unwrap(), w);
    }

    #[test]
    fn grams() {
        let c = fixture::corpus();
        let u = unweighted_matrix(&c);
        let g = gram(&u);
        assert_eq!((0..3).map(|i| sparse::get(&g, i, i)).collect::<Vec<_>>(), vec![0.0, 1.0, 2.0]);
        assert_eq!(sparse::get(&g, 1, 2), 1.0);
        let t = transpose_gram(&u);
        assert_eq!((0..3).map(|i| sparse::get(&t, i, i)).collect::<Vec<_>>(), vec![2.0, 1.0, 0.0]);
        assert_eq!(sparse::get(&t, 0, 1), 1.0);
        let tw = transpose_gram(&base_weighted_matrix(&c));
        assert_abs_diff_eq!(sparse::get(&tw, 0, 0), 1.25, epsilon = 1e-12);
    }

    #[test]
    fn betweenness_chain_and_star() {
        // m3 -> m2 -> m1
        let chain = sparse::from_triplets(3, 3, [(0, 1, 1.0), (1, 2, 1.0)]);
        assert_eq!(betweenness_centrality(&chain, PathLength::Hops), vec![0.0, 1.0, 0.0]);
        let star = sparse::from_triplets(4, 4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]);
        assert_eq!(betweenness_centrality(&star, PathLength::Hops), vec![0.0; 4]);
        assert!(betweenness_centrality(&sparse::zeros(0, 0), PathLength::Hops).is_empty());
    }

    #[test]
    fn weighted_lengths_pick_heavy_edges() {
        // 2 -> 0 directly (weight 0.1, length 10) or via 1 (two edges, length 2)
        let w = sparse::from_triplets(3, 3, [(0, 2, 0.1), (1, 2, 1.0), (0, 1, 1.0)]);
        assert_eq!(betweenness_centrality(&w, PathLength::Hops), vec![0.0, 0.0, 0.0]);
        assert_eq!(betweenness_centrality(&w, PathLength::InverseWeight), vec![0.0, 1.0, 0.0]);
    }
}
