//! Brute-force reference implementations and random graph builders shared
//! by the integration and acceptance tests.
#![allow(dead_code)]

use liberata::sparse::{self, Sparse};
use rand::Rng;

/// Undirected edge list `(a, b, w)` with `a < b`.
pub type Edges = Vec<(usize, usize, f64)>;

pub fn random_edges(rng: &mut impl Rng, n: usize, p: f64, weighted: bool) -> Edges {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random::<f64>() < p {
                let w = if weighted { rng.random_range(0.1..2.0) } else { 1.0 };
                out.push((a, b, w));
            }
        }
    }
    out
}

pub fn symmetric(n: usize, edges: &Edges) -> Sparse {
    sparse::from_triplets(n, n, edges.iter().flat_map(|&(a, b, w)| [(a, b, w), (b, a, w)]))
}

pub fn complete(n: usize) -> Edges {
    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b, 1.0))).collect()
}

fn root(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        x = parent[x];
    }
    x
}

/// Components by repeated relabelling, independent of the library's
/// union-find.
pub fn component_count(n: usize, edges: &Edges) -> usize {
    let mut label: Vec<usize> = (0..n).collect();
    loop {
        let mut changed = false;
        for &(a, b, _) in edges {
            let m = label[a].min(label[b]);
            if label[a] != m || label[b] != m {
                label[a] = m;
                label[b] = m;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut roots: Vec<usize> = label.clone();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

/// Sum over all spanning trees of the product of edge weights, by
/// enumerating every `(n-1)`-subset of edges.
pub fn enumerate_spanning_trees(n: usize, edges: &Edges) -> f64 {
    if n <= 1 {
        return 1.0;
    }
    let k = n - 1;
    if edges.len() < k {
        return 0.0;
    }
    let mut total = 0.0;
    let mut pick: Vec<usize> = (0..k).collect();
    loop {
        let mut parent: Vec<usize> = (0..n).collect();
        let mut acyclic = true;
        let mut weight = 1.0;
        for &e in &pick {
            let (a, b, w) = edges[e];
            let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
            if ra == rb {
                acyclic = false;
                break;
            }
            parent[ra] = rb;
            weight *= w;
        }
        if acyclic {
            total += weight;
        }
        // next combination
        let mut i = k;
        while i > 0 && pick[i - 1] == edges.len() - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return total;
        }
        pick[i - 1] += 1;
        for j in i..k {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

/// Random references DAG in `W` orientation: entry `(x, y)` with `x < y`
/// means `y` cites `x`.
pub fn random_dag(rng: &mut impl Rng, n: usize, p: f64) -> Sparse {
    let mut t = Vec::new();
    for y in 0..n {
        for x in 0..y {
            if rng.random::<f64>() < p {
                t.push((x, y, rng.random_range(0.1..1.0)));
            }
        }
    }
    sparse::from_triplets(n, n, t)
}

fn all_paths(adj: &[Vec<usize>], at: usize, to: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if at == to {
        out.push(path.clone());
        return;
    }
    for &next in &adj[at] {
        path.push(next);
        all_paths(adj, next, to, path, out);
        path.pop();
    }
}

/// Directed hop-count betweenness over citing -> cited edges, by listing
/// every path between every ordered pair.
pub fn enumerate_betweenness(w: &Sparse) -> Vec<f64> {
    let n = w.rows();
    let mut adj = vec![Vec::new(); n];
    for (x, y, _) in sparse::entries(w) {
        adj[y].push(x);
    }
    let mut score = vec![0.0; n];
    for s in 0..n {
        for t in 0..n {
            if s == t {
                continue;
            }
            let mut paths = Vec::new();
            all_paths(&adj, s, t, &mut vec![s], &mut paths);
            let Some(best) = paths.iter().map(Vec::len).min() else {
                continue;
            };
            let shortest: Vec<&Vec<usize>> = paths.iter().filter(|p| p.len() == best).collect();
            for y in 0..n {
                if y == s || y == t {
                    continue;
                }
                let through = shortest.iter().filter(|p| p.contains(&y)).count();
                score[y] += through as f64 / shortest.len() as f64;
            }
        }
    }
    score
}

/// `sum_k a_ik a_kj` on a dense copy.
pub fn two_hop(a: &Sparse) -> Vec<Vec<f64>> {
    let n = a.rows();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out[i][j] += sparse::get(a, i, k) * sparse::get(a, k, j);
            }
        }
    }
    out
}
