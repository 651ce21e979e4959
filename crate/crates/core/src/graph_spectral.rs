//! Spectral and spanning-tree analytics over symmetric weighted graphs.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::shares_graph::{laplacian, FullMatrix};
use crate::sparse::{self, Sparse};

pub const TOLERANCE: f64 = 1e-8;
/// Seed for the solver's start vectors.
pub const SOLVER_SEED: u64 = 0x1b3a_57d0;
/// Seed for k-means++ initialisation.
pub const KMEANS_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum End {
    Smallest,
    Largest,
}

/// Eigenpairs ordered from the requested end inwards.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Gershgorin bound on the spectral radius.
fn gershgorin(a: &Sparse) -> f64 {
    a.outer_iterator()
        .map(|row| row.data().iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Two passes of classical Gram-Schmidt against every vector in `bases`.
fn orthogonalize(w: &mut [f64], bases: &[&[Vec<f64>]]) {
    for _ in 0..2 {
        for set in bases {
            for v in set.iter() {
                let c = dot(w, v);
                axpy(w, -c, v);
            }
        }
    }
}

/// Largest algebraic eigenpairs of the symmetric operator `op` on `n`
/// coordinates, by thick-restart Lanczos with full reorthogonalization and
/// explicit locking.
fn lanczos_largest(
    op: &dyn Fn(&[f64]) -> Vec<f64>,
    n: usize,
    k: usize,
    scale: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let tol = TOLERANCE * scale.max(1.0);
    let cap = 10 * n.max(1) * k.max(1);
    let m_max = n.min((2 * k + 20).max(40));
    let mut locked: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut locked_vecs: Vec<Vec<f64>> = Vec::new();
    let mut matvecs = 0usize;
    let mut verifying = false;

    let random_unit = |rng: &mut ChaCha8Rng, against: &[&[Vec<f64>]]| -> Option<Vec<f64>> {
        for _ in 0..8 {
            let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            orthogonalize(&mut v, against);
            let nv = norm(&v);
            if nv > 1e-10 {
                v.iter_mut().for_each(|x| *x /= nv);
                return Some(v);
            }
        }
        None
    };

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut images: Vec<Vec<f64>> = Vec::new();
    let mut pending: Option<Vec<f64>> = None;

    loop {
        let room = n - locked.len();
        if room == 0 {
            break;
        }
        let target = m_max.min(room);
        // expand the search space
        while basis.len() < target {
            let mut w = match pending.take() {
                Some(w) => w,
                None => match images.last() {
                    Some(img) => img.clone(),
                    None => vec![0.0; n],
                },
            };
            orthogonalize(&mut w, &[&locked_vecs, &basis]);
            let mut nw = norm(&w);
            if nw <= 1e-10 * scale.max(1.0) {
                // invariant subspace reached; continue with a fresh direction
                match random_unit(rng, &[&locked_vecs, &basis]) {
                    Some(v) => {
                        w = v;
                        nw = 1.0;
                    }
                    None => break,
                }
            }
            w.iter_mut().for_each(|x| *x /= nw);
            let img = op(&w);
            matvecs += 1;
            basis.push(w);
            images.push(img);
        }
        let m = basis.len();
        if m == 0 {
            break;
        }
        let mut h = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let v = 0.5 * (dot(&basis[i], &images[j]) + dot(&basis[j], &images[i]));
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let ritz: Vec<(f64, Vec<f64>, Vec<f64>)> = order
            .iter()
            .map(|&c| {
                let mut x = vec![0.0; n];
                let mut ax = vec![0.0; n];
                for i in 0..m {
                    let y = eig.eigenvectors[(i, c)];
                    axpy(&mut x, y, &basis[i]);
                    axpy(&mut ax, y, &images[i]);
                }
                (eig.eigenvalues[c], x, ax)
            })
            .collect();
        let residual = |(theta, x, ax): &(f64, Vec<f64>, Vec<f64>)| -> Vec<f64> {
            ax.iter().zip(x).map(|(a, b)| a - theta * b).collect()
        };

        let mut first_open = ritz.len();
        for (i, r) in ritz.iter().enumerate() {
            let res = residual(r);
            if norm(&res) > tol {
                first_open = i;
                break;
            }
        }

        let kth_locked = |locked: &[(f64, Vec<f64>)]| -> f64 {
            let mut vals: Vec<f64> = locked.iter().map(|(v, _)| *v).collect();
            vals.sort_by(|a, b| b.total_cmp(a));
            vals.get(k - 1).copied().unwrap_or(f64::NEG_INFINITY)
        };

        let mut restart_fresh = false;
        if verifying {
            if first_open > 0 {
                let (theta, x, _) = &ritz[0];
                if *theta > kth_locked(&locked) + tol {
                    // a copy of an eigenvalue was missed; lock it and recheck
                    locked_vecs.push(x.clone());
                    locked.push((*theta, x.clone()));
                    restart_fresh = true;
                } else {
                    break;
                }
            }
        } else {
            for r in ritz.iter().take(first_open) {
                locked_vecs.push(r.1.clone());
                locked.push((r.0, r.1.clone()));
            }
            if locked.len() >= k {
                verifying = true;
                restart_fresh = true;
            }
        }

        if matvecs > cap {
            return Err(Error::ConvergenceFailure {
                iterations: matvecs,
                converged: locked.len().min(k),
                wanted: k,
            });
        }

        if restart_fresh || first_open >= ritz.len() {
            basis.clear();
            images.clear();
            if n - locked.len() == 0 {
                break;
            }
            match random_unit(rng, &[&locked_vecs]) {
                Some(v) => pending = Some(v),
                None => break,
            }
            continue;
        }

        // thick restart: keep the leading unconverged Ritz vectors and
        // continue from the residual of the first one
        let keep = (k.saturating_sub(locked.len()) + 10).min(m / 2).max(1);
        let open = &ritz[first_open..];
        let next = residual(&open[0]);
        basis = open.iter().take(keep).map(|r| r.1.clone()).collect();
        images = open.iter().take(keep).map(|r| r.2.clone()).collect();
        pending = Some(next);
    }

    locked.sort_by(|a, b| b.0.total_cmp(&a.0));
    locked.truncate(k);
    if locked.len() < k {
        return Err(Error::ConvergenceFailure {
            iterations: matvecs,
            converged: locked.len(),
            wanted: k,
        });
    }
    Ok(locked)
}

/// `k` eigenpairs of the symmetric matrix `l` from `end` of the spectrum.
///
/// Rows without off-diagonal entries are split off as exact eigenpairs; the
/// remaining block is solved on the sparse operator.
pub fn eigendecompose(l: &Sparse, k: usize, end: End) -> Result<EigenPairs> {
    let n = l.rows();
    if l.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: l.cols(),
        });
    }
    if k > n {
        return Err(Error::InvalidArgument(format!("requested {k} eigenpairs of a side-{n} matrix")));
    }
    if k == 0 {
        return Ok(EigenPairs {
            values: vec![],
            vectors: vec![],
        });
    }
    let mut coupled = Vec::new();
    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::new();
    for (i, row) in l.outer_iterator().enumerate() {
        if row.iter().any(|(c, &v)| c != i && v != 0.0) {
            coupled.push(i);
        } else {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            pairs.push((sparse::get(l, i, i), e));
        }
    }
    if !coupled.is_empty() {
        let mut pos = vec![usize::MAX; n];
        for (j, &i) in coupled.iter().enumerate() {
            pos[i] = j;
        }
        let sub = sparse::from_triplets(
            coupled.len(),
            coupled.len(),
            sparse::entries(l)
                .into_iter()
                .filter(|(r, c, _)| pos[*r] != usize::MAX && pos[*c] != usize::MAX)
                .map(|(r, c, v)| (pos[r], pos[c], v)),
        );
        let sigma = gershgorin(&sub);
        let want = k.min(coupled.len());
        let mut rng = ChaCha8Rng::seed_from_u64(SOLVER_SEED);
        let found = match end {
            End::Largest => lanczos_largest(&|x| sparse::matvec(&sub, x), coupled.len(), want, sigma, &mut rng)?,
            End::Smallest => lanczos_largest(
                &|x| {
                    let ax = sparse::matvec(&sub, x);
                    x.iter().zip(ax).map(|(xi, a)| sigma * xi - a).collect()
                },
                coupled.len(),
                want,
                2.0 * sigma,
                &mut rng,
            )?
            .into_iter()
            .map(|(mu, v)| (sigma - mu, v))
            .collect(),
        };
        for (val, v) in found {
            let mut full = vec![0.0; n];
            for (j, &i) in coupled.iter().enumerate() {
                full[i] = v[j];
            }
            pairs.push((val, full));
        }
    }
    match end {
        End::Smallest => pairs.sort_by(|a, b| a.0.total_cmp(&b.0)),
        End::Largest => pairs.sort_by(|a, b| b.0.total_cmp(&a.0)),
    }
    pairs.truncate(k);
    let (values, vectors) = pairs.into_iter().unzip();
    Ok(EigenPairs { values, vectors })
}

/// Union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

/// Component labels (numbered by smallest member) from the off-diagonal
/// pattern of `g`.
pub fn component_labels(g: &Sparse) -> (usize, Vec<usize>) {
    let n = g.rows();
    let mut uf = UnionFind::new(n);
    for (r, c, v) in sparse::entries(g) {
        if r != c && v != 0.0 {
            uf.union(r, c);
        }
    }
    let mut label_of_root = vec![usize::MAX; n];
    let mut labels = vec![0; n];
    let mut count = 0;
    for i in 0..n {
        let root = uf.find(i);
        if label_of_root[root] == usize::MAX {
            label_of_root[root] = count;
            count += 1;
        }
        labels[i] = label_of_root[root];
    }
    (count, labels)
}

/// Sides above which [`connected_components`] skips the spectral count.
pub const SPECTRAL_CHECK_LIMIT: usize = 5_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Components {
    pub count: usize,
    pub labels: Vec<usize>,
    /// Components with at least one edge.
    pub nontrivial: usize,
    /// Multiplicity of the zero eigenvalue, when computed.
    pub zero_eigenvalues: Option<usize>,
}

impl Components {
    pub fn agrees(&self) -> bool {
        self.zero_eigenvalues.is_none_or(|z| z == self.count)
    }
}

/// Number of eigenvalues of `l` within tolerance of zero.
pub fn zero_eigenvalue_count(l: &Sparse, at_most: usize) -> Result<usize> {
    let n = l.rows();
    let k = (at_most + 1).min(n);
    let pairs = eigendecompose(l, k, End::Smallest)?;
    let tol = TOLERANCE * gershgorin(l).max(1.0);
    Ok(pairs.values.iter().filter(|v| v.abs() <= tol).count())
}

/// Connected components of the graph with Laplacian `l`: exact labels by
/// union-find, cross-checked against the zero-eigenvalue multiplicity.
pub fn connected_components(l: &Sparse) -> Result<Components> {
    let (count, labels) = component_labels(l);
    let mut sizes = vec![0usize; count];
    for &c in &labels {
        sizes[c] += 1;
    }
    let nontrivial = sizes.iter().filter(|&&s| s > 1).count();
    let zero_eigenvalues = if l.rows() <= SPECTRAL_CHECK_LIMIT && l.rows() > 0 {
        Some(zero_eigenvalue_count(l, count)?)
    } else if l.rows() == 0 {
        Some(0)
    } else {
        None
    };
    Ok(Components {
        count,
        labels,
        nontrivial,
        zero_eigenvalues,
    })
}

/// Eigenvector of the second-smallest Laplacian eigenvalue, signed so its
/// first nonzero coordinate is positive.
pub fn fiedler_embedding(l: &Sparse) -> Result<Vec<f64>> {
    let (count, _) = component_labels(l);
    if count != 1 || l.rows() < 2 {
        return Err(Error::DisconnectedGraph { components: count });
    }
    let pairs = eigendecompose(l, 2, End::Smallest)?;
    let mut v = pairs.vectors[1].clone();
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok(v)
}

/// `I - D^{-1/2} A D^{-1/2}`; isolated nodes get a zero row.
pub fn normalized_laplacian(a: &Sparse) -> Sparse {
    let deg = sparse::row_sums(a);
    let inv: Vec<f64> = deg.iter().map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 }).collect();
    let n = a.rows();
    let mut t: Vec<(usize, usize, f64)> = sparse::entries(a)
        .into_iter()
        .map(|(r, c, v)| (r, c, -v * inv[r] * inv[c]))
        .collect();
    for (i, d) in deg.iter().enumerate() {
        if *d > 0.0 {
            t.push((i, i, 1.0));
        }
    }
    sparse::from_triplets(n, n, t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LaplacianKind {
    Combinatorial,
    Normalized,
}

/// Spectral clustering of the symmetric adjacency `g` into `k` groups.
/// Labels are numbered in order of first appearance.
pub fn cluster(g: &Sparse, k: usize, end: End, kind: LaplacianKind, seed: u64) -> Result<Vec<usize>> {
    let n = g.rows();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("k must be in 1..={n}, got {k}")));
    }
    if k == 1 {
        return Ok(vec![0; n]);
    }
    let l = match kind {
        LaplacianKind::Combinatorial => laplacian(g),
        LaplacianKind::Normalized => normalized_laplacian(g),
    };
    let pairs = eigendecompose(&l, k, end)?;
    let points: Vec<Vec<f64>> = (0..n)
        .map(|i| pairs.vectors.iter().map(|v| v[i]).collect())
        .collect();
    Ok(kmeans(&points, k, seed))
}

/// Lloyd's k-means with k-means++ seeding.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Vec<usize> {
    let n = points.len();
    if n == 0 {
        return vec![];
    }
    let k = k.min(n);
    let d2 = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = vec![rng.random_range(0..n)];
    let mut best: Vec<f64> = points.iter().map(|p| d2(p, &points[chosen[0]])).collect();
    while chosen.len() < k {
        let total: f64 = best.iter().sum();
        let next = if total <= 0.0 {
            (0..n).find(|i| !chosen.contains(i)).unwrap()
        } else {
            let mut r = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, b) in best.iter().enumerate() {
                if *b > 0.0 {
                    if r < *b {
                        pick = i;
                        break;
                    }
                    r -= b;
                }
            }
            if best[pick] <= 0.0 {
                pick = (0..n).rev().find(|&i| best[i] > 0.0).unwrap();
            }
            pick
        };
        chosen.push(next);
        for (i, b) in best.iter_mut().enumerate() {
            *b = b.min(d2(&points[i], &points[next]));
        }
    }
    let mut centers: Vec<Vec<f64>> = chosen.iter().map(|&i| points[i].clone()).collect();
    let mut assign = vec![usize::MAX; n];
    for _ in 0..300 {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let mut bi = 0;
            let mut bd = f64::INFINITY;
            for (c, ctr) in centers.iter().enumerate() {
                let d = d2(p, ctr);
                if d < bd {
                    bd = d;
                    bi = c;
                }
            }
            if assign[i] != bi {
                assign[i] = bi;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let dim = points[0].len();
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (i, p) in points.iter().enumerate() {
            counts[assign[i]] += 1;
            axpy(&mut sums[assign[i]], 1.0, p);
        }
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
    }
    let mut relabel = vec![usize::MAX; k];
    let mut next = 0;
    assign
        .iter()
        .map(|&a| {
            if relabel[a] == usize::MAX {
                relabel[a] = next;
                next += 1;
            }
            relabel[a]
        })
        .collect()
}

/// `log |det|` of a square matrix by LU with partial pivoting, or `None`
/// when a pivot vanishes.
pub fn log_abs_det(mut a: DMatrix<f64>) -> Option<f64> {
    let n = a.nrows();
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut log = 0.0;
    for col in 0..n {
        let (piv, pv) = (col..n)
            .map(|r| (r, a[(r, col)].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if pv <= 1e-13 * scale {
            return None;
        }
        if piv != col {
            a.swap_rows(piv, col);
        }
        let p = a[(col, col)];
        log += p.abs().ln();
        for r in col + 1..n {
            let f = a[(r, col)] / p;
            if f != 0.0 {
                for c in col + 1..n {
                    let v = a[(col, c)];
                    a[(r, c)] -= f * v;
                }
            }
        }
    }
    Some(log)
}

/// Natural log of the weighted spanning-tree count of `g` by Kirchhoff's
/// theorem; `-inf` when disconnected.
pub fn log_spanning_trees(g: &Sparse) -> Result<f64> {
    let n = g.rows();
    if n <= 1 {
        return Ok(0.0);
    }
    let (count, _) = component_labels(g);
    if count != 1 {
        return Ok(f64::NEG_INFINITY);
    }
    let l = sparse::to_dense(&laplacian(g))?;
    let minor = l.view((1, 1), (n - 1, n - 1)).into_owned();
    Ok(log_abs_det(minor).unwrap_or(f64::NEG_INFINITY))
}

/// Same graph with every nonzero weight set to one.
pub fn binarize(g: &Sparse) -> Sparse {
    sparse::map_entries(g, |_, _, v| if v != 0.0 { 1.0 } else { 0.0 })
}

/// Restriction to nodes with at least one edge, with the kept indices.
pub fn support_subgraph(g: &Sparse) -> (Sparse, Vec<usize>) {
    let n = g.rows();
    let keep: Vec<usize> = (0..n)
        .filter(|&i| g.outer_view(i).is_some_and(|r| r.iter().any(|(c, &v)| c != i && v != 0.0)))
        .collect();
    let mut pos = vec![usize::MAX; n];
    for (j, &i) in keep.iter().enumerate() {
        pos[i] = j;
    }
    let sub = sparse::from_triplets(
        keep.len(),
        keep.len(),
        sparse::entries(g)
            .into_iter()
            .filter(|(r, c, _)| pos[*r] != usize::MAX && pos[*c] != usize::MAX)
            .map(|(r, c, v)| (pos[r], pos[c], v)),
    );
    (sub, keep)
}

/// Spanning-tree counts of a shares graph, as natural logs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeCounts {
    pub n_manuscripts: usize,
    pub n_contributors: usize,
    /// Naive uniform share used for the weighted theoretical count.
    pub uniform_share: f64,
    pub log_tau_c: f64,
    pub log_tau_cw: f64,
    pub log_tau_k: f64,
    pub log_tau_kw: f64,
}

impl TreeCounts {
    pub fn tau_c(&self) -> f64 {
        self.log_tau_c.exp()
    }
    pub fn tau_cw(&self) -> f64 {
        self.log_tau_cw.exp()
    }
    pub fn tau_k(&self) -> f64 {
        self.log_tau_k.exp()
    }
    pub fn tau_kw(&self) -> f64 {
        self.log_tau_kw.exp()
    }
}

/// Theoretical and Kirchhoff spanning-tree counts of the shares graph,
/// taken over manuscripts and contributor-role nodes that hold an edge.
pub fn spanning_tree_counts(shares: &FullMatrix) -> Result<TreeCounts> {
    let (sub, kept) = support_subgraph(shares.matrix());
    let n_m = kept.iter().filter(|&&i| i < shares.n_manuscripts()).count();
    let n_c = kept.len() - n_m;
    let edges = sub.nnz() / 2;
    let uniform_share = if edges > 0 { n_m as f64 / edges as f64 } else { 0.0 };
    let (m, c) = (n_m as f64, n_c as f64);
    let log_tau_c = if n_m == 0 || n_c == 0 {
        0.0
    } else {
        (c - 1.0) * m.ln() + (m - 1.0) * c.ln()
    };
    let log_tau_cw = log_tau_c + (m + c - 1.0).max(0.0) * uniform_share.ln();
    Ok(TreeCounts {
        n_manuscripts: n_m,
        n_contributors: n_c,
        uniform_share,
        log_tau_c,
        log_tau_cw,
        log_tau_k: log_spanning_trees(&binarize(&sub))?,
        log_tau_kw: log_spanning_trees(&sub)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeRatios {
    #[serde(rename = "str")]
    pub str_ratio: Measure,
    #[serde(rename = "str_w")]
    pub str_weighted: Measure,
    pub rstr: Measure,
}

fn log_ratio(num: f64, den: f64, name: &str) -> Measure {
    if den == f64::NEG_INFINITY {
        Measure::absent(format!("{name} = 0"))
    } else if den == 0.0 {
        Measure::absent(format!("{name} = 1 gives a zero log"))
    } else {
        Measure::finite_or(num / den, "non-finite ratio")
    }
}

/// Spanning-tree ratios; undefined ratios are reported absent.
pub fn tree_ratios(t: &TreeCounts) -> TreeRatios {
    let str_ratio = log_ratio(t.log_tau_c, t.log_tau_k, "τ_k");
    let str_weighted = log_ratio(t.log_tau_cw, t.log_tau_kw, "τ_kw");
    let rstr = match (&str_ratio, &str_weighted) {
        (Measure::Value(s), Measure::Value(w)) if *s != 0.0 => Measure::finite_or(w / s, "non-finite ratio"),
        (Measure::Value(_), Measure::Value(_)) => Measure::absent("STR = 0"),
        (Measure::Absent(r), _) | (_, Measure::Absent(r)) => Measure::absent(r.clone()),
    };
    TreeRatios {
        str_ratio,
        str_weighted,
        rstr,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixture;
    use crate::shares_graph::build_full;
    use approx::assert_abs_diff_eq;

    fn edges(n: usize, e: &[(usize, usize, f64)]) -> Sparse {
        sparse::from_triplets(n, n, e.iter().flat_map(|&(a, b, w)| [(a, b, w), (b, a, w)]))
    }

    #[test]
    fn two_node_edge() {
        let l = laplacian(&edges(2, &[(0, 1, 1.0)]));
        let e = eigendecompose(&l, 2, End::Smallest).unwrap();
        assert_abs_diff_eq!(e.values[0], 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(e.values[1], 2.0, epsilon = 1e-10);
        let e = eigendecompose(&l, 1, End::Largest).unwrap();
        assert_abs_diff_eq!(e.values[0], 2.0, epsilon = 1e-10);
    }

    #[test]
    fn disjoint_edges_have_two_zeros() {
        let l = laplacian(&edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]));
        let e = eigendecompose(&l, 2, End::Smallest).unwrap();
        assert!(e.values.iter().all(|v| v.abs() < 1e-8));
        assert_abs_diff_eq!(dot(&e.vectors[0], &e.vectors[1]), 0.0, epsilon = 1e-8);
        let c = connected_components(&l).unwrap();
        assert_eq!(c.count, 2);
        assert!(c.agrees());
    }

    #[test]
    fn fixture_components() {
        let f = build_full(&fixture::corpus());
        let c = connected_components(&f.laplacian()).unwrap();
        assert_eq!(c.nontrivial, 1);
        assert_eq!(c.count, 6);
        assert_eq!(c.zero_eigenvalues, Some(6));
        let empty = connected_components(&sparse::zeros(0, 0)).unwrap();
        assert_eq!(empty.count, 0);
    }

    #[test]
    fn fiedler_on_path() {
        let l = laplacian(&edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]));
        let v = fiedler_embedding(&l).unwrap();
        assert!(v[0] > 0.0 && v[0] > v[1] && v[1] > v[2]);
        let d = laplacian(&edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]));
        assert!(matches!(fiedler_embedding(&d), Err(Error::DisconnectedGraph { components: 2 })));
    }

    #[test]
    fn cliques_are_recovered() {
        let mut e = vec![];
        for a in 0..4 {
            for b in a + 1..4 {
                e.push((a, b, 1.0));
                e.push((a + 4, b + 4, 1.0));
            }
        }
        let g = edges(8, &e);
        let labels = cluster(&g, 2, End::Smallest, LaplacianKind::Combinatorial, KMEANS_SEED).unwrap();
        assert_eq!(labels, vec![0, 0, 0, 0, 1, 1, 1, 1]);
        assert_eq!(cluster(&g, 1, End::Smallest, LaplacianKind::Combinatorial, 42).unwrap(), vec![0; 8]);
        let singles = cluster(&g, 8, End::Smallest, LaplacianKind::Combinatorial, 42).unwrap();
        let mut s = singles.clone();
        s.sort();
        s.dedup();
        assert_eq!(s.len(), 8);
    }

    #[test]
    fn tree_counts_small() {
        let k3 = edges(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]);
        assert_abs_diff_eq!(log_spanning_trees(&k3).unwrap().exp(), 3.0, epsilon = 1e-9);
        let e = edges(2, &[(0, 1, 0.5)]);
        assert_abs_diff_eq!(log_spanning_trees(&e).unwrap().exp(), 0.5, epsilon = 1e-12);
        let mut k8 = vec![];
        for a in 0..8 {
            for b in a + 1..8 {
                k8.push((a, b, 1.0));
            }
        }
        assert_eq!(log_spanning_trees(&edges(8, &k8)).unwrap().exp().round(), 262144.0);
        let split = edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]);
        assert_eq!(log_spanning_trees(&split).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn fixture_tree_ratios() {
        let f = build_full(&fixture::corpus());
        let t = spanning_tree_counts(&f).unwrap();
        assert_eq!((t.n_manuscripts, t.n_contributors), (3, 4));
        // the touched graph is a path, so it has exactly one spanning tree
        assert_abs_diff_eq!(t.log_tau_k, 0.0, epsilon = 1e-12);
        let r = tree_ratios(&t);
        assert!(r.str_ratio.is_absent());
        assert!(r.rstr.is_absent());
        assert!(r.str_weighted.value().unwrap().is_finite());
    }

    #[test]
    fn complete_bipartite_uniform_has_unit_rstr() {
        // 2 manuscripts x 3 authors, each share 1/3
        let mut e = vec![];
        for m in 0..2 {
            for c in 0..3 {
                e.push((m, 2 + c, 1.0 / 3.0));
            }
        }
        let cond = sparse::from_triplets(2, 9, e.iter().map(|&(m, c, w)| (m, c - 2, w)));
        let full = crate::shares_graph::CondensedMatrix::from_sparse(cond, 2, 3).unwrap().expand();
        let t = spanning_tree_counts(&full).unwrap();
        let r = tree_ratios(&t);
        assert_abs_diff_eq!(r.str_ratio.value().unwrap(), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.rstr.value().unwrap(), 1.0, epsilon = 1e-9);
    }
}
