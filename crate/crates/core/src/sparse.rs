//! Small helpers over `sprs` CSR matrices.

use std::path::Path;

use sprs::{CsMat, TriMat};

use crate::error::{Error, Result};

/// Side above which dense expansion is refused.
pub const DENSE_LIMIT: usize = 20_000;

pub type Sparse = CsMat<f64>;

/// CSR matrix from `(row, col, value)` triplets; duplicates are summed and
/// exact zeros dropped.
pub fn from_triplets(rows: usize, cols: usize, entries: impl IntoIterator<Item = (usize, usize, f64)>) -> Sparse {
    let mut t = TriMat::new((rows, cols));
    for (r, c, v) in entries {
        if v != 0.0 {
            t.add_triplet(r, c, v);
        }
    }
    let m: Sparse = t.to_csr();
    prune(&m)
}

/// Drop explicitly stored zeros.
pub fn prune(m: &Sparse) -> Sparse {
    if m.data().iter().all(|v| *v != 0.0) {
        return m.clone();
    }
    let mut t = TriMat::new(m.shape());
    for (&v, (r, c)) in m.iter() {
        if v != 0.0 {
            t.add_triplet(r, c, v);
        }
    }
    t.to_csr()
}

pub fn zeros(rows: usize, cols: usize) -> Sparse {
    CsMat::zero((rows, cols))
}

/// Entry `(r, c)`, zero when not stored.
pub fn get(m: &Sparse, r: usize, c: usize) -> f64 {
    m.get(r, c).copied().unwrap_or(0.0)
}

/// Triplets in row-major order.
pub fn entries(m: &Sparse) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::with_capacity(m.nnz());
    for (r, row) in m.outer_iterator().enumerate() {
        for (c, &v) in row.iter() {
            out.push((r, c, v));
        }
    }
    out
}

pub fn row_sums(m: &Sparse) -> Vec<f64> {
    m.outer_iterator().map(|row| row.data().iter().sum()).collect()
}

pub fn col_sums(m: &Sparse) -> Vec<f64> {
    let mut out = vec![0.0; m.cols()];
    for (&v, (_, c)) in m.iter() {
        out[c] += v;
    }
    out
}

/// Rebuild with each entry replaced by `f(row, col, value)`.
pub fn map_entries(m: &Sparse, mut f: impl FnMut(usize, usize, f64) -> f64) -> Sparse {
    let (rows, cols) = m.shape();
    from_triplets(rows, cols, entries(m).into_iter().map(|(r, c, v)| (r, c, f(r, c, v))))
}

pub fn scale_rows(m: &Sparse, s: &[f64]) -> Sparse {
    map_entries(m, |r, _, v| v * s[r])
}

pub fn scale_cols(m: &Sparse, s: &[f64]) -> Sparse {
    map_entries(m, |_, c, v| v * s[c])
}

pub fn transpose(m: &Sparse) -> Sparse {
    let (rows, cols) = m.shape();
    from_triplets(cols, rows, entries(m).into_iter().map(|(r, c, v)| (c, r, v)))
}

pub fn product(a: &Sparse, b: &Sparse) -> Result<Sparse> {
    if a.cols() != b.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.cols(),
            found: b.rows(),
        });
    }
    if a.nnz() == 0 || b.nnz() == 0 {
        return Ok(zeros(a.rows(), b.cols()));
    }
    Ok(prune(&(a * b)))
}

pub fn matvec(m: &Sparse, x: &[f64]) -> Vec<f64> {
    m.outer_iterator()
        .map(|row| row.iter().map(|(c, &v)| v * x[c]).sum())
        .collect()
}

pub fn identity(n: usize) -> Sparse {
    CsMat::eye(n)
}

pub fn is_symmetric(m: &Sparse, tol: f64) -> bool {
    m.rows() == m.cols() && entries(m).iter().all(|&(r, c, v)| (get(m, c, r) - v).abs() <= tol)
}

/// Dense copy, refused above [`DENSE_LIMIT`].
pub fn to_dense(m: &Sparse) -> Result<nalgebra::DMatrix<f64>> {
    let side = m.rows().max(m.cols());
    if side > DENSE_LIMIT {
        return Err(Error::TooLarge {
            side,
            limit: DENSE_LIMIT,
        });
    }
    let mut d = nalgebra::DMatrix::zeros(m.rows(), m.cols());
    for (&v, (r, c)) in m.iter() {
        d[(r, c)] += v;
    }
    Ok(d)
}

/// Write in Matrix Market coordinate format.
pub fn write_mtx(m: &Sparse, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    sprs::io::write_matrix_market(path, m).map_err(|e| Error::io(path, e))
}
