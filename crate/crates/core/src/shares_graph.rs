//! Bipartite shares graph between manuscripts and contributor roles.
//!
//! The condensed form is `|M| x 3|C|` with column blocks
//! `[author | peer reviewer | replicator]`; person `p` in role `r` sits at
//! column `r.index() * |C| + p`. The full form is the symmetric bipartite
//! adjacency matrix of side `|M| + 3|C|`, manuscripts first.

use std::path::Path;

use serde::Serialize;

use crate::corpus::{Corpus, Role};
use crate::error::{Error, Result};
use crate::sparse::{self, Sparse};

/// A node of the full bipartite graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Node {
    Manuscript(usize),
    Contributor { person: usize, role: Role },
}

/// Condensed manuscript x contributor-role matrix. Holds share values for
/// the shares graph and share-weighted capital for the capital graph.
#[derive(Debug, Clone, PartialEq)]
pub struct CondensedMatrix {
    matrix: Sparse,
    n_manuscripts: usize,
    n_persons: usize,
}

impl CondensedMatrix {
    pub fn from_sparse(matrix: Sparse, n_manuscripts: usize, n_persons: usize) -> Result<Self> {
        if matrix.shape() != (n_manuscripts, 3 * n_persons) {
            return Err(Error::DimensionMismatch {
                expected: 3 * n_persons,
                found: matrix.cols(),
            });
        }
        Ok(CondensedMatrix {
            matrix,
            n_manuscripts,
            n_persons,
        })
    }

    pub fn matrix(&self) -> &Sparse {
        &self.matrix
    }

    pub fn n_manuscripts(&self) -> usize {
        self.n_manuscripts
    }

    pub fn n_persons(&self) -> usize {
        self.n_persons
    }

    pub fn column(&self, person: usize, role: Role) -> usize {
        role.index() * self.n_persons + person
    }

    pub fn decode_column(&self, col: usize) -> (usize, Role) {
        (col % self.n_persons, Role::from_index(col / self.n_persons).expect("column in range"))
    }

    pub fn get(&self, manuscript: usize, person: usize, role: Role) -> f64 {
        sparse::get(&self.matrix, manuscript, self.column(person, role))
    }

    /// Column sums: per person-role totals.
    pub fn column_totals(&self) -> Vec<f64> {
        sparse::col_sums(&self.matrix)
    }

    /// Totals per person summed over the three roles.
    pub fn person_totals(&self) -> Vec<f64> {
        let cols = self.column_totals();
        (0..self.n_persons)
            .map(|p| (0..3).map(|r| cols[r * self.n_persons + p]).sum())
            .collect()
    }

    /// Symmetric bipartite expansion of side `|M| + 3|C|`.
    pub fn expand(&self) -> FullMatrix {
        let m = self.n_manuscripts;
        let side = m + 3 * self.n_persons;
        let entries = sparse::entries(&self.matrix);
        let matrix = sparse::from_triplets(
            side,
            side,
            entries
                .iter()
                .flat_map(|&(r, c, v)| [(r, m + c, v), (m + c, r, v)]),
        );
        FullMatrix {
            matrix,
            n_manuscripts: m,
            n_persons: self.n_persons,
        }
    }

    pub fn write_mtx(&self, path: impl AsRef<Path>) -> Result<()> {
        sparse::write_mtx(&self.matrix, path)
    }
}

/// Condensed shares matrix of a corpus.
pub fn build_condensed(corpus: &Corpus) -> CondensedMatrix {
    let n_p = corpus.n_contributors();
    let matrix = sparse::from_triplets(
        corpus.n_manuscripts(),
        3 * n_p,
        corpus
            .share_rows()
            .map(|(m, p, role, s)| (m, role.index() * n_p + p, s)),
    );
    CondensedMatrix {
        matrix,
        n_manuscripts: corpus.n_manuscripts(),
        n_persons: n_p,
    }
}

/// Full shares matrix of a corpus.
pub fn build_full(corpus: &Corpus) -> FullMatrix {
    build_condensed(corpus).expand()
}

/// Node selector for [`FullMatrix::fetch`].
#[derive(Debug, Clone, PartialEq)]
pub enum Selector {
    Manuscript(usize),
    Contributor { person: usize, role: Role },
    /// All three role nodes of a person.
    Person(usize),
    /// Superposition of the component selectors.
    Union(Vec<Selector>),
}

/// Symmetric bipartite matrix over manuscripts and contributor roles.
#[derive(Debug, Clone, PartialEq)]
pub struct FullMatrix {
    matrix: Sparse,
    n_manuscripts: usize,
    n_persons: usize,
}

impl FullMatrix {
    pub fn matrix(&self) -> &Sparse {
        &self.matrix
    }

    pub fn side(&self) -> usize {
        self.matrix.rows()
    }

    pub fn n_manuscripts(&self) -> usize {
        self.n_manuscripts
    }

    pub fn n_persons(&self) -> usize {
        self.n_persons
    }

    pub fn index(&self, node: Node) -> usize {
        match node {
            Node::Manuscript(i) => i,
            Node::Contributor { person, role } => {
                self.n_manuscripts + role.index() * self.n_persons + person
            }
        }
    }

    pub fn node(&self, index: usize) -> Node {
        if index < self.n_manuscripts {
            Node::Manuscript(index)
        } else {
            let c = index - self.n_manuscripts;
            Node::Contributor {
                person: c % self.n_persons,
                role: Role::from_index(c / self.n_persons).expect("index in range"),
            }
        }
    }

    /// Condensed (upper-right) block.
    pub fn condense(&self) -> CondensedMatrix {
        let m = self.n_manuscripts;
        let matrix = sparse::from_triplets(
            m,
            3 * self.n_persons,
            sparse::entries(&self.matrix)
                .into_iter()
                .filter(|&(r, c, _)| r < m && c >= m)
                .map(|(r, c, v)| (r, c - m, v)),
        );
        CondensedMatrix {
            matrix,
            n_manuscripts: m,
            n_persons: self.n_persons,
        }
    }

    fn selector_indices(&self, sel: &Selector, out: &mut Vec<usize>) -> Result<()> {
        let check = |i: usize, size: usize| {
            if i < size {
                Ok(())
            } else {
                Err(Error::IndexOutOfRange { index: i, size })
            }
        };
        match sel {
            Selector::Manuscript(i) => {
                check(*i, self.n_manuscripts)?;
                out.push(*i);
            }
            Selector::Contributor { person, role } => {
                check(*person, self.n_persons)?;
                out.push(self.index(Node::Contributor {
                    person: *person,
                    role: *role,
                }));
            }
            Selector::Person(p) => {
                check(*p, self.n_persons)?;
                for role in Role::ALL {
                    out.push(self.index(Node::Contributor { person: *p, role }));
                }
            }
            Selector::Union(parts) => {
                for s in parts {
                    self.selector_indices(s, out)?;
                }
            }
        }
        Ok(())
    }

    /// `G x` for the indicator vector `x` of the selector. Returns the
    /// nonzero entries keyed by node, in index order.
    pub fn fetch(&self, sel: &Selector) -> Result<Vec<(Node, f64)>> {
        let mut idx = Vec::new();
        self.selector_indices(sel, &mut idx)?;
        let mut x = vec![0.0; self.side()];
        for i in idx {
            x[i] += 1.0;
        }
        Ok(sparse::matvec(&self.matrix, &x)
            .into_iter()
            .enumerate()
            .filter(|(_, v)| *v != 0.0)
            .map(|(i, v)| (self.node(i), v))
            .collect())
    }

    pub fn degree(&self) -> DegreeMatrix {
        DegreeMatrix {
            diagonal: sparse::row_sums(&self.matrix),
            n_manuscripts: self.n_manuscripts,
            n_persons: self.n_persons,
        }
    }

    /// `D - G`.
    pub fn laplacian(&self) -> Sparse {
        laplacian(&self.matrix)
    }

    /// `G^2`, the two-step walk matrix.
    pub fn two_step(&self) -> TwoStep {
        TwoStep {
            matrix: square(&self.matrix),
            n_manuscripts: self.n_manuscripts,
            n_persons: self.n_persons,
        }
    }

    pub fn write_mtx(&self, path: impl AsRef<Path>) -> Result<()> {
        sparse::write_mtx(&self.matrix, path)
    }
}

/// Laplacian `D - A` of a symmetric weighted adjacency matrix.
pub fn laplacian(a: &Sparse) -> Sparse {
    let deg = sparse::row_sums(a);
    let n = a.rows();
    let mut t: Vec<(usize, usize, f64)> = sparse::entries(a)
        .into_iter()
        .filter(|(r, c, _)| r != c)
        .map(|(r, c, v)| (r, c, -v))
        .collect();
    for (i, d) in deg.iter().enumerate() {
        let self_loop = sparse::get(a, i, i);
        t.push((i, i, d - self_loop));
    }
    sparse::from_triplets(n, n, t)
}

/// `A * A` for a square matrix.
pub fn square(a: &Sparse) -> Sparse {
    sparse::product(a, a).expect("square matrix")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeMatrix {
    pub diagonal: Vec<f64>,
    pub n_manuscripts: usize,
    pub n_persons: usize,
}

impl DegreeMatrix {
    pub fn trace_manuscripts(&self) -> f64 {
        self.diagonal[..self.n_manuscripts].iter().sum()
    }

    pub fn trace_contributors(&self) -> f64 {
        self.diagonal[self.n_manuscripts..].iter().sum()
    }

    pub fn trace_role(&self, role: Role) -> f64 {
        let start = self.n_manuscripts + role.index() * self.n_persons;
        self.diagonal[start..start + self.n_persons].iter().sum()
    }

    pub fn of(&self, idx: usize) -> f64 {
        self.diagonal[idx]
    }
}

/// Two-step matrix with accessors for its M-block and role sub-blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoStep {
    matrix: Sparse,
    n_manuscripts: usize,
    n_persons: usize,
}

impl TwoStep {
    pub fn matrix(&self) -> &Sparse {
        &self.matrix
    }

    /// `|M| x |M|` manuscript block.
    pub fn manuscript_block(&self) -> Sparse {
        self.block(0, 0, self.n_manuscripts, self.n_manuscripts)
    }

    /// `|C| x |C|` sub-block between two roles.
    pub fn role_block(&self, a: Role, b: Role) -> Sparse {
        let ra = self.n_manuscripts + a.index() * self.n_persons;
        let rb = self.n_manuscripts + b.index() * self.n_persons;
        self.block(ra, rb, self.n_persons, self.n_persons)
    }

    /// Entries outside the M-block and the contributor block.
    pub fn off_block_nnz(&self) -> usize {
        let m = self.n_manuscripts;
        sparse::entries(&self.matrix)
            .iter()
            .filter(|(r, c, _)| (*r < m) != (*c < m))
            .count()
    }

    fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Sparse {
        sparse::from_triplets(
            rows,
            cols,
            sparse::entries(&self.matrix)
                .into_iter()
                .filter(|&(r, c, _)| r >= r0 && r < r0 + rows && c >= c0 && c < c0 + cols)
                .map(|(r, c, v)| (r - r0, c - c0, v)),
        )
    }

    pub fn write_mtx(&self, path: impl AsRef<Path>) -> Result<()> {
        sparse::write_mtx(&self.matrix, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixture;
    use approx::assert_abs_diff_eq;

    #[test]
    fn condensed_fixture() {
        let c = fixture::corpus();
        let s = build_condensed(&c);
        assert_eq!(s.matrix().shape(), (3, 9));
        assert_eq!(s.matrix().nnz(), 6);
        assert_eq!(s.get(2, 2, Role::Author), 0.9);
        assert_eq!(s.get(2, 0, Role::PeerReviewer), 0.1);
        for r in sparse::row_sums(s.matrix()) {
            assert_abs_diff_eq!(r, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn full_fixture() {
        let f = build_full(&fixture::corpus());
        assert_eq!(f.side(), 12);
        assert_eq!(f.matrix().nnz(), 12);
        assert!(sparse::is_symmetric(f.matrix(), 0.0));
        assert_eq!(f.condense(), build_condensed(&fixture::corpus()));
    }

    #[test]
    fn fetch_vectors() {
        let f = build_full(&fixture::corpus());
        let got = f.fetch(&Selector::Manuscript(0)).unwrap();
        assert_eq!(
            got,
            vec![
                (Node::Contributor { person: 0, role: Role::Author }, 0.7),
                (Node::Contributor { person: 1, role: Role::Author }, 0.3),
            ]
        );
        let got = f.fetch(&Selector::Person(0)).unwrap();
        assert_eq!(got, vec![(Node::Manuscript(0), 0.7), (Node::Manuscript(2), 0.1)]);
        assert!(f.fetch(&Selector::Union(vec![])).unwrap().is_empty());
        assert!(matches!(
            f.fetch(&Selector::Manuscript(3)),
            Err(Error::IndexOutOfRange { index: 3, size: 3 })
        ));
    }

    #[test]
    fn degrees() {
        let f = build_full(&fixture::corpus());
        let d = f.degree();
        assert_eq!(&d.diagonal[..3], &[1.0, 1.0, 1.0]);
        assert_abs_diff_eq!(d.of(f.index(Node::Contributor { person: 1, role: Role::Author })), 0.9, epsilon = 1e-12);
        assert_abs_diff_eq!(d.trace_manuscripts(), 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.trace_contributors(), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn laplacian_rows_sum_to_zero() {
        let f = build_full(&fixture::corpus());
        for r in sparse::row_sums(&f.laplacian()) {
            assert_abs_diff_eq!(r, 0.0, epsilon = 1e-12);
        }
        let edge = sparse::from_triplets(2, 2, [(0, 1, 1.0), (1, 0, 1.0)]);
        let l = laplacian(&edge);
        assert_eq!(sparse::get(&l, 0, 0), 1.0);
        assert_eq!(sparse::get(&l, 0, 1), -1.0);
    }

    #[test]
    fn two_step_blocks() {
        let f = build_full(&fixture::corpus());
        let t = f.two_step();
        assert_eq!(t.off_block_nnz(), 0);
        let mb = t.manuscript_block();
        assert_abs_diff_eq!(sparse::get(&mb, 0, 0), 0.58, epsilon = 1e-12);
        let ap = t.role_block(Role::Author, Role::PeerReviewer);
        for p in 0..3 {
            assert_eq!(sparse::get(&ap, p, p), 0.0);
        }
        // c3 (author on m3) and c1 (reviewer on m3) meet through m3
        assert_abs_diff_eq!(sparse::get(&ap, 2, 0), 0.09, epsilon = 1e-12);
    }
}
