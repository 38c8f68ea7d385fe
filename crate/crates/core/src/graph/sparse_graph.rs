use crate::error::{Error, Result};
use crate::tensor::{CsrMatrix, DenseMatrix};

/// Undirected simple graph stored as a symmetric binary CSR pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseGraph {
    n: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
}

impl SparseGraph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            row_offsets: vec![0; n + 1],
            col_indices: Vec::new(),
        }
    }

    /// Builds a graph from arbitrary pairs: symmetrized by union, duplicates
    /// merged, self-loops dropped.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::Format(format!("edge ({i}, {j}) out of range for n={n}")));
            }
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
        Ok(Self::from_adjacency_lists(adj))
    }

    fn from_adjacency_lists(mut adj: Vec<Vec<usize>>) -> Self {
        let n = adj.len();
        let mut row_offsets = Vec::with_capacity(n + 1);
        row_offsets.push(0);
        let mut col_indices = Vec::new();
        for row in &mut adj {
            row.sort_unstable();
            row.dedup();
            col_indices.extend_from_slice(row);
            row_offsets.push(col_indices.len());
        }
        Self {
            n,
            row_offsets,
            col_indices,
        }
    }

    /// Wraps raw CSR arrays, checking every structural invariant.
    pub fn from_csr(n: usize, row_offsets: Vec<usize>, col_indices: Vec<usize>) -> Result<Self> {
        let bad = |m: &str| Err(Error::Format(m.to_string()));
        if row_offsets.len() != n + 1 || row_offsets[0] != 0 {
            return bad("row_offsets must have n+1 entries starting at 0");
        }
        if row_offsets.windows(2).any(|w| w[0] > w[1]) {
            return bad("row_offsets must be nondecreasing");
        }
        if row_offsets[n] != col_indices.len() {
            return bad("last row offset must equal the number of stored entries");
        }
        let g = Self {
            n,
            row_offsets,
            col_indices,
        };
        for i in 0..n {
            let row = g.neighbors(i);
            if row.iter().any(|&j| j >= n) {
                return bad("column index out of range");
            }
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return bad("rows must be strictly ascending (no duplicates)");
            }
            if row.contains(&i) {
                return bad("self-loops are not allowed");
            }
        }
        if !g.is_symmetric() {
            return bad("adjacency must be symmetric");
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.col_indices[self.row_offsets[i]..self.row_offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.row_offsets[i + 1] - self.row_offsets[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.degree(i)).collect()
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        self.col_indices.len() / 2
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors(i).binary_search(&j).is_ok()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| self.neighbors(i).iter().all(|&j| self.has_edge(j, i)))
    }

    /// Undirected edges as `(i, j)` with `i < j`, in row order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .filter(move |&&j| j > i)
                .map(move |&j| (i, j))
        })
    }

    /// Returns a copy with the extra pairs added.
    pub fn with_edges<I>(&self, extra: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_edges(self.n, self.edges().chain(extra))
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.neighbors(i).iter().map(|&j| x[j]).sum();
        }
    }

    /// The binary adjacency as a real sparse operator.
    pub fn adjacency_operator(&self) -> CsrMatrix {
        CsrMatrix::new(
            self.n,
            self.n,
            self.row_offsets.clone(),
            self.col_indices.clone(),
            vec![1.0; self.col_indices.len()],
        )
        .expect("graph invariants imply a valid CSR operator")
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut a = DenseMatrix::zeros(self.n, self.n);
        for (i, j) in self.edges() {
            a.set(i, j, 1.0);
            a.set(j, i, 1.0);
        }
        a
    }
}

/// `D̃^{-1/2} (A + I) D̃^{-1/2}` with `D̃` the degree matrix of `A + I`.
pub fn normalized_adjacency(g: &SparseGraph) -> CsrMatrix {
    let inv_sqrt: Vec<f64> = (0..g.n()).map(|i| 1.0 / ((g.degree(i) + 1) as f64).sqrt()).collect();
    let mut offsets = Vec::with_capacity(g.n() + 1);
    offsets.push(0);
    let mut cols = Vec::with_capacity(g.col_indices.len() + g.n());
    let mut vals = Vec::with_capacity(g.col_indices.len() + g.n());
    for i in 0..g.n() {
        let nbrs = g.neighbors(i);
        let split = nbrs.partition_point(|&j| j < i);
        for &j in nbrs[..split].iter().chain(std::iter::once(&i)).chain(&nbrs[split..]) {
            cols.push(j);
            vals.push(inv_sqrt[i] * inv_sqrt[j]);
        }
        offsets.push(cols.len());
    }
    CsrMatrix::new(g.n(), g.n(), offsets, cols, vals).expect("valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn from_edges_symmetrizes_and_dedups() {
        let g = SparseGraph::from_edges(3, [(0, 1), (1, 0), (0, 1), (2, 2)]).unwrap();
        assert_eq!(g.num_edges(), 1);
        assert_eq!(g.degrees(), vec![1, 1, 0]);
        assert!(g.is_symmetric());
    }

    #[test]
    fn from_csr_rejects_asymmetry_and_loops() {
        assert!(SparseGraph::from_csr(2, vec![0, 1, 1], vec![1]).is_err());
        assert!(SparseGraph::from_csr(2, vec![0, 1, 2], vec![0, 1]).is_err());
        assert!(SparseGraph::from_csr(2, vec![0, 1, 2], vec![1, 0]).is_ok());
    }

    #[test]
    fn normalized_k2_is_all_half() {
        let g = SparseGraph::from_edges(2, [(0, 1)]).unwrap();
        let d = normalized_adjacency(&g).to_dense();
        assert!(d.as_slice().iter().all(|&v| (v - 0.5).abs() < 1e-15));
    }

    #[test]
    fn normalized_isolated_node_is_one() {
        let g = SparseGraph::from_edges(3, [(0, 1)]).unwrap();
        let op = normalized_adjacency(&g);
        assert_eq!(op.get(2, 2), 1.0);
        assert_eq!(op.row(2).0, &[2]);
    }

    #[test]
    fn normalized_p3_matches_dense_formula() {
        let g = SparseGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let op = normalized_adjacency(&g).to_dense();
        // Dense D̃^{-1/2}(A+I)D̃^{-1/2} with D̃ = diag(2, 3, 2).
        let dt = [2.0f64, 3.0, 2.0];
        let mut a = g.to_dense();
        for i in 0..3 {
            a.set(i, i, 1.0);
        }
        for i in 0..3 {
            for j in 0..3 {
                let expect = a.get(i, j) / (dt[i] * dt[j]).sqrt();
                assert!((op.get(i, j) - expect).abs() < 1e-15);
            }
        }
        assert!((op.get(1, 0) - 1.0 / 6f64.sqrt()).abs() < 1e-15);
        assert!((op.get(1, 0) - 0.40825).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn constructed_graphs_hold_invariants(
            n in 1usize..40,
            pairs in proptest::collection::vec((0usize..40, 0usize..40), 0..120),
        ) {
            let edges: Vec<_> = pairs.into_iter().map(|(i, j)| (i % n, j % n)).collect();
            let g = SparseGraph::from_edges(n, edges).unwrap();
            prop_assert!(g.is_symmetric());
            prop_assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.num_edges());
            prop_assert_eq!(*g.row_offsets().last().unwrap(), g.col_indices().len());
            prop_assert!(SparseGraph::from_csr(n, g.row_offsets().to_vec(), g.col_indices().to_vec()).is_ok());
            let op = normalized_adjacency(&g);
            let d = op.to_dense();
            prop_assert!(d.sub(&d.transpose()).unwrap().max_abs() == 0.0);
            prop_assert!(d.as_slice().iter().all(|&v| v >= 0.0));
            // Spectral radius ≤ 1 through the dense symmetric eigensolver.
            let m = nalgebra::DMatrix::from_row_slice(n, n, d.as_slice());
            let ev = m.symmetric_eigenvalues();
            prop_assert!(ev.iter().all(|v| v.abs() <= 1.0 + 1e-12));
        }
    }
}
