use super::dense::DenseMatrix;
use crate::error::{dim, Error, Result};

/// Real-valued sparse operator in compressed sparse row form.
///
/// Products accumulate each output row in stored column order, so results
/// are bitwise reproducible.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != n_rows + 1 || row_offsets[0] != 0 {
            return Err(Error::Format("row_offsets must have n_rows+1 entries starting at 0".into()));
        }
        if row_offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Format("row_offsets must be nondecreasing".into()));
        }
        let nnz = row_offsets[n_rows];
        if col_indices.len() != nnz || values.len() != nnz {
            return Err(Error::Format(format!(
                "expected {nnz} entries, got {} indices and {} values",
                col_indices.len(),
                values.len()
            )));
        }
        if let Some(&c) = col_indices.iter().find(|&&c| c >= n_cols) {
            return Err(Error::Format(format!("column index {c} out of range {n_cols}")));
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            row_offsets: vec![0; n_rows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.n_rows
    }

    pub fn cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.col_indices[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.iter()
            .position(|&c| c == j)
            .map_or(0.0, |p| vals[p])
    }

    /// `y = self · x`.
    pub fn spmv(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n_cols);
        debug_assert_eq!(y.len(), self.n_rows);
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum();
        }
    }

    /// `self · h`.
    pub fn spmm(&self, h: &DenseMatrix) -> Result<DenseMatrix> {
        if self.n_cols != h.rows() {
            return Err(dim(format!(
                "spmm {}x{} operator by {}x{} matrix",
                self.n_rows,
                self.n_cols,
                h.rows(),
                h.cols()
            )));
        }
        let mut out = DenseMatrix::zeros(self.n_rows, h.cols());
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            let o = out.row_mut(i);
            for (&c, &v) in cols.iter().zip(vals) {
                for (o, &x) in o.iter_mut().zip(h.row(c)) {
                    *o += v * x;
                }
            }
        }
        Ok(out)
    }

    /// `selfᵀ · h`, scattering rows in CSR order.
    pub fn spmm_t(&self, h: &DenseMatrix) -> Result<DenseMatrix> {
        if self.n_rows != h.rows() {
            return Err(dim(format!(
                "spmm_t {}x{} operatorᵀ by {}x{} matrix",
                self.n_rows,
                self.n_cols,
                h.rows(),
                h.cols()
            )));
        }
        let mut out = DenseMatrix::zeros(self.n_cols, h.cols());
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            let src = h.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                for (o, &x) in out.row_mut(c).iter_mut().zip(src) {
                    *o += v * x;
                }
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                d.set(i, c, d.get(i, c) + v);
            }
        }
        d
    }
}

/// Sparse-dense product `op · h`.
pub fn spmm(op: &CsrMatrix, h: &DenseMatrix) -> Result<DenseMatrix> {
    op.spmm(h)
}
