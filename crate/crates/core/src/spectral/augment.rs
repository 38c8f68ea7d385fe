use crate::error::{dim, param, Result};
use crate::graph::FeatureMatrix;
use crate::spectral::eigenpairs::EigenPairs;
use crate::tensor::DenseMatrix;

/// `X ‖ scale·U`: features with eigenvector columns appended.
#[derive(Clone, Debug, PartialEq)]
pub struct AugmentedFeatures {
    pub base_d: usize,
    pub t: usize,
    pub scale: f64,
    pub values: DenseMatrix,
}

/// Scale that gives unit-norm eigenvector columns unit root-mean-square
/// entries, matching standardized features.
pub fn unit_rms_scale(n: usize) -> f64 {
    (n.max(1) as f64).sqrt()
}

pub fn augment_features(x: &FeatureMatrix, pairs: &EigenPairs, scale: f64) -> Result<AugmentedFeatures> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(param("scale", format!("must be positive and finite, got {scale}")));
    }
    let t = pairs.t();
    if t > 0 && pairs.n() != x.n() {
        return Err(dim(format!("eigenvectors of length {} for {} feature rows", pairs.n(), x.n())));
    }
    let d = x.d();
    let values = DenseMatrix::from_fn(x.n(), d + t, |i, j| {
        if j < d {
            x.row(i)[j]
        } else {
            scale * pairs.eigenvectors[j - d][i]
        }
    });
    Ok(AugmentedFeatures {
        base_d: d,
        t,
        scale,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SparseGraph;
    use crate::spectral::dense::dense_eig_oracle;

    fn k2_top() -> EigenPairs {
        let g = SparseGraph::from_edges(2, [(0, 1)]).unwrap();
        dense_eig_oracle(&g).unwrap().truncated(1).unwrap()
    }

    fn x2() -> FeatureMatrix {
        FeatureMatrix::new(DenseMatrix::zeros(2, 1)).unwrap()
    }

    #[test]
    fn no_pairs_is_identity() {
        let p = k2_top().truncated(0).unwrap();
        let a = augment_features(&x2(), &p, 1.0).unwrap();
        assert_eq!(&a.values, x2().as_dense());
        assert_eq!(a.t, 0);
    }

    #[test]
    fn k2_column_is_positive_perron_vector() {
        let a = augment_features(&x2(), &k2_top(), 1.0).unwrap();
        let c = 0.5f64.sqrt();
        assert_eq!(a.values.cols(), 2);
        assert_eq!(a.values.get(0, 0), 0.0);
        assert!((a.values.get(0, 1) - c).abs() < 1e-15 && (a.values.get(1, 1) - c).abs() < 1e-15);
    }

    #[test]
    fn scale_is_linear() {
        let a1 = augment_features(&x2(), &k2_top(), 1.0).unwrap();
        let a2 = augment_features(&x2(), &k2_top(), 2.0).unwrap();
        for i in 0..2 {
            assert_eq!(a2.values.get(i, 1), 2.0 * a1.values.get(i, 1));
        }
    }

    #[test]
    fn errors() {
        let x3 = FeatureMatrix::new(DenseMatrix::zeros(3, 1)).unwrap();
        assert!(augment_features(&x3, &k2_top(), 1.0).is_err());
        assert!(augment_features(&x2(), &k2_top(), 0.0).is_err());
    }

    #[test]
    fn unit_rms_scale_gives_unit_rms_columns() {
        let g = SparseGraph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let pairs = dense_eig_oracle(&g).unwrap().truncated(2).unwrap();
        let x = FeatureMatrix::new(DenseMatrix::zeros(5, 1)).unwrap();
        let aug = augment_features(&x, &pairs, unit_rms_scale(5)).unwrap();
        for j in 1..3 {
            let ms: f64 = (0..5).map(|i| aug.values.get(i, j).powi(2)).sum::<f64>() / 5.0;
            assert!((ms - 1.0).abs() < 1e-12);
        }
    }
}
