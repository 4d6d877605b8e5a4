use super::gegenbauer::gegenbauer_unchecked;
use crate::error::{invalid, Result};
use crate::linalg::Mat;
use crate::sphere_data::FeatureSet;

/// Empirical projection kernel onto degree-`ℓ` harmonics:
/// `(Z_ℓ)_{kk'} = ((ℓ+λ)/λ) C_ℓ^{(λ)}(⟨x_k, x_k'⟩) / n`.
pub fn zonal_projection_matrix(features: &FeatureSet, ell: usize) -> Result<Mat> {
    if features.augmented {
        return Err(invalid(
            "features",
            "zonal projections need un-augmented points",
        ));
    }
    let d = features.d;
    if d < 3 {
        return Err(invalid("d", format!("must be at least 3, got {d}")));
    }
    let lam = (d as f64 - 2.0) / 2.0;
    let n = features.n();
    let scale = (ell as f64 + lam) / lam / n as f64;
    Ok(Mat::symmetric_from_fn(n, |i, k| {
        let u = if i == k {
            1.0
        } else {
            features.inner(i, k).clamp(-1.0, 1.0)
        };
        scale * gegenbauer_unchecked(ell, lam, u)
    }))
}
