//! Dense helpers: null spaces, least squares, Hermitian spectra, matrix exponential.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fock::{OperatorMatrix, C64};

/// Singular values sorted descending together with the matching right singular vectors.
fn sorted_svd(m: &DMatrix<C64>) -> (Vec<f64>, Vec<DVector<C64>>) {
    let n = m.ncols();
    // pad to a square matrix so v_t always carries the full right basis
    let rows = m.nrows().max(n);
    let mut sq = DMatrix::from_element(rows, n, C64::new(0.0, 0.0));
    sq.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("requested v_t");
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv = idx.iter().map(|&k| svd.singular_values[k]).collect();
    let vecs = idx
        .iter()
        .map(|&k| vt.row(k).transpose().map(|z| z.conj()))
        .collect();
    (sv, vecs)
}

/// Null space by singular-value thresholding at `rel_tol · σ_max`.
/// `min_dim` forces at least that many (smallest) singular directions, used
/// when an analytic gate says the system is singular but roundoff disagrees.
pub fn null_space(m: &DMatrix<C64>, rel_tol: f64, min_dim: usize) -> (Vec<DVector<C64>>, f64) {
    let (sv, vecs) = sorted_svd(m);
    let smax = sv.first().copied().unwrap_or(0.0);
    let cut = rel_tol * smax.max(f64::MIN_POSITIVE);
    let mut count = sv.iter().filter(|&&s| s <= cut).count();
    count = count.max(min_dim).min(vecs.len());
    let n = vecs.len();
    let margin = if count > 0 { sv[n - count] / smax.max(f64::MIN_POSITIVE) } else { 0.0 };
    (vecs[n - count..].to_vec(), margin)
}

/// Minimum-norm least-squares solution and its residual ‖Mx − b‖.
pub fn lstsq(m: &DMatrix<C64>, b: &DVector<C64>, rel_tol: f64) -> (DVector<C64>, f64) {
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let x = svd
        .solve(b, rel_tol * smax.max(f64::MIN_POSITIVE))
        .expect("u and v_t computed");
    let r = (m * &x - b).norm();
    (x, r)
}

/// Sorted eigenvalues of a Hermitian matrix restricted to the masked subspace.
pub fn hermitian_eigenvalues(op: &OperatorMatrix, mask: &[bool], herm_tol: f64) -> Result<Vec<f64>> {
    let keep: Vec<usize> = (0..mask.len()).filter(|&i| mask[i]).collect();
    let pos: Vec<Option<usize>> = {
        let mut p = vec![None; mask.len()];
        for (k, &i) in keep.iter().enumerate() {
            p[i] = Some(k);
        }
        p
    };
    let n = keep.len();
    let mut m = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for (r, c, v) in op.entries() {
        if let (Some(i), Some(j)) = (pos[r], pos[c]) {
            m[(i, j)] = v;
        }
    }
    let asym = (&m - m.adjoint()).norm();
    if asym > herm_tol * (1.0 + m.norm()) {
        return Err(Error::Domain(format!("operator is not Hermitian on the interior (‖H−H†‖={asym:e})")));
    }
    let m = (&m + m.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// exp(M) for a sparse operator, via nalgebra's Padé scaling-and-squaring.
pub fn expm(op: &OperatorMatrix) -> OperatorMatrix {
    let e = op.to_dense().exp();
    OperatorMatrix::from_dense(op.cutoff(), &e, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_generators, FockCutoff};

    #[test]
    fn null_space_of_rank_one() {
        let m = DMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(2.0, 0.0), C64::new(4.0, 0.0)]);
        let (ns, _) = null_space(&m, 1e-11, 0);
        assert_eq!(ns.len(), 1);
        assert!((&m * &ns[0]).norm() < 1e-14);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let m = DMatrix::from_row_slice(1, 3, &[C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)]);
        let (ns, _) = null_space(&m, 1e-11, 0);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!((&m * &v).norm() < 1e-14);
        }
    }

    #[test]
    fn spectrum_of_number_operator() {
        let g = build_generators(FockCutoff::square(2));
        let ev = hermitian_eigenvalues(&g.n, &g.cutoff.interior_mask(0).unwrap(), 1e-10).unwrap();
        let want = [0.0, 0.5, 0.5, 1.0, 1.0, 1.0, 1.5, 1.5, 2.0];
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(hermitian_eigenvalues(&g.a1, &g.cutoff.interior_mask(0).unwrap(), 1e-10).is_err());
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let c = FockCutoff::square(3);
        assert!(expm(&OperatorMatrix::zeros(c)).sub(&OperatorMatrix::identity(c)).unwrap().max_abs() < 1e-15);
    }
}
