//! Companion linearization of a matrix polynomial and a small GEP solver.

use num_complex::Complex64;

use super::{eig, LinalgError, Lu, RMatrix};

/// M(x) = M0 + x M1 + ... + x^l Ml  ->  pencil A - x B of size l*dim.
///
/// A = [[0, I, ..], .., [-M0, .., -M_{l-1}]], B = diag(I, .., I, Ml).
pub fn pep_to_gep(ms: &[RMatrix]) -> Result<(RMatrix, RMatrix), LinalgError> {
    if ms.len() < 2 {
        return Err(LinalgError::Dimension("need at least M0 and M1".into()));
    }
    let d = ms[0].rows();
    if ms.iter().any(|m| m.rows() != d || m.cols() != d) {
        return Err(LinalgError::Dimension("coefficient blocks differ in shape".into()));
    }
    let l = ms.len() - 1;
    let size = l * d;
    let mut a = RMatrix::zeros(size, size);
    let mut b = RMatrix::zeros(size, size);
    for blk in 0..l - 1 {
        for i in 0..d {
            a[(blk * d + i, (blk + 1) * d + i)] = 1.0;
        }
    }
    for (blk, m) in ms[..l].iter().enumerate() {
        for i in 0..d {
            for j in 0..d {
                a[((l - 1) * d + i, blk * d + j)] = -m[(i, j)];
            }
        }
    }
    for i in 0..(l - 1) * d {
        b[(i, i)] = 1.0;
    }
    for i in 0..d {
        for j in 0..d {
            b[((l - 1) * d + i, (l - 1) * d + j)] = ms[l][(i, j)];
        }
    }
    Ok((a, b))
}

/// Finite eigenvalues of A x = lambda B x by shift-and-invert.
pub fn gep_eigenvalues(a: &RMatrix, b: &RMatrix) -> Result<Vec<Complex64>, LinalgError> {
    let scale = a.max_abs().max(b.max_abs()).max(1.0);
    for sigma in [0.6180339887, -1.3247179572, std::f64::consts::E, -std::f64::consts::FRAC_1_PI] {
        let shifted = a.sub(&b.scale(sigma));
        let lu = Lu::new(&shifted);
        if lu.rcond() < 1e-13 {
            continue;
        }
        let k = lu.solve(b);
        let r = eig(&k)?;
        let kn = k.max_abs().max(1.0);
        return Ok(r
            .values
            .into_iter()
            .filter(|mu| mu.norm() > 1e-12 * kn)
            .map(|mu| Complex64::new(sigma, 0.0) + mu.inv())
            .filter(|x| x.norm() < 1e12 * scale)
            .collect());
    }
    Err(LinalgError::SingularPivot { rcond: 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::det;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close_to(vals: &[Complex64], x: f64, tol: f64) -> bool {
        vals.iter().any(|v| (v - Complex64::new(x, 0.0)).norm() < tol)
    }

    #[test]
    fn linear_case_matches_standard_problem() {
        let m0 = RMatrix::from_rows(&[vec![1.0, 2.0], vec![0.5, -1.0]]);
        let m1 = RMatrix::from_rows(&[vec![2.0, 0.0], vec![1.0, 1.0]]);
        let (a, b) = pep_to_gep(&[m0.clone(), m1.clone()]).unwrap();
        let vals = gep_eigenvalues(&a, &b).unwrap();
        let std = eig(&Lu::new(&m1).solve(&m0).scale(-1.0)).unwrap().values;
        assert_eq!(vals.len(), 2);
        for v in std {
            assert!(vals.iter().any(|w| (w - v).norm() < 1e-10));
        }
    }

    #[test]
    fn scalar_quadratic() {
        let m = |x: f64| RMatrix::from_rows(&[vec![x]]);
        let (a, b) = pep_to_gep(&[m(6.0), m(-5.0), m(1.0)]).unwrap();
        let vals = gep_eigenvalues(&a, &b).unwrap();
        assert_eq!(vals.len(), 2);
        assert!(close_to(&vals, 2.0, 1e-10) && close_to(&vals, 3.0, 1e-10));
    }

    #[test]
    fn planted_root() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut r = || RMatrix::from_vec(2, 2, (0..4).map(|_| rng.random_range(-1.0..1.0)).collect());
        let m1 = r();
        let m2 = r();
        // M0 chosen so M0 + M1 + M2 has a zero first column
        let mut m0 = m1.add(&m2).scale(-1.0);
        m0[(0, 1)] += 0.7;
        m0[(1, 1)] -= 0.3;
        let at_one = m0.add(&m1).add(&m2);
        assert!(det(&at_one).abs() < 1e-14);
        let (a, b) = pep_to_gep(&[m0, m1, m2]).unwrap();
        let vals = gep_eigenvalues(&a, &b).unwrap();
        assert!(close_to(&vals, 1.0, 1e-8), "{vals:?}");
    }
}
