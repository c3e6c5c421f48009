//! Thin SVD by one-sided (Hestenes) Jacobi rotations.
//!
//! Columns of the taller orientation are orthogonalized pairwise until every
//! pair is orthogonal to working precision; column norms are then the
//! singular values.

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// `a = u * diag(s) * v^T` with `u: m x r`, `v: n x r`, `r = min(m, n)`,
/// singular values non-increasing. Stored row-major.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    pub u: Vec<Vec<f64>>,
    pub s: Vec<f64>,
    pub v: Vec<Vec<f64>>,
}

pub fn thin_svd(a: &[Vec<f64>]) -> Result<ThinSvd> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    if m == 0 || n == 0 {
        return Err(Error::Parameter("SVD of an empty matrix".into()));
    }
    if let Some(row) = a.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: row.len(),
        });
    }
    if m >= n {
        let cols: Vec<Vec<f64>> = (0..n).map(|j| a.iter().map(|r| r[j]).collect()).collect();
        let (u, s, v) = orthogonalize(cols)?;
        Ok(ThinSvd { u, s, v })
    } else {
        // rows of `a` are the columns of `a^T`
        let (v, s, u) = orthogonalize(a.to_vec())?;
        Ok(ThinSvd { u, s, v })
    }
}

/// Given the columns of an `m x n` matrix (`m >= n`), returns `(U, s, V)`
/// row-major with `U: m x n`, `V: n x n`.
type Factors = (Vec<Vec<f64>>, Vec<f64>, Vec<Vec<f64>>);

fn orthogonalize(mut cols: Vec<Vec<f64>>) -> Result<Factors> {
    let n = cols.len();
    let m = cols[0].len();
    let mut vcols: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    // pairs are orthogonal once the cosine between them is at rounding level
    let tol = (m as f64).sqrt() * f64::EPSILON;
    // columns this small are numerically zero; rotating them only churns noise
    let frob2: f64 = cols.iter().flatten().map(|x| x * x).sum();
    let negligible = frob2 * (f64::EPSILON * f64::EPSILON);
    let mut converged = n < 2;
    let mut residual = 0.0;
    for _ in 0..MAX_SWEEPS {
        residual = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = dots(&cols[p], &cols[q]);
                if gamma == 0.0 || alpha <= negligible || beta <= negligible {
                    continue;
                }
                let off = gamma.abs() / (alpha * beta).sqrt();
                residual = residual.max(off);
                if off <= tol {
                    continue;
                }
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, p, q, c, s);
                rotate(&mut vcols, p, q, c, s);
            }
        }
        if residual <= tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence {
            sweeps: MAX_SWEEPS,
            residual,
        });
    }

    let mut order: Vec<(usize, f64)> = cols
        .iter()
        .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
        .enumerate()
        .collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

    let mut u = vec![vec![0.0; n]; m];
    let mut v = vec![vec![0.0; n]; n];
    let mut s = Vec::with_capacity(n);
    for (k, &(j, sigma)) in order.iter().enumerate() {
        s.push(sigma);
        if sigma > 0.0 {
            for i in 0..m {
                u[i][k] = cols[j][i] / sigma;
            }
        }
        for i in 0..n {
            v[i][k] = vcols[j][i];
        }
    }
    Ok((u, s, v))
}

fn dots(a: &[f64], b: &[f64]) -> (f64, f64, f64) {
    let mut aa = 0.0;
    let mut bb = 0.0;
    let mut ab = 0.0;
    for (x, y) in a.iter().zip(b) {
        aa += x * x;
        bb += y * y;
        ab += x * y;
    }
    (aa, bb, ab)
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    let (cp, cq) = (&mut left[p], &mut right[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(svd: &ThinSvd) -> Vec<Vec<f64>> {
        let m = svd.u.len();
        let n = svd.v.len();
        (0..m)
            .map(|i| {
                (0..n)
                    .map(|j| (0..svd.s.len()).map(|k| svd.u[i][k] * svd.s[k] * svd.v[j][k]).sum())
                    .collect()
            })
            .collect()
    }

    fn max_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
        a.iter()
            .flatten()
            .zip(b.iter().flatten())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn identity() {
        let a = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let svd = thin_svd(&a).unwrap();
        assert_eq!(svd.s, vec![1.0, 1.0, 1.0]);
        assert!(max_diff(&reconstruct(&svd), &a) < 1e-15);
    }

    #[test]
    fn wide_and_tall_reconstruct() {
        let wide = vec![vec![3.0, 1.0, 0.5, -2.0], vec![0.0, 2.0, 1.0, 1.0]];
        let tall: Vec<Vec<f64>> = (0..4).map(|j| wide.iter().map(|r| r[j]).collect()).collect();
        for a in [wide, tall] {
            let svd = thin_svd(&a).unwrap();
            assert!(max_diff(&reconstruct(&svd), &a) < 1e-13);
            assert!(svd.s.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn known_singular_values() {
        // [[3, 0], [4, 5]] has singular values sqrt(45) and sqrt(5)
        let svd = thin_svd(&[vec![3.0, 0.0], vec![4.0, 5.0]]).unwrap();
        assert!((svd.s[0] - 45f64.sqrt()).abs() < 1e-13);
        assert!((svd.s[1] - 5f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn rank_deficient_has_zero_tail() {
        let a = vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0], vec![1.0, 0.0, 1.0]];
        let svd = thin_svd(&a).unwrap();
        assert!(svd.s[2] < 1e-12);
        assert!(max_diff(&reconstruct(&svd), &a) < 1e-13);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(thin_svd(&[]).is_err());
        assert!(thin_svd(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }
}
