//! Lowest eigenpair of a symmetric operator by Lanczos with full
//! reorthogonalisation.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub(crate) struct LanczosOptions {
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub(crate) struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn lowest_ritz(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let k = alpha.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let (idx, &theta) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty tridiagonal");
    (theta, eig.eigenvectors.column(idx).iter().copied().collect())
}

/// `‖Aψ − θψ‖` for unit `ψ`.
pub(crate) fn residual_norm(
    apply: &dyn Fn(&[f64], &mut [f64]),
    theta: f64,
    psi: &[f64],
) -> f64 {
    let mut w = vec![0.0; psi.len()];
    apply(psi, &mut w);
    axpy(-theta, psi, &mut w);
    dot(&w, &w).sqrt()
}

/// Converges when the Ritz residual `‖Aψ − θψ‖` drops to `tol`; the residual
/// is estimated from the tridiagonal matrix and confirmed on the
/// reconstructed vector.
pub(crate) fn lowest_eigenpair(
    apply: &dyn Fn(&[f64], &mut [f64]),
    dim: usize,
    opts: &LanczosOptions,
) -> Result<Eigenpair> {
    if !(opts.tol > 0.0) {
        return Err(Error::invalid("Lanczos tolerance must be positive"));
    }
    if opts.max_iter == 0 {
        return Err(Error::invalid("Lanczos max_iter must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let norm = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= norm);

    let steps = opts.max_iter.min(dim);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(steps);
    let mut alpha = Vec::with_capacity(steps);
    let mut beta: Vec<f64> = Vec::with_capacity(steps);
    let mut history = Vec::new();
    let mut w = vec![0.0; dim];

    for k in 0..steps {
        w.iter_mut().for_each(|x| *x = 0.0);
        apply(&v, &mut w);
        let a = dot(&w, &v);
        alpha.push(a);
        basis.push(std::mem::take(&mut v));
        // two passes of classical Gram–Schmidt against the whole basis
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                axpy(-c, q, &mut w);
            }
        }
        let b = dot(&w, &w).sqrt();
        let exhausted = b <= 1e-13 * a.abs().max(1.0) || k + 1 == dim;

        let check = exhausted || k + 1 == steps || k % 4 == 3;
        if check {
            let (theta, y) = lowest_ritz(&alpha, &beta);
            let estimate = b * y[k].abs();
            history.push(estimate);
            if estimate <= opts.tol || exhausted {
                let mut psi = vec![0.0; dim];
                for (q, c) in basis.iter().zip(&y) {
                    axpy(*c, q, &mut psi);
                }
                let n = dot(&psi, &psi).sqrt();
                psi.iter_mut().for_each(|x| *x /= n);
                let residual = residual_norm(apply, theta, &psi);
                if residual <= opts.tol || exhausted {
                    return Ok(Eigenpair {
                        value: theta,
                        vector: psi,
                        residual,
                        iterations: k + 1,
                    });
                }
            }
        }
        beta.push(b);
        v = w.iter().map(|x| x / b).collect();
    }
    Err(Error::NotConverged {
        solver: "lanczos",
        iterations: steps,
        residual: history.last().copied().unwrap_or(f64::NAN),
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_operator() {
        let diag: Vec<f64> = (0..200).map(|i| (i as f64 * 0.37).sin() + i as f64 * 0.01).collect();
        let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
        let d2 = diag.clone();
        let apply = move |x: &[f64], y: &mut [f64]| {
            for i in 0..x.len() {
                y[i] += d2[i] * x[i];
            }
        };
        let opts = LanczosOptions {
            max_iter: 200,
            tol: 1e-10,
            seed: 1,
        };
        let e = lowest_eigenpair(&apply, diag.len(), &opts).unwrap();
        assert!((e.value - min).abs() < 1e-10);
        assert!(e.residual <= 1e-10);
    }

    #[test]
    fn reports_non_convergence() {
        let apply = |x: &[f64], y: &mut [f64]| {
            for i in 0..x.len() {
                y[i] += (i as f64).sqrt() * x[i];
            }
        };
        let opts = LanczosOptions {
            max_iter: 3,
            tol: 1e-14,
            seed: 0,
        };
        let err = lowest_eigenpair(&apply, 500, &opts).unwrap_err();
        assert!(err.is_convergence_failure());
    }
}
