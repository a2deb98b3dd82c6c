use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{c64, condition_ratio, polar_decompose, Complex64, ComplexMatrix, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub seed: u64,
    pub max_restarts: usize,
    /// Normalized singular values at or below this span the null space.
    pub null_threshold: f64,
    /// Largest accepted relative residual `‖U* G' U − G‖ / max(‖G‖, ‖G'‖)`.
    pub accept: f64,
}

impl SolverOptions {
    pub fn from_tolerance(tol: &Tolerance) -> Self {
        Self {
            seed: 0,
            max_restarts: 64,
            null_threshold: (100.0 * tol.rel).max(1e-13),
            accept: (100.0 * tol.rel).max(1e-13),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConjugatorOutcome {
    Found {
        unitary: ComplexMatrix,
        residual: f64,
    },
    /// Certified: the linear system has no nonzero solution, or every
    /// solution drawn is singular (generic rank below the dimension).
    NoSolution {
        nullity: usize,
        generic_rank: usize,
        /// Smallest normalized singular value of the system when the null
        /// space is trivial, otherwise `1 − ` the best condition ratio seen.
        residual: f64,
    },
    /// Invertible null-space elements exist but none verified.
    GaveUp {
        nullity: usize,
        best_residual: f64,
    },
}

/// Stacked `I ⊗ G' − Gᵀ ⊗ I` over all pairs, each block scaled by
/// `1 / max(‖G‖, ‖G'‖)`; `vec` is column-major.
fn system(pairs: &[(ComplexMatrix, ComplexMatrix)], d: usize) -> DMatrix<Complex64> {
    let dd = d * d;
    let id = DMatrix::<Complex64>::identity(d, d);
    let mut k = DMatrix::<Complex64>::zeros(pairs.len() * dd, dd);
    for (i, (g, g2)) in pairs.iter().enumerate() {
        let scale = g.frobenius_norm().max(g2.frobenius_norm());
        if scale == 0.0 {
            continue;
        }
        let block = id.kronecker(g2.as_dmatrix()) - g.as_dmatrix().transpose().kronecker(&id);
        k.view_mut((i * dd, 0), (dd, dd)).copy_from(&(block / c64(scale, 0.0)));
    }
    k
}

fn null_basis(k: &DMatrix<Complex64>, d: usize, threshold: f64) -> (Vec<ComplexMatrix>, f64) {
    let dd = d * d;
    let svd = k.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut basis = Vec::new();
    let mut smallest_kept = f64::INFINITY;
    for j in 0..dd {
        let sigma = svd.singular_values[j];
        if sigma <= threshold {
            let v = v_t.row(j).adjoint();
            basis.push(ComplexMatrix::wrap(DMatrix::from_fn(d, d, |r, c| v[c * d + r])));
        } else {
            smallest_kept = smallest_kept.min(sigma);
        }
    }
    (basis, smallest_kept)
}

fn relative_residual(u: &ComplexMatrix, pairs: &[(ComplexMatrix, ComplexMatrix)]) -> f64 {
    pairs
        .iter()
        .map(|(g, g2)| {
            let scale = g.frobenius_norm().max(g2.frobenius_norm());
            if scale == 0.0 {
                return 0.0;
            }
            (&(&u.adjoint() * g2) * u).distance(g) / scale
        })
        .fold(0.0, f64::max)
}

fn rank(m: &ComplexMatrix, threshold: f64) -> usize {
    let sv = m.singular_values();
    let top = sv.first().copied().unwrap_or(0.0);
    sv.iter().filter(|&&s| s > threshold * top).count()
}

/// Finds a unitary `U` with `U* G'_i U = G_i` for every pair `(G_i, G'_i)`.
pub fn solve_joint_conjugator(pairs: &[(ComplexMatrix, ComplexMatrix)], tol: &Tolerance) -> Result<ConjugatorOutcome> {
    solve_joint_conjugator_with(pairs, &SolverOptions::from_tolerance(tol))
}

/// Solutions of `G'_i X = X G_i` form a linear space; for invertible `X`
/// in it, `X*X` commutes with every `G_i`, so the polar factor of `X`
/// solves the unitary problem. Random combinations of a null basis are
/// tried until one is invertible and verifies.
pub fn solve_joint_conjugator_with(
    pairs: &[(ComplexMatrix, ComplexMatrix)],
    opts: &SolverOptions,
) -> Result<ConjugatorOutcome> {
    let Some((first, _)) = pairs.first() else {
        return Err(Error::Empty("conjugator constraints"));
    };
    let d = first.require_square()?;
    for (g, g2) in pairs {
        g.require_shape((d, d))?;
        g2.require_shape((d, d))?;
    }
    let k = system(pairs, d);
    let (basis, smallest_kept) = null_basis(&k, d, opts.null_threshold);
    let nullity = basis.len();
    if nullity == 0 {
        return Ok(ConjugatorOutcome::NoSolution {
            nullity,
            generic_rank: 0,
            residual: smallest_kept,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut generic_rank = 0;
    let mut best_ratio: f64 = 0.0;
    let mut best_residual = f64::INFINITY;
    for _ in 0..opts.max_restarts.max(1) {
        let x = basis.iter().fold(ComplexMatrix::zeros(d, d), |acc, b| {
            let c = c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            &acc + &b.scale(c)
        });
        generic_rank = generic_rank.max(rank(&x, opts.null_threshold));
        let ratio = condition_ratio(&x);
        best_ratio = best_ratio.max(ratio);
        if ratio <= opts.null_threshold {
            continue;
        }
        let u = polar_decompose(&x)?.unitary;
        let residual = relative_residual(&u, pairs);
        if residual <= opts.accept {
            return Ok(ConjugatorOutcome::Found { unitary: u, residual });
        }
        best_residual = best_residual.min(residual);
    }
    if generic_rank < d {
        return Ok(ConjugatorOutcome::NoSolution {
            nullity,
            generic_rank,
            residual: 1.0 - best_ratio,
        });
    }
    Ok(ConjugatorOutcome::GaveUp { nullity, best_residual })
}
