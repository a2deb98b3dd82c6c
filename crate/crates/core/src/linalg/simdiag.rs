use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{hermitian_eigen, re, Complex64, ComplexMatrix, Tolerance};
use crate::error::{Error, Result};

const MAX_ATTEMPTS: u64 = 16;
/// Relative eigenvalue gap below which a cluster is refined as a block.
const CLUSTER_GAP: f64 = 1e-6;

/// Joint unitary diagonalization `V · M_i · V* = D_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimultaneousDiagonalization {
    pub unitary: ComplexMatrix,
    pub diagonals: Vec<ComplexMatrix>,
}

/// Diagonalizes a family of pairwise commuting normal matrices by one
/// unitary.
///
/// A generic real combination of the Hermitian and skew parts is
/// diagonalized first; eigenvalue clusters of that combination are then
/// refined recursively on the compressed blocks. Coefficient draws come
/// from a fixed seed sequence, so the result is deterministic.
pub fn simultaneous_diagonalize(
    ms: &[ComplexMatrix],
    tol: &Tolerance,
) -> Result<SimultaneousDiagonalization> {
    let first = ms.first().ok_or(Error::Empty("no matrices to diagonalize"))?;
    let n = first.require_square()?;
    for (i, m) in ms.iter().enumerate() {
        m.require_shape((n, n))?;
        let adj = m.adjoint();
        let residual = (m * &adj).distance(&(&adj * m));
        if !tol.accepts(residual, m.frobenius_norm() * m.frobenius_norm()) {
            return Err(Error::NotNormal { index: i, residual });
        }
    }
    for i in 0..ms.len() {
        for j in i + 1..ms.len() {
            let residual = ms[i].commutator(&ms[j]).frobenius_norm();
            let scale = ms[i].frobenius_norm() * ms[j].frobenius_norm();
            if !tol.accepts(residual, scale) {
                return Err(Error::NotCommuting {
                    first: i,
                    second: j,
                    residual,
                });
            }
        }
    }

    let mut worst = (0usize, 0.0f64);
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(attempt);
        let basis = joint_basis(ms, &mut rng, n)?;
        let unitary = basis.adjoint();
        let mut diagonals = Vec::with_capacity(ms.len());
        let mut ok = true;
        for (i, m) in ms.iter().enumerate() {
            let conj = &(&unitary * m) * &basis;
            let off = conj.off_diagonal_norm();
            if !tol.accepts(off, m.frobenius_norm()) {
                ok = false;
                if off > worst.1 {
                    worst = (i, off);
                }
                break;
            }
            diagonals.push(conj.diagonal_part());
        }
        if ok {
            return Ok(SimultaneousDiagonalization { unitary, diagonals });
        }
    }
    Err(Error::Decomposition {
        index: worst.0,
        residual: worst.1,
    })
}

/// Orthonormal columns `X` with `X* M_i X` diagonal for every `i`.
fn joint_basis(ms: &[ComplexMatrix], rng: &mut ChaCha8Rng, depth: usize) -> Result<ComplexMatrix> {
    let n = ms[0].rows();
    let mut h = ComplexMatrix::zeros(n, n);
    for m in ms {
        let scale = m.frobenius_norm();
        if scale == 0.0 {
            continue;
        }
        let c: f64 = 0.5 + rng.random::<f64>();
        let d: f64 = 0.5 + rng.random::<f64>();
        h = &h + &m.hermitian_part().scale_real(c / scale);
        h = &h + &m.skew_hermitian_part().scale_real(d / scale);
    }
    let (values, mut vectors) = hermitian_eigen(&h)?;
    if depth == 0 || n == 1 {
        return Ok(vectors);
    }
    let spread = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end - 1] - values[end] <= CLUSTER_GAP * spread {
            end += 1;
        }
        if end - start > 1 {
            refine_cluster(ms, &mut vectors, start, end, rng, depth - 1)?;
        }
        start = end;
    }
    Ok(vectors)
}

fn refine_cluster(
    ms: &[ComplexMatrix],
    vectors: &mut ComplexMatrix,
    start: usize,
    end: usize,
    rng: &mut ChaCha8Rng,
    depth: usize,
) -> Result<()> {
    let n = vectors.rows();
    let k = end - start;
    let cols = ComplexMatrix::wrap(vectors.as_dmatrix().columns(start, k).into_owned());
    let compressed: Vec<ComplexMatrix> = ms.iter().map(|m| &(&cols.adjoint() * m) * &cols).collect();
    let all_scalar = compressed.iter().all(|c| {
        let mean = c.trace() / re(k as f64);
        c.distance(&ComplexMatrix::scalar(k, mean)) <= 1e-13 * c.frobenius_norm().max(1e-300)
    });
    if all_scalar {
        return Ok(());
    }
    let inner = joint_basis(&compressed, rng, depth)?;
    let rotated = &cols * &inner;
    let mut full: DMatrix<Complex64> = vectors.as_dmatrix().clone();
    for j in 0..k {
        for i in 0..n {
            full[(i, start + j)] = rotated.get(i, j);
        }
    }
    *vectors = ComplexMatrix::wrap(full);
    Ok(())
}
