use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::shift::BilateralShift;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// `grams[n − 1] = P_n* P_n` for `n = 1..=depth`, where `P_n` grows by one
/// weight (forward) or one adjoint weight (backward) per step.
#[derive(Debug, Clone, PartialEq)]
pub struct GramChain {
    pub direction: Direction,
    /// Index of the first weight used.
    pub base: i64,
    pub grams: Vec<ComplexMatrix>,
}

/// Gram chains for the entry `V_k = U_{k, k+m}` of a diagonal-form
/// intertwiner.
///
/// Forward: `S_{m+k+n} ⋯ S_{m+k+1}` against `T_{k+n} ⋯ T_{k+1}`.
/// Backward: `S_{m+k+1−n}* ⋯ S_{m+k}*` against `T_{k+1−n}* ⋯ T_k*`.
/// `V_k` extends to unitary `V_{k±n}` iff `V_k* G^T_n V_k = G^S_n` for
/// every `n` in both directions.
#[derive(Debug, Clone, PartialEq)]
pub struct GramChains {
    pub m: i64,
    pub k_base: i64,
    pub forward_s: GramChain,
    pub forward_t: GramChain,
    pub backward_s: GramChain,
    pub backward_t: GramChain,
}

impl GramChains {
    /// `(G^S_n, G^T_n)` pairs in both directions, forward first.
    pub fn pairs(&self) -> Vec<(ComplexMatrix, ComplexMatrix)> {
        let fwd = self.forward_s.grams.iter().zip(&self.forward_t.grams);
        let bwd = self.backward_s.grams.iter().zip(&self.backward_t.grams);
        fwd.chain(bwd).map(|(a, b)| (a.clone(), b.clone())).collect()
    }
}

/// Both chains of one direction, scaled jointly when `rescale` is set so
/// long products stay finite. Joint scaling keeps `U* G' U = G` intact.
pub(crate) fn chain_pair(
    s: &BilateralShift,
    t: &BilateralShift,
    s_base: i64,
    t_base: i64,
    direction: Direction,
    depth: usize,
    rescale: bool,
) -> Result<(GramChain, GramChain)> {
    let step = |shift: &BilateralShift, base: i64, n: i64| -> Result<ComplexMatrix> {
        Ok(match direction {
            Direction::Forward => shift.weight(base + n)?.into_owned(),
            Direction::Backward => shift.weight(base - n)?.adjoint(),
        })
    };
    let mut ps = ComplexMatrix::identity(s.dim());
    let mut pt = ComplexMatrix::identity(t.dim());
    let mut gs = Vec::with_capacity(depth);
    let mut gt = Vec::with_capacity(depth);
    for n in 0..depth as i64 {
        ps = &step(s, s_base, n)? * &ps;
        pt = &step(t, t_base, n)? * &pt;
        if rescale {
            let c = ps.frobenius_norm().max(pt.frobenius_norm());
            if c > 0.0 {
                ps = ps.scale_real(1.0 / c);
                pt = pt.scale_real(1.0 / c);
            }
        }
        gs.push((&ps.adjoint() * &ps).hermitian_part());
        gt.push((&pt.adjoint() * &pt).hermitian_part());
    }
    Ok((
        GramChain {
            direction,
            base: s_base,
            grams: gs,
        },
        GramChain {
            direction,
            base: t_base,
            grams: gt,
        },
    ))
}

pub(crate) fn chains_with(
    s: &BilateralShift,
    t: &BilateralShift,
    m: i64,
    k_base: i64,
    forward_depth: usize,
    backward_depth: usize,
    rescale: bool,
) -> Result<GramChains> {
    if s.dim() != t.dim() {
        return Err(Error::Dimension {
            expected: (s.dim(), s.dim()),
            found: (t.dim(), t.dim()),
        });
    }
    let (forward_s, forward_t) =
        chain_pair(s, t, m + k_base + 1, k_base + 1, Direction::Forward, forward_depth, rescale)?;
    let (backward_s, backward_t) = chain_pair(s, t, m + k_base, k_base, Direction::Backward, backward_depth, rescale)?;
    Ok(GramChains {
        m,
        k_base,
        forward_s,
        forward_t,
        backward_s,
        backward_t,
    })
}

/// Exact (unscaled) Gram chains to `depth` in both directions.
pub fn gram_chains(s: &BilateralShift, t: &BilateralShift, m: i64, k_base: i64, depth: usize) -> Result<GramChains> {
    if depth == 0 {
        return Err(Error::InvalidArgument(alloc::string::String::from("depth must be positive")));
    }
    chains_with(s, t, m, k_base, depth, depth, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift::{product_backward_adjoint, product_forward, WeightSequence};

    fn sample(seed: f64) -> BilateralShift {
        let w = (0..4)
            .map(|v| ComplexMatrix::from_real_rows(&[&[seed + v as f64, 1.0], &[0.5, -2.0 + seed]]))
            .collect();
        BilateralShift::new(WeightSequence::eventually_identity(-2, w).unwrap(), "s").unwrap()
    }

    #[test]
    fn identity_chains_are_identity() {
        let f = BilateralShift::unweighted(3);
        let c = gram_chains(&f, &f, 2, 0, 4).unwrap();
        for (a, b) in c.pairs() {
            assert_eq!(a, ComplexMatrix::identity(3));
            assert_eq!(b, ComplexMatrix::identity(3));
        }
    }

    #[test]
    fn chains_agree_with_explicit_products() {
        let (s, t) = (sample(1.0), sample(3.0));
        let (m, k) = (1, -1);
        let c = gram_chains(&s, &t, m, k, 5).unwrap();
        for n in 1..=5usize {
            let p = product_forward(&s, m + k + 1, n).unwrap();
            assert!(c.forward_s.grams[n - 1].distance(&(&p.adjoint() * &p)) < 1e-9);
            let q = product_backward_adjoint(&t, k + 1, n).unwrap();
            assert!(c.backward_t.grams[n - 1].distance(&(&q.adjoint() * &q)) < 1e-9);
        }
    }

    #[test]
    fn depth_one_forward_is_single_weight() {
        let s = sample(2.0);
        let c = gram_chains(&s, &s, 0, -1, 1).unwrap();
        let w = s.weight(0).unwrap();
        assert!(c.forward_s.grams[0].distance(&(&w.adjoint() * &*w)) < 1e-14);
        assert!(gram_chains(&s, &s, 0, 0, 0).is_err());
    }

    #[test]
    fn rescaled_chains_are_jointly_proportional() {
        let (s, t) = (sample(1.0), sample(1.5));
        let exact = chains_with(&s, &t, 0, 0, 6, 6, false).unwrap();
        let scaled = chains_with(&s, &t, 0, 0, 6, 6, true).unwrap();
        for ((a, b), (x, y)) in exact.pairs().iter().zip(scaled.pairs()) {
            let c = a.frobenius_norm() / x.frobenius_norm();
            assert!(a.distance(&x.scale_real(c)) < 1e-9 * a.frobenius_norm());
            assert!(b.distance(&y.scale_real(c)) < 1e-9 * b.frobenius_norm().max(1.0));
        }
    }
}
