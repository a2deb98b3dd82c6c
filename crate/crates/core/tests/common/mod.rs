//! Seeded generators shared by the property tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shiftlab_core::band::BandedOperator;
use shiftlab_core::linalg::{c64, condition_ratio, polar_decompose, re};
use shiftlab_core::{BilateralShift, ComplexMatrix, WeightSequence};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn matrix(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    let entries: Vec<_> = (0..d * d)
        .map(|_| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    ComplexMatrix::new(d, d, &entries).unwrap()
}

pub fn invertible(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    loop {
        let m = matrix(rng, d);
        if condition_ratio(&m) > 0.05 {
            return m;
        }
    }
}

pub fn unitary(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    polar_decompose(&invertible(rng, d)).unwrap().unitary
}

pub fn diagonal_unitary(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    let phases: Vec<_> = (0..d)
        .map(|_| {
            let a: f64 = rng.random_range(0.0..core::f64::consts::TAU);
            c64(a.cos(), a.sin())
        })
        .collect();
    ComplexMatrix::diagonal(&phases)
}

/// Rank-`r` orthogonal projection in a random basis.
pub fn projection(rng: &mut ChaCha8Rng, d: usize, r: usize) -> ComplexMatrix {
    let x = unitary(rng, d);
    let e: Vec<_> = (0..d).map(|i| re(if i < r { 1.0 } else { 0.0 })).collect();
    &(&x * &ComplexMatrix::diagonal(&e)) * &x.adjoint()
}

/// Eventually-identity shift with random invertible weights on `[lo, lo+len)`.
pub fn ei_shift(rng: &mut ChaCha8Rng, d: usize, lo: i64, len: usize) -> BilateralShift {
    let w = (0..len).map(|_| invertible(rng, d)).collect();
    BilateralShift::new(WeightSequence::eventually_identity(lo, w).unwrap(), "S").unwrap()
}

pub fn windowed_vector(rng: &mut ChaCha8Rng, lo: i64, hi: i64, d: usize) -> shiftlab_core::WindowedVector {
    let blocks = (lo..=hi)
        .map(|_| (0..d).map(|_| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())
        .collect();
    shiftlab_core::WindowedVector::new(lo, blocks).unwrap()
}

/// Two-band unitary with bands `0` and `k`, unitary on rows `[lo, hi]`.
///
/// `A_n = Q_n Ω_n`, `B_n = (I − Q_n) Z_n Ω_{n+k}` with `Z_n* Q_n Z_n = Q_{n+k}`;
/// the `Q_n` are rank-`r` projections and `Ω_n`, `Z_n` random unitaries.
pub fn two_band_unitary(rng: &mut ChaCha8Rng, d: usize, r: usize, k: i64, lo: i64, hi: i64) -> BandedOperator {
    let top = hi + k;
    let len = (top - lo + 1) as usize;
    let omega: Vec<_> = (0..len).map(|_| unitary(rng, d)).collect();
    let z: Vec<_> = (0..len).map(|_| unitary(rng, d)).collect();
    let mut q: Vec<ComplexMatrix> = Vec::with_capacity(len);
    for i in 0..len {
        if (i as i64) < k {
            q.push(projection(rng, d, r));
        } else {
            let j = i - k as usize;
            q.push(&(&z[j].adjoint() * &q[j]) * &z[j]);
        }
    }
    let id = ComplexMatrix::identity(d);
    let a = (0..len).map(|i| &q[i] * &omega[i]).collect();
    let b = (0..(hi - lo + 1) as usize)
        .map(|i| &(&(&id - &q[i]) * &z[i]) * &omega[i + k as usize])
        .collect();
    BandedOperator::from_bands([
        (0, WeightSequence::windowed(lo, a).unwrap()),
        (k, WeightSequence::windowed(lo, b).unwrap()),
    ])
    .unwrap()
}

/// `U_{n, n+k} = W_n (∑_{c : k_c = k} E_c) R*` for offsets `k_c` per
/// coordinate; rows `[lo, hi]`. Every offset in `bands` gets a band, zero
/// if no coordinate uses it.
pub fn coordinate_band_unitary(
    rng: &mut ChaCha8Rng,
    assignment: &[i64],
    bands: &[i64],
    r: &ComplexMatrix,
    lo: i64,
    hi: i64,
) -> BandedOperator {
    let d = assignment.len();
    let w: Vec<_> = (lo..=hi).map(|_| unitary(rng, d)).collect();
    let ops = bands.iter().map(|&k| {
        let e: Vec<_> = assignment.iter().map(|&kc| re(if kc == k { 1.0 } else { 0.0 })).collect();
        let er = &ComplexMatrix::diagonal(&e) * &r.adjoint();
        let seq = WeightSequence::windowed(lo, w.iter().map(|wn| wn * &er).collect()).unwrap();
        (k, seq)
    });
    BandedOperator::from_bands(ops).unwrap()
}
