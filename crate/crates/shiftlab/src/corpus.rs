//! Built-in worked examples. Surds are computed at load time.

use std::collections::BTreeMap;

use shiftlab_core::band::BandedOperator;
use shiftlab_core::linalg::{c64, re};
use shiftlab_core::{BilateralShift, Complex64, ComplexMatrix, WeightSequence};

use crate::spec::{Model, TaskDoc};

pub const EXAMPLES: [&str; 5] = ["ex31", "ex33-two-band", "ex33-three-band", "counterexample-sec2", "five-entry-block"];

/// Reconstructs a built-in example, tasks included.
pub fn example(name: &str) -> Option<Model> {
    Some(match name {
        "ex31" => ex31(),
        "ex33-two-band" => ex33_two_band(),
        "ex33-three-band" => ex33_three_band(),
        "counterexample-sec2" => counterexample(),
        "five-entry-block" => five_entry_block(),
        _ => return None,
    })
}

fn model(
    dim: usize,
    shifts: impl IntoIterator<Item = (&'static str, WeightSequence)>,
    operators: impl IntoIterator<Item = (&'static str, BandedOperator)>,
    tasks: Vec<TaskDoc>,
) -> Model {
    Model {
        dim,
        tolerance: None,
        shifts: shifts
            .into_iter()
            .map(|(n, w)| (n.to_string(), BilateralShift::new(w, n).expect("built-in weights are valid")))
            .collect(),
        operators: operators.into_iter().map(|(n, op)| (n.to_string(), op)).collect(),
        tasks,
    }
}

fn m2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> ComplexMatrix {
    ComplexMatrix::from_rows(&[&[a, b], &[c, d]])
}

fn diag(a: f64, b: f64) -> ComplexMatrix {
    ComplexMatrix::diagonal(&[re(a), re(b)])
}

fn expect(s: &str) -> Option<String> {
    Some(s.to_string())
}

/// `s_n = 1` at `n = 0` and `1/n` otherwise.
pub fn ex31_s(n: i64) -> f64 {
    if n == 0 {
        1.0
    } else {
        1.0 / n as f64
    }
}

pub const EX31_RADIUS: i64 = 16;

pub fn ex31_s_weight(n: i64) -> ComplexMatrix {
    let s = re(ex31_s(n));
    m2(s, s, -s, s)
}

pub fn ex31_t_weight(n: i64) -> ComplexMatrix {
    let (p, q) = (re(ex31_s(n - 1)), re(ex31_s(n + 1)));
    let w = c64(0.5, -0.5);
    let wb = w.conj();
    m2(p * w + q * wb, p * wb + q * w, -p * wb - q * w, p * w + q * wb)
}

/// Bands `−1` and `+1` of the two-band unitary.
pub fn ex31_bands() -> (ComplexMatrix, ComplexMatrix) {
    let h = re(0.5);
    let i = c64(0.0, 0.5);
    (m2(h, i, -i, h), m2(h, -i, i, h))
}

fn ex31() -> Model {
    let r = EX31_RADIUS;
    let s = WeightSequence::windowed_from_fn(-r, r, ex31_s_weight).expect("valid");
    let t = WeightSequence::windowed_from_fn(-r, r, ex31_t_weight).expect("valid");
    let (b, a) = ex31_bands();
    let u = BandedOperator::from_bands([
        (-1, WeightSequence::constant(b).expect("valid")),
        (1, WeightSequence::constant(a).expect("valid")),
    ])
    .expect("valid");
    let w = [-12, 12];
    let tasks = vec![
        TaskDoc::VerifyUnitaryTwoBand {
            operator: "U".into(),
            window: w,
            expect: expect("pass"),
        },
        TaskDoc::CheckTwoBandStructure {
            operator: "U".into(),
            window: w,
            expect: expect("pass"),
        },
        TaskDoc::VerifyIntertwining {
            operator: "U".into(),
            s: "S".into(),
            t: "T".into(),
            window: w,
            expect: expect("pass"),
        },
        TaskDoc::WeightNorms {
            shift: "S".into(),
            window: w,
        },
        TaskDoc::WeightNorms {
            shift: "T".into(),
            window: w,
        },
        TaskDoc::NormOffsetScreen {
            s: "S".into(),
            t: "T".into(),
            k_range: [-8, 8],
            window: w,
            expect: expect("empty"),
        },
        TaskDoc::Decide {
            s: "S".into(),
            t: "T".into(),
            m: None,
            m_range: Some([-5, 5]),
            depth: None,
            window: None,
            expect: expect("NotEquivalent"),
        },
    ];
    model(2, [("S", s), ("T", t)], [("U", u)], tasks)
}

fn ex33_two_band() -> Model {
    let zero = re(0.0);
    let a: Vec<_> = [re(1.0), c64(0.0, 1.0), re(-1.0), c64(0.0, -1.0)]
        .iter()
        .map(|&v| m2(zero, v, zero, zero))
        .collect();
    let b: Vec<_> = [1.0, -1.0].iter().map(|&v| m2(zero, zero, re(v), zero)).collect();
    let u = BandedOperator::from_bands([
        (-1, WeightSequence::periodic(a).expect("valid")),
        (1, WeightSequence::periodic(b).expect("valid")),
    ])
    .expect("valid");
    let s = WeightSequence::periodic(vec![diag(2.0, 1.0), diag(1.0, 3.0), diag(0.5, -2.0)]).expect("valid");
    let w = [-6, 6];
    let op = || "U".to_string();
    let tasks = vec![
        TaskDoc::VerifyUnitaryTwoBand {
            operator: op(),
            window: w,
            expect: expect("pass"),
        },
        TaskDoc::CheckTwoBandStructure {
            operator: op(),
            window: w,
            expect: expect("pass"),
        },
        TaskDoc::ConjugateToShift {
            operator: op(),
            shift: "S".into(),
            window: w,
            expect: expect("shift"),
        },
        TaskDoc::BandProjections {
            operator: op(),
            window: w,
            expect: expect("none"),
        },
    ];
    model(2, [("S", s)], [("U", u)], tasks)
}

fn ex33_three_band() -> Model {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let lower = WeightSequence::periodic(vec![diag(r, 0.0), diag(0.0, -r)]).expect("valid");
    let upper = WeightSequence::periodic(vec![diag(0.0, r), diag(-r, 0.0)]).expect("valid");
    let middle = WeightSequence::constant(ComplexMatrix::scalar(2, re(r))).expect("valid");
    let u = BandedOperator::from_bands([(-1, lower), (0, middle), (1, upper)]).expect("valid");
    let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let s = WeightSequence::periodic(vec![x.clone(), x.scale_real(-1.0)]).expect("valid");
    let w = [-10, 10];
    let tasks = vec![
        TaskDoc::VerifyUnitaryThreeBand {
            operator: "U".into(),
            window: w,
            expect: expect("pass"),
        },
        TaskDoc::VerifyUnitary {
            operator: "U".into(),
            window: w,
            expect: expect("pass"),
        },
        TaskDoc::VerifyIntertwining {
            operator: "U".into(),
            s: "S".into(),
            t: "S".into(),
            window: w,
            expect: expect("pass"),
        },
    ];
    model(2, [("S", s)], [("U", u)], tasks)
}

fn counterexample() -> Model {
    let s = WeightSequence::eventually_identity(0, vec![diag(2.0, 1.0), diag(3.0, 2.0)]).expect("valid");
    let t = WeightSequence::eventually_identity(0, vec![diag(1.0, 2.0), diag(3.0, 2.0)]).expect("valid");
    let tasks = vec![
        TaskDoc::EigenModuliScreen {
            s: "S".into(),
            t: "T".into(),
            k: 0,
            window: [-4, 4],
            expect: expect("pass"),
        },
        TaskDoc::Decide {
            s: "S".into(),
            t: "T".into(),
            m: Some(0),
            m_range: None,
            depth: None,
            window: None,
            expect: expect("NotEquivalent"),
        },
    ];
    model(2, [("S", s), ("T", t)], [], tasks)
}

pub const FIVE_ENTRY_RADIUS: i64 = 6;

/// Identity except that rows `−1` and `1` mix coordinates `−1` and `1`
/// through `[[r, r], [r, −r]]`, `r = 1/√2`.
pub fn five_entry_operator(dim: usize) -> BandedOperator {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let id = ComplexMatrix::identity(dim);
    let rr = |v: f64| ComplexMatrix::scalar(dim, re(v));
    let zero = ComplexMatrix::zeros(dim, dim);
    let rad = FIVE_ENTRY_RADIUS;
    let band = |f: &dyn Fn(i64) -> ComplexMatrix| WeightSequence::windowed_from_fn(-rad, rad, f).expect("valid");
    let mut bands = BTreeMap::new();
    bands.insert(
        0,
        band(&|n| match n {
            -1 => rr(r),
            1 => rr(-r),
            _ => id.clone(),
        }),
    );
    bands.insert(2, band(&|n| if n == -1 { rr(r) } else { zero.clone() }));
    bands.insert(-2, band(&|n| if n == 1 { rr(r) } else { zero.clone() }));
    BandedOperator::new(bands).expect("valid")
}

fn five_entry_block() -> Model {
    let tasks = vec![
        TaskDoc::VerifyUnitary {
            operator: "U".into(),
            window: [-4, 4],
            expect: expect("pass"),
        },
        TaskDoc::CheckDiagonalPropagation {
            operator: "U".into(),
            s: None,
            t: None,
            window: [-3, 3],
            expect: expect("fail"),
        },
    ];
    model(2, [], [("U", five_entry_operator(2))], tasks)
}
