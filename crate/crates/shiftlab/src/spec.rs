//! JSON spec files: shifts, banded operators and task blocks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use shiftlab_core::band::BandedOperator;
use shiftlab_core::shift::SequenceKind;
use shiftlab_core::{BilateralShift, Complex64, ComplexMatrix, Tolerance, WeightSequence};

/// Row-major matrix of `[re, im]` pairs.
pub type MatrixDoc = Vec<Vec<[f64; 2]>>;
pub type Window = [i64; 2];

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("{}{path}: {message}", .line.map(|l| format!("line {l}, ")).unwrap_or_default())]
    Invalid {
        path: String,
        line: Option<usize>,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum SequenceDoc {
    Periodic { weights: Vec<MatrixDoc> },
    EventuallyIdentity { lo: i64, weights: Vec<MatrixDoc> },
    Windowed { lo: i64, weights: Vec<MatrixDoc> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorDoc {
    pub bands: BTreeMap<i64, SequenceDoc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceDoc {
    pub rel: f64,
    pub abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum TaskDoc {
    VerifyIntertwining {
        operator: String,
        s: String,
        t: String,
        window: Window,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<String>,
    },
    VerifyUnitary {
        operator: String,
        window: Window,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<String>,
    },
    VerifyUnitaryTwoBand {
        operator: String,
        window: Window,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<String>,
    },
    CheckTwoBandStructure {
        operator: String,
        window: Window,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<String>,
    },
    VerifyUnitaryThreeBand {
        operator: String,
        window: Window,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<String>,
    },
    /// `bound` defaults to the dimension.
    CheckBandCountBound {
        operator: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<usize>,
        window: Window,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<String>,
    },
    /// `s` and `t` are given together or not at all.
    CheckDiagonalPropagation {
        operator: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t: Option<String>,
        window: Window,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<String>,
    },
    ConjugateToShift {
        operator: String,
        shift: String,
        window: Window,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<String>,
    },
    /// Rows on which each band entry is an orthogonal projection.
    BandProjections {
        operator: String,
        window: Window,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<String>,
    },
    WeightNorms {
        shift: String,
        window: Window,
    },
    NormOffsetScreen {
        s: String,
        t: String,
        k_range: Window,
        window: Window,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<String>,
    },
    EigenModuliScreen {
        s: String,
        t: String,
        k: i64,
        window: Window,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<String>,
    },
    PositiveForm {
        shift: String,
        window: Window,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<String>,
    },
    /// Exactly one of `m` and `m_range`.
    Decide {
        s: String,
        t: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m: Option<i64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m_range: Option<Window>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        depth: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        window: Option<Window>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<String>,
    },
}

const CHECK: &[&str] = &["pass", "fail"];

impl TaskDoc {
    pub fn op(&self) -> &'static str {
        match self {
            Self::VerifyIntertwining { .. } => "verify_intertwining",
            Self::VerifyUnitary { .. } => "verify_unitary",
            Self::VerifyUnitaryTwoBand { .. } => "verify_unitary_two_band",
            Self::CheckTwoBandStructure { .. } => "check_two_band_structure",
            Self::VerifyUnitaryThreeBand { .. } => "verify_unitary_three_band",
            Self::CheckBandCountBound { .. } => "check_band_count_bound",
            Self::CheckDiagonalPropagation { .. } => "check_diagonal_propagation",
            Self::ConjugateToShift { .. } => "conjugate_to_shift",
            Self::BandProjections { .. } => "band_projections",
            Self::WeightNorms { .. } => "weight_norms",
            Self::NormOffsetScreen { .. } => "norm_offset_screen",
            Self::EigenModuliScreen { .. } => "eigen_moduli_screen",
            Self::PositiveForm { .. } => "positive_form",
            Self::Decide { .. } => "decide",
        }
    }

    pub fn expect(&self) -> Option<&str> {
        match self {
            Self::VerifyIntertwining { expect, .. }
            | Self::VerifyUnitary { expect, .. }
            | Self::VerifyUnitaryTwoBand { expect, .. }
            | Self::CheckTwoBandStructure { expect, .. }
            | Self::VerifyUnitaryThreeBand { expect, .. }
            | Self::CheckBandCountBound { expect, .. }
            | Self::CheckDiagonalPropagation { expect, .. }
            | Self::ConjugateToShift { expect, .. }
            | Self::BandProjections { expect, .. }
            | Self::NormOffsetScreen { expect, .. }
            | Self::EigenModuliScreen { expect, .. }
            | Self::PositiveForm { expect, .. }
            | Self::Decide { expect, .. } => expect.as_deref(),
            Self::WeightNorms { .. } => None,
        }
    }

    /// Values `expect` may take.
    pub fn outcomes(&self) -> &'static [&'static str] {
        match self {
            Self::ConjugateToShift { .. } => &["shift", "not_a_shift"],
            Self::BandProjections { .. } => &["none", "some", "all"],
            Self::WeightNorms { .. } => &[],
            Self::NormOffsetScreen { .. } => &["empty", "nonempty"],
            Self::Decide { .. } => &["Equivalent", "NotEquivalent", "Inconclusive"],
            _ => CHECK,
        }
    }

    fn windows(&self) -> Vec<(&'static str, Window)> {
        let mut out = Vec::new();
        match self {
            Self::VerifyIntertwining { window, .. }
            | Self::VerifyUnitary { window, .. }
            | Self::VerifyUnitaryTwoBand { window, .. }
            | Self::CheckTwoBandStructure { window, .. }
            | Self::VerifyUnitaryThreeBand { window, .. }
            | Self::CheckBandCountBound { window, .. }
            | Self::CheckDiagonalPropagation { window, .. }
            | Self::ConjugateToShift { window, .. }
            | Self::BandProjections { window, .. }
            | Self::WeightNorms { window, .. }
            | Self::EigenModuliScreen { window, .. }
            | Self::PositiveForm { window, .. } => out.push(("window", *window)),
            Self::NormOffsetScreen { window, k_range, .. } => {
                out.push(("window", *window));
                out.push(("k_range", *k_range));
            }
            Self::Decide { window, m_range, .. } => {
                out.extend(window.map(|w| ("window", w)));
                out.extend(m_range.map(|w| ("m_range", w)));
            }
        }
        out
    }

    fn references(&self) -> Vec<(&'static str, &str, Kind)> {
        use Kind::{Operator, Shift};
        match self {
            Self::VerifyIntertwining { operator, s, t, .. } => {
                vec![("operator", operator, Operator), ("s", s, Shift), ("t", t, Shift)]
            }
            Self::VerifyUnitary { operator, .. }
            | Self::VerifyUnitaryTwoBand { operator, .. }
            | Self::CheckTwoBandStructure { operator, .. }
            | Self::VerifyUnitaryThreeBand { operator, .. }
            | Self::CheckBandCountBound { operator, .. }
            | Self::BandProjections { operator, .. } => vec![("operator", operator, Operator)],
            Self::CheckDiagonalPropagation { operator, s, t, .. } => {
                let mut v = vec![("operator", operator.as_str(), Operator)];
                v.extend(s.as_deref().map(|x| ("s", x, Shift)));
                v.extend(t.as_deref().map(|x| ("t", x, Shift)));
                v
            }
            Self::ConjugateToShift { operator, shift, .. } => {
                vec![("operator", operator, Operator), ("shift", shift, Shift)]
            }
            Self::WeightNorms { shift, .. } | Self::PositiveForm { shift, .. } => vec![("shift", shift, Shift)],
            Self::NormOffsetScreen { s, t, .. } | Self::EigenModuliScreen { s, t, .. } | Self::Decide { s, t, .. } => {
                vec![("s", s, Shift), ("t", t, Shift)]
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Shift,
    Operator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<ToleranceDoc>,
    #[serde(default)]
    pub shifts: BTreeMap<String, SequenceDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub operators: BTreeMap<String, OperatorDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tasks: Vec<TaskDoc>,
}

/// A spec with every name resolved and every matrix validated.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub dim: usize,
    pub tolerance: Option<Tolerance>,
    pub shifts: BTreeMap<String, BilateralShift>,
    pub operators: BTreeMap<String, BandedOperator>,
    pub tasks: Vec<TaskDoc>,
}

impl Model {
    pub fn tolerance(&self) -> Tolerance {
        self.tolerance.unwrap_or_default()
    }

    pub fn shift(&self, name: &str) -> &BilateralShift {
        &self.shifts[name]
    }

    pub fn operator(&self, name: &str) -> &BandedOperator {
        &self.operators[name]
    }

    /// Replaces the task list, validating names and ranges.
    pub fn with_tasks(mut self, tasks: Vec<TaskDoc>) -> Result<Self, SpecError> {
        for (i, task) in tasks.iter().enumerate() {
            validate_task(&self, task, &format!("tasks[{i}]"))?;
        }
        self.tasks = tasks;
        Ok(self)
    }

    pub fn to_document(&self) -> SpecDocument {
        SpecDocument {
            dim: self.dim,
            tolerance: self.tolerance.map(|t| ToleranceDoc { rel: t.rel, abs: t.abs }),
            shifts: self.shifts.iter().map(|(k, s)| (k.clone(), sequence_doc(s.weights()))).collect(),
            operators: self
                .operators
                .iter()
                .map(|(k, op)| {
                    let bands = op.bands().iter().map(|(&off, seq)| (off, sequence_doc(seq))).collect();
                    (k.clone(), OperatorDoc { bands })
                })
                .collect(),
            tasks: self.tasks.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("spec documents always serialize")
    }
}

pub fn matrix_doc(m: &ComplexMatrix) -> MatrixDoc {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| {
                    let z = m.get(i, j);
                    [z.re, z.im]
                })
                .collect()
        })
        .collect()
}

pub fn sequence_doc(seq: &WeightSequence) -> SequenceDoc {
    let weights = seq.stored().iter().map(matrix_doc).collect();
    match *seq.kind() {
        SequenceKind::Periodic => SequenceDoc::Periodic { weights },
        SequenceKind::EventuallyIdentity { lo } => SequenceDoc::EventuallyIdentity { lo, weights },
        SequenceKind::Windowed { lo } => SequenceDoc::Windowed { lo, weights },
    }
}

/// Parses and resolves a JSON spec document.
pub fn parse_shift_spec(text: &str) -> Result<Model, SpecError> {
    let doc: SpecDocument = serde_json::from_str(text).map_err(|e| SpecError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string().split(" at line ").next().unwrap_or_default().to_string(),
    })?;
    resolve(&doc).map_err(|e| match e {
        SpecError::Invalid { path, message, .. } => {
            let line = locate(text, &path);
            SpecError::Invalid { path, line, message }
        }
        other => other,
    })
}

pub fn read_spec_file(path: &std::path::Path) -> Result<Model, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_shift_spec(&text)
}

fn invalid(path: impl Into<String>, message: impl std::fmt::Display) -> SpecError {
    SpecError::Invalid {
        path: path.into(),
        line: None,
        message: message.to_string(),
    }
}

/// Line of the second path component's key, for named shifts and operators.
fn locate(text: &str, path: &str) -> Option<usize> {
    let mut parts = path.split('.');
    let section = parts.next()?;
    if section != "shifts" && section != "operators" {
        return None;
    }
    let name = parts.next()?;
    let start = text.find(&format!("\"{section}\""))?;
    let needle = serde_json::to_string(name).ok()?;
    let rest = &text[start..];
    let mut from = 0;
    while let Some(pos) = rest[from..].find(&needle) {
        let after = &rest[from + pos + needle.len()..];
        if after.trim_start().starts_with(':') {
            return Some(text[..start + from + pos].lines().count().max(1));
        }
        from += pos + needle.len();
    }
    None
}

pub fn resolve(doc: &SpecDocument) -> Result<Model, SpecError> {
    if doc.dim == 0 {
        return Err(invalid("dim", "dimension must be positive"));
    }
    let tolerance = doc
        .tolerance
        .map(|t| {
            if t.rel.is_finite() && t.abs.is_finite() && t.rel >= 0.0 && t.abs >= 0.0 {
                Ok(Tolerance::new(t.rel, t.abs))
            } else {
                Err(invalid("tolerance", "components must be finite and non-negative"))
            }
        })
        .transpose()?;
    let mut shifts = BTreeMap::new();
    for (name, seq) in &doc.shifts {
        let path = format!("shifts.{name}");
        let weights = resolve_sequence(seq, doc.dim, &path)?;
        let shift = BilateralShift::new(weights, name.clone()).map_err(|e| invalid(&path, e))?;
        shifts.insert(name.clone(), shift);
    }
    let mut operators = BTreeMap::new();
    for (name, op) in &doc.operators {
        let path = format!("operators.{name}");
        let mut bands = BTreeMap::new();
        for (&offset, seq) in &op.bands {
            bands.insert(offset, resolve_sequence(seq, doc.dim, &format!("{path}.bands.{offset}"))?);
        }
        operators.insert(name.clone(), BandedOperator::new(bands).map_err(|e| invalid(&path, e))?);
    }
    let model = Model {
        dim: doc.dim,
        tolerance,
        shifts,
        operators,
        tasks: doc.tasks.clone(),
    };
    for (i, task) in doc.tasks.iter().enumerate() {
        validate_task(&model, task, &format!("tasks[{i}]"))?;
    }
    Ok(model)
}

fn resolve_sequence(seq: &SequenceDoc, dim: usize, path: &str) -> Result<WeightSequence, SpecError> {
    let (SequenceDoc::Periodic { weights } | SequenceDoc::EventuallyIdentity { weights, .. } | SequenceDoc::Windowed { weights, .. }) =
        seq;
    if weights.is_empty() {
        return Err(invalid(format!("{path}.weights"), "at least one weight is required"));
    }
    let mats = weights
        .iter()
        .enumerate()
        .map(|(i, m)| resolve_matrix(m, dim, &format!("{path}.weights[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let out = match *seq {
        SequenceDoc::Periodic { .. } => WeightSequence::periodic(mats),
        SequenceDoc::EventuallyIdentity { lo, .. } => WeightSequence::eventually_identity(lo, mats),
        SequenceDoc::Windowed { lo, .. } => WeightSequence::windowed(lo, mats),
    };
    out.map_err(|e| invalid(path, e))
}

fn resolve_matrix(m: &MatrixDoc, dim: usize, path: &str) -> Result<ComplexMatrix, SpecError> {
    if m.len() != dim {
        return Err(invalid(path, format!("expected {dim} rows, found {}", m.len())));
    }
    let mut entries = Vec::with_capacity(dim * dim);
    for (i, row) in m.iter().enumerate() {
        if row.len() != dim {
            return Err(invalid(format!("{path}[{i}]"), format!("expected {dim} entries, found {}", row.len())));
        }
        for (j, &[a, b]) in row.iter().enumerate() {
            if !a.is_finite() || !b.is_finite() {
                return Err(invalid(format!("{path}[{i}][{j}]"), "non-finite entry"));
            }
            entries.push(Complex64::new(a, b));
        }
    }
    ComplexMatrix::new(dim, dim, &entries).map_err(|e| invalid(path, e))
}

fn validate_task(model: &Model, task: &TaskDoc, path: &str) -> Result<(), SpecError> {
    for (field, name, kind) in task.references() {
        let known = match kind {
            Kind::Shift => model.shifts.contains_key(name),
            Kind::Operator => model.operators.contains_key(name),
        };
        if !known {
            let what = if kind == Kind::Shift { "shift" } else { "operator" };
            return Err(invalid(format!("{path}.{field}"), format!("undefined {what} '{name}'")));
        }
    }
    for (field, [lo, hi]) in task.windows() {
        if lo > hi {
            return Err(invalid(format!("{path}.{field}"), format!("empty range [{lo}, {hi}]")));
        }
    }
    if let Some(e) = task.expect() {
        if !task.outcomes().contains(&e) {
            return Err(invalid(
                format!("{path}.expect"),
                format!("'{e}' is not one of {:?}", task.outcomes()),
            ));
        }
    }
    match task {
        TaskDoc::Decide { m, m_range, depth, .. } => {
            if m.is_some() == m_range.is_some() {
                return Err(invalid(path, "give exactly one of 'm' and 'm_range'"));
            }
            if *depth == Some(0) {
                return Err(invalid(format!("{path}.depth"), "depth must be positive"));
            }
        }
        TaskDoc::CheckDiagonalPropagation { s, t, .. } if s.is_some() != t.is_some() => {
            return Err(invalid(path, "give both 's' and 't' or neither"));
        }
        TaskDoc::CheckBandCountBound { bound: Some(0), .. } => {
            return Err(invalid(format!("{path}.bound"), "bound must be positive"));
        }
        _ => {}
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_periodic_spec() {
        let m = parse_shift_spec(r#"{"dim": 1, "shifts": {"S": {"variant": "periodic", "weights": [[[[2, 0]]]]}}}"#)
            .unwrap();
        assert_eq!(m.shifts.len(), 1);
        let s = m.shift("S");
        assert_eq!(s.dim(), 1);
        assert_eq!(s.weight(-7).unwrap().get(0, 0), Complex64::new(2.0, 0.0));
        assert_eq!(m.tolerance(), Tolerance::default());
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_shift_spec("{\n  \"dim\": 1,\n  \"shifts\": {\n    \"S\": [1, }\n}").unwrap_err();
        let SpecError::Syntax { line, .. } = err else {
            panic!("expected a syntax error, got {err}");
        };
        assert_eq!(line, 4);
    }

    #[test]
    fn unknown_variant_is_syntax_error() {
        let err =
            parse_shift_spec(r#"{"dim": 1, "shifts": {"S": {"variant": "spiral", "weights": [[[[1, 0]]]]}}}"#).unwrap_err();
        assert!(matches!(err, SpecError::Syntax { line: 1, .. }), "{err}");
        assert!(err.to_string().contains("spiral"));
    }

    #[test]
    fn wrong_row_count_is_located() {
        let text = "{\n \"dim\": 2,\n \"shifts\": {\n  \"S\": {\"variant\": \"periodic\",\n   \"weights\": [[[[1, 0], [0, 0]]]]}\n }\n}";
        let err = parse_shift_spec(text).unwrap_err();
        let SpecError::Invalid { path, line, .. } = &err else {
            panic!("expected a resolution error, got {err}");
        };
        assert_eq!(path, "shifts.S.weights[0]");
        assert_eq!(*line, Some(4));
    }

    #[test]
    fn undefined_name() {
        let text = r#"{"dim": 1,
            "shifts": {"S": {"variant": "periodic", "weights": [[[[1, 0]]]]}},
            "tasks": [{"op": "decide", "s": "S", "t": "T", "m": 0}]}"#;
        let err = parse_shift_spec(text).unwrap_err();
        assert_eq!(err.to_string(), "tasks[0].t: undefined shift 'T'");
    }

    #[test]
    fn unknown_task_field_rejected() {
        let text = r#"{"dim": 1,
            "shifts": {"S": {"variant": "periodic", "weights": [[[[1, 0]]]]}},
            "tasks": [{"op": "weight_norms", "shift": "S", "window": [0, 1], "expetc": "pass"}]}"#;
        assert!(matches!(parse_shift_spec(text), Err(SpecError::Syntax { .. })));
    }

    #[test]
    fn bad_expectation_rejected() {
        let text = r#"{"dim": 1,
            "shifts": {"S": {"variant": "periodic", "weights": [[[[1, 0]]]]}},
            "tasks": [{"op": "decide", "s": "S", "t": "S", "m": 0, "expect": "pass"}]}"#;
        let err = parse_shift_spec(text).unwrap_err();
        assert!(err.to_string().starts_with("tasks[0].expect"), "{err}");
    }

    #[test]
    fn round_trip_keeps_operators_and_tasks() {
        let text = r#"{"dim": 1, "tolerance": {"rel": 1e-9, "abs": 0.0},
            "shifts": {"S": {"variant": "eventually_identity", "lo": -1, "weights": [[[[0.1, 0.3]]], [[[2, 0]]]]}},
            "operators": {"U": {"bands": {"-1": {"variant": "windowed", "lo": 0, "weights": [[[[1, 0]]]]}}}},
            "tasks": [{"op": "verify_unitary", "operator": "U", "window": [0, 0], "expect": "pass"}]}"#;
        let m = parse_shift_spec(text).unwrap();
        assert_eq!(parse_shift_spec(&m.to_json()).unwrap(), m);
    }
}
