//! Executes task blocks and assembles the machine report.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};
use shiftlab_core::band::{
    check_band_count_bound, check_diagonal_propagation, check_two_band_structure, conjugate_to_shift, verify_intertwining,
    verify_unitary, verify_unitary_three_band, verify_unitary_two_band, Conjugation, WindowReport,
};
use shiftlab_core::equiv::{
    decide_diagonal_equivalence, decide_over_offsets, eigen_moduli_screen, norm_offset_screen, positive_form,
    DecideConfig, DiagonalWitness, EquivalenceVerdict, ObstructionKind, WitnessScope,
};
use shiftlab_core::linalg::is_orthogonal_projection;
use shiftlab_core::shift::weight_norm_profile;
use shiftlab_core::{Error, Tolerance};

use crate::spec::{matrix_doc, sequence_doc, Model, OperatorDoc, SpecDocument, TaskDoc, ToleranceDoc};

/// Failures listed per window report before truncation.
const FAILURE_LIMIT: usize = 20;

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Overrides the spec's tolerance.
    pub tolerance: Option<Tolerance>,
    pub seed: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { tolerance: None, seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TaskReport {
    pub index: usize,
    pub op: &'static str,
    pub subject: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub as_expected: Option<bool>,
    /// A window check failed or the task raised an error.
    pub check_failed: bool,
    pub details: Value,
    #[serde(skip)]
    pub witness: Option<DiagonalWitness>,
}

impl TaskReport {
    pub fn inconclusive(&self) -> bool {
        self.status == "Inconclusive"
    }

    /// An unexpected obstruction or error.
    pub fn failed(&self) -> bool {
        match self.as_expected {
            Some(ok) => !ok || self.check_failed,
            None => self.check_failed || self.status == "NotEquivalent" || self.status == "error",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub source: String,
    pub seed: u64,
    pub tolerance: ToleranceDoc,
    pub tasks: Vec<TaskReport>,
    /// Spec re-verifying every witness found, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replay: Option<SpecDocument>,
}

impl RunReport {
    /// 1 on any failed check or missed expectation, else 3 on an unexpected
    /// Inconclusive verdict, else 0.
    pub fn exit_code(&self) -> i32 {
        if self.tasks.iter().any(TaskReport::failed) {
            1
        } else if self.tasks.iter().any(|t| t.inconclusive() && t.as_expected != Some(true)) {
            3
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for t in &self.tasks {
            let mark = if t.failed() {
                "FAIL"
            } else if t.inconclusive() && t.as_expected != Some(true) {
                "??"
            } else {
                "ok"
            };
            let _ = write!(out, "[{mark:>4}] #{} {} {}: {}", t.index, t.op, t.subject, t.status);
            if let Some(e) = &t.expected {
                let _ = write!(out, " (expected {e})");
            }
            if let Some(note) = t.details.get("note").and_then(Value::as_str) {
                let _ = write!(out, "; {note}");
            }
            out.push('\n');
        }
        let failed = self.tasks.iter().filter(|t| t.failed()).count();
        let _ = writeln!(out, "{}: {} tasks, {failed} failed, exit {}", self.source, self.tasks.len(), self.exit_code());
        out
    }
}

fn range_str([lo, hi]: [i64; 2]) -> String {
    format!("[{lo}, {hi}]")
}

fn report_json(r: &WindowReport) -> Value {
    let failures: Vec<Value> = r
        .failures()
        .take(FAILURE_LIMIT)
        .map(|c| json!({"condition": c.condition, "row": c.row, "column": c.column, "residual": c.residual, "threshold": c.threshold}))
        .collect();
    json!({
        "lo": r.lo,
        "hi": r.hi,
        "passed": r.passed,
        "checks": r.checks.len(),
        "skipped": r.skipped.len(),
        "max_residual": r.max_residual(),
        "failure_count": r.failures().count(),
        "failures": failures,
    })
}

fn report_note(r: &WindowReport) -> String {
    match r.first_failure() {
        None => format!("max residual {:.2e} over {} checks", r.max_residual(), r.checks.len()),
        Some(c) if c.condition == "band propagation" => format!(
            "first failure: entry ({}, {}) vanishes (norm {:.2e}) while band {} is nonzero elsewhere on the window",
            c.row,
            c.column.unwrap_or(c.row),
            c.residual,
            c.column.unwrap_or(c.row) - c.row
        ),
        Some(c) => {
            let at = match c.column {
                Some(j) => format!("({}, {j})", c.row),
                None => format!("row {}", c.row),
            };
            format!(
                "first failure: {} at {at}, residual {:.2e} > {:.2e}",
                c.condition, c.residual, c.threshold
            )
        }
    }
}

struct Outcome {
    status: String,
    check_failed: bool,
    details: Value,
    witness: Option<DiagonalWitness>,
}

fn from_report(r: &WindowReport, mut extra: Value) -> Outcome {
    let mut details = report_json(r);
    details["note"] = json!(report_note(r));
    if let (Some(obj), Some(more)) = (details.as_object_mut(), extra.as_object_mut()) {
        obj.append(more);
    }
    Outcome {
        status: if r.passed { "pass" } else { "fail" }.to_string(),
        check_failed: !r.passed,
        details,
        witness: None,
    }
}

fn plain(status: &str, details: Value) -> Outcome {
    Outcome {
        status: status.to_string(),
        check_failed: false,
        details,
        witness: None,
    }
}

pub fn witness_json(w: &DiagonalWitness) -> Value {
    json!({
        "offset": w.offset,
        "lo": w.lo,
        "hi": w.hi(),
        "scope": match w.scope { WitnessScope::Global => "global", WitnessScope::Window => "window" },
        "entries": w.entries.iter().map(matrix_doc).collect::<Vec<_>>(),
    })
}

pub fn verdict_json(v: &EquivalenceVerdict) -> Value {
    match v {
        EquivalenceVerdict::Equivalent(w) => json!({"status": v.status(), "witness": witness_json(w)}),
        EquivalenceVerdict::NotEquivalent(o) => {
            let mut ob = json!({
                "kind": o.kind.name(),
                "offset": o.offset,
                "index": o.index,
                "residual": o.residual,
                "detail": o.detail,
            });
            if let ObstructionKind::GramChain {
                forward_depth,
                backward_depth,
                nullity,
            } = o.kind
            {
                ob["forward_depth"] = json!(forward_depth);
                ob["backward_depth"] = json!(backward_depth);
                ob["nullity"] = json!(nullity);
            }
            json!({"status": v.status(), "obstruction": ob})
        }
        EquivalenceVerdict::Inconclusive(reason) => json!({"status": v.status(), "reason": reason}),
    }
}

fn verdict_note(v: &EquivalenceVerdict) -> String {
    match v {
        EquivalenceVerdict::Equivalent(w) => format!(
            "witness at offset {} on rows [{}, {}] ({} scope)",
            w.offset,
            w.lo,
            w.hi(),
            if w.scope == WitnessScope::Global { "global" } else { "window" }
        ),
        EquivalenceVerdict::NotEquivalent(o) => {
            let at = o.index.map(|n| format!(" at row {n}")).unwrap_or_default();
            format!("{} obstruction at offset {}{at}: {} (residual {:.2e})", o.kind.name(), o.offset, o.detail, o.residual)
        }
        EquivalenceVerdict::Inconclusive(reason) => reason.clone(),
    }
}

fn execute(model: &Model, task: &TaskDoc, tol: &Tolerance, seed: u64) -> Result<Outcome, Error> {
    Ok(match task {
        TaskDoc::VerifyIntertwining {
            operator,
            s,
            t,
            window: [lo, hi],
            ..
        } => from_report(
            &verify_intertwining(model.operator(operator), model.shift(s), model.shift(t), *lo, *hi, tol)?,
            json!({}),
        ),
        TaskDoc::VerifyUnitary {
            operator,
            window: [lo, hi],
            ..
        } => from_report(&verify_unitary(model.operator(operator), *lo, *hi, tol)?, json!({})),
        TaskDoc::VerifyUnitaryTwoBand {
            operator,
            window: [lo, hi],
            ..
        } => from_report(&verify_unitary_two_band(model.operator(operator), *lo, *hi, tol)?, json!({})),
        TaskDoc::CheckTwoBandStructure {
            operator,
            window: [lo, hi],
            ..
        } => from_report(&check_two_band_structure(model.operator(operator), *lo, *hi, tol)?, json!({})),
        TaskDoc::VerifyUnitaryThreeBand {
            operator,
            window: [lo, hi],
            ..
        } => from_report(&verify_unitary_three_band(model.operator(operator), *lo, *hi, tol)?, json!({})),
        TaskDoc::CheckBandCountBound {
            operator,
            bound,
            window: [lo, hi],
            ..
        } => {
            let bound = bound.unwrap_or(model.dim);
            let r = check_band_count_bound(model.operator(operator), bound, *lo, *hi, tol)?;
            let mut out = from_report(&r.report, json!({"effective_count": r.effective_count, "bound": bound}));
            out.details["note"] = json!(format!(
                "{} nonzero bands, bound {bound}; {}",
                r.effective_count,
                report_note(&r.report)
            ));
            out
        }
        TaskDoc::CheckDiagonalPropagation {
            operator,
            s,
            t,
            window: [lo, hi],
            ..
        } => {
            let pair = s.as_deref().zip(t.as_deref()).map(|(s, t)| (model.shift(s), model.shift(t)));
            from_report(&check_diagonal_propagation(model.operator(operator), pair, *lo, *hi, tol)?, json!({}))
        }
        TaskDoc::ConjugateToShift {
            operator,
            shift,
            window: [lo, hi],
            ..
        } => match conjugate_to_shift(model.operator(operator), model.shift(shift), *lo, *hi, tol)? {
            Conjugation::Shift(t) => plain(
                "shift",
                json!({
                    "weights": sequence_doc(t.weights()),
                    "note": format!("USU* is a weighted shift on rows [{lo}, {hi}]"),
                }),
            ),
            Conjugation::NotAShift(r) => {
                let mut out = from_report(&r, json!({}));
                out.status = "not_a_shift".into();
                out
            }
        },
        TaskDoc::BandProjections {
            operator,
            window: [lo, hi],
            ..
        } => {
            let u = model.operator(operator);
            let mut rows: BTreeMap<String, Vec<i64>> = BTreeMap::new();
            let mut total = 0usize;
            let mut hits = 0usize;
            for (&k, band) in u.bands() {
                let list = rows.entry(k.to_string()).or_default();
                for n in *lo..=*hi {
                    let w = band.weight_at(n)?;
                    total += 1;
                    if is_orthogonal_projection(&w, tol)? {
                        hits += 1;
                        list.push(n);
                    }
                }
            }
            let status = match hits {
                0 => "none",
                h if h == total => "all",
                _ => "some",
            };
            plain(
                status,
                json!({"projection_rows": rows, "note": format!("{hits} of {total} entries are orthogonal projections")}),
            )
        }
        TaskDoc::WeightNorms { shift, window: [lo, hi] } => {
            let norms = weight_norm_profile(model.shift(shift), *lo, *hi)?;
            let max = norms.iter().copied().fold(0.0, f64::max);
            plain(
                "done",
                json!({"lo": lo, "norms": norms, "note": format!("max norm {max:.6} over {} rows", norms.len())}),
            )
        }
        TaskDoc::NormOffsetScreen {
            s,
            t,
            k_range: [k_lo, k_hi],
            window: [lo, hi],
            ..
        } => {
            let feasible = norm_offset_screen(model.shift(s), model.shift(t), *k_lo, *k_hi, *lo, *hi, tol)?;
            let status = if feasible.is_empty() { "empty" } else { "nonempty" };
            plain(status, json!({"feasible": feasible, "note": format!("feasible offsets {feasible:?}")}))
        }
        TaskDoc::EigenModuliScreen {
            s,
            t,
            k,
            window: [lo, hi],
            ..
        } => from_report(&eigen_moduli_screen(model.shift(s), model.shift(t), *k, *lo, *hi, tol)?, json!({})),
        TaskDoc::PositiveForm {
            shift,
            window: [lo, hi],
            ..
        } => {
            let pf = positive_form(model.shift(shift), *lo, *hi, tol)?;
            let conj: OperatorDoc = OperatorDoc {
                bands: pf.conjugator.bands().iter().map(|(&k, seq)| (k, sequence_doc(seq))).collect(),
            };
            from_report(
                &pf.check,
                json!({"weights": sequence_doc(pf.shift.weights()), "conjugator": conj}),
            )
        }
        TaskDoc::Decide {
            s,
            t,
            m,
            m_range,
            depth,
            window,
            ..
        } => {
            let config = DecideConfig {
                depth: *depth,
                window: window.map(|[a, b]| (a, b)),
                tol: *tol,
                seed,
                ..DecideConfig::default()
            };
            let (s, t) = (model.shift(s), model.shift(t));
            let (verdict, mut details) = match (m, m_range) {
                (Some(m), _) => {
                    let v = decide_diagonal_equivalence(s, t, *m, &config)?;
                    let d = verdict_json(&v);
                    (v, d)
                }
                (None, Some([a, b])) => {
                    let dec = decide_over_offsets(s, t, *a, *b, &config)?;
                    let mut d = verdict_json(&dec.verdict);
                    d["feasible_offsets"] = json!(dec.feasible);
                    d["per_offset"] = dec
                        .per_offset
                        .iter()
                        .map(|(m, v)| json!({"m": m, "status": v.status()}))
                        .collect();
                    (dec.verdict, d)
                }
                (None, None) => unreachable!("validated at parse time"),
            };
            details["note"] = json!(verdict_note(&verdict));
            let witness = match &verdict {
                EquivalenceVerdict::Equivalent(w) => Some(w.clone()),
                _ => None,
            };
            Outcome {
                status: verdict.status().to_string(),
                check_failed: false,
                details,
                witness,
            }
        }
    })
}

fn subject(task: &TaskDoc) -> String {
    match task {
        TaskDoc::VerifyIntertwining { operator, s, t, window, .. } => format!("{operator}·{s} = {t}·{operator} on {}", range_str(*window)),
        TaskDoc::VerifyUnitary { operator, window, .. }
        | TaskDoc::VerifyUnitaryTwoBand { operator, window, .. }
        | TaskDoc::CheckTwoBandStructure { operator, window, .. }
        | TaskDoc::VerifyUnitaryThreeBand { operator, window, .. }
        | TaskDoc::CheckBandCountBound { operator, window, .. }
        | TaskDoc::CheckDiagonalPropagation { operator, window, .. }
        | TaskDoc::BandProjections { operator, window, .. } => format!("{operator} on {}", range_str(*window)),
        TaskDoc::ConjugateToShift { operator, shift, window, .. } => {
            format!("{operator}{shift}{operator}* on {}", range_str(*window))
        }
        TaskDoc::WeightNorms { shift, window } | TaskDoc::PositiveForm { shift, window, .. } => {
            format!("{shift} on {}", range_str(*window))
        }
        TaskDoc::NormOffsetScreen { s, t, k_range, window, .. } => {
            format!("{s} vs {t}, k in {} on {}", range_str(*k_range), range_str(*window))
        }
        TaskDoc::EigenModuliScreen { s, t, k, window, .. } => format!("{s} vs {t}, k = {k} on {}", range_str(*window)),
        TaskDoc::Decide { s, t, m, m_range, .. } => match (m, m_range) {
            (Some(m), _) => format!("{s} vs {t}, m = {m}"),
            (_, Some(r)) => format!("{s} vs {t}, m in {}", range_str(*r)),
            _ => format!("{s} vs {t}"),
        },
    }
}

/// Runs every task of the model in order.
pub fn run_model(model: &Model, source: &str, opts: &RunOptions) -> RunReport {
    let tol = opts.tolerance.unwrap_or_else(|| model.tolerance());
    let mut tasks = Vec::with_capacity(model.tasks.len());
    for (i, task) in model.tasks.iter().enumerate() {
        let out = execute(model, task, &tol, opts.seed).unwrap_or_else(|e| Outcome {
            status: "error".into(),
            check_failed: true,
            details: json!({"error": e.to_string(), "note": e.to_string()}),
            witness: None,
        });
        let expected = task.expect().map(str::to_string);
        let as_expected = expected.as_ref().map(|e| *e == out.status);
        tasks.push(TaskReport {
            index: i + 1,
            op: task.op(),
            subject: subject(task),
            status: out.status,
            expected,
            as_expected,
            check_failed: out.check_failed,
            details: out.details,
            witness: out.witness,
        });
    }
    let replay = replay_document(model, &tasks);
    RunReport {
        source: source.to_string(),
        seed: opts.seed,
        tolerance: ToleranceDoc { rel: tol.rel, abs: tol.abs },
        tasks,
        replay,
    }
}

/// Spec that re-checks every witness against its shifts.
fn replay_document(model: &Model, tasks: &[TaskReport]) -> Option<SpecDocument> {
    let found: Vec<_> = tasks
        .iter()
        .zip(&model.tasks)
        .filter_map(|(r, doc)| r.witness.as_ref().map(|w| (r.index, w, doc)))
        .collect();
    if found.is_empty() {
        return None;
    }
    let witness_tol = DecideConfig::default().witness_tol;
    let mut doc = SpecDocument {
        dim: model.dim,
        tolerance: Some(ToleranceDoc {
            rel: witness_tol.rel,
            abs: witness_tol.abs,
        }),
        shifts: BTreeMap::new(),
        operators: BTreeMap::new(),
        tasks: Vec::new(),
    };
    for (index, w, task) in found {
        let TaskDoc::Decide { s, t, .. } = task else { continue };
        for name in [s, t] {
            doc.shifts.insert(name.clone(), sequence_doc(model.shift(name).weights()));
        }
        let name = format!("witness{index}");
        let op = w.operator().expect("witness entries are square");
        doc.operators.insert(
            name.clone(),
            OperatorDoc {
                bands: op.bands().iter().map(|(&k, seq)| (k, sequence_doc(seq))).collect(),
            },
        );
        doc.tasks.push(TaskDoc::VerifyUnitary {
            operator: name.clone(),
            window: [w.lo, w.hi()],
            expect: Some("pass".into()),
        });
        if w.hi() > w.lo {
            doc.tasks.push(TaskDoc::VerifyIntertwining {
                operator: name,
                s: s.clone(),
                t: t.clone(),
                window: [w.lo, w.hi() - 1],
                expect: Some("pass".into()),
            });
        }
    }
    Some(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::example;

    #[test]
    fn examples_match_expectations() {
        for (name, code) in [
            ("ex31", 0),
            ("ex33-two-band", 0),
            ("ex33-three-band", 0),
            ("counterexample-sec2", 0),
            ("five-entry-block", 1),
        ] {
            let rep = run_model(&example(name).unwrap(), name, &RunOptions::default());
            assert!(rep.tasks.iter().all(|t| t.as_expected != Some(false)), "{name}:\n{}", rep.summary());
            assert_eq!(rep.exit_code(), code, "{name}:\n{}", rep.summary());
        }
    }

    #[test]
    fn five_entry_failure_names_a_row() {
        let rep = run_model(&example("five-entry-block").unwrap(), "x", &RunOptions::default());
        let t = rep.tasks.iter().find(|t| t.op == "check_diagonal_propagation").unwrap();
        assert!(t.check_failed);
        let first = &t.details["failures"][0];
        assert!(first["row"].is_i64() && first["column"].is_i64());
    }
}
