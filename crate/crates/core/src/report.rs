//! End-to-end analysis of a form and its machine-readable report.

use std::fmt::Write as _;

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{detect_circuit, negative_witness, CircuitError, CircuitKind, Nonnegativity};
use crate::form::{ExponentVector, SparseForm};
use crate::geometry::{self, GeometryError, PsdPrecheck, Simplex};
use crate::mediated::{circuit_is_sos, maximal_mediated_set, MediatedSet};
use crate::rational::{self, format_rational, Rational};
use crate::search::{sonc_feasibility_search, SearchBudget, SearchOutcome};
use crate::sonc::{necessary_condition, CircuitWeights, ConditionVerdict, NecessaryConditionReport};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AnalyzeOptions {
    pub search: bool,
    /// Include the full mediated set in the report.
    pub mms: bool,
    pub budget: SearchBudget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    Nonnegative,
    NotNonnegative,
    Sonc,
    NotSonc,
    Sos,
    NotSos,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    Exact,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub conclusion: Conclusion,
    pub certificate: CertificateKind,
    /// Human-readable line, e.g. `not SONC (exact; necessary condition violated: 6 > 3)`.
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyEntry {
    pub beta: ExponentVector,
    pub simplices: Vec<Simplex>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionSummary {
    pub s_set: Vec<ExponentVector>,
    pub i_set: Vec<ExponentVector>,
    pub r_set: Vec<ExponentVector>,
    pub vertices: Vec<ExponentVector>,
    pub families: Vec<FamilyEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitSummary {
    pub kind: CircuitKind,
    pub outer: Vec<ExponentVector>,
    pub inner: Option<ExponentVector>,
    #[serde(with = "rational::serde_str::vec")]
    pub barycentric: Vec<Rational>,
    /// Approximate `Θ`, display only.
    pub circuit_number: Option<String>,
    /// Ordering of `|f_β|` relative to `Θ`: `less`, `equal` or `greater`.
    pub comparison: Option<String>,
    pub nonnegativity: Nonnegativity,
    pub negative_witness: Option<Vec<String>>,
    pub sos: Option<bool>,
    pub mediated_set: Option<MediatedSet>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilitySummary {
    pub outcome: String,
    pub exact: bool,
    pub margin: Option<f64>,
    pub normalized_margin: Option<f64>,
    pub params: Option<usize>,
    /// Circuit summands of an exact decomposition, as form text.
    pub circuits: Vec<String>,
    pub weights: Vec<CircuitWeights>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub form_name: String,
    pub form: String,
    pub num_vars: usize,
    pub degree: u32,
    pub zero_form: bool,
    /// `(n, 2d)` is one of the cases where every nonnegative form is SOS.
    pub hilbert_case: bool,
    pub partition: Option<PartitionSummary>,
    pub psd_precheck_witness: Option<ExponentVector>,
    pub circuit: Option<CircuitSummary>,
    pub circuit_rejection: Option<String>,
    pub necessary_condition: Option<NecessaryConditionReport>,
    pub feasibility: Option<FeasibilitySummary>,
    pub verdicts: Vec<Verdict>,
}

impl AnalysisReport {
    pub fn has(&self, c: Conclusion) -> bool {
        self.verdicts.iter().any(|v| v.conclusion == c)
    }

    pub fn verdict_texts(&self) -> Vec<&str> {
        self.verdicts.iter().map(|v| v.text.as_str()).collect()
    }
}

pub fn is_hilbert_case(num_vars: usize, degree: u32) -> bool {
    num_vars <= 2 || degree <= 2 || (num_vars == 3 && degree == 4)
}

fn verdict(conclusion: Conclusion, certificate: CertificateKind, text: impl Into<String>) -> Verdict {
    Verdict {
        conclusion,
        certificate,
        text: text.into(),
    }
}

pub fn analyze(f: &SparseForm, opts: &AnalyzeOptions) -> Result<AnalysisReport, AnalysisError> {
    let mut report = AnalysisReport {
        schema: SCHEMA_VERSION,
        form_name: f.name().unwrap_or("unnamed").to_string(),
        form: f.to_string(),
        num_vars: f.num_vars(),
        degree: f.degree(),
        zero_form: f.is_zero(),
        hilbert_case: is_hilbert_case(f.num_vars(), f.degree()),
        partition: None,
        psd_precheck_witness: None,
        circuit: None,
        circuit_rejection: None,
        necessary_condition: None,
        feasibility: None,
        verdicts: Vec::new(),
    };
    if f.is_zero() {
        return Ok(report);
    }
    let partition = geometry::support_partition(f)?;
    report.partition = Some(PartitionSummary {
        s_set: partition.s_set.clone(),
        i_set: partition.i_set.clone(),
        r_set: partition.r_set.clone(),
        vertices: partition.vertices.clone(),
        families: partition
            .simplex_families
            .iter()
            .map(|(b, s)| FamilyEntry {
                beta: b.clone(),
                simplices: s.clone(),
            })
            .collect(),
    });

    if let PsdPrecheck::CertifiedNotPsd(w) = geometry::psd_newton_precheck(f) {
        report.verdicts.push(verdict(
            Conclusion::NotNonnegative,
            CertificateKind::Exact,
            format!("not nonnegative (exact; Newton polytope vertex {w} is not a monomial square)"),
        ));
        report.psd_precheck_witness = Some(w);
    }

    let mut is_nonneg_circuit = false;
    match detect_circuit(f) {
        Ok(c) => {
            let nonneg = c.decide_nonnegativity();
            let theta = c.circuit_number().ok();
            let comparison = theta.as_ref().zip(c.inner.as_ref()).map(|(t, (_, fb))| {
                match t.compare(&fb.abs()) {
                    std::cmp::Ordering::Less => "less",
                    std::cmp::Ordering::Equal => "equal",
                    std::cmp::Ordering::Greater => "greater",
                }
                .to_string()
            });
            let mut summary = CircuitSummary {
                kind: c.kind,
                outer: c.outer.iter().map(|(a, _)| a.clone()).collect(),
                inner: c.inner_exponent().cloned(),
                barycentric: c.barycentric.clone(),
                circuit_number: theta.as_ref().map(|t| format!("{:.6}", t.float_value)),
                comparison,
                nonnegativity: nonneg,
                negative_witness: None,
                sos: None,
                mediated_set: None,
            };
            match nonneg {
                Nonnegativity::Nonnegative { boundary } => {
                    is_nonneg_circuit = true;
                    let text = match (c.kind, boundary) {
                        (CircuitKind::MonomialSquareSum, _) => "nonnegative (sum of monomial squares)",
                        (_, true) => "nonnegative circuit (boundary)",
                        (_, false) => "nonnegative circuit",
                    };
                    report.verdicts.push(verdict(Conclusion::Nonnegative, CertificateKind::Exact, text));
                    report.verdicts.push(verdict(
                        Conclusion::Sonc,
                        CertificateKind::Exact,
                        "SONC (exact; the form is itself a nonnegative circuit)",
                    ));
                    let outer: Vec<ExponentVector> = summary.outer.clone();
                    let mms = maximal_mediated_set(&outer)
                        .map_err(|e| AnalysisError::InvariantViolation(format!("outer exponents not even: {e}")))?;
                    let sos = circuit_is_sos(&c, &mms).map_err(|e| AnalysisError::InvariantViolation(e.to_string()))?;
                    summary.sos = Some(sos);
                    let text = match (c.kind, sos) {
                        (CircuitKind::MonomialSquareSum, _) => "SOS (sum of monomial squares)",
                        (_, true) => "SOS (β ∈ Δ*)",
                        (_, false) => "not SOS (β ∉ Δ*)",
                    };
                    let conclusion = if sos { Conclusion::Sos } else { Conclusion::NotSos };
                    report.verdicts.push(verdict(conclusion, CertificateKind::Exact, text));
                    if opts.mms {
                        summary.mediated_set = Some(mms);
                    }
                }
                Nonnegativity::NotNonnegative => {
                    let w = negative_witness(&c);
                    let fb = c.inner.as_ref().map(|(_, v)| format_rational(&v.abs())).unwrap_or_default();
                    let text = match &w {
                        Some(p) => format!(
                            "not nonnegative (exact; |f_β| = {fb} exceeds the circuit number, f({}) < 0)",
                            p.iter().map(format_rational).collect::<Vec<_>>().join(", ")
                        ),
                        None => format!("not nonnegative (exact; |f_β| = {fb} exceeds the circuit number)"),
                    };
                    summary.negative_witness = w.map(|p| p.iter().map(format_rational).collect());
                    if !report.has(Conclusion::NotNonnegative) {
                        report.verdicts.push(verdict(Conclusion::NotNonnegative, CertificateKind::Exact, text));
                    }
                }
            }
            report.circuit = Some(summary);
        }
        Err(CircuitError::NotACircuit(reason)) => {
            report.circuit_rejection = Some(format!("{reason:?}"));
        }
        Err(e) => return Err(AnalysisError::InvariantViolation(e.to_string())),
    }

    if partition.i_set.is_empty() && !is_nonneg_circuit {
        report.verdicts.push(verdict(
            Conclusion::Nonnegative,
            CertificateKind::Exact,
            "nonnegative (sum of monomial squares)",
        ));
        report.verdicts.push(verdict(Conclusion::Sonc, CertificateKind::Exact, "SONC (exact; sum of monomial squares)"));
        report.verdicts.push(verdict(Conclusion::Sos, CertificateKind::Exact, "SOS (sum of monomial squares)"));
    }

    let nc = necessary_condition(f, &partition).map_err(|e| AnalysisError::InvariantViolation(e.to_string()))?;
    if let Some(b) = nc.uncovered_inner.first() {
        report.verdicts.push(verdict(
            Conclusion::NotSonc,
            CertificateKind::Exact,
            format!("not SONC (exact; inner exponent {b} lies in no simplex spanned by monomial squares)"),
        ));
    } else if nc.verdict == ConditionVerdict::Violated {
        report.verdicts.push(verdict(
            Conclusion::NotSonc,
            CertificateKind::Exact,
            format!(
                "not SONC (exact; necessary condition violated: {} > {})",
                format_rational(&nc.inner_sum),
                format_rational(&nc.outer_sum)
            ),
        ));
    } else if let Some(v) = nc.corollary.as_ref().and_then(|c| c.violations.first()) {
        report.verdicts.push(verdict(
            Conclusion::NotSonc,
            CertificateKind::Exact,
            format!(
                "not SONC (exact; equality case, f_α = {} < {} = min_k λ|f_β| at α = {}, β = {})",
                format_rational(&v.coefficient),
                format_rational(&v.bound),
                v.alpha,
                v.beta
            ),
        ));
    }
    let disproved = nc.disproves_sonc();
    report.necessary_condition = Some(nc);

    if opts.search && !disproved && !report.has(Conclusion::Sonc) {
        let outcome = sonc_feasibility_search(f, &partition, &opts.budget)
            .map_err(|e| AnalysisError::InvariantViolation(e.to_string()))?;
        let (summary, v) = summarize_search(&outcome);
        report.feasibility = Some(summary);
        report.verdicts.push(v);
    }

    let sonc_known = report.has(Conclusion::Sonc) || report.has(Conclusion::NotSonc);
    if !sonc_known && !report.has(Conclusion::Inconclusive) {
        report.verdicts.push(verdict(
            Conclusion::Inconclusive,
            CertificateKind::Exact,
            "SONC status inconclusive (necessary condition holds)",
        ));
    }
    check_invariants(&report)?;
    Ok(report)
}

fn summarize_search(outcome: &SearchOutcome) -> (FeasibilitySummary, Verdict) {
    let mut s = FeasibilitySummary {
        outcome: String::new(),
        exact: false,
        margin: None,
        normalized_margin: None,
        params: None,
        circuits: Vec::new(),
        weights: Vec::new(),
    };
    let v = match outcome {
        SearchOutcome::Feasible {
            decomposition,
            exact,
            margin,
        } => {
            s.outcome = "feasible".into();
            s.exact = *exact;
            s.margin = Some(*margin);
            if let Some(d) = decomposition {
                s.circuits = d.circuits.iter().map(|c| c.form.to_string()).collect();
                s.weights = d.weights.clone();
            }
            if *exact {
                verdict(
                    Conclusion::Sonc,
                    CertificateKind::Exact,
                    format!("SONC (exact; verified decomposition into {} circuits)", s.circuits.len()),
                )
            } else {
                verdict(
                    Conclusion::Sonc,
                    CertificateKind::Numeric,
                    format!("SONC (numeric, margin {margin:.4} reported; rounding failed)"),
                )
            }
        }
        SearchOutcome::InfeasibleWithMargin { margin, normalized } => {
            s.outcome = "infeasible_with_margin".into();
            s.margin = Some(*margin);
            s.normalized_margin = Some(*normalized);
            verdict(
                Conclusion::NotSonc,
                CertificateKind::Numeric,
                format!("not SONC (numeric, margin {margin:.4} reported)"),
            )
        }
        SearchOutcome::Inconclusive { margin, normalized } => {
            s.outcome = "inconclusive".into();
            s.margin = Some(*margin);
            s.normalized_margin = Some(*normalized);
            verdict(
                Conclusion::Inconclusive,
                CertificateKind::Numeric,
                format!("SONC status inconclusive (numeric margin {margin:.2e} below threshold)"),
            )
        }
        SearchOutcome::BudgetExceeded { params, max } => {
            s.outcome = "budget_exceeded".into();
            s.params = Some(*params);
            verdict(
                Conclusion::Inconclusive,
                CertificateKind::Numeric,
                format!("SONC status inconclusive (parameter count {params} exceeds search budget {max})"),
            )
        }
    };
    (s, v)
}

fn check_invariants(r: &AnalysisReport) -> Result<(), AnalysisError> {
    if r.has(Conclusion::Sonc) && r.has(Conclusion::NotSonc) {
        return Err(AnalysisError::InvariantViolation(format!(
            "contradictory SONC verdicts for {}",
            r.form_name
        )));
    }
    if r.has(Conclusion::Nonnegative) && r.has(Conclusion::NotNonnegative) {
        return Err(AnalysisError::InvariantViolation(format!(
            "contradictory nonnegativity verdicts for {}",
            r.form_name
        )));
    }
    Ok(())
}

/// Plain-text rendering used by the command-line front end.
pub fn render_text(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "form: {} ({} variables, degree {})", r.form_name, r.num_vars, r.degree);
    let _ = writeln!(out, "  f = {}", r.form);
    if r.zero_form {
        let _ = writeln!(out, "  zero form: no verdicts");
        return out;
    }
    if r.hilbert_case {
        let _ = writeln!(out, "  Hilbert case: nonnegative forms of this shape are SOS");
    }
    if let Some(p) = &r.partition {
        let _ = writeln!(
            out,
            "  |S| = {}, |I| = {}, |R| = {}, vertices = {}",
            p.s_set.len(),
            p.i_set.len(),
            p.r_set.len(),
            p.vertices.len()
        );
        for fam in &p.families {
            let _ = writeln!(out, "  N({}) = {}", fam.beta, fam.simplices.len());
        }
    }
    if let Some(c) = &r.circuit {
        let _ = write!(out, "  circuit: {:?}", c.kind);
        if let (Some(t), Some(cmp)) = (&c.circuit_number, &c.comparison) {
            let rel = match cmp.as_str() {
                "less" => "<",
                "equal" => "=",
                _ => ">",
            };
            let _ = write!(out, ", Θ ≈ {t}, |f_β| {rel} Θ");
        }
        let _ = writeln!(out);
        if let Some(m) = &c.mediated_set {
            let star: Vec<String> = m.star.iter().map(|p| p.to_string()).collect();
            let _ = writeln!(out, "  Δ* = {{{}}} ({:?})", star.join(", "), m.classification);
        }
    } else if let Some(reason) = &r.circuit_rejection {
        let _ = writeln!(out, "  not a circuit: {reason}");
    }
    if let Some(nc) = &r.necessary_condition {
        let _ = writeln!(
            out,
            "  Σ|f_β| = {}, Σ f_α (S ⧵ R) = {}, {:?}",
            format_rational(&nc.inner_sum),
            format_rational(&nc.outer_sum),
            nc.verdict
        );
    }
    if let Some(fs) = &r.feasibility {
        let _ = write!(out, "  search: {}", fs.outcome);
        if let Some(m) = fs.margin {
            let _ = write!(out, ", margin {m:.6}");
        }
        let _ = writeln!(out);
        for c in &fs.circuits {
            let _ = writeln!(out, "    + {c}");
        }
    }
    for v in &r.verdicts {
        let _ = writeln!(out, "  verdict: {}", v.text);
    }
    out
}
