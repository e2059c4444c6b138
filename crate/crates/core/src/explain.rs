//! Anomaly reports, explanation sentences and output rendering.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::engine::{Extension, RunResult, RunStatus, Stratum};
use crate::logic::{Literal, Modality, Sign, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum AnomalyKind {
    /// An obligation the agent was able to meet went unmet.
    F,
    /// An abnormal perturbation hit the agent.
    #[serde(rename = "F'")]
    FPrime,
}

impl AnomalyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AnomalyKind::F => "F",
            AnomalyKind::FPrime => "F'",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnomalyReport {
    pub kind: AnomalyKind,
    pub predicate: String,
    pub agent: String,
    pub state: i64,
    /// `(t, t+1)`; only for kind F.
    pub transition: Option<(i64, i64)>,
    /// Premises of the anomaly with the rule that produced each.
    pub support: Vec<(Literal, String)>,
    /// Index of the extension the anomaly was found in.
    pub extension: usize,
}

fn term_name(t: &Term) -> String {
    t.base_predicate().map_or_else(|| t.to_string(), |s| s.to_string())
}

fn report_for(ext: &Extension, idx: usize, lit: &Literal) -> AnomalyReport {
    let (prop, agents, time) = lit.atom.unfold();
    let state = time.and_then(|t| t.value()).unwrap_or(0);
    let (kind, support) = match ext.trace.get(lit) {
        Some(d) => {
            let perturbed = d.premises.iter().any(|p| p.atom.modality == Modality::AbnormalPerturbation);
            let support = d
                .premises
                .iter()
                .map(|p| (p.clone(), ext.trace.get(p).map_or("given", |q| q.source.id()).to_string()))
                .collect();
            (if perturbed { AnomalyKind::FPrime } else { AnomalyKind::F }, support)
        }
        None => (AnomalyKind::F, Vec::new()),
    };
    AnomalyReport {
        kind,
        predicate: term_name(&prop),
        agent: agents.first().map(term_name).unwrap_or_default(),
        state,
        transition: (kind == AnomalyKind::F).then_some((state, state + 1)),
        support,
        extension: idx,
    }
}

/// One report per `b_an` atom of each extension in the result, ordered by
/// extension, then state, agent and predicate.
pub fn collect_anomalies(r: &RunResult) -> Vec<AnomalyReport> {
    if r.status != RunStatus::AnomalyFound {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (idx, ext) in r.extensions.iter().enumerate() {
        let mut reports: Vec<AnomalyReport> = ext
            .literals
            .iter()
            .filter(|l| l.sign == Sign::Pos && l.atom.modality == Modality::BasicAnomaly)
            .map(|l| report_for(ext, idx, l))
            .collect();
        reports.sort_by(|a, b| (a.state, &a.agent, &a.predicate).cmp(&(b.state, &b.agent, &b.predicate)));
        out.extend(reports);
    }
    out
}

fn verb_phrase(predicate: &str) -> String {
    match predicate {
        "stops" => "stop".to_string(),
        "runs_slowly" => "slow down".to_string(),
        "control" => "keep control".to_string(),
        other => format!("do {other}"),
    }
}

/// The explanation sentence for a report.
pub fn explain(a: &AnomalyReport) -> String {
    match a.kind {
        AnomalyKind::F => {
            format!("because vehicle {} did not {} at state {}", a.agent, verb_phrase(&a.predicate), a.state + 1)
        }
        AnomalyKind::FPrime => format!(
            "because of an abnormal perturbation ({}) affecting vehicle {} at state {}",
            a.predicate, a.agent, a.state
        ),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RenderOptions {
    pub trace: bool,
    /// Group output by extension.
    pub per_extension: bool,
}

#[derive(Serialize)]
struct SupportJson {
    literal: String,
    rule: String,
}

#[derive(Serialize)]
struct AnomalyJson {
    kind: AnomalyKind,
    predicate: String,
    agent: String,
    state: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    transition: Option<[i64; 2]>,
    extension: usize,
    explanation: String,
    support: Vec<SupportJson>,
}

#[derive(Serialize)]
struct StratumJson {
    stratum: String,
    strict_rules: usize,
    defaults: usize,
    extensions: usize,
    literals: usize,
    halted: bool,
}

#[derive(Serialize)]
pub struct TraceNode {
    pub literal: String,
    pub rule: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub premises: Vec<TraceNode>,
}

#[derive(Serialize)]
struct ReportJson {
    status: &'static str,
    anomalies: Vec<AnomalyJson>,
    extensions_count: usize,
    stratum_log: Vec<StratumJson>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    conflict: Option<[String; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<TraceNode>>,
}

/// Derivation tree of `lit` in `ext`. Literals already expanded on the
/// current path are not expanded again.
pub fn trace_tree(ext: &Extension, lit: &Literal) -> TraceNode {
    fn go(ext: &Extension, lit: &Literal, path: &mut BTreeSet<Literal>) -> TraceNode {
        let d = ext.trace.get(lit);
        let rule = d.map_or("given", |d| d.source.id()).to_string();
        let mut premises = Vec::new();
        if let Some(d) = d {
            if path.insert(lit.clone()) {
                premises = d.premises.iter().map(|p| go(ext, p, path)).collect();
                path.remove(lit);
            }
        }
        TraceNode { literal: lit.to_string(), rule, premises }
    }
    go(ext, lit, &mut BTreeSet::new())
}

fn anomaly_literals(ext: &Extension) -> impl Iterator<Item = &Literal> {
    ext.literals.iter().filter(|l| l.sign == Sign::Pos && l.atom.modality == Modality::BasicAnomaly)
}

fn write_tree(out: &mut String, node: &TraceNode, depth: usize) {
    let _ = writeln!(out, "{}{}  [{}]", "  ".repeat(depth), node.literal, node.rule);
    for p in &node.premises {
        write_tree(out, p, depth + 1);
    }
}

fn stratum_label(s: Stratum) -> String {
    s.to_string()
}

/// Renders a run. Output depends only on its inputs.
pub fn render_report(r: &RunResult, reports: &[AnomalyReport], format: Format, opts: RenderOptions) -> String {
    match format {
        Format::Text => render_text(r, reports, opts),
        Format::Json => render_json(r, reports, opts),
    }
}

fn render_text(r: &RunResult, reports: &[AnomalyReport], opts: RenderOptions) -> String {
    let mut out = String::new();
    match r.status {
        RunStatus::AnomalyFound => {
            let grouped = opts.per_extension && r.extensions.len() > 1;
            let mut last = None;
            for a in reports {
                if grouped && last != Some(a.extension) {
                    let _ = writeln!(out, "extension {}:", a.extension + 1);
                    last = Some(a.extension);
                }
                let indent = if grouped { "  " } else { "" };
                let _ = writeln!(out, "{indent}{}", explain(a));
            }
        }
        RunStatus::NoAnomaly => out.push_str("no basic anomaly found\n"),
        RunStatus::InconsistentFacts => {
            out.push_str("inconsistent facts\n");
            if let Some(c) = &r.conflict {
                let _ = writeln!(out, "  {c}");
            }
        }
        RunStatus::ExtensionLimitHit => {
            let _ = writeln!(out, "no basic anomaly in the first {} extensions; more exist", r.extensions.len());
        }
    }
    if opts.trace {
        for (i, ext) in r.extensions.iter().enumerate() {
            if !(opts.per_extension || i == 0) {
                break;
            }
            for lit in anomaly_literals(ext) {
                out.push('\n');
                if opts.per_extension && r.extensions.len() > 1 {
                    let _ = writeln!(out, "extension {}:", i + 1);
                }
                write_tree(&mut out, &trace_tree(ext, lit), 0);
            }
        }
    }
    out
}

fn render_json(r: &RunResult, reports: &[AnomalyReport], opts: RenderOptions) -> String {
    let anomalies = reports
        .iter()
        .map(|a| AnomalyJson {
            kind: a.kind,
            predicate: a.predicate.clone(),
            agent: a.agent.clone(),
            state: a.state,
            transition: a.transition.map(|(s, t)| [s, t]),
            extension: a.extension,
            explanation: explain(a),
            support: a
                .support
                .iter()
                .map(|(l, rule)| SupportJson { literal: l.to_string(), rule: rule.clone() })
                .collect(),
        })
        .collect();
    let trace = opts.trace.then(|| {
        r.extensions
            .iter()
            .take(if opts.per_extension { usize::MAX } else { 1 })
            .flat_map(|ext| anomaly_literals(ext).map(move |l| trace_tree(ext, l)))
            .collect()
    });
    let doc = ReportJson {
        status: r.status.as_str(),
        anomalies,
        extensions_count: r.extensions.len(),
        stratum_log: r
            .stratum_log
            .iter()
            .map(|e| StratumJson {
                stratum: stratum_label(e.stratum),
                strict_rules: e.strict_rules,
                defaults: e.defaults,
                extensions: e.extensions,
                literals: e.literals,
                halted: e.halted,
            })
            .collect(),
        warnings: r.warnings.clone(),
        conflict: r.conflict.as_ref().map(|c| [c.first.to_string(), c.second.to_string()]),
        trace,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}
