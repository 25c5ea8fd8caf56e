//! Command dispatch, configuration and reports.
//!
//! Every command produces a [`Report`]: one record per check with status
//! `pass`, `fail` or `inconclusive`, a JSON witness and an optional numeric
//! residual. The exit code is 0 when no record fails, 1 otherwise, 2 for usage
//! errors and 3 when an input cannot be parsed or validated.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::cohomology::{
    self, are_equivalent, commutator_phase, exponent_invariants, exponent_of_rep,
    find_commutator_obstruction, numeric_equivalence, weyl_trivialization, witness_residual,
    CoboundarySolution, CohomologyError, ExponentTable, ObstructionCertificate,
};
use crate::extension::{
    check_axioms, check_equivalence_map, check_scaling_map, equivalence_isomorphism, ext_product,
    scaling_isomorphism, ExtensionElement, LocalGroup,
};
use crate::fixtures;
use crate::gauge::{
    chi_continuity_check, continuity_scan, default_pre_constant, local_factor_continuity,
    wigner_gauge, ContinuityRecord, GaugeContext, GaugedFamily, RayFamily, Su2Family, Su2Section,
    BOUND_SLACK, ORTHO_TOL,
};
use crate::io::{self, FileKind, IoError, SectionName, Su2Preset};
use crate::phase::{format_pi, Phase, PhaseRepr};
use crate::ray::StateVector;
use crate::rep::{extract_local_factor, PhaseGauge, RayRepresentation};
use crate::rng;
use crate::su2::{sample_near_identity, SampledCompactGroup};
use crate::wigner::{
    global_phase_distance, reconstruct, roundtrip_residual, verify_symmetry, Branch, RaySymmetry,
    SymmetryOperator,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorkbenchConfig {
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub alpha: f64,
    pub radius: f64,
    pub samples: usize,
    pub pre_constant: f64,
    pub branch_budget: u64,
}

impl Default for WorkbenchConfig {
    fn default() -> Self {
        WorkbenchConfig {
            seed: 0,
            tolerances: BTreeMap::new(),
            alpha: 0.5,
            radius: 0.3,
            samples: 1000,
            pre_constant: default_pre_constant(),
            branch_budget: 4096,
        }
    }
}

impl WorkbenchConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if !(self.radius > 0.0 && self.radius <= PI) {
            return Err(format!("radius must lie in (0, π], got {}", self.radius));
        }
        if let Some((k, v)) = self.tolerances.iter().find(|(_, v)| !(**v > 0.0)) {
            return Err(format!("tolerance {k} must be positive, got {v}"));
        }
        if self.samples == 0 {
            return Err("samples must be positive".into());
        }
        Ok(())
    }

    pub fn tol(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub witness: Value,
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
    pub verdict: Option<String>,
    pub exit_code: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs_digest: String,
    pub checks: Vec<Check>,
    pub summary: Summary,
}

impl Report {
    fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            inputs_digest: String::new(),
            checks: Vec::new(),
            summary: Summary { passed: 0, failed: 0, inconclusive: 0, verdict: None, exit_code: 0 },
        }
    }

    fn push(&mut self, name: &str, status: Status, witness: Value, residual: Option<f64>) {
        self.checks.push(Check { name: name.to_string(), status, witness, residual });
    }

    fn pass_if(&mut self, name: &str, ok: bool, witness: Value, residual: Option<f64>) {
        self.push(name, if ok { Status::Pass } else { Status::Fail }, witness, residual);
    }

    fn fail(&mut self, name: &str, err: impl std::fmt::Display) {
        self.push(name, Status::Fail, json!({ "error": err.to_string() }), None);
    }

    fn finish(mut self, input_error: bool) -> Self {
        let count = |s: Status| self.checks.iter().filter(|c| c.status == s).count();
        self.summary.passed = count(Status::Pass);
        self.summary.failed = count(Status::Fail);
        self.summary.inconclusive = count(Status::Inconclusive);
        self.summary.exit_code = if input_error {
            EXIT_INPUT
        } else if self.summary.failed > 0 {
            EXIT_FAIL
        } else {
            EXIT_PASS
        };
        self
    }

    pub fn exit_code(&self) -> i32 {
        self.summary.exit_code
    }

    pub fn to_json(&self) -> String {
        io::to_json(self)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("command: {}\ninputs: {}\n", self.command, self.inputs_digest);
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Inconclusive => "inconclusive",
            };
            out.push_str(&format!("[{status}] {}", c.name));
            if let Some(r) = c.residual {
                out.push_str(&format!("  residual={r:e}"));
            }
            if !c.witness.is_null() {
                out.push_str(&format!("  {}", c.witness));
            }
            out.push('\n');
        }
        let s = &self.summary;
        out.push_str(&format!("summary: {} pass, {} fail, {} inconclusive", s.passed, s.failed, s.inconclusive));
        if let Some(v) = &s.verdict {
            out.push_str(&format!("; verdict {v}"));
        }
        out.push('\n');
        out
    }
}

#[derive(Debug, Parser)]
#[command(name = "projrep", version, about = "Projective representation workbench")]
pub struct Cli {
    /// JSON configuration file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub radius: Option<f64>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// JSON report (default)
    #[arg(long, global = true, conflicts_with = "text")]
    pub json: bool,
    /// Plain text report
    #[arg(long, global = true)]
    pub text: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Load and validate a group, representation, exponent, matrix or preset file
    Validate { file: PathBuf },
    /// Check the cocycle law of a representation or exponent table
    Cocycle { file: PathBuf },
    /// Rephase into the Wigner gauge and check the continuity bounds
    GaugeFix {
        file: PathBuf,
        /// Index of the basis state used as reference
        #[arg(long, default_value_t = 0)]
        state: usize,
    },
    /// Decide whether the local exponent is a coboundary
    Trivialize { file: PathBuf },
    /// Decide whether two local exponents differ by a coboundary
    Equivalent { first: PathBuf, second: PathBuf },
    /// Commutator phases on commuting pairs and their gauge invariance
    Obstruct { file: PathBuf },
    /// Determinant trivialization and its residual
    Weyl { file: PathBuf },
    /// Axioms and isomorphisms of the local group
    Extension { file: PathBuf },
    /// Reconstruct a matrix wrapped as a phase-randomizing ray symmetry
    Wigner {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        antilinear: bool,
    },
    /// Continuity scan on an SU(2) sample or a finite representation
    ContinuityScan {
        /// Representation or SU(2) preset file
        file: Option<PathBuf>,
        #[arg(long)]
        preset: Option<PathBuf>,
        /// su2 or so3
        #[arg(long)]
        section: Option<String>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Cocycle { .. } => "cocycle",
            Command::GaugeFix { .. } => "gauge-fix",
            Command::Trivialize { .. } => "trivialize",
            Command::Equivalent { .. } => "equivalent",
            Command::Obstruct { .. } => "obstruct",
            Command::Weyl { .. } => "weyl",
            Command::Extension { .. } => "extension",
            Command::Wigner { .. } => "wigner",
            Command::ContinuityScan { .. } => "continuity-scan",
        }
    }

    fn inputs(&self) -> Vec<&Path> {
        match self {
            Command::Validate { file }
            | Command::Cocycle { file }
            | Command::GaugeFix { file, .. }
            | Command::Trivialize { file }
            | Command::Obstruct { file }
            | Command::Weyl { file }
            | Command::Extension { file } => vec![file],
            Command::Equivalent { first, second } => vec![first, second],
            Command::Wigner { matrix, .. } => vec![matrix],
            Command::ContinuityScan { file, preset, .. } => {
                file.iter().chain(preset.iter()).map(PathBuf::as_path).collect()
            }
        }
    }
}

/// Explicit flag values that win over the config file and presets.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub alpha: Option<f64>,
    pub radius: Option<f64>,
    pub samples: Option<usize>,
}

impl Overrides {
    fn apply(&self, cfg: &mut WorkbenchConfig) {
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.alpha {
            cfg.alpha = v;
        }
        if let Some(v) = self.radius {
            cfg.radius = v;
        }
        if let Some(v) = self.samples {
            cfg.samples = v;
        }
    }
}

fn digest(command: &Command, cfg: &WorkbenchConfig) -> Result<String, IoError> {
    let mut h = Sha256::new();
    h.update(command.name().as_bytes());
    for p in command.inputs() {
        let bytes = std::fs::read(p).map_err(|e| IoError::Read {
            path: p.display().to_string(),
            reason: e.to_string(),
        })?;
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(&bytes);
    }
    h.update(serde_json::to_vec(cfg).expect("config serializes"));
    Ok(hex::encode(h.finalize()))
}

/// Run one command. Input errors become a `load` fail record and exit code 3.
pub fn run(command: &Command, cfg: &WorkbenchConfig, overrides: &Overrides) -> Report {
    let mut report = Report::new(command.name());
    let result = digest(command, cfg).and_then(|d| {
        report.inputs_digest = d;
        dispatch(command, cfg, overrides, &mut report)
    });
    match result {
        Ok(()) => report.finish(false),
        Err(e) => {
            report.fail("load", &e);
            report.finish(true)
        }
    }
}

fn dispatch(
    command: &Command,
    cfg: &WorkbenchConfig,
    ov: &Overrides,
    rpt: &mut Report,
) -> Result<(), IoError> {
    match command {
        Command::Validate { file } => cmd_validate(file, rpt),
        Command::Cocycle { file } => {
            let d = load_exponent_like(file)?;
            cmd_cocycle(&d, rpt);
            Ok(())
        }
        Command::GaugeFix { file, state } => {
            let rep = io::load_rep(file)?;
            cmd_gauge_fix(&rep, *state, cfg, rpt);
            Ok(())
        }
        Command::Trivialize { file } => {
            let d = load_exponent_like(file)?;
            let zero = ExponentTable::zero(d.group().clone());
            decide(&d, &zero, cfg, rpt);
            Ok(())
        }
        Command::Equivalent { first, second } => {
            let (a, b) = (load_exponent_like(first)?, load_exponent_like(second)?);
            decide(&a, &b, cfg, rpt);
            Ok(())
        }
        Command::Obstruct { file } => {
            let d = load_exponent_like(file)?;
            cmd_obstruct(&d, cfg, rpt);
            Ok(())
        }
        Command::Weyl { file } => {
            let rep = io::load_rep(file)?;
            cmd_weyl(&rep, rpt);
            Ok(())
        }
        Command::Extension { file } => {
            let d = load_exponent_like(file)?;
            cmd_extension(&d, cfg, rpt);
            Ok(())
        }
        Command::Wigner { matrix, antilinear } => {
            let m = io::load_matrix(matrix)?;
            cmd_wigner(m, *antilinear, cfg, rpt);
            Ok(())
        }
        Command::ContinuityScan { file, preset, section } => {
            cmd_continuity(file.as_deref(), preset.as_deref(), section.as_deref(), cfg, ov, rpt)
        }
    }
}

fn load_exponent_like(path: &Path) -> Result<ExponentTable, IoError> {
    let text = io::read_text(path)?;
    match io::detect_kind(&text)? {
        FileKind::Rep => {
            let rep = io::rep_from_file(&io::parse(&text)?)?;
            exponent_of_rep(&rep).map_err(|e| IoError::Validation(e.to_string()))
        }
        FileKind::Exponent => io::exponent_from_file(&io::parse(&text)?),
        other => Err(IoError::Validation(format!(
            "expected a representation or exponent file, found {other:?}"
        ))),
    }
}

fn phase_json(p: Phase) -> Value {
    let pi = match p {
        Phase::Exact(t) => format_pi(t.pi_multiple()),
        Phase::Float(a) => format!("{a}"),
    };
    json!({ "turns": PhaseRepr::from(p), "pi": pi })
}

fn gauge_json(x: &PhaseGauge) -> Value {
    Value::Array(x.values().iter().map(|&p| phase_json(p)).collect())
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn cmd_validate(file: &Path, rpt: &mut Report) -> Result<(), IoError> {
    let text = io::read_text(file)?;
    match io::detect_kind(&text)? {
        FileKind::Group => {
            let g = io::group_from_file(&io::parse(&text)?)?;
            rpt.pass_if("group-axioms", true, json!({ "order": g.order(), "abelian": g.is_abelian() }), None);
        }
        FileKind::Rep => {
            let rep = io::rep_from_file(&io::parse(&text)?)?;
            let defect = rep.operators().iter().map(|o| o.unitarity_defect()).fold(0.0, f64::max);
            rpt.pass_if("unitarity", true, json!({ "order": rep.group().order(), "dim": rep.dim() }), Some(defect));
            let (scalar, pairs) = scalar_law_residual(&rep);
            rpt.pass_if("scalar-law", true, json!({ "pairs": pairs }), Some(scalar));
            cmd_cocycle(&exponent_of_rep(&rep).map_err(|e| IoError::Validation(e.to_string()))?, rpt);
        }
        FileKind::Exponent => {
            let d = io::exponent_from_file(&io::parse(&text)?)?;
            cmd_cocycle(&d, rpt);
        }
        FileKind::Matrix => {
            let m = io::load_matrix(file)?;
            let dim = m.nrows();
            let defect = crate::ray::max_abs(&(m.adjoint() * &m - nalgebra::DMatrix::identity(dim, dim)));
            rpt.pass_if("unitarity", defect <= 1e-9, json!({ "dim": dim }), Some(defect));
        }
        FileKind::Preset => {
            let p: Su2Preset = io::parse(&text)?;
            let ok = p.alpha > 0.0 && p.alpha < 1.0 && p.radius > 0.0 && p.radius <= PI && p.samples > 0;
            rpt.pass_if("preset", ok, serde_json::to_value(&p).expect("preset"), None);
        }
    }
    Ok(())
}

fn scalar_law_residual(rep: &RayRepresentation) -> (f64, usize) {
    let g = rep.group();
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    for r in g.elements() {
        for s in g.elements() {
            let w = extract_local_factor(rep, r, s).expect("validated on load");
            let lhs = rep.operator(r).matrix() * rep.operator(s).matrix();
            let rhs = rep.operator(g.mul(r, s)).matrix() * w;
            worst = worst.max(crate::ray::max_abs(&(lhs - rhs)));
            pairs += 1;
        }
    }
    (worst, pairs)
}

fn cmd_cocycle(d: &ExponentTable, rpt: &mut Report) {
    let inv = exponent_invariants(d);
    let c = &inv.cocycle;
    rpt.pass_if(
        "cocycle",
        c.passed,
        json!({ "exact": c.exact, "triples": c.triples_checked, "triple": c.witness }),
        Some(c.worst),
    );
    rpt.pass_if("normalization", inv.normalized, Value::Null, None);
    rpt.pass_if("inverse-symmetry", inv.inverse_symmetric, Value::Null, None);
    rpt.summary.verdict = Some(if c.passed { "cocycle" } else { "not a cocycle" }.into());
}

fn record_bounds<E>(records: &[ContinuityRecord<E>], slack: f64, rpt: &mut Report)
where
    E: std::fmt::Debug,
{
    for (i, name) in ["j5", "nec", "jjj", "ad5"].iter().enumerate() {
        let mut violations = 0;
        let mut margin = f64::NEG_INFINITY;
        let mut witness = Value::Null;
        for rec in records {
            let b = rec.bounds[i];
            margin = margin.max(b.lhs - b.rhs);
            if !b.holds(slack) {
                violations += 1;
                if witness.is_null() {
                    witness = json!({ "pair": format!("{:?}", rec.pair), "lhs": b.lhs, "rhs": b.rhs });
                }
            }
        }
        let w = json!({ "pairs": records.len(), "violations": violations, "first": witness });
        rpt.pass_if(name, violations == 0, w, Some(margin.max(0.0)));
    }
    let ortho = records.iter().map(|r| r.orthogonality).fold(0.0, f64::max);
    rpt.pass_if("orthogonality", ortho <= ORTHO_TOL, Value::Null, Some(ortho));
    let zid = records.iter().map(|r| r.z_identity).fold(0.0, f64::max);
    rpt.pass_if("z-norm-identity", zid <= 1e-9, Value::Null, Some(zid));
    let sg = records.iter().map(|r| r.sigma_vs_g).fold(0.0, f64::max);
    rpt.pass_if("sigma-vs-g", sg <= 1e-9, Value::Null, Some(sg));
}

fn cmd_gauge_fix(rep: &RayRepresentation, state: usize, cfg: &WorkbenchConfig, rpt: &mut Report) {
    if state >= rep.dim() {
        rpt.fail("gauge", format!("state index {state} out of range for dimension {}", rep.dim()));
        return;
    }
    let psi = StateVector::basis(rep.dim(), state);
    let (gauged, ctx) = match wigner_gauge(rep, &psi, cfg.alpha) {
        Ok(v) => v,
        Err(e) => {
            rpt.fail("gauge", e);
            return;
        }
    };
    let all_hold = ctx.conditions.iter().all(|c| c.holds());
    let tau: Vec<Value> = ctx
        .conditions
        .iter()
        .map(|c| json!({ "element": c.element, "tau": c.tau, "g": c.real_part }))
        .collect();
    rpt.pass_if(
        "gauge-conditions",
        all_hold,
        json!({ "admissible": ctx.admissible, "excluded": ctx.excluded, "phases": tau }),
        None,
    );
    let adm = &ctx.admissible;
    let pairs: Vec<(usize, usize)> = adm.iter().flat_map(|&a| adm.iter().map(move |&b| (a, b))).collect();
    match continuity_scan(&gauged, &ctx, &pairs) {
        Ok(recs) => record_bounds(&recs, cfg.tol("bound_slack", BOUND_SLACK), rpt),
        Err(e) => rpt.fail("continuity", e),
    }
    rpt.summary.verdict = Some(format!("{} of {} elements admissible", adm.len(), rep.group().order()));
}

fn certificate_json(c: &ObstructionCertificate) -> Value {
    json!({
        "commutator": c.commutator.map(|w| json!({
            "a": w.a,
            "b": w.b,
            "phase": phase_json(w.phase),
            "factor": complex_json(w.phase.unit()),
        })),
        "functional": c.functional.as_ref().map(|f| json!({
            "modulus": f.modulus.to_string(),
            "value": f.value.to_string(),
            "coefficients": f.coefficients.iter().map(|((r, s), v)| json!([r, s, v.to_string()])).collect::<Vec<_>>(),
        })),
        "branches_exhausted": c.branches_exhausted,
    })
}

fn decide(d1: &ExponentTable, d2: &ExponentTable, cfg: &WorkbenchConfig, rpt: &mut Report) {
    let exact = d1.is_exact() && d2.is_exact();
    let result = if exact {
        are_equivalent(d1, d2)
    } else {
        numeric_equivalence(d1, d2, cfg.branch_budget)
    };
    match result {
        Ok(sol) => {
            let verdict = match &sol {
                CoboundarySolution::Trivialized(_) => "Trivialized",
                CoboundarySolution::EquivalentVia(_) => "EquivalentVia",
                CoboundarySolution::Obstructed(_) => "Obstructed",
            };
            match &sol {
                CoboundarySolution::Obstructed(c) => {
                    rpt.pass_if("decision", true, json!({ "verdict": verdict, "exact": exact, "certificate": certificate_json(c) }), None);
                }
                CoboundarySolution::Trivialized(x) | CoboundarySolution::EquivalentVia(x) => {
                    rpt.pass_if("decision", true, json!({ "verdict": verdict, "exact": exact, "x": gauge_json(x) }), None);
                    let res = witness_residual(d1, d2, x).unwrap_or(f64::INFINITY);
                    let tol = if exact { 0.0 } else { cohomology::numeric::NUMERIC_TOL };
                    rpt.pass_if("substitution", res <= tol, Value::Null, Some(res));
                }
            }
            rpt.summary.verdict = Some(verdict.into());
        }
        Err(CohomologyError::BudgetExceeded { explored, total }) => {
            rpt.push(
                "decision",
                Status::Inconclusive,
                json!({ "verdict": "BudgetExceeded", "explored": explored, "branches": total.to_string() }),
                None,
            );
            rpt.summary.verdict = Some("BudgetExceeded".into());
        }
        Err(e) => rpt.fail("decision", e),
    }
}

fn cmd_obstruct(d: &ExponentTable, cfg: &WorkbenchConfig, rpt: &mut Report) {
    let g = d.group();
    let mut found = Vec::new();
    for a in g.elements() {
        for b in a + 1..g.order() {
            if let Ok(p) = commutator_phase(d, a, b) {
                if !p.is_trivial(1e-9) {
                    found.push((a, b, p));
                }
            }
        }
    }
    let list: Vec<Value> = found
        .iter()
        .map(|&(a, b, p)| json!({ "a": a, "b": b, "phase": phase_json(p), "factor": complex_json(p.unit()) }))
        .collect();
    rpt.pass_if("commutator-phases", true, json!({ "nontrivial": list }), None);
    if d.is_exact() {
        let mut rng = rng::seeded(cfg.seed);
        let trials = cfg.samples;
        let mut bad = None;
        for t in 0..trials {
            let x = fixtures::random_exact_gauge(&mut rng, g.order(), 24);
            let moved = d.gauged(&x).expect("same order");
            if let Some(&(a, b, p)) = found.iter().find(|&&(a, b, p)| commutator_phase(&moved, a, b).ok() != Some(p)) {
                bad = Some(json!({ "trial": t, "a": a, "b": b, "phase": phase_json(p) }));
                break;
            }
            if found.is_empty() && find_commutator_obstruction(&moved, 0.0).is_some() {
                bad = Some(json!({ "trial": t }));
                break;
            }
        }
        rpt.pass_if("gauge-invariance", bad.is_none(), json!({ "gauges": trials, "counterexample": bad }), None);
    } else {
        rpt.push("gauge-invariance", Status::Inconclusive, json!({ "reason": "inexact table" }), None);
    }
    let first = find_commutator_obstruction(d, 1e-9);
    rpt.summary.verdict = Some(match first {
        Some(w) => format!("obstructed: beta({}, {}) = {}", w.a, w.b, phase_json(w.phase)["pi"].as_str().unwrap_or("")),
        None => "no commutator obstruction".into(),
    });
}

fn cmd_weyl(rep: &RayRepresentation, rpt: &mut Report) {
    match weyl_trivialization(rep) {
        Ok(w) => {
            rpt.pass_if("lattice", w.on_lattice(), json!({ "n": rep.dim() }), Some(w.lattice_deviation));
            let nonzero: Vec<Value> = rep
                .group()
                .elements()
                .flat_map(|r| rep.group().elements().map(move |s| (r, s)))
                .filter(|&(r, s)| !w.residual.get(r, s).is_trivial(0.0))
                .map(|(r, s)| json!([r, s, phase_json(w.residual.get(r, s))]))
                .collect();
            rpt.pass_if("clean", true, json!({ "clean": w.clean, "x": gauge_json(&w.x), "residual_nonzero": nonzero }), None);
            rpt.summary.verdict = Some(if w.clean { "clean" } else { "residual" }.into());
        }
        Err(e) => rpt.fail("weyl", e),
    }
}

fn cmd_extension(d: &ExponentTable, cfg: &WorkbenchConfig, rpt: &mut Report) {
    let l = match LocalGroup::new(d) {
        Ok(l) => l,
        Err(e) => {
            rpt.fail("local-group", e);
            return;
        }
    };
    let n = cfg.samples;
    let ax = check_axioms(&l, n, cfg.seed);
    rpt.pass_if("axioms", ax.passed(), serde_json::to_value(&ax).expect("report"), None);

    let mut rng = rng::seeded(cfg.seed ^ 0x5eed);
    let x = fixtures::random_exact_gauge(&mut rng, d.group().order(), 12);
    match d.gauged(&x).map_err(|e| e.to_string()).and_then(|dt| {
        let lt = LocalGroup::new(&dt).map_err(|e| e.to_string())?;
        let phi = equivalence_isomorphism(&l, &lt, &x).map_err(|e| e.to_string())?;
        Ok(check_equivalence_map(&l, &lt, &phi, n, cfg.seed))
    }) {
        Ok(m) => rpt.pass_if(
            "equivalence-map",
            m.failures == 0 && m.bijection_failures == 0,
            json!({ "x": gauge_json(&x), "report": m }),
            None,
        ),
        Err(e) => rpt.fail("equivalence-map", e),
    }

    for z in [Rational64::from_integer(2), Rational64::new(1, 3), Rational64::from_integer(-5)] {
        let name = format!("scaling[{z}]");
        match scaling_isomorphism(&l, z) {
            Ok((lp, f)) => {
                let m = check_scaling_map(&l, &lp, &f, n, cfg.seed);
                rpt.pass_if(&name, m.exact == n && m.bijection_failures == 0, serde_json::to_value(&m).expect("report"), None);
            }
            Err(e) => rpt.fail(&name, e),
        }
    }
    if d.group().order() > 1 {
        let a = ExtensionElement::new(Rational64::from_integer(0), 1);
        rpt.summary.verdict = Some(format!("{a} ⋄ {a} = {}", ext_product(&l, &a, &a)));
    }
}

fn cmd_wigner(m: nalgebra::DMatrix<Complex64>, antilinear: bool, cfg: &WorkbenchConfig, rpt: &mut Report) {
    let v = match SymmetryOperator::new(m, false) {
        Ok(v) => v,
        Err(e) => {
            rpt.fail("matrix", e);
            return;
        }
    };
    let dim = v.dim();
    let op = if antilinear {
        v.compose(&SymmetryOperator::conjugation(dim)).expect("same dim")
    } else {
        v.clone()
    };
    let mut t = RaySymmetry::phase_randomized(op.clone(), cfg.seed);
    match verify_symmetry(&mut t, dim * dim, cfg.seed.wrapping_add(1)) {
        Ok(s) => rpt.pass_if("symmetry", true, serde_json::to_value(&s).expect("report"), Some(s.max_deviation)),
        Err(e) => {
            rpt.fail("symmetry", e);
            return;
        }
    }
    let s = match reconstruct(&mut t) {
        Ok(s) => s,
        Err(e) => {
            rpt.fail("reconstruct", e);
            return;
        }
    };
    let expected = if antilinear { Branch::Antilinear } else { Branch::Linear };
    rpt.pass_if("classification", s.branch() == expected, json!({ "branch": s.branch(), "expected": expected }), None);
    let tol = cfg.tol("roundtrip", 1e-8);
    let rt = roundtrip_residual(&mut t, &s, 100, cfg.seed.wrapping_add(2));
    rpt.pass_if("roundtrip", rt <= tol, json!({ "probes": 100 }), Some(rt));
    let gp = global_phase_distance(s.matrix(), v.matrix(), 10_000);
    rpt.pass_if("global-phase", gp <= tol, Value::Null, Some(gp));
    let ud = s.unitarity_defect();
    rpt.pass_if("unitarity", ud <= 1e-9, Value::Null, Some(ud));
    if s.is_antilinear() {
        let sq = s.compose(&s).expect("same dim");
        let d = sq.unitarity_defect();
        rpt.pass_if("square", !sq.is_antilinear() && d <= 1e-12, Value::Null, Some(d));
    }
    rpt.summary.verdict = Some(format!("{:?}", s.branch()));
}

fn cmd_continuity(
    file: Option<&Path>,
    preset: Option<&Path>,
    section: Option<&str>,
    cfg: &WorkbenchConfig,
    ov: &Overrides,
    rpt: &mut Report,
) -> Result<(), IoError> {
    let mut preset_data: Option<Su2Preset> = None;
    if let Some(p) = preset {
        preset_data = Some(io::load_preset(p)?);
    }
    if let Some(f) = file {
        let text = io::read_text(f)?;
        match io::detect_kind(&text)? {
            FileKind::Rep => {
                let rep = io::rep_from_file(&io::parse(&text)?)?;
                finite_scan(&rep, cfg, rpt);
                return Ok(());
            }
            FileKind::Preset => preset_data = Some(io::parse(&text)?),
            other => {
                return Err(IoError::Validation(format!("cannot scan a {other:?} file")));
            }
        }
    }
    let mut run_cfg = cfg.clone();
    let mut sec = Su2Section::Su2;
    if let Some(p) = &preset_data {
        run_cfg.radius = p.radius;
        run_cfg.samples = p.samples;
        run_cfg.seed = p.seed;
        run_cfg.alpha = p.alpha;
        if p.section == SectionName::So3 {
            sec = Su2Section::So3;
        }
        ov.apply(&mut run_cfg);
    }
    match section {
        Some("su2") => sec = Su2Section::Su2,
        Some("so3") => sec = Su2Section::So3,
        Some(other) => return Err(IoError::Validation(format!("unknown section {other}"))),
        None => {}
    }
    run_cfg.validate().map_err(IoError::Validation)?;
    su2_scan(sec, &run_cfg, rpt);
    Ok(())
}

fn su2_scan(section: Su2Section, cfg: &WorkbenchConfig, rpt: &mut Report) {
    let g = SampledCompactGroup::su2(cfg.radius);
    let qs = match sample_near_identity(&g, cfg.radius, cfg.samples + 3, cfg.seed) {
        Ok(q) => q,
        Err(e) => {
            rpt.fail("sample", e);
            return;
        }
    };
    let e1 = StateVector::basis(2, 0);
    let fam = GaugedFamily { inner: Su2Family { section }, reference: e1.clone() };
    let ctx = match GaugeContext::for_family(e1.clone(), cfg.alpha) {
        Ok(c) => c,
        Err(e) => {
            rpt.fail("gauge", e);
            return;
        }
    };
    let pairs: Vec<_> = qs.windows(2).take(cfg.samples).map(|w| (w[0], w[1])).collect();
    scan_family(&fam, &ctx, &pairs, cfg, rpt);
    let quads: Vec<_> = qs.windows(4).take(cfg.samples).map(|w| (w[0], w[1], w[2], w[3])).collect();
    match local_factor_continuity(&fam, &ctx, &quads, &e1) {
        Ok(r) => rpt.pass_if("factor-continuity", r.violations == 0, serde_json::to_value(&r).expect("report"), Some(r.worst_margin.max(0.0))),
        Err(e) => rpt.fail("factor-continuity", e),
    }
    rpt.summary.verdict = Some(format!("{} pairs at radius {}", pairs.len(), cfg.radius));
}

fn scan_family<F: RayFamily>(
    fam: &F,
    ctx: &GaugeContext,
    pairs: &[(F::Element, F::Element)],
    cfg: &WorkbenchConfig,
    rpt: &mut Report,
) {
    match continuity_scan(fam, ctx, pairs) {
        Ok(recs) => record_bounds(&recs, cfg.tol("bound_slack", BOUND_SLACK), rpt),
        Err(e) => {
            rpt.fail("continuity", e);
            return;
        }
    }
    if fam.dim() < 2 {
        return;
    }
    let phi = StateVector::basis(fam.dim(), 0);
    let varphi = StateVector::basis(fam.dim(), 1);
    let chi_pairs = &pairs[..pairs.len().min(1000)];
    match chi_continuity_check(fam, ctx, &phi, &varphi, chi_pairs, cfg.pre_constant) {
        Ok(c) => {
            rpt.pass_if("chi-identity", c.identity_residual <= 1e-9, Value::Null, Some(c.identity_residual));
            rpt.pass_if("chi-bound", c.violations == 0, serde_json::to_value(&c).expect("report"), None);
        }
        Err(e) => rpt.fail("chi", e),
    }
}

fn finite_scan(rep: &RayRepresentation, cfg: &WorkbenchConfig, rpt: &mut Report) {
    let psi = StateVector::basis(rep.dim(), 0);
    let (gauged, ctx) = match wigner_gauge(rep, &psi, cfg.alpha) {
        Ok(v) => v,
        Err(e) => {
            rpt.fail("gauge", e);
            return;
        }
    };
    let adm = ctx.admissible.clone();
    let pairs: Vec<(usize, usize)> = adm.iter().flat_map(|&a| adm.iter().map(move |&b| (a, b))).collect();
    scan_family(&gauged, &ctx, &pairs, cfg, rpt);
    let mut quads = Vec::new();
    'outer: for &a in &adm {
        for &b in &adm {
            for &c in &adm {
                for &d in &adm {
                    quads.push((a, b, c, d));
                    if quads.len() >= 100_000 {
                        break 'outer;
                    }
                }
            }
        }
    }
    match local_factor_continuity(&gauged, &ctx, &quads, &psi) {
        Ok(r) => rpt.pass_if("factor-continuity", r.violations == 0, serde_json::to_value(&r).expect("report"), Some(r.worst_margin.max(0.0))),
        Err(e) => rpt.fail("factor-continuity", e),
    }
    rpt.summary.verdict = Some(format!("{} admissible elements", adm.len()));
}

/// Equivalence decision between two in-memory tables, as a finished report.
pub fn equivalence_report(d1: &ExponentTable, d2: &ExponentTable, cfg: &WorkbenchConfig) -> Report {
    let mut rpt = Report::new("equivalent");
    decide(d1, d2, cfg, &mut rpt);
    rpt.finish(false)
}

/// Determinant trivialization of an in-memory representation.
pub fn weyl_report(rep: &RayRepresentation) -> Report {
    let mut rpt = Report::new("weyl");
    cmd_weyl(rep, &mut rpt);
    rpt.finish(false)
}

/// Parse arguments, run, and render. Returns the exit code and the rendered
/// report (or the usage message).
pub fn run_args<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            return (code, e.to_string());
        }
    };
    let mut cfg = WorkbenchConfig::default();
    if let Some(path) = &cli.config {
        match io::read_text(path).and_then(|t| io::parse::<WorkbenchConfig>(&t)) {
            Ok(c) => cfg = c,
            Err(e) => return (EXIT_INPUT, format!("config: {e}\n")),
        }
    }
    let ov = Overrides { seed: cli.seed, alpha: cli.alpha, radius: cli.radius, samples: cli.samples };
    ov.apply(&mut cfg);
    if let Err(e) = cfg.validate() {
        return (EXIT_USAGE, format!("config: {e}\n"));
    }
    let report = run(&cli.command, &cfg, &ov);
    let text = if cli.text { report.to_text() } else { report.to_json() + "\n" };
    if let Some(out) = &cli.out {
        if let Err(e) = std::fs::write(out, &text) {
            return (EXIT_INPUT, format!("cannot write {}: {e}\n", out.display()));
        }
        return (report.exit_code(), String::new());
    }
    (report.exit_code(), text)
}
