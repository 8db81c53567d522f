//! Scenario engine behind the `kummerlat` binary; kept as a library so
//! integration tests can drive it directly.
//!
//! A scenario is a JSON document naming a model source, a seed, and a task
//! list.  Running it produces a report whose body is a pure function of the
//! scenario content (timings live outside the body), so identical inputs
//! give byte-identical bodies.

use std::path::Path;
use std::time::Instant;

use num_traits::Zero;
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use kummerlat_core::exact::{parse_rat, rat_mod, rat_to_string, Int, Rat};
use kummerlat_core::kummer::{
    build_glue_map, build_mukai_model, complement_pattern_check, exceptional_blind_plane,
    induced_four_plane, roots_in_complement, sample_interpretations, sample_twisted_bfield,
    verify_twisted_isometry, KummerModel,
};
use kummerlat_core::mat::IMat;
use kummerlat_core::serialize::{
    canonical_string, check_expected_digest, model_digest, model_from_json, model_to_json,
    sha256_hex, value_digest, SerializeError,
};
use kummerlat_core::stab::{
    central_charge, lift_path_winding, membership, sufficiency_check, wall_crossings, ChamberPoint,
    MukaiVector, PathInChamber, StabilityModel, SufficiencyOutcome,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("io error on {path}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Serialize(#[from] SerializeError),
}

fn schema(msg: impl Into<String>) -> EngineError {
    EngineError::Schema(msg.into())
}

// ---------------------------------------------------------------------------
// Scenario schema

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Model document to load; omitted means build in-process.
    #[serde(default)]
    pub model: Option<ModelRef>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub sample_count: Option<usize>,
    pub tasks: Vec<TaskSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelRef {
    pub path: String,
    #[serde(default)]
    pub expect_digest: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskSpec {
    /// Construct the model and check its basic lattice facts.
    Build,
    /// Discriminant matching and the glued even unimodular overlattice.
    VerifyLemma33,
    /// Sampled root-free complements, with an optional positive control.
    Rootfree {
        #[serde(default)]
        samples: Option<usize>,
        #[serde(default)]
        control: Option<bool>,
    },
    /// Twisted kernels of a given order and the rank-doubling isometry.
    Twisted {
        order: u32,
        #[serde(default)]
        samples: Option<usize>,
    },
    /// Membership flags and the root-window check at one chamber point.
    StabCheck {
        gram: Vec<Vec<i64>>,
        b: Vec<String>,
        omega: Vec<String>,
        #[serde(default)]
        r_max: Option<u32>,
    },
    /// Wall-crossing events along a piecewise-linear path.
    Walls {
        gram: Vec<Vec<i64>>,
        b: Vec<Vec<String>>,
        omega: Vec<Vec<String>>,
        vectors: Vec<Vec<String>>,
    },
    /// Winding of a lifted path with phase breakpoints.
    Lift {
        gram: Vec<Vec<i64>>,
        b: Vec<Vec<String>>,
        omega: Vec<Vec<String>>,
        #[serde(default)]
        lambda: Option<Vec<String>>,
        #[serde(default)]
        expect_winding: Option<i64>,
    },
}

impl TaskSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            TaskSpec::Build => "build",
            TaskSpec::VerifyLemma33 => "verify-lemma33",
            TaskSpec::Rootfree { .. } => "rootfree",
            TaskSpec::Twisted { .. } => "twisted",
            TaskSpec::StabCheck { .. } => "stab-check",
            TaskSpec::Walls { .. } => "walls",
            TaskSpec::Lift { .. } => "lift",
        }
    }

    fn needs_seed(&self) -> bool {
        matches!(self, TaskSpec::Rootfree { .. } | TaskSpec::Twisted { .. })
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario, EngineError> {
    let scenario: Scenario =
        serde_json::from_str(text).map_err(|e| schema(format!("scenario: {e}")))?;
    if scenario.tasks.is_empty() {
        return Err(schema("scenario: task list is empty"));
    }
    if scenario.seed.is_none() && scenario.tasks.iter().any(TaskSpec::needs_seed) {
        return Err(schema(
            "scenario: seed is required when sampled tasks are present",
        ));
    }
    Ok(scenario)
}

// ---------------------------------------------------------------------------
// Report

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Incomplete,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Incomplete => "incomplete",
        }
    }
}

pub struct TaskResult {
    pub status: Status,
    pub witnesses: Vec<Value>,
    pub details: Value,
}

impl TaskResult {
    fn pass(details: Value) -> Self {
        TaskResult {
            status: Status::Pass,
            witnesses: Vec::new(),
            details,
        }
    }

    fn fail(witnesses: Vec<Value>, details: Value) -> Self {
        TaskResult {
            status: Status::Fail,
            witnesses,
            details,
        }
    }

    fn error(msg: String) -> Self {
        TaskResult {
            status: Status::Fail,
            witnesses: vec![json!({ "error": msg })],
            details: Value::Null,
        }
    }
}

pub struct Report {
    pub body: Value,
    pub timings: Value,
}

impl Report {
    pub fn to_value(&self) -> Value {
        json!({ "body": self.body, "timings": self.timings })
    }

    pub fn body_string(&self) -> String {
        canonical_string(&self.body)
    }
}

pub struct RunOutcome {
    pub report: Report,
    pub exit_code: i32,
}

// ---------------------------------------------------------------------------
// Model plumbing

pub fn read_file(path: &Path) -> Result<String, EngineError> {
    std::fs::read_to_string(path).map_err(|source| EngineError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_file(path: &Path, text: &str) -> Result<(), EngineError> {
    std::fs::write(path, text).map_err(|source| EngineError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn parse_value(text: &str) -> Result<Value, EngineError> {
    serde_json::from_str(text).map_err(|e| schema(format!("json: {e}")))
}

/// Emit the model document plus trailing newline; returns its digest.
pub fn emit_model_file(model: &KummerModel, path: &Path) -> Result<String, EngineError> {
    let doc = model_to_json(model)?;
    write_file(path, &(canonical_string(&doc) + "\n"))?;
    Ok(value_digest(&doc))
}

pub fn load_model_file(
    path: &Path,
    expect_digest: Option<&str>,
) -> Result<KummerModel, EngineError> {
    let value = parse_value(&read_file(path)?)?;
    if let Some(d) = expect_digest {
        check_expected_digest(&value, d)?;
    }
    Ok(model_from_json(&value)?)
}

// ---------------------------------------------------------------------------
// Scenario execution

fn parse_rat_field(s: &str, what: &str) -> Result<Rat, EngineError> {
    parse_rat(s).ok_or_else(|| schema(format!("{what}: malformed rational {s:?}")))
}

fn parse_rat_vec(ss: &[String], what: &str) -> Result<Vec<Rat>, EngineError> {
    ss.iter().map(|s| parse_rat_field(s, what)).collect()
}

fn gram_from_rows(rows: &[Vec<i64>]) -> Result<IMat, EngineError> {
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows.len()) {
        return Err(schema("gram: must be square and nonempty"));
    }
    Ok(IMat::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&x| Int::from(x)).collect())
            .collect(),
    ))
}

fn mukai_from_strings(ss: &[String], rho: usize) -> Result<MukaiVector, EngineError> {
    if ss.len() != rho + 2 {
        return Err(schema(format!(
            "vector: expected {} entries, got {}",
            rho + 2,
            ss.len()
        )));
    }
    let vals = parse_rat_vec(ss, "vector")?;
    let mut ints = Vec::with_capacity(vals.len());
    for v in &vals {
        if !v.is_integer() {
            return Err(schema("vector: entries must be integers"));
        }
        ints.push(v.to_integer());
    }
    let s = ints.pop().expect("nonempty");
    let r = ints.remove(0);
    Ok(MukaiVector::new(r, ints, s))
}

fn stab_model_from_spec(
    gram: &[Vec<i64>],
    first_omega: &[Rat],
) -> Result<StabilityModel, EngineError> {
    let g = gram_from_rows(gram)?;
    StabilityModel::new("scenario", g, first_omega.to_vec()).map_err(|e| schema(e.to_string()))
}

fn path_from_spec(
    model: &StabilityModel,
    b: &[Vec<String>],
    omega: &[Vec<String>],
    lambda: Option<&[String]>,
) -> Result<PathInChamber, EngineError> {
    if b.len() != omega.len() || b.is_empty() {
        return Err(schema("path: b and omega breakpoint lists must match"));
    }
    let mut points = Vec::with_capacity(b.len());
    for (bs, os) in b.iter().zip(omega) {
        let bv = parse_rat_vec(bs, "path.b")?;
        let ov = parse_rat_vec(os, "path.omega")?;
        points.push(ChamberPoint::new(model, bv, ov).map_err(|e| schema(e.to_string()))?);
    }
    let l = match lambda {
        None => None,
        Some(ls) => Some(parse_rat_vec(ls, "path.lambda")?),
    };
    PathInChamber::new(model, points, l).map_err(|e| schema(e.to_string()))
}

fn int_json(x: &Int) -> Value {
    match i64::try_from(x) {
        Ok(v) => Value::from(v),
        Err(_) => Value::String(x.to_string()),
    }
}

fn rat_json(r: &Rat) -> Value {
    Value::String(rat_to_string(r))
}

fn coords_json(coords: &[Int]) -> Value {
    Value::Array(coords.iter().map(int_json).collect())
}

fn mukai_json(v: &MukaiVector) -> Value {
    let mut all = vec![v.r.clone()];
    all.extend(v.c1.iter().cloned());
    all.push(v.s.clone());
    coords_json(&all)
}

fn run_build(model: &KummerModel) -> TaskResult {
    let lattice = model.lattice();
    let even = lattice.is_even();
    let unimodular = lattice.is_unimodular();
    let signature = match lattice.signature() {
        Ok(s) => s,
        Err(e) => return TaskResult::error(e.to_string()),
    };
    let digest = match model_digest(model) {
        Ok(d) => d,
        Err(e) => return TaskResult::error(e.to_string()),
    };
    let details = json!({
        "rank": lattice.rank() as u64,
        "even": even,
        "unimodular": unimodular,
        "signature": [signature.0 as u64, signature.1 as u64],
        "model_digest": digest,
    });
    if even && unimodular && signature == (4, 20) {
        TaskResult::pass(details)
    } else {
        TaskResult::fail(vec![json!({ "lattice": "unexpected invariants" })], details)
    }
}

fn run_verify_lemma33(model: &KummerModel) -> TaskResult {
    let data = match build_glue_map(model.torus()) {
        Ok(d) => d,
        Err(e) => return TaskResult::error(e.to_string()),
    };
    let k_order = data.k_disc.group_order();
    let pi_order = data.pi_disc.group_order();
    let mut witnesses = Vec::new();
    let two = Rat::from_integer(Int::from(2));
    // q_K = −q_Π ∘ γ on every generator, i.e. the sum vanishes mod 2.
    let gens = data.k_disc.num_generators();
    for i in 0..gens {
        let mut e = vec![Int::from(0); gens];
        e[i] = Int::from(1);
        let qk = data.k_disc.q_of_class(&e);
        let qpi = data.pi_disc.q_of_class(&data.gamma.apply(&e));
        if !rat_mod(&(&qk + &qpi), &two).is_zero() {
            witnesses.push(json!({
                "generator": i as u64,
                "q_sum": rat_to_string(&(&qk + &qpi)),
            }));
        }
    }
    let glued = match data.glue() {
        Ok(g) => g,
        Err(e) => return TaskResult::error(e.to_string()),
    };
    let glued_sig = match glued.lattice.signature() {
        Ok(s) => s,
        Err(e) => return TaskResult::error(e.to_string()),
    };
    let gamma_lattice = model.lattice();
    let details = json!({
        "k_discriminant_order": int_json(&k_order),
        "pi_discriminant_order": int_json(&pi_order),
        "glued_even_unimodular": glued.lattice.is_even_unimodular(),
        "glued_signature": [glued_sig.0 as u64, glued_sig.1 as u64],
        "gamma_even": gamma_lattice.is_even(),
        "gamma_unimodular": gamma_lattice.is_unimodular(),
    });
    let ok = witnesses.is_empty()
        && k_order == Int::from(64)
        && pi_order == Int::from(64)
        && glued.lattice.is_even_unimodular()
        && glued_sig == (3, 19)
        && gamma_lattice.is_even_unimodular();
    if ok {
        TaskResult::pass(details)
    } else {
        if witnesses.is_empty() {
            witnesses.push(json!({ "glue": "invariant check failed" }));
        }
        TaskResult::fail(witnesses, details)
    }
}

fn run_rootfree(model: &KummerModel, seed: u64, samples: usize, control: bool) -> TaskResult {
    let interpretations = sample_interpretations(model.torus(), seed, samples);
    let mut empty = 0usize;
    let mut witnesses = Vec::new();
    let mut pattern_ok = 0usize;
    for g in &interpretations {
        let scan =
            induced_four_plane(model, g).and_then(|plane| roots_in_complement(model, &plane));
        match scan {
            Ok(scan) => {
                if scan.report.complement_rank != 20 || scan.report.complement_signature != (0, 20)
                {
                    witnesses.push(json!({
                        "complement_rank": scan.report.complement_rank as u64,
                        "complement_signature": [
                            scan.report.complement_signature.0 as u64,
                            scan.report.complement_signature.1 as u64,
                        ],
                    }));
                } else if scan.report.roots.is_empty() {
                    empty += 1;
                } else {
                    witnesses.push(json!({ "root": coords_json(&scan.report.roots[0]) }));
                }
            }
            Err(e) => witnesses.push(json!({ "error": e.to_string() })),
        }
        match complement_pattern_check(model, g) {
            Ok(true) => pattern_ok += 1,
            Ok(false) => witnesses.push(json!({ "pattern": "complement pattern mismatch" })),
            Err(e) => witnesses.push(json!({ "error": e.to_string() })),
        }
    }
    // Positive control: a plane blind to the exceptional classes must see
    // their roots.
    let mut control_roots = 0usize;
    if control {
        match interpretations.first() {
            Some(g) => {
                let scan = exceptional_blind_plane(model, g)
                    .and_then(|plane| roots_in_complement(model, &plane));
                match scan {
                    Ok(scan) => control_roots = scan.report.roots.len(),
                    Err(e) => witnesses.push(json!({ "error": e.to_string() })),
                }
                if control_roots == 0 {
                    witnesses.push(json!({ "control": "blind plane produced no roots" }));
                }
            }
            None => witnesses.push(json!({ "control": "no samples to run the control on" })),
        }
    }
    let details = json!({
        "samples": samples as u64,
        "empty_scans": empty as u64,
        "pattern_matches": pattern_ok as u64,
        "control_roots": control_roots as u64,
        "scan_complete": true,
    });
    if witnesses.is_empty() && empty == samples && pattern_ok == samples {
        TaskResult::pass(details)
    } else {
        TaskResult::fail(witnesses, details)
    }
}

fn run_twisted(model: &KummerModel, seed: u64, order: u32, samples: usize) -> TaskResult {
    let interpretations = sample_interpretations(model.torus(), seed, samples);
    let mut witnesses = Vec::new();
    let mut sample_details = Vec::new();
    for (i, g) in interpretations.iter().enumerate() {
        let b = match sample_twisted_bfield(model.torus(), g, order, seed ^ (i as u64 + 1)) {
            Some(b) => b,
            None => {
                witnesses.push(json!({ "sample": i as u64, "error": "no B-field of that order" }));
                continue;
            }
        };
        match verify_twisted_isometry(model, g, &b, false) {
            Ok(rep) => {
                let ok = rep.all_pass()
                    && rep.order == order
                    && rep.torus_index == Int::from(order as i64);
                sample_details.push(json!({
                    "sample": i as u64,
                    "order": rep.order,
                    "torus_index": int_json(&rep.torus_index),
                    "kummer_index": int_json(&rep.kummer_index),
                    "image_contained": rep.image_contained,
                    "gram_doubled": rep.gram_doubled,
                    "lattice_equality": rep.lattice_equality,
                }));
                if !ok {
                    witnesses.push(json!({ "sample": i as u64, "isometry": "check failed" }));
                }
            }
            Err(e) => witnesses.push(json!({ "sample": i as u64, "error": e.to_string() })),
        }
    }
    let details = json!({
        "order": order,
        "samples": samples as u64,
        "results": Value::Array(sample_details),
    });
    if witnesses.is_empty() {
        TaskResult::pass(details)
    } else {
        TaskResult::fail(witnesses, details)
    }
}

fn run_stab_check(
    gram: &[Vec<i64>],
    b: &[String],
    omega: &[String],
    r_max: u32,
) -> Result<TaskResult, EngineError> {
    let bv = parse_rat_vec(b, "b")?;
    let ov = parse_rat_vec(omega, "omega")?;
    let model = stab_model_from_spec(gram, &ov)?;
    let point = ChamberPoint::new(&model, bv, ov).map_err(|e| schema(e.to_string()))?;
    let frame =
        kummerlat_core::stab::exp_vector(&model, &point).map_err(|e| schema(e.to_string()))?;
    let rep = membership(&model, &frame, r_max).map_err(|e| schema(e.to_string()))?;
    let outcome = sufficiency_check(&model, &point, r_max).map_err(|e| schema(e.to_string()))?;
    let (status, outcome_json, witness) = match &outcome {
        SufficiencyOutcome::HoldsByOmegaSq => (Status::Pass, json!({ "holds": "omega-sq" }), None),
        SufficiencyOutcome::HoldsByScan { complete } => {
            let status = if *complete && rep.scan_complete {
                Status::Pass
            } else {
                Status::Incomplete
            };
            (
                status,
                json!({ "holds": "scan", "complete": complete }),
                None,
            )
        }
        SufficiencyOutcome::Violated { delta, charge } => (
            Status::Fail,
            json!({ "violated": true }),
            Some(json!({
                "delta": mukai_json(delta),
                "charge": [rat_json(&charge.0), rat_json(&charge.1)],
            })),
        ),
    };
    let details = json!({
        "membership": {
            "in_p": rep.in_p,
            "in_p_plus": rep.in_p_plus,
            "in_p_plus_0": rep.in_p_plus_0,
            "in_q": rep.in_q,
            "in_l": rep.in_l,
            "scan_complete": rep.scan_complete,
            "witness": rep.witness.as_ref().map(mukai_json).unwrap_or(Value::Null),
        },
        "sufficiency": outcome_json,
        "r_max": r_max,
    });
    Ok(TaskResult {
        status,
        witnesses: witness.into_iter().collect(),
        details,
    })
}

fn run_walls(
    gram: &[Vec<i64>],
    b: &[Vec<String>],
    omega: &[Vec<String>],
    vectors: &[Vec<String>],
) -> Result<TaskResult, EngineError> {
    let first_omega = parse_rat_vec(
        omega.first().ok_or_else(|| schema("path: omega empty"))?,
        "omega",
    )?;
    let model = stab_model_from_spec(gram, &first_omega)?;
    let path = path_from_spec(&model, b, omega, None)?;
    let vs = vectors
        .iter()
        .map(|v| mukai_from_strings(v, model.rho()))
        .collect::<Result<Vec<_>, _>>()?;
    let events = wall_crossings(&model, &path, &vs).map_err(|e| schema(e.to_string()))?;
    let event_json: Vec<Value> = events
        .iter()
        .map(|e| {
            json!({
                "segment": e.segment as u64,
                "t_lo": rat_json(&e.t_lo),
                "t_hi": rat_json(&e.t_hi),
                "pair": [e.pair.0 as u64, e.pair.1 as u64],
                "from_sign": e.from_sign,
                "to_sign": e.to_sign,
            })
        })
        .collect();
    Ok(TaskResult::pass(json!({
        "events": Value::Array(event_json),
        "count": events.len() as u64,
    })))
}

fn run_lift(
    gram: &[Vec<i64>],
    b: &[Vec<String>],
    omega: &[Vec<String>],
    lambda: Option<&[String]>,
    expect_winding: Option<i64>,
) -> Result<TaskResult, EngineError> {
    let first_omega = parse_rat_vec(
        omega.first().ok_or_else(|| schema("path: omega empty"))?,
        "omega",
    )?;
    let model = stab_model_from_spec(gram, &first_omega)?;
    let path = path_from_spec(&model, b, omega, lambda)?;
    let (winding, endpoint) =
        lift_path_winding(&model, &path).map_err(|e| schema(e.to_string()))?;
    let details = json!({
        "winding": int_json(&winding),
        "endpoint": {
            "phase": rat_json(&endpoint.phase),
            "winding": int_json(&endpoint.winding),
        },
    });
    match expect_winding {
        Some(w) if Int::from(w) != winding => Ok(TaskResult::fail(
            vec![json!({ "expected_winding": w, "winding": int_json(&winding) })],
            details,
        )),
        _ => Ok(TaskResult::pass(details)),
    }
}

fn run_task(model: &KummerModel, scenario: &Scenario, task: &TaskSpec) -> TaskResult {
    let seed = scenario.seed.unwrap_or(0);
    let default_samples = scenario.sample_count.unwrap_or(25);
    match task {
        TaskSpec::Build => run_build(model),
        TaskSpec::VerifyLemma33 => run_verify_lemma33(model),
        TaskSpec::Rootfree { samples, control } => run_rootfree(
            model,
            seed,
            samples.unwrap_or(default_samples),
            control.unwrap_or(true),
        ),
        TaskSpec::Twisted { order, samples } => run_twisted(
            model,
            seed,
            *order,
            samples.unwrap_or(default_samples.min(5)),
        ),
        TaskSpec::StabCheck {
            gram,
            b,
            omega,
            r_max,
        } => absorb(run_stab_check(gram, b, omega, r_max.unwrap_or(8))),
        TaskSpec::Walls {
            gram,
            b,
            omega,
            vectors,
        } => absorb(run_walls(gram, b, omega, vectors)),
        TaskSpec::Lift {
            gram,
            b,
            omega,
            lambda,
            expect_winding,
        } => absorb(run_lift(gram, b, omega, lambda.as_deref(), *expect_winding)),
    }
}

/// Inside a scenario a malformed task is a failed task, not a crashed run:
/// the report stays a total function of the scenario text.
fn absorb(result: Result<TaskResult, EngineError>) -> TaskResult {
    result.unwrap_or_else(|e| TaskResult::error(e.to_string()))
}

/// Run every task in order and assemble the report.  The body is fully
/// deterministic for a fixed scenario text; timings are reported separately.
pub fn run_scenario(scenario: &Scenario, scenario_text: &str) -> Result<RunOutcome, EngineError> {
    let total_start = Instant::now();
    let (model, model_digest_str) = match &scenario.model {
        None => {
            let m = build_mukai_model().map_err(|e| schema(e.to_string()))?;
            let d = model_digest(&m)?;
            (m, d)
        }
        Some(r) => {
            let m = load_model_file(Path::new(&r.path), r.expect_digest.as_deref())?;
            let d = model_digest(&m)?;
            (m, d)
        }
    };
    let mut tasks_json = Vec::with_capacity(scenario.tasks.len());
    let mut task_times = Vec::with_capacity(scenario.tasks.len());
    let mut any_fail = false;
    let mut any_incomplete = false;
    for task in &scenario.tasks {
        let start = Instant::now();
        let result = run_task(&model, scenario, task);
        task_times.push(Value::from(start.elapsed().as_millis() as u64));
        match result.status {
            Status::Fail => any_fail = true,
            Status::Incomplete => any_incomplete = true,
            Status::Pass => {}
        }
        tasks_json.push(json!({
            "kind": task.kind(),
            "status": result.status.as_str(),
            "witnesses": Value::Array(result.witnesses),
            "details": result.details,
        }));
    }
    let body = json!({
        "tool_version": TOOL_VERSION,
        "seed": scenario.seed,
        "sample_count": scenario.sample_count,
        "input_digests": {
            "scenario": sha256_hex(scenario_text.as_bytes()),
            "model": model_digest_str,
        },
        "tasks": Value::Array(tasks_json),
    });
    let timings = json!({
        "total_ms": total_start.elapsed().as_millis() as u64,
        "tasks_ms": Value::Array(task_times),
    });
    let exit_code = if any_fail {
        2
    } else if any_incomplete {
        3
    } else {
        0
    };
    Ok(RunOutcome {
        report: Report { body, timings },
        exit_code,
    })
}

pub fn run_scenario_file(path: &Path) -> Result<RunOutcome, EngineError> {
    let text = read_file(path)?;
    let scenario = parse_scenario(&text)?;
    run_scenario(&scenario, &text)
}

// ---------------------------------------------------------------------------
// One-shot helpers for the direct subcommands

/// `(Re, Im)` of the charge of `v` at `(B, ω)` over the given frame.
pub fn charge_once(
    gram: &[Vec<i64>],
    b: &[String],
    omega: &[String],
    v: &[String],
) -> Result<Value, EngineError> {
    let bv = parse_rat_vec(b, "b")?;
    let ov = parse_rat_vec(omega, "omega")?;
    let model = stab_model_from_spec(gram, &ov)?;
    let vec = mukai_from_strings(v, model.rho())?;
    let point = ChamberPoint::new(&model, bv, ov).map_err(|e| schema(e.to_string()))?;
    let z = central_charge(&model, &point, &vec).map_err(|e| schema(e.to_string()))?;
    Ok(json!({
        "re": rat_json(&z.0),
        "im": rat_json(&z.1),
    }))
}

pub fn stab_check_once(
    gram: &[Vec<i64>],
    b: &[String],
    omega: &[String],
    r_max: u32,
) -> Result<(Status, Value), EngineError> {
    let r = run_stab_check(gram, b, omega, r_max)?;
    Ok((
        r.status,
        json!({
            "status": r.status.as_str(),
            "witnesses": Value::Array(r.witnesses),
            "details": r.details,
        }),
    ))
}

pub fn walls_once(
    gram: &[Vec<i64>],
    b: &[Vec<String>],
    omega: &[Vec<String>],
    vectors: &[Vec<String>],
) -> Result<(Status, Value), EngineError> {
    let r = run_walls(gram, b, omega, vectors)?;
    Ok((
        r.status,
        json!({
            "status": r.status.as_str(),
            "witnesses": Value::Array(r.witnesses),
            "details": r.details,
        }),
    ))
}

pub fn lift_once(
    gram: &[Vec<i64>],
    b: &[Vec<String>],
    omega: &[Vec<String>],
    lambda: Option<&[String]>,
) -> Result<(Status, Value), EngineError> {
    let r = run_lift(gram, b, omega, lambda, None)?;
    Ok((
        r.status,
        json!({
            "status": r.status.as_str(),
            "witnesses": Value::Array(r.witnesses),
            "details": r.details,
        }),
    ))
}

/// Root-free verification used by `kummer verify` / `kummer rootfree`:
/// streams each found root as one JSON line through `sink`, then returns the
/// summary record.
pub fn rootfree_stream(
    model: &KummerModel,
    seed: u64,
    samples: usize,
    sink: &mut dyn FnMut(&Value),
) -> Result<(Status, Value), EngineError> {
    let start = Instant::now();
    let interpretations = sample_interpretations(model.torus(), seed, samples);
    let mut total_roots = 0usize;
    let mut empty = 0usize;
    for g in &interpretations {
        let plane = induced_four_plane(model, g).map_err(|e| schema(e.to_string()))?;
        let scan = roots_in_complement(model, &plane).map_err(|e| schema(e.to_string()))?;
        if scan.report.roots.is_empty() {
            empty += 1;
        }
        for root in &scan.report.roots {
            total_roots += 1;
            sink(&json!({ "coords": coords_json(root), "norm": -2 }));
        }
    }
    let status = if total_roots == 0 {
        Status::Pass
    } else {
        Status::Fail
    };
    let summary = json!({
        "summary": {
            "samples": samples as u64,
            "empty_scans": empty as u64,
            "roots_found": total_roots as u64,
            "complete": true,
            "elapsed_ms": start.elapsed().as_millis() as u64,
        },
    });
    Ok((status, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_schema_is_strict() {
        assert!(parse_scenario("{}").is_err());
        assert!(parse_scenario(r#"{"tasks": []}"#).is_err());
        // Sampled tasks demand a seed.
        let no_seed = r#"{"tasks": [{"kind": "rootfree"}]}"#;
        assert!(parse_scenario(no_seed).is_err());
        let ok = r#"{"seed": 7, "tasks": [{"kind": "rootfree", "samples": 2}]}"#;
        assert!(parse_scenario(ok).is_ok());
        // Unknown top-level fields are rejected.
        let unknown = r#"{"seed": 1, "bogus": 2, "tasks": [{"kind": "build"}]}"#;
        assert!(parse_scenario(unknown).is_err());
        // Unknown task kinds are rejected.
        let bad_kind = r#"{"seed": 1, "tasks": [{"kind": "frobnicate"}]}"#;
        assert!(parse_scenario(bad_kind).is_err());
    }

    #[test]
    fn trivial_scenario_passes() {
        let text = r#"{"tasks": [{"kind": "build"}]}"#;
        let scenario = parse_scenario(text).unwrap();
        let outcome = run_scenario(&scenario, text).unwrap();
        assert_eq!(outcome.exit_code, 0);
        let body = &outcome.report.body;
        assert_eq!(body["tasks"][0]["status"], "pass");
        assert_eq!(body["tasks"][0]["details"]["signature"], json!([4, 20]));
    }

    #[test]
    fn stab_check_task_reports_violation() {
        let text = r#"{
            "tasks": [{
                "kind": "stab-check",
                "gram": [[2, 0], [0, -2]],
                "b": ["0", "0"],
                "omega": ["1", "0"]
            }]
        }"#;
        let scenario = parse_scenario(text).unwrap();
        let outcome = run_scenario(&scenario, text).unwrap();
        assert_eq!(outcome.exit_code, 2);
        let task = &outcome.report.body["tasks"][0];
        assert_eq!(task["status"], "fail");
        assert_eq!(task["witnesses"][0]["delta"], json!([1, 0, 0, 1]));
    }
}
