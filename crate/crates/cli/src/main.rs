//! `kummerlat` — exact-arithmetic toolkit for Kummer-surface lattices and
//! the numerical layer of stability conditions.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use kummerlat_cli as engine;
use kummerlat_cli::Status;
use kummerlat_core::kummer::{
    algebraic_and_transcendental, build_glue_map, build_mukai_model,
    bz_orthogonal_to_transcendental, sample_interpretations, sample_twisted_bfield, twisted_kernel,
    verify_twisted_isometry,
};
use kummerlat_core::lattice::IntegerLattice;
use kummerlat_core::serialize::{
    canonical_string, lattice_from_json, lattice_to_json, value_digest,
};

#[derive(Parser)]
#[command(
    name = "kummerlat",
    version,
    about = "Exact-arithmetic Kummer-surface lattices and numerical stability",
    after_help = "Set KUMMERLAT_THREADS to bound the worker threads used by long scans.\n\
                  Exit codes: 0 success, 1 usage/IO error, 2 verification failure, 3 incomplete scan."
)]
struct Cli {
    /// Emit machine-readable JSON instead of prose.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect lattices and the discriminant glue.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Build and verify the rank-24 ambient model.
    #[command(subcommand)]
    Kummer(KummerCmd),
    /// Twisted transcendental kernels and the rank-doubling isometry.
    #[command(subcommand)]
    Twist(TwistCmd),
    /// Central charges, chamber membership, walls, and lifts.
    #[command(subcommand)]
    Stab(StabCmd),
    /// Run a scenario file and print its report.
    Run {
        scenario: PathBuf,
        /// Require the scenario's model document to hash to this digest.
        #[arg(long)]
        expect_digest: Option<String>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// Rank, determinant, parity, signature, and digest of a lattice.
    Info {
        /// Lattice document (JSON with label/rank/gram).
        file: Option<PathBuf>,
        /// Built-in lattice: gamma, torus-h2, torus-mukai, torus-geometric, kummer-k.
        #[arg(long, conflicts_with = "file")]
        builtin: Option<String>,
    },
    /// Match the two discriminant forms and glue the even unimodular overlattice.
    Glue,
}

#[derive(Subcommand)]
enum KummerCmd {
    /// Construct the model; write the canonical document with --out.
    Build {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sampled root-free verification; exits nonzero if any root appears.
    Verify {
        #[arg(long, default_value_t = 25)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Stream the root scan as JSON lines plus a summary record.
    Rootfree {
        #[arg(long, default_value_t = 25)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum TwistCmd {
    /// Kernel of a sampled order-n B-field character on the transcendental lattice.
    Kernel {
        #[arg(short, long)]
        n: u32,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Verify the rank-doubling twisted isometry on sampled geometric data.
    Lemma51 {
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(short, long, default_value_t = 2)]
        n: u32,
    },
}

#[derive(Subcommand)]
enum StabCmd {
    /// Central charge of a vector at a chamber point.
    Charge {
        /// NS lattice document (JSON with label/rank/gram).
        #[arg(long)]
        model: PathBuf,
        /// Comma-separated rational B-field coordinates.
        #[arg(long = "B", visible_alias = "b")]
        b: String,
        /// Comma-separated rational Kähler coordinates.
        #[arg(long)]
        omega: String,
        /// Comma-separated integer vector "r,c...,s".
        #[arg(long = "v")]
        v: String,
    },
    /// Membership flags and the root-window check at one chamber point.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "B", visible_alias = "b")]
        b: String,
        #[arg(long)]
        omega: String,
        #[arg(long, default_value_t = 8)]
        r_max: u32,
    },
    /// Stream wall-crossing events along a path file.
    Walls {
        /// Path document: gram, b/omega breakpoint lists, optional lambda.
        #[arg(long)]
        path: PathBuf,
        /// JSON list of integer vectors "r,c...,s".
        #[arg(long)]
        vectors: PathBuf,
    },
    /// Winding number of the lifted path.
    Lift {
        #[arg(long)]
        path: PathBuf,
    },
}

fn main() -> ExitCode {
    // Usage problems exit 1; code 2 is reserved for verification failures.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn status_code(status: Status) -> ExitCode {
    match status {
        Status::Pass => ExitCode::SUCCESS,
        Status::Fail => ExitCode::from(2),
        Status::Incomplete => ExitCode::from(3),
    }
}

fn emit(as_json: bool, value: &Value, human: &[String]) {
    if as_json {
        println!("{}", canonical_string(value));
    } else {
        for line in human {
            println!("{line}");
        }
    }
}

fn csv_list(s: &str) -> Vec<String> {
    s.split(',').map(|p| p.trim().to_string()).collect()
}

fn rat_string(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => match n.as_i64() {
            Some(x) => Ok(x.to_string()),
            None => bail!("expected an exact rational, got {n}"),
        },
        other => bail!("expected a rational as string or integer, got {other}"),
    }
}

fn rat_strings(v: &Value, what: &str) -> Result<Vec<String>> {
    let arr = v
        .as_array()
        .with_context(|| format!("{what}: expected an array"))?;
    arr.iter().map(rat_string).collect()
}

fn rat_lists(v: &Value, what: &str) -> Result<Vec<Vec<String>>> {
    let arr = v
        .as_array()
        .with_context(|| format!("{what}: expected an array of arrays"))?;
    arr.iter().map(|row| rat_strings(row, what)).collect()
}

fn gram_rows(v: &Value) -> Result<Vec<Vec<i64>>> {
    let arr = v.as_array().context("gram: expected an array of rows")?;
    arr.iter()
        .map(|row| {
            row.as_array()
                .context("gram: expected integer rows")?
                .iter()
                .map(|x| x.as_i64().context("gram: entries must be integers"))
                .collect()
        })
        .collect()
}

/// Path document for `stab walls` / `stab lift`:
/// `{"gram": [[int]], "b": [[rat]], "omega": [[rat]], "lambda": [rat]?}`.
struct PathDoc {
    gram: Vec<Vec<i64>>,
    b: Vec<Vec<String>>,
    omega: Vec<Vec<String>>,
    lambda: Option<Vec<String>>,
}

fn read_path_doc(path: &Path) -> Result<PathDoc> {
    let value = engine::parse_value(&engine::read_file(path)?)?;
    let gram = gram_rows(value.get("gram").context("path document: missing gram")?)?;
    let b = rat_lists(value.get("b").context("path document: missing b")?, "b")?;
    let omega = rat_lists(
        value.get("omega").context("path document: missing omega")?,
        "omega",
    )?;
    let lambda = match value.get("lambda") {
        None | Some(Value::Null) => None,
        Some(l) => Some(rat_strings(l, "lambda")?),
    };
    Ok(PathDoc {
        gram,
        b,
        omega,
        lambda,
    })
}

fn read_vectors_doc(path: &Path) -> Result<Vec<Vec<String>>> {
    let value = engine::parse_value(&engine::read_file(path)?)?;
    let field = value
        .get("vectors")
        .context("vectors document: missing field \"vectors\"")?;
    rat_lists(field, "vectors")
}

fn read_ns_gram(path: &Path) -> Result<Vec<Vec<i64>>> {
    let value = engine::parse_value(&engine::read_file(path)?)?;
    let lattice = lattice_from_json(&value)?;
    let gram = lattice.gram();
    (0..gram.rows())
        .map(|i| {
            gram.row(i)
                .iter()
                .map(|x| i64::try_from(x).map_err(|_| anyhow::anyhow!("gram entry out of range")))
                .collect()
        })
        .collect()
}

fn builtin_lattice(name: &str) -> Result<Arc<IntegerLattice>> {
    let model = build_mukai_model()?;
    Ok(match name {
        "gamma" => Arc::clone(model.lattice()),
        "torus-h2" => Arc::clone(model.torus().h2_lattice()),
        "torus-mukai" => Arc::clone(model.torus().mukai_lattice()),
        "torus-geometric" => Arc::clone(model.torus().geometric_lattice()),
        "kummer-k" => Arc::new(model.torus().k_lattice()),
        other => bail!(
            "unknown builtin lattice {other:?} \
             (try gamma, torus-h2, torus-mukai, torus-geometric, kummer-k)"
        ),
    })
}

fn dispatch(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Lattice(cmd) => lattice_cmd(cli.json, cmd),
        Command::Kummer(cmd) => kummer_cmd(cli.json, cmd),
        Command::Twist(cmd) => twist_cmd(cli.json, cmd),
        Command::Stab(cmd) => stab_cmd(cli.json, cmd),
        Command::Run {
            scenario,
            expect_digest,
            out,
        } => run_cmd(scenario, expect_digest.as_deref(), out.as_deref()),
    }
}

fn lattice_cmd(as_json: bool, cmd: &LatticeCmd) -> Result<ExitCode> {
    match cmd {
        LatticeCmd::Info { file, builtin } => {
            let lattice: Arc<IntegerLattice> = match (file, builtin) {
                (Some(f), None) => {
                    let value = engine::parse_value(&engine::read_file(f)?)?;
                    Arc::new(lattice_from_json(&value)?)
                }
                (None, Some(name)) => builtin_lattice(name)?,
                _ => bail!("provide a lattice file or --builtin NAME"),
            };
            let signature = lattice.signature()?;
            let doc = lattice_to_json(&lattice)?;
            let info = json!({
                "label": lattice.label(),
                "rank": lattice.rank() as u64,
                "determinant": lattice.determinant().to_string(),
                "even": lattice.is_even(),
                "unimodular": lattice.is_unimodular(),
                "signature": [signature.0 as u64, signature.1 as u64],
                "digest": value_digest(&doc),
            });
            emit(
                as_json,
                &info,
                &[
                    format!("label:       {}", lattice.label().unwrap_or("(none)")),
                    format!("rank:        {}", lattice.rank()),
                    format!("determinant: {}", lattice.determinant()),
                    format!("even:        {}", lattice.is_even()),
                    format!("unimodular:  {}", lattice.is_unimodular()),
                    format!("signature:   ({}, {})", signature.0, signature.1),
                    format!("digest:      {}", value_digest(&doc)),
                ],
            );
            Ok(ExitCode::SUCCESS)
        }
        LatticeCmd::Glue => {
            let model = build_mukai_model()?;
            let data = build_glue_map(model.torus())?;
            let k_order = data.k_disc.group_order();
            let pi_order = data.pi_disc.group_order();
            let glued = data.glue()?;
            let sig = glued.lattice.signature()?;
            let ok = k_order == 64.into()
                && pi_order == 64.into()
                && glued.lattice.is_even_unimodular()
                && sig == (3, 19);
            let info = json!({
                "k_discriminant_order": k_order.to_string(),
                "pi_discriminant_order": pi_order.to_string(),
                "glued_rank": glued.lattice.rank() as u64,
                "glued_even_unimodular": glued.lattice.is_even_unimodular(),
                "glued_signature": [sig.0 as u64, sig.1 as u64],
                "ok": ok,
            });
            emit(
                as_json,
                &info,
                &[
                    format!("|K*/K|  = {k_order}"),
                    format!("|Pi*/Pi| = {pi_order}"),
                    format!(
                        "glued: rank {} signature ({}, {}) even unimodular: {}",
                        glued.lattice.rank(),
                        sig.0,
                        sig.1,
                        glued.lattice.is_even_unimodular()
                    ),
                    format!("ok: {ok}"),
                ],
            );
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
    }
}

fn kummer_cmd(as_json: bool, cmd: &KummerCmd) -> Result<ExitCode> {
    match cmd {
        KummerCmd::Build { out } => {
            let model = build_mukai_model()?;
            match out {
                Some(path) => {
                    let digest = engine::emit_model_file(&model, path)?;
                    emit(
                        as_json,
                        &json!({ "path": path.display().to_string(), "digest": digest }),
                        &[format!("wrote {} (digest {digest})", path.display())],
                    );
                }
                None => {
                    let doc = kummerlat_core::serialize::model_to_json(&model)?;
                    println!("{}", canonical_string(&doc));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        KummerCmd::Verify { samples, seed } | KummerCmd::Rootfree { samples, seed } => {
            let strict = matches!(cmd, KummerCmd::Verify { .. });
            let model = build_mukai_model()?;
            let mut sink = |line: &Value| println!("{}", canonical_string(line));
            let (status, summary) = engine::rootfree_stream(&model, *seed, *samples, &mut sink)?;
            println!("{}", canonical_string(&summary));
            Ok(if strict {
                status_code(status)
            } else {
                ExitCode::SUCCESS
            })
        }
    }
}

fn twist_cmd(as_json: bool, cmd: &TwistCmd) -> Result<ExitCode> {
    let model = build_mukai_model()?;
    let torus = model.torus();
    match cmd {
        TwistCmd::Kernel { n, seed } => {
            let g = sample_interpretations(torus, *seed, 1)
                .pop()
                .context("sampling produced no geometric data")?;
            let b = sample_twisted_bfield(torus, &g, *n, *seed)
                .with_context(|| format!("no B-field of exact order {n} found"))?;
            let (_, t_a) = algebraic_and_transcendental(
                torus.h2_lattice(),
                g.omega1().coords(),
                g.omega2().coords(),
            )?;
            let twist = twisted_kernel(&t_a, b.coords(), *n)?;
            let b_json: Vec<String> = b
                .coords()
                .iter()
                .map(kummerlat_core::exact::rat_to_string)
                .collect();
            let info = json!({
                "order": twist.order,
                "transcendental_rank": twist.transcendental.rank() as u64,
                "kernel_rank": twist.kernel.rank() as u64,
                "index": twist.index.to_string(),
                "bfield": b_json,
            });
            let ok = twist.index == (*n).into();
            emit(
                as_json,
                &info,
                &[
                    format!("order:  {}", twist.order),
                    format!(
                        "kernel: rank {} inside rank {}",
                        twist.kernel.rank(),
                        twist.transcendental.rank()
                    ),
                    format!("index:  {}", twist.index),
                ],
            );
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        TwistCmd::Lemma51 { samples, seed, n } => {
            let gs = sample_interpretations(torus, *seed, *samples);
            let mut ok = true;
            let mut rows = Vec::new();
            for (i, g) in gs.iter().enumerate() {
                let b = match sample_twisted_bfield(torus, g, *n, seed ^ (i as u64 + 1)) {
                    Some(b) => b,
                    None => {
                        ok = false;
                        rows.push(json!({ "sample": i as u64, "error": "no B-field" }));
                        continue;
                    }
                };
                let rep = verify_twisted_isometry(&model, g, &b, false)?;
                // Negative control: dropping the pushforward part must break
                // the checks whenever the B-field pairs nontrivially with the
                // transcendental lattice.
                let control = verify_twisted_isometry(&model, g, &b, true)?;
                let bz_invisible = bz_orthogonal_to_transcendental(&model, g)?;
                let control_broken = !control.all_pass() || control.order != rep.order;
                let sample_ok = rep.all_pass() && rep.order == *n && control_broken;
                ok &= sample_ok;
                rows.push(json!({
                    "sample": i as u64,
                    "order": rep.order,
                    "all_pass": rep.all_pass(),
                    "torus_index": rep.torus_index.to_string(),
                    "kummer_index": rep.kummer_index.to_string(),
                    "control_broken": control_broken,
                    "bz_invisible_to_transcendental": bz_invisible,
                }));
            }
            let info =
                json!({ "samples": *samples as u64, "order": *n, "results": rows, "ok": ok });
            emit(
                as_json,
                &info,
                &[format!(
                    "{} samples at order {n}: {}",
                    samples,
                    if ok { "all checks pass" } else { "FAILED" }
                )],
            );
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
    }
}

fn stab_cmd(as_json: bool, cmd: &StabCmd) -> Result<ExitCode> {
    match cmd {
        StabCmd::Charge { model, b, omega, v } => {
            let gram = read_ns_gram(model)?;
            let z = engine::charge_once(&gram, &csv_list(b), &csv_list(omega), &csv_list(v))?;
            emit(
                as_json,
                &z,
                &[format!(
                    "Z = {} + {}·i",
                    z["re"].as_str().unwrap_or("?"),
                    z["im"].as_str().unwrap_or("?")
                )],
            );
            Ok(ExitCode::SUCCESS)
        }
        StabCmd::Check {
            model,
            b,
            omega,
            r_max,
        } => {
            let gram = read_ns_gram(model)?;
            let (status, doc) =
                engine::stab_check_once(&gram, &csv_list(b), &csv_list(omega), *r_max)?;
            emit(
                as_json,
                &doc,
                &[
                    format!("status: {}", status.as_str()),
                    canonical_string(&doc["details"]),
                ],
            );
            Ok(status_code(status))
        }
        StabCmd::Walls { path, vectors } => {
            let doc = read_path_doc(path)?;
            let vs = read_vectors_doc(vectors)?;
            let (status, out) = engine::walls_once(&doc.gram, &doc.b, &doc.omega, &vs)?;
            if let Some(events) = out["details"]["events"].as_array() {
                for e in events {
                    println!("{}", canonical_string(e));
                }
            }
            let tail = json!({
                "status": out["status"],
                "count": out["details"]["count"],
                "witnesses": out["witnesses"],
            });
            println!("{}", canonical_string(&tail));
            Ok(status_code(status))
        }
        StabCmd::Lift { path } => {
            let doc = read_path_doc(path)?;
            let (status, out) =
                engine::lift_once(&doc.gram, &doc.b, &doc.omega, doc.lambda.as_deref())?;
            emit(
                as_json,
                &out,
                &[format!(
                    "winding: {}  status: {}",
                    out["details"]["winding"],
                    status.as_str()
                )],
            );
            Ok(status_code(status))
        }
    }
}

fn run_cmd(scenario: &Path, expect_digest: Option<&str>, out: Option<&Path>) -> Result<ExitCode> {
    let text = engine::read_file(scenario)?;
    let mut parsed = engine::parse_scenario(&text)?;
    if let Some(d) = expect_digest {
        match &mut parsed.model {
            Some(r) => r.expect_digest = Some(d.to_string()),
            None => bail!("--expect-digest requires the scenario to name a model file"),
        }
    }
    let outcome = engine::run_scenario(&parsed, &text)?;
    let report = canonical_string(&outcome.report.to_value());
    match out {
        Some(path) => engine::write_file(path, &(report + "\n"))?,
        None => println!("{report}"),
    }
    Ok(ExitCode::from(u8::try_from(outcome.exit_code).unwrap_or(1)))
}
