//! End-to-end acceptance gate: one test and one printed PASS line per
//! criterion, with every tolerance and time budget pinned in code.

use std::process::Command;
use std::time::{Duration, Instant};

use num_traits::{Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kummerlat_core::enumerate::{box_search, short_vectors, EnumerationRequest, NormMode};
use kummerlat_core::exact::{Int, Rat};
use kummerlat_core::kummer::{
    algebraic_and_transcendental, build_glue_map, build_mukai_model, exceptional_blind_plane,
    induced_four_plane, roots_in_complement, sample_interpretations, sample_twisted_bfield,
    twisted_kernel, verify_twisted_isometry,
};
use kummerlat_core::lattice::IntegerLattice;
use kummerlat_core::mat::IMat;
use kummerlat_core::stab::{
    apply_lambda, induced_stability, sufficiency_check, ChamberPoint, LiftedPoint, MukaiVector,
    PathInChamber, StabVector, StabilityModel, SufficiencyOutcome,
};

fn report(number: u32, label: &str, started: Instant) {
    println!(
        "criterion {number:02} [{label}] ... PASS ({:.2}s)",
        started.elapsed().as_secs_f64()
    );
}

fn imat(rows: &[&[i64]]) -> IMat {
    IMat::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&x| Int::from(x)).collect())
            .collect(),
    )
}

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

#[test]
fn criterion_01_model_construction() {
    let started = Instant::now();
    let model = build_mukai_model().expect("model construction");
    let lattice = model.lattice();
    assert!(lattice.is_even(), "ambient lattice must be even");
    assert_eq!(lattice.determinant().abs(), Int::from(1));
    assert_eq!(lattice.signature().unwrap(), (4, 20));
    assert!(
        started.elapsed() < Duration::from_secs(5),
        "construction exceeded the 5s budget: {:?}",
        started.elapsed()
    );
    report(1, "rank-24 model: even, |det|=1, signature (4,20)", started);
}

#[test]
fn criterion_02_discriminant_glue() {
    let started = Instant::now();
    let model = build_mukai_model().unwrap();
    let data = build_glue_map(model.torus()).expect("glue data");
    assert_eq!(data.k_disc.group_order(), Int::from(64));
    assert_eq!(data.pi_disc.group_order(), Int::from(64));
    // The anti-isometry q_K = −q_Π∘γ, checked generator by generator mod 2.
    let two = rat(2, 1);
    for i in 0..data.k_disc.num_generators() {
        let mut e = vec![Int::from(0); data.k_disc.num_generators()];
        e[i] = Int::from(1);
        let sum = data.k_disc.q_of_class(&e) + data.pi_disc.q_of_class(&data.gamma.apply(&e));
        assert!(
            kummerlat_core::exact::rat_mod(&sum, &two) == rat(0, 1),
            "generator {i}: q-values do not cancel"
        );
    }
    let glued = data.glue().expect("glued overlattice");
    assert!(glued.lattice.is_even_unimodular());
    assert_eq!(glued.lattice.signature().unwrap(), (3, 19));
    assert!(
        started.elapsed() < Duration::from_secs(5),
        "glue exceeded the 5s budget: {:?}",
        started.elapsed()
    );
    report(2, "discriminants 64/64 anti-match; glued (3,19)", started);
}

#[test]
fn criterion_03_named_classes() {
    let started = Instant::now();
    let model = build_mukai_model().unwrap();
    // The two pushforward generators carry the Gram block [[0,2],[2,0]].
    let unit = |k: usize| {
        let mut v = vec![rat(0, 1); 24];
        v[k] = rat(1, 1);
        v
    };
    let p0 = unit(0);
    let p4 = unit(7);
    assert_eq!(model.pair_ambient(&p0, &p0), rat(0, 1));
    assert_eq!(model.pair_ambient(&p0, &p4), rat(2, 1));
    assert_eq!(model.pair_ambient(&p4, &p4), rat(0, 1));
    // The named classes refine it to a unimodular hyperbolic plane.
    let u = model.u_hat().coords();
    let u0 = model.u0_hat().coords();
    assert_eq!(model.pair_ambient(u, u), rat(0, 1));
    assert_eq!(model.pair_ambient(u, u0), rat(1, 1));
    assert_eq!(model.pair_ambient(u0, u0), rat(0, 1));
    for (i, ei) in model.e_hats().iter().enumerate() {
        for (j, ej) in model.e_hats().iter().enumerate() {
            let expected = if i == j { rat(-2, 1) } else { rat(0, 1) };
            assert_eq!(model.pair_ambient(ei.coords(), ej.coords()), expected);
        }
        assert_eq!(model.pair_ambient(ei.coords(), u), rat(0, 1));
        assert_eq!(model.pair_ambient(ei.coords(), u0), rat(0, 1));
    }
    report(
        3,
        "hyperbolic pair [[0,2],[2,0]]; 16 classes at -2",
        started,
    );
}

#[test]
fn criterion_04_rootfree_samples() {
    let started = Instant::now();
    const SAMPLES: usize = 25;
    const SEED: u64 = 7;
    let model = build_mukai_model().unwrap();
    let gs = sample_interpretations(model.torus(), SEED, SAMPLES);
    assert_eq!(gs.len(), SAMPLES);
    for g in &gs {
        let plane = induced_four_plane(&model, g).expect("induced plane");
        let scan = roots_in_complement(&model, &plane).expect("complement scan");
        assert_eq!(scan.report.complement_rank, 20);
        assert_eq!(scan.report.complement_signature, (0, 20));
        assert!(
            scan.report.roots.is_empty(),
            "unexpected root {:?}",
            scan.report.roots.first()
        );
    }
    // Positive control: forgetting the exceptional directions must expose
    // their roots.
    let blind = exceptional_blind_plane(&model, &gs[0]).unwrap();
    let control = roots_in_complement(&model, &blind).unwrap();
    assert!(
        !control.report.roots.is_empty(),
        "control scan found no roots"
    );
    assert!(
        started.elapsed() < Duration::from_secs(600),
        "root-free suite exceeded the 10min budget: {:?}",
        started.elapsed()
    );
    report(4, "25 samples root-free; control sees roots", started);
}

#[test]
fn criterion_05_sufficiency_trichotomy() {
    let started = Instant::now();
    const R_MAX: u32 = 8;
    // ω² = 4: the large-volume criterion applies directly.
    let m4 = StabilityModel::new("vol4", imat(&[&[4]]), vec![rat(1, 1)]).unwrap();
    let p4 = ChamberPoint::new(&m4, vec![rat(0, 1)], vec![rat(1, 1)]).unwrap();
    assert_eq!(
        sufficiency_check(&m4, &p4, R_MAX).unwrap(),
        SufficiencyOutcome::HoldsByOmegaSq
    );
    // ω² = 2 at B = 0: the class (1,0,1) has charge exactly zero.
    let m2 = StabilityModel::new("vol2", imat(&[&[2]]), vec![rat(1, 1)]).unwrap();
    let p2 = ChamberPoint::new(&m2, vec![rat(0, 1)], vec![rat(1, 1)]).unwrap();
    match sufficiency_check(&m2, &p2, R_MAX).unwrap() {
        SufficiencyOutcome::Violated { delta, charge } => {
            assert_eq!(delta, MukaiVector::from_i64(1, &[0], 1));
            assert_eq!(charge, (rat(0, 1), rat(0, 1)));
        }
        other => panic!("expected a violation at omega^2 = 2, got {other:?}"),
    }
    // ω² = 3/2 at B = 0: same class, charge −1/4 on the negative real axis.
    let m32 = StabilityModel::new("vol3_2", imat(&[&[6]]), vec![rat(1, 2)]).unwrap();
    let p32 = ChamberPoint::new(&m32, vec![rat(0, 1)], vec![rat(1, 2)]).unwrap();
    match sufficiency_check(&m32, &p32, R_MAX).unwrap() {
        SufficiencyOutcome::Violated { delta, charge } => {
            assert_eq!(delta, MukaiVector::from_i64(1, &[0], 1));
            assert_eq!(charge, (rat(-1, 4), rat(0, 1)));
        }
        other => panic!("expected a violation at omega^2 = 3/2, got {other:?}"),
    }
    report(5, "holds at 4; fails at 2 (Z=0) and 3/2 (Z=-1/4)", started);
}

#[test]
fn criterion_06_boundary_probe() {
    let started = Instant::now();
    let model = build_mukai_model().unwrap();
    let g = sample_interpretations(model.torus(), 0xBEEF, 1)
        .pop()
        .unwrap();
    let induced = induced_stability(&model, &g).expect("induced frame");
    let k = Int::from(1);
    // All sixteen wall functions vanish at the induced point.
    let probe = induced.probe_exceptional(&k, None).unwrap();
    assert_eq!(probe.entries.len(), 16);
    assert!(probe.all_alignments_zero());
    // Perturbing ω along the i-th dual direction breaks wall i and only
    // wall i; shrink the step until the perturbed class stays a Kähler one.
    let target = 3usize;
    let mut eps = rat(1, 64);
    let perturbed = loop {
        match induced.probe_exceptional(&k, Some((target, &eps))) {
            Ok(p) => break p,
            Err(_) => eps = eps / rat(2, 1),
        }
    };
    for entry in &perturbed.entries {
        if entry.index == target {
            assert!(!entry.alignment.is_zero(), "targeted wall did not move");
        } else {
            assert!(
                entry.alignment.is_zero(),
                "wall {} moved unexpectedly",
                entry.index
            );
        }
    }
    report(
        6,
        "16 alignments vanish; dual step breaks exactly one",
        started,
    );
}

#[test]
fn criterion_07_twisted_kernels() {
    let started = Instant::now();
    let model = build_mukai_model().unwrap();
    let torus = model.torus();
    // Exact order-n characters give index-n kernels for n = 2, 3, 4.
    for n in [2u32, 3, 4] {
        let g = sample_interpretations(torus, 100 + n as u64, 1)
            .pop()
            .unwrap();
        let b = sample_twisted_bfield(torus, &g, n, 200 + n as u64)
            .unwrap_or_else(|| panic!("no exact order-{n} B-field sampled"));
        let (_, t_a) = algebraic_and_transcendental(
            torus.h2_lattice(),
            g.omega1().coords(),
            g.omega2().coords(),
        )
        .unwrap();
        let twist = twisted_kernel(&t_a, b.coords(), n).unwrap();
        assert_eq!(twist.order, n);
        assert_eq!(
            twist.index,
            Int::from(n as i64),
            "kernel index at order {n}"
        );
    }
    // Rank-doubling isometry over five samples, with the dropped-pushforward
    // field as a negative control that must fail.
    const SAMPLES: usize = 5;
    let gs = sample_interpretations(torus, 4242, SAMPLES);
    for (i, g) in gs.iter().enumerate() {
        let b = sample_twisted_bfield(torus, g, 2, 9000 + i as u64)
            .expect("order-2 B-field for the isometry check");
        let rep = verify_twisted_isometry(&model, g, &b, false).unwrap();
        assert!(rep.all_pass(), "sample {i}: isometry checks failed");
        assert_eq!(rep.order, 2);
        let control = verify_twisted_isometry(&model, g, &b, true).unwrap();
        assert!(
            !control.all_pass() || control.order != rep.order,
            "sample {i}: negative control failed to fail"
        );
    }
    report(
        7,
        "kernel index = n for n=2,3,4; isometry on 5 samples",
        started,
    );
}

#[test]
fn criterion_08_winding_arithmetic() {
    let started = Instant::now();
    let model = StabilityModel::new(
        "loop",
        imat(&[&[2, 0], &[0, -2]]),
        vec![rat(1, 1), rat(0, 1)],
    )
    .unwrap();
    let point =
        || ChamberPoint::new(&model, vec![rat(0, 1); 2], vec![rat(1, 1), rat(0, 1)]).unwrap();
    let loop_path = |turns: i64| {
        let n = turns.unsigned_abs() as usize + 1;
        let lambda: Vec<Rat> = (0..n as i64)
            .map(|i| rat(2 * i * turns.signum(), 1))
            .collect();
        PathInChamber::new(&model, (0..n).map(|_| point()).collect(), Some(lambda)).unwrap()
    };
    // One full turn lifts to winding 1; concatenating k turns gives k.
    for turns in [1i64, 2, 3, -1, -2] {
        let (winding, _) =
            kummerlat_core::stab::lift_path_winding(&model, &loop_path(turns)).unwrap();
        assert_eq!(
            winding,
            Int::from(turns),
            "net winding after {turns} turn(s)"
        );
    }
    // The λ-action composes exactly: 100 seeded rational pairs.
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let base = StabVector::new(
        vec![rat(1, 1), rat(0, 1), rat(0, 1)],
        vec![rat(0, 1), rat(1, 1), rat(0, 1)],
    )
    .unwrap();
    for _ in 0..100 {
        let l1 = rat(rng.gen_range(-24..=24), rng.gen_range(1..=8));
        let l2 = rat(rng.gen_range(-24..=24), rng.gen_range(1..=8));
        let start = LiftedPoint::new(base.clone());
        let chained = apply_lambda(&apply_lambda(&start, &l1), &l2);
        let direct = apply_lambda(&start, &(&l1 + &l2));
        assert_eq!(chained.phase, direct.phase);
        assert_eq!(chained.winding, direct.winding);
        assert_eq!(chained.base.re, direct.base.re);
        assert_eq!(chained.base.im, direct.base.im);
    }
    report(8, "loop winding 1; additive; composition law x100", started);
}

#[test]
fn criterion_09_enumeration_oracle() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for case in 0..50 {
        let n = rng.gen_range(1..=4usize);
        // A·Aᵀ + I is positive definite; negate half the time to cover the
        // negative-definite normalization.
        let a: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(-2..=2)).collect())
            .collect();
        let negate = rng.gen_bool(0.5);
        let mut rows = vec![vec![Int::from(0); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0i64;
                for k in 0..n {
                    s += a[i][k] * a[j][k];
                }
                if i == j {
                    s += 1;
                }
                rows[i][j] = Int::from(if negate { -s } else { s });
            }
        }
        let lattice = IntegerLattice::new(None, IMat::from_rows(rows)).unwrap();
        let req = EnumerationRequest {
            lattice,
            norm_target: Int::from(rng.gen_range(1..=8i64)),
            mode: if rng.gen_bool(0.5) {
                NormMode::ExactNorm
            } else {
                NormMode::UpToNorm
            },
            cap: None,
        };
        let fast = short_vectors(&req).unwrap();
        let naive = box_search(&req).unwrap();
        assert_eq!(fast, naive, "case {case}: enumeration mismatch");
    }
    report(9, "enumeration equals box search on 50 lattices", started);
}

#[test]
fn criterion_10_deterministic_reports() {
    let started = Instant::now();
    let text = r#"{
        "seed": 31337,
        "sample_count": 2,
        "tasks": [
            {"kind": "build"},
            {"kind": "rootfree", "samples": 2},
            {"kind": "twisted", "order": 2, "samples": 1},
            {"kind": "lift", "gram": [[2,0],[0,-2]],
             "b": [["0","0"],["0","0"]],
             "omega": [["1","0"],["1","0"]],
             "lambda": ["0","2"], "expect_winding": 1}
        ]
    }"#;
    // Library level: identical scenario text gives byte-identical bodies.
    let scenario = kummerlat_cli::parse_scenario(text).unwrap();
    let first = kummerlat_cli::run_scenario(&scenario, text).unwrap();
    let second = kummerlat_cli::run_scenario(&scenario, text).unwrap();
    assert_eq!(first.exit_code, 0);
    assert_eq!(first.report.body_string(), second.report.body_string());

    // Binary level: two invocations agree byte for byte outside timings.
    let dir = tempfile::tempdir().unwrap();
    let scenario_path = dir.path().join("scenario.json");
    std::fs::write(&scenario_path, text).unwrap();
    let run = |out: &std::path::Path| {
        let status = Command::new(env!("CARGO_BIN_EXE_kummerlat"))
            .arg("run")
            .arg(&scenario_path)
            .arg("--out")
            .arg(out)
            .status()
            .expect("binary runs");
        assert!(status.success(), "scenario run failed: {status:?}");
        let value: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
        (
            kummerlat_core::serialize::canonical_string(&value["body"]),
            value["timings"].clone(),
        )
    };
    let (body_a, timings_a) = run(&dir.path().join("a.json"));
    let (body_b, _) = run(&dir.path().join("b.json"));
    assert_eq!(body_a, body_b, "report bodies differ between runs");
    assert!(
        timings_a.get("total_ms").is_some(),
        "timings must be reported"
    );
    report(
        10,
        "identical scenario+seed, byte-identical bodies",
        started,
    );
}
