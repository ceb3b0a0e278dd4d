//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! The process exits 0 once every criterion has been evaluated, so the
//! report is always produced under `cargo test`. Set
//! `SHOCKLAB_ACCEPTANCE_STRICT=1` to exit 1 when any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shocklab::limits::*;
use shocklab::pde::study::{refinement_runs, study_from_runs};
use shocklab::pde::*;
use shocklab::profile::*;
use shocklab::verify::kv::uniform_grid;
use shocklab::verify::*;

type Outcome = (bool, String);

fn profile(kappa: f64) -> Profile {
    compute_profile(&ShockParams::from_kappa(kappa, 1.0).unwrap(), &ProfileOptions::default()).unwrap()
}

fn closed_form_table() -> Outcome {
    let s = 1.0;
    let tabulated = [(1.0 / 3.0, 1.03), (0.5, 1.0601), (2.0 / 3.0, 1.092), (0.75, 1.11), (1.0, 1.15)];
    let mut ok = true;
    let mut detail = Vec::new();
    for (a, bound) in tabulated {
        let got = s + u0_closed_bound(a, s).unwrap();
        let good = (got - bound * s).abs() <= 1e-3 * s;
        ok &= good;
        detail.push(format!("A={a:.4}: {got:.6} vs {bound}{}", if good { "" } else { " (off)" }));
    }
    let limit = s + u0_closed_bound(0.25 + 1e-12, s).unwrap();
    let good = (limit - 1.0166 * s).abs() <= 1e-3 * s;
    ok &= good;
    detail.push(format!("A->1/4: {limit:.6} vs 1.0166"));
    (ok, detail.join("; "))
}

fn structure_bounds() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for kappa in [0.30, 0.38, 0.45] {
        let p = profile(kappa);
        let r = decay_report(&p, 0.5, 1e-7).unwrap();
        let u0 = p.extrema[0].u;
        let good = u0 <= 1.0601 + 1e-6 && r.min_inc() >= 4.64 - 1e-6 && r.min_dec() >= 4.77 - 1e-6;
        ok &= good;
        detail.push(format!("kappa {kappa}: u0 {u0:.6}, min rho_inc {:.3}, min rho_dec {:.3}", r.min_inc(), r.min_dec()));
    }
    (ok, detail.join("; "))
}

fn certificate_ok(c: &InequalityCertificate) -> bool {
    c.status == CertificateStatus::Pass && c.margin >= -1e-7 * c.scale
}

fn envelope_set(p: &Profile, dense: &Profile, samples: usize) -> Vec<InequalityCertificate> {
    let half = CheckOptions::new(0.5).with_samples(samples);
    let mut certs = vec![check_rm_envelope(p, &half).unwrap()];
    for i in [1, 3, 5] {
        certs.push(check_inc_envelope(p, i, &half).unwrap().certificate);
    }
    let parabola = check_parabola_envelopes(p, &LambdaBar::default(), &half).unwrap();
    certs.extend(parabola.into_iter().filter(|c| c.index.map_or(false, |i| i <= 6)));
    // Decreasing-interval envelopes only where their hypotheses hold.
    let unit = CheckOptions::new(1.0).with_samples(samples);
    for (q, opts) in [(p, &half), (dense, &unit)] {
        for i in [2, 4] {
            let d = check_dec_envelope(q, i, 11.0 / 12.0, opts).unwrap();
            if d.hypotheses.hold() {
                certs.push(d.certificate);
            }
        }
    }
    certs
}

fn envelope_certificates() -> Outcome {
    let (p, dense) = (profile(0.45), profile(0.9));
    let coarse = envelope_set(&p, &dense, 512);
    let fine = envelope_set(&p, &dense, 1024);
    let failures: Vec<String> = coarse
        .iter()
        .chain(&fine)
        .filter(|c| !certificate_ok(c))
        .map(|c| format!("{}[{:?}]@{}", c.name, c.index, c.samples))
        .collect();
    let drift = coarse.iter().zip(&fine).map(|(c, f)| (f.margin - c.margin) / c.scale).fold(0.0, f64::min);
    let ok = coarse.len() == fine.len() && failures.is_empty() && drift >= -1e-7;
    (ok, format!("{} certificates at 512 and 1024 samples, failures {failures:?}, worst relative margin change {drift:.2e}", coarse.len()))
}

fn l2_bounds() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for kappa in [0.30, 0.38, 0.45] {
        let p = profile(kappa);
        let r = l2_interval_bounds(&p, 4.64).unwrap();
        let mut count = 0;
        for e in r.entries.iter().filter(|e| e.status != CertificateStatus::Unresolved) {
            let i = e.i.unwrap();
            let bound = match i {
                1 => 0.178,
                _ if i % 2 == 0 => 0.81 * 4.64f64.powi(-(i as i32)),
                _ => 0.82 * 4.64f64.powi(-(i as i32)),
            };
            ok &= (e.bound - bound).abs() <= 1e-15 * bound && e.value <= bound && e.error < 0.01 * bound;
            count += 1;
        }
        let tail = &r.left_tail;
        ok &= count > 0 && tail.value <= 0.001 && tail.error < 0.01 * 0.001;
        detail.push(format!("kappa {kappa}: {count} intervals, left tail {:.2e}", tail.value));
    }
    (ok, detail.join("; "))
}

fn induction_ledger_check() -> Outcome {
    let l = induction_ledger(21, 4.0 / 3.0).unwrap();
    let exact = l.a[1] == 1.0 / 30.0 && l.c[1] == 1.0 / 3.0 && l.c[0] == 13.0 / 10.0;
    let mut ok = exact;
    let mut steps = Vec::new();
    for (name, cap) in [("even_transfer", 0.63), ("odd_transfer", 0.01), ("even_poincare", 0.01), ("odd_poincare", 0.01)] {
        let rows: Vec<_> = l.coefficients.iter().filter(|c| c.name == name).collect();
        let odd: Vec<usize> = rows.iter().filter_map(|c| c.step).collect();
        ok &= odd == (1..=21).step_by(2).collect::<Vec<_>>();
        ok &= rows.iter().all(|c| c.value < cap);
        steps.push(format!("{name} max {:.3e} < {cap}", rows.iter().map(|c| c.value).fold(0.0, f64::max)));
    }
    let budget = l.budget.iter().map(|b| b.actual).fold(0.0, f64::max);
    ok &= budget < 0.9;
    (ok, format!("constants exact: {exact}; {}; max budget {budget:.4}", steps.join(", ")))
}

fn random_smooth(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let a: f64 = rng.gen_range(-5.0..5.0);
    let b = a + rng.gen_range(0.1..10.0);
    let modes = rng.gen_range(1..6);
    let c0: f64 = rng.gen_range(-2.0..2.0);
    let coeffs: Vec<(f64, f64)> = (0..modes).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let ys = uniform_grid(a, b, n);
    let w = std::f64::consts::PI / (b - a);
    let mut f = vec![c0; n];
    let mut df = vec![0.0; n];
    for (k, &y) in ys.iter().enumerate() {
        for (m, &(p, q)) in coeffs.iter().enumerate() {
            let om = w * (m + 1) as f64;
            let (sn, cs) = (om * (y - a)).sin_cos();
            f[k] += p * cs + q * sn;
            df[k] += om * (q * cs - p * sn);
        }
    }
    (ys, f, df)
}

fn kv_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = f64::INFINITY;
    for _ in 0..200 {
        let (ys, f, df) = random_smooth(&mut rng, 4001);
        let c = kv_inequality_check(&ys, &f, &df, 1e-10).unwrap();
        worst = worst.min(c.slack / c.scale);
    }
    let ys = uniform_grid(0.0, 1.0, 101);
    let linear: Vec<f64> = ys.iter().map(|y| y - 0.5).collect();
    let lin = kv_inequality_check(&ys, &linear, &vec![1.0; 101], 1e-10).unwrap();
    let ys = uniform_grid(-2.0, 5.0, 101);
    let cons = kv_inequality_check(&ys, &vec![0.3; 101], &vec![0.0; 101], 1e-10).unwrap();
    let ok = worst >= -1e-10 && lin.slack.abs() < 1e-12 && cons.slack.abs() < 1e-12;
    (ok, format!("worst relative slack {worst:.3e}; equality residuals {:.1e}, {:.1e}", lin.slack, cons.slack))
}

fn contraction() -> Outcome {
    let p = profile(0.45);
    let coarse = SimConfig { grid_size: 2048, dt: 0.04, output_every: 10, ..SimConfig::default() };
    let mut ok = true;
    let mut detail = Vec::new();
    for (label, perturbation) in [
        ("gaussian", Perturbation::Gaussian { amplitude: 0.3, width: 2.0, center: 0.0 }),
        ("shifted-profile", Perturbation::ShiftedProfile { h: 1.0 }),
    ] {
        let config = SimConfig { perturbation, ..coarse.clone() };
        let runs = refinement_runs(&p, &config, 3).unwrap();
        let study = study_from_runs(&runs);
        let default = &study.levels[1];
        let band_ok = default.grid_size == 4096 && default.max_violation <= default.tolerance_band;
        let shrink_ok = study.violations_shrink;
        let key1_ok = study.key1_orders.iter().all(|&o| o >= 1.8);
        ok &= band_ok && shrink_ok && key1_ok;
        let violations: Vec<String> = study.levels.iter().map(|l| format!("{:.2e}", l.max_violation)).collect();
        let proof: Vec<String> = study.levels.iter().map(|l| format!("{:.2e}", l.proof_max_violation)).collect();
        detail.push(format!(
            "{label}: violations N=2048/4096/8192 [{}] band {:.2e}, shrink {}, key1 orders {:?}, proof-weight violations [{}]",
            violations.join(", "),
            default.tolerance_band,
            shrink_ok,
            study.key1_orders.iter().map(|o| (o * 100.0).round() / 100.0).collect::<Vec<_>>(),
            proof.join(", ")
        ));
    }
    (ok, detail.join("; "))
}

fn scaling_invariance() -> Outcome {
    let p = profile(0.45);
    let levels = [SimConfig::default(), refined(&SimConfig::default(), 1)];
    let runs: Vec<(SimRun, SimRun)> = {
        use rayon::prelude::*;
        levels
            .par_iter()
            .map(|c| {
                let (base, half) = rayon::join(
                    || scaled_run(&p, c, 1.0, GridPolicy::Scaled).unwrap(),
                    || scaled_run(&p, c, 0.5, GridPolicy::Fixed).unwrap(),
                );
                (base, half)
            })
            .collect()
    };
    let error = run_difference(&runs[0].0, &runs[1].0).unwrap();
    let dev: Vec<ScalingDeviation> = runs.iter().map(|(b, h)| verify_scaling(h, b, 0.5).unwrap()).collect();
    let within = dev[0].max_u <= 5.0 * error.max_u && dev[0].max_shift <= 5.0 * error.max_shift;
    let shrink = dev[1].max_u * 3.0 <= dev[0].max_u && dev[1].max_shift * 3.0 <= dev[0].max_shift;
    (
        within && shrink,
        format!(
            "N=4096: dev u {:.3e} (base error {:.3e}, ratio {:.2}), dev X {:.3e} (base error {:.3e}, ratio {:.2}); refinement shrink u {:.2}x, X {:.2}x",
            dev[0].max_u,
            error.max_u,
            dev[0].max_u / error.max_u,
            dev[0].max_shift,
            error.max_shift,
            dev[0].max_shift / error.max_shift,
            dev[0].max_u / dev[1].max_u,
            dev[0].max_shift / dev[1].max_shift
        ),
    )
}

fn vanishing_limit() -> Outcome {
    let p = profile(0.45);
    let jobs = std::thread::available_parallelism().map_or(1, usize::from);
    let run = nu_sweep(&p, &LimitConfig::default(), jobs).unwrap();
    let residual = run.fit.residual.unwrap_or(f64::INFINITY);
    let excess: Vec<String> = run.runs.iter().map(|r| format!("{}: {:.4}", r.nu, r.excess_max)).collect();
    (
        !run.fit.degenerate && residual < 0.2,
        format!("excess [{}], slope {:.4}, relative residual {residual:.2e}", excess.join(", "), run.fit.slope),
    )
}

fn outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().map_or(false, |x| x == "csv" || x == "json"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let random = r#"sim.perturbation={"kind":"random-fourier","seed":0,"modes":6,"amplitude":0.2}"#;
    let commands: Vec<Vec<&str>> = vec![
        vec!["profile"],
        vec!["verify"],
        vec!["--seed", "17", "--set", random, "--set", "sim.horizon=10", "simulate"],
        vec!["--set", "limit.nu_list=[1,0.5]", "--set", "limit.horizon=1.6", "limit"],
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for args in &commands {
        let mut runs = Vec::new();
        for jobs in ["1", "4"] {
            let dir = tempfile::tempdir().unwrap();
            let status = Command::new(env!("CARGO_BIN_EXE_shocklab"))
                .env_remove("SHOCKLAB_OUT")
                .args(["--out", dir.path().to_str().unwrap(), "--jobs", jobs])
                .args(args)
                .output()
                .unwrap()
                .status;
            ok &= status.success();
            runs.push(outputs(dir.path()));
        }
        let same = runs[0] == runs[1] && !runs[0].is_empty();
        ok &= same;
        detail.push(format!("{}: {} files {}", args.last().unwrap(), runs[0].len(), if same { "identical" } else { "differ" }));
    }
    (ok, detail.join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("closed-form amplitude bounds", closed_form_table),
        ("profile structure at desk scale", structure_bounds),
        ("envelope certificates", envelope_certificates),
        ("L2 interval bounds", l2_bounds),
        ("induction ledger", induction_ledger_check),
        ("weighted Poincare property suite", kv_suite),
        ("contraction monitor", contraction),
        ("scaling invariance", scaling_invariance),
        ("vanishing viscosity-dispersion limit", vanishing_limit),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match std::panic::catch_unwind(check) {
            Ok(outcome) => outcome,
            Err(_) => (false, "evaluation panicked".to_string()),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} {:>2} {name} ({:.1} s): {detail}",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    let strict = std::env::var("SHOCKLAB_ACCEPTANCE_STRICT").map_or(false, |v| v == "1");
    if strict && failed > 0 {
        std::process::exit(1);
    }
}
