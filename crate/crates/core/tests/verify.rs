use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shocklab::profile::*;
use shocklab::verify::envelopes::rm_constants;
use shocklab::verify::kv::uniform_grid;
use shocklab::verify::*;

fn profile(kappa: f64) -> Profile {
    compute_profile(&ShockParams::from_kappa(kappa, 1.0).unwrap(), &ProfileOptions::default()).unwrap()
}

fn half() -> CheckOptions {
    CheckOptions::new(0.5)
}

#[test]
fn closed_bound_matches_direct_evaluation() {
    // Frozen from an independent evaluation of the closed form in double precision.
    let direct = [0.029678686872638596, 0.060037739341463316, 0.09153419913597298, 0.10685718174570932, 0.14976731638312987];
    for (row, d) in DECAY_TABLE.iter().zip(direct) {
        let b = u0_closed_bound(row.a, 1.0).unwrap();
        assert!((b - d).abs() < 1e-15, "A={}: {b}", row.a);
        // Tabulated values are rounded-up upper bounds.
        assert!(b <= row.alpha0, "A={}", row.a);
    }
    let near = u0_closed_bound(0.25 + 1e-12, 1.0).unwrap();
    assert!((near - 0.01666434268298169).abs() < 1e-12);
}

#[test]
fn structure_at_desk_scale() {
    for kappa in [0.30, 0.38, 0.45] {
        let p = profile(kappa);
        let r = decay_report(&p, 0.5, 1e-7).unwrap();
        assert!(p.extrema[0].u <= 1.0601 + 1e-6);
        assert!(r.min_inc() >= 4.64 - 1e-6, "kappa {kappa}: {:?}", r.ratios_inc);
        assert!(r.min_dec() >= 4.77 - 1e-6, "kappa {kappa}: {:?}", r.ratios_dec);
        assert!(r.pass);
        assert!(r.u0_excess <= u0_closed_bound(0.5, 1.0).unwrap());
    }
}

#[test]
fn measured_rates_dominate_every_tabulated_ceiling() {
    let rows = decay_table(3, &ProfileOptions::default()).unwrap();
    for row in &rows {
        assert!(row.rho_star_measured_min >= row.rho_star_claimed, "{row:?}");
        assert!(row.rho_upper_measured_min >= row.rho_upper_claimed, "{row:?}");
        for &kappa in &row.kappas {
            let p = profile(kappa);
            assert!(p.extrema[0].u - 1.0 <= u0_closed_bound(row.a, 1.0).unwrap() + 1e-7);
        }
    }
    assert!(decay_table_csv(&rows).lines().count() == 6);
}

#[test]
fn rm_envelope_holds_with_interior_room() {
    let p = profile(0.45);
    let c = check_rm_envelope(&p, &half()).unwrap();
    assert_eq!(c.status, CertificateStatus::Pass);
    assert!(c.ratio_min > 1.0, "{c:?}");
    assert!(c.samples >= 512);
    // Both sides vanish at ξ₀.
    let u0 = p.extrema[0].u;
    let (lambda, mu) = rm_constants(0.5, 1.0, u0);
    let rhs = lambda * (u0 - u0).sqrt() * (u0 + 1.0) + mu * (u0 - u0) * (u0 + 1.0);
    assert_eq!(rhs, 0.0);
    assert!(p.du_at(p.extrema[0].xi).abs() < 1e-12);
    // And as ũ → −s.
    let far = p.xi_right_far();
    assert!((p.u_at(far) + 1.0).abs() < 1e-25);
    assert!(p.du_at(far).abs() < 1e-25);
    let lemma = check_rm_lemma(&p, 1.0, &half()).unwrap();
    assert_eq!(lemma.status, CertificateStatus::Pass);
    assert!(check_rm_lemma(&p, 1.5, &half()).is_err());
}

#[test]
fn rm_envelope_preconditions() {
    // A first maximum that large makes μ ≤ 0 at A = 1.
    let (_, mu) = rm_constants(1.0, 1.0, 1.4);
    assert!(mu < 0.0);
    let p = profile(10.0);
    let err = check_rm_envelope(&p, &CheckOptions::new(1.0)).unwrap_err();
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn inc_envelopes_and_energy() {
    let p = profile(0.45);
    for i in [1, 3, 5] {
        let c = check_inc_envelope(&p, i, &half()).unwrap();
        assert_eq!(c.certificate.status, CertificateStatus::Pass, "{:?}", c.certificate);
        assert!(c.energy.pass, "{:?}", c.energy);
        assert!(c.energy.integral > c.energy.bound);
    }
    assert!(check_inc_envelope(&p, 2, &half()).is_err());
}

#[test]
fn dec_envelopes_with_hypotheses() {
    let p = profile(0.9);
    let opts = CheckOptions::new(1.0);
    for i in [2, 4] {
        let c = check_dec_envelope(&p, i, 11.0 / 12.0, &opts).unwrap();
        assert!(c.hypotheses.hold(), "{:?}", c.hypotheses);
        assert!(c.hypotheses.rho >= 3.0);
        assert_eq!(c.certificate.status, CertificateStatus::Pass);
        assert!(c.certificate.ratio_min > 1.0);
        assert!(c.ratio_margin > 0.0);
    }
    // Fast decay violates ρ < 10: not applicable, though the margin holds.
    let q = profile(0.45);
    let c = check_dec_envelope(&q, 2, 11.0 / 12.0, &half()).unwrap();
    assert!(!c.hypotheses.rho_below_ten);
    assert_eq!(c.certificate.status, CertificateStatus::NotApplicable);
    assert!(c.certificate.pass);
}

#[test]
fn parabola_envelopes_through_six() {
    let p = profile(0.45);
    let certs = check_parabola_envelopes(&p, &LambdaBar::default(), &half()).unwrap();
    assert!(certs.len() >= 7);
    for c in certs.iter().take(7) {
        assert_eq!(c.status, CertificateStatus::Pass, "{c:?}");
        assert!(c.constants_used.contains_key("lambda_bar"));
    }
    assert!(check_parabola_envelopes(&profile(0.6), &LambdaBar::default(), &CheckOptions::new(1.0)).is_err());
}

#[test]
fn certificates_stable_under_sample_doubling() {
    let p = profile(0.45);
    let coarse = verify_profile(&p, &VerifyOptions::default()).unwrap();
    let mut fine_opts = VerifyOptions::default();
    fine_opts.check = fine_opts.check.with_samples(1024);
    let fine = verify_profile(&p, &fine_opts).unwrap();
    for (c, f) in coarse.certificates.iter().zip(&fine.certificates) {
        assert_eq!(c.name, f.name);
        if c.pass {
            assert!(f.margin >= -1e-7 * f.scale, "{} {:?}", f.name, f.index);
        }
        assert!(f.samples == 1024);
    }
}

#[test]
fn unresolved_intervals_never_pass() {
    let opts = ProfileOptions { cutoff: 1e-6, ..ProfileOptions::default() };
    let p = compute_profile(&ShockParams::from_kappa(0.45, 1.0).unwrap(), &opts).unwrap();
    let certs = check_parabola_envelopes(&p, &LambdaBar::default(), &half()).unwrap();
    for c in certs {
        let i = c.index.unwrap();
        if i >= p.resolved {
            assert_eq!(c.status, CertificateStatus::Unresolved);
        }
    }
}

#[test]
fn l2_bounds_hold() {
    let p = profile(0.45);
    let r = l2_interval_bounds(&p, 4.64).unwrap();
    assert!(r.pass());
    let e1 = r.entries.iter().find(|e| e.i == Some(1)).unwrap();
    assert!(e1.value <= 0.178);
    let e2 = r.entries.iter().find(|e| e.i == Some(2)).unwrap();
    assert!(e2.value <= 0.81 / 4.64f64.powi(2));
    for e in r.entries.iter().chain(std::iter::once(&r.left_tail)) {
        assert!(e.error < 0.01 * e.bound);
    }
    assert!(r.left_tail.value <= 0.001);
}

#[test]
fn ledger_reproduces_constants() {
    let l = induction_ledger(21, 4.0 / 3.0).unwrap();
    assert_eq!(l.a[1], 1.0 / 30.0);
    assert_eq!(l.c[0], 13.0 / 10.0);
    assert_eq!(l.c[1], 1.0 / 3.0);
    assert!((l.c[2] - 16.533333333333333).abs() < 1e-12);
    let first = l.coefficients.iter().find(|c| c.name == "even_transfer" && c.step == Some(1)).unwrap();
    assert!((first.value - 0.81 * 4.64f64.powi(-2) * l.c[2]).abs() < 1e-15);
    assert!(l.pass);
    assert!(l.budget.iter().all(|b| b.actual < 0.9));
    let odd_steps: Vec<usize> = l.coefficients.iter().filter_map(|c| c.step).collect();
    assert_eq!(*odd_steps.iter().max().unwrap(), 21);
}

fn random_fourier(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
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

#[test]
fn kv_property_random_fourier() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let (ys, f, df) = random_fourier(&mut rng, 4001);
        let c = kv_inequality_check(&ys, &f, &df, 1e-10).unwrap();
        assert!(c.pass, "{c:?}");
    }
}

#[test]
fn kv_equality_cases() {
    let ys = uniform_grid(0.0, 1.0, 101);
    let f: Vec<f64> = ys.iter().map(|y| y - 0.5).collect();
    let c = kv_inequality_check(&ys, &f, &vec![1.0; 101], 1e-10).unwrap();
    assert!((c.lhs - c.rhs).abs() < 1e-12);
    let ys = uniform_grid(-2.0, 5.0, 101);
    let c = kv_inequality_check(&ys, &vec![0.3; 101], &vec![0.0; 101], 1e-10).unwrap();
    assert!((c.lhs - 0.09 * 7.0).abs() < 1e-12 && c.slack.abs() < 1e-12);
}

#[test]
fn margins_invariant_under_normalization() {
    // Physical (ε=2, δ=1.8, u₋=3, u₊=1) normalizes to δ=0.45, s=1.
    let (norm, map) = normalize(2.0, 1.8, 3.0, 1.0).unwrap();
    assert!(!map.reflected);
    let a = compute_profile(&norm, &ProfileOptions::default()).unwrap();
    let b = profile(0.45);
    let ca = check_parabola_envelopes(&a, &LambdaBar::default(), &half()).unwrap();
    let cb = check_parabola_envelopes(&b, &LambdaBar::default(), &half()).unwrap();
    for (x, y) in ca.iter().zip(&cb) {
        assert!((x.margin - y.margin).abs() <= 1e-12 * x.scale, "{} vs {}", x.margin, y.margin);
    }
}

#[test]
fn bundle_serializes() {
    let p = profile(0.38);
    let b = verify_profile(&p, &VerifyOptions::default()).unwrap();
    assert!(b.pass(), "{:?}", b.failures());
    let json = serde_json::to_string(&b).unwrap();
    assert!(json.contains("\"constants_used\"") && json.contains("\"argmin\""));
}
