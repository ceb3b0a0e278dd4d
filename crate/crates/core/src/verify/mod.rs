//! Numerical certificates for the structural inequalities of a profile:
//! amplitude bounds, decay rates, derivative envelopes on each monotone
//! interval, L² sizes, the induction ledger and the weighted Poincaré
//! inequality.
//!
//! Certificates are floating-point checks on sampled points, not proofs.

pub mod bounds;
pub mod certificate;
pub mod envelopes;
pub mod kv;
pub mod l2;
pub mod ledger;

use rayon::prelude::*;
use serde::Serialize;

pub use bounds::{
    claimed_rates, decay_report, decay_table, decay_table_csv, derived_rho_star, derived_rho_upper, lem_rm_bootstrap,
    u0_closed_bound, BootstrapStep, DecayReport, DecayTableRow, MeasuredRow, DECAY_TABLE,
};
pub use certificate::{CertificateStatus, InequalityCertificate, DEFAULT_SAMPLES};
pub use envelopes::{
    check_dec_envelope, check_inc_envelope, check_parabola_envelopes, check_rm_envelope, check_rm_lemma, CheckOptions,
    DecCheck, IncCheck, LambdaBar,
};
pub use kv::{kv_inequality_check, KvCheck};
pub use l2::{l2_interval_bounds, L2Report};
pub use ledger::{induction_ledger, InductionLedger};

use crate::error::Result;
use crate::profile::Profile;

/// Settings for a full verification run over one profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default)]
pub struct VerifyOptions {
    pub check: CheckOptions,
    /// k for the single-term envelope on the rightmost piece.
    pub rm_k: f64,
    /// k for the decreasing-interval envelopes.
    pub dec_k: f64,
    pub lambda_bar: LambdaBar,
    pub ledger_depth: usize,
    pub shift_gain: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            check: CheckOptions::new(0.5),
            rm_k: 1.0,
            dec_k: 11.0 / 12.0,
            lambda_bar: LambdaBar::default(),
            ledger_depth: 21,
            shift_gain: 4.0 / 3.0,
        }
    }
}

/// Every certificate for one profile.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationBundle {
    pub kappa: f64,
    pub a: f64,
    pub u0_bound: f64,
    pub decay: DecayReport,
    pub certificates: Vec<InequalityCertificate>,
    pub inc_energy: Vec<(usize, envelopes::EnergyCheck)>,
    pub dec_ratio_margins: Vec<(usize, f64)>,
    pub l2: Option<L2Report>,
    pub ledger: InductionLedger,
    pub notes: Vec<String>,
}

impl VerificationBundle {
    /// No certificate failed and every applicable numeric check holds.
    pub fn pass(&self) -> bool {
        self.decay.pass
            && self.certificates.iter().all(|c| c.status != CertificateStatus::Fail)
            && self.inc_energy.iter().all(|(_, e)| e.pass)
            && self.l2.as_ref().map_or(true, L2Report::pass)
            && self.ledger.pass
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .certificates
            .iter()
            .filter(|c| c.status == CertificateStatus::Fail)
            .map(|c| format!("{}[{}] margin {:e}", c.name, c.index.map_or("-".into(), |i| i.to_string()), c.margin))
            .collect();
        if !self.decay.pass {
            out.push("decay rates".into());
        }
        if let Some(l2) = &self.l2 {
            if !l2.pass() {
                out.push("l2 bounds".into());
            }
        }
        if !self.ledger.pass {
            out.push("induction ledger".into());
        }
        out
    }
}

/// Run every applicable check on `profile`. Checks outside their regime
/// (parabola constants for κ ≥ 1/2, lemma k not admissible) are recorded as
/// notes rather than errors.
pub fn verify_profile(profile: &Profile, opts: &VerifyOptions) -> Result<VerificationBundle> {
    let check = &opts.check;
    let s = profile.s();
    let decay = decay_report(profile, check.a, check.margin_tol)?;
    let mut notes = Vec::new();
    let mut certificates = vec![check_rm_envelope(profile, check)?];
    match check_rm_lemma(profile, opts.rm_k, check) {
        Ok(c) => certificates.push(c),
        Err(e) => notes.push(format!("rm_lemma skipped: {e}")),
    }
    let n = profile.extrema.len();
    let inc: Vec<IncCheck> = (1..n).step_by(2).collect::<Vec<_>>().par_iter().map(|&i| check_inc_envelope(profile, i, check)).collect::<Result<_>>()?;
    let dec: Vec<DecCheck> = (2..n).step_by(2).collect::<Vec<_>>().par_iter().map(|&i| check_dec_envelope(profile, i, opts.dec_k, check)).collect::<Result<_>>()?;
    let inc_energy = inc.iter().filter_map(|c| c.certificate.index.map(|i| (i, c.energy))).collect();
    let dec_ratio_margins = dec.iter().filter_map(|c| c.certificate.index.map(|i| (i, c.ratio_margin))).collect();
    certificates.extend(inc.into_iter().map(|c| c.certificate));
    certificates.extend(dec.into_iter().map(|c| c.certificate));
    match check_parabola_envelopes(profile, &opts.lambda_bar, check) {
        Ok(v) => certificates.extend(v),
        Err(e) => notes.push(format!("parabola envelopes skipped: {e}")),
    }
    let l2 = if profile.params.kappa >= 0.5 {
        notes.push(format!("l2 bounds skipped: constants are only available for kappa < 1/2, got {}", profile.params.kappa));
        None
    } else if profile.markers.xi_s.is_some() {
        Some(l2_interval_bounds(profile, opts.lambda_bar.rho)?)
    } else {
        notes.push("l2 bounds skipped: no crossing of s".into());
        None
    };
    let ledger = ledger::induction_ledger_with(opts.ledger_depth, opts.shift_gain, &opts.lambda_bar, claimed_rates(check.a)?.2)?;
    Ok(VerificationBundle {
        kappa: profile.params.kappa,
        a: check.a,
        u0_bound: u0_closed_bound(check.a, s)?,
        decay,
        certificates,
        inc_energy,
        dec_ratio_margins,
        l2,
        ledger,
        notes,
    })
}
