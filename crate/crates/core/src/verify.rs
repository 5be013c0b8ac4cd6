//! Invariant sweep over a range of clone counts.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cloning::BlochQubit;
use crate::error::{Error, Result};
use crate::linalg::ComplexVector;
use crate::mps::{decompose, to_isometries, DECOMPOSE_TOL};
use crate::protocol::{
    clone, extract_final_ancilla, flipped_isometries, run_chain, run_chain_trace, table1_isometries, thresholds,
    BranchPolicy, Check, IsometryStep, Mode, ProtocolConfig, Relation,
};
use crate::qstate::{overlap, schmidt_rank, PureState};
use crate::MAX_CLONES;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeSelection {
    Both,
    Universal,
    PhaseCovariant,
}

impl ModeSelection {
    fn modes(self) -> &'static [Mode] {
        match self {
            ModeSelection::Both => &[Mode::Universal, Mode::PhaseCovariant],
            ModeSelection::Universal => &[Mode::Universal],
            ModeSelection::PhaseCovariant => &[Mode::PhaseCovariant],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub m_min: usize,
    pub m_max: usize,
    pub modes: ModeSelection,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { m_min: 2, m_max: 6, modes: ModeSelection::Both, samples: 10, seed: 42, tol: crate::DEFAULT_TOL }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyEntry {
    pub mode: Mode,
    pub m: usize,
    pub d_single: usize,
    pub d_total: usize,
    pub chi_observed: usize,
    pub samples: usize,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub config: VerifyConfig,
    pub entries: Vec<VerifyEntry>,
    pub total_checks: usize,
    pub failed_checks: usize,
    pub all_passed: bool,
}

fn emitted(steps: &[IsometryStep], tol: f64) -> Result<PureState> {
    let joint = run_chain(steps, &ComplexVector::basis(steps[0].d(), 0))?;
    Ok(extract_final_ancilla(&joint, tol)?.1)
}

fn gap(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(1.0 - overlap(a, b)?.norm())
}

fn derived_seed(seed: u64, mode: Mode, m: usize) -> u64 {
    let tag = match mode {
        Mode::Universal => 0x5555_0000u64,
        Mode::PhaseCovariant => 0xAAAA_0000u64,
    };
    seed ^ tag.wrapping_add(m as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Keeps the worst value seen for each named check.
fn merge_worst(acc: &mut Vec<Check>, new: Vec<Check>) {
    for c in new {
        match acc.iter_mut().find(|a| a.name == c.name) {
            None => acc.push(c),
            Some(a) => {
                let worse = match c.relation {
                    Relation::AtMost => c.value > a.value,
                    Relation::AtLeast => c.value < a.value,
                    Relation::Equal => !c.passed,
                };
                if worse || !c.passed {
                    *a = c;
                }
            }
        }
    }
}

fn verify_one(mode: Mode, m: usize, cfg: &VerifyConfig) -> Result<VerifyEntry> {
    let tol = cfg.tol;
    let pc = ProtocolConfig { mode, m, branch_policy: BranchPolicy::Random, rng_seed: cfg.seed, tol };
    let coeffs = pc.coefficients()?;
    let d = coeffs.m_eff();
    let (target0, target1) = pc.branch_targets()?;
    let mut checks = vec![Check::at_most("coefficient_norm_error", (coeffs.sum_of_squares() - 1.0).abs(), 1e-12)];

    let steps0 = table1_isometries(&coeffs)?;
    let steps1 = flipped_isometries(&steps0);
    checks.push(Check::equal("table_step_count", steps0.len(), 2 * d - 1));
    let defect = steps0.iter().map(IsometryStep::defect).fold(0.0, f64::max);
    checks.push(Check::at_most("table_max_isometry_defect", defect, thresholds::ISOMETRY));
    let out0 = emitted(&steps0, tol)?;
    checks.push(Check::at_most("table_vs_direct_gap_branch0", gap(&out0, &target0)?, thresholds::OUTPUT_OVERLAP));
    checks.push(Check::at_most(
        "table_vs_direct_gap_branch1",
        gap(&emitted(&steps1, tol)?, &target1)?,
        thresholds::OUTPUT_OVERLAP,
    ));

    let form = decompose(&target0, DECOMPOSE_TOL)?;
    checks.push(Check::equal("mps_chi", form.chi, d));
    let (mps_steps, _) = to_isometries(&form, d)?;
    let mps_defect = mps_steps.iter().map(IsometryStep::defect).fold(0.0, f64::max);
    checks.push(Check::at_most("mps_max_isometry_defect", mps_defect, thresholds::ISOMETRY));
    checks.push(Check::at_most(
        "table_vs_mps_gap",
        gap(&out0, &emitted(&mps_steps, tol)?)?,
        thresholds::OUTPUT_OVERLAP,
    ));
    if d >= 2 {
        let rejected = matches!(to_isometries(&form, d - 1), Err(Error::AncillaTooSmall { .. }));
        checks.push(Check::equal("undersized_ancilla_rejected", usize::from(rejected), 1));
    }

    let n = target0.n_qubits();
    let mut chi = 1;
    if n >= 2 {
        let ranks = (1..n).map(|cut| schmidt_rank(&target0, cut, tol)).collect::<Result<Vec<_>>>()?;
        chi = ranks.iter().copied().max().unwrap_or(1);
        checks.push(Check::at_most("max_schmidt_rank_minus_d", chi as f64 - d as f64, 0.0));
        checks.push(Check::equal("schmidt_rank_at_cut_d", ranks[d - 1], d));
    }
    checks.push(Check::equal("chi_observed", chi, d));

    let trace = run_chain_trace(&steps0, &ComplexVector::basis(d, 0))?;
    let last = trace.last().expect("non-empty chain");
    checks.push(Check::at_most("final_ancilla_purity_gap", 1.0 - last.ancilla_purity(), thresholds::FINAL_PURITY));
    if d >= 2 {
        checks.push(Check::at_most(
            "mid_chain_ancilla_purity",
            trace[d - 1].ancilla_purity(),
            1.0 - thresholds::MID_PURITY_GAP,
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(derived_seed(cfg.seed, mode, m));
    let mut sample_checks = Vec::new();
    let mut d_total = 2 * d;
    for _ in 0..cfg.samples {
        let phi = rng.gen_range(0.0..2.0 * PI);
        let q = match mode {
            Mode::Universal => BlochQubit::new(rng.gen::<f64>().mul_add(2.0, -1.0).acos(), phi)?,
            Mode::PhaseCovariant => BlochQubit::equatorial(phi)?,
        };
        let run_cfg = ProtocolConfig { rng_seed: rng.gen(), ..pc.clone() };
        let report = clone(&run_cfg, &q)?;
        d_total = report.d_total;
        merge_worst(&mut sample_checks, report.checks);
    }
    for c in &mut sample_checks {
        c.name = format!("sampled_{}", c.name);
    }
    checks.extend(sample_checks);

    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyEntry { mode, m, d_single: d, d_total, chi_observed: chi, samples: cfg.samples, checks, passed })
}

/// Runs every invariant for each selected mode and clone count in
/// `m_min..=m_max` (even counts are skipped for phase-covariant cloning).
pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifySummary> {
    if cfg.m_max > MAX_CLONES {
        return Err(Error::TooManyClones { m: cfg.m_max, cap: MAX_CLONES });
    }
    if cfg.m_min < 1 || cfg.m_min > cfg.m_max {
        return Err(Error::InvalidArgument(format!("empty clone range {}..={}", cfg.m_min, cfg.m_max)));
    }
    if !(cfg.tol > 0.0 && cfg.tol < 1.0) {
        return Err(Error::InvalidArgument(format!("tolerance {} outside (0, 1)", cfg.tol)));
    }
    let jobs: Vec<(Mode, usize)> = cfg
        .modes
        .modes()
        .iter()
        .flat_map(|&mode| (cfg.m_min..=cfg.m_max).map(move |m| (mode, m)))
        .filter(|&(mode, m)| mode == Mode::Universal || m % 2 == 1)
        .collect();
    let results: Vec<Result<VerifyEntry>> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs.iter().map(|&(mode, m)| s.spawn(move || verify_one(mode, m, cfg))).collect();
        handles.into_iter().map(|h| h.join().expect("verify worker panicked")).collect()
    });
    let entries = results.into_iter().collect::<Result<Vec<_>>>()?;
    let total_checks = entries.iter().map(|e| e.checks.len()).sum();
    let failed_checks = entries.iter().flat_map(|e| &e.checks).filter(|c| !c.passed).count();
    Ok(VerifySummary { config: cfg.clone(), entries, total_checks, failed_checks, all_passed: failed_checks == 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweep_passes() {
        let cfg = VerifyConfig { m_min: 1, m_max: 3, samples: 2, ..VerifyConfig::default() };
        let summary = run_verify(&cfg).unwrap();
        for e in &summary.entries {
            assert!(
                e.passed,
                "{:?} m={} {:#?}",
                e.mode,
                e.m,
                e.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>()
            );
        }
        let modes: Vec<(Mode, usize)> = summary.entries.iter().map(|e| (e.mode, e.m)).collect();
        assert_eq!(
            modes,
            vec![
                (Mode::Universal, 1),
                (Mode::Universal, 2),
                (Mode::Universal, 3),
                (Mode::PhaseCovariant, 1),
                (Mode::PhaseCovariant, 3)
            ]
        );
    }

    #[test]
    fn sweep_is_deterministic() {
        let cfg = VerifyConfig { m_min: 2, m_max: 2, samples: 1, seed: 7, ..VerifyConfig::default() };
        let a = serde_json::to_string(&run_verify(&cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&run_verify(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bad_ranges() {
        let over = VerifyConfig { m_max: 13, ..VerifyConfig::default() };
        assert!(matches!(run_verify(&over), Err(Error::TooManyClones { .. })));
        let empty = VerifyConfig { m_min: 4, m_max: 3, ..VerifyConfig::default() };
        assert!(run_verify(&empty).is_err());
    }
}
