//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Reference values come from oracles written here, independent of
//! the library's state builders.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seqclone::cloning::{
    alpha_coeffs, gamma_coeffs, gm_state, pc_branch_decomposition, reconstruct_branch, BlochQubit,
};
use seqclone::linalg::{svd, ComplexMatrix, C64};
use seqclone::mps::{decompose, reconstruct, to_isometries, DECOMPOSE_TOL};
use seqclone::protocol::{
    clone_with_output, extract_final_ancilla, run_chain, run_chain_trace, table1_isometries, BranchPolicy, Mode,
    ProtocolConfig,
};
use seqclone::qstate::{max_chi, schmidt_rank, PureState};
use seqclone::{ComplexVector, Error};

// ---- oracles -------------------------------------------------------------

fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Equal superposition of all `n`-bit strings with `ones` set bits.
fn dicke_oracle(n: usize, ones: usize) -> Vec<C64> {
    let amp = C64::new(1.0 / binom(n, ones).sqrt(), 0.0);
    (0..1usize << n).map(|i| if i.count_ones() as usize == ones { amp } else { C64::new(0.0, 0.0) }).collect()
}

fn kron(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Universal cloning output for input |0⟩: Σ_j α_j |(M−j)0, j1⟩_S ⊗ |(M−j−1)1, j0⟩_S.
fn gm_zero_oracle(m: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); 1 << (2 * m - 1)];
    for j in 0..m {
        let a = (2.0 * (m - j) as f64 / (m * (m + 1)) as f64).sqrt();
        for (o, t) in out.iter_mut().zip(kron(&dicke_oracle(m, j), &dicke_oracle(m - 1, m - 1 - j))) {
            *o += t * a;
        }
    }
    out
}

/// Phase-covariant output (|(k+1)0,k1⟩_S + e^{iφ}|k0,(k+1)1⟩_S)/√2.
fn pc_oracle(phi: f64, m: usize) -> Vec<C64> {
    let k = (m - 1) / 2;
    let h = 1.0 / 2f64.sqrt();
    let ph = C64::from_polar(h, phi);
    dicke_oracle(m, k).iter().zip(dicke_oracle(m, k + 1)).map(|(a, b)| a * h + b * ph).collect()
}

/// Brute-force 2×2 marginal of qubit `q` (qubit 0 most significant).
fn marginal(amps: &[C64], n: usize, q: usize) -> [[C64; 2]; 2] {
    let shift = n - 1 - q;
    let mut rho = [[C64::new(0.0, 0.0); 2]; 2];
    for (i, a) in amps.iter().enumerate() {
        if (i >> shift) & 1 == 0 {
            let j = i | (1 << shift);
            rho[0][0] += a * a.conj();
            rho[0][1] += a * amps[j].conj();
            rho[1][0] += amps[j] * a.conj();
            rho[1][1] += amps[j] * amps[j].conj();
        }
    }
    rho
}

fn fidelity(rho: &[[C64; 2]; 2], psi: [C64; 2]) -> f64 {
    let mut f = C64::new(0.0, 0.0);
    for r in 0..2 {
        for c in 0..2 {
            f += psi[r].conj() * rho[r][c] * psi[c];
        }
    }
    f.re
}

fn overlap_modulus(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>().norm()
}

fn bloch(theta: f64, phi: f64) -> [C64; 2] {
    [C64::new((theta / 2.0).cos(), 0.0), C64::from_polar((theta / 2.0).sin(), phi)]
}

/// Row index = first `cut` qubits, column index = the rest.
fn reshape(amps: &[C64], n: usize, cut: usize) -> ComplexMatrix {
    let cols = 1usize << (n - cut);
    ComplexMatrix::from_vec(1 << cut, cols, amps.to_vec()).expect("shape")
}

fn random_universal(rng: &mut ChaCha8Rng) -> BlochQubit {
    let theta = rng.gen::<f64>().mul_add(2.0, -1.0).acos();
    BlochQubit::new(theta, rng.gen_range(0.0..2.0 * PI)).expect("valid angles")
}

fn amps(s: &PureState) -> &[C64] {
    s.amplitudes().as_slice()
}

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fmt_err(e: Error) -> String {
    e.to_string()
}

// ---- criteria ------------------------------------------------------------

fn universal_fidelity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for m in 2..=6 {
        let expected = (2 * m + 1) as f64 / (3 * m) as f64;
        for _ in 0..10 {
            let q = random_universal(&mut rng);
            let cfg = ProtocolConfig::new(Mode::Universal, m).with_seed(rng.gen());
            let (report, out) = clone_with_output(&cfg, &q).map_err(fmt_err)?;
            let psi = bloch(q.theta(), q.phi());
            for c in 0..m {
                let f = fidelity(&marginal(amps(&out), out.n_qubits(), c), psi);
                worst = worst.max((f - expected).abs()).max((report.per_clone_fidelity[c] - expected).abs());
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(worst <= 1e-9, || format!("max |F - (2M+1)/(3M)| = {worst:.3e}"))?;
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("max |F - (2M+1)/(3M)| = {worst:.2e} over M=2..6 x 10 inputs in {:.2}s", elapsed.as_secs_f64()))
}

fn universal_ancilla_dimension() -> Outcome {
    for m in 2..=6 {
        let target = gm_state(&BlochQubit::zero(), m).map_err(fmt_err)?;
        let chi = max_chi(&target, 1e-10).map_err(fmt_err)?;
        ensure(chi == m, || format!("M={m}: max_chi = {chi}"))?;
        let form = decompose(&target, DECOMPOSE_TOL).map_err(fmt_err)?;
        let (steps, init) = to_isometries(&form, m).map_err(fmt_err)?;
        let joint = run_chain(&steps, &init).map_err(fmt_err)?;
        let (_, emitted) = extract_final_ancilla(&joint, 1e-10).map_err(fmt_err)?;
        let ov = overlap_modulus(amps(&emitted), &gm_zero_oracle(m));
        ensure(ov >= 1.0 - 1e-9, || format!("M={m}: d=M chain overlap {ov}"))?;
        ensure(matches!(to_isometries(&form, m - 1), Err(Error::AncillaTooSmall { .. })), || {
            format!("M={m}: d=M-1 was accepted")
        })?;
        let q = BlochQubit::new(0.9, 0.3).map_err(fmt_err)?;
        let (report, _) = clone_with_output(&ProtocolConfig::new(Mode::Universal, m), &q).map_err(fmt_err)?;
        ensure(report.d_total == 2 * m, || format!("M={m}: d_total = {}", report.d_total))?;
    }
    Ok("chi = M, d = M succeeds, d = M-1 rejected, d_total = 2M for M=2..6".into())
}

fn phase_covariant_ancilla_dimension() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst = 0.0f64;
    let mut f3 = 0.0;
    for m in [3, 5, 7] {
        for _ in 0..5 {
            let phi = rng.gen_range(0.0..2.0 * PI);
            let q = BlochQubit::equatorial(phi).map_err(fmt_err)?;
            let cfg = ProtocolConfig::new(Mode::PhaseCovariant, m).with_seed(rng.gen());
            let (report, out) = clone_with_output(&cfg, &q).map_err(fmt_err)?;
            ensure(report.d_total == m + 1, || format!("M={m}: d_total = {}", report.d_total))?;
            let psi = bloch(PI / 2.0, phi);
            let oracle = pc_oracle(phi, m);
            for c in 0..m {
                let expected = fidelity(&marginal(&oracle, m, c), psi);
                let got = fidelity(&marginal(amps(&out), m, c), psi);
                worst = worst.max((got - expected).abs());
                if m == 3 {
                    f3 = expected;
                }
            }
        }
    }
    ensure(worst <= 1e-9, || format!("max fidelity error {worst:.3e}"))?;
    ensure((f3 - 5.0 / 6.0).abs() <= 1e-12, || format!("M=3 oracle fidelity {f3}"))?;
    Ok(format!("d_total = M+1, max fidelity error {worst:.2e}, M=3 oracle {f3:.12}"))
}

fn table_validity() -> Outcome {
    let mut worst_defect = 0.0f64;
    let mut worst_gap = 0.0f64;
    for m in 2..=6 {
        let steps = table1_isometries(&alpha_coeffs(m).map_err(fmt_err)?).map_err(fmt_err)?;
        worst_defect = steps.iter().map(|s| s.defect()).fold(worst_defect, f64::max);
        let joint = run_chain(&steps, &ComplexVector::basis(m, 0)).map_err(fmt_err)?;
        let (_, table_out) = extract_final_ancilla(&joint, 1e-10).map_err(fmt_err)?;
        let oracle = gm_zero_oracle(m);
        worst_gap = worst_gap.max(1.0 - overlap_modulus(amps(&table_out), &oracle));

        let form = decompose(&gm_state(&BlochQubit::zero(), m).map_err(fmt_err)?, DECOMPOSE_TOL).map_err(fmt_err)?;
        let (mps_steps, init) = to_isometries(&form, m).map_err(fmt_err)?;
        let (_, mps_out) =
            extract_final_ancilla(&run_chain(&mps_steps, &init).map_err(fmt_err)?, 1e-10).map_err(fmt_err)?;
        worst_gap = worst_gap.max(1.0 - overlap_modulus(amps(&table_out), amps(&mps_out)));
    }
    ensure(worst_defect < 1e-10, || format!("max isometry defect {worst_defect:.3e}"))?;
    ensure(worst_gap <= 1e-9, || format!("max overlap gap {worst_gap:.3e}"))?;
    Ok(format!("max defect {worst_defect:.2e}, max overlap gap (direct and MPS) {worst_gap:.2e}"))
}

fn protocol_determinism() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let (mut prob, mut agree, mut pur, mut mid) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let cases: Vec<(Mode, usize)> =
        (2..=6).map(|m| (Mode::Universal, m)).chain([3, 5, 7].map(|m| (Mode::PhaseCovariant, m))).collect();
    for (mode, m) in cases {
        for _ in 0..4 {
            let q = match mode {
                Mode::Universal => random_universal(&mut rng),
                Mode::PhaseCovariant => BlochQubit::equatorial(rng.gen_range(0.0..2.0 * PI)).map_err(fmt_err)?,
            };
            let base = ProtocolConfig::new(mode, m);
            let (r0, out0) =
                clone_with_output(&base.clone().with_policy(BranchPolicy::Forced0), &q).map_err(fmt_err)?;
            let (r1, out1) = clone_with_output(&base.with_policy(BranchPolicy::Forced1), &q).map_err(fmt_err)?;
            for p in r0.branch_probabilities.iter().chain(&r1.branch_probabilities) {
                prob = prob.max((p - 0.5).abs());
            }
            agree = agree.max(1.0 - overlap_modulus(amps(&out0), amps(&out1)));
            pur = pur.max(1.0 - r0.ancilla_purity_final);
        }
        let coeffs = ProtocolConfig::new(mode, m).coefficients().map_err(fmt_err)?;
        let d = coeffs.m_eff();
        if d >= 2 {
            let steps = table1_isometries(&coeffs).map_err(fmt_err)?;
            let trace = run_chain_trace(&steps, &ComplexVector::basis(d, 0)).map_err(fmt_err)?;
            mid = mid.max(trace[d - 1].ancilla_purity());
        }
    }
    ensure(prob <= 1e-10, || format!("branch probability error {prob:.3e}"))?;
    ensure(agree <= 1e-10, || format!("branch disagreement {agree:.3e}"))?;
    ensure(pur <= 1e-10, || format!("final purity gap {pur:.3e}"))?;
    ensure(mid <= 1.0 - 1e-3, || format!("mid-chain purity {mid}"))?;
    Ok(format!("|p - 1/2| <= {prob:.2e}, branch gap {agree:.2e}, final purity gap {pur:.2e}, max mid purity {mid:.4}"))
}

fn rank_bound() -> Outcome {
    for m in 2..=6 {
        let n = 2 * m - 1;
        let target = gm_state(&BlochQubit::zero(), m).map_err(fmt_err)?;
        let oracle = gm_zero_oracle(m);
        for cut in 1..n {
            let rank = schmidt_rank(&target, cut, 1e-10).map_err(fmt_err)?;
            let s = svd(&reshape(&oracle, n, cut)).map_err(fmt_err)?.s;
            let direct = s.iter().filter(|&&x| x > 1e-10 * s[0].max(1.0)).count();
            ensure(rank == direct, || format!("M={m} cut {cut}: rank {rank} vs oracle {direct}"))?;
            ensure(rank <= m, || format!("M={m} cut {cut}: rank {rank} > M"))?;
            if cut == m {
                ensure(rank == m, || format!("M={m}: rank at cut M is {rank}"))?;
            }
        }
    }
    Ok("rank <= M at every cut, = M at cut M, for M=2..6".into())
}

fn mps_engine() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let n = 8;
    let (mut worst_gap, mut worst_lambda) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let raw: Vec<C64> = (0..1 << n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let v: Vec<C64> = raw.iter().map(|z| z / norm).collect();
        let state = PureState::new(n, ComplexVector::new(v.clone())).map_err(fmt_err)?;
        let form = decompose(&state, DECOMPOSE_TOL).map_err(fmt_err)?;
        let (back, _) = reconstruct(&form).map_err(fmt_err)?;
        worst_gap = worst_gap.max(1.0 - overlap_modulus(&v, amps(&back)));
        for cut in 1..n {
            let s = svd(&reshape(&v, n, cut)).map_err(fmt_err)?.s;
            let l = &form.lambdas[cut - 1];
            for (i, x) in s.iter().enumerate() {
                worst_lambda = worst_lambda.max((x - l.get(i).copied().unwrap_or(0.0)).abs());
            }
        }
    }
    ensure(worst_gap <= 1e-8, || format!("roundtrip gap {worst_gap:.3e}"))?;
    ensure(worst_lambda <= 1e-10, || format!("lambda error {worst_lambda:.3e}"))?;
    Ok(format!("50 random 8-qubit states: roundtrip gap {worst_gap:.2e}, lambda error {worst_lambda:.2e}"))
}

fn normalizations() -> Outcome {
    let mut worst = 0.0f64;
    for m in 1..=12 {
        worst = worst.max((alpha_coeffs(m).map_err(fmt_err)?.values().iter().map(|a| a * a).sum::<f64>() - 1.0).abs());
    }
    for k in 0..=5 {
        worst = worst.max((gamma_coeffs(k).map_err(fmt_err)?.values().iter().map(|g| g * g).sum::<f64>() - 1.0).abs());
    }
    ensure(worst <= 1e-12, || format!("coefficient norm error {worst:.3e}"))?;
    let mut gap = 0.0f64;
    for k in 0..=5 {
        let rec = reconstruct_branch(&pc_branch_decomposition(k).map_err(fmt_err)?).map_err(fmt_err)?;
        gap = gap.max(1.0 - overlap_modulus(amps(&rec), &dicke_oracle(2 * k + 1, k)));
    }
    ensure(gap <= 1e-12, || format!("branch reconstruction gap {gap:.3e}"))?;
    Ok(format!("coefficient norm error {worst:.2e}, branch reconstruction gap {gap:.2e}"))
}

fn full_verify_run() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_seqclone"))
        .args(["verify", "--m-min", "2", "--m-max", "6", "--mode", "both"])
        .output()
        .map_err(|e| format!("cannot launch binary: {e}"))?;
    let elapsed = start.elapsed();
    let code = out.status.code();
    ensure(code == Some(0), || format!("exit {code:?}: {}", String::from_utf8_lossy(&out.stderr)))?;
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("exit 0 in {:.2}s", elapsed.as_secs_f64()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("universal fidelity", universal_fidelity),
        ("ancilla dimension, universal", universal_ancilla_dimension),
        ("ancilla dimension, phase-covariant", phase_covariant_ancilla_dimension),
        ("isometry table validity", table_validity),
        ("protocol determinism", protocol_determinism),
        ("rank bound", rank_bound),
        ("MPS engine", mps_engine),
        ("normalizations", normalizations),
        ("full verify sweep", full_verify_run),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
