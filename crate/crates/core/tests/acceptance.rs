//! Acceptance suite. Each test prints one `criterion N: PASS|FAIL` line.

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use wdistill::branching::totals;
use wdistill::cavity::{self, CavityParams, Frame};
use wdistill::locc::{self, LoccSession, Sampled, Scripted, BOB};
use wdistill::montecarlo::{compare_frequencies, simulate_trials, ProtocolKind, TrialConfig, DEFAULT_THRESHOLD};
use wdistill::protocols::*;
use wdistill::statevec::PureState;
use wdistill::{Classification, Error};

type Outcome = (bool, String);

fn random_coeffs(n: usize, seed: u64) -> Vec<WCoefficients> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..n).map(|_| WCoefficients::random(&mut rng)).collect()
}

fn success_state(outcomes: &[wdistill::ProtocolOutcome], class: Classification) -> Option<&PureState> {
    outcomes
        .iter()
        .find(|o| o.classification == class && o.post_state.is_some())
        .and_then(|o| o.post_state.as_ref())
}

fn max_amp_diff(x: &PureState, y: &PureState) -> f64 {
    x.amplitudes()
        .iter()
        .zip(y.amplitudes())
        .map(|(p, q)| (p - q).norm())
        .fold(0.0, f64::max)
}

fn criterion_1_protocol1_probability_law() -> Outcome {
    let mut worst_p = 0.0f64;
    let mut worst_f = 0.0f64;
    for w in random_coeffs(1000, 1) {
        let out = run_protocol1(&w).unwrap();
        let p_w = totals(&out)[Classification::WSuccess.index()];
        worst_p = worst_p.max((p_w - 3.0 * w.c() * w.c()).abs());
        if let Some(s) = success_state(&out, Classification::WSuccess) {
            worst_f = worst_f.max((s.fidelity(&w3()).unwrap() - 1.0).abs());
        }
    }
    (
        worst_p < 1e-9 && worst_f < 1e-9,
        format!("max |p - 3c^2| = {worst_p:.3e}, max |F - 1| = {worst_f:.3e} over 1000 draws"),
    )
}

fn criterion_2_protocol2_partition() -> Outcome {
    let mut worst = 0.0f64;
    let mut worst_sum = 0.0f64;
    for w in random_coeffs(1000, 2) {
        let t = totals(&run_protocol2(&w).unwrap());
        let (a2, b2, c2) = w.squares();
        let want = [3.0 * c2, 2.0 * (b2 - c2), a2 - b2];
        for k in 0..3 {
            worst = worst.max((t[k] - want[k]).abs());
        }
        worst_sum = worst_sum.max((t.iter().sum::<f64>() - 1.0).abs());
    }
    (
        worst < 1e-9 && worst_sum < 1e-12,
        format!("max branch error = {worst:.3e}, max |sum - 1| = {worst_sum:.3e}"),
    )
}

fn criterion_3_garbage_structure_and_recycling() -> Outcome {
    let mut worst_purity = 0.0f64;
    let mut worst_conc = 0.0f64;
    for w in random_coeffs(1000, 3) {
        let g = protocol2_state(&w).unwrap().slice(ANCILLA, 1).unwrap();
        if g.norm() > 1e-6 {
            let g = g.normalized().unwrap();
            worst_purity = worst_purity.max((g.marginal_purity(&[PARTICLE_1]).unwrap() - 1.0).abs());
        }
        for o in run_protocol2(&w).unwrap() {
            if let (Classification::BellSuccess, Some(s)) = (o.classification, &o.post_state) {
                let c = s.partial_trace(&[PARTICLE_2, PARTICLE_3]).unwrap().concurrence().unwrap();
                worst_conc = worst_conc.max((c - 1.0).abs());
            }
        }
    }

    let (d, c2) = (1e-7f64, 0.2f64);
    let b = (-d + (1.6 - d * d).sqrt()) / 2.0;
    let w = WCoefficients::new(b + d, b, c2.sqrt()).unwrap();
    let out = run_protocol2(&w).unwrap();
    let via_u3 = out.iter().any(|o| o.label.contains(RECYCLE_ANCILLA));
    let p_bell = totals(&out)[Classification::BellSuccess.index()];
    let garbage = 1.0 - 3.0 * c2;
    let limit_gap = (p_bell - garbage).abs();

    (
        worst_purity < 1e-9 && worst_conc < 1e-9 && via_u3 && limit_gap < 1e-6,
        format!(
            "max purity error = {worst_purity:.3e}, max concurrence error = {worst_conc:.3e}, \
             |a-b|=1e-7 bell gap = {limit_gap:.3e} (recycled: {via_u3})"
        ),
    )
}

fn criterion_4_m_root_selection() -> Outcome {
    let mut bad_roots = 0usize;
    let mut worst_amp = 0.0f64;
    for w in random_coeffs(1000, 4) {
        let roots = m_roots(&w).unwrap();
        let ok = roots.iter().filter(|m| m_residual(&w, **m).abs() <= M_RESIDUAL_TOL).count();
        if ok != 1 {
            bad_roots += 1;
        }
        let s = protocol1_state(&w).unwrap();
        for lv in [[0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]] {
            let a = s.amplitude(&lv).unwrap();
            worst_amp = worst_amp.max((a - C64::new(w.c(), 0.0)).norm());
        }
    }
    (
        bad_roots == 0 && worst_amp < 1e-9,
        format!("draws without a unique root = {bad_roots}, max |amp - c| = {worst_amp:.3e}"),
    )
}

/// Magnitudes of the two-pass lab-frame amplitudes on |gge,0⟩, |egg,0⟩,
/// |geg,0⟩ and |ggg,1⟩.
fn lab_magnitudes(w: &WCoefficients, omega: f64, eps: f64, dt1: f64, dt2: f64) -> [([usize; 4], f64); 4] {
    let (a, b, c) = (w.a(), w.b(), w.c());
    let (x1, x2) = (eps * dt1, eps * dt2);
    let m = C64::from_polar(1.0, -0.5 * omega * (dt2 - dt1));
    let p = C64::from_polar(1.0, -0.5 * omega * (dt2 + dt1));
    let geg = m * b * x2.cos() - p * a * x1.sin() * x2.sin();
    let ggg1 = m * b * x2.sin() + p * a * x1.sin() * x2.cos();
    [
        ([0, 0, 1, 0], a * x1.cos().abs()),
        ([1, 0, 0, 0], c),
        ([0, 1, 0, 0], geg.norm()),
        ([0, 0, 0, 1], ggg1.norm()),
    ]
}

fn criterion_5_cavity_equivalence() -> Outcome {
    let mut worst_p = 0.0f64;
    let mut worst_f = 0.0f64;
    let mut worst_lab = 0.0f64;
    let int = CavityParams::default();
    for (k, w) in random_coeffs(1000, 5).into_iter().enumerate() {
        let out = cavity::run_cavity_protocol(&w, &int).unwrap();
        let p0 = totals(&out)[Classification::WSuccess.index()];
        worst_p = worst_p.max((p0 - 3.0 * w.c() * w.c()).abs());
        if let Some(s) = success_state(&out, Classification::WSuccess) {
            worst_f = worst_f.max((s.fidelity(&w3()).unwrap() - 1.0).abs());
        }

        let omega = 0.5 + 0.013 * k as f64;
        let eps = 0.7;
        let lab = CavityParams::resonant(omega, eps, 1, Frame::Lab).unwrap();
        let t = cavity::optimal_times(&w, eps).unwrap();
        let s = cavity::evolved_state(&w, &lab, &t).unwrap();
        for (lv, want) in lab_magnitudes(&w, omega, eps, t.dt1, t.dt2) {
            worst_lab = worst_lab.max((s.amplitude(&lv).unwrap().norm() - want).abs());
        }
    }
    (
        worst_p < 1e-9 && worst_f < 1e-9 && worst_lab < 1e-9,
        format!(
            "max |p0 - 3c^2| = {worst_p:.3e}, max |F - 1| = {worst_f:.3e}, \
             max lab magnitude error = {worst_lab:.3e}"
        ),
    )
}

fn criterion_6_unitarity() -> Outcome {
    let mut cases = random_coeffs(1000, 6);
    let boundary = [
        (0.4, 0.4, 0.2),
        (0.6, 0.2, 0.2),
        (0.7, 0.3 - 1e-14, 1e-14),
        (0.55, 0.45 - 1e-300, 1e-300),
        (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0),
    ];
    for (a2, b2, c2) in boundary {
        cases.push(WCoefficients::from_squares(a2, b2, c2).unwrap());
    }
    let mut worst = 0.0f64;
    let mut errors = 0usize;
    for w in &cases {
        let built = [
            build_u1(w),
            build_u2(w),
            build_u1_prime(w),
            build_u2_prime(w),
            build_u3_prime(w),
        ];
        for u in built {
            match u {
                Ok(u) => worst = worst.max(u.unitarity_deviation()),
                Err(_) => errors += 1,
            }
        }
    }
    (
        worst < 1e-12 && errors == 0,
        format!("max |UU^dagger - I| = {worst:.3e} over {} coefficient sets, build errors = {errors}", cases.len()),
    )
}

fn criterion_7_monte_carlo() -> Outcome {
    let w = WCoefficients::from_squares(0.5, 0.3, 0.2).unwrap();
    let mut lines = Vec::new();
    let mut pass = true;
    for protocol in ProtocolKind::ALL {
        let passed = (0..100u64)
            .into_par_iter()
            .map(|seed| {
                let r = simulate_trials(protocol, &w, &TrialConfig::new(100_000, seed)).unwrap();
                compare_frequencies(&r, DEFAULT_THRESHOLD).pass
            })
            .filter(|p| *p)
            .count();
        pass &= passed >= 99;
        lines.push(format!("{protocol} {passed}/100"));
    }
    (pass, format!("seeds passing the 4-sigma test: {}", lines.join(", ")))
}

fn criterion_8_locc_soundness() -> Outcome {
    let mut runs = 0usize;
    let mut rejections = 0usize;
    let mut worst_replay = 0.0f64;
    let mut check = |run: locc::SessionRun| {
        runs += 1;
        rejections += run.session.rejected();
        let replayed = LoccSession::replay_jsonl(&run.session.to_jsonl()).unwrap();
        worst_replay = worst_replay.max(max_amp_diff(replayed.state(), run.session.state()));
    };
    let p = CavityParams::default();
    for w in random_coeffs(50, 8) {
        let mut rng = Sampled(ChaCha20Rng::seed_from_u64(w.c().to_bits()));
        check(locc::run_protocol1_session(&w, &mut rng).unwrap());
        check(locc::run_protocol2_session(&w, &mut rng).unwrap());
        check(locc::run_cavity_session(&w, &p, &mut rng).unwrap());
        for script in [[0, 0], [1, 0], [1, 1]] {
            check(locc::run_protocol2_session(&w, &mut Scripted::new(script)).unwrap());
        }
        check(locc::run_protocol1_session(&w, &mut Scripted::new([1])).unwrap());
        check(locc::run_cavity_session(&w, &p, &mut Scripted::new([1])).unwrap());
    }

    let w = WCoefficients::from_squares(0.5, 0.3, 0.2).unwrap();
    let mut s = LoccSession::new(make_wprime(&w), locc::standard_ownership()).unwrap();
    s.prepare_ancilla(BOB, ANCILLA, 2).unwrap();
    let before = s.state().clone();
    let injected = s.local_apply("cross-site", &build_u1(&w).unwrap(), PARTICLE_1, ANCILLA);
    let rejected = matches!(injected, Err(Error::LocalityViolation { .. })) && s.state() == &before;

    (
        rejections == 0 && rejected && worst_replay < 1e-12,
        format!(
            "{runs} sessions with {rejections} violations, cross-site gate rejected: {rejected}, \
             max replay error = {worst_replay:.3e}"
        ),
    )
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 8] = [
        (1, criterion_1_protocol1_probability_law),
        (2, criterion_2_protocol2_partition),
        (3, criterion_3_garbage_structure_and_recycling),
        (4, criterion_4_m_root_selection),
        (5, criterion_5_cavity_equivalence),
        (6, criterion_6_unitarity),
        (7, criterion_7_monte_carlo),
        (8, criterion_8_locc_soundness),
    ];
    let mut failed = 0;
    for (n, run) in criteria {
        let (pass, detail) = std::panic::catch_unwind(run).unwrap_or_else(|_| (false, "panicked".to_owned()));
        println!("criterion {n}: {} {detail}", if pass { "PASS" } else { "FAIL" });
        failed += usize::from(!pass);
    }
    println!("acceptance: {}/8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
