//! Acceptance suite: one test per numbered criterion, each printing a
//! single `criterion N: PASS/FAIL` line with the measured numbers next to
//! the target window. A failing criterion fails its test; the printed line
//! then shows how far off the run landed.
//!
//! All scenarios use the reference manifold (alpha^2 = 0.87, splitting
//! 4.71 ns^-1) and drives (Omega_p = 0.24, Omega_c = 3.8 ns^-1).

use std::time::Instant;

use cdsim::counterdiabatic::{cd_from_eigen, h_cd, CdMask, CdScheme};
use cdsim::harness::{
    compare_models, linear_grid, run_scenario, sweep_tf, Scenario, DEFAULT_GAMMA_S,
    DEFAULT_GAMMA_T, DEFAULT_N_OUT, DEFAULT_TOL, LINEAR_TAU_STOP, REF_ALPHA_SQ, REF_DELTA_SO,
    REF_D_DC30, REF_OMEGA_C, REF_OMEGA_P,
};
use cdsim::linalg::CMatrix;
use cdsim::model::{
    build_h3, light_shift, manifold_from_mixing, BasisSet, DriveParams, ManifoldParams, ModelKind,
};
use cdsim::propagator::{evolve, FnSchedule, StateVector};
use cdsim::protocols::SweepProtocol;
use cdsim::spectral::{crossing_census, spectral_flow};
use cdsim::{Complex, Real};

fn manifold() -> ManifoldParams<Real> {
    manifold_from_mixing(REF_ALPHA_SQ, REF_DELTA_SO).unwrap()
}

fn drive(delta_c: Real) -> DriveParams<Real> {
    DriveParams::new(REF_OMEGA_P, REF_OMEGA_C, delta_c).unwrap()
}

/// Minimal anticrossing gap of the swept component: the pump coupling into
/// the target state.
fn pump_gap() -> Real {
    manifold().beta() * REF_OMEGA_P
}

fn scenario(kind: ModelKind, delta_c: Real, protocol: SweepProtocol<Real>, t_f: Real) -> Scenario {
    Scenario {
        kind,
        manifold: manifold(),
        drive: drive(delta_c),
        protocol,
        cd: None,
        t_f,
        tol: DEFAULT_TOL,
        n_out: DEFAULT_N_OUT,
        initial: "1".into(),
        target: "T".into(),
        gamma_s: DEFAULT_GAMMA_S,
        gamma_t: DEFAULT_GAMMA_T,
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

// ---------------------------------------------------------------------------

#[test]
fn criterion_1_gap_adapted_reference_transfer() {
    let s = Scenario {
        n_out: 2,
        ..scenario(
            ModelKind::ThreeLevel,
            30.0,
            SweepProtocol::sqrt_adapted(10.0, pump_gap(), REF_D_DC30),
            50.0,
        )
    };
    let t0 = Instant::now();
    let out = run_scenario(&s).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let pass = (out.fidelity - 0.93).abs() <= 0.03 && secs < 5.0;
    println!(
        "criterion 1: {} - gap-adapted 50 ns transfer at delta_c = 30 reached \
         F = {:.4} (target 0.93 +/- 0.03) in {:.2} s (limit 5 s)",
        verdict(pass),
        out.fidelity,
        secs
    );
    assert!(pass);
}

#[test]
fn criterion_2_dressed_frame_corrected_transfer() {
    let protocol = SweepProtocol::arctan(10.0, 10.0, 18.0)
        .split_diabatic_cd(0.2)
        .unwrap();
    let s = Scenario {
        cd: Some(CdScheme::dressed().with_switch(0.2).unwrap()),
        ..scenario(ModelKind::FourLevel, 1.0, protocol, 1.0)
    };
    let t0 = Instant::now();
    let out = run_scenario(&s).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let pass = (out.fidelity - 0.97).abs() <= 0.02 && secs < 5.0;
    println!(
        "criterion 2: {} - dressed-frame corrected transfer measured in the bare \
         basis reached P(T) = {:.4} (target 0.97 +/- 0.02) in {:.2} s (limit 5 s). \
         The stated sweep ends 0.08 ns^-1 past an anticrossing whose full width \
         is 0.07 ns^-1, which caps the bare-measured target population near 0.8 \
         for every counterdiabatic construction built from these parameters.",
        verdict(pass),
        out.fidelity,
        secs
    );
    assert!(pass);
}

#[test]
fn criterion_3_bare_frame_corrected_transfer() {
    let protocol = SweepProtocol::arctan(10.0, 10.0, 18.0)
        .split_diabatic_cd(0.2)
        .unwrap();
    let s = Scenario {
        cd: Some(CdScheme::bare().with_switch(0.2).unwrap()),
        ..scenario(ModelKind::FourLevel, 1.0, protocol, 1.0)
    };
    let out = run_scenario(&s).unwrap();
    let p2 = *out.measured.populations("2").unwrap().last().unwrap();
    let p1 = *out.measured.populations("1").unwrap().last().unwrap();
    let f_ok = (out.fidelity - 0.65).abs() <= 0.05;
    let p2_ok = (p2 - 0.35).abs() <= 0.05;
    let pass = f_ok && p2_ok;
    println!(
        "criterion 3: {} - bare-frame corrected transfer reached F(T) = {:.4} \
         (target 0.65 +/- 0.05) and P(2) = {:.4} (target 0.35 +/- 0.05), with \
         P(1) = {:.4} still in flight because the sweep stops inside the final \
         anticrossing. The target pair matches the 0.64/0.36 composition of the \
         upper dressed state, which the run only reaches if that anticrossing \
         completes; with these sweep parameters it cannot.",
        verdict(pass),
        out.fidelity,
        p2,
        p1
    );
    assert!(pass);
}

#[test]
fn criterion_4_full_correction_infidelity_grid() {
    let grid = linear_grid(0.5, 5.0, 10).unwrap();
    let s = Scenario {
        cd: Some(CdScheme::bare()),
        n_out: 2,
        ..scenario(
            ModelKind::ThreeLevel,
            30.0,
            SweepProtocol::arctan(10.0, 20.0, 19.2),
            1.0,
        )
    };
    let sweep = sweep_tf(&s, &grid).unwrap();
    let worst = sweep
        .infidelity
        .iter()
        .map(|i| i.unwrap())
        .fold(0.0_f64, Real::max);
    let pass = worst <= 5e-3;
    println!(
        "criterion 4: {} - fully corrected infidelity over t_f in [0.5, 5] ns \
         peaked at {:.3e} (bound 5e-3 at every point). The sweep endpoint sits \
         close enough to the anticrossing that the final adiabatic state keeps \
         5.27e-3 of its weight off the target, so the exact-following bound \
         itself exceeds the criterion; the grid values oscillate around that \
         floor.",
        verdict(pass),
        worst
    );
    assert!(pass);
}

#[test]
fn criterion_5_dominant_pulse_truncation() {
    let grid = linear_grid(0.5, 5.0, 10).unwrap();
    let base = Scenario {
        cd: Some(CdScheme::bare()),
        n_out: 2,
        ..scenario(
            ModelKind::ThreeLevel,
            30.0,
            SweepProtocol::arctan(10.0, 20.0, 19.2),
            1.0,
        )
    };
    let full = sweep_tf(&base, &grid).unwrap();
    let keep = Scenario {
        cd: Some(CdScheme::bare().with_mask(CdMask::Pairs(vec![(0, 2)]))),
        ..base.clone()
    };
    let kept = sweep_tf(&keep, &grid).unwrap();
    let max_shift = (0..grid.len())
        .map(|i| (kept.infidelity[i].unwrap() - full.infidelity[i].unwrap()).abs())
        .fold(0.0_f64, Real::max);

    let (m, d) = (manifold(), drive(30.0));
    let p = SweepProtocol::arctan(10.0, 20.0, 19.2);
    let scheme = CdScheme::bare();
    let (mut pk_1s, mut pk_1t, mut pk_st): (Real, Real, Real) = (0.0, 0.0, 0.0);
    for i in 0..=2000 {
        let tau = i as Real / 2000.0;
        let h = h_cd(ModelKind::ThreeLevel, &m, &d, &p, tau, 1.0, &scheme).unwrap();
        let hm = h.matrix();
        pk_1s = pk_1s.max(hm[(0, 1)].im.abs());
        pk_1t = pk_1t.max(hm[(0, 2)].im.abs());
        pk_st = pk_st.max(hm[(1, 2)].im.abs());
    }

    let pass = max_shift <= 1e-3 && pk_1t > pk_1s && pk_1t > pk_st;
    println!(
        "criterion 5: {} - keeping only the pump-target correction shifted the \
         infidelity by at most {:.3e} (bound 1e-3), and its peak drive {:.3} \
         dominates the other pairs ({:.3} and {:.3})",
        verdict(pass),
        max_shift,
        pk_1t,
        pk_1s,
        pk_st
    );
    assert!(pass);
}

#[test]
fn criterion_6_reduced_and_full_models_agree() {
    let shared = [2.0, 4.5, 10.0, 22.0, 50.0];
    let jobs: [(&str, SweepProtocol<Real>); 3] = [
        (
            "linear",
            SweepProtocol::linear(10.0)
                .clamp_after(LINEAR_TAU_STOP)
                .unwrap(),
        ),
        ("arctan", SweepProtocol::arctan(10.0, 20.0, 19.2)),
        (
            "gap-adapted",
            SweepProtocol::sqrt_adapted(10.0, pump_gap(), REF_D_DC30),
        ),
    ];
    let mut worst: (Real, &str) = (0.0, "");
    for (name, protocol) in jobs {
        let s = Scenario {
            n_out: 2,
            ..scenario(ModelKind::ThreeLevel, 30.0, protocol, 1.0)
        };
        let cmp = compare_models(&s, &shared).unwrap();
        if cmp.max_fidelity_gap > worst.0 {
            worst = (cmp.max_fidelity_gap, name);
        }
    }
    let pass = worst.0 <= 0.05;
    println!(
        "criterion 6: {} - three- and four-level fidelities agree to {:.4} \
         across all protocols on the shared duration grid (bound 0.05, worst \
         case the {} sweep)",
        verdict(pass),
        worst.0,
        worst.1
    );
    assert!(pass);
}

#[test]
fn criterion_7_control_induced_level_shift() {
    let shift = light_shift(0.87_f64, 3.8, 100.0).unwrap();
    let pass = (shift - 0.0314).abs() <= 5e-4;
    println!(
        "criterion 7: {} - control-induced level shift at delta_c = 100 is \
         {:.5} ns^-1 (target 0.0314 +/- 0.0005)",
        verdict(pass),
        shift
    );
    assert!(pass);
}

#[test]
fn criterion_8_crossing_census_counts() {
    let (m, d) = (manifold(), drive(100.0));
    let jobs: [(&str, SweepProtocol<Real>, usize); 3] = [
        ("linear", SweepProtocol::linear(10.0), 2),
        ("arctan", SweepProtocol::arctan(10.0, 20.0, 19.2), 1),
        (
            "gap-adapted",
            SweepProtocol::sqrt_adapted(10.0, pump_gap(), 4.68),
            1,
        ),
    ];
    let mut counts = Vec::new();
    let mut pass = true;
    for (name, protocol, expected) in jobs {
        let flow = spectral_flow(ModelKind::ThreeLevel, &m, &d, &protocol, 2001).unwrap();
        let events = crossing_census(&flow, "1").unwrap();
        pass &= events.len() == expected;
        counts.push(format!("{name} {} (want {expected})", events.len()));
    }
    println!(
        "criterion 8: {} - avoided-crossing census on the swept component at \
         delta_c = 100: {}",
        verdict(pass),
        counts.join(", ")
    );
    assert!(pass);
}

/// Compact deterministic spot checks of the seven structural invariants; the
/// randomized versions live in the property suite alongside this file.
#[test]
fn criterion_9_structural_invariants() {
    let mut notes: Vec<String> = Vec::new();
    let mut pass = true;

    // (a) Norm conservation on representative runs, corrected and not.
    let plain = Scenario {
        n_out: 51,
        ..scenario(
            ModelKind::ThreeLevel,
            30.0,
            SweepProtocol::arctan(10.0, 20.0, 19.2),
            5.0,
        )
    };
    let dressed = Scenario {
        cd: Some(CdScheme::dressed().with_switch(0.2).unwrap()),
        n_out: 51,
        ..scenario(
            ModelKind::FourLevel,
            1.0,
            SweepProtocol::arctan(10.0, 10.0, 18.0)
                .split_diabatic_cd(0.2)
                .unwrap(),
            1.0,
        )
    };
    let drift = run_scenario(&plain)
        .unwrap()
        .native
        .max_norm_defect()
        .max(run_scenario(&dressed).unwrap().native.max_norm_defect());
    pass &= drift < 1e-9;
    notes.push(format!("norm drift {drift:.1e}"));

    // (b) The correction is Hermitian and purely off-diagonal in the
    // instantaneous eigenbasis.
    let (m, d) = (manifold(), drive(30.0));
    let p = SweepProtocol::arctan(10.0, 20.0, 19.2);
    let h0 = build_h3(&m, &d, p.value(0.37).unwrap()).unwrap();
    let hc = h_cd(
        ModelKind::ThreeLevel,
        &m,
        &d,
        &p,
        0.37,
        1.0,
        &CdScheme::bare(),
    )
    .unwrap();
    let herm = hc.matrix().hermiticity_defect();
    let (_, vecs) = h0.matrix().eigh();
    let in_eig = hc.matrix().conjugated_by(&vecs);
    let diag = (0..3)
        .map(|i| in_eig[(i, i)].norm())
        .fold(0.0_f64, Real::max);
    pass &= herm < 1e-9 && diag < 1e-9;
    notes.push(format!(
        "hermiticity {herm:.1e}, eigenbasis diagonal {diag:.1e}"
    ));

    // (c) Gauge invariance: re-phasing the eigenvectors leaves the
    // correction unchanged.
    let (energies, vectors) = h0.matrix().eigh();
    let slope = p.rate(0.37, 1.0);
    let mut dhdt = CMatrix::zeros(3);
    dhdt[(0, 0)] = Complex::new(slope, 0.0);
    let reference = cd_from_eigen(&energies, &vectors, &dhdt, 0.37).unwrap();
    let mut twisted = vectors.clone();
    for (k, phase) in [0.3_f64, -1.2, 2.4].into_iter().enumerate() {
        let factor = Complex::from_polar(1.0, phase);
        for i in 0..3 {
            twisted[(i, k)] *= factor;
        }
    }
    let rephased = cd_from_eigen(&energies, &twisted, &dhdt, 0.37).unwrap();
    let gauge = reference.sub(&rephased).max_abs();
    pass &= gauge < 1e-9;
    notes.push(format!("gauge drift {gauge:.1e}"));

    // (d) Exact following at very short duration: the corrected run holds
    // the instantaneous-eigenstate population up to the small initial
    // eigenstate mismatch of the bare starting state.
    let fast = Scenario {
        cd: Some(CdScheme::bare()),
        n_out: 2,
        t_f: 0.01,
        ..plain.clone()
    };
    let out = run_scenario(&fast).unwrap();
    let h_end = build_h3(&m, &d, p.value(1.0).unwrap()).unwrap();
    let (_, v_end) = h_end.matrix().eigh();
    let psi = out.native.final_state();
    let held = (0..3)
        .map(|b| {
            (0..3)
                .map(|i| v_end[(i, b)].conj() * psi[i])
                .sum::<Complex<Real>>()
                .norm_sqr()
        })
        .fold(0.0_f64, Real::max);
    pass &= held >= 1.0 - 1e-4;
    notes.push(format!("eigenstate hold {held:.6} at t_f = 0.01"));

    // (e) Two-level closed form: for H = [[e, g], [g, -e]] the correction
    // is theta_dot sigma_y with theta_dot = -g e_dot / (2 (e^2 + g^2)).
    let (e, g, e_dot) = (0.7_f64, 0.35_f64, 4.1_f64);
    let mut h2 = CMatrix::zeros(2);
    h2[(0, 0)] = Complex::new(e, 0.0);
    h2[(0, 1)] = Complex::new(g, 0.0);
    h2[(1, 0)] = Complex::new(g, 0.0);
    h2[(1, 1)] = Complex::new(-e, 0.0);
    let mut dh2 = CMatrix::zeros(2);
    dh2[(0, 0)] = Complex::new(e_dot, 0.0);
    dh2[(1, 1)] = Complex::new(-e_dot, 0.0);
    let (en2, v2) = h2.eigh();
    let got = cd_from_eigen(&en2, &v2, &dh2, 0.5).unwrap();
    let theta_dot = -g * e_dot / (2.0 * (e * e + g * g));
    let mut want = CMatrix::zeros(2);
    want[(0, 1)] = Complex::new(0.0, -theta_dot);
    want[(1, 0)] = Complex::new(0.0, theta_dot);
    let oracle = got.sub(&want).max_abs();
    pass &= oracle < 1e-9;
    notes.push(format!("two-level oracle {oracle:.1e}"));

    // (f) Resonant two-state exchange follows sin^2(Omega t / 2).
    let omega = 0.9_f64;
    let mut h_rabi = CMatrix::zeros(3);
    h_rabi[(0, 1)] = Complex::new(omega / 2.0, 0.0);
    h_rabi[(1, 0)] = Complex::new(omega / 2.0, 0.0);
    h_rabi[(2, 2)] = Complex::new(40.0, 0.0);
    let schedule = FnSchedule::new(
        BasisSet::Bare3,
        vec![],
        move |_tau: Real| Ok(h_rabi.clone()),
    );
    let psi0 = StateVector::basis_state(BasisSet::Bare3, "1").unwrap();
    let t_f = 7.3_f64;
    let traj = evolve(&schedule, &psi0, t_f, 1e-12, 2).unwrap();
    let p_s = *traj.populations("S").unwrap().last().unwrap();
    let rabi = (p_s - (omega * t_f / 2.0).sin().powi(2)).abs();
    pass &= rabi < 1e-8;
    notes.push(format!("resonant exchange dev {rabi:.1e}"));

    // (g) Analytic sweep rates match finite differences.
    let protos = [
        SweepProtocol::linear(10.0),
        SweepProtocol::arctan(10.0, 20.0, 19.2),
        SweepProtocol::sqrt_adapted(10.0, pump_gap(), REF_D_DC30),
    ];
    let mut rate_dev = 0.0_f64;
    for p in &protos {
        for i in 1..40 {
            let tau = i as Real / 40.0;
            let h = 1e-6;
            let fd = (p.value(tau + h).unwrap() - p.value(tau - h).unwrap()) / (2.0 * h * 2.0);
            let an = p.rate(tau, 2.0);
            rate_dev = rate_dev.max((fd - an).abs() / (1.0 + an.abs()));
        }
    }
    pass &= rate_dev < 1e-6;
    notes.push(format!("rate vs finite differences {rate_dev:.1e}"));

    println!(
        "criterion 9: {} - structural invariants: {}",
        verdict(pass),
        notes.join("; ")
    );
    assert!(pass);
}

/// Qualitative curve-shape checks that are not tied to quoted numbers:
/// populations keep oscillating once a clamped sweep freezes, and the
/// oscillation amplitude shrinks as the transfer becomes more adiabatic.
#[test]
fn clamped_tails_oscillate_and_settle_with_duration() {
    // Oscillation presence: linear sweep frozen shortly after its crossing.
    let clamped = Scenario {
        n_out: 801,
        ..scenario(
            ModelKind::ThreeLevel,
            100.0,
            SweepProtocol::linear(10.0)
                .clamp_after(LINEAR_TAU_STOP)
                .unwrap(),
            20.0,
        )
    };
    let out = run_scenario(&clamped).unwrap();
    let pops = out.measured.populations("T").unwrap();
    let taus = out.measured.times();
    let tail: Vec<Real> = taus
        .iter()
        .zip(&pops)
        .filter(|(t, _)| **t >= 0.35 * 20.0)
        .map(|(_, p)| *p)
        .collect();
    let swing = tail.iter().cloned().fold(0.0_f64, Real::max)
        - tail.iter().cloned().fold(1.0_f64, Real::min);
    assert!(
        swing > 1e-3,
        "frozen tail should keep beating, swing = {swing:.2e}"
    );

    // Amplitude decreasing with duration: the tail beat scales with the
    // branch split sqrt(P (1 - P)), so once the crossing is passed more than
    // half adiabatically (here beyond roughly 165 ns) it shrinks as the
    // duration grows. The window covers many beat periods, which makes the
    // swing insensitive to the sampling phase.
    let tail_swing = |t_f: Real| {
        let s = Scenario {
            n_out: 801,
            ..scenario(
                ModelKind::ThreeLevel,
                30.0,
                SweepProtocol::arctan(10.0, 20.0, 19.2),
                t_f,
            )
        };
        let out = run_scenario(&s).unwrap();
        let pops = out.measured.populations("T").unwrap();
        let taus = out.measured.times();
        let tail: Vec<Real> = taus
            .iter()
            .zip(&pops)
            .filter(|(t, _)| **t >= 0.7 * t_f)
            .map(|(_, p)| *p)
            .collect();
        tail.iter().cloned().fold(0.0_f64, Real::max)
            - tail.iter().cloned().fold(1.0_f64, Real::min)
    };
    let fast = tail_swing(300.0);
    let slow = tail_swing(900.0);
    assert!(
        slow < fast,
        "tail beat should shrink with duration: {slow:.3} at 900 ns vs {fast:.3} at 300 ns"
    );
}
