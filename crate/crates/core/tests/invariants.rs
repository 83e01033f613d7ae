mod common;

use bosonlink_core::device::{
    efficiency_at_cooperativity, emit_conversion, emit_conversion_with, emit_spdc_with,
    ConversionBudget, HeatTarget, SpdcBudget, TransducerParams, FLYING, MEMORY,
};
use bosonlink_core::herald::{herald, herald_with, Detector, LinkParams};
use bosonlink_core::purify::{pump_round, KeepOutcome};
use bosonlink_core::qstate::channel::*;
use bosonlink_core::qstate::{
    fidelity_psi_minus, log_negativity, DensityMatrix, KrausChannel, ModeRole, ModeSpace,
};
use bosonlink_core::register::{
    idle_channel, measure_z_pair, noisy_cnot, MemoryKind, MemoryParams,
};
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn state(seed: u64, dims: Vec<usize>) -> DensityMatrix {
    let n = dims.iter().product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let roles = vec![ModeRole::Microwave; dims.len()];
    DensityMatrix::from_matrix(
        ModeSpace::new(dims, roles).unwrap(),
        random_state(&mut rng, n),
    )
    .unwrap()
}

fn tp_channel(which: usize, x: f64, dim: usize) -> KrausChannel {
    match which {
        0 => loss_channel(x, dim).unwrap(),
        1 => dephasing(x, dim).unwrap(),
        2 => thermal_noise_channel(0.01 * x, dim.max(thermal_min_dim(0.01 * x))).unwrap(),
        3 => depolarizing_1q(0.5 + 0.5 * x, dim).unwrap(),
        4 => bit_flip(x, dim).unwrap(),
        _ => bin_to_qubit(dim).unwrap(),
    }
}

fn lossless_node(p_e: f64) -> bosonlink_core::EmissionState {
    let budget = ConversionBudget {
        eta_udt: 1.0,
        eta_out: 1.0,
        n_th: 0.0,
        target: HeatTarget::Acoustic,
    };
    emit_conversion_with(p_e, &budget, 3).unwrap()
}

fn swap_pair(rho: &DensityMatrix) -> DensityMatrix {
    rho.permute(&[1, 0]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn channels_preserve_physicality(seed in 0u64..1000, which in 0usize..6, x in 0.0..1.0f64, dim in 2usize..6) {
        let ch = tp_channel(which, x, dim);
        prop_assert!(ch.completeness_defect() <= 1e-10);
        let d = ch.dims()[0];
        let rho = state(seed, vec![d, 2]);
        let out = rho.apply(&ch, &[0]).unwrap();
        prop_assert!(out.hermiticity_error() <= 1e-9);
        prop_assert!(out.min_eigenvalue() >= -1e-9);
        prop_assert!((out.trace() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn loss_composes_on_any_truncation(e1 in 0.0..=1.0f64, e2 in 0.0..=1.0f64, dim in 2usize..9) {
        let composed = loss_channel(e1, dim).unwrap().then(&loss_channel(e2, dim).unwrap()).unwrap();
        let direct = loss_channel(e1 * e2, dim).unwrap();
        prop_assert!(max_abs(&composed.superoperator(), &direct.superoperator()) <= 1e-12);
    }

    #[test]
    fn metrics_ignore_joint_relabeling(seed in 0u64..1000) {
        let rho = state(seed, vec![2, 2]);
        let x = paulis()[1].clone();
        let flipped = rho.apply_unitary(&x.kronecker(&x), &[0, 1]).unwrap();
        let (f, g) = (fidelity_psi_minus(&rho).unwrap(), fidelity_psi_minus(&flipped).unwrap());
        prop_assert!((f - g).abs() <= 1e-12);
        let (e, h) = (log_negativity(&rho, &[0]).unwrap(), log_negativity(&flipped, &[0]).unwrap());
        prop_assert!((e - h).abs() <= 1e-10);
    }

    #[test]
    fn partial_trace_undoes_tensor(seed in 0u64..1000, da in 2usize..4, db in 2usize..4) {
        let a = state(seed, vec![da, 2]);
        let b = state(seed + 1, vec![db]);
        let back = a.tensor(&b).unwrap().partial_trace(&[0, 1]).unwrap();
        prop_assert!(back.max_abs_diff(&a) <= 1e-12);
    }

    #[test]
    fn lossless_conversion_is_pure(p_e in 0.0..=1.0f64) {
        let s = lossless_node(p_e);
        let top = s.rho.eigenvalues().into_iter().fold(f64::MIN, f64::max);
        prop_assert!((top - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn memory_marginal_ignores_optical_loss(p_e in 0.01..0.99f64, eta_opt in 0.05..=1.0f64, p in 1.0..500.0f64) {
        let base = TransducerParams::default();
        let other = TransducerParams { eta_opt, ..base.clone() };
        let a = emit_conversion(p_e, p, &base, 3).unwrap().rho.partial_trace(&[MEMORY]).unwrap();
        let b = emit_conversion(p_e, p, &other, 3).unwrap().rho.partial_trace(&[MEMORY]).unwrap();
        prop_assert!(a.max_abs_diff(&b) <= 1e-12);
    }

    #[test]
    fn lossless_spdc_marginals_are_equal_thermal(x in 0.0..0.15f64) {
        let budget = SpdcBudget {
            p_e: x,
            eta_memory_arm: 1.0,
            eta_optical_arm: 1.0,
            n_th: 0.0,
            target: HeatTarget::Acoustic,
        };
        let s = emit_spdc_with(&budget, 4).unwrap();
        let m = s.rho.partial_trace(&[MEMORY]).unwrap();
        let w = s.rho.partial_trace(&[FLYING]).unwrap();
        prop_assert!(m.max_abs_diff(&w) <= 1e-12);
        // Geometric populations with ratio x; off-diagonals vanish.
        for n in 0..3 {
            let ratio = m.population(0, n + 1) / m.population(0, n);
            prop_assert!((ratio - x).abs() <= 1e-10);
        }
        prop_assert!(offdiag_max(m.matrix()) <= 1e-14);
    }

    #[test]
    fn conversion_efficiency_peaks_at_unit_cooperativity(c1 in 0.01..=1.0f64, c2 in 0.01..=1.0f64) {
        let p = TransducerParams::default();
        let (lo, hi) = (c1.min(c2), c1.max(c2));
        let at_one = efficiency_at_cooperativity(1.0, &p);
        prop_assert!(efficiency_at_cooperativity(lo, &p) <= efficiency_at_cooperativity(hi, &p) + 1e-15);
        prop_assert!(efficiency_at_cooperativity(1.0 / lo, &p) <= efficiency_at_cooperativity(1.0 / hi, &p) + 1e-15);
        prop_assert!(efficiency_at_cooperativity(hi, &p) <= at_one + 1e-15);
        prop_assert!(efficiency_at_cooperativity(1.0 / lo, &p) <= at_one + 1e-15);
    }

    #[test]
    fn success_never_grows_with_distance(p_e in 0.02..0.6f64, l in 0.0..30.0f64, extra in 0.0..30.0f64) {
        let s = emit_conversion(p_e, 20.0, &TransducerParams::default(), 3).unwrap();
        let link = LinkParams::default();
        let near = herald(&s, &s, &link.with_distance(l)).unwrap().p_success;
        let far = herald(&s, &s, &link.with_distance(l + extra)).unwrap().p_success;
        prop_assert!(far <= near + 1e-15);
    }

    #[test]
    fn herald_is_node_symmetric(pa in 0.02..0.6f64, pb in 0.02..0.6f64, l in 0.0..10.0f64) {
        let p = TransducerParams::default();
        let a = emit_conversion(pa, 10.0, &p, 3).unwrap();
        let b = emit_conversion(pb, 40.0, &p, 3).unwrap();
        let link = LinkParams::default().with_distance(l);
        let ab = herald(&a, &b, &link).unwrap();
        let ba = herald(&b, &a, &link).unwrap();
        prop_assert!((ab.p_success - ba.p_success).abs() <= 1e-14);
        let swapped = swap_pair(ba.state().unwrap());
        // Node exchange maps ψ⁻ to −ψ⁻, so states agree exactly.
        prop_assert!(ab.state().unwrap().max_abs_diff(&swapped) <= 1e-12);
    }

    #[test]
    fn symmetric_inputs_split_evenly(p_e in 0.02..0.9f64, l in 0.0..10.0f64) {
        let s = emit_conversion(p_e, 20.0, &TransducerParams::default(), 3).unwrap();
        let out = herald(&s, &s, &LinkParams::default().with_distance(l)).unwrap();
        prop_assert!((out.p_d1 - out.p_d2).abs() <= 1e-14);
    }

    #[test]
    fn number_resolution_removes_double_emission(p_e in 0.02..0.9f64) {
        let s = lossless_node(p_e);
        let link = LinkParams { distance_km: 0.0, eta_qe: 1.0, ..LinkParams::default() };
        let threshold = herald(&s, &s, &link).unwrap();
        let resolved = herald_with(&s, &s, &link, Detector::NumberResolving).unwrap();
        prop_assert!(resolved.state().unwrap().probability(&[0, 0]) <= 1e-14);
        prop_assert!(resolved.fidelity().unwrap() > threshold.fidelity().unwrap());
    }

    #[test]
    fn idle_is_a_semigroup(t1 in 0.0..1e-3f64, t2 in 0.0..1e-3f64, t1_ms in 0.05..5.0f64, tphi in 0.05..5.0f64) {
        let mem = MemoryParams { t1_ms, t_phi_ms: tphi, ..MemoryKind::Transmon.preset() };
        let composed = idle_channel(t1, &mem, 4).unwrap().then(&idle_channel(t2, &mem, 4).unwrap()).unwrap();
        let direct = idle_channel(t1 + t2, &mem, 4).unwrap();
        prop_assert!(max_abs(&composed.superoperator(), &direct.superoperator()) <= 1e-12);
    }

    #[test]
    fn ideal_cnot_is_an_involution(seed in 0u64..1000) {
        let rho = state(seed, vec![2, 2, 2]);
        let mem = MemoryParams::ideal(MemoryKind::Cavity);
        let twice = noisy_cnot(&noisy_cnot(&rho, 2, 0, &mem).unwrap(), 2, 0, &mem).unwrap();
        prop_assert!(twice.max_abs_diff(&rho) <= 1e-12);
    }

    #[test]
    fn readout_ignores_dephasing(seed in 0u64..1000, lambda in 0.0..=1.0f64, flip in 0.0..0.2f64) {
        let rho = state(seed, vec![3, 2]);
        let dephased = rho.apply(&dephasing(lambda, 3).unwrap(), &[0]).unwrap();
        let a = measure_z_pair(&rho, 0, 1, flip).unwrap();
        let b = measure_z_pair(&dephased, 0, 1, flip).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x.probability - y.probability).abs() <= 1e-12);
        }
    }

    #[test]
    fn pump_matches_brute_force(seed in 0u64..1000, f_a in 0.8..=1.0f64, f_b in 0.8..=1.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let stored = random_state(&mut rng, 4);
        let raw = random_state(&mut rng, 4);
        let wrap = |m: &M| DensityMatrix::from_matrix(ModeSpace::qubits(2), m.clone()).unwrap();
        let mem = |f_op| MemoryParams { f_op, ..MemoryParams::ideal(MemoryKind::Cavity) };
        let (out, p) = pump_round(&wrap(&stored), &wrap(&raw), &mem(f_a), &mem(f_b), KeepOutcome::OneOne).unwrap();
        let (expect, p_ref) = pump_oracle(&stored, &raw, f_a, f_b, 1);
        prop_assert!((p - p_ref).abs() <= 1e-10);
        prop_assert!(max_abs(out.unwrap().matrix(), &expect.unwrap()) <= 1e-10);
    }
}

fn offdiag_max(m: &M) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    worst
}

#[test]
fn psi_minus_is_a_pump_fixed_point() {
    let mem = MemoryParams::ideal(MemoryKind::Cavity);
    let psi = DensityMatrix::psi_minus();
    let (out, p) = pump_round(&psi, &psi, &mem, &mem, KeepOutcome::OneOne).unwrap();
    assert!((fidelity_psi_minus(&out.unwrap()).unwrap() - 1.0).abs() <= 1e-12);
    assert!((p - 0.5).abs() <= 1e-12);
}
