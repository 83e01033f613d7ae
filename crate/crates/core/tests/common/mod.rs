//! Independent reference implementations used by the integration tests.
//!
//! Nothing here calls into the channel or heralding code; the oracles work
//! directly on ket amplitudes or on dense 16×16 matrices.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type M = DMatrix<Complex64>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn max_abs(a: &M, b: &M) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Random mixed state G·G†/tr on `n` levels.
pub fn random_state(rng: &mut ChaCha8Rng, n: usize) -> M {
    let g = M::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

/// Single-click heralding of two lossless conversion-scheme nodes by
/// enumerating every photon-number outcome of the two detectors.
///
/// Each node holds √(1−P)|1⟩_μ|0⟩_w + √P|0⟩_μ|1⟩_w. Returns (F, p_success)
/// with F measured against (|01⟩ − |10⟩)/√2 on (μ_A, μ_B).
pub fn herald_oracle(p_e: f64) -> (f64, f64) {
    let node = [
        // (μ, w, amplitude)
        (1usize, 0usize, (1.0 - p_e).sqrt()),
        (0, 1, p_e.sqrt()),
    ];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    // Output kets (n_c, n_d, amp) of the balanced beamsplitter for inputs
    // of at most one photon per port.
    let bs = |na: usize, nb: usize| -> Vec<(usize, usize, f64)> {
        match (na, nb) {
            (0, 0) => vec![(0, 0, 1.0)],
            (1, 0) => vec![(1, 0, s), (0, 1, s)],
            (0, 1) => vec![(1, 0, -s), (0, 1, s)],
            (1, 1) => vec![(2, 0, -s), (0, 2, s)],
            _ => unreachable!(),
        }
    };
    // Unnormalized memory kets indexed by detector outcome.
    let mut branches: std::collections::BTreeMap<(usize, usize), [f64; 4]> = Default::default();
    for &(ma, wa, xa) in &node {
        for &(mb, wb, xb) in &node {
            for (nc, nd, y) in bs(wa, wb) {
                let v = branches.entry((nc, nd)).or_insert([0.0; 4]);
                v[2 * ma + mb] += xa * xb * y;
            }
        }
    }
    let psi = [0.0, s, -s, 0.0];
    let (mut p, mut overlap) = (0.0, 0.0);
    for ((nc, nd), mut v) in branches {
        let d1 = nc >= 1 && nd == 0;
        let d2 = nc == 0 && nd >= 1;
        if !(d1 || d2) {
            continue;
        }
        if d2 {
            // π phase on memory A.
            v[2] = -v[2];
            v[3] = -v[3];
        }
        p += v.iter().map(|x| x * x).sum::<f64>();
        let o: f64 = v.iter().zip(psi).map(|(a, b)| a * b).sum();
        overlap += o * o;
    }
    (overlap / p, p)
}

fn kron_all(ops: &[M]) -> M {
    ops.iter()
        .skip(1)
        .fold(ops[0].clone(), |acc, m| acc.kronecker(m))
}

pub fn paulis() -> [M; 4] {
    let i = Complex64::i();
    [
        M::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(1.0)]),
        M::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]),
        M::from_row_slice(2, 2, &[c(0.0), -i, i, c(0.0)]),
        M::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]),
    ]
}

/// `op` on qubit `q` of four, identity elsewhere. Qubit 0 is the most
/// significant bit.
fn on_qubit(op: &M, q: usize) -> M {
    let id = M::identity(2, 2);
    let ops: Vec<M> = (0..4)
        .map(|k| if k == q { op.clone() } else { id.clone() })
        .collect();
    kron_all(&ops)
}

fn cnot16(ctrl: usize, tgt: usize) -> M {
    let mut u = M::zeros(16, 16);
    for i in 0..16 {
        let bit = |q: usize| (i >> (3 - q)) & 1;
        let j = if bit(ctrl) == 1 {
            i ^ (1 << (3 - tgt))
        } else {
            i
        };
        u[(j, i)] = c(1.0);
    }
    u
}

fn depolarize16(rho: &M, q1: usize, q2: usize, f_op: f64) -> M {
    let p = 4.0 * (1.0 - f_op) / 3.0;
    let ps = paulis();
    let mut twirl = M::zeros(16, 16);
    for a in &ps {
        for b in &ps {
            let k = on_qubit(a, q1) * on_qubit(b, q2);
            twirl += &k * rho * k.adjoint();
        }
    }
    rho * c(1.0 - p) + twirl * c(p / 16.0)
}

/// Pumping circuit on (stored_A, stored_B, raw_A, raw_B) built from dense
/// 16×16 matrices: CNOT A, depolarize, CNOT B, depolarize, keep ancilla
/// readout (b, b), then Z on stored_A. Returns (normalized state, p).
pub fn pump_oracle(stored: &M, raw: &M, f_a: f64, f_b: f64, keep_bit: usize) -> (Option<M>, f64) {
    let mut rho = stored.kronecker(raw);
    let u = cnot16(0, 2);
    rho = &u * rho * u.adjoint();
    rho = depolarize16(&rho, 0, 2, f_a);
    let u = cnot16(1, 3);
    rho = &u * rho * u.adjoint();
    rho = depolarize16(&rho, 1, 3, f_b);
    let anc = 2 * keep_bit + keep_bit;
    let out = M::from_fn(4, 4, |r, s| rho[(4 * r + anc, 4 * s + anc)]);
    let z = M::from_diagonal(&nalgebra::DVector::from_vec(vec![
        c(1.0),
        c(1.0),
        c(-1.0),
        c(-1.0),
    ]));
    let out = &z * out * &z;
    let p = out.trace().re;
    if p <= 0.0 {
        return (None, 0.0);
    }
    (Some(out / c(p)), p)
}

/// ψ⁻ after independent amplitude damping γ on both qubits, built from the
/// qubit Kraus pair {diag(1, √(1−γ)), √γ|0⟩⟨1|}.
pub fn damped_psi_minus(gamma: f64) -> M {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = nalgebra::DVector::from_vec(vec![c(0.0), c(s), c(-s), c(0.0)]);
    let rho = &psi * psi.adjoint();
    let k0 = M::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c((1.0 - gamma).sqrt())]);
    let k1 = M::from_row_slice(2, 2, &[c(0.0), c(gamma.sqrt()), c(0.0), c(0.0)]);
    let ks = [k0, k1];
    let mut out = M::zeros(4, 4);
    for a in &ks {
        for b in &ks {
            let k = a.kronecker(b);
            out += &k * &rho * k.adjoint();
        }
    }
    out
}

pub fn psi_minus_fidelity(rho: &M) -> f64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = nalgebra::DVector::from_vec(vec![c(0.0), c(s), c(-s), c(0.0)]);
    (psi.adjoint() * rho * &psi)[(0, 0)].re
}
