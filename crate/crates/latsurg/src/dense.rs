//! Dense statevector / unitary oracle for desk-scale verification (≤ 20 qubits).
//!
//! This module is the independent reference the rest of the toolkit is checked
//! against: canonical gate matrices, closed-form Pauli rotations, state
//! application, global-phase-insensitive comparison, and seeded projective
//! Pauli measurement.
//!
//! Qubit order convention: qubit 0 is the most significant bit of a basis
//! index, so the basis state |q0 q1 … q{n−1}⟩ has index q0·2^{n−1} + … .

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::gates::{GateIR, GateKind, RotationTerm};
use crate::pauli::{PauliLetter, PauliString};

/// Hard cap on oracle size: 2^20 amplitudes.
pub const MAX_QUBITS: usize = 20;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const CI: Complex64 = Complex64::new(0.0, 1.0);

/// A normalized pure state on `n ≤ 20` qubits.
#[derive(Debug, Clone)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    /// The all-|0⟩ state.
    pub fn zero(n: usize) -> Result<DenseState> {
        if n > MAX_QUBITS {
            return Err(Error::Capacity(format!("{n} qubits exceeds the {MAX_QUBITS}-qubit oracle cap")));
        }
        let mut amps = vec![C0; 1 << n];
        amps[0] = C1;
        Ok(DenseState { n, amps })
    }

    /// A state from explicit amplitudes (normalized on entry).
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<DenseState> {
        if n > MAX_QUBITS {
            return Err(Error::Capacity(format!("{n} qubits exceeds the {MAX_QUBITS}-qubit oracle cap")));
        }
        if amps.len() != 1 << n {
            return Err(Error::Dimension(format!("{} amplitudes for {n} qubits", amps.len())));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::InvalidState("zero-norm state".into()));
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(DenseState { n, amps })
    }

    /// Qubit count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Amplitude slice, basis-index order.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &DenseState) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::Dimension(format!("{} vs {} qubits", self.n, other.n)));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Squared norm (should stay 1 within 1e−12).
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn renormalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        for a in &mut self.amps {
            *a /= norm;
        }
    }

    /// Apply a Pauli product in place (phase included).
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        if p.n() != self.n {
            return Err(Error::Dimension(format!("{} vs {} qubits", p.n(), self.n)));
        }
        let mut flip: usize = 0; // XOR mask over basis indices
        let mut z_mask: usize = 0; // bits contributing (−1)^{bit}
        let mut phase = match p.phase().exponent() {
            0 => C1,
            1 => CI,
            2 => -C1,
            _ => -CI,
        };
        for q in 0..self.n {
            let bit = 1usize << (self.n - 1 - q);
            match p.letter(q) {
                PauliLetter::I => {}
                PauliLetter::X => flip |= bit,
                PauliLetter::Z => z_mask |= bit,
                PauliLetter::Y => {
                    // Y = i·X·Z applied to basis states: Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩.
                    flip |= bit;
                    z_mask |= bit;
                    phase *= CI;
                }
            }
        }
        let mut out = vec![C0; self.amps.len()];
        for (idx, amp) in self.amps.iter().enumerate() {
            if *amp == C0 {
                continue;
            }
            let sign = if (idx & z_mask).count_ones() % 2 == 0 { C1 } else { -C1 };
            out[idx ^ flip] += phase * sign * amp;
        }
        self.amps = out;
        Ok(())
    }

    /// Expectation value ⟨ψ|P|ψ⟩ (real for Hermitian phases ±1).
    pub fn expectation_pauli(&self, p: &PauliString) -> Result<Complex64> {
        let mut copy = self.clone();
        copy.apply_pauli(p)?;
        // Direct sum, bypassing `inner`'s renormalized state requirements.
        Ok(self.amps.iter().zip(&copy.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Collapse onto the `outcome` eigenspace of the Hermitian Pauli `p`
    /// without sampling, returning the pre-collapse probability of that
    /// branch. Fails if the branch has (near-)zero weight.
    pub fn project_pauli(&mut self, p: &PauliString, outcome: i8) -> Result<f64> {
        if p.phase().real_sign().is_none() {
            return Err(Error::InvalidState("projected operator must be Hermitian (phase ±1)".into()));
        }
        let mut pp = self.clone();
        pp.apply_pauli(p)?;
        let s = Complex64::new(outcome as f64, 0.0);
        for (a, b) in self.amps.iter_mut().zip(&pp.amps) {
            *a = (*a + s * b) / 2.0;
        }
        let prob = self.norm_sqr();
        if prob < 1e-12 {
            return Err(Error::InvalidState(format!(
                "projection onto {outcome:+} branch of {p} has zero weight"
            )));
        }
        self.renormalize();
        Ok(prob)
    }

    /// Projectively measure the Hermitian Pauli product `p`: sample ±1 with
    /// the Born rule from `rng`, collapse, and return the outcome. If the
    /// state is already an eigenstate the outcome is deterministic and no
    /// random number is consumed.
    pub fn measure_pauli(&mut self, p: &PauliString, rng: &mut impl Rng) -> Result<i8> {
        if p.phase().real_sign().is_none() {
            return Err(Error::InvalidState("measured operator must be Hermitian (phase ±1)".into()));
        }
        let e = self.expectation_pauli(p)?.re;
        let p_plus = ((1.0 + e) / 2.0).clamp(0.0, 1.0);
        let outcome: i8 = if p_plus > 1.0 - 1e-9 {
            1
        } else if p_plus < 1e-9 {
            -1
        } else if rng.gen::<f64>() < p_plus {
            1
        } else {
            -1
        };
        self.project_pauli(p, outcome)?;
        Ok(outcome)
    }
}

/// A dim × dim unitary matrix, row-major.
#[derive(Debug, Clone)]
pub struct DenseUnitary {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DenseUnitary {
    /// Identity of the given dimension.
    pub fn identity(dim: usize) -> DenseUnitary {
        let mut entries = vec![C0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = C1;
        }
        DenseUnitary { dim, entries }
    }

    /// Build from row-major entries.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<DenseUnitary> {
        if entries.len() != dim * dim {
            return Err(Error::Dimension(format!("{} entries for dim {dim}", entries.len())));
        }
        Ok(DenseUnitary { dim, entries })
    }

    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry at (row, col).
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// Matrix product self·other.
    pub fn matmul(&self, other: &DenseUnitary) -> Result<DenseUnitary> {
        if self.dim != other.dim {
            return Err(Error::Dimension(format!("{} vs {}", self.dim, other.dim)));
        }
        let d = self.dim;
        let mut out = vec![C0; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.entries[i * d + k];
                if a == C0 {
                    continue;
                }
                for j in 0..d {
                    out[i * d + j] += a * other.entries[k * d + j];
                }
            }
        }
        Ok(DenseUnitary { dim: d, entries: out })
    }

    /// Kronecker product self ⊗ other.
    pub fn kron(&self, other: &DenseUnitary) -> DenseUnitary {
        let (da, db) = (self.dim, other.dim);
        let d = da * db;
        let mut out = vec![C0; d * d];
        for i in 0..da {
            for j in 0..da {
                let a = self.entries[i * da + j];
                if a == C0 {
                    continue;
                }
                for k in 0..db {
                    for l in 0..db {
                        out[(i * db + k) * d + (j * db + l)] = a * other.entries[k * db + l];
                    }
                }
            }
        }
        DenseUnitary { dim: d, entries: out }
    }

    /// Max elementwise deviation of U†U from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let mut acc = C0;
                for k in 0..d {
                    acc += self.entries[k * d + i].conj() * self.entries[k * d + j];
                }
                let target = if i == j { C1 } else { C0 };
                worst = worst.max((acc - target).norm());
            }
        }
        worst
    }
}

fn pauli_matrix(letter: PauliLetter) -> DenseUnitary {
    let e = match letter {
        PauliLetter::I => vec![C1, C0, C0, C1],
        PauliLetter::X => vec![C0, C1, C1, C0],
        PauliLetter::Y => vec![C0, -CI, CI, C0],
        PauliLetter::Z => vec![C1, C0, C0, -C1],
    };
    DenseUnitary { dim: 2, entries: e }
}

/// Canonical matrix of a gate on its local qubits (first operand = most
/// significant bit). Rotation gates use the full-angle convention
/// RX(θ) = e^{−iθX}.
pub fn gate_matrix(g: &GateIR) -> Result<DenseUnitary> {
    g.validate()?;
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let m = match g.kind {
        GateKind::X => pauli_matrix(PauliLetter::X),
        GateKind::Y => pauli_matrix(PauliLetter::Y),
        GateKind::Z => pauli_matrix(PauliLetter::Z),
        GateKind::H => DenseUnitary::from_entries(
            2,
            vec![
                Complex64::new(inv_sqrt2, 0.0),
                Complex64::new(inv_sqrt2, 0.0),
                Complex64::new(inv_sqrt2, 0.0),
                Complex64::new(-inv_sqrt2, 0.0),
            ],
        )?,
        GateKind::S => DenseUnitary::from_entries(2, vec![C1, C0, C0, CI])?,
        GateKind::T => DenseUnitary::from_entries(
            2,
            vec![C1, C0, C0, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)],
        )?,
        GateKind::RX | GateKind::RY | GateKind::RZ => {
            let letter = match g.kind {
                GateKind::RX => PauliLetter::X,
                GateKind::RY => PauliLetter::Y,
                _ => PauliLetter::Z,
            };
            let term = RotationTerm::new(
                PauliString::single(1, 0, letter)?,
                g.angle.expect("validated"),
            )?;
            rotation_matrix(&term)?
        }
        GateKind::Cnot => DenseUnitary::from_entries(
            4,
            vec![
                C1, C0, C0, C0, //
                C0, C1, C0, C0, //
                C0, C0, C0, C1, //
                C0, C0, C1, C0,
            ],
        )?,
        GateKind::Cz => DenseUnitary::from_entries(
            4,
            vec![
                C1, C0, C0, C0, //
                C0, C1, C0, C0, //
                C0, C0, C1, C0, //
                C0, C0, C0, -C1,
            ],
        )?,
        GateKind::Cpp => {
            // C(P1,P2) = I − 2·((I−P1)/2 ⊗ (I−P2)/2): apply P2 on the −1
            // eigenspace of P1.
            let (p1, p2) = g.paulis.expect("validated");
            let id2 = DenseUnitary::identity(2);
            let proj1 = sub_scaled(&id2, &pauli_matrix(p1), 0.5);
            let proj2 = sub_scaled(&id2, &pauli_matrix(p2), 0.5);
            let joint = proj1.kron(&proj2);
            let id4 = DenseUnitary::identity(4);
            let mut entries = id4.entries.clone();
            for (e, j) in entries.iter_mut().zip(&joint.entries) {
                *e -= 2.0 * j;
            }
            DenseUnitary { dim: 4, entries }
        }
    };
    Ok(m)
}

/// (a − b)·scale, elementwise.
fn sub_scaled(a: &DenseUnitary, b: &DenseUnitary, scale: f64) -> DenseUnitary {
    let entries = a
        .entries
        .iter()
        .zip(&b.entries)
        .map(|(x, y)| (x - y) * scale)
        .collect();
    DenseUnitary { dim: a.dim, entries }
}

/// Closed-form rotation matrix e^{−iφP} = cos(φ)·I − i·sin(φ)·P.
pub fn rotation_matrix(r: &RotationTerm) -> Result<DenseUnitary> {
    let p = r.pauli();
    if p.n() > 10 {
        return Err(Error::Capacity(format!("{}-qubit rotation exceeds the 10-qubit matrix cap", p.n())));
    }
    let mut pm = DenseUnitary::identity(1);
    for q in 0..p.n() {
        pm = pm.kron(&pauli_matrix(p.letter(q)));
    }
    let phi = r.angle().radians();
    let (c, s) = (phi.cos(), phi.sin());
    let dim = pm.dim;
    let mut entries = vec![C0; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let ident = if i == j { C1 } else { C0 };
            entries[i * dim + j] = c * ident - CI * s * pm.entries[i * dim + j];
        }
    }
    Ok(DenseUnitary { dim, entries })
}

/// True iff u = c·v for some unit complex c, within `tol` max elementwise.
/// The reference c is read off v's largest-magnitude entry.
pub fn equal_up_to_global_phase(u: &DenseUnitary, v: &DenseUnitary, tol: f64) -> Result<bool> {
    Ok(global_phase_distance(u, v)? <= tol)
}

/// Max elementwise |u − c·v| with c from v's largest-magnitude entry.
pub fn global_phase_distance(u: &DenseUnitary, v: &DenseUnitary) -> Result<f64> {
    if u.dim != v.dim {
        return Err(Error::Dimension(format!("{} vs {}", u.dim, v.dim)));
    }
    let mut best = 0usize;
    for (i, e) in v.entries.iter().enumerate() {
        if e.norm() > v.entries[best].norm() {
            best = i;
        }
    }
    if v.entries[best].norm() < 1e-14 {
        return Err(Error::InvalidState("zero reference matrix".into()));
    }
    let c = u.entries[best] / v.entries[best];
    let mut worst = 0.0f64;
    for (a, b) in u.entries.iter().zip(&v.entries) {
        worst = worst.max((a - c * b).norm());
    }
    // c must be (near) unit for a genuine global phase.
    worst = worst.max((c.norm() - 1.0).abs());
    Ok(worst)
}

/// Apply `u` to the listed qubits of `s` (first listed qubit = u's most
/// significant slot). Norm is preserved.
pub fn apply_to_state(s: &mut DenseState, u: &DenseUnitary, qubits: &[usize]) -> Result<()> {
    let k = qubits.len();
    if u.dim != 1 << k {
        return Err(Error::Dimension(format!("{}-dim matrix for {k} qubits", u.dim)));
    }
    for &q in qubits {
        if q >= s.n {
            return Err(Error::IndexOutOfRange(format!("qubit {q} of {}", s.n)));
        }
    }
    let mut seen = qubits.to_vec();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != k {
        return Err(Error::InvalidState("duplicate qubit operand".into()));
    }
    // Bit positions (from MSB order) of each operand in the state index.
    let bits: Vec<usize> = qubits.iter().map(|&q| 1usize << (s.n - 1 - q)).collect();
    let dim = u.dim;
    let rest_mask = {
        let mut m = (1usize << s.n) - 1;
        for &b in &bits {
            m &= !b;
        }
        m
    };
    let mut out = vec![C0; s.amps.len()];
    // Enumerate base indices with all operand bits clear via subset iteration.
    let mut base = 0usize;
    loop {
        // For this assignment of the non-operand bits, gather the local vector.
        let mut local = vec![C0; dim];
        for (row, slot) in local.iter_mut().enumerate() {
            let mut idx = base;
            for (pos, &b) in bits.iter().enumerate() {
                if (row >> (k - 1 - pos)) & 1 == 1 {
                    idx |= b;
                }
            }
            *slot = s.amps[idx];
        }
        for row in 0..dim {
            let mut acc = C0;
            for (col, l) in local.iter().enumerate() {
                acc += u.entries[row * dim + col] * l;
            }
            let mut idx = base;
            for (pos, &b) in bits.iter().enumerate() {
                if (row >> (k - 1 - pos)) & 1 == 1 {
                    idx |= b;
                }
            }
            out[idx] = acc;
        }
        // Next subset of rest_mask.
        if base == rest_mask {
            break;
        }
        base = (base.wrapping_sub(rest_mask)) & rest_mask;
    }
    s.amps = out;
    Ok(())
}

/// |⟨a|b⟩|².
pub fn fidelity(a: &DenseState, b: &DenseState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{decompose_gate, Angle};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn product_of_terms(terms: &[RotationTerm]) -> DenseUnitary {
        let mut acc = DenseUnitary::identity(1 << terms[0].pauli().n());
        for t in terms {
            acc = acc.matmul(&rotation_matrix(t).unwrap()).unwrap();
        }
        acc
    }

    #[test]
    fn basic_gate_matrices() {
        let z = gate_matrix(&GateIR::plain(GateKind::Z, &[0]).unwrap()).unwrap();
        assert_eq!(z.entry(0, 0), C1);
        assert_eq!(z.entry(1, 1), -C1);
        let t = gate_matrix(&GateIR::plain(GateKind::T, &[0]).unwrap()).unwrap();
        assert!((t.entry(1, 1) - Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)).norm() < 1e-15);
    }

    #[test]
    fn rotation_closed_form() {
        // Z_{π/8} equals T up to global phase.
        let term = RotationTerm::new(PauliString::parse("Z").unwrap(), Angle::EIGHTH_PI).unwrap();
        let rz = rotation_matrix(&term).unwrap();
        let t = gate_matrix(&GateIR::plain(GateKind::T, &[0]).unwrap()).unwrap();
        assert!(equal_up_to_global_phase(&rz, &t, 1e-10).unwrap());

        // X_{π/2} = −i·X.
        let term = RotationTerm::new(PauliString::parse("X").unwrap(), Angle::HALF_PI).unwrap();
        let rx = rotation_matrix(&term).unwrap();
        assert!((rx.entry(0, 1) + CI).norm() < 1e-12);
        assert!(rx.entry(0, 0).norm() < 1e-12);

        // Identity axis: pure global phase e^{−iφ}·I.
        let term = RotationTerm::new(PauliString::identity(1), Angle::Radians(0.4)).unwrap();
        let m = rotation_matrix(&term).unwrap();
        assert!((m.entry(0, 0) - Complex64::from_polar(1.0, -0.4)).norm() < 1e-12);
        assert!(m.entry(0, 1).norm() < 1e-15);
    }

    #[test]
    fn rotation_inverse_property() {
        let p = PauliString::parse("XZ").unwrap();
        let plus = RotationTerm::new(p.clone(), Angle::Radians(0.37)).unwrap();
        let minus = RotationTerm::new(p, Angle::Radians(-0.37)).unwrap();
        let prod = rotation_matrix(&plus)
            .unwrap()
            .matmul(&rotation_matrix(&minus).unwrap())
            .unwrap();
        assert!(global_phase_distance(&prod, &DenseUnitary::identity(4)).unwrap() < 1e-12);
        for i in 0..4 {
            for j in 0..4 {
                let target = if i == j { C1 } else { C0 };
                assert!((prod.entry(i, j) - target).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn decomposition_matches_gate_matrices() {
        // The frozen oracle for the whole rotation table: every supported
        // gate's decomposed product must equal its canonical matrix up to
        // global phase within 1e−10.
        let mut gates = vec![
            GateIR::plain(GateKind::X, &[0]).unwrap(),
            GateIR::plain(GateKind::Y, &[0]).unwrap(),
            GateIR::plain(GateKind::Z, &[0]).unwrap(),
            GateIR::rotation(GateKind::RX, 0, Angle::Radians(0.3)).unwrap(),
            GateIR::rotation(GateKind::RY, 0, Angle::Radians(0.7)).unwrap(),
            GateIR::rotation(GateKind::RZ, 0, Angle::Radians(1.1)).unwrap(),
            GateIR::plain(GateKind::H, &[0]).unwrap(),
            GateIR::plain(GateKind::S, &[0]).unwrap(),
            GateIR::plain(GateKind::T, &[0]).unwrap(),
            GateIR::plain(GateKind::Cnot, &[0, 1]).unwrap(),
            GateIR::plain(GateKind::Cz, &[0, 1]).unwrap(),
        ];
        for p1 in [PauliLetter::X, PauliLetter::Y, PauliLetter::Z] {
            for p2 in [PauliLetter::X, PauliLetter::Y, PauliLetter::Z] {
                gates.push(GateIR::controlled_pauli(p1, p2, 0, 1).unwrap());
            }
        }
        for g in &gates {
            let terms = decompose_gate(g).unwrap();
            let product = product_of_terms(&terms);
            let canon = gate_matrix(g).unwrap();
            let dist = global_phase_distance(&product, &canon).unwrap();
            assert!(dist < 1e-10, "{g}: distance {dist:e}");
        }
    }

    #[test]
    fn cpp_special_cases() {
        // C(Z,X) is CNOT and C(Z,Z) is CZ, exactly.
        let czx = gate_matrix(&GateIR::controlled_pauli(PauliLetter::Z, PauliLetter::X, 0, 1).unwrap()).unwrap();
        let cnot = gate_matrix(&GateIR::plain(GateKind::Cnot, &[0, 1]).unwrap()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((czx.entry(i, j) - cnot.entry(i, j)).norm() < 1e-12);
            }
        }
        let czz = gate_matrix(&GateIR::controlled_pauli(PauliLetter::Z, PauliLetter::Z, 0, 1).unwrap()).unwrap();
        let cz = gate_matrix(&GateIR::plain(GateKind::Cz, &[0, 1]).unwrap()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((czz.entry(i, j) - cz.entry(i, j)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn cpp_gates_are_unitary_involutions() {
        for p1 in [PauliLetter::X, PauliLetter::Y, PauliLetter::Z] {
            for p2 in [PauliLetter::X, PauliLetter::Y, PauliLetter::Z] {
                let g = gate_matrix(&GateIR::controlled_pauli(p1, p2, 0, 1).unwrap()).unwrap();
                assert!(g.unitarity_error() < 1e-12);
                let sq = g.matmul(&g).unwrap();
                for i in 0..4 {
                    for j in 0..4 {
                        let target = if i == j { C1 } else { C0 };
                        assert!((sq.entry(i, j) - target).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn apply_basic_states() {
        // |0⟩ under H → (|0⟩+|1⟩)/√2.
        let mut s = DenseState::zero(1).unwrap();
        let h = gate_matrix(&GateIR::plain(GateKind::H, &[0]).unwrap()).unwrap();
        apply_to_state(&mut s, &h, &[0]).unwrap();
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amps[0].re - inv_sqrt2).abs() < 1e-12);
        assert!((s.amps[1].re - inv_sqrt2).abs() < 1e-12);

        // |00⟩ under CNOT stays put; (H⊗I)|00⟩ under CNOT is a Bell pair.
        let mut s = DenseState::zero(2).unwrap();
        let cnot = gate_matrix(&GateIR::plain(GateKind::Cnot, &[0, 1]).unwrap()).unwrap();
        apply_to_state(&mut s, &cnot, &[0, 1]).unwrap();
        assert!((s.amps[0] - C1).norm() < 1e-12);

        let mut s = DenseState::zero(2).unwrap();
        apply_to_state(&mut s, &h, &[0]).unwrap();
        apply_to_state(&mut s, &cnot, &[0, 1]).unwrap();
        assert!((s.amps[0].re - inv_sqrt2).abs() < 1e-12);
        assert!((s.amps[3].re - inv_sqrt2).abs() < 1e-12);
        assert!(s.amps[1].norm() < 1e-12 && s.amps[2].norm() < 1e-12);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn apply_reversed_operand_order() {
        // CNOT with control listed second: |01⟩ (q1=1) → |11⟩.
        let mut s = DenseState::zero(2).unwrap();
        let x = gate_matrix(&GateIR::plain(GateKind::X, &[0]).unwrap()).unwrap();
        apply_to_state(&mut s, &x, &[1]).unwrap();
        let cnot = gate_matrix(&GateIR::plain(GateKind::Cnot, &[0, 1]).unwrap()).unwrap();
        apply_to_state(&mut s, &cnot, &[1, 0]).unwrap();
        assert!((s.amps[0b11] - C1).norm() < 1e-12);
    }

    #[test]
    fn fidelity_cases() {
        let zero = DenseState::zero(1).unwrap();
        let mut one = DenseState::zero(1).unwrap();
        one.apply_pauli(&PauliString::parse("X").unwrap()).unwrap();
        let mut plus = DenseState::zero(1).unwrap();
        let h = gate_matrix(&GateIR::plain(GateKind::H, &[0]).unwrap()).unwrap();
        apply_to_state(&mut plus, &h, &[0]).unwrap();
        assert!((fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&zero, &one).unwrap() < 1e-12);
        assert!((fidelity(&zero, &plus).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn global_phase_comparison() {
        let t = gate_matrix(&GateIR::plain(GateKind::T, &[0]).unwrap()).unwrap();
        let mut rotated = t.clone();
        let c = Complex64::from_polar(1.0, std::f64::consts::PI / 7.0);
        for e in &mut rotated.entries {
            *e *= c;
        }
        assert!(equal_up_to_global_phase(&rotated, &t, 1e-10).unwrap());
        let x = gate_matrix(&GateIR::plain(GateKind::X, &[0]).unwrap()).unwrap();
        let z = gate_matrix(&GateIR::plain(GateKind::Z, &[0]).unwrap()).unwrap();
        assert!(!equal_up_to_global_phase(&x, &z, 1e-10).unwrap());
    }

    #[test]
    fn pauli_application_and_measurement() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        // Measure Z on |0⟩: deterministic +1.
        let mut s = DenseState::zero(1).unwrap();
        let z = PauliString::parse("Z").unwrap();
        assert_eq!(s.measure_pauli(&z, &mut rng).unwrap(), 1);
        // Measure X on |0⟩: random, state collapses to ±X eigenstate.
        let x = PauliString::parse("X").unwrap();
        let out = s.measure_pauli(&x, &mut rng).unwrap();
        let e = s.expectation_pauli(&x).unwrap().re;
        assert!((e - out as f64).abs() < 1e-9);
        // ZZ on a Bell pair: deterministic +1.
        let mut bell = DenseState::zero(2).unwrap();
        let h = gate_matrix(&GateIR::plain(GateKind::H, &[0]).unwrap()).unwrap();
        let cnot = gate_matrix(&GateIR::plain(GateKind::Cnot, &[0, 1]).unwrap()).unwrap();
        apply_to_state(&mut bell, &h, &[0]).unwrap();
        apply_to_state(&mut bell, &cnot, &[0, 1]).unwrap();
        assert_eq!(bell.measure_pauli(&PauliString::parse("ZZ").unwrap(), &mut rng).unwrap(), 1);
    }

    #[test]
    fn capacity_cap() {
        assert!(DenseState::zero(21).is_err());
    }

    #[test]
    fn norm_preservation_random() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = 1 + (rng.gen::<usize>() % 5);
            let amps: Vec<Complex64> =
                (0..1 << n).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
            let mut s = DenseState::from_amplitudes(n, amps).unwrap();
            let q = rng.gen::<usize>() % n;
            let h = gate_matrix(&GateIR::plain(GateKind::H, &[0]).unwrap()).unwrap();
            apply_to_state(&mut s, &h, &[q]).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }
}
