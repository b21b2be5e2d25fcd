//! Stabilizer tableau simulator with phase-exact rows.
//!
//! State is tracked as `n` stabilizer rows plus `n` destabilizer rows, each a
//! signed [`PauliString`]. Beyond the usual Clifford conjugation this
//! simulator supports:
//!
//! - measurement of an arbitrary Hermitian Pauli product in one shot
//!   ([`Tableau::measure_pauli`]), not just single-qubit Z;
//! - group membership with sign ([`Tableau::contains_stabilizer`]);
//! - tracked *frames*: Pauli operators (typically logical representatives)
//!   that are conjugated through every gate and re-anchored through every
//!   measurement so they remain valid on the post-measurement state.
//!
//! Randomness: outcomes of non-deterministic measurements come from a seeded
//! [`ChaCha12Rng`]. Exactly one draw is consumed per random measurement and
//! none per deterministic one, so two runs that face the same sequence of
//! random/deterministic branch decisions consume identical streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::pauli::{PauliLetter, PauliString};

/// One-step Clifford operations understood by the tableau.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
    Swap(usize, usize),
}

impl CliffordGate {
    fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            CliffordGate::H(a)
            | CliffordGate::S(a)
            | CliffordGate::X(a)
            | CliffordGate::Y(a)
            | CliffordGate::Z(a) => (a, None),
            CliffordGate::Cnot(a, b) | CliffordGate::Cz(a, b) | CliffordGate::Swap(a, b) => {
                (a, Some(b))
            }
        }
    }
}

/// Handle to a tracked frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FrameId(usize);

/// Phase-exact stabilizer tableau over `n` qubits with tracked frames.
#[derive(Debug, Clone)]
pub struct Tableau {
    n: usize,
    stab: Vec<PauliString>,
    destab: Vec<PauliString>,
    frames: Vec<PauliString>,
    rng: ChaCha12Rng,
    rng_draws: u64,
}

/// Fresh all-|0⟩ tableau (free-function spelling of [`Tableau::new`]).
pub fn tableau_new(n: usize, seed: u64) -> Tableau {
    Tableau::new(n, seed)
}

impl Tableau {
    /// The |0…0⟩ state: stabilizers Z_i, destabilizers X_i.
    pub fn new(n: usize, seed: u64) -> Tableau {
        let stab = (0..n)
            .map(|i| PauliString::single(n, i, PauliLetter::Z).expect("in range"))
            .collect();
        let destab = (0..n)
            .map(|i| PauliString::single(n, i, PauliLetter::X).expect("in range"))
            .collect();
        Tableau {
            n,
            stab,
            destab,
            frames: Vec::new(),
            rng: ChaCha12Rng::seed_from_u64(seed),
            rng_draws: 0,
        }
    }

    /// Qubit count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of random draws consumed so far.
    pub fn rng_draws(&self) -> u64 {
        self.rng_draws
    }

    /// Stabilizer rows (a generating set for the state's group).
    pub fn stabilizer_rows(&self) -> &[PauliString] {
        &self.stab
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::IndexOutOfRange(format!("qubit {q} of {}", self.n)));
        }
        Ok(())
    }

    /// Apply one Clifford gate by conjugating every stabilizer, destabilizer,
    /// and frame row.
    pub fn apply_clifford(&mut self, gate: CliffordGate) -> Result<()> {
        let (a, b) = gate.qubits();
        self.check_qubit(a)?;
        if let Some(b) = b {
            self.check_qubit(b)?;
            if a == b {
                return Err(Error::InvalidState(format!("two-qubit gate on duplicate qubit {a}")));
            }
        }
        for row in self
            .stab
            .iter_mut()
            .chain(self.destab.iter_mut())
            .chain(self.frames.iter_mut())
        {
            conjugate_row(row, gate);
        }
        Ok(())
    }

    /// Apply a Pauli product as a unitary: rows anticommuting with it flip
    /// sign, letters are untouched.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        if p.n() != self.n {
            return Err(Error::Dimension(format!("{} vs {} qubits", p.n(), self.n)));
        }
        for row in self
            .stab
            .iter_mut()
            .chain(self.destab.iter_mut())
            .chain(self.frames.iter_mut())
        {
            if anticommutes(row, p) {
                *row = row.negated();
            }
        }
        Ok(())
    }

    /// Measure the Hermitian Pauli product `p`, collapse, and return ±1.
    ///
    /// Deterministic outcomes are recognized (no randomness consumed); a
    /// non-deterministic measurement consumes exactly one draw. After the
    /// call the state is stabilized by `outcome · p`.
    pub fn measure_pauli(&mut self, p: &PauliString) -> Result<i8> {
        self.measure_impl(p, None)
    }

    /// Measure `p` while replaying a recorded outcome: the collapse is the
    /// same as [`Tableau::measure_pauli`], but a non-deterministic
    /// measurement takes the `outcome` branch instead of drawing randomness,
    /// and a deterministic one must already agree with `outcome` (an error
    /// reports the contradiction). Consumes no randomness; used to replay an
    /// outcome stream recorded by another simulation of the same circuit.
    pub fn measure_pauli_forced(&mut self, p: &PauliString, outcome: i8) -> Result<i8> {
        if outcome != 1 && outcome != -1 {
            return Err(Error::InvalidState(format!(
                "forced outcome must be ±1, got {outcome}"
            )));
        }
        self.measure_impl(p, Some(outcome))
    }

    fn measure_impl(&mut self, p: &PauliString, forced: Option<i8>) -> Result<i8> {
        if p.n() != self.n {
            return Err(Error::Dimension(format!("{} vs {} qubits", p.n(), self.n)));
        }
        let sgn = p
            .phase()
            .real_sign()
            .ok_or_else(|| Error::InvalidState(format!("measured operator {p} is not Hermitian")))?;
        let q = p.unsigned();

        let pivot = self.stab.iter().position(|row| anticommutes(row, &q));
        match pivot {
            Some(pivot) => {
                // Random branch: one draw (or the replayed record) decides
                // the outcome of measuring q.
                let o: i8 = match forced {
                    None => {
                        let v: i8 = if self.rng.gen::<bool>() { 1 } else { -1 };
                        self.rng_draws += 1;
                        v
                    }
                    Some(target) => target * sgn,
                };
                let old_pivot = self.stab[pivot].clone();
                for i in 0..self.n {
                    if i != pivot && anticommutes(&self.stab[i], &q) {
                        self.stab[i] = self.stab[i].mul(&old_pivot).expect("same n");
                    }
                    if i != pivot && anticommutes(&self.destab[i], &q) {
                        self.destab[i] = self.destab[i].mul(&old_pivot).expect("same n");
                    }
                }
                for f in &mut self.frames {
                    if anticommutes(f, &q) {
                        *f = f.mul(&old_pivot).expect("same n");
                    }
                }
                self.destab[pivot] = old_pivot;
                self.stab[pivot] = if o == 1 { q } else { q.negated() };
                Ok(o * sgn)
            }
            None => {
                // Deterministic branch: q (up to sign) is already in the
                // group; reconstruct it to read the sign off.
                let o = self
                    .deterministic_sign(&q)
                    .expect("operator commuting with a full-rank group lies in it");
                let value = o * sgn;
                if let Some(target) = forced {
                    if value != target {
                        return Err(Error::InvalidState(format!(
                            "replayed outcome {target} contradicts the deterministic value {value}"
                        )));
                    }
                }
                Ok(value)
            }
        }
    }

    /// Sign with which the unsigned operator `q` sits in the stabilizer
    /// group, assuming it commutes with every row. `None` if its letters are
    /// not reproduced (impossible for a full-rank tableau; kept defensive).
    fn deterministic_sign(&self, q: &PauliString) -> Option<i8> {
        let mut acc = PauliString::identity(self.n);
        for i in 0..self.n {
            if anticommutes(&self.destab[i], q) {
                acc = acc.mul(&self.stab[i]).expect("same n");
            }
        }
        if !acc.same_letters(q) {
            debug_assert!(false, "letters mismatch in deterministic reconstruction");
            return None;
        }
        acc.phase().real_sign()
    }

    /// Whether ±`p` lies in the stabilizer group: `Some(1)` iff `p` does,
    /// `Some(-1)` iff `-p` does, `None` if neither (expectation zero).
    pub fn contains_stabilizer(&self, p: &PauliString) -> Result<Option<i8>> {
        if p.n() != self.n {
            return Err(Error::Dimension(format!("{} vs {} qubits", p.n(), self.n)));
        }
        let sgn = p
            .phase()
            .real_sign()
            .ok_or_else(|| Error::InvalidState(format!("operator {p} is not Hermitian")))?;
        let q = p.unsigned();
        if self.stab.iter().any(|row| anticommutes(row, &q)) {
            return Ok(None);
        }
        Ok(self.deterministic_sign(&q).map(|o| o * sgn))
    }

    /// Measure Z on each listed qubit and flip any −1 outcome back with X,
    /// leaving those qubits in |0⟩ (entanglement with the rest is severed).
    pub fn reset_qubits(&mut self, qubits: &[usize]) -> Result<()> {
        for &q in qubits {
            self.check_qubit(q)?;
        }
        for &q in qubits {
            let z = PauliString::single(self.n, q, PauliLetter::Z)?;
            if self.measure_pauli(&z)? == -1 {
                self.apply_clifford(CliffordGate::X(q))?;
            }
        }
        Ok(())
    }

    /// Track a new frame; it is conjugated through all later gates and
    /// measurements.
    pub fn add_frame(&mut self, p: PauliString) -> Result<FrameId> {
        if p.n() != self.n {
            return Err(Error::Dimension(format!("{} vs {} qubits", p.n(), self.n)));
        }
        self.frames.push(p);
        Ok(FrameId(self.frames.len() - 1))
    }

    /// Current value of a frame.
    pub fn frame(&self, id: FrameId) -> &PauliString {
        &self.frames[id.0]
    }

    /// Replace a frame wholesale.
    pub fn set_frame(&mut self, id: FrameId, p: PauliString) -> Result<()> {
        if p.n() != self.n {
            return Err(Error::Dimension(format!("{} vs {} qubits", p.n(), self.n)));
        }
        self.frames[id.0] = p;
        Ok(())
    }

    /// Multiply a frame by `p` (byproduct accumulation).
    pub fn multiply_frame(&mut self, id: FrameId, p: &PauliString) -> Result<()> {
        self.frames[id.0] = self.frames[id.0].mul(p)?;
        Ok(())
    }

    /// Structural self-checks: Hermitian rows, abelian stabilizer set, and
    /// the symplectic pairing destab[i] ↔ stab[i].
    pub fn check_invariants(&self) -> Result<()> {
        for row in self.stab.iter().chain(self.destab.iter()) {
            if row.phase().real_sign().is_none() {
                return Err(Error::InvalidState(format!("non-Hermitian row {row}")));
            }
        }
        for i in 0..self.n {
            for j in 0..self.n {
                if anticommutes(&self.stab[i], &self.stab[j]) {
                    return Err(Error::InvalidState(format!("stabilizer rows {i},{j} anticommute")));
                }
                if anticommutes(&self.destab[i], &self.destab[j]) {
                    return Err(Error::InvalidState(format!("destabilizer rows {i},{j} anticommute")));
                }
                let anti = anticommutes(&self.destab[i], &self.stab[j]);
                if anti != (i == j) {
                    return Err(Error::InvalidState(format!(
                        "destab[{i}] vs stab[{j}]: wrong pairing"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Same-dimension anticommutation check (rows always match the tableau).
fn anticommutes(a: &PauliString, b: &PauliString) -> bool {
    !a.commutes(b).expect("tableau rows share one dimension")
}

/// Conjugate one Pauli row in place by a Clifford gate.
fn conjugate_row(row: &mut PauliString, gate: CliffordGate) {
    // Letters are read before any write so two-qubit rules see the originals.
    match gate {
        CliffordGate::X(a) => {
            // Z → −Z, Y → −Y.
            if matches!(row.letter(a), PauliLetter::Z | PauliLetter::Y) {
                row.mul_phase_exponent(2);
            }
        }
        CliffordGate::Z(a) => {
            // X → −X, Y → −Y.
            if matches!(row.letter(a), PauliLetter::X | PauliLetter::Y) {
                row.mul_phase_exponent(2);
            }
        }
        CliffordGate::Y(a) => {
            // X → −X, Z → −Z.
            if matches!(row.letter(a), PauliLetter::X | PauliLetter::Z) {
                row.mul_phase_exponent(2);
            }
        }
        CliffordGate::H(a) => {
            // X ↔ Z, Y → −Y.
            match row.letter(a) {
                PauliLetter::X => row.set_letter(a, PauliLetter::Z),
                PauliLetter::Z => row.set_letter(a, PauliLetter::X),
                PauliLetter::Y => row.mul_phase_exponent(2),
                PauliLetter::I => {}
            }
        }
        CliffordGate::S(a) => {
            // X → Y, Y → −X, Z → Z.
            match row.letter(a) {
                PauliLetter::X => row.set_letter(a, PauliLetter::Y),
                PauliLetter::Y => {
                    row.set_letter(a, PauliLetter::X);
                    row.mul_phase_exponent(2);
                }
                _ => {}
            }
        }
        CliffordGate::Cnot(c, t) => {
            // X_c → X_c X_t, Z_t → Z_c Z_t; sign flips exactly for the
            // combinations where both a propagating X_c and Z_t meet with
            // matching partners (e.g. Y_c Y_t → −X_c Z_t).
            let (xc, zc) = split_letter(row.letter(c));
            let (xt, zt) = split_letter(row.letter(t));
            if xc && zt && (xt == zc) {
                row.mul_phase_exponent(2);
            }
            row.set_letter(c, join_letter(xc, zc ^ zt));
            row.set_letter(t, join_letter(xt ^ xc, zt));
        }
        CliffordGate::Cz(a, b) => {
            // X_a → X_a Z_b, X_b → Z_a X_b; sign flips when both X parts are
            // present and exactly one Z partner is.
            let (xa, za) = split_letter(row.letter(a));
            let (xb, zb) = split_letter(row.letter(b));
            if xa && xb && (za != zb) {
                row.mul_phase_exponent(2);
            }
            row.set_letter(a, join_letter(xa, za ^ xb));
            row.set_letter(b, join_letter(xb, zb ^ xa));
        }
        CliffordGate::Swap(a, b) => {
            let la = row.letter(a);
            let lb = row.letter(b);
            row.set_letter(a, lb);
            row.set_letter(b, la);
        }
    }
}

fn split_letter(l: PauliLetter) -> (bool, bool) {
    match l {
        PauliLetter::I => (false, false),
        PauliLetter::X => (true, false),
        PauliLetter::Z => (false, true),
        PauliLetter::Y => (true, true),
    }
}

fn join_letter(x: bool, z: bool) -> PauliLetter {
    match (x, z) {
        (false, false) => PauliLetter::I,
        (true, false) => PauliLetter::X,
        (false, true) => PauliLetter::Z,
        (true, true) => PauliLetter::Y,
    }
}
