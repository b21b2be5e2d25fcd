//! Exact n-qubit Pauli-product algebra with phase tracking.
//!
//! A [`PauliString`] is a tensor product of single-qubit Pauli letters times a
//! phase from {+1, +i, −1, −i}. Letters are stored as per-qubit X/Z component
//! bits packed into `u64` blocks, and the phase as an exponent k in i^k, so
//! multiplication is exact — no floating point anywhere.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    /// Decode from component bits: (x=0,z=0)→I, (1,0)→X, (0,1)→Z, (1,1)→Y.
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliLetter::I,
            (true, false) => PauliLetter::X,
            (false, true) => PauliLetter::Z,
            (true, true) => PauliLetter::Y,
        }
    }

    /// Component bits (x, z) of this letter.
    pub fn bits(self) -> (bool, bool) {
        match self {
            PauliLetter::I => (false, false),
            PauliLetter::X => (true, false),
            PauliLetter::Z => (false, true),
            PauliLetter::Y => (true, true),
        }
    }

    /// One-character name.
    pub fn symbol(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }

    /// Parse a one-character name.
    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            'I' => Some(PauliLetter::I),
            'X' => Some(PauliLetter::X),
            'Y' => Some(PauliLetter::Y),
            'Z' => Some(PauliLetter::Z),
            _ => None,
        }
    }
}

impl fmt::Display for PauliLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Phase of a Pauli product: i^k with k ∈ {0, 1, 2, 3}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    /// +1 (k = 0)
    PlusOne,
    /// +i (k = 1)
    PlusI,
    /// −1 (k = 2)
    MinusOne,
    /// −i (k = 3)
    MinusI,
}

impl Phase {
    /// The exponent k in i^k.
    pub fn exponent(self) -> u8 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    /// Build from an exponent (taken mod 4).
    pub fn from_exponent(k: u8) -> Self {
        match k % 4 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    /// The sign if the phase is real, else `None`.
    pub fn real_sign(self) -> Option<i8> {
        match self {
            Phase::PlusOne => Some(1),
            Phase::MinusOne => Some(-1),
            _ => None,
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Phase::PlusOne => "+",
            Phase::PlusI => "+i",
            Phase::MinusOne => "-",
            Phase::MinusI => "-i",
        };
        write!(f, "{s}")
    }
}

const BLOCK_BITS: usize = 64;

fn block_count(n: usize) -> usize {
    n.div_ceil(BLOCK_BITS)
}

/// An n-qubit Pauli product with a 4-valued phase.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    /// Per-qubit X-component flags, bit q of block q/64.
    x: Vec<u64>,
    /// Per-qubit Z-component flags.
    z: Vec<u64>,
    /// Phase exponent k in i^k.
    k: u8,
}

impl PauliString {
    /// The identity on `n` qubits with phase +1.
    pub fn identity(n: usize) -> Self {
        PauliString { n, x: vec![0; block_count(n)], z: vec![0; block_count(n)], k: 0 }
    }

    /// A single letter at qubit `q` (phase +1), identity elsewhere.
    pub fn single(n: usize, q: usize, letter: PauliLetter) -> Result<Self> {
        if q >= n {
            return Err(Error::IndexOutOfRange(format!("qubit {q} of {n}")));
        }
        let mut p = PauliString::identity(n);
        p.set_letter(q, letter);
        Ok(p)
    }

    /// A product of letters at the given qubits (phase +1). Repeated qubits
    /// multiply in order.
    pub fn from_support(n: usize, letters: &[(usize, PauliLetter)]) -> Result<Self> {
        let mut p = PauliString::identity(n);
        for &(q, l) in letters {
            let s = PauliString::single(n, q, l)?;
            p = p.mul(&s)?;
        }
        Ok(p)
    }

    /// Parse a string like `"XIZY"`, `"+XIZY"`, `"-XZ"`, `"iY"`, `"-iZZ"`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rest = text;
        let mut k: u8 = 0;
        if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        } else if let Some(r) = rest.strip_prefix('-') {
            k = 2;
            rest = r;
        }
        if let Some(r) = rest.strip_prefix('i') {
            k = (k + 1) % 4;
            rest = r;
        }
        let mut letters = Vec::new();
        for (pos, c) in rest.chars().enumerate() {
            match PauliLetter::from_symbol(c) {
                Some(l) => letters.push(l),
                None => {
                    return Err(Error::InvalidState(format!(
                        "invalid Pauli letter {c:?} at position {pos} in {text:?}"
                    )))
                }
            }
        }
        let mut p = PauliString::identity(letters.len());
        for (q, l) in letters.iter().enumerate() {
            p.set_letter(q, *l);
        }
        p.k = k;
        Ok(p)
    }

    /// Qubit count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// The phase.
    pub fn phase(&self) -> Phase {
        Phase::from_exponent(self.k)
    }

    /// Overwrite the phase.
    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.k = phase.exponent();
        self
    }

    /// Multiply the phase by i^k.
    pub fn mul_phase_exponent(&mut self, k: u8) {
        self.k = (self.k + k) % 4;
    }

    /// The letter at qubit `q`.
    pub fn letter(&self, q: usize) -> PauliLetter {
        let (b, m) = (q / BLOCK_BITS, 1u64 << (q % BLOCK_BITS));
        PauliLetter::from_bits(self.x[b] & m != 0, self.z[b] & m != 0)
    }

    /// Set the letter at qubit `q` (does not touch the phase).
    pub fn set_letter(&mut self, q: usize, letter: PauliLetter) {
        let (xb, zb) = letter.bits();
        let (b, m) = (q / BLOCK_BITS, 1u64 << (q % BLOCK_BITS));
        if xb {
            self.x[b] |= m;
        } else {
            self.x[b] &= !m;
        }
        if zb {
            self.z[b] |= m;
        } else {
            self.z[b] &= !m;
        }
    }

    /// True if every letter is the identity (phase ignored).
    pub fn is_identity_letters(&self) -> bool {
        self.x.iter().all(|&b| b == 0) && self.z.iter().all(|&b| b == 0)
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(&xb, &zb)| (xb | zb).count_ones() as usize)
            .sum()
    }

    /// Indices of qubits acted on non-trivially, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.letter(q) != PauliLetter::I).collect()
    }

    /// Phase-exact product `self · other`.
    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        if self.n != other.n {
            return Err(Error::Dimension(format!("{} vs {} qubits", self.n, other.n)));
        }
        let mut out = PauliString::identity(self.n);
        // Per-letter products contribute i^{±1} exactly when the two letters
        // differ and neither is I; the sign follows the cyclic order X→Y→Z.
        let mut plus: u32 = 0; // letter pairs contributing +i
        let mut minus: u32 = 0; // letter pairs contributing −i
        for b in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[b], self.z[b], other.x[b], other.z[b]);
            // +i cases: (X,Y), (Z,X), (Y,Z)
            let p = (x1 & !z1 & x2 & z2) | (!x1 & z1 & x2 & !z2) | (x1 & z1 & !x2 & z2);
            // −i cases: (X,Z), (Z,Y), (Y,X)
            let m = (x1 & !z1 & !x2 & z2) | (!x1 & z1 & x2 & z2) | (x1 & z1 & x2 & !z2);
            plus += p.count_ones();
            minus += m.count_ones();
            out.x[b] = x1 ^ x2;
            out.z[b] = z1 ^ z2;
        }
        let g = (plus as i64 - minus as i64).rem_euclid(4) as u8;
        out.k = (self.k + other.k + g) % 4;
        Ok(out)
    }

    /// True iff `self · other == other · self` (symplectic inner product 0).
    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::Dimension(format!("{} vs {} qubits", self.n, other.n)));
        }
        let mut anti: u32 = 0;
        for b in 0..self.x.len() {
            anti += (self.x[b] & other.z[b]).count_ones();
            anti += (self.z[b] & other.x[b]).count_ones();
        }
        Ok(anti % 2 == 0)
    }

    /// The Hermitian conjugate (inverts the phase's imaginary part).
    pub fn adjoint(&self) -> PauliString {
        let mut out = self.clone();
        // Letters are Hermitian; only the explicit phase conjugates.
        out.k = match self.k {
            1 => 3,
            3 => 1,
            other => other,
        };
        out
    }

    /// Negate the phase.
    pub fn negated(&self) -> PauliString {
        let mut out = self.clone();
        out.k = (out.k + 2) % 4;
        out
    }

    /// Embed into `n_total` qubits, placing local qubit `q` at
    /// `positions[q]`. Positions must be distinct and in range.
    pub fn embed(&self, n_total: usize, positions: &[usize]) -> Result<PauliString> {
        if positions.len() != self.n {
            return Err(Error::Dimension(format!(
                "{} positions for a {}-qubit operator",
                positions.len(),
                self.n
            )));
        }
        let mut out = PauliString::identity(n_total);
        for (q, &pos) in positions.iter().enumerate() {
            if pos >= n_total {
                return Err(Error::IndexOutOfRange(format!("position {pos} of {n_total}")));
            }
            if out.letter(pos) != PauliLetter::I {
                return Err(Error::InvalidState(format!("duplicate position {pos}")));
            }
            out.set_letter(pos, self.letter(q));
        }
        out.k = self.k;
        Ok(out)
    }

    /// The same operator with phase forced to +1.
    pub fn unsigned(&self) -> PauliString {
        let mut out = self.clone();
        out.k = 0;
        out
    }

    /// True if the two operators have identical letters (phases ignored).
    pub fn same_letters(&self, other: &PauliString) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.phase())?;
        for q in 0..self.n {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

/// Free-function form of [`PauliString::mul`].
pub fn pauli_mul(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    a.mul(b)
}

/// Free-function form of [`PauliString::commutes`].
pub fn commutes(a: &PauliString, b: &PauliString) -> Result<bool> {
    a.commutes(b)
}
