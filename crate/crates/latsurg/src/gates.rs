//! Gate intermediate representation and the gate → Pauli-rotation table.
//!
//! Every supported gate decomposes into an ordered list of Pauli-product
//! rotations P_φ = e^{−iφP}. The list is in *print order*: the gate's unitary
//! is the matrix product of the terms as listed, so the LAST term acts first
//! on a state. Rotation gates use the full-angle convention
//! RX(θ) = e^{−iθX} (so S sits at angle π/4 and T at π/8 on the Z axis).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{PauliLetter, PauliString, Phase};

/// A rotation angle, kept exact for the dyadic multiples of π that the named
/// gates use and as plain radians for parameterized rotations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    /// φ = num·π/den, stored reduced with den ∈ {1, 2, 4, 8} and
    /// num normalized into (−den, den].
    Dyadic { num: i32, den: u32 },
    /// Arbitrary radians.
    Radians(f64),
}

impl Angle {
    /// Exact zero.
    pub const ZERO: Angle = Angle::Dyadic { num: 0, den: 1 };
    /// π/2 — the corrected angle for the plain Pauli gates.
    pub const HALF_PI: Angle = Angle::Dyadic { num: 1, den: 2 };
    /// π/4 — the S / CNOT-term angle.
    pub const QUARTER_PI: Angle = Angle::Dyadic { num: 1, den: 4 };
    /// −π/4.
    pub const NEG_QUARTER_PI: Angle = Angle::Dyadic { num: -1, den: 4 };
    /// π/8 — the T angle.
    pub const EIGHTH_PI: Angle = Angle::Dyadic { num: 1, den: 8 };

    /// Build a normalized dyadic angle num·π/den.
    pub fn dyadic(num: i32, den: u32) -> Result<Angle> {
        if den == 0 {
            return Err(Error::InvalidState("zero denominator".into()));
        }
        let mut num = num as i64;
        let mut den = den as i64;
        let g = gcd(num.unsigned_abs().max(1), den as u64) as i64;
        num /= g;
        den /= g;
        // e^{−iφP} has period 2π in φ: reduce num into (−den, den].
        let two = 2 * den;
        num = num.rem_euclid(two);
        if num > den {
            num -= two;
        }
        if num == 0 {
            return Ok(Angle::ZERO);
        }
        Ok(Angle::Dyadic { num: num as i32, den: den as u32 })
    }

    /// Numeric value in radians.
    pub fn radians(&self) -> f64 {
        match *self {
            Angle::Dyadic { num, den } => std::f64::consts::PI * num as f64 / den as f64,
            Angle::Radians(v) => v,
        }
    }

    /// The negated angle.
    pub fn negated(&self) -> Angle {
        match *self {
            Angle::Dyadic { num, den } => Angle::dyadic(-num, den).expect("valid dyadic"),
            Angle::Radians(v) => Angle::Radians(-v),
        }
    }

    /// True for an exact zero angle.
    pub fn is_zero(&self) -> bool {
        matches!(self, Angle::Dyadic { num: 0, .. }) || matches!(self, Angle::Radians(v) if *v == 0.0)
    }

    /// For exact dyadics: the pair (num, den). `None` for radians.
    pub fn dyadic_parts(&self) -> Option<(i32, u32)> {
        match *self {
            Angle::Dyadic { num, den } => Some((num, den)),
            Angle::Radians(_) => None,
        }
    }

    /// Parse the serialized form produced by [`fmt::Display`].
    pub fn parse(text: &str) -> Result<Angle> {
        let t = text.trim();
        if t == "0" {
            return Ok(Angle::ZERO);
        }
        if let Some(idx) = t.find("pi") {
            let (pre, post) = (&t[..idx], &t[idx + 2..]);
            let num: i32 = match pre {
                "" | "+" => 1,
                "-" => -1,
                other => other
                    .parse()
                    .map_err(|_| Error::InvalidState(format!("bad angle numerator {other:?}")))?,
            };
            let den: u32 = match post.strip_prefix('/') {
                None if post.is_empty() => 1,
                Some(d) => d
                    .parse()
                    .map_err(|_| Error::InvalidState(format!("bad angle denominator {d:?}")))?,
                None => {
                    return Err(Error::InvalidState(format!("bad angle {t:?}")));
                }
            };
            return Angle::dyadic(num, den);
        }
        t.parse::<f64>()
            .map(Angle::Radians)
            .map_err(|_| Error::InvalidState(format!("bad angle {t:?}")))
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Angle::Dyadic { num: 0, .. } => write!(f, "0"),
            Angle::Dyadic { num, den } => {
                match num {
                    1 => write!(f, "pi")?,
                    -1 => write!(f, "-pi")?,
                    other => write!(f, "{other}pi")?,
                }
                if den != 1 {
                    write!(f, "/{den}")?;
                }
                Ok(())
            }
            Angle::Radians(v) => {
                // Shortest f64 round-trip form, stable for golden files.
                let mut buf = serde_json::to_string(&v).map_err(|_| fmt::Error)?;
                if !buf.contains('.') && !buf.contains('e') && !buf.contains("inf") {
                    buf.push_str(".0");
                }
                write!(f, "{buf}")
            }
        }
    }
}

impl Serialize for Angle {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Angle::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// One Pauli-product rotation P_φ = e^{−iφP}.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationTerm {
    pauli: PauliString,
    angle: Angle,
}

impl RotationTerm {
    /// Build a term; the Pauli's phase must be +1.
    pub fn new(pauli: PauliString, angle: Angle) -> Result<RotationTerm> {
        if pauli.phase() != Phase::PlusOne {
            return Err(Error::InvalidState(format!(
                "rotation axis must carry phase +1, got {}",
                pauli.phase()
            )));
        }
        Ok(RotationTerm { pauli, angle })
    }

    /// The rotation axis P.
    pub fn pauli(&self) -> &PauliString {
        &self.pauli
    }

    /// The angle φ.
    pub fn angle(&self) -> Angle {
        self.angle
    }

    /// True if this term is a pure global phase (identity axis or zero angle)
    /// and therefore compiles to no action.
    pub fn is_global_phase(&self) -> bool {
        self.pauli.is_identity_letters() || self.angle.is_zero()
    }
}

impl fmt::Display for RotationTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters: String = (0..self.pauli.n()).map(|q| self.pauli.letter(q).symbol()).collect();
        write!(f, "{}_{{{}}}", letters, self.angle)
    }
}

/// Gate kinds of the supported gate set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    X,
    Y,
    Z,
    RX,
    RY,
    RZ,
    H,
    S,
    T,
    Cnot,
    Cz,
    /// C(P1,P2): on the −1 eigenspace of P1 on the first qubit, apply P2 to
    /// the second.
    Cpp,
}

impl GateKind {
    /// Number of operand qubits.
    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Cz | GateKind::Cpp => 2,
            _ => 1,
        }
    }

    /// Canonical name as written in circuit text.
    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::RX => "RX",
            GateKind::RY => "RY",
            GateKind::RZ => "RZ",
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::T => "T",
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
            GateKind::Cpp => "CPP",
        }
    }
}

/// One gate instance: kind, ordered operand qubits, and the optional
/// angle / Pauli-pair parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GateIR {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub angle: Option<Angle>,
    pub paulis: Option<(PauliLetter, PauliLetter)>,
}

impl GateIR {
    /// A plain (non-parameterized) gate.
    pub fn plain(kind: GateKind, qubits: &[usize]) -> Result<GateIR> {
        let g = GateIR { kind, qubits: qubits.to_vec(), angle: None, paulis: None };
        g.validate()?;
        Ok(g)
    }

    /// A rotation gate RX/RY/RZ.
    pub fn rotation(kind: GateKind, qubit: usize, angle: Angle) -> Result<GateIR> {
        let g = GateIR { kind, qubits: vec![qubit], angle: Some(angle), paulis: None };
        g.validate()?;
        Ok(g)
    }

    /// A C(P1,P2) gate.
    pub fn controlled_pauli(
        p1: PauliLetter,
        p2: PauliLetter,
        control: usize,
        target: usize,
    ) -> Result<GateIR> {
        let g = GateIR {
            kind: GateKind::Cpp,
            qubits: vec![control, target],
            angle: None,
            paulis: Some((p1, p2)),
        };
        g.validate()?;
        Ok(g)
    }

    /// Check arity, operand distinctness, and parameter presence.
    pub fn validate(&self) -> Result<()> {
        if self.qubits.len() != self.kind.arity() {
            return Err(Error::InvalidState(format!(
                "{} takes {} operand(s), got {}",
                self.kind.name(),
                self.kind.arity(),
                self.qubits.len()
            )));
        }
        if self.qubits.len() == 2 && self.qubits[0] == self.qubits[1] {
            return Err(Error::InvalidState(format!(
                "{} operands must be distinct, got q{} twice",
                self.kind.name(),
                self.qubits[0]
            )));
        }
        let needs_angle = matches!(self.kind, GateKind::RX | GateKind::RY | GateKind::RZ);
        if needs_angle != self.angle.is_some() {
            return Err(Error::InvalidState(format!(
                "{} angle parameter mismatch",
                self.kind.name()
            )));
        }
        let needs_paulis = self.kind == GateKind::Cpp;
        if needs_paulis != self.paulis.is_some() {
            return Err(Error::InvalidState(format!(
                "{} Pauli-pair parameter mismatch",
                self.kind.name()
            )));
        }
        if let Some((p1, p2)) = self.paulis {
            if p1 == PauliLetter::I || p2 == PauliLetter::I {
                return Err(Error::InvalidState("CPP letters must be X, Y, or Z".into()));
            }
        }
        Ok(())
    }
}

impl fmt::Display for GateIR {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.name())?;
        if let Some((p1, p2)) = self.paulis {
            write!(f, " {}{}", p1.symbol(), p2.symbol())?;
        }
        if let Some(a) = self.angle {
            write!(f, "({a})")?;
        }
        for q in &self.qubits {
            write!(f, " q{q}")?;
        }
        Ok(())
    }
}

fn term1(letter: PauliLetter, angle: Angle) -> RotationTerm {
    let p = PauliString::single(1, 0, letter).expect("single letter");
    RotationTerm::new(p, angle).expect("phase +1")
}

fn term2(l0: PauliLetter, l1: PauliLetter, angle: Angle) -> RotationTerm {
    let mut p = PauliString::identity(2);
    p.set_letter(0, l0);
    p.set_letter(1, l1);
    RotationTerm::new(p, angle).expect("phase +1")
}

/// Decompose a gate into its ordered Pauli-rotation terms over the gate's
/// local qubits (qubit 0 = first operand). The product of the terms' matrices
/// as listed equals the gate's canonical matrix up to global phase.
///
/// The plain Pauli gates decompose at angle π/2 (a full-turn angle π would be
/// e^{−iπP} = −I, a pure global phase), and C(P1,P2) places P1 on the control
/// factor and P2 on the target factor of its single-qubit terms; both choices
/// are enforced by the matrix oracle in the verification suites.
pub fn decompose_gate(g: &GateIR) -> Result<Vec<RotationTerm>> {
    g.validate()?;
    use PauliLetter::{X, Y, Z};
    let terms = match g.kind {
        GateKind::X => vec![term1(X, Angle::HALF_PI)],
        GateKind::Y => vec![term1(Y, Angle::HALF_PI)],
        GateKind::Z => vec![term1(Z, Angle::HALF_PI)],
        GateKind::RX => vec![term1(X, g.angle.expect("validated"))],
        GateKind::RY => vec![term1(Y, g.angle.expect("validated"))],
        GateKind::RZ => vec![term1(Z, g.angle.expect("validated"))],
        GateKind::H => vec![
            term1(Z, Angle::QUARTER_PI),
            term1(X, Angle::QUARTER_PI),
            term1(Z, Angle::QUARTER_PI),
        ],
        GateKind::S => vec![term1(Z, Angle::QUARTER_PI)],
        GateKind::T => vec![term1(Z, Angle::EIGHTH_PI)],
        GateKind::Cnot => vec![
            term2(Z, X, Angle::QUARTER_PI),
            term2(PauliLetter::I, X, Angle::NEG_QUARTER_PI),
            term2(Z, PauliLetter::I, Angle::NEG_QUARTER_PI),
        ],
        GateKind::Cz => vec![
            term2(Z, Z, Angle::QUARTER_PI),
            term2(PauliLetter::I, Z, Angle::NEG_QUARTER_PI),
            term2(Z, PauliLetter::I, Angle::NEG_QUARTER_PI),
        ],
        GateKind::Cpp => {
            let (p1, p2) = g.paulis.expect("validated");
            vec![
                term2(p1, p2, Angle::QUARTER_PI),
                term2(PauliLetter::I, p2, Angle::NEG_QUARTER_PI),
                term2(p1, PauliLetter::I, Angle::NEG_QUARTER_PI),
            ]
        }
    };
    Ok(terms)
}
