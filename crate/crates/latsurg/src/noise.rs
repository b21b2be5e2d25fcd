//! Code-capacity noise on a single patch: Pauli error injection, exact
//! syndrome computation (by state readout or by pure anticommutation
//! arithmetic), a lookup-table decoder built from the single-qubit error
//! classes, and a Monte-Carlo logical-error-rate estimator with a
//! data-parallel and a sequential driver that produce identical counts.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridRegistry;
use crate::patch::{build_patch, read_check_signs, Orientation, PatchKind, PatchLayout};
use crate::pauli::{commutes, PauliLetter, PauliString};
use crate::tableau::Tableau;

/// One injected fault: the canvas cell it hits, the Pauli it applies,
/// and the extraction round it precedes (everything here models a
/// single perfect round, so round is 0 throughout; the field keeps
/// multi-round records representable).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorEvent {
    pub location: usize,
    pub pauli: PauliLetter,
    pub round: usize,
}

/// The Pauli string a set of error events applies (product of the
/// single-cell Paulis, sign dropped).
pub fn error_string(n: usize, events: &[ErrorEvent]) -> Result<PauliString> {
    let mut e = PauliString::identity(n);
    for ev in events {
        if ev.pauli == PauliLetter::I {
            return Err(Error::InvalidState("an error event cannot carry the identity".into()));
        }
        e = e.mul(&PauliString::single(n, ev.location, ev.pauli)?)?;
    }
    Ok(e.unsigned())
}

/// Apply one error event to the state.
pub fn inject_error(t: &mut Tableau, n: usize, event: &ErrorEvent) -> Result<()> {
    t.apply_pauli(&error_string(n, std::slice::from_ref(event))?)
}

/// A measured syndrome: one flip bit per Z check and per X check, in
/// the patch's check declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Syndrome {
    pub z_checks: Vec<bool>,
    pub x_checks: Vec<bool>,
}

impl Syndrome {
    pub fn is_trivial(&self) -> bool {
        !self.z_checks.iter().chain(&self.x_checks).any(|&b| b)
    }
}

/// The syndrome an error string produces, computed without any state:
/// a check flips exactly when it anticommutes with the error.
pub fn error_syndrome(p: &PatchLayout, error: &PauliString) -> Result<Syndrome> {
    let bit = |op: &PauliString| -> Result<bool> { Ok(!commutes(op, error)?) };
    Ok(Syndrome {
        z_checks: p.z_checks().iter().map(|c| bit(&c.operator)).collect::<Result<_>>()?,
        x_checks: p.x_checks().iter().map(|c| bit(&c.operator)).collect::<Result<_>>()?,
    })
}

/// The syndrome read off the state: check signs (deterministic for any
/// Pauli-errored eigenstate) mapped to flip bits.
pub fn read_syndrome(t: &Tableau, p: &PatchLayout) -> Result<Syndrome> {
    let (z_signs, x_signs) = read_check_signs(t, p)?;
    Ok(Syndrome {
        z_checks: z_signs.iter().map(|&s| s < 0).collect(),
        x_checks: x_signs.iter().map(|&s| s < 0).collect(),
    })
}

/// Syndrome → correction lookup built from the single-qubit error
/// classes of one patch. X-type and Z-type errors flip disjoint check
/// sets, so the table keys the Z-check pattern to an X repair cell and
/// the X-check pattern to a Z repair cell; a Y error is repaired by
/// both halves landing on the same cell. When two single-qubit errors
/// share a pattern the enumeration keeps the first — data cells in
/// row-major order — so ties break toward the lexicographically least
/// cell (their product is then a stabilizer for any distance-3 patch,
/// and the repair is exact; smaller patches genuinely confuse some
/// pairs, which the estimator counts as failures).
#[derive(Debug, Clone)]
pub struct DecodeTable {
    n: usize,
    z_len: usize,
    x_len: usize,
    x_fix: HashMap<Vec<bool>, usize>,
    z_fix: HashMap<Vec<bool>, usize>,
}

/// Build the decode table for one patch.
pub fn build_decode_table(p: &PatchLayout) -> Result<DecodeTable> {
    let mut x_fix = HashMap::new();
    let mut z_fix = HashMap::new();
    for &cell in p.data_qubits() {
        let q = p.cell_index(cell);
        let x_err = PauliString::single(p.n(), q, PauliLetter::X)?;
        let z_err = PauliString::single(p.n(), q, PauliLetter::Z)?;
        let zs = error_syndrome(p, &x_err)?.z_checks;
        let xs = error_syndrome(p, &z_err)?.x_checks;
        if zs.iter().any(|&b| b) {
            x_fix.entry(zs).or_insert(q);
        }
        if xs.iter().any(|&b| b) {
            z_fix.entry(xs).or_insert(q);
        }
    }
    Ok(DecodeTable {
        n: p.n(),
        z_len: p.z_checks().len(),
        x_len: p.x_checks().len(),
        x_fix,
        z_fix,
    })
}

impl DecodeTable {
    /// Decode a syndrome into a correction. The two halves are looked
    /// up independently; a half with no table entry contributes nothing
    /// and flags the result (the error weight exceeded the table's
    /// design class — the caller must not treat the correction as
    /// trustworthy). Trivial halves decode to nothing and never flag.
    pub fn decode(&self, s: &Syndrome) -> Result<(PauliString, bool)> {
        if s.z_checks.len() != self.z_len || s.x_checks.len() != self.x_len {
            return Err(Error::Dimension(format!(
                "syndrome has {}+{} bits, table expects {}+{}",
                s.z_checks.len(),
                s.x_checks.len(),
                self.z_len,
                self.x_len
            )));
        }
        let mut correction = PauliString::identity(self.n);
        let mut flagged = false;
        if s.z_checks.iter().any(|&b| b) {
            match self.x_fix.get(&s.z_checks) {
                Some(&q) => {
                    correction = correction.mul(&PauliString::single(self.n, q, PauliLetter::X)?)?
                }
                None => flagged = true,
            }
        }
        if s.x_checks.iter().any(|&b| b) {
            match self.z_fix.get(&s.x_checks) {
                Some(&q) => {
                    correction = correction.mul(&PauliString::single(self.n, q, PauliLetter::Z)?)?
                }
                None => flagged = true,
            }
        }
        Ok((correction.unsigned(), flagged))
    }
}

/// What one decode pass did to the state.
#[derive(Debug, Clone)]
pub struct DecodeOutcome {
    pub syndrome: Syndrome,
    pub correction: PauliString,
    pub flagged: bool,
}

/// Read the state's syndrome, decode it, and apply the correction.
/// A flagged outcome means the syndrome was outside the table's design
/// class and the state may retain a detectable or logical residual.
pub fn decode_and_correct(
    t: &mut Tableau,
    p: &PatchLayout,
    table: &DecodeTable,
) -> Result<DecodeOutcome> {
    let syndrome = read_syndrome(t, p)?;
    let (correction, flagged) = table.decode(&syndrome)?;
    if !correction.is_identity_letters() {
        t.apply_pauli(&correction)?;
    }
    Ok(DecodeOutcome { syndrome, correction, flagged })
}

/// Whether an error pattern defeats the table decoder, by pure
/// operator arithmetic: decode its syndrome, form residual = error ×
/// correction, and fail when the residual either still flips a check
/// (undecoded remnant) or commutes with every check but flips a
/// logical (an undetected logical error).
pub fn trial_fails(p: &PatchLayout, table: &DecodeTable, error: &PauliString) -> Result<bool> {
    let syndrome = error_syndrome(p, error)?;
    let (correction, _flagged) = table.decode(&syndrome)?;
    let residual = error.mul(&correction)?.unsigned();
    for check in p.z_checks().iter().chain(p.x_checks()) {
        if !commutes(&residual, &check.operator)? {
            return Ok(true);
        }
    }
    Ok(!commutes(&residual, p.logical_x())? || !commutes(&residual, p.logical_z())?)
}

/// Independent depolarizing noise: each data cell takes X, Y, or Z
/// (uniformly) with probability `p`.
pub fn depolarizing_error(
    patch: &PatchLayout,
    p: f64,
    rng: &mut impl Rng,
) -> Result<PauliString> {
    let mut e = PauliString::identity(patch.n());
    for &cell in patch.data_qubits() {
        if rng.gen::<f64>() < p {
            let letter = [PauliLetter::X, PauliLetter::Y, PauliLetter::Z][rng.gen_range(0..3)];
            e.set_letter(patch.cell_index(cell), letter);
        }
    }
    Ok(e)
}

/// Per-trial seed derivation (a splitmix64 finalizer over seed and
/// trial index), so each trial has an independent stream and the
/// parallel and sequential drivers agree bit for bit.
fn mix_seed(seed: u64, trial: u64) -> u64 {
    let mut z = seed.wrapping_add(trial.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One Monte-Carlo estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub d: usize,
    pub p: f64,
    pub trials: u64,
    pub failures: u64,
    pub rate: f64,
    pub stderr: f64,
    pub seed: u64,
}

impl RateEstimate {
    /// Column order of [`RateEstimate::csv_row`].
    pub const CSV_HEADER: &'static str = "d,p,trials,failures,rate,stderr,seed";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.d, self.p, self.trials, self.failures, self.rate, self.stderr, self.seed
        )
    }
}

fn rate_patch(d: usize) -> Result<(GridRegistry, PatchLayout)> {
    let side = 2 * d + 1;
    let mut reg = GridRegistry::new(side, side);
    let patch = build_patch(&mut reg, PatchKind::Rotated, d, (0, 0), Orientation::RoughLeftRight)?;
    Ok((reg, patch))
}

fn estimate_from_failures(
    d: usize,
    p: f64,
    trials: u64,
    failures: u64,
    seed: u64,
) -> RateEstimate {
    let n = trials.max(1) as f64;
    let rate = failures as f64 / n;
    let stderr = (rate * (1.0 - rate) / n).sqrt();
    RateEstimate { d, p, trials, failures, rate, stderr, seed }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidState(format!("error probability must be in [0, 1], got {p}")));
    }
    Ok(())
}

/// Sequential Monte-Carlo logical-error-rate estimate for a distance-d
/// patch under independent depolarizing noise, decoded by the lookup
/// table. Always available; bit-identical to the data-parallel driver.
pub fn logical_error_rate_sequential(
    d: usize,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<RateEstimate> {
    check_probability(p)?;
    let (_reg, patch) = rate_patch(d)?;
    let table = build_decode_table(&patch)?;
    let mut failures = 0u64;
    for trial in 0..trials {
        let mut rng = ChaCha12Rng::seed_from_u64(mix_seed(seed, trial));
        let error = depolarizing_error(&patch, p, &mut rng)?;
        if trial_fails(&patch, &table, &error)? {
            failures += 1;
        }
    }
    Ok(estimate_from_failures(d, p, trials, failures, seed))
}

/// Monte-Carlo logical-error-rate estimate; runs the trials across all
/// cores when the `parallel` feature is on (per-trial seeding keeps the
/// counts identical to the sequential driver), and falls back to the
/// sequential driver otherwise.
pub fn logical_error_rate(d: usize, p: f64, trials: u64, seed: u64) -> Result<RateEstimate> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        check_probability(p)?;
        let (_reg, patch) = rate_patch(d)?;
        let table = build_decode_table(&patch)?;
        let failures = (0..trials)
            .into_par_iter()
            .map(|trial| -> Result<u64> {
                let mut rng = ChaCha12Rng::seed_from_u64(mix_seed(seed, trial));
                let error = depolarizing_error(&patch, p, &mut rng)?;
                Ok(u64::from(trial_fails(&patch, &table, &error)?))
            })
            .try_reduce(|| 0u64, |a, b| Ok(a + b))?;
        Ok(estimate_from_failures(d, p, trials, failures, seed))
    }
    #[cfg(not(feature = "parallel"))]
    {
        logical_error_rate_sequential(d, p, trials, seed)
    }
}
