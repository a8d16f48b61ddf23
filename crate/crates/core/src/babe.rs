//! Babe's attempt to learn the committed bit by keeping the choice of `U_k`
//! coherent in an ancilla.
//!
//! Babe prepares `Σ_k √λ_k |f_k⟩ (U_k ⊗ I)|Ψ⁻⟩` and keeps `|f_k⟩`. After
//! Adam teleports `|b⟩` into that pair and announces `i`, her ancilla is in
//! a state `ρ_b` that depends on `b`; on a pair Adam did not use, it does
//! not.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::UnitaryFamily;
use crate::par::{count_trials, Estimate, Execution};
use crate::protocol::outcome_distribution;
use crate::quantum::{
    helstrom_measurement, hermitian_eigen, trace_distance, CMatrix, DensityMatrix, StateVector, Unitary2,
};
use crate::teleport::{BellOutcome, OutcomeLabeling};

pub const ANCILLA: [&str; 2] = ["c.0", "c.1"];
pub const PAIR: [&str; 2] = ["p.1", "p.2"];
const ADAM: &str = "adam";

/// Babe's purified preparation of one pair.
#[derive(Debug, Clone)]
pub struct EntangledPreparation {
    /// State on `c.0 c.1 p.1 p.2`.
    pub state: StateVector,
}

impl EntangledPreparation {
    pub fn ancilla(&self) -> Result<DensityMatrix> {
        self.state.partial_trace(&ANCILLA)
    }

    pub fn pair(&self) -> Result<DensityMatrix> {
        self.state.partial_trace(&PAIR)
    }
}

/// `Σ_k √λ_k |k⟩ ⊗ (U_k ⊗ I)|Ψ⁻⟩` with a two-qubit ancilla.
pub fn entangled_prepare(family: &UnitaryFamily) -> Result<EntangledPreparation> {
    if family.len() > 4 {
        return Err(Error::InvalidFamily(format!(
            "{} members need more than a two-qubit ancilla",
            family.len()
        )));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 16];
    for (k, m) in family.members().iter().enumerate() {
        let pair = family.pair_state(k, PAIR[0], PAIR[1]);
        for (idx, a) in pair.amplitudes().iter().enumerate() {
            amps[4 * k + idx] += a * m.weight.sqrt();
        }
    }
    Ok(EntangledPreparation {
        state: StateVector::new([ANCILLA[0], ANCILLA[1], PAIR[0], PAIR[1]], amps)?,
    })
}

/// Babe's ancilla after Adam teleports `|b⟩` into her entangled pair and
/// obtains `i`, with the probability of that `i`.
pub fn ancilla_after_commit(prep: &EntangledPreparation, b: u8, i: BellOutcome) -> Result<(f64, DensityMatrix)> {
    let joint = prep.state.tensor(&StateVector::bit(ADAM, b))?;
    let basis = OutcomeLabeling::standard().basis(PAIR[1], ADAM);
    let (p, rest) = joint.projective_branches(&basis)?.swap_remove(i.slot());
    let rest = rest.scaled(Complex64::new(1.0 / p.sqrt(), 0.0));
    Ok((p, rest.partial_trace(&ANCILLA)?))
}

/// Babe's optimal measurement on one entangled pair, per announced `i`.
#[derive(Debug, Clone, Serialize)]
pub struct SinglePairReport {
    pub i: BellOutcome,
    /// Optimal probability of naming `b` correctly.
    pub value: f64,
    /// Trace distance between her two possible ancilla states.
    pub distance: f64,
    /// Eigenvalues of `ρ_0 − ρ_1`.
    pub spectrum: Vec<f64>,
}

pub fn single_pair_distinguishability(family: &UnitaryFamily, i: BellOutcome) -> Result<SinglePairReport> {
    let prep = entangled_prepare(family)?;
    let (_, r0) = ancilla_after_commit(&prep, 0, i)?;
    let (_, r1) = ancilla_after_commit(&prep, 1, i)?;
    let h = helstrom_measurement(&r0, &r1, 0.5)?;
    Ok(SinglePairReport {
        i,
        value: h.success,
        distance: trace_distance(&r0, &r1)?,
        spectrum: hermitian_eigen(&(r0.matrix() - r1.matrix())).0,
    })
}

/// `1/2 + 1/(2n)`.
pub fn pair_guess_bound(n: usize) -> f64 {
    0.5 + 0.5 / n as f64
}

/// Total variation distance between the outcome distributions Babe sees for
/// `b = 0` and `b = 1` when she holds no ancilla.
pub fn honest_view_distance(family: &UnitaryFamily) -> Result<f64> {
    let p0 = outcome_distribution(family, 0)?;
    let p1 = outcome_distribution(family, 1)?;
    Ok(0.5 * p0.iter().zip(&p1).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BabeStrategy {
    /// No ancilla; she guesses from the announced outcome alone.
    Unentangled,
    /// One entangled pair; Helstrom on its ancilla if Adam used it,
    /// otherwise a fair coin.
    SinglePair,
    /// Every pair entangled; one Helstrom measurement on all ancillas
    /// jointly. Exact for `4^n ≤ 256`.
    AllPairsJoint,
}

impl BabeStrategy {
    pub fn name(self) -> &'static str {
        match self {
            BabeStrategy::Unentangled => "unentangled",
            BabeStrategy::SinglePair => "single-pair",
            BabeStrategy::AllPairsJoint => "all-pairs-joint",
        }
    }
}

/// Largest `n` for which the joint measurement is computed exactly.
pub const JOINT_MAX_PAIRS: usize = 4;

/// Per-`(i, b)` ancilla states and the Helstrom projector for each `i`.
struct SinglePairModel {
    prep: EntangledPreparation,
    guess_zero: Vec<CMatrix>,
}

impl SinglePairModel {
    fn new(family: &UnitaryFamily) -> Result<Self> {
        let prep = entangled_prepare(family)?;
        let guess_zero = BellOutcome::all()
            .iter()
            .map(|&i| {
                let (_, r0) = ancilla_after_commit(&prep, 0, i)?;
                let (_, r1) = ancilla_after_commit(&prep, 1, i)?;
                Ok(helstrom_measurement(&r0, &r1, 0.5)?.guess_zero)
            })
            .collect::<Result<_>>()?;
        Ok(SinglePairModel { prep, guess_zero })
    }

    /// One commitment through the entangled pair; returns whether Babe's
    /// measurement names `b`.
    fn play<R: Rng + ?Sized>(&self, b: u8, rng: &mut R) -> Result<bool> {
        let joint = self.prep.state.tensor(&StateVector::bit(ADAM, b))?;
        let basis = OutcomeLabeling::standard().basis(PAIR[1], ADAM);
        let m = joint.measure_projective(&basis, rng)?;
        let anc = m.post_state.partial_trace(&ANCILLA)?;
        let p_zero = (anc.matrix() * &self.guess_zero[m.outcome]).trace().re.clamp(0.0, 1.0);
        let guess = u8::from(rng.random::<f64>() >= p_zero);
        Ok(guess == b)
    }
}

/// Exact joint-Helstrom success when all `n` pairs are entangled and Adam
/// used a uniformly random one, for announced outcome `i`.
pub fn joint_helstrom(family: &UnitaryFamily, n: usize, i: BellOutcome) -> Result<f64> {
    if n == 0 || n > JOINT_MAX_PAIRS {
        return Err(Error::InvalidParams(format!(
            "joint measurement needs 1 ≤ n ≤ {JOINT_MAX_PAIRS}"
        )));
    }
    let prep = entangled_prepare(family)?;
    let tau = prep.ancilla()?.matrix().clone();
    let (_, r0) = ancilla_after_commit(&prep, 0, i)?;
    let (_, r1) = ancilla_after_commit(&prep, 1, i)?;
    let delta = r0.matrix() - r1.matrix();
    let d = 4usize.pow(n as u32);
    let mut total = CMatrix::zeros(d, d);
    for used in 0..n {
        let term = (0..n).fold(CMatrix::identity(1, 1), |acc, l| {
            acc.kronecker(if l == used { &delta } else { &tau })
        });
        total += term;
    }
    let norm: f64 = hermitian_eigen(&total).0.iter().map(|v| v.abs()).sum();
    Ok(0.5 + 0.25 * norm / n as f64)
}

/// Probability of naming `b` under the joint measurement, for each
/// `(used pair, b)`, given `i`.
fn joint_model(family: &UnitaryFamily, n: usize) -> Result<Vec<[[f64; 2]; JOINT_MAX_PAIRS]>> {
    let prep = entangled_prepare(family)?;
    let tau = prep.ancilla()?.matrix().clone();
    BellOutcome::all()
        .iter()
        .map(|&i| {
            let (_, r0) = ancilla_after_commit(&prep, 0, i)?;
            let (_, r1) = ancilla_after_commit(&prep, 1, i)?;
            let rho = [r0.matrix().clone(), r1.matrix().clone()];
            let product = |used: usize, b: usize| {
                (0..n).fold(CMatrix::identity(1, 1), |acc, l| {
                    acc.kronecker(if l == used { &rho[b] } else { &tau })
                })
            };
            let mix = |b: usize| {
                (0..n).fold(CMatrix::zeros(4usize.pow(n as u32), 4usize.pow(n as u32)), |acc, l| {
                    acc + product(l, b)
                }) * Complex64::new(1.0 / n as f64, 0.0)
            };
            let labels: Vec<String> = (0..2 * n).map(|q| format!("c{q}")).collect();
            let m0 = DensityMatrix::new(labels.clone(), mix(0))?;
            let m1 = DensityMatrix::new(labels, mix(1))?;
            let p0 = helstrom_measurement(&m0, &m1, 0.5)?.guess_zero;
            let mut out = [[0.0; 2]; JOINT_MAX_PAIRS];
            for (used, row) in out.iter_mut().enumerate().take(n) {
                for (b, cell) in row.iter_mut().enumerate() {
                    let zero = (product(used, b) * &p0).trace().re.clamp(0.0, 1.0);
                    *cell = if b == 0 { zero } else { 1.0 - zero };
                }
            }
            Ok(out)
        })
        .collect()
}

/// Babe's empirical success at naming a uniformly random bit that Adam
/// commits through one of `n` pairs chosen uniformly.
pub fn simulate_entangling_babe(
    family: &UnitaryFamily,
    n: usize,
    strategy: BabeStrategy,
    trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<Estimate> {
    if n == 0 {
        return Err(Error::InvalidParams("n must be positive".into()));
    }
    let hits = match strategy {
        BabeStrategy::Unentangled => {
            let fam = family.clone();
            count_trials(exec, seed, trials, move |rng| {
                let b = rng.random_range(0..2u8);
                let k = fam.sample(rng);
                let pair = fam.pair_state(k, PAIR[0], PAIR[1]);
                let rec = crate::teleport::teleport(&pair, &StateVector::bit(ADAM, b), rng).expect("valid pair");
                // any rule based on i alone; i is independent of b
                u8::from(rec.outcome.index() > 2) == b
            })
        }
        BabeStrategy::SinglePair => {
            let model = SinglePairModel::new(family)?;
            count_trials(exec, seed, trials, |rng| {
                let b = rng.random_range(0..2u8);
                let used = rng.random_range(0..n);
                if used == 0 {
                    model.play(b, rng).expect("valid state")
                } else {
                    rng.random_range(0..2u8) == b
                }
            })
        }
        BabeStrategy::AllPairsJoint => {
            if n > JOINT_MAX_PAIRS {
                return Err(Error::InvalidParams(format!(
                    "joint measurement is exact only up to {JOINT_MAX_PAIRS} pairs"
                )));
            }
            let table = joint_model(family, n)?;
            count_trials(exec, seed, trials, |rng| {
                let b = rng.random_range(0..2usize);
                let used = rng.random_range(0..n);
                // outcomes are uniform and independent of b and of the pair
                let i = rng.random_range(0..4usize);
                rng.random::<f64>() < table[i][used][b]
            })
        }
    };
    Ok(Estimate::new(hits, trials))
}

/// One row of the concealment table.
#[derive(Debug, Clone, Serialize)]
pub struct ConcealRow {
    pub n: usize,
    pub strategy: &'static str,
    pub rate: f64,
    /// Four standard errors.
    pub band: f64,
    pub bound: f64,
    /// Exact value of the strategy.
    pub exact: f64,
}

/// Exact success of a strategy.
pub fn exact_rate(family: &UnitaryFamily, n: usize, strategy: BabeStrategy) -> Result<f64> {
    let one = BellOutcome::new(1)?;
    Ok(match strategy {
        BabeStrategy::Unentangled => 0.5,
        BabeStrategy::SinglePair => 0.5 + (single_pair_distinguishability(family, one)?.value - 0.5) / n as f64,
        BabeStrategy::AllPairsJoint => {
            let mut s = 0.0;
            for i in BellOutcome::all() {
                s += 0.25 * joint_helstrom(family, n, i)?;
            }
            s
        }
    })
}

pub fn conceal_row(
    family: &UnitaryFamily,
    n: usize,
    strategy: BabeStrategy,
    trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<ConcealRow> {
    let est = simulate_entangling_babe(family, n, strategy, trials, seed, exec)?;
    let bound = pair_guess_bound(n);
    Ok(ConcealRow {
        n,
        strategy: strategy.name(),
        rate: est.rate(),
        band: 4.0 * est.sigma_at(est.rate()),
        bound,
        exact: exact_rate(family, n, strategy)?,
    })
}

/// `G_{kl} = tr(U_l† U_k)/2`, the Gram matrix of the pair states up to
/// normalization. Babe's ancilla on an unused pair is `√λ_k √λ_l G_{kl}`.
pub fn gram(family: &UnitaryFamily) -> CMatrix {
    let n = family.len();
    CMatrix::from_fn(n, n, |k, l| {
        let p: Unitary2 = family.unitary(l).adjoint() * *family.unitary(k);
        p.matrix().trace() * 0.5 * (family.weight(k) * family.weight(l)).sqrt()
    })
}
