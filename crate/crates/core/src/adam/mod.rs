//! Adam's attempts to open a bit other than the one he committed.
//!
//! Each course of action reduces to maximizing an overlap sum over Adam's
//! correction `V`; [`optimize_cheat`] does this numerically, [`p_a`] takes
//! the best course, and [`simulate`] replays each course through the
//! protocol.

pub mod discriminate;
pub mod formulas;
pub mod search;
pub mod simulate;

use serde::Serialize;

pub use discriminate::{discrimination_course, DiscriminationCourse};
pub use formulas::{
    bloch, cheat_prob_s1, cheat_prob_s2, cheat_prob_s2_averaged, cheat_prob_s3, ket, s1_objective, s2_objective,
    s3_objective, OverlapSum, Qubit, Strategy,
};
pub use search::{Method, SearchOptions};
pub use simulate::{simulate_cheat, CheatPlan};

use crate::error::{Error, Result};
use crate::family::UnitaryFamily;
use crate::quantum::Unitary2;
use crate::teleport::BellOutcome;

/// One optimization problem.
#[derive(Debug, Clone)]
pub struct CheatObjective {
    pub strategy: Strategy,
    pub family: UnitaryFamily,
    pub i: BellOutcome,
    /// Teleportation result at opening. For [`Strategy::S2`] without `j`,
    /// the value is averaged over `j` with `φ` chosen beforehand.
    pub j: Option<BellOutcome>,
    pub phi: Option<Qubit>,
    /// Bit Adam tries to open.
    pub b: u8,
}

impl CheatObjective {
    pub fn s1(family: UnitaryFamily, i: BellOutcome) -> Self {
        CheatObjective {
            strategy: Strategy::S1,
            family,
            i,
            j: None,
            phi: None,
            b: 1,
        }
    }

    pub fn s2(family: UnitaryFamily, i: BellOutcome, j: BellOutcome, b: u8, phi: Qubit) -> Self {
        CheatObjective {
            strategy: Strategy::S2,
            family,
            i,
            j: Some(j),
            phi: Some(phi),
            b,
        }
    }

    /// Second course with `φ` optimized and `j` random.
    pub fn s2_averaged(family: UnitaryFamily, i: BellOutcome, b: u8) -> Self {
        CheatObjective {
            strategy: Strategy::S2,
            family,
            i,
            j: None,
            phi: None,
            b,
        }
    }

    pub fn s3(family: UnitaryFamily, i: BellOutcome, b: u8, phi: Qubit) -> Self {
        CheatObjective {
            strategy: Strategy::S3,
            family,
            i,
            j: None,
            phi: Some(phi),
            b,
        }
    }

    pub fn discriminate(family: UnitaryFamily, i: BellOutcome, b: u8) -> Self {
        CheatObjective {
            strategy: Strategy::Discriminate,
            family,
            i,
            j: None,
            phi: None,
            b,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if self.b > 1 {
            return bad("b must be 0 or 1");
        }
        match self.strategy {
            Strategy::S1 if self.j.is_some() || self.phi.is_some() => bad("S1 takes neither j nor φ"),
            Strategy::S2 if self.j.is_some() != self.phi.is_some() => bad("S2 takes j and φ together"),
            Strategy::S3 if self.phi.is_none() || self.j.is_some() => bad("S3 takes φ and no j"),
            Strategy::Discriminate if self.j.is_some() || self.phi.is_some() => {
                bad("discrimination takes neither j nor φ")
            }
            _ => Ok(()),
        }
    }

    /// Objective value at the given corrections and input state.
    pub fn evaluate(&self, v: &[Unitary2], phi: Option<Qubit>) -> f64 {
        let phi = phi.or(self.phi).unwrap_or(ket(0));
        match (self.strategy, self.j) {
            (Strategy::S1, _) => cheat_prob_s1(&self.family, self.i, &v[0]),
            (Strategy::S2, Some(j)) => cheat_prob_s2(&self.family, self.i, j, self.b, phi, &v[0]),
            (Strategy::S2, None) => {
                let v4: [Unitary2; 4] = std::array::from_fn(|k| v[k]);
                cheat_prob_s2_averaged(&self.family, self.i, self.b, phi, &v4)
            }
            (Strategy::S3, _) => cheat_prob_s3(&self.family, self.i, self.b, phi, &v[0]),
            (Strategy::Discriminate, _) => f64::NAN,
        }
    }
}

/// Result of [`optimize_cheat`].
#[derive(Debug, Clone, Serialize)]
pub struct OptResult {
    pub strategy: Strategy,
    pub i: BellOutcome,
    pub j: Option<BellOutcome>,
    pub b: u8,
    pub value: f64,
    /// Maximizing corrections as unit quaternions `(q0, q1, q2, q3)`, one
    /// per teleportation result for the averaged second course.
    pub argmax: Vec<[f64; 4]>,
    /// Bloch angles `(θ, ϕ)` of the input state, where it was optimized.
    pub phi_angles: Option<(f64, f64)>,
    pub method: &'static str,
    pub axes: usize,
    pub angles: usize,
    pub restarts: usize,
    pub evaluations: u64,
    /// Lipschitz bound on how far the true maximum over the grid's
    /// neighborhood can exceed the best grid value.
    pub slack: f64,
    #[serde(skip)]
    pub v: Vec<Unitary2>,
    #[serde(skip)]
    pub phi: Option<Qubit>,
}

/// Maximizes the objective over `V` (and `φ` for the averaged second
/// course).
pub fn optimize_cheat(objective: &CheatObjective, method: Method, opts: &SearchOptions) -> Result<OptResult> {
    objective.validate()?;
    let stream = 16 * u64::from(objective.i.index()) + 2 * u64::from(objective.b) + objective.strategy as u64;
    let (grid_axes, grid_angles) = match method {
        Method::Grid => (opts.axes, opts.angles),
        Method::Restarts => (0, 0),
    };
    let base = |strategy_value: f64, v: Vec<Unitary2>, evaluations: u64, slack: f64| OptResult {
        strategy: objective.strategy,
        i: objective.i,
        j: objective.j,
        b: objective.b,
        value: strategy_value,
        argmax: v.iter().map(Unitary2::to_quaternion).collect(),
        phi_angles: None,
        method: match method {
            Method::Grid => "grid",
            Method::Restarts => "restarts",
        },
        axes: grid_axes,
        angles: grid_angles,
        restarts: if method == Method::Restarts { opts.restarts } else { 0 },
        evaluations,
        slack,
        v,
        phi: objective.phi,
    };
    let fam = &objective.family;
    let single = |obj: OverlapSum| {
        let best = search::maximize_overlap(&obj, method, opts, stream);
        let slack = match method {
            Method::Grid => {
                (best.grid_value + obj.lipschitz() * search::grid_radius(opts.axes, opts.angles) - best.value).max(0.0)
            }
            Method::Restarts => f64::NAN,
        };
        base(best.value.min(1.0), vec![best.v], best.evaluations, slack)
    };
    Ok(match (objective.strategy, objective.j, objective.phi) {
        (Strategy::S1, _, _) => single(s1_objective(fam, objective.i)),
        (Strategy::S2, Some(j), Some(phi)) => single(s2_objective(fam, objective.i, j, objective.b, phi)),
        (Strategy::S3, _, Some(phi)) => single(s3_objective(fam, objective.i, objective.b, phi)),
        (Strategy::S2, None, None) => {
            let (i, b) = (objective.i, objective.b);
            let best = search::maximize_over_phi(
                |phi| {
                    BellOutcome::all()
                        .iter()
                        .map(|&j| (0.25, s2_objective(fam, i, j, b, phi)))
                        .collect()
                },
                method,
                opts,
                stream,
            );
            let slack = match method {
                Method::Grid => 2.0 * search::grid_radius(opts.axes, opts.angles),
                Method::Restarts => f64::NAN,
            };
            let mut r = base(best.value.min(1.0), best.v, best.evaluations, slack);
            r.phi_angles = Some(best.angles);
            r.phi = Some(best.phi);
            r
        }
        (Strategy::Discriminate, _, _) => {
            let c = discrimination_course(fam, objective.i, objective.b)?;
            let mut r = base(c.value, Vec::new(), 0, c.gap);
            r.method = "min-error-povm";
            r
        }
        _ => unreachable!("validated"),
    })
}

/// Best value over every course, outcome and bit.
#[derive(Debug, Clone, Serialize)]
pub struct PaReport {
    pub value: f64,
    pub best: OptResult,
    pub results: Vec<OptResult>,
}

/// Every objective entering `p_A`.
pub fn objectives(family: &UnitaryFamily) -> Vec<CheatObjective> {
    let mut out = Vec::new();
    for i in BellOutcome::all() {
        out.push(CheatObjective::s1(family.clone(), i));
    }
    for i in BellOutcome::all() {
        for b in 0..2 {
            out.push(CheatObjective::s2_averaged(family.clone(), i, b));
            out.push(CheatObjective::s3(family.clone(), i, b, ket(0)));
            out.push(CheatObjective::discriminate(family.clone(), i, b));
        }
    }
    out
}

/// Adam's best success probability for the given family.
pub fn p_a(family: &UnitaryFamily, method: Method, opts: &SearchOptions) -> Result<PaReport> {
    let results = objectives(family)
        .iter()
        .map(|o| optimize_cheat(o, method, opts))
        .collect::<Result<Vec<_>>>()?;
    let best = results
        .iter()
        .max_by(|a, b| a.value.total_cmp(&b.value))
        .cloned()
        .expect("objectives are non-empty");
    Ok(PaReport {
        value: best.value,
        best,
        results,
    })
}

/// Success probability over `stages` independent stages, each with
/// probability `p`.
pub fn sequential_cheat(p: f64, stages: u32) -> f64 {
    p.powi(stages as i32)
}
