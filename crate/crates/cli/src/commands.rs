use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::json;

use qbc5::adam::{p_a, Method, PaReport, SearchOptions};
use qbc5::babe::{conceal_row, BabeStrategy};
use qbc5::ensemble::{ensemble_row, EnsembleParams};
use qbc5::game::{closed_form, game_simulate, markov_oracle, GameParams, Model};
use qbc5::par::stream_rng;
use qbc5::protocol::{run, Opener, ProtocolParams, Verdict};
use qbc5::quantum::StateVector;
use qbc5::teleport::{teleport_forced, OutcomeLabeling};
use qbc5::{BellOutcome, Execution, UnitaryFamily};

use crate::output::Report;

/// Comma-separated values; an empty string is an empty list.
#[derive(Debug, Clone, Serialize)]
#[serde(transparent)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T>
where
    T::Err: std::fmt::Display,
{
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<T>().map_err(|e| format!("`{t}`: {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(List)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExecArg {
    Sequential,
    Parallel,
}

impl From<ExecArg> for Execution {
    fn from(e: ExecArg) -> Self {
        match e {
            ExecArg::Sequential => Execution::Sequential,
            ExecArg::Parallel => Execution::Parallel,
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = crate::output::Format::Csv)]
    pub format: crate::output::Format,
    /// Monte Carlo trials per row.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, global = true, value_enum, default_value_t = ExecArg::Parallel)]
    pub exec: ExecArg,
}

fn family(spec: &str) -> Result<UnitaryFamily> {
    UnitaryFamily::from_spec(spec).with_context(|| format!("family `{spec}`"))
}

const TELEPORT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Args, Serialize)]
pub struct TeleportCheck {
    #[arg(long, default_value = "standard")]
    pub family: String,
    /// Random input states per (member, outcome).
    #[arg(long, default_value_t = 100)]
    pub states: usize,
    /// Label outcomes with a wrongly ordered Bell basis.
    #[arg(long)]
    pub misorder_bell_basis: bool,
}

#[derive(Serialize)]
struct TeleportRow<'a> {
    member: &'a str,
    i: u8,
    min_fidelity: f64,
    min_probability: f64,
    max_probability: f64,
    pass: bool,
}

pub fn teleport_check(a: &TeleportCheck, c: &Common) -> Result<Report> {
    let fam = family(&a.family)?;
    let labeling = if a.misorder_bell_basis {
        OutcomeLabeling::misordered()
    } else {
        OutcomeLabeling::standard()
    };
    let mut report = Report::new(
        "teleport-check",
        json!({ "seed": c.seed, "args": a }),
        &[
            "member",
            "i",
            "min_fidelity",
            "min_probability",
            "max_probability",
            "pass",
        ],
    );
    for (k, m) in fam.members().iter().enumerate() {
        let pair = fam.pair_state(k, "p.1", "p.2");
        for i in BellOutcome::all() {
            let mut rng = stream_rng(c.seed, (4 * k + i.slot()) as u64);
            let (mut fid, mut lo, mut hi) = (f64::INFINITY, f64::INFINITY, 0.0f64);
            for _ in 0..a.states {
                let phi = StateVector::random(["phi"], &mut rng);
                let rec = teleport_forced(&pair, &phi, i, labeling)?;
                fid = fid.min(rec.fidelity_with_formula(&m.unitary, &phi)?);
                lo = lo.min(rec.probability);
                hi = hi.max(rec.probability);
            }
            let pass = fid >= 1.0 - TELEPORT_TOL;
            if !pass {
                report.fail(format!("({}, {}): fidelity {fid:.3e}", m.name, i.index()));
            }
            report.push(&TeleportRow {
                member: &m.name,
                i: i.index(),
                min_fidelity: fid,
                min_probability: lo,
                max_probability: hi,
                pass,
            });
        }
    }
    report.summary = json!({ "combinations": report.rows.len(), "tolerance": TELEPORT_TOL });
    Ok(report)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RunProtocol {
    /// Pairs used per commitment.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Amplification factor; Babe sends n·N pairs.
    #[arg(long = "stages", visible_alias = "N", default_value_t = 3)]
    pub stages: usize,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub bit: u8,
    #[arg(long, default_value = "standard")]
    pub family: String,
    /// Adam opens claiming the other bit.
    #[arg(long)]
    pub flip_claim: bool,
    /// Also write the transcript as JSON lines.
    #[arg(long)]
    #[serde(skip)]
    pub transcript: Option<PathBuf>,
}

pub fn run_protocol(a: &RunProtocol, c: &Common) -> Result<Report> {
    let params = ProtocolParams::new(a.n, a.stages, family(&a.family)?, c.seed)?;
    let opener = if a.flip_claim {
        Opener::FlipClaim
    } else {
        Opener::Honest
    };
    let mut rng = stream_rng(c.seed, 0);
    let t = run(&params, a.bit, opener, &mut rng)?;
    if let Some(path) = &a.transcript {
        std::fs::write(path, t.to_jsonl()).with_context(|| format!("writing {}", path.display()))?;
    }
    let mut report = Report::new(
        "run-protocol",
        json!({ "seed": c.seed, "args": a }),
        &["step", "sender", "kind", "payload_digest", "outcome"],
    );
    for r in &t.records {
        report.push(r);
    }
    let expected = if a.flip_claim { Verdict::Reject } else { Verdict::Accept };
    let v = &t.verification;
    if v.verdict != expected {
        report.fail(format!("verdict {:?}, expected {expected:?}", v.verdict));
    }
    report.summary = json!({
        "verdict": v.verdict,
        "expected": expected,
        "acceptance_probability": v.acceptance_probability,
        "min_overlap": v.overlaps.iter().copied().fold(f64::INFINITY, f64::min),
        "malformed": v.malformed,
    });
    Ok(report)
}

const METHOD_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Grid,
    Restarts,
    Both,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AdamOpt {
    #[arg(long, default_value = "standard")]
    pub family: String,
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    pub method: MethodArg,
    /// Rerun the grid at doubled resolution and compare.
    #[arg(long)]
    pub stability: bool,
    #[arg(long)]
    pub axes: Option<usize>,
    #[arg(long)]
    pub angles: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
}

pub fn adam_opt(a: &AdamOpt, c: &Common) -> Result<Report> {
    let fam = family(&a.family)?;
    let mut opts = SearchOptions {
        seed: c.seed,
        exec: c.exec.into(),
        ..SearchOptions::default()
    };
    opts.axes = a.axes.unwrap_or(opts.axes);
    opts.angles = a.angles.unwrap_or(opts.angles);
    opts.restarts = a.restarts.unwrap_or(opts.restarts);
    let mut report = Report::new(
        "adam-opt",
        json!({ "seed": c.seed, "args": a }),
        &[
            "strategy",
            "i",
            "b",
            "method",
            "value",
            "slack",
            "evaluations",
            "phi_angles",
            "argmax",
        ],
    );
    let methods: &[Method] = match a.method {
        MethodArg::Grid => &[Method::Grid],
        MethodArg::Restarts => &[Method::Restarts],
        MethodArg::Both => &[Method::Grid, Method::Restarts],
    };
    let runs: Vec<PaReport> = methods
        .iter()
        .map(|&m| p_a(&fam, m, &opts))
        .collect::<qbc5::Result<_>>()?;
    for r in runs.iter().flat_map(|r| &r.results) {
        report.push(r);
    }
    if let [g, r] = runs.as_slice() {
        for (x, y) in g.results.iter().zip(&r.results) {
            let d = (x.value - y.value).abs();
            if d > METHOD_TOL {
                report.fail(format!(
                    "{} i={} b={}: grid {:.6} vs restarts {:.6}",
                    x.strategy.name(),
                    x.i.index(),
                    x.b,
                    x.value,
                    y.value
                ));
            }
        }
    }
    let p = runs.iter().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max);
    let mut summary = json!({
        "p_a": p,
        "best_strategy": runs[0].best.strategy.name(),
        "by_method": methods
            .iter()
            .zip(&runs)
            .map(|(m, r)| json!({ "method": m, "p_a": r.value })).collect::<Vec<_>>(),
    });
    if a.stability {
        let fine = p_a(&fam, Method::Grid, &opts.doubled())?;
        let d = (fine.value - runs[0].value).abs();
        summary["doubled_grid_p_a"] = json!(fine.value);
        summary["doubled_grid_change"] = json!(d);
        if d >= METHOD_TOL {
            report.fail(format!("doubled grid moves p_A by {d:.3e}"));
        }
    }
    if UnitaryFamily::standard() == fam && p >= 1.0 - METHOD_TOL {
        report.fail(format!("p_A = {p} is not below 1 − 1e-3"));
    }
    report.summary = summary;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BabeArg {
    Unentangled,
    SinglePair,
    AllPairs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BabeConceal {
    #[arg(long, default_value = "standard")]
    pub family: String,
    /// Pair counts, comma-separated.
    #[arg(long = "n", default_value = "1,2,4,8")]
    pub ns: List<usize>,
    #[arg(long, value_enum, default_value_t = BabeArg::SinglePair)]
    pub strategy: BabeArg,
}

#[derive(Serialize)]
struct ConcealOut {
    #[serde(flatten)]
    row: qbc5::babe::ConcealRow,
    within_bound: bool,
    matches_exact: bool,
}

pub fn babe_conceal(a: &BabeConceal, c: &Common) -> Result<Report> {
    let fam = family(&a.family)?;
    let strategy = match a.strategy {
        BabeArg::Unentangled => BabeStrategy::Unentangled,
        BabeArg::SinglePair => BabeStrategy::SinglePair,
        BabeArg::AllPairs => BabeStrategy::AllPairsJoint,
    };
    let mut report = Report::new(
        "babe-conceal",
        json!({ "seed": c.seed, "trials": c.trials, "args": a }),
        &[
            "n",
            "strategy",
            "rate",
            "band",
            "bound",
            "exact",
            "within_bound",
            "matches_exact",
        ],
    );
    for &n in &a.ns.0 {
        let row = conceal_row(
            &fam,
            n,
            strategy,
            c.trials,
            c.seed.wrapping_add(n as u64),
            c.exec.into(),
        )?;
        let within_bound = row.rate <= row.bound + row.band;
        let matches_exact = (row.rate - row.exact).abs() <= row.band + 1e-12;
        if !within_bound {
            report.fail(format!(
                "n={n}: rate {:.5} exceeds bound {:.5} + {:.5}",
                row.rate, row.bound, row.band
            ));
        }
        if !matches_exact {
            report.fail(format!("n={n}: rate {:.5} vs exact {:.5}", row.rate, row.exact));
        }
        report.push(&ConcealOut {
            row,
            within_bound,
            matches_exact,
        });
    }
    Ok(report)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Ensemble {
    /// Ensemble sizes N.
    #[arg(long = "total", visible_alias = "N", default_value = "100")]
    pub totals: List<u64>,
    /// Untested fractions α; n = round(α N).
    #[arg(long = "alpha", default_value = "0.1,0.2,0.5")]
    pub alphas: List<f64>,
    /// Illegal-state counts m.
    #[arg(long = "m", default_value = "1,5,10,20")]
    pub ms: List<u64>,
    #[arg(long = "delta", default_value = "0.5,0.75")]
    pub deltas: List<f64>,
}

#[derive(Serialize)]
struct EnsembleOut {
    #[serde(flatten)]
    row: qbc5::ensemble::EnsembleRow,
    in_regime: bool,
    within_bound: bool,
    simulation_agrees: bool,
}

pub fn ensemble(a: &Ensemble, c: &Common) -> Result<Report> {
    let mut report = Report::new(
        "ensemble",
        json!({ "seed": c.seed, "trials": c.trials, "args": a }),
        &[
            "N",
            "n",
            "m",
            "delta",
            "alpha",
            "exact",
            "bound",
            "empirical",
            "band",
            "in_regime",
            "within_bound",
            "simulation_agrees",
        ],
    );
    let mut stream = 0u64;
    for &total in &a.totals.0 {
        for &alpha in &a.alphas.0 {
            let n = (alpha * total as f64).round() as u64;
            for &m in &a.ms.0 {
                for &delta in &a.deltas.0 {
                    let p = EnsembleParams::new(total, n, m, delta)?;
                    let row = ensemble_row(&p, c.trials, c.seed.wrapping_add(stream), c.exec.into())?;
                    stream += 1;
                    let out = EnsembleOut {
                        in_regime: row.in_regime(),
                        within_bound: row.within_bound(),
                        simulation_agrees: row.simulation_agrees(),
                        row,
                    };
                    let tag = format!("N={total} n={n} m={m} δ={delta}");
                    if out.in_regime && !out.within_bound {
                        report.fail(format!(
                            "{tag}: exact {:.6} exceeds bound {:.6}",
                            out.row.exact, out.row.bound
                        ));
                    }
                    if !out.simulation_agrees {
                        report.fail(format!(
                            "{tag}: simulation {:.6} vs exact {:.6}",
                            out.row.empirical, out.row.exact
                        ));
                    }
                    report.push(&out);
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelArg {
    Unconditional,
    Partitioned,
    Both,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Game {
    #[arg(long = "p-a", default_value = "0.1,0.3")]
    pub p_as: List<f64>,
    #[arg(long = "p-c", default_value = "1,0.5,0.1")]
    pub p_cs: List<f64>,
    #[arg(long = "p-d", default_value = "0.5,0.9")]
    pub p_ds: List<f64>,
    /// Trial horizons.
    #[arg(long = "n", default_value = "1,10,100")]
    pub ns: List<u64>,
    /// Detections survived before losing.
    #[arg(long, default_value_t = 0)]
    pub n_c: u32,
    #[arg(long, value_enum, default_value_t = ModelArg::Both)]
    pub model: ModelArg,
}

#[derive(Serialize, Default)]
struct GameOut {
    p_a: f64,
    p_c: f64,
    p_d: f64,
    n: u64,
    n_c: u32,
    model: &'static str,
    valid: bool,
    closed_c: f64,
    closed_a: f64,
    closed_d: f64,
    oracle_c: Option<f64>,
    oracle_a: Option<f64>,
    oracle_d: Option<f64>,
    residual: Option<f64>,
    sim_c: Option<f64>,
    sim_a: Option<f64>,
    sim_d: Option<f64>,
    closed_vs_oracle: Option<f64>,
}

const CONSERVATION_TOL: f64 = 1e-12;

pub fn game(a: &Game, c: &Common) -> Result<Report> {
    let models: &[Model] = match a.model {
        ModelArg::Unconditional => &[Model::Unconditional],
        ModelArg::Partitioned => &[Model::Partitioned],
        ModelArg::Both => &[Model::Unconditional, Model::Partitioned],
    };
    let mut report = Report::new(
        "game",
        json!({ "seed": c.seed, "trials": c.trials, "args": a }),
        &[
            "p_a",
            "p_c",
            "p_d",
            "n",
            "n_c",
            "model",
            "valid",
            "closed_c",
            "closed_a",
            "closed_d",
            "oracle_c",
            "oracle_a",
            "oracle_d",
            "residual",
            "sim_c",
            "sim_a",
            "sim_d",
            "closed_vs_oracle",
        ],
    );
    let mut stream = 0u64;
    for &p_a in &a.p_as.0 {
        for &p_c in &a.p_cs.0 {
            for &p_d in &a.p_ds.0 {
                for &n in &a.ns.0 {
                    let p = GameParams::new(p_a, p_c, p_d, n)?.with_allowed_detections(a.n_c);
                    let closed = closed_form(&p)?;
                    for &model in models {
                        stream += 1;
                        let tag = format!("{} p_a={p_a} p_c={p_c} p_d={p_d} n={n}", model.name());
                        let mut row = GameOut {
                            p_a,
                            p_c,
                            p_d,
                            n,
                            n_c: a.n_c,
                            model: model.name(),
                            closed_c: closed.p_c,
                            closed_a: closed.p_a,
                            closed_d: closed.p_d,
                            ..GameOut::default()
                        };
                        let Ok(o) = markov_oracle(&p, model) else {
                            report.push(&row);
                            continue;
                        };
                        let t = game_simulate(&p, model, c.trials, c.seed.wrapping_add(stream), c.exec.into())?;
                        let e = t.dist();
                        let diff = [closed.p_c - o.p_c, closed.p_a - o.p_a, closed.p_d - o.p_d]
                            .iter()
                            .fold(0.0f64, |m, x| m.max(x.abs()));
                        row = GameOut {
                            valid: true,
                            oracle_c: Some(o.p_c),
                            oracle_a: Some(o.p_a),
                            oracle_d: Some(o.p_d),
                            residual: Some(o.residual),
                            sim_c: Some(e.p_c),
                            sim_a: Some(e.p_a),
                            sim_d: Some(e.p_d),
                            closed_vs_oracle: Some(diff),
                            ..row
                        };
                        if (o.total() - 1.0).abs() > CONSERVATION_TOL {
                            report.fail(format!("{tag}: oracle mass {}", o.total()));
                        }
                        if a.n_c == 0 {
                            for (name, x, y) in [("C", e.p_c, o.p_c), ("A", e.p_a, o.p_a), ("D", e.p_d, o.p_d)] {
                                if (x - y).abs() > t.band(y) + 1e-12 {
                                    report.fail(format!("{tag}: simulated P_{name} {x:.5} vs oracle {y:.5}"));
                                }
                            }
                        }
                        if model == Model::Unconditional && p_c == 1.0 && diff > CONSERVATION_TOL {
                            report.fail(format!("{tag}: closed form off the oracle by {diff:.3e} at p_c = 1"));
                        }
                        report.push(&row);
                    }
                }
            }
        }
    }
    Ok(report)
}
