//! Acceptance suite: one line per criterion. Exits nonzero on any failure
//! outside [`KNOWN_RED`].
//!
//! Runs without the libtest harness so every line is printed.

use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;

use qbc5::adam::{p_a, simulate_cheat, CheatPlan, Method, OptResult, SearchOptions, Strategy};
use qbc5::babe::{simulate_entangling_babe, single_pair_distinguishability, BabeStrategy};
use qbc5::ensemble::{detection_fail_bound, detection_fail_exact, simulate_ensemble, EnsembleParams};
use qbc5::game::{closed_form, discrepancy, limits, markov_path, GameParams, Model};
use qbc5::par::{fold_trials, stream_rng};
use qbc5::protocol::{run_honest, ProtocolParams, Verdict};
use qbc5::quantum::StateVector;
use qbc5::teleport::{teleport, teleport_branches, teleport_forced, OutcomeLabeling};
use qbc5::{BellOutcome, Execution, UnitaryFamily};

const TRIALS: u64 = 100_000;
const K: f64 = 4.0;
const EXEC: Execution = Execution::Parallel;
/// Criteria that fail for a documented reason; the exit status tracks any
/// change in their state.
const KNOWN_RED: [usize; 1] = [8];

struct Outcome {
    pass: bool,
    detail: String,
    notes: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Outcome {
            pass,
            detail,
            notes: Vec::new(),
        }
    }
}

fn sigma(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

fn teleportation_identity() -> Outcome {
    let fam = UnitaryFamily::standard();
    let mut worst = 1.0f64;
    for (k, m) in fam.members().iter().enumerate() {
        let pair = fam.pair_state(k, "p.1", "p.2");
        for i in BellOutcome::all() {
            let mut rng = stream_rng(1, (4 * k + i.slot()) as u64);
            for _ in 0..100 {
                let phi = StateVector::random(["phi"], &mut rng);
                let rec = teleport_forced(&pair, &phi, i, OutcomeLabeling::standard()).unwrap();
                worst = worst.min(rec.fidelity_with_formula(&m.unitary, &phi).unwrap());
            }
        }
    }
    let counts = fold_trials(
        EXEC,
        2,
        TRIALS,
        || [0u64; 4],
        |acc, rng| {
            let k = rng.random_range(0..fam.len());
            let pair = fam.pair_state(k, "p.1", "p.2");
            let phi = StateVector::random(["phi"], rng);
            acc[teleport(&pair, &phi, rng).unwrap().outcome.slot()] += 1;
        },
        |a, b| std::array::from_fn(|s| a[s] + b[s]),
    );
    let band = K * sigma(0.25, TRIALS);
    let freqs: Vec<f64> = counts.iter().map(|&c| c as f64 / TRIALS as f64).collect();
    let uniform = freqs.iter().all(|f| (f - 0.25).abs() <= band);
    Outcome::new(
        worst >= 1.0 - 1e-10 && uniform,
        format!(
            "min fidelity 1-{:.1e} over 1600 states; outcome frequencies {freqs:.4?} (band ±{band:.4})",
            1.0 - worst
        ),
    )
}

fn completeness() -> Outcome {
    let fam = UnitaryFamily::standard();
    let (mut runs, mut rejected, mut min_overlap) = (0, 0, 1.0f64);
    for n in [1, 2, 4] {
        for stages in [1, 2] {
            for bit in 0..2u8 {
                for seed in 0..100u64 {
                    let params = ProtocolParams::new(n, stages, fam.clone(), seed).unwrap();
                    let t = run_honest(&params, bit, &mut stream_rng(seed, 7)).unwrap();
                    runs += 1;
                    rejected += usize::from(t.verdict() != Verdict::Accept);
                    min_overlap = t.verification.overlaps.iter().copied().fold(min_overlap, f64::min);
                }
            }
        }
    }
    Outcome::new(
        rejected == 0 && min_overlap >= 1.0 - 1e-10,
        format!("{runs} honest runs, {rejected} rejected, min overlap {min_overlap:.12}"),
    )
}

fn unentangled_concealment() -> Outcome {
    let fam = UnitaryFamily::standard();
    // her view is (k, i); compare its law under b = 0 and b = 1
    let mut tv = 0.0;
    for (k, m) in fam.members().iter().enumerate() {
        let pair = fam.pair_state(k, "p.1", "p.2");
        let p0 = teleport_branches(&pair, &StateVector::bit("a", 0), OutcomeLabeling::standard()).unwrap();
        let p1 = teleport_branches(&pair, &StateVector::bit("a", 1), OutcomeLabeling::standard()).unwrap();
        tv += 0.5 * m.weight * p0.iter().zip(&p1).map(|(a, b)| (a.0 - b.0).abs()).sum::<f64>();
    }
    let est = simulate_entangling_babe(&fam, 1, BabeStrategy::Unentangled, TRIALS, 3, EXEC).unwrap();
    Outcome::new(
        tv <= 1e-12 && est.consistent_with(0.5, K),
        format!(
            "view distance {tv:.1e}; guess rate {:.4} (band ±{:.4})",
            est.rate(),
            K * est.sigma_at(0.5)
        ),
    )
}

fn entangled_single_pair() -> Outcome {
    let fam = UnitaryFamily::standard();
    let values: Vec<f64> = BellOutcome::all()
        .iter()
        .map(|&i| single_pair_distinguishability(&fam, i).unwrap().value)
        .collect();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    Outcome::new(min > 0.5 + 1e-3, format!("Helstrom guess per outcome {values:.5?}"))
}

fn concealing_bound() -> Outcome {
    let fam = UnitaryFamily::standard();
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [1usize, 2, 4, 8] {
        let est = simulate_entangling_babe(&fam, n, BabeStrategy::SinglePair, TRIALS, 10 + n as u64, EXEC).unwrap();
        let bound = 0.5 + 0.5 / n as f64;
        let ok = est.rate() <= bound + K * est.sigma_at(est.rate());
        pass &= ok;
        parts.push(format!("n={n} {:.4}≤{bound:.4}", est.rate()));
    }
    let mut out = Outcome::new(pass, format!("single-pair strategy: {}", parts.join(", ")));
    let mut joint = Vec::new();
    for n in [2usize, 3, 4] {
        let est = simulate_entangling_babe(&fam, n, BabeStrategy::AllPairsJoint, TRIALS, 20 + n as u64, EXEC).unwrap();
        let bound = 0.5 + 0.5 / n as f64;
        joint.push(format!(
            "n={n} {:.4} vs bound {bound:.4}{}",
            est.rate(),
            if est.rate() > bound + K * est.sigma_at(est.rate()) {
                " (exceeds)"
            } else {
                ""
            }
        ));
    }
    out.notes.push(format!(
        "info, all pairs entangled and measured jointly: {}",
        joint.join(", ")
    ));
    out
}

fn best_of(results: &[OptResult], s: Strategy) -> &OptResult {
    results
        .iter()
        .filter(|r| r.strategy == s)
        .max_by(|a, b| a.value.total_cmp(&b.value))
        .unwrap()
}

fn binding() -> Outcome {
    let fam = UnitaryFamily::standard();
    let opts = SearchOptions::default();
    let grid = p_a(&fam, Method::Grid, &opts).unwrap();
    let restarts = p_a(&fam, Method::Restarts, &opts).unwrap();
    let gap = grid
        .results
        .iter()
        .zip(&restarts.results)
        .map(|(a, b)| (a.value - b.value).abs())
        .fold(0.0f64, f64::max);
    let mut control = 0.0f64;
    for m in fam.members() {
        let single = UnitaryFamily::single(&m.name, m.unitary);
        control = control.max((p_a(&single, Method::Grid, &opts).unwrap().value - 1.0).abs());
    }
    let mut mc_ok = true;
    let mut parts = Vec::new();
    for (n, s) in Strategy::ALL.into_iter().enumerate() {
        let best = best_of(&grid.results, s);
        let plan = CheatPlan::optimized(s, &fam, best.i, best.b, &opts).unwrap();
        let p = plan.expected(&fam);
        let est = simulate_cheat(&plan, &fam, 1, TRIALS, 30 + n as u64, EXEC);
        mc_ok &= est.consistent_with(p, K);
        parts.push(format!("{} {p:.4}/{:.4}", s.name(), est.rate()));
    }
    let p = grid.value.max(restarts.value);
    Outcome::new(
        p < 1.0 - 1e-3 && gap <= 1e-3 && control <= 1e-6 && mc_ok,
        format!(
            "p_A {p:.6} ({}); method gap {gap:.1e}; single-member |p_A-1| {control:.1e}; formula/MC {}",
            grid.best.strategy.name(),
            parts.join(", ")
        ),
    )
}

fn amplification() -> Outcome {
    let fam = UnitaryFamily::standard();
    let opts = SearchOptions::default();
    let report = p_a(&fam, Method::Grid, &opts).unwrap();
    let best = &report.best;
    let plan = CheatPlan::optimized(best.strategy, &fam, best.i, best.b, &opts).unwrap();
    let p = plan.expected(&fam);
    let mut pass = (p - report.value).abs() < 1e-9;
    let mut parts = Vec::new();
    for stages in 1..=3u32 {
        let est = simulate_cheat(&plan, &fam, stages, TRIALS, 40 + u64::from(stages), EXEC);
        let target = p.powi(stages as i32);
        pass &= est.consistent_with(target, K);
        parts.push(format!("N={stages} {:.4} vs {target:.4}", est.rate()));
    }
    Outcome::new(pass, format!("p_A {p:.6}: {}", parts.join(", ")))
}

fn sample_and_test() -> Outcome {
    let (mut rows, mut violations, mut mc_bad) = (0, Vec::new(), 0);
    let mut stream = 0;
    for total in [100u64, 1000] {
        for alpha in [0.05, 0.1, 0.2, 0.5] {
            let n = (alpha * total as f64).round() as u64;
            for m in [1u64, 2, 5, 10, 20, 50, 100] {
                if (m as f64) * alpha < 1.0 - 1e-12 {
                    continue;
                }
                for delta in [0.1, 0.25, 0.5, 0.75, 0.9] {
                    let p = EnsembleParams::new(total, n, m, delta).unwrap();
                    let exact = detection_fail_exact(&p).unwrap();
                    let bound = detection_fail_bound(p.alpha(), delta).unwrap();
                    stream += 1;
                    let est = simulate_ensemble(&p, TRIALS, 500 + stream, EXEC).unwrap();
                    rows += 1;
                    mc_bad += usize::from(!est.consistent_with(exact, K));
                    if exact > bound + 1e-12 {
                        violations.push((total, n, m, delta, m as f64 * alpha, exact, bound));
                    }
                }
            }
        }
    }
    let mut out = Outcome::new(
        violations.is_empty() && mc_bad == 0,
        format!(
            "{rows} rows with mα≥1; exact>bound in {}; Monte Carlo outside 4σ in {mc_bad}",
            violations.len()
        ),
    );
    let boundary = violations.iter().filter(|v| (v.4 - 1.0).abs() < 1e-9).count();
    out.notes.push(format!(
        "violations at mα=1: {boundary}, at mα>1: {}",
        violations.len() - boundary
    ));
    for v in violations.iter().take(12) {
        out.notes.push(format!(
            "N={} n={} m={} δ={} mα={:.2}: exact {:.6e} > bound {:.6e}",
            v.0, v.1, v.2, v.3, v.4, v.5, v.6
        ));
    }
    out
}

fn checking_game() -> Outcome {
    let grid = [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0];
    let mut worst_closed = 0.0f64;
    let mut worst_mass = 0.0f64;
    for &a in &grid {
        for &d in &grid {
            if a + d <= 1.0 {
                let p = GameParams::new(a, 1.0, d, 100).unwrap();
                for (t, o) in markov_path(&p, Model::Unconditional).unwrap().iter().enumerate() {
                    let c = closed_form(&GameParams { n: t as u64 + 1, ..p }).unwrap();
                    worst_closed = worst_closed
                        .max((c.p_c - o.p_c).abs())
                        .max((c.p_a - o.p_a).abs())
                        .max((c.p_d - o.p_d).abs());
                }
            }
            for &c in &grid {
                let p = GameParams::new(a, c, d, 100).unwrap();
                for model in [Model::Unconditional, Model::Partitioned] {
                    if let Ok(path) = markov_path(&p, model) {
                        worst_mass = path.iter().fold(worst_mass, |m, o| m.max((o.total() - 1.0).abs()));
                    }
                }
            }
        }
    }
    let rows = limits(0.3, 0.5, &[1e-2, 1e-4, 1e-6, 1e-8, 1e-9], 1_000_000).unwrap();
    let last = rows.last().unwrap();
    let closed_limit = last.cheat <= 1e-3 && (1.0 - last.legal) <= 1e-3;
    let oracle_limit = rows[1].oracle_cheat <= 1e-3 && (1.0 - rows[1].oracle_legal) <= 1e-3;
    let mut out = Outcome::new(
        worst_closed <= 1e-12 && worst_mass <= 1e-12 && closed_limit && oracle_limit,
        format!(
            "p_c=1 closed vs oracle {worst_closed:.1e}; mass error {worst_mass:.1e}; at n=1e6 closed (P_C, P_A)=({:.1e}, {:.6}) at p_c=1e-9, oracle ({:.1e}, {:.6}) at p_c=1e-4",
            last.cheat, last.legal, rows[1].oracle_cheat, rows[1].oracle_legal
        ),
    );
    out.notes.push(
        "p_c<1 table: p_a p_c p_d n | closed P_C oracle P_C | closed P_A oracle P_A | closed P_D oracle P_D".into(),
    );
    for (a, c, d, n) in [
        (0.1, 0.5, 0.5, 10),
        (0.1, 0.1, 0.5, 10),
        (0.3, 0.5, 0.9, 100),
        (0.5, 0.01, 0.5, 1000),
    ] {
        let r = discrepancy(&GameParams::new(a, c, d, n).unwrap()).unwrap();
        out.notes.push(format!(
            "{a} {c} {d} {n} | {:.6} {:.6} | {:.6} {:.6} | {:.6} {:.6}",
            r.closed_c, r.oracle_c, r.closed_a, r.oracle_a, r.closed_d, r.oracle_d
        ));
    }
    out.notes.push(format!(
        "closed P_C at n=1e6 by p_c: {}",
        rows.iter()
            .map(|r| format!("{:.0e}→{:.4}", r.p_c, r.cheat))
            .collect::<Vec<_>>()
            .join(", ")
    ));
    out
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("teleportation identity", teleportation_identity),
        ("completeness", completeness),
        ("unentangled concealment", unentangled_concealment),
        ("entangled single pair", entangled_single_pair),
        ("concealing bound", concealing_bound),
        ("binding", binding),
        ("amplification", amplification),
        ("sample-and-test bound", sample_and_test),
        ("checking game", checking_game),
    ];
    let mut failed = Vec::new();
    for (n, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = f();
        println!(
            "criterion {} [{}] {name}: {} ({:.1}s)",
            n + 1,
            match (o.pass, KNOWN_RED.contains(&(n + 1))) {
                (true, _) => "PASS",
                (false, false) => "FAIL",
                (false, true) => "FAIL, known",
            },
            o.detail,
            t.elapsed().as_secs_f64()
        );
        for note in &o.notes {
            println!("    {note}");
        }
        if !o.pass {
            failed.push(n + 1);
        }
    }
    let unexpected: Vec<usize> = failed.iter().copied().filter(|n| !KNOWN_RED.contains(n)).collect();
    let fixed: Vec<usize> = KNOWN_RED.iter().copied().filter(|n| !failed.contains(n)).collect();
    println!(
        "acceptance: {}/9 pass; failing {failed:?}; known red {KNOWN_RED:?}",
        9 - failed.len()
    );
    if !fixed.is_empty() {
        println!("acceptance: known-red criteria now pass, update the list: {fixed:?}");
    }
    if unexpected.is_empty() && fixed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected failures {unexpected:?}");
        ExitCode::FAILURE
    }
}
