//! Global search over SU(2) and over the Bloch sphere.
//!
//! Two schemes are provided so each can check the other: an axis-angle grid
//! followed by Nelder–Mead from the best grid points, and Nelder–Mead from
//! random starting points alone.

use std::f64::consts::{PI, TAU};

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::formulas::{bloch, OverlapSum, Qubit};
use crate::par::{self, stream_rng, Execution};
use crate::quantum::Unitary2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Axis-angle grid, then local refinement from the best points.
    Grid,
    /// Local refinement from random starting points only.
    Restarts,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Points of the Fibonacci mesh of rotation axes.
    pub axes: usize,
    /// Rotation angles per axis, evenly spaced in `[0, 2π)`.
    pub angles: usize,
    /// Grid points refined by Nelder–Mead.
    pub top: usize,
    /// Random starts for [`Method::Restarts`].
    pub restarts: usize,
    /// Bloch-sphere points for searches over an input state.
    pub phi_points: usize,
    pub max_iters: u64,
    pub seed: u64,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            axes: 400,
            angles: 64,
            top: 10,
            restarts: 20,
            phi_points: 48,
            max_iters: 400,
            seed: 0x5eed,
            exec: Execution::Parallel,
        }
    }
}

impl SearchOptions {
    /// Twice the resolution along each grid dimension.
    pub fn doubled(&self) -> Self {
        SearchOptions {
            axes: self.axes * 4,
            angles: self.angles * 2,
            phi_points: self.phi_points * 4,
            ..*self
        }
    }

    /// Small grid for inner searches nested inside an outer one.
    fn light(&self) -> Self {
        SearchOptions {
            axes: (self.axes / 8).max(24),
            angles: (self.angles / 4).max(8),
            top: 3,
            restarts: (self.restarts / 4).max(4),
            ..*self
        }
    }
}

/// Best point found by a search over SU(2).
#[derive(Debug, Clone)]
pub struct Su2Optimum {
    pub value: f64,
    pub v: Unitary2,
    /// Best raw grid value, before refinement (equals `value` for restarts).
    pub grid_value: f64,
    pub evaluations: u64,
}

/// `n` nearly uniform unit vectors.
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - (2 * k + 1) as f64 / n as f64;
            let r = (1.0 - z * z).sqrt();
            let t = golden * k as f64;
            [r * t.cos(), r * t.sin(), z]
        })
        .collect()
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Estimated covering radius (chordal) of the Fibonacci mesh, probed with a
/// mesh sixteen times denser.
pub fn covering_radius(n: usize) -> f64 {
    let mesh = fibonacci_sphere(n);
    let probes = fibonacci_sphere(16 * n);
    let probe_gap = 2.0 * (PI / (16 * n) as f64).sqrt();
    probes
        .iter()
        .map(|p| mesh.iter().map(|m| dist(p, m)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
        + probe_gap
}

/// Operator-norm distance from any SU(2) element to the nearest grid point.
pub fn grid_radius(axes: usize, angles: usize) -> f64 {
    PI / (2.0 * angles as f64) + covering_radius(axes)
}

/// Rotation vector `r` (axis × angle) to a unitary.
pub fn rotation_vector(r: &[f64]) -> Unitary2 {
    let angle = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    Unitary2::rotation([r[0], r[1], r[2]], angle)
}

struct Negated<F>(F);

impl<F: Fn(&[f64]) -> f64> CostFunction for Negated<F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Vec<f64>) -> Result<f64, argmin::core::Error> {
        Ok(-(self.0)(x))
    }
}

/// Local maximization of `f` from `x0` with an initial simplex of size
/// `step`. Returns the best point, its value and the evaluations used.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], step: f64, max_iters: u64) -> (Vec<f64>, f64, u64) {
    let mut simplex = vec![x0.to_vec()];
    for d in 0..x0.len() {
        let mut x = x0.to_vec();
        x[d] += step;
        simplex.push(x);
    }
    let start = f(x0);
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-14)
        .expect("tolerance is positive");
    match Executor::new(Negated(&f), solver)
        .configure(|s| s.max_iters(max_iters))
        .run()
    {
        Ok(res) => {
            let st = res.state();
            let evals = st.get_func_counts().values().sum::<u64>();
            match st.get_best_param() {
                Some(x) if -st.get_best_cost() >= start => (x.clone(), -st.get_best_cost(), evals),
                _ => (x0.to_vec(), start, evals),
            }
        }
        Err(_) => (x0.to_vec(), start, 1),
    }
}

/// Maximizes a function of `V ∈ SU(2)`.
pub fn maximize_su2<F>(f: F, method: Method, opts: &SearchOptions, stream: u64) -> Su2Optimum
where
    F: Fn(&Unitary2) -> f64 + Sync + Send,
{
    let g = |r: &[f64]| f(&rotation_vector(r));
    let starts: Vec<Vec<f64>> = match method {
        Method::Grid => {
            let axes = fibonacci_sphere(opts.axes);
            let angles: Vec<f64> = (0..opts.angles).map(|a| TAU * a as f64 / opts.angles as f64).collect();
            let scored: Vec<(f64, [f64; 3], f64)> = par::map(opts.exec, &axes, |n| {
                angles
                    .iter()
                    .map(|&t| (f(&Unitary2::rotation(*n, t)), *n, t))
                    .fold((f64::NEG_INFINITY, *n, 0.0), |a, b| if b.0 > a.0 { b } else { a })
            });
            // the best angle per axis, then the best axes
            let mut scored = scored;
            scored.sort_by(|a, b| b.0.total_cmp(&a.0));
            let grid_value = scored[0].0;
            let starts: Vec<Vec<f64>> = scored
                .iter()
                .take(opts.top)
                .map(|(_, n, t)| n.iter().map(|c| c * t).collect())
                .collect();
            let best = refine(&g, &starts, opts);
            return Su2Optimum {
                grid_value,
                evaluations: best.2 + (opts.axes * opts.angles) as u64,
                value: best.1,
                v: rotation_vector(&best.0),
            };
        }
        Method::Restarts => {
            let mut rng = stream_rng(opts.seed, stream);
            (0..opts.restarts)
                .map(|_| {
                    let n = random_unit(&mut rng);
                    let t = rng.random::<f64>() * TAU;
                    n.iter().map(|c| c * t).collect()
                })
                .collect()
        }
    };
    let best = refine(&g, &starts, opts);
    Su2Optimum {
        value: best.1,
        v: rotation_vector(&best.0),
        grid_value: best.1,
        evaluations: best.2,
    }
}

fn refine<G: Fn(&[f64]) -> f64 + Sync>(g: &G, starts: &[Vec<f64>], opts: &SearchOptions) -> (Vec<f64>, f64, u64) {
    let runs = par::map(opts.exec, starts, |x0| nelder_mead(g, x0, 0.2, opts.max_iters));
    let evals = runs.iter().map(|r| r.2).sum();
    let (x, v, _) = runs
        .into_iter()
        .fold((Vec::new(), f64::NEG_INFINITY, 0), |a, b| if b.1 > a.1 { b } else { a });
    (x, v, evals)
}

fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let z: f64 = rng.random::<f64>() * 2.0 - 1.0;
    let t: f64 = rng.random::<f64>() * TAU;
    let r = (1.0 - z * z).sqrt();
    [r * t.cos(), r * t.sin(), z]
}

/// Maximizes an [`OverlapSum`] over `V`.
pub fn maximize_overlap(obj: &OverlapSum, method: Method, opts: &SearchOptions, stream: u64) -> Su2Optimum {
    maximize_su2(|v| obj.eval(v), method, opts, stream)
}

/// Best point of a search over an input state and four corrections.
#[derive(Debug, Clone)]
pub struct PhiOptimum {
    pub value: f64,
    /// Bloch angles `(θ, ϕ)` of the input state.
    pub angles: (f64, f64),
    pub phi: Qubit,
    pub v: Vec<Unitary2>,
    pub evaluations: u64,
}

/// Maximizes `h(φ) = Σ_j w_j max_V f_j(φ, V)` over the Bloch sphere, where
/// `build(φ)` yields the weighted objectives `(w_j, f_j)`.
pub fn maximize_over_phi<B>(build: B, method: Method, opts: &SearchOptions, stream: u64) -> PhiOptimum
where
    B: Fn(Qubit) -> Vec<(f64, OverlapSum)> + Sync + Send,
{
    let light = opts.light();
    let inner = |phi: Qubit, o: &SearchOptions| -> (f64, Vec<Unitary2>, u64) {
        let mut total = 0.0;
        let mut vs = Vec::new();
        let mut evals = 0;
        for (idx, (w, obj)) in build(phi).iter().enumerate() {
            let best = maximize_overlap(
                obj,
                method,
                &SearchOptions {
                    exec: Execution::Sequential,
                    ..*o
                },
                stream * 97 + idx as u64,
            );
            total += w * best.value;
            vs.push(best.v);
            evals += best.evaluations;
        }
        (total, vs, evals)
    };
    let h = |x: &[f64]| inner(bloch(x[0], x[1]), &light).0;

    let starts: Vec<[f64; 2]> = match method {
        Method::Grid => {
            let pts: Vec<[f64; 2]> = fibonacci_sphere(opts.phi_points)
                .iter()
                .map(|p| [p[2].clamp(-1.0, 1.0).acos(), p[1].atan2(p[0])])
                .collect();
            let mut scored: Vec<(f64, [f64; 2])> = par::map(opts.exec, &pts, |p| (h(p), *p));
            scored.sort_by(|a, b| b.0.total_cmp(&a.0));
            scored.iter().take(opts.top.min(4)).map(|s| s.1).collect()
        }
        Method::Restarts => {
            let mut rng = stream_rng(opts.seed, stream ^ 0xb10c);
            (0..(opts.restarts / 4).max(3))
                .map(|_| {
                    let n = random_unit(&mut rng);
                    [n[2].acos(), n[1].atan2(n[0])]
                })
                .collect()
        }
    };
    let refined = par::map(opts.exec, &starts, |x0| nelder_mead(h, x0, 0.3, opts.max_iters / 4));
    let (x, _, outer_evals) =
        refined.into_iter().fold(
            (vec![0.0, 0.0], f64::NEG_INFINITY, 0),
            |a, b| if b.1 > a.1 { b } else { a },
        );
    let phi = bloch(x[0], x[1]);
    let (value, v, evals) = inner(phi, opts);
    PhiOptimum {
        value,
        angles: (x[0], x[1]),
        phi,
        v,
        evaluations: evals + outer_evals,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_points_are_unit_and_spread() {
        let pts = fibonacci_sphere(400);
        for p in &pts {
            assert!((dist(p, &[0.0; 3]) - 1.0).abs() < 1e-12);
        }
        let r = covering_radius(400);
        // area per point is 4π/400, so the radius is of order √(π/400)
        assert!(r > 0.05 && r < 0.25, "{r}");
    }

    #[test]
    fn nelder_mead_finds_a_quadratic_peak() {
        let f = |x: &[f64]| 1.0 - (x[0] - 0.3).powi(2) - 2.0 * (x[1] + 0.1).powi(2);
        let (x, v, _) = nelder_mead(f, &[0.0, 0.0], 0.1, 500);
        assert!((v - 1.0).abs() < 1e-10);
        assert!((x[0] - 0.3).abs() < 1e-4 && (x[1] + 0.1).abs() < 1e-4);
    }

    #[test]
    fn finds_a_known_unitary() {
        let target = Unitary2::from_quaternion([0.3, 0.5, -0.6, 0.2]);
        let f = |v: &Unitary2| {
            let t = (target.adjoint() * *v).matrix().trace();
            t.norm_sqr() / 4.0
        };
        let opts = SearchOptions::default();
        for m in [Method::Grid, Method::Restarts] {
            let best = maximize_su2(f, m, &opts, 1);
            assert!((best.value - 1.0).abs() < 1e-9, "{m:?} {}", best.value);
            assert!(best.v.phase_distance(&target) < 1e-4);
        }
    }

    #[test]
    fn grid_value_within_slack_of_refined() {
        let target = Unitary2::from_quaternion([0.9, 0.1, -0.3, 0.2]);
        let f = |v: &Unitary2| (target.adjoint() * *v).matrix().trace().norm_sqr() / 4.0;
        let opts = SearchOptions::default();
        let best = maximize_su2(f, Method::Grid, &opts, 0);
        // f is 1-Lipschitz here: |tr(A)|²/4 changes by at most 2‖ΔV‖/2
        assert!(best.value - best.grid_value <= grid_radius(opts.axes, opts.angles));
    }
}
