//! Interior-point Fisher scoring over the nine spectral parameters.
//!
//! Strictly positive scale-like parameters are optimised on a log scale;
//! the remaining parameters keep their natural scale and are held inside
//! their box by a logarithmic barrier whose weight shrinks as the iterates
//! settle. An extra barrier keeps the minimum angular width σ_l − σ_r
//! non-negative.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::LikelihoodEvaluation;
use crate::{Param, Parameters, N_PARAMS};

/// How one parameter is represented during optimisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Transform {
    /// θ = shift + exp(u); the bound `shift` is never reached.
    Log { shift: f64 },
    /// θ = u with a barrier on each finite side.
    Box { lower: f64, upper: f64 },
}

impl Transform {
    fn to_internal(self, v: f64) -> f64 {
        match self {
            Transform::Log { shift } => (v - shift).ln(),
            Transform::Box { .. } => v,
        }
    }

    fn from_internal(self, u: f64) -> f64 {
        match self {
            Transform::Log { shift } => shift + u.exp(),
            Transform::Box { .. } => u,
        }
    }

    /// dθ/du
    fn jacobian(self, u: f64) -> f64 {
        match self {
            Transform::Log { .. } => u.exp(),
            Transform::Box { .. } => 1.0,
        }
    }

    pub fn lower(self) -> f64 {
        match self {
            Transform::Log { shift } => shift,
            Transform::Box { lower, .. } => lower,
        }
    }

    pub fn upper(self) -> f64 {
        match self {
            Transform::Log { .. } => f64::INFINITY,
            Transform::Box { upper, .. } => upper,
        }
    }
}

/// Parameter space used by the optimisers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterBounds {
    pub transforms: [Transform; N_PARAMS],
    /// Require σ_l ≥ σ_r so the angular width stays non-negative at every
    /// frequency.
    pub ordered_widths: bool,
}

impl Default for ParameterBounds {
    fn default() -> Self {
        use std::f64::consts::PI;
        let inf = f64::INFINITY;
        Self {
            transforms: [
                Transform::Log { shift: 0.0 },
                Transform::Log { shift: 0.0 },
                Transform::Box {
                    lower: 1.0,
                    upper: inf,
                },
                Transform::Log { shift: 1.0 },
                Transform::Box {
                    lower: -inf,
                    upper: inf,
                },
                Transform::Box {
                    lower: 0.0,
                    upper: 2.0 * PI,
                },
                Transform::Box {
                    lower: 0.0,
                    upper: inf,
                },
                Transform::Box {
                    lower: 0.0,
                    upper: inf,
                },
                Transform::Box {
                    lower: 0.0,
                    upper: inf,
                },
            ],
            ordered_widths: true,
        }
    }
}

impl ParameterBounds {
    pub fn lower(&self, p: Param) -> f64 {
        self.transforms[p as usize].lower()
    }

    pub fn upper(&self, p: Param) -> f64 {
        self.transforms[p as usize].upper()
    }

    /// Pulls every coordinate strictly inside its bounds by at least
    /// `margin` (relative to the bound scale), and fixes the width order.
    pub fn interior(&self, theta: &Parameters, margin: f64) -> Parameters {
        let mut v = theta.to_array();
        for (x, t) in v.iter_mut().zip(self.transforms.iter()) {
            let lo = t.lower();
            let hi = t.upper();
            if lo.is_finite() {
                let m = margin * lo.abs().max(1.0);
                if *x < lo + m {
                    *x = lo + m;
                }
            }
            if hi.is_finite() {
                let m = margin * hi.abs().max(1.0);
                if *x > hi - m {
                    *x = hi - m;
                }
            }
        }
        if self.ordered_widths {
            let (l, r) = (Param::SigmaL as usize, Param::SigmaR as usize);
            let m = margin;
            if v[l] - v[r] < m {
                v[r] = (v[l] - m).max(0.5 * v[l]);
                if v[l] - v[r] < m {
                    v[l] = v[r] + m;
                }
            }
        }
        Parameters::from_array(v)
    }

    /// True when `theta` lies inside the parameter space (closed bounds).
    pub fn contains(&self, theta: &Parameters) -> bool {
        let v = theta.to_array();
        let boxes = v
            .iter()
            .zip(self.transforms.iter())
            .all(|(&x, t)| x.is_finite() && x >= t.lower() && x <= t.upper());
        boxes && (!self.ordered_widths || v[Param::SigmaL as usize] >= v[Param::SigmaR as usize])
    }

    /// Flags coordinates within `tol` of a finite bound.
    pub fn boundary_flags(&self, theta: &Parameters, tol: f64) -> [bool; N_PARAMS] {
        let v = theta.to_array();
        std::array::from_fn(|i| {
            let t = self.transforms[i];
            (t.lower().is_finite() && v[i] - t.lower() <= tol)
                || (t.upper().is_finite() && t.upper() - v[i] <= tol)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerSettings {
    pub max_iter: usize,
    /// Stop once half the squared Fisher-scaled gradient norm falls below this.
    pub gradient_tol: f64,
    /// Stop when the accepted step is shorter than this (internal coordinates).
    pub step_tol: f64,
    pub armijo: f64,
    pub fraction_to_boundary: f64,
    pub barrier_initial: f64,
    pub barrier_min: f64,
    pub barrier_decrease: f64,
    /// Largest change of any internal coordinate per step.
    pub max_step: f64,
    /// Distance to a bound below which an estimate is flagged.
    pub boundary_tol: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            max_iter: 200,
            gradient_tol: 1e-6,
            step_tol: 1e-10,
            armijo: 1e-4,
            fraction_to_boundary: 0.995,
            barrier_initial: 1e-1,
            barrier_min: 1e-8,
            barrier_decrease: 0.1,
            max_step: 1.0,
            boundary_tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerOutcome {
    pub theta: Parameters,
    /// Objective without the barrier.
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Fisher-scaled norm sqrt(gᵀ H⁻¹ g) of the barrier objective gradient.
    pub gradient_norm: f64,
    pub message: String,
}

struct Barrier<'a> {
    bounds: &'a ParameterBounds,
    free: &'a [usize],
}

impl Barrier<'_> {
    /// Slacks with their gradient direction in internal coordinates (all
    /// barrier terms act on Box coordinates, where u = θ).
    fn slacks(&self, theta: &[f64; N_PARAMS]) -> Vec<(f64, Vec<(usize, f64)>)> {
        let mut out = Vec::new();
        for &i in self.free {
            if let Transform::Box { lower, upper } = self.bounds.transforms[i] {
                if lower.is_finite() {
                    out.push((theta[i] - lower, vec![(i, 1.0)]));
                }
                if upper.is_finite() {
                    out.push((upper - theta[i], vec![(i, -1.0)]));
                }
            }
        }
        let (l, r) = (Param::SigmaL as usize, Param::SigmaR as usize);
        let box_like = |i: usize| matches!(self.bounds.transforms[i], Transform::Box { .. });
        if self.bounds.ordered_widths && box_like(l) && box_like(r) {
            let mut terms = Vec::new();
            if self.free.contains(&l) {
                terms.push((l, 1.0));
            }
            if self.free.contains(&r) {
                terms.push((r, -1.0));
            }
            if !terms.is_empty() {
                out.push((theta[l] - theta[r], terms));
            }
        }
        out
    }

    fn value(&self, theta: &[f64; N_PARAMS], mu: f64) -> f64 {
        let mut acc = 0.0;
        for (s, _) in self.slacks(theta) {
            if !(s > 0.0) {
                return f64::NEG_INFINITY;
            }
            acc += s.ln();
        }
        mu * acc
    }
}

/// Maximises `eval` from `init`. `eval(theta, true)` must return the value,
/// gradient and expected information; `eval(theta, false)` only the value.
pub fn maximize<F>(
    eval: F,
    init: &Parameters,
    bounds: &ParameterBounds,
    fixed: &[bool; N_PARAMS],
    settings: &OptimizerSettings,
) -> Result<OptimizerOutcome>
where
    F: Fn(&Parameters, bool) -> Result<LikelihoodEvaluation>,
{
    let free: Vec<usize> = (0..N_PARAMS).filter(|&i| !fixed[i]).collect();
    if free.is_empty() {
        let e = eval(init, false)?;
        return Ok(OptimizerOutcome {
            theta: *init,
            value: e.value,
            converged: true,
            iterations: 0,
            gradient_norm: 0.0,
            message: "all parameters fixed".into(),
        });
    }
    let start = init.to_array();
    let barrier = Barrier {
        bounds,
        free: &free,
    };
    if barrier.value(&start, 1.0) == f64::NEG_INFINITY {
        return Err(Error::InvalidParameter {
            name: "init",
            reason: "initial parameters must lie strictly inside the bounds".into(),
        });
    }
    let tr = &bounds.transforms;
    let to_theta = |u: &[f64; N_PARAMS]| -> [f64; N_PARAMS] {
        std::array::from_fn(|i| tr[i].from_internal(u[i]))
    };
    let mut u: [f64; N_PARAMS] = std::array::from_fn(|i| tr[i].to_internal(start[i]));
    for i in 0..N_PARAMS {
        if fixed[i] {
            u[i] = start[i];
        }
    }
    let theta_of = |u: &[f64; N_PARAMS]| -> [f64; N_PARAMS] {
        let t = to_theta(u);
        std::array::from_fn(|i| if fixed[i] { start[i] } else { t[i] })
    };

    let mut mu = settings.barrier_initial;
    let mut iterations = 0;
    let mut current = eval(&Parameters::from_array(theta_of(&u)), true)?;
    if !current.value.is_finite() {
        return Err(Error::NumericalConsistency(format!(
            "objective is not finite at the initial parameters (singular at {:?})",
            current.singular_at
        )));
    }
    let mut gradient_norm = f64::INFINITY;
    let mut message = String::from("iteration limit reached");
    let mut converged = false;

    while iterations < settings.max_iter {
        iterations += 1;
        let theta = theta_of(&u);
        let g_theta = current.gradient.expect("gradient requested");
        let fisher = current.fisher.expect("information requested");
        let m = free.len();
        let jac: Vec<f64> = free.iter().map(|&i| tr[i].jacobian(u[i])).collect();

        let mut grad = DVector::<f64>::zeros(m);
        let mut hess = DMatrix::<f64>::zeros(m, m);
        for (a, &i) in free.iter().enumerate() {
            grad[a] = jac[a] * g_theta[i];
            for (b, &k) in free.iter().enumerate() {
                hess[(a, b)] = 2.0 * fisher[i][k] * jac[a] * jac[b];
            }
        }
        for (s, terms) in barrier.slacks(&theta) {
            for &(i, ci) in &terms {
                let a = free.iter().position(|&f| f == i).expect("free coordinate");
                grad[a] += mu * ci / s;
                for &(k, ck) in &terms {
                    let b = free.iter().position(|&f| f == k).expect("free coordinate");
                    hess[(a, b)] += mu * ci * ck / (s * s);
                }
            }
        }

        let step = solve_positive(&hess, &grad);
        let decrement2 = grad.dot(&step);
        gradient_norm = decrement2.max(0.0).sqrt();
        if !step.iter().all(|v| v.is_finite()) {
            message = "search direction is not finite".into();
            break;
        }
        if mu <= settings.barrier_min && 0.5 * decrement2 < settings.gradient_tol {
            converged = true;
            message = "gradient tolerance reached".into();
            break;
        }

        let mut dir = [0.0; N_PARAMS];
        for (a, &i) in free.iter().enumerate() {
            dir[i] = step[a];
        }
        let biggest = dir.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if biggest > settings.max_step {
            for v in dir.iter_mut() {
                *v *= settings.max_step / biggest;
            }
        }
        // Fraction to the boundary for every barrier slack.
        let mut t_max = 1.0f64;
        for (s, terms) in barrier.slacks(&theta) {
            let ds: f64 = terms.iter().map(|&(i, c)| c * dir[i]).sum();
            if ds < 0.0 {
                t_max = t_max.min(settings.fraction_to_boundary * s / -ds);
            }
        }
        let slope: f64 = free
            .iter()
            .enumerate()
            .map(|(a, &i)| grad[a] * dir[i])
            .sum();
        let phi0 = current.value + barrier.value(&theta, mu);
        let mut t = t_max;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: [f64; N_PARAMS] = std::array::from_fn(|i| u[i] + t * dir[i]);
            let th = theta_of(&trial);
            let b = barrier.value(&th, mu);
            if b > f64::NEG_INFINITY {
                let e = eval(&Parameters::from_array(th), false)?;
                if e.value.is_finite() && e.value + b >= phi0 + settings.armijo * t * slope {
                    accepted = Some((trial, t));
                    break;
                }
            }
            t *= 0.5;
            if t * biggest.min(settings.max_step) < settings.step_tol {
                break;
            }
        }
        let Some((trial, t)) = accepted else {
            // Predicted gains at the level of rounding in the objective.
            let noise = 1e-10 * (1.0 + phi0.abs());
            if 0.5 * decrement2 <= settings.gradient_tol.max(noise) {
                if mu > settings.barrier_min {
                    mu = (mu * settings.barrier_decrease).max(settings.barrier_min);
                    continue;
                }
                converged = true;
                message = "no further ascent possible".into();
            } else {
                message = format!(
                    "line search failed (decrement {:.3e}, barrier {mu:.1e})",
                    0.5 * decrement2
                );
            }
            break;
        };
        let step_len = t * dir.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        u = trial;
        current = eval(&Parameters::from_array(theta_of(&u)), true)?;
        if 0.5 * decrement2 < settings.gradient_tol.max(mu) {
            mu = (mu * settings.barrier_decrease).max(settings.barrier_min);
        }
        if step_len < settings.step_tol && mu <= settings.barrier_min {
            converged = 0.5 * decrement2 < settings.gradient_tol.sqrt();
            message = "step tolerance reached".into();
            break;
        }
    }
    let theta = Parameters::from_array(theta_of(&u));
    Ok(OptimizerOutcome {
        theta,
        value: current.value,
        converged,
        iterations,
        gradient_norm,
        message,
    })
}

/// Solves H x = g for symmetric positive semi-definite H, adding a ridge
/// when Cholesky fails.
pub(crate) fn solve_positive(h: &DMatrix<f64>, g: &DVector<f64>) -> DVector<f64> {
    let m = h.nrows();
    let scale = (0..m)
        .map(|i| h[(i, i)].abs())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let mut ridge = 0.0;
    for _ in 0..20 {
        let mut a = h.clone();
        for i in 0..m {
            a[(i, i)] += ridge;
        }
        if let Some(ch) = a.cholesky() {
            return ch.solve(g);
        }
        ridge = if ridge == 0.0 {
            1e-12 * scale
        } else {
            ridge * 10.0
        };
    }
    DVector::from_element(m, f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transforms_round_trip() {
        let b = ParameterBounds::default();
        let th = Parameters::scenario1();
        for (i, t) in b.transforms.iter().enumerate() {
            let v = th.to_array()[i];
            assert!((t.from_internal(t.to_internal(v)) - v).abs() < 1e-14);
        }
    }

    #[test]
    fn interior_moves_off_bounds() {
        let b = ParameterBounds::default();
        let th = Parameters::scenario3()
            .with(Param::SigmaR, 0.0)
            .with(Param::Beta, 2.0 * std::f64::consts::PI);
        let inside = b.interior(&th, 1e-3);
        assert!(inside.gamma > 1.0);
        assert!(inside.sigma_r > 0.0);
        assert!(inside.beta < 2.0 * std::f64::consts::PI);
        assert!(inside.sigma_l > inside.sigma_r);
    }

    #[test]
    fn concave_quadratic_with_active_bound() {
        // Maximise -(γ - 0.5)² - (ν - 2)²: the γ optimum sits on γ = 1.
        let eval = |th: &Parameters, full: bool| -> Result<LikelihoodEvaluation> {
            let value = -(th.gamma - 0.5).powi(2) - (th.nu - 2.0).powi(2);
            let mut g = [0.0; N_PARAMS];
            g[Param::Gamma as usize] = -2.0 * (th.gamma - 0.5);
            g[Param::Nu as usize] = -2.0 * (th.nu - 2.0);
            let mut f = [[0.0; N_PARAMS]; N_PARAMS];
            f[Param::Gamma as usize][Param::Gamma as usize] = 1.0;
            f[Param::Nu as usize][Param::Nu as usize] = 1.0;
            Ok(LikelihoodEvaluation {
                value,
                gradient: full.then_some(g),
                fisher: full.then_some(f),
                singular_at: None,
            })
        };
        let mut fixed = [true; N_PARAMS];
        fixed[Param::Gamma as usize] = false;
        fixed[Param::Nu as usize] = false;
        let out = maximize(
            eval,
            &Parameters::scenario1(),
            &ParameterBounds::default(),
            &fixed,
            &OptimizerSettings::default(),
        )
        .unwrap();
        assert!(out.converged, "{}", out.message);
        assert!((out.theta.gamma - 1.0).abs() < 1e-6);
        assert!((out.theta.nu - 2.0).abs() < 1e-6);
        assert_eq!(out.theta.alpha, 0.7);
    }
}
