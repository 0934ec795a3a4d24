//! Box-constrained quasi-Newton minimisation with finite-difference
//! gradients, used by the least-squares competitors.
//!
//! Each iteration fixes the coordinates that sit on a bound with the
//! gradient pushing outwards, takes a BFGS step in the remaining ones and
//! backtracks along the projected path.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundedSettings {
    pub max_iter: usize,
    /// Stop when the projected gradient is below `gradient_tol * (1 + |f|)`.
    pub gradient_tol: f64,
    /// Stop when the relative decrease of f over one step is below this.
    pub value_tol: f64,
}

impl Default for BoundedSettings {
    fn default() -> Self {
        Self {
            max_iter: 500,
            gradient_tol: 1e-8,
            value_tol: 1e-14,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundedOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

fn project(x: &mut [f64], lo: &[f64], hi: &[f64]) {
    for i in 0..x.len() {
        x[i] = x[i].clamp(lo[i], hi[i]);
    }
}

fn gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64], fx: f64, lo: &[f64], hi: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        let h = 1e-6 * x[i].abs().max(1e-2);
        let up = (x[i] + h).min(hi[i]);
        let dn = (x[i] - h).max(lo[i]);
        probe[i] = up;
        let fu = if up > x[i] { f(&probe) } else { fx };
        probe[i] = dn;
        let fd = if dn < x[i] { f(&probe) } else { fx };
        probe[i] = x[i];
        g[i] = if up > dn { (fu - fd) / (up - dn) } else { 0.0 };
        if !g[i].is_finite() {
            // One-sided difference away from an infeasible neighbour.
            g[i] = if fu.is_finite() && up > x[i] {
                (fu - fx) / (up - x[i])
            } else if fd.is_finite() && dn < x[i] {
                (fx - fd) / (x[i] - dn)
            } else {
                0.0
            };
        }
    }
    g
}

/// Minimises `f` over the box `[lo, hi]` starting from `x0` (projected
/// into the box). Non-finite values of `f` are treated as infeasible.
pub fn minimize_bounded(
    f: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    lo: &[f64],
    hi: &[f64],
    settings: &BoundedSettings,
) -> BoundedOutcome {
    let n = x0.len();
    let mut x = x0.to_vec();
    project(&mut x, lo, hi);
    let mut fx = f(&x);
    if !fx.is_finite() {
        return BoundedOutcome {
            x,
            value: fx,
            converged: false,
            iterations: 0,
        };
    }
    let mut g = gradient(f, &x, fx, lo, hi);
    let mut hinv = identity(n);
    let mut last_active: Vec<bool> = vec![false; n];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < settings.max_iter {
        iterations += 1;
        let active: Vec<bool> = (0..n)
            .map(|i| (x[i] <= lo[i] && g[i] > 0.0) || (x[i] >= hi[i] && g[i] < 0.0))
            .collect();
        let pg = (0..n)
            .filter(|&i| !active[i])
            .map(|i| g[i].abs())
            .fold(0.0f64, f64::max);
        if pg <= settings.gradient_tol * (1.0 + fx.abs()) {
            converged = true;
            break;
        }
        if active != last_active {
            hinv = identity(n);
            last_active = active.clone();
        }
        let mut d = vec![0.0; n];
        for i in 0..n {
            if active[i] {
                continue;
            }
            for j in 0..n {
                if !active[j] {
                    d[i] -= hinv[i][j] * g[j];
                }
            }
        }
        let mut slope: f64 = (0..n).map(|i| d[i] * g[i]).sum();
        if !(slope < 0.0) {
            hinv = identity(n);
            for i in 0..n {
                d[i] = if active[i] { 0.0 } else { -g[i] };
            }
            slope = (0..n).map(|i| d[i] * g[i]).sum();
        }
        // Backtracking along the projected path.
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let mut trial: Vec<f64> = (0..n).map(|i| x[i] + t * d[i]).collect();
            project(&mut trial, lo, hi);
            let ft = f(&trial);
            let moved: f64 = (0..n).map(|i| g[i] * (trial[i] - x[i])).sum();
            if ft.is_finite() && ft <= fx + 1e-4 * moved {
                accepted = Some((trial, ft));
                break;
            }
            t *= 0.5;
        }
        let Some((xn, fnew)) = accepted else {
            // No descent left at the resolution of the finite differences.
            converged = pg <= 1e-4 * (1.0 + fx.abs());
            break;
        };
        let gn = gradient(f, &xn, fnew, lo, hi);
        let s: Vec<f64> = (0..n).map(|i| xn[i] - x[i]).collect();
        let y: Vec<f64> = (0..n).map(|i| gn[i] - g[i]).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        if sy
            > 1e-12
                * s.iter().map(|v| v * v).sum::<f64>().sqrt()
                * y.iter().map(|v| v * v).sum::<f64>().sqrt()
        {
            bfgs_update(&mut hinv, &s, &y, sy);
        }
        let decrease = fx - fnew;
        x = xn;
        fx = fnew;
        g = gn;
        if decrease <= settings.value_tol * (1.0 + fx.abs()) {
            converged = true;
            break;
        }
    }
    BoundedOutcome {
        x,
        value: fx,
        converged,
        iterations,
    }
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn bfgs_update(h: &mut [Vec<f64>], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| h[i][j] * y[j]).sum())
        .collect();
    let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
    for i in 0..n {
        for j in 0..n {
            h[i][j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}
