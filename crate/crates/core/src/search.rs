//! Derivative-free Nelder–Mead minimization with simplex restarts.

use std::cell::Cell;

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    /// Stop once the best value drops to this level.
    pub f_target: f64,
    /// Stop a round once the simplex diameter falls below this.
    pub x_tol: f64,
    pub max_evals: usize,
    /// Fresh simplices built around the incumbent after a round stalls.
    pub restarts: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.1,
            f_target: 1e-15,
            x_tol: 1e-13,
            max_evals: 4000,
            restarts: 6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

pub fn nelder_mead(f: impl Fn(&[f64]) -> f64, x0: &[f64], opts: &NelderMeadOptions) -> Minimum {
    let evals = Cell::new(0usize);
    let eval = |x: &[f64]| {
        evals.set(evals.get() + 1);
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut best_x = x0.to_vec();
    let mut best = eval(&best_x);
    let mut step = opts.initial_step;
    for _ in 0..=opts.restarts {
        if best <= opts.f_target || evals.get() >= opts.max_evals {
            break;
        }
        let budget = opts.max_evals - evals.get();
        let (x, v) = round(&eval, &best_x, best, step, budget, opts);
        if v < best {
            best = v;
            best_x = x;
        }
        step *= 0.1;
    }
    Minimum {
        x: best_x,
        value: best,
        evals: evals.get(),
    }
}

fn round(
    eval: &impl Fn(&[f64]) -> f64,
    start: &[f64],
    start_value: f64,
    step: f64,
    mut budget: usize,
    opts: &NelderMeadOptions,
) -> (Vec<f64>, f64) {
    let n = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), start_value));
    for i in 0..n {
        let mut x = start.to_vec();
        x[i] += step;
        let v = eval(&x);
        simplex.push((x, v));
    }
    budget = budget.saturating_sub(n);
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&simplex[0].0).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
            .fold(0.0, f64::max);
        if simplex[0].1 <= opts.f_target || diameter < opts.x_tol || budget == 0 {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect()
        };
        let xr = along(REFLECT);
        let fr = eval(&xr);
        budget = budget.saturating_sub(1);
        if fr < simplex[0].1 {
            let xe = along(EXPAND);
            let fe = eval(&xe);
            budget = budget.saturating_sub(1);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let xc = along(CONTRACT);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = along(-CONTRACT);
                let fc = eval(&xc);
                (xc, fc)
            };
            budget = budget.saturating_sub(1);
            if fc < worst.1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for (x, v) in simplex.iter_mut().skip(1) {
                    for (xi, bi) in x.iter_mut().zip(&best) {
                        *xi = bi + SHRINK * (*xi - bi);
                    }
                    *v = eval(x);
                }
                budget = budget.saturating_sub(n);
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}
