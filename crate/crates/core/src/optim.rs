//! Derivative-free simplex search followed by a quasi-Newton polish.
//!
//! Objectives are minimised over an unconstrained vector; callers map
//! constrained parameters through smooth transforms first. Non-finite
//! objective values are treated as `+inf`.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimOptions {
    /// Relative change in the objective that counts as converged.
    pub f_tol: f64,
    pub max_iter: usize,
    /// Initial simplex edge length.
    pub simplex_step: f64,
}

impl Default for OptimOptions {
    fn default() -> Self {
        OptimOptions { f_tol: 1e-8, max_iter: 500, simplex_step: 0.25 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub f_start: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn eval<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64]) -> f64 {
    let v = f(x);
    if v.is_finite() {
        v
    } else {
        f64::INFINITY
    }
}

fn rel_change(a: f64, b: f64) -> f64 {
    (a - b).abs() / (a.abs().max(b.abs()).max(1e-12))
}

pub fn nelder_mead<F: Fn(&[f64]) -> f64>(f: &F, x0: &[f64], opts: &OptimOptions) -> OptimResult {
    let n = x0.len();
    let f_start = eval(f, x0);
    if n == 0 {
        return OptimResult { x: vec![], fx: f_start, f_start, iterations: 0, converged: true };
    }
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += opts.simplex_step * x0[i].abs().max(1.0);
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(f, v)).collect();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        if values[n].is_finite() && rel_change(values[0], values[n]) < opts.f_tol {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n).map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[n]).map(|(c, w)| c + t * (c - w)).collect() };

        let xr = along(alpha);
        let fr = eval(f, &xr);
        if fr < values[0] {
            let xe = along(gamma);
            let fe = eval(f, &xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
        } else {
            let (xc, fc) = if fr < values[n] {
                let xc = along(rho);
                let fc = eval(f, &xc);
                (xc, fc)
            } else {
                let xc = along(-rho);
                let fc = eval(f, &xc);
                (xc, fc)
            };
            if fc < values[n].min(fr) {
                simplex[n] = xc;
                values[n] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=n {
                    for j in 0..n {
                        simplex[i][j] = best[j] + sigma * (simplex[i][j] - best[j]);
                    }
                    values[i] = eval(f, &simplex[i]);
                }
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    OptimResult { x: simplex[best].clone(), fx: values[best], f_start, iterations, converged }
}

/// Central-difference gradient.
pub fn numeric_gradient<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        let h = 1e-6 * x[i].abs().max(1.0);
        xp[i] = x[i] + h;
        let fp = eval(f, &xp);
        xp[i] = x[i] - h;
        let fm = eval(f, &xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

/// Central-difference Hessian with per-coordinate steps `h`.
pub fn numeric_hessian<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], h: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut hess = vec![vec![0.0; n]; n];
    let f0 = f(x);
    let mut xp = x.to_vec();
    for i in 0..n {
        xp[i] = x[i] + h[i];
        let fp = f(&xp);
        xp[i] = x[i] - h[i];
        let fm = f(&xp);
        xp[i] = x[i];
        hess[i][i] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for j in 0..i {
            let mut quad = [0.0; 4];
            for (k, (si, sj)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)].iter().enumerate() {
                xp[i] = x[i] + si * h[i];
                xp[j] = x[j] + sj * h[j];
                quad[k] = f(&xp);
            }
            xp[i] = x[i];
            xp[j] = x[j];
            let v = (quad[0] - quad[1] - quad[2] + quad[3]) / (4.0 * h[i] * h[j]);
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    hess
}

/// BFGS with backtracking line search and finite-difference gradients.
pub fn bfgs<F: Fn(&[f64]) -> f64>(f: &F, x0: &[f64], max_iter: usize, f_tol: f64) -> OptimResult {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = eval(f, &x);
    let f_start = fx;
    if n == 0 || !fx.is_finite() {
        return OptimResult { x, fx, f_start, iterations: 0, converged: n == 0 };
    }
    let identity = |n: usize| -> Vec<Vec<f64>> {
        (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
    };
    let mut hinv = identity(n);
    let mut g = numeric_gradient(f, &x);
    let mut iterations = 0;
    let mut converged = false;
    let mut stalls = 0;
    while iterations < max_iter {
        iterations += 1;
        let gnorm = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if gnorm < 1e-9 * (1.0 + fx.abs()) {
            converged = true;
            break;
        }
        let mut d: Vec<f64> = (0..n).map(|i| -(0..n).map(|j| hinv[i][j] * g[j]).sum::<f64>()).collect();
        let mut slope: f64 = d.iter().zip(&g).map(|(a, b)| a * b).sum();
        if !(slope < 0.0) {
            hinv = identity(n);
            d = g.iter().map(|v| -v).collect();
            slope = -g.iter().map(|v| v * v).sum::<f64>();
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let xn: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + step * b).collect();
            let fxn = eval(f, &xn);
            if fxn <= fx + 1e-4 * step * slope {
                accepted = Some((xn, fxn));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fxn)) = accepted else {
            // no descent along the quasi-Newton direction: restart once, then stop
            if hinv != identity(n) {
                hinv = identity(n);
                continue;
            }
            converged = true;
            break;
        };
        let gn = numeric_gradient(f, &xn);
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        if sy > 1e-12 {
            let hy: Vec<f64> = (0..n).map(|i| (0..n).map(|j| hinv[i][j] * y[j]).sum()).collect();
            let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
            for i in 0..n {
                for j in 0..n {
                    hinv[i][j] += ((sy + yhy) * s[i] * s[j]) / (sy * sy) - (hy[i] * s[j] + s[i] * hy[j]) / sy;
                }
            }
        }
        let change = rel_change(fx, fxn);
        x = xn;
        fx = fxn;
        g = gn;
        if change < f_tol {
            stalls += 1;
            if stalls >= 3 {
                converged = true;
                break;
            }
        } else {
            stalls = 0;
        }
    }
    OptimResult { x, fx, f_start, iterations, converged }
}

/// Simplex search, then a BFGS polish from the simplex optimum.
pub fn minimize<F: Fn(&[f64]) -> f64>(f: &F, x0: &[f64], opts: &OptimOptions) -> OptimResult {
    let nm = nelder_mead(f, x0, opts);
    let polish = bfgs(f, &nm.x, opts.max_iter, 1e-13);
    let (x, fx) = if polish.fx <= nm.fx { (polish.x, polish.fx) } else { (nm.x, nm.fx) };
    OptimResult {
        x,
        fx,
        f_start: nm.f_start,
        iterations: nm.iterations + polish.iterations,
        converged: polish.converged || nm.converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn minimizes_rosenbrock() {
        let r = minimize(&rosenbrock, &[-1.2, 1.0], &OptimOptions::default());
        assert!((r.x[0] - 1.0).abs() < 1e-4, "{:?}", r);
        assert!((r.x[1] - 1.0).abs() < 1e-4);
        assert!(r.fx <= r.f_start);
    }

    #[test]
    fn quadratic_bowl() {
        let f = |x: &[f64]| (x[0] - 3.0).powi(2) + 2.0 * (x[1] + 1.0).powi(2) + 0.5 * (x[2]).powi(2);
        let r = minimize(&f, &[0.0, 0.0, 1.0], &OptimOptions::default());
        assert!(r.converged);
        assert!((r.x[0] - 3.0).abs() < 1e-6);
        assert!((r.x[1] + 1.0).abs() < 1e-6);
    }

    #[test]
    fn gradient_matches_analytic() {
        let f = |x: &[f64]| x[0].sin() * x[1].exp();
        let x = [0.3, -0.2];
        let g = numeric_gradient(&f, &x);
        assert!((g[0] - x[0].cos() * x[1].exp()).abs() < 1e-8);
        assert!((g[1] - x[0].sin() * x[1].exp()).abs() < 1e-8);
    }

    #[test]
    fn infinite_region_is_avoided() {
        let f = |x: &[f64]| if x[0] <= 0.0 { f64::NAN } else { x[0] - x[0].ln() };
        let r = minimize(&f, &[3.0], &OptimOptions::default());
        assert!((r.x[0] - 1.0).abs() < 1e-5);
    }
}
