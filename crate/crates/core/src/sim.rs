//! Seeded data generators for simulation oracles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::ts_filter::{ArmaGarchParams, VarianceParams};

pub type SimRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_draws<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// ARMA-GARCH path of length `n` after discarding `burn` warm-up draws.
pub fn simulate_arma_garch<R: Rng>(p: &ArmaGarchParams, n: usize, burn: usize, rng: &mut R) -> Vec<f64> {
    let total = n + burn;
    let (l, m) = (p.ar.len(), p.ma.len());
    let ar_sum: f64 = p.ar.iter().sum();
    let mut y = vec![p.mu / (1.0 - ar_sum); total];
    let mut e = vec![0.0; total];
    let mut s2 = match p.variance {
        VarianceParams::Constant { sigma2 } => sigma2,
        VarianceParams::Garch { omega, garch_coef, arch_coef } => omega / (1.0 - garch_coef - arch_coef),
    };
    let mut e2_prev = s2;
    for t in 0..total {
        s2 = match p.variance {
            VarianceParams::Constant { sigma2 } => sigma2,
            VarianceParams::Garch { omega, garch_coef, arch_coef } => omega + garch_coef * s2 + arch_coef * e2_prev,
        };
        let shock = s2.sqrt() * rng.sample::<f64, _>(StandardNormal);
        let mut v = p.mu + shock;
        for i in 0..l {
            if t > i {
                v += p.ar[i] * y[t - 1 - i];
            } else {
                v += p.ar[i] * p.mu / (1.0 - ar_sum);
            }
        }
        for j in 0..m {
            if t > j {
                v += p.ma[j] * e[t - 1 - j];
            }
        }
        y[t] = v;
        e[t] = shock;
        e2_prev = shock * shock;
    }
    y.split_off(burn)
}

/// Bivariate VAR(1) `z_t = c + A z_{t-1} + u_t` with independent unit
/// normal shocks scaled by `sd`.
pub fn simulate_var1<R: Rng>(
    c: [f64; 2],
    a: [[f64; 2]; 2],
    sd: [f64; 2],
    n: usize,
    burn: usize,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    let mut z = [0.0, 0.0];
    let mut x1 = Vec::with_capacity(n);
    let mut x2 = Vec::with_capacity(n);
    for t in 0..n + burn {
        let u1: f64 = rng.sample(StandardNormal);
        let u2: f64 = rng.sample(StandardNormal);
        z = [c[0] + a[0][0] * z[0] + a[0][1] * z[1] + sd[0] * u1, c[1] + a[1][0] * z[0] + a[1][1] * z[1] + sd[1] * u2];
        if t >= burn {
            x1.push(z[0]);
            x2.push(z[1]);
        }
    }
    (x1, x2)
}

/// `(x, y)` with `y_t = beta * x_{t-1} + e_t`, both shocks standard normal.
/// `beta = 0` gives two independent white-noise series.
pub fn lagged_pair<R: Rng>(beta: f64, n: usize, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    let x = normal_draws(rng, n + 1);
    let e = normal_draws(rng, n);
    let y = (0..n).map(|t| beta * x[t] + e[t]).collect();
    (x[1..].to_vec(), y)
}
