//! Small special-function toolbox: log-factorials, Clebsch-Gordan
//! coefficients, Gauss-Legendre nodes and orthonormal spherical harmonics.
//!
//! Angular momenta are passed in doubled units (`two_j = 2j`) throughout so
//! half-integer spins need no fractional indexing.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

const LOG_FACT_LEN: usize = 1024;

fn log_fact_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LOG_FACT_LEN);
        t.push(0.0);
        let mut acc = 0.0;
        for k in 1..LOG_FACT_LEN {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// `ln(n!)`.
pub fn ln_factorial(n: u32) -> f64 {
    let n = n as usize;
    assert!(n < LOG_FACT_LEN, "ln_factorial argument {n} too large");
    log_fact_table()[n]
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: u32, k: u32) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Majorana coefficient `c_m = sqrt((2S)! / ((S-m)! (S+m)!))` for the
/// amplitude at row `index` (m = S - index).
pub fn majorana_coefficient(two_s: u32, index: usize) -> f64 {
    (0.5 * ln_binomial(two_s, index as u32)).exp()
}

/// Converts a doubled half-integer sum into an integer, panicking if the
/// parity is wrong (a triangle/projection bug upstream).
fn half(x: i32) -> i32 {
    debug_assert!(x % 2 == 0, "odd doubled quantity {x}");
    x / 2
}

/// Clebsch-Gordan coefficient `<j1 m1; j2 m2 | J M>` via the Racah formula.
///
/// All arguments are doubled. Returns 0 when selection rules fail.
pub fn clebsch_gordan(two_j1: u32, two_m1: i32, two_j2: u32, two_m2: i32, two_j: u32, two_mj: i32) -> f64 {
    let (j1, j2, j) = (two_j1 as i32, two_j2 as i32, two_j as i32);
    if two_m1 + two_m2 != two_mj {
        return 0.0;
    }
    if two_m1.abs() > j1 || two_m2.abs() > j2 || two_mj.abs() > j {
        return 0.0;
    }
    if (j1 + two_m1) % 2 != 0 || (j2 + two_m2) % 2 != 0 || (j + two_mj) % 2 != 0 {
        return 0.0;
    }
    if j > j1 + j2 || j < (j1 - j2).abs() || (j1 + j2 + j) % 2 != 0 {
        return 0.0;
    }

    let f = |x: i32| ln_factorial(x as u32);
    let a = half(j1 + j2 - j);
    let b = half(j1 - j2 + j);
    let c = half(-j1 + j2 + j);
    let ln_delta = f(a) + f(b) + f(c) - f(half(j1 + j2 + j) + 1);
    let ln_pref = 0.5
        * ((two_j as f64 + 1.0).ln()
            + ln_delta
            + f(half(j1 + two_m1))
            + f(half(j1 - two_m1))
            + f(half(j2 + two_m2))
            + f(half(j2 - two_m2))
            + f(half(j + two_mj))
            + f(half(j - two_mj)));

    // k runs over all values keeping every factorial argument non-negative.
    let d1 = a;
    let d2 = half(j1 - two_m1);
    let d3 = half(j2 + two_m2);
    let e1 = half(j - j2 + two_m1);
    let e2 = half(j - j1 - two_m2);
    let k_min = 0.max(-e1).max(-e2);
    let k_max = d1.min(d2).min(d3);

    let mut sum = 0.0;
    for k in k_min..=k_max {
        let ln_den = f(k) + f(d1 - k) + f(d2 - k) + f(d3 - k) + f(e1 + k) + f(e2 + k);
        let term = (ln_pref - ln_den).exp();
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Orthonormal associated Legendre values `Pbar_l^m(cos theta)` for
/// `0 <= m <= l <= l_max`, including the Condon-Shortley phase, such that
/// `Y_lm = Pbar_l^m e^{i m phi}`. Indexed as `out[l][m]`.
pub fn normalized_legendre(l_max: usize, theta: f64) -> Vec<Vec<f64>> {
    let x = theta.cos();
    let s = theta.sin();
    let mut out: Vec<Vec<f64>> = (0..=l_max).map(|l| vec![0.0; l + 1]).collect();
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    for m in 0..=l_max {
        if m > 0 {
            let mf = m as f64;
            pmm *= -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s;
        }
        out[m][m] = pmm;
        if m + 1 <= l_max {
            out[m + 1][m] = (2.0 * m as f64 + 3.0).sqrt() * x * pmm;
        }
        for l in (m + 2)..=l_max {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            out[l][m] = a * (x * out[l - 1][m] - b * out[l - 2][m]);
        }
    }
    out
}

/// Spherical harmonic `Y_lq(theta, phi)` from a precomputed Legendre table.
pub fn spherical_harmonic(table: &[Vec<f64>], l: usize, q: i32, phi: f64) -> Complex64 {
    let m = q.unsigned_abs() as usize;
    let y = Complex64::from_polar(table[l][m], m as f64 * phi);
    if q >= 0 {
        y
    } else if m % 2 == 0 {
        y.conj()
    } else {
        -y.conj()
    }
}
