//! Dense BFGS with a backtracking Armijo line search.

use nalgebra::{DMatrix, DVector};

#[derive(Clone, Copy, Debug)]
pub struct BfgsOptions {
    pub max_iters: usize,
    /// Stop once the gradient infinity-norm falls below this.
    pub grad_tol: f64,
    /// Stop once the objective falls below this.
    pub f_target: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            grad_tol: 1e-14,
            f_target: 0.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub iters: usize,
}

/// Minimizes `f`, where `f(x, grad)` returns the value and writes the
/// gradient into `grad`.
pub fn bfgs<F>(mut f: F, x0: &[f64], opts: BfgsOptions) -> Minimum
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    let mut x = DVector::from_column_slice(x0);
    let mut g = DVector::zeros(n);
    let mut fx = f(x.as_slice(), g.as_mut_slice());
    let mut h = DMatrix::<f64>::identity(n, n);
    let mut x_new = DVector::zeros(n);
    let mut g_new = DVector::zeros(n);
    let mut iters = 0;

    while iters < opts.max_iters {
        if fx <= opts.f_target || g.amax() < opts.grad_tol {
            break;
        }
        iters += 1;
        let mut dir = -(&h * &g);
        let mut slope = g.dot(&dir);
        if slope >= 0.0 {
            // lost descent; restart from steepest descent
            h.fill_with_identity();
            dir = -g.clone();
            slope = -g.norm_squared();
        }

        let mut alpha = 1.0;
        let mut f_new = f64::INFINITY;
        let mut accepted = false;
        for _ in 0..60 {
            x_new.copy_from(&x);
            x_new.axpy(alpha, &dir, 1.0);
            f_new = f(x_new.as_slice(), g_new.as_mut_slice());
            if f_new.is_finite() && f_new <= fx + 1e-4 * alpha * slope {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            if h == DMatrix::identity(n, n) {
                break;
            }
            h.fill_with_identity();
            continue;
        }

        let s = &x_new - &x;
        let y = &g_new - &g;
        let sy = s.dot(&y);
        if sy > 1e-300 {
            if iters == 1 {
                // Shanno-Phua scaling of the initial inverse Hessian
                h *= sy / y.norm_squared();
            }
            let rho = 1.0 / sy;
            let hy = &h * &y;
            let yhy = y.dot(&hy);
            // H+ = H - rho (s hy^T + hy s^T) + (rho^2 yHy + rho) s s^T
            h.ger(-rho, &s, &hy, 1.0);
            h.ger(-rho, &hy, &s, 1.0);
            h.ger(rho * rho * yhy + rho, &s, &s, 1.0);
        }
        std::mem::swap(&mut x, &mut x_new);
        std::mem::swap(&mut g, &mut g_new);
        fx = f_new;
    }

    Minimum {
        x: x.as_slice().to_vec(),
        f: fx,
        iters,
    }
}
