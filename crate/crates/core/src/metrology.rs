//! Rotation sensing with the projector onto the initial state.
//!
//! Everything here works in the frame where the rotation axis is `z`: with
//! `chi = R^dagger psi` and weights `w_m = |chi_m|^2`, the overlap after a
//! rotation by `omega` is `f(omega) = sum_m w_m e^{-i omega m}`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::csvfmt::fixed;
use crate::majorana::{chordal_distance, Constellation};
use crate::spin::{spin_moments, two_m_of, RotationAxis, Rotator, SpinState};
use crate::{Error, Result};

/// Eigenvalue weights of a state along one axis.
#[derive(Clone, Debug)]
struct AxisWeights {
    m: Vec<f64>,
    w: Vec<f64>,
}

impl AxisWeights {
    fn new(state: &SpinState, axis: RotationAxis) -> Self {
        let two_s = state.two_s();
        let frame = Rotator::new(two_s, axis).to_axis_frame(state.amplitudes());
        Self {
            m: (0..frame.len()).map(|i| 0.5 * two_m_of(two_s, i) as f64).collect(),
            w: frame.iter().map(|c| c.norm_sqr()).collect(),
        }
    }

    /// `(Re f, Im f, Re f', Im f')`.
    fn overlap(&self, omega: f64) -> (f64, f64, f64, f64) {
        let (mut re, mut im, mut dre, mut dim) = (0.0, 0.0, 0.0, 0.0);
        for (&m, &w) in self.m.iter().zip(&self.w) {
            let (s, c) = (omega * m).sin_cos();
            // w e^{-i omega m} and its derivative -i m w e^{-i omega m}
            re += w * c;
            im -= w * s;
            dre -= w * m * s;
            dim -= w * m * c;
        }
        (re, im, dre, dim)
    }

    fn probability(&self, omega: f64) -> f64 {
        let (re, im, _, _) = self.overlap(omega);
        re * re + im * im
    }

    /// `1 - |f|^2` summed pairwise so that it keeps full relative precision
    /// when the rotation is small.
    fn loss(&self, omega: f64) -> f64 {
        let n = self.m.len();
        let mut acc = 0.0;
        for a in 0..n {
            for b in (a + 1)..n {
                let s = (0.5 * omega * (self.m[a] - self.m[b])).sin();
                acc += 4.0 * self.w[a] * self.w[b] * s * s;
            }
        }
        acc
    }

    fn derivative(&self, omega: f64) -> f64 {
        let (re, im, dre, dim) = self.overlap(omega);
        2.0 * (re * dre + im * dim)
    }
}

/// `|<psi| exp(-i omega u.S) |psi>|^2`.
pub fn projection_probability(state: &SpinState, axis: RotationAxis, omega: f64) -> f64 {
    AxisWeights::new(state, axis).probability(omega)
}

/// Analytic `d<P>/d omega`.
pub fn dprojection_domega(state: &SpinState, axis: RotationAxis, omega: f64) -> f64 {
    AxisWeights::new(state, axis).derivative(omega)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub axis: RotationAxis,
    pub omega: f64,
    pub p_mean: f64,
    pub p_std: f64,
    pub dp_domega: f64,
    pub delta_omega: f64,
}

/// `Delta omega = Delta P / |d<P>/d omega|` at a finite rotation angle.
///
/// At `omega = 0` both numerator and denominator vanish; use
/// [`small_angle_sensitivity`] for that limit.
pub fn sensitivity(state: &SpinState, axis: RotationAxis, omega: f64) -> Result<SensitivityReport> {
    if omega == 0.0 {
        return Err(Error::ZeroAngle);
    }
    let weights = AxisWeights::new(state, axis);
    let loss = weights.loss(omega).clamp(0.0, 1.0);
    let p_mean = 1.0 - loss;
    let p_std = (p_mean * loss).sqrt();
    let dp_domega = weights.derivative(omega);
    if dp_domega == 0.0 && p_std == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok(SensitivityReport {
        axis,
        omega,
        p_mean,
        p_std,
        dp_domega,
        delta_omega: p_std / dp_domega.abs(),
    })
}

/// The `omega -> 0` limit of [`sensitivity`]: `1 / (2 sqrt(Var(u.S)))`.
pub fn small_angle_sensitivity(state: &SpinState, axis: RotationAxis) -> Result<f64> {
    let s = state.spin();
    let var = spin_moments(state).variance_along(axis.vector());
    if var <= 1e-12 * s * (s + 1.0) {
        return Err(Error::ZeroVariance);
    }
    Ok(0.5 / var.sqrt())
}

/// Axis-independent small-angle sensitivity of a state whose first and
/// second moments are isotropic: `(sqrt 3 / 2) / sqrt(S(S+1))`.
pub fn kings_formula(two_s: u32) -> f64 {
    let s = two_s as f64 / 2.0;
    3f64.sqrt() / 2.0 / (s * (s + 1.0)).sqrt()
}

/// Small-angle sensitivity of the NOON state about an axis at polar angle
/// `theta_cap`: `(1 / sqrt 2) / sqrt(2 S^2 cos^2 + S sin^2)`.
pub fn noon_formula(two_s: u32, theta_cap: f64) -> f64 {
    let s = two_s as f64 / 2.0;
    let (sin, cos) = theta_cap.sin_cos();
    std::f64::consts::FRAC_1_SQRT_2 / (2.0 * s * s * cos * cos + s * sin * sin).sqrt()
}

/// `cos Theta` at which the NOON state stops outperforming the King
/// formula, found by bisection on `Theta` in `[0, pi/2]`.
pub fn noon_crossover(two_s: u32) -> Result<f64> {
    if two_s < 2 {
        return Err(Error::InvalidParameter(format!("crossover needs two_s >= 2, got {two_s}")));
    }
    let target = kings_formula(two_s);
    let gap = |t: f64| noon_formula(two_s, t) - target;
    let (mut lo, mut hi) = (0.0, std::f64::consts::FRAC_PI_2);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok((0.5 * (lo + hi)).cos())
}

/// `<P>` on a grid of angles for several axes.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisScan {
    pub axes: Vec<RotationAxis>,
    pub omegas: Vec<f64>,
    /// `p_mean[axis][omega]`.
    pub p_mean: Vec<Vec<f64>>,
}

/// A local maximum of `<P>` close to one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Revival {
    pub index: usize,
    pub omega: f64,
    pub p_mean: f64,
}

pub fn axis_scan(state: &SpinState, axes: &[RotationAxis], omegas: &[f64]) -> AxisScan {
    let p_mean = axes
        .par_iter()
        .map(|&axis| {
            let weights = AxisWeights::new(state, axis);
            omegas.iter().map(|&w| weights.probability(w)).collect()
        })
        .collect();
    AxisScan {
        axes: axes.to_vec(),
        omegas: omegas.to_vec(),
        p_mean,
    }
}

impl AxisScan {
    /// Grid points of one axis where `<P>` is a local maximum above
    /// `1 - tol`. Endpoints count if they beat their single neighbour.
    pub fn revivals(&self, axis_index: usize, tol: f64) -> Vec<Revival> {
        let row = &self.p_mean[axis_index];
        let n = row.len();
        (0..n)
            .filter(|&i| {
                let left = i == 0 || row[i] >= row[i - 1];
                let right = i + 1 == n || row[i] >= row[i + 1];
                left && right && row[i] > 1.0 - tol
            })
            .map(|i| Revival {
                index: i,
                omega: self.omegas[i],
                p_mean: row[i],
            })
            .collect()
    }

    /// `axis_index,theta_cap,phi_cap,omega,p_mean`, one line per grid point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("axis_index,theta_cap,phi_cap,omega,p_mean\n");
        for (a, (axis, row)) in self.axes.iter().zip(&self.p_mean).enumerate() {
            for (omega, p) in self.omegas.iter().zip(row) {
                writeln!(out, "{a},{},{},{},{}", fixed(axis.theta_cap), fixed(axis.phi_cap), fixed(*omega), fixed(*p))
                    .unwrap();
            }
        }
        out
    }
}

/// `n + 1` equally spaced angles from `lo` to `hi` inclusive.
pub fn omega_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![lo];
    }
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

/// Largest `k <= k_max` such that a rotation by `2 pi / k` maps the state
/// onto itself (`<P> > 1 - tol`); 1 if there is none.
pub fn rotational_order(state: &SpinState, axis: RotationAxis, k_max: u32, tol: f64) -> u32 {
    let weights = AxisWeights::new(state, axis);
    (2..=k_max)
        .rev()
        .find(|&k| weights.loss(2.0 * std::f64::consts::PI / k as f64) < tol)
        .unwrap_or(1)
}

/// Axes through the distinct Majorana points.
pub fn vertex_axes(constellation: &Constellation) -> Vec<RotationAxis> {
    constellation
        .distinct_points(1e-6)
        .into_iter()
        .map(|(v, _)| RotationAxis::from_vector(v))
        .collect()
}

/// Outward normals of the faces of the convex hull of the Majorana points.
///
/// Coplanar triangles (faces with more than three vertices) give one
/// normal. Points must span three dimensions; otherwise the hull has no
/// faces and the result is empty.
pub fn facet_normals(constellation: &Constellation) -> Vec<RotationAxis> {
    const EPS: f64 = 1e-9;
    let pts: Vec<[f64; 3]> = constellation
        .distinct_points(1e-6)
        .into_iter()
        .map(|(v, _)| v)
        .collect();
    let n = pts.len();
    let mut normals: Vec<[f64; 3]> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let Some(mut nrm) = plane_normal(pts[i], pts[j], pts[k]) else {
                    continue;
                };
                let mut d = dot(nrm, pts[i]);
                if d < 0.0 {
                    nrm = nrm.map(|c| -c);
                    d = -d;
                }
                if pts.iter().all(|&p| dot(nrm, p) <= d + EPS)
                    && !normals.iter().any(|&m| chordal_distance(m, nrm) < 1e-6)
                {
                    normals.push(nrm);
                }
            }
        }
    }
    normals.into_iter().map(RotationAxis::from_vector).collect()
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn plane_normal(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> Option<[f64; 3]> {
    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    let x = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    let r = dot(x, x).sqrt();
    (r > 1e-9).then(|| x.map(|c| c / r))
}

/// One row of a sensitivity table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub two_s: u32,
    pub axis: RotationAxis,
    pub delta_omega_numeric: f64,
    pub delta_omega_formula: f64,
}

/// `S,theta_cap,phi_cap,delta_omega_numeric,delta_omega_formula`.
pub fn sensitivity_csv(rows: &[SensitivityRow]) -> String {
    let mut out = String::from("S,theta_cap,phi_cap,delta_omega_numeric,delta_omega_formula\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            format_spin(r.two_s),
            fixed(r.axis.theta_cap),
            fixed(r.axis.phi_cap),
            fixed(r.delta_omega_numeric),
            fixed(r.delta_omega_formula)
        )
        .unwrap();
    }
    out
}

/// `S` as written in tables: `3` or `5/2`.
pub fn format_spin(two_s: u32) -> String {
    if two_s % 2 == 0 {
        (two_s / 2).to_string()
    } else {
        format!("{two_s}/2")
    }
}
