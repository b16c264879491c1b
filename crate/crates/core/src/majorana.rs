//! Majorana stellar representation.
//!
//! The coherent-state wave function of a spin-S state is, up to a positive
//! factor, the degree-2S polynomial `sum_m c_m Psi_m z^{S+m}` with
//! `c_m = sqrt((2S)! / ((S-m)! (S+m)!))`. Each root `z` marks one star. Stars
//! are reported as the physical directions at which the Husimi function
//! vanishes: a root `z` sits at polar angle `2 atan(1/|z|)` and azimuth
//! `arg z`. With this orientation a coherent state pointing along `n` has a
//! single star of multiplicity `2S` at `-n`, and roots at complex infinity
//! (missing top-degree terms) are stars at the north pole.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::csvfmt::fixed;
use crate::poly::{self, Root};
use crate::special::majorana_coefficient;
use crate::spin::{wrap_angle, SpinState};
use crate::{Error, Result};

/// Coefficients `a_k`, `k = 0..=2S`, of the Majorana polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct MajoranaPolynomial {
    pub coefficients: Vec<Complex64>,
}

impl MajoranaPolynomial {
    pub fn degree_bound(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        poly::eval(&self.coefficients, z)
    }
}

/// `a_{S+m} = c_m Psi_m`.
pub fn polynomial_from_state(state: &SpinState) -> MajoranaPolynomial {
    let two_s = state.two_s();
    let amps = state.amplitudes();
    let coefficients = (0..=two_s as usize)
        .map(|k| {
            let row = two_s as usize - k;
            amps[row] * majorana_coefficient(two_s, row)
        })
        .collect();
    MajoranaPolynomial { coefficients }
}

/// Point on the unit sphere in spherical angles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct SpherePoint {
    pub theta: f64,
    pub phi: f64,
}

impl From<[f64; 2]> for SpherePoint {
    fn from([theta, phi]: [f64; 2]) -> Self {
        Self { theta, phi }
    }
}

impl From<SpherePoint> for [f64; 2] {
    fn from(p: SpherePoint) -> Self {
        [p.theta, p.phi]
    }
}

impl SpherePoint {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self {
            theta: theta.clamp(0.0, PI),
            phi: wrap_angle(phi),
        }
    }

    pub fn from_vector(v: [f64; 3]) -> Self {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        Self::new((v[2] / r).clamp(-1.0, 1.0).acos(), v[1].atan2(v[0]))
    }

    pub fn vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Star position of polynomial root `z`.
    pub fn from_root(z: Complex64) -> Self {
        let r = z.norm();
        let theta = if r == 0.0 { PI } else { 2.0 * (1.0 / r).atan() };
        let phi = if r == 0.0 { 0.0 } else { z.arg() };
        Self::new(theta, phi)
    }

    /// Linear factor `(alpha z - beta)` vanishing at this star's root;
    /// `alpha = 0` encodes a root at infinity.
    fn linear_factor(&self) -> (Complex64, Complex64) {
        let (s, c) = (self.theta / 2.0).sin_cos();
        (Complex64::new(s, 0.0), Complex64::from_polar(c, self.phi))
    }
}

/// Chordal distance between two unit vectors.
pub fn chordal_distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Majorana constellation of a spin-S state.
///
/// `points` lists the stars of the finite roots; `infinity_multiplicity`
/// counts roots at complex infinity, whose stars sit at the north pole.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constellation {
    pub two_s: u32,
    pub points: Vec<SpherePoint>,
    pub infinity_multiplicity: u32,
}

impl Constellation {
    pub fn new(two_s: u32, points: Vec<SpherePoint>, infinity_multiplicity: u32) -> Result<Self> {
        let c = Self {
            two_s,
            points,
            infinity_multiplicity,
        };
        c.validate()?;
        Ok(c)
    }

    /// Constellation built from `2S` star directions (north-pole stars stay
    /// in `points`).
    pub fn from_directions(two_s: u32, dirs: &[[f64; 3]]) -> Result<Self> {
        Self::new(two_s, dirs.iter().map(|&v| SpherePoint::from_vector(v)).collect(), 0)
    }

    pub fn validate(&self) -> Result<()> {
        let total = self.points.len() + self.infinity_multiplicity as usize;
        if total != self.two_s as usize {
            return Err(Error::PointCount {
                two_s: self.two_s,
                found: total,
            });
        }
        for p in &self.points {
            if !(0.0..=PI).contains(&p.theta) || !(0.0..2.0 * PI).contains(&p.phi) {
                return Err(Error::InvalidParameter(format!(
                    "star ({}, {}) outside theta in [0, pi], phi in [0, 2pi)",
                    p.theta, p.phi
                )));
            }
        }
        Ok(())
    }

    /// All `2S` stars, north-pole stars for infinite roots included.
    pub fn all_points(&self) -> Vec<SpherePoint> {
        let mut out = self.points.clone();
        out.extend(std::iter::repeat(SpherePoint::new(0.0, 0.0)).take(self.infinity_multiplicity as usize));
        out
    }

    pub fn directions(&self) -> Vec<[f64; 3]> {
        self.all_points().iter().map(SpherePoint::vector).collect()
    }

    /// Groups stars closer than `tol` (chordal) into `(direction, count)`.
    pub fn distinct_points(&self, tol: f64) -> Vec<([f64; 3], usize)> {
        let mut groups: Vec<([f64; 3], usize)> = Vec::new();
        for v in self.directions() {
            match groups.iter_mut().find(|(g, _)| chordal_distance(*g, v) < tol) {
                Some((_, n)) => *n += 1,
                None => groups.push((v, 1)),
            }
        }
        groups
    }

    /// Applies a rotation matrix to every star.
    pub fn rotated(&self, rot: &[[f64; 3]; 3]) -> Self {
        let dirs: Vec<[f64; 3]> = self
            .directions()
            .iter()
            .map(|v| {
                let mut out = [0.0; 3];
                for i in 0..3 {
                    out[i] = (0..3).map(|j| rot[i][j] * v[j]).sum();
                }
                out
            })
            .collect();
        Self::from_directions(self.two_s, &dirs).expect("rotation preserves count")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("constellation serializes")
    }

    /// One star per row: `theta,phi,x,y,z`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,phi,x,y,z\n");
        for p in self.all_points() {
            let v = p.vector();
            writeln!(out, "{},{},{},{},{}", fixed(p.theta), fixed(p.phi), fixed(v[0]), fixed(v[1]), fixed(v[2])).unwrap();
        }
        out
    }
}

/// Rotation matrix for angle `omega` about unit axis `u` (right-handed).
pub fn rotation_matrix(u: [f64; 3], omega: f64) -> [[f64; 3]; 3] {
    let (s, c) = omega.sin_cos();
    let t = 1.0 - c;
    let [x, y, z] = u;
    [
        [c + x * x * t, x * y * t - z * s, x * z * t + y * s],
        [y * x * t + z * s, c + y * y * t, y * z * t - x * s],
        [z * x * t - y * s, z * y * t + x * s, c + z * z * t],
    ]
}

pub fn constellation_from_state(state: &SpinState) -> Constellation {
    let poly = polynomial_from_state(state);
    let mut points = Vec::with_capacity(state.two_s() as usize);
    let mut infinity = 0;
    for root in poly::roots(&poly.coefficients) {
        match root {
            Root::Finite(z) => points.push(SpherePoint::from_root(z)),
            Root::Infinite => infinity += 1,
        }
    }
    Constellation {
        two_s: state.two_s(),
        points,
        infinity_multiplicity: infinity,
    }
}

/// Inverse Majorana map: the state whose stars are `constellation`, with
/// an arbitrary but deterministic global phase.
pub fn state_from_constellation(constellation: &Constellation) -> Result<SpinState> {
    constellation.validate()?;
    let two_s = constellation.two_s;
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for p in constellation.all_points() {
        let (alpha, beta) = p.linear_factor();
        let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
        for (k, &a) in coeffs.iter().enumerate() {
            next[k + 1] += a * alpha;
            next[k] -= a * beta;
        }
        coeffs = next;
    }
    let amps = (0..=two_s as usize)
        .map(|row| {
            let k = two_s as usize - row;
            coeffs[k] / majorana_coefficient(two_s, row)
        })
        .collect();
    SpinState::new(two_s, amps)
}
