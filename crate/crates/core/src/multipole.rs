//! Husimi function, state multipoles and anticoherence.
//!
//! Multipoles are `rho_Kq = <Psi| T_Kq |Psi>` with the irreducible tensor
//! components
//! `<S m'| T_Kq |S m> = sqrt((2K+1)/(2S+1)) <S m; K q | S m'>`,
//! orthonormal under the trace inner product, so that for a pure state
//! `sum_{K,q} |rho_Kq|^2 = 1` and `rho_00 = 1/sqrt(2S+1)`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::special::{clebsch_gordan, gauss_legendre, normalized_legendre, spherical_harmonic};
use crate::spin::{coherent_state, coherent_state_toward, inner_raw, two_m_of, SpinState};
use crate::{Error, Result};

/// Default threshold on `A_M` below which a state counts as anticoherent.
pub const DEFAULT_ANTICOHERENCE_TOL: f64 = 1e-8;

/// `Q(theta, phi) = |<theta, phi|Psi>|^2` with `|theta, phi>` from
/// [`coherent_state`].
pub fn husimi_q(state: &SpinState, theta: f64, phi: f64) -> f64 {
    let coh = coherent_state(state.two_s(), theta, phi);
    inner_raw(coh.amplitudes(), state.amplitudes()).norm_sqr()
}

/// Husimi function at the coherent state whose mean spin points along
/// `direction`.
pub fn husimi_q_toward(state: &SpinState, direction: [f64; 3]) -> f64 {
    let coh = coherent_state_toward(state.two_s(), direction);
    inner_raw(coh.amplitudes(), state.amplitudes()).norm_sqr()
}

/// Nonzero matrix elements of every `T_Kq` for one spin, `K <= k_max`.
///
/// Entry `elements[K][q + K]` lists `(row, col, value)` with
/// `row = col - q` (row `i` is `m = S - i`).
#[derive(Clone, Debug)]
pub struct TensorTable {
    two_s: u32,
    k_max: u32,
    elements: Vec<Vec<Vec<(usize, usize, f64)>>>,
}

impl TensorTable {
    pub fn new(two_s: u32, k_max: u32) -> Self {
        let n = two_s as usize + 1;
        let mut elements = Vec::with_capacity(k_max as usize + 1);
        for k in 0..=k_max {
            let pref = ((2.0 * k as f64 + 1.0) / (two_s as f64 + 1.0)).sqrt();
            let mut per_q = Vec::with_capacity(2 * k as usize + 1);
            for q in -(k as i32)..=(k as i32) {
                let mut list = Vec::new();
                for col in 0..n {
                    let two_m = two_m_of(two_s, col);
                    let two_mp = two_m + 2 * q;
                    if two_mp.abs() > two_s as i32 {
                        continue;
                    }
                    let row = ((two_s as i32 - two_mp) / 2) as usize;
                    let cg = clebsch_gordan(two_s, two_m, 2 * k, 2 * q, two_s, two_mp);
                    if cg != 0.0 {
                        list.push((row, col, pref * cg));
                    }
                }
                per_q.push(list);
            }
            elements.push(per_q);
        }
        Self {
            two_s,
            k_max,
            elements,
        }
    }

    pub fn two_s(&self) -> u32 {
        self.two_s
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    /// `(row, col, value)` triples of `T_Kq`.
    pub fn entries(&self, k: u32, q: i32) -> &[(usize, usize, f64)] {
        &self.elements[k as usize][(q + k as i32) as usize]
    }

    /// `<a| T_Kq |b>` on raw amplitude slices.
    pub fn matrix_element(&self, k: u32, q: i32, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        self.entries(k, q)
            .iter()
            .map(|&(r, c, v)| a[r].conj() * b[c] * v)
            .sum()
    }
}

/// Multipole coefficients `rho_Kq`, `K = 0..=2S`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultipoleSpectrum {
    pub two_s: u32,
    /// `rho[K][q + K]`.
    pub rho: Vec<Vec<Complex64>>,
}

#[derive(Serialize, Deserialize)]
struct RhoEntry {
    #[serde(rename = "K")]
    k: u32,
    q: i32,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct SpectrumJson {
    two_s: u32,
    rho: Vec<RhoEntry>,
}

impl MultipoleSpectrum {
    pub fn get(&self, k: u32, q: i32) -> Complex64 {
        self.rho[k as usize][(q + k as i32) as usize]
    }

    pub fn k_max(&self) -> u32 {
        self.rho.len() as u32 - 1
    }

    /// `sum_q |rho_Kq|^2`.
    pub fn power(&self, k: u32) -> f64 {
        self.rho[k as usize].iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn purity_sum(&self) -> f64 {
        (0..=self.k_max()).map(|k| self.power(k)).sum()
    }

    pub fn to_json(&self) -> String {
        let rho = (0..=self.k_max())
            .flat_map(|k| {
                (-(k as i32)..=k as i32).map(move |q| (k, q))
            })
            .map(|(k, q)| {
                let v = self.get(k, q);
                RhoEntry { k, q, re: v.re, im: v.im }
            })
            .collect();
        serde_json::to_string_pretty(&SpectrumJson {
            two_s: self.two_s,
            rho,
        })
        .expect("spectrum serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: SpectrumJson = serde_json::from_str(text)?;
        let k_max = parsed.rho.iter().map(|e| e.k).max().unwrap_or(0);
        let mut rho: Vec<Vec<Complex64>> = (0..=k_max)
            .map(|k| vec![Complex64::new(0.0, 0.0); 2 * k as usize + 1])
            .collect();
        for e in parsed.rho {
            if e.q.unsigned_abs() > e.k {
                return Err(Error::InvalidParameter(format!("q = {} outside K = {}", e.q, e.k)));
            }
            rho[e.k as usize][(e.q + e.k as i32) as usize] = Complex64::new(e.re, e.im);
        }
        Ok(Self {
            two_s: parsed.two_s,
            rho,
        })
    }
}

pub fn multipoles(state: &SpinState) -> MultipoleSpectrum {
    let table = TensorTable::new(state.two_s(), state.two_s());
    multipoles_with(&table, state)
}

/// Multipoles using a prebuilt tensor table (any `k_max <= 2S`).
pub fn multipoles_with(table: &TensorTable, state: &SpinState) -> MultipoleSpectrum {
    assert_eq!(table.two_s(), state.two_s());
    let amps = state.amplitudes();
    let rho = (0..=table.k_max())
        .map(|k| {
            (-(k as i32)..=k as i32)
                .map(|q| table.matrix_element(k, q, amps, amps))
                .collect()
        })
        .collect();
    MultipoleSpectrum {
        two_s: state.two_s(),
        rho,
    }
}

/// `A_M = sum_{K=1}^{M} sum_q |rho_Kq|^2`.
pub fn cumulative_a(spectrum: &MultipoleSpectrum, m_order: u32) -> Result<f64> {
    if m_order < 1 || m_order > spectrum.two_s || m_order > spectrum.k_max() {
        return Err(Error::OrderOutOfRange {
            order: m_order,
            two_s: spectrum.two_s,
        });
    }
    Ok((1..=m_order).map(|k| spectrum.power(k)).sum())
}

/// The full `A_1 ..= A_{2S}` table.
pub fn cumulative_table(spectrum: &MultipoleSpectrum) -> Vec<(u32, f64)> {
    let mut acc = 0.0;
    (1..=spectrum.two_s.min(spectrum.k_max()))
        .map(|m| {
            acc += spectrum.power(m);
            (m, acc)
        })
        .collect()
}

/// CSV `M,A_M` with header.
pub fn cumulative_csv(spectrum: &MultipoleSpectrum) -> String {
    let mut out = String::from("M,A_M\n");
    for (m, a) in cumulative_table(spectrum) {
        writeln!(out, "{m},{a:.12e}").unwrap();
    }
    out
}

/// Largest `M` with `A_M < tol`; 0 when even the dipole is present.
pub fn anticoherence_order(state: &SpinState, tol: f64) -> u32 {
    order_from_spectrum(&multipoles(state), tol)
}

pub fn order_from_spectrum(spectrum: &MultipoleSpectrum, tol: f64) -> u32 {
    cumulative_table(spectrum)
        .into_iter()
        .take_while(|&(_, a)| a < tol)
        .last()
        .map_or(0, |(m, _)| m)
}

/// Spherical-harmonic coefficients of the Husimi function over physical
/// directions, `c_Kq = int Q(n) conj(Y_Kq(n)) dOmega`, indexed `[K][q + K]`.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicCoefficients {
    pub two_s: u32,
    pub coeffs: Vec<Vec<Complex64>>,
}

impl HarmonicCoefficients {
    pub fn get(&self, k: u32, q: i32) -> Complex64 {
        self.coeffs[k as usize][(q + k as i32) as usize]
    }
}

/// Quadrature grid sizes `(n_theta, n_phi)` exact for `Q * Y_K`, `K <= k_max`.
pub fn quadrature_sizes(two_s: u32, k_max: u32) -> (usize, usize) {
    let band = (two_s + k_max) as usize;
    let n_theta = (two_s as usize + 2).max(band / 2 + 1);
    let n_phi = (2 * two_s as usize + 4).max(band + 1);
    (n_theta, n_phi)
}

/// Gauss-Legendre (in cos theta) by trapezoid (in phi) product rule.
pub fn sphere_quadrature(n_theta: usize, n_phi: usize) -> Vec<(f64, f64, f64)> {
    let (x, w) = gauss_legendre(n_theta);
    let mut nodes = Vec::with_capacity(n_theta * n_phi);
    for (xi, wi) in x.iter().zip(&w) {
        let theta = xi.clamp(-1.0, 1.0).acos();
        for j in 0..n_phi {
            let phi = 2.0 * PI * j as f64 / n_phi as f64;
            nodes.push((theta, phi, wi * 2.0 * PI / n_phi as f64));
        }
    }
    nodes
}

/// `int Q dOmega`; equals `4 pi / (2S + 1)` for every normalized state.
pub fn husimi_integral(state: &SpinState) -> f64 {
    let (nt, np) = quadrature_sizes(state.two_s(), 0);
    sphere_quadrature(nt, np)
        .into_iter()
        .map(|(t, p, w)| w * husimi_q_toward(state, [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()]))
        .sum()
}

/// Projects the Husimi function on `Y_Kq` for `K <= k_max` by quadrature.
/// `k_max` may exceed `2S`; those coefficients vanish by bandwidth.
pub fn q_harmonic_coeffs(state: &SpinState, k_max: u32) -> HarmonicCoefficients {
    let (nt, np) = quadrature_sizes(state.two_s(), k_max);
    let (x, w) = gauss_legendre(nt);
    let mut coeffs: Vec<Vec<Complex64>> = (0..=k_max)
        .map(|k| vec![Complex64::new(0.0, 0.0); 2 * k as usize + 1])
        .collect();
    for (xi, wi) in x.iter().zip(&w) {
        let theta = xi.clamp(-1.0, 1.0).acos();
        let table = normalized_legendre(k_max as usize, theta);
        for j in 0..np {
            let phi = 2.0 * PI * j as f64 / np as f64;
            let weight = wi * 2.0 * PI / np as f64;
            let n = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            let q_val = husimi_q_toward(state, n) * weight;
            for k in 0..=k_max {
                for q in -(k as i32)..=k as i32 {
                    let y = spherical_harmonic(&table, k as usize, q, phi);
                    coeffs[k as usize][(q + k as i32) as usize] += y.conj() * q_val;
                }
            }
        }
    }
    HarmonicCoefficients {
        two_s: state.two_s(),
        coeffs,
    }
}
