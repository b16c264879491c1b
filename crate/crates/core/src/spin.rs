//! Pure spin-S states in the Dicke basis and the SU(2) machinery acting on
//! them.
//!
//! A state of spin `S` is stored as `2S + 1` complex amplitudes ordered by
//! descending projection, `m = S, S-1, ..., -S`. The spin is carried as
//! `two_s = 2S` so half-integer spins index cleanly. Row `i` of any vector or
//! matrix in this module corresponds to `2m = two_s - 2i`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::special::majorana_coefficient;
use crate::{Error, Result};

const NORM_TOL: f64 = 1e-300;

/// Normalized pure state over the Dicke basis `|S, m>`.
///
/// The global phase is kept exactly as supplied; every observable computed
/// from a state is insensitive to it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateJson", into = "StateJson")]
pub struct SpinState {
    two_s: u32,
    amplitudes: Vec<Complex64>,
}

/// Interchange form: `{"two_s": int, "amplitudes": [[re, im], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateJson {
    pub two_s: u32,
    pub amplitudes: Vec<[f64; 2]>,
}

impl TryFrom<StateJson> for SpinState {
    type Error = Error;

    fn try_from(value: StateJson) -> Result<Self> {
        let amps = value
            .amplitudes
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        SpinState::new(value.two_s, amps)
    }
}

impl From<SpinState> for StateJson {
    fn from(state: SpinState) -> Self {
        StateJson {
            two_s: state.two_s,
            // adding +0.0 turns -0.0 into 0.0 so files do not depend on sign noise
            amplitudes: state.amplitudes.iter().map(|c| [c.re + 0.0, c.im + 0.0]).collect(),
        }
    }
}

impl SpinState {
    /// Builds a state from raw amplitudes, scaling them to unit norm.
    pub fn new(two_s: u32, raw: Vec<Complex64>) -> Result<Self> {
        let expected = two_s as usize + 1;
        if raw.len() != expected {
            return Err(Error::LengthMismatch {
                two_s,
                expected,
                found: raw.len(),
            });
        }
        let norm = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > NORM_TOL) || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        let amplitudes = raw.into_iter().map(|c| c / norm).collect();
        Ok(Self { two_s, amplitudes })
    }

    /// Real-amplitude convenience constructor.
    pub fn from_real(two_s: u32, raw: &[f64]) -> Result<Self> {
        Self::new(two_s, raw.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Dicke basis vector `|S, m>` with `two_m = 2m`.
    pub fn dicke(two_s: u32, two_m: i32) -> Result<Self> {
        let i = index_of(two_s, two_m)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); two_s as usize + 1];
        amps[i] = Complex64::new(1.0, 0.0);
        Ok(Self {
            two_s,
            amplitudes: amps,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state serializes")
    }

    pub fn two_s(&self) -> u32 {
        self.two_s
    }

    pub fn spin(&self) -> f64 {
        self.two_s as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Amplitude `Psi_m` for `two_m = 2m`.
    pub fn amplitude(&self, two_m: i32) -> Result<Complex64> {
        Ok(self.amplitudes[index_of(self.two_s, two_m)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Copy with the global phase chosen so the largest amplitude is real
    /// and positive. Used for display and stored reference data only.
    pub fn with_canonical_phase(&self) -> Self {
        let pivot = self
            .amplitudes
            .iter()
            .copied()
            .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
            .unwrap_or(Complex64::new(1.0, 0.0));
        let phase = pivot.conj() / pivot.norm();
        Self {
            two_s: self.two_s,
            amplitudes: self.amplitudes.iter().map(|c| c * phase).collect(),
        }
    }

    pub(crate) fn from_normalized_unchecked(two_s: u32, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), two_s as usize + 1);
        Self { two_s, amplitudes }
    }
}

/// `2m` value of row `index`.
pub fn two_m_of(two_s: u32, index: usize) -> i32 {
    two_s as i32 - 2 * index as i32
}

fn index_of(two_s: u32, two_m: i32) -> Result<usize> {
    let ts = two_s as i32;
    if two_m.abs() > ts || (ts - two_m) % 2 != 0 {
        return Err(Error::ProjectionOutOfRange { two_s, two_m });
    }
    Ok(((ts - two_m) / 2) as usize)
}

/// Two-mode occupation numbers `(N+, N-) = (S + m, S - m)`.
pub fn dicke_to_fock(two_s: u32, two_m: i32) -> Result<(u32, u32)> {
    index_of(two_s, two_m)?;
    let ts = two_s as i32;
    Ok((((ts + two_m) / 2) as u32, ((ts - two_m) / 2) as u32))
}

/// Spin coherent state `e^{i phi S_z} e^{i theta S_y} |S, S>`.
///
/// Amplitudes are `Psi_m = c_m cos^{S+m}(theta/2) (-sin(theta/2))^{S-m} e^{i m phi}`.
/// With these (positive-exponent) operators the state's mean spin points
/// along polar angle `theta` and azimuth `pi - phi`; see
/// [`coherent_direction`]. Use [`coherent_state_toward`] to build the
/// coherent state pointing along a given unit vector.
pub fn coherent_state(two_s: u32, theta: f64, phi: f64) -> SpinState {
    let (c, s) = ((theta / 2.0).cos(), -(theta / 2.0).sin());
    let amps = (0..=two_s as usize)
        .map(|i| {
            let up = two_s as i32 - i as i32; // S + m
            let down = i as i32; // S - m
            let mag = majorana_coefficient(two_s, i) * c.powi(up) * s.powi(down);
            let two_m = two_m_of(two_s, i);
            Complex64::from_polar(1.0, 0.5 * two_m as f64 * phi) * mag
        })
        .collect();
    SpinState::from_normalized_unchecked(two_s, amps)
}

/// Unit vector of the mean spin of `coherent_state(_, theta, phi)`.
pub fn coherent_direction(theta: f64, phi: f64) -> [f64; 3] {
    [
        -theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ]
}

/// Coherent-state parameters `(theta, phi)` whose mean spin points along
/// `direction` (need not be normalized).
pub fn coherent_parameters(direction: [f64; 3]) -> (f64, f64) {
    let axis = RotationAxis::from_vector(direction);
    (axis.theta_cap, (PI - axis.phi_cap).rem_euclid(2.0 * PI))
}

/// Coherent state whose mean spin points along `direction`.
pub fn coherent_state_toward(two_s: u32, direction: [f64; 3]) -> SpinState {
    let (theta, phi) = coherent_parameters(direction);
    coherent_state(two_s, theta, phi)
}

/// `(|S, S> - |S, -S>) / sqrt 2`.
pub fn noon_state(two_s: u32) -> SpinState {
    let mut amps = vec![Complex64::new(0.0, 0.0); two_s as usize + 1];
    let r = std::f64::consts::FRAC_1_SQRT_2;
    amps[0] += r;
    amps[two_s as usize] -= r;
    SpinState::from_normalized_unchecked(two_s, amps)
}

/// `<a|b>`.
pub fn inner(a: &SpinState, b: &SpinState) -> Result<Complex64> {
    if a.two_s != b.two_s {
        return Err(Error::SpinMismatch {
            left: a.two_s,
            right: b.two_s,
        });
    }
    Ok(inner_raw(&a.amplitudes, &b.amplitudes))
}

pub(crate) fn inner_raw(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `|<a|b>|^2`.
pub fn fidelity(a: &SpinState, b: &SpinState) -> Result<f64> {
    Ok(inner(a, b)?.norm_sqr().min(1.0))
}

/// Wigner small-d matrix `d^S_{m'm}(beta) = <S m'| e^{-i beta S_y} |S m>`.
///
/// Rows index `m'`, columns `m`, both descending. Computed from the
/// eigendecomposition of the real tridiagonal `S_x`, using
/// `S_y = e^{-i pi S_z / 2} S_x e^{i pi S_z / 2}`, which keeps full
/// orthogonality at large spin where the alternating factorial sum loses
/// digits to cancellation.
pub fn wigner_small_d(two_s: u32, beta: f64) -> DMatrix<f64> {
    let n = two_s as usize + 1;
    if beta == 0.0 {
        return DMatrix::identity(n, n);
    }
    let eig = sx_eigenbasis(two_s);
    let phases: Vec<Complex64> = eig
        .values
        .iter()
        .map(|&m| Complex64::from_polar(1.0, -beta * m))
        .collect();
    // quarter-turn phases e^{-i pi m / 2}
    let quarter: Vec<Complex64> = (0..n)
        .map(|i| Complex64::from_polar(1.0, -0.25 * PI * two_m_of(two_s, i) as f64))
        .collect();
    let mut d = DMatrix::<f64>::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += phases[k] * (eig.vectors[(r, k)] * eig.vectors[(c, k)]);
            }
            d[(r, c)] = (quarter[r] * acc * quarter[c].conj()).re;
        }
    }
    d
}

struct SxEigen {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

/// Eigenpairs of `S_x`; eigenvalues snapped to their exact values `m`.
fn sx_eigenbasis(two_s: u32) -> SxEigen {
    let n = two_s as usize + 1;
    let s = two_s as f64 / 2.0;
    let mut sx = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        // <m+1| S_x |m> with m the projection of row i
        let m = 0.5 * two_m_of(two_s, i) as f64;
        let v = 0.5 * (s * (s + 1.0) - m * (m + 1.0)).sqrt();
        sx[(i - 1, i)] = v;
        sx[(i, i - 1)] = v;
    }
    let eig = nalgebra::SymmetricEigen::new(sx);
    let values = eig
        .eigenvalues
        .iter()
        .map(|&l| (2.0 * l).round() / 2.0)
        .collect();
    SxEigen {
        values,
        vectors: eig.eigenvectors,
    }
}

/// Rotation axis given by spherical angles `(Theta, Phi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationAxis {
    pub theta_cap: f64,
    pub phi_cap: f64,
}

impl RotationAxis {
    /// Polar angle is clamped into `[0, pi]`, azimuth wrapped into `[0, 2pi)`.
    pub fn new(theta_cap: f64, phi_cap: f64) -> Self {
        Self {
            theta_cap: theta_cap.clamp(0.0, PI),
            phi_cap: wrap_angle(phi_cap),
        }
    }

    pub fn z() -> Self {
        Self::new(0.0, 0.0)
    }

    pub fn from_vector(v: [f64; 3]) -> Self {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        assert!(r > 0.0, "axis vector must be nonzero");
        let theta = (v[2] / r).clamp(-1.0, 1.0).acos();
        let phi = v[1].atan2(v[0]);
        Self::new(theta, phi)
    }

    pub fn vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta_cap.sin_cos();
        let (sp, cp) = self.phi_cap.sin_cos();
        [st * cp, st * sp, ct]
    }
}

pub(crate) fn wrap_angle(phi: f64) -> f64 {
    let w = phi.rem_euclid(2.0 * PI) + 0.0;
    if w >= 2.0 * PI {
        0.0
    } else {
        w
    }
}

/// Precomputed frame for repeated rotations about one axis.
///
/// `exp(-i omega u.S) = R e^{-i omega S_z} R^dagger` with
/// `R = e^{-i Phi S_z} e^{-i Theta S_y}`.
#[derive(Clone, Debug)]
pub struct Rotator {
    two_s: u32,
    d_theta: DMatrix<f64>,
    phi_cap: f64,
}

impl Rotator {
    pub fn new(two_s: u32, axis: RotationAxis) -> Self {
        Self {
            two_s,
            d_theta: wigner_small_d(two_s, axis.theta_cap),
            phi_cap: axis.phi_cap,
        }
    }

    /// Components of the state in the frame where the axis is `z`, i.e.
    /// `R^dagger |psi>`; these are the `u.S` eigen-amplitudes.
    pub fn to_axis_frame(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let n = amps.len();
        let phased: Vec<Complex64> = (0..n)
            .map(|i| amps[i] * Complex64::from_polar(1.0, 0.5 * two_m_of(self.two_s, i) as f64 * self.phi_cap))
            .collect();
        // e^{+i Theta S_y} = d(Theta)^T
        (0..n)
            .map(|i| (0..n).map(|j| phased[j] * self.d_theta[(j, i)]).sum())
            .collect()
    }

    pub fn from_axis_frame(&self, frame: &[Complex64]) -> Vec<Complex64> {
        let n = frame.len();
        (0..n)
            .map(|i| {
                let v: Complex64 = (0..n).map(|j| frame[j] * self.d_theta[(i, j)]).sum();
                v * Complex64::from_polar(1.0, -0.5 * two_m_of(self.two_s, i) as f64 * self.phi_cap)
            })
            .collect()
    }

    pub fn rotate(&self, state: &SpinState, omega: f64) -> SpinState {
        assert_eq!(state.two_s, self.two_s);
        let mut frame = self.to_axis_frame(&state.amplitudes);
        apply_z_phase(self.two_s, &mut frame, omega);
        SpinState::from_normalized_unchecked(self.two_s, self.from_axis_frame(&frame))
    }
}

/// Multiplies row `i` by `e^{-i omega m}`.
pub(crate) fn apply_z_phase(two_s: u32, amps: &mut [Complex64], omega: f64) {
    for (i, a) in amps.iter_mut().enumerate() {
        *a *= Complex64::from_polar(1.0, -0.5 * two_m_of(two_s, i) as f64 * omega);
    }
}

/// Applies `exp(-i omega u.S)` to the state.
pub fn rotate(state: &SpinState, axis: RotationAxis, omega: f64) -> SpinState {
    Rotator::new(state.two_s, axis).rotate(state, omega)
}

/// First and symmetrized second moments of the spin vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinMoments {
    pub mean: [f64; 3],
    pub second: [[f64; 3]; 3],
}

impl SpinMoments {
    pub fn trace(&self) -> f64 {
        self.second[0][0] + self.second[1][1] + self.second[2][2]
    }

    /// `<(u.S)^2>`.
    pub fn second_along(&self, u: [f64; 3]) -> f64 {
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                acc += u[i] * self.second[i][j] * u[j];
            }
        }
        acc
    }

    /// `Var(u.S) = <(u.S)^2> - <u.S>^2`.
    pub fn variance_along(&self, u: [f64; 3]) -> f64 {
        let m: f64 = (0..3).map(|i| u[i] * self.mean[i]).sum();
        self.second_along(u) - m * m
    }
}

/// `(S_x psi, S_y psi, S_z psi)` from ladder-operator matrix elements.
pub(crate) fn spin_vectors(two_s: u32, amps: &[Complex64]) -> [Vec<Complex64>; 3] {
    let n = amps.len();
    let s = two_s as f64 / 2.0;
    let zero = Complex64::new(0.0, 0.0);
    let mut plus = vec![zero; n];
    let mut minus = vec![zero; n];
    let mut sz = vec![zero; n];
    for i in 0..n {
        let m = 0.5 * two_m_of(two_s, i) as f64;
        sz[i] = amps[i] * m;
        if i > 0 {
            // S+ |m> = sqrt(S(S+1) - m(m+1)) |m+1>, row i-1
            plus[i - 1] += amps[i] * (s * (s + 1.0) - m * (m + 1.0)).sqrt();
        }
        if i + 1 < n {
            minus[i + 1] += amps[i] * (s * (s + 1.0) - m * (m - 1.0)).sqrt();
        }
    }
    let sx = (0..n).map(|i| (plus[i] + minus[i]) * 0.5).collect();
    let sy = (0..n)
        .map(|i| (plus[i] - minus[i]) * Complex64::new(0.0, -0.5))
        .collect();
    [sx, sy, sz]
}

pub fn spin_moments(state: &SpinState) -> SpinMoments {
    let vecs = spin_vectors(state.two_s, &state.amplitudes);
    let mut mean = [0.0; 3];
    let mut second = [[0.0; 3]; 3];
    for i in 0..3 {
        mean[i] = inner_raw(&state.amplitudes, &vecs[i]).re;
        for j in i..3 {
            let v = inner_raw(&vecs[i], &vecs[j]).re;
            second[i][j] = v;
            second[j][i] = v;
        }
    }
    SpinMoments { mean, second }
}
