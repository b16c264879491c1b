//! Numerical search for maximally anticoherent states.
//!
//! The objective is `A_M` as a function of an unnormalized amplitude vector,
//! made scale-invariant by dividing by `<psi|psi>^2`. Each restart draws a
//! Haar-random starting state and runs BFGS on the real and imaginary parts,
//! with the imaginary part of the largest starting amplitude pinned to zero
//! to remove the global-phase gauge direction.

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::majorana::{chordal_distance, Constellation};
use crate::multipole::{multipoles_with, order_from_spectrum, TensorTable};
use crate::optim::{bfgs, BfgsOptions};
use crate::spin::{SpinState, StateJson};
use crate::{Error, Result};

/// Restarts evaluated between checks of the stopping criterion. Fixed so
/// the set of restarts examined never depends on thread scheduling.
const BATCH: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub two_s: u32,
    pub target_order: u32,
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub rng_seed: u64,
    /// Restrict to states invariant (up to phase) under rotations by
    /// `2 pi / k` about `z`: only rows `i` with `i % k == 0` are populated.
    #[serde(default)]
    pub cyclic_symmetry: Option<u32>,
    /// Restrict to real amplitudes, i.e. constellations symmetric under the
    /// reflection `phi -> -phi`.
    #[serde(default)]
    pub mirror_symmetry: bool,
}

impl SearchConfig {
    pub fn new(two_s: u32, target_order: u32) -> Self {
        Self {
            two_s,
            target_order,
            restarts: 64,
            max_iters: 2000,
            tol: 1e-10,
            rng_seed: 0,
            cyclic_symmetry: None,
            mirror_symmetry: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.two_s == 0 || self.target_order < 1 || self.target_order > self.two_s {
            return Err(Error::OrderOutOfRange {
                order: self.target_order,
                two_s: self.two_s,
            });
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {}", self.tol)));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidParameter("restarts must be at least 1".into()));
        }
        if let Some(k) = self.cyclic_symmetry {
            if k == 0 || k > self.two_s {
                return Err(Error::InvalidParameter(format!("cyclic symmetry {k} out of range")));
            }
        }
        Ok(())
    }

    /// Per-restart seeds, derived from `rng_seed` alone.
    pub fn restart_seeds(&self) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        (0..self.restarts).map(|_| rng.next_u64()).collect()
    }
}

/// `A_M` and its gradient on raw (unnormalized) amplitudes.
#[derive(Clone, Debug)]
pub struct Objective {
    table: TensorTable,
    /// Weight of `sum_q |rho_Kq|^2` for `K = 1..`; index 0 is `K = 1`.
    weights: Vec<f64>,
}

impl Objective {
    pub fn new(two_s: u32, m_order: u32) -> Result<Self> {
        if m_order < 1 || m_order > two_s {
            return Err(Error::OrderOutOfRange { order: m_order, two_s });
        }
        Ok(Self {
            table: TensorTable::new(two_s, m_order),
            weights: vec![1.0; m_order as usize],
        })
    }

    /// `sum_K weights[K-1] sum_q |rho_Kq|^2`.
    pub fn weighted(two_s: u32, weights: Vec<f64>) -> Result<Self> {
        let k_max = weights.len() as u32;
        if k_max < 1 || k_max > two_s {
            return Err(Error::OrderOutOfRange { order: k_max, two_s });
        }
        Ok(Self {
            table: TensorTable::new(two_s, k_max),
            weights,
        })
    }

    pub fn two_s(&self) -> u32 {
        self.table.two_s()
    }

    pub fn value(&self, amps: &[Complex64]) -> f64 {
        let n: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
        let mut acc = 0.0;
        for (k, w) in (1..).zip(&self.weights) {
            for q in -(k as i32)..=k as i32 {
                acc += w * self.table.matrix_element(k, q, amps, amps).norm_sqr();
            }
        }
        acc / (n * n)
    }

    /// Value and Wirtinger gradient `df/d conj(psi)`.
    pub fn value_and_gradient(&self, amps: &[Complex64], grad: &mut [Complex64]) -> f64 {
        let n: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
        grad.iter_mut().for_each(|g| *g = Complex64::new(0.0, 0.0));
        let mut acc = 0.0;
        for (k, &w) in (1..).zip(&self.weights) {
            for q in -(k as i32)..=k as i32 {
                let entries = self.table.entries(k, q);
                let raw: Complex64 = entries.iter().map(|&(r, c, v)| amps[r].conj() * amps[c] * v).sum();
                acc += w * raw.norm_sqr();
                let g = raw * w;
                let gc = g.conj();
                for &(r, c, v) in entries {
                    // conj(g) (T psi)_r + g (T^dagger psi)_c
                    grad[r] += gc * amps[c] * v;
                    grad[c] += g * amps[r] * v;
                }
            }
        }
        let f = acc / (n * n);
        for (gi, a) in grad.iter_mut().zip(amps) {
            *gi = *gi / (n * n) - a * (2.0 * f / n);
        }
        f
    }
}

/// `A_M` of a state.
pub fn objective(state: &SpinState, m_order: u32) -> Result<f64> {
    Ok(Objective::new(state.two_s(), m_order)?.value(state.amplitudes()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub state: SpinState,
    pub achieved_order: u32,
    pub objective: f64,
    pub restarts_used: usize,
    pub seed: u64,
    /// Whether `objective < tol` was reached.
    pub reached_target: bool,
}

#[derive(Serialize, Deserialize)]
pub struct SearchResultJson {
    #[serde(flatten)]
    pub state: StateJson,
    pub achieved_order: u32,
    pub objective: f64,
    pub restarts_used: usize,
    pub seed: u64,
}

impl SearchResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SearchResultJson {
            state: self.state.clone().into(),
            achieved_order: self.achieved_order,
            objective: self.objective,
            restarts_used: self.restarts_used,
            seed: self.seed,
        })
        .expect("result serializes")
    }
}

struct RestartOutcome {
    amps: Vec<Complex64>,
    value: f64,
}

/// Maps a real parameter vector onto amplitudes (pinned slot has zero
/// imaginary part, unsupported rows stay zero).
struct Parameterization {
    dim: usize,
    rows: Vec<usize>,
    /// Slot whose imaginary part is fixed at zero; `None` when every
    /// amplitude is real.
    pinned: Option<usize>,
}

impl Parameterization {
    fn n_params(&self) -> usize {
        match self.pinned {
            Some(_) => 2 * self.rows.len() - 1,
            None => self.rows.len(),
        }
    }

    fn has_imag(&self, slot: usize) -> bool {
        self.pinned.is_some_and(|p| p != slot)
    }

    fn amplitudes(&self, x: &[f64]) -> Vec<Complex64> {
        let mut amps = vec![Complex64::new(0.0, 0.0); self.dim];
        let mut it = x.iter();
        for (slot, &row) in self.rows.iter().enumerate() {
            let re = *it.next().unwrap();
            let im = if self.has_imag(slot) { *it.next().unwrap() } else { 0.0 };
            amps[row] = Complex64::new(re, im);
        }
        amps
    }

    fn pack_gradient(&self, wirtinger: &[Complex64], out: &mut [f64]) {
        let mut k = 0;
        for (slot, &row) in self.rows.iter().enumerate() {
            out[k] = 2.0 * wirtinger[row].re;
            k += 1;
            if self.has_imag(slot) {
                out[k] = 2.0 * wirtinger[row].im;
                k += 1;
            }
        }
    }
}

fn run_restart(obj: &Objective, config: &SearchConfig, seed: u64) -> RestartOutcome {
    let dim = config.two_s as usize + 1;
    let rows: Vec<usize> = match config.cyclic_symmetry {
        Some(k) => (0..dim).filter(|i| i % k as usize == 0).collect(),
        None => (0..dim).collect(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start: Vec<Complex64> = rows
        .iter()
        .map(|_| Complex64::new(gaussian(&mut rng), gaussian(&mut rng)))
        .collect();
    let (pinned, phase) = if config.mirror_symmetry {
        (None, Complex64::new(1.0, 0.0))
    } else {
        let p = start
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(i, _)| i)
            .unwrap();
        (Some(p), start[p].conj() / start[p].norm())
    };
    let param = Parameterization { dim, rows, pinned };

    let mut x0 = Vec::with_capacity(param.n_params());
    for (slot, c) in start.iter().enumerate() {
        let c = c * phase;
        x0.push(c.re);
        if param.has_imag(slot) {
            x0.push(c.im);
        }
    }

    let mut wgrad = vec![Complex64::new(0.0, 0.0); dim];
    let opts = BfgsOptions {
        max_iters: config.max_iters,
        grad_tol: 1e-15,
        f_target: config.tol * 1e-6,
    };
    let min = bfgs(
        |x, g| {
            let amps = param.amplitudes(x);
            let f = obj.value_and_gradient(&amps, &mut wgrad);
            param.pack_gradient(&wgrad, g);
            f
        },
        &x0,
        opts,
    );
    let amps = param.amplitudes(&min.x);
    RestartOutcome {
        value: obj.value(&amps),
        amps,
    }
}

/// Box-Muller standard normal.
fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Multi-start minimization of `A_M`.
///
/// Restarts run in fixed batches; after each batch the search stops if the
/// best value so far is below `tol`. The best restart is chosen by value,
/// ties broken by restart index, so the result is independent of thread
/// scheduling.
pub fn find_king(config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    let obj = Objective::new(config.two_s, config.target_order)?;
    let seeds = config.restart_seeds();
    let mut best: Option<(usize, RestartOutcome)> = None;
    let mut used = 0;
    for chunk in seeds.chunks(BATCH) {
        let outcomes: Vec<RestartOutcome> = chunk
            .par_iter()
            .map(|&seed| run_restart(&obj, config, seed))
            .collect();
        for out in outcomes {
            let idx = used;
            used += 1;
            let better = match &best {
                None => true,
                Some((_, b)) => out.value < b.value,
            };
            if better {
                best = Some((idx, out));
            }
        }
        if best.as_ref().is_some_and(|(_, b)| b.value < config.tol) {
            break;
        }
    }
    let (_, best) = best.expect("at least one restart");
    let state = SpinState::new(config.two_s, best.amps)?.with_canonical_phase();
    let spectrum = multipoles_with(&TensorTable::new(config.two_s, config.two_s), &state);
    Ok(SearchResult {
        achieved_order: order_from_spectrum(&spectrum, config.tol),
        objective: best.value,
        reached_target: best.value < config.tol,
        restarts_used: used,
        seed: config.rng_seed,
        state,
    })
}

/// Sorted pairwise chordal distances of a constellation.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstellationSignature(pub Vec<f64>);

pub fn signature(constellation: &Constellation) -> ConstellationSignature {
    let dirs = constellation.directions();
    let mut d = Vec::with_capacity(dirs.len() * dirs.len().saturating_sub(1) / 2);
    for i in 0..dirs.len() {
        for j in (i + 1)..dirs.len() {
            d.push(chordal_distance(dirs[i], dirs[j]).min(2.0));
        }
    }
    d.sort_by(f64::total_cmp);
    ConstellationSignature(d)
}

/// Signature equivalence: every sorted pairwise distance agrees within
/// `tol`. Necessary for congruence, not sufficient.
pub fn match_constellations(a: &Constellation, b: &Constellation, tol: f64) -> Result<bool> {
    if a.two_s != b.two_s {
        return Err(Error::SpinMismatch {
            left: a.two_s,
            right: b.two_s,
        });
    }
    let (sa, sb) = (signature(a), signature(b));
    Ok(sa.0.iter().zip(&sb.0).all(|(x, y)| (x - y).abs() <= tol))
}
