#![allow(dead_code)]

use kings::majorana::Constellation;
use kings::spin::{RotationAxis, SpinState};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Haar-random pure state: i.i.d. complex Gaussian amplitudes, normalized.
pub fn random_state<R: Rng>(rng: &mut R, two_s: u32) -> SpinState {
    let amps = (0..=two_s)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    SpinState::new(two_s, amps).unwrap()
}

/// Axis uniformly distributed on the sphere.
pub fn random_axis<R: Rng>(rng: &mut R) -> RotationAxis {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    RotationAxis::new(z.acos(), rng.gen_range(0.0..std::f64::consts::TAU))
}

pub fn octahedron() -> Constellation {
    let d = [[1., 0., 0.], [-1., 0., 0.], [0., 1., 0.], [0., -1., 0.], [0., 0., 1.], [0., 0., -1.]];
    Constellation::from_directions(6, &d).unwrap()
}

pub fn icosahedron() -> Constellation {
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let mut d = Vec::new();
    for a in [-1.0, 1.0] {
        for b in [-g, g] {
            d.push([0.0, a, b]);
            d.push([a, b, 0.0]);
            d.push([b, 0.0, a]);
        }
    }
    Constellation::from_directions(12, &d).unwrap()
}

pub fn dodecahedron() -> Constellation {
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let mut d = Vec::new();
    for a in [-1.0, 1.0] {
        for b in [-1.0, 1.0] {
            for c in [-1.0, 1.0] {
                d.push([a, b, c]);
            }
            d.push([0.0, a / g, b * g]);
            d.push([a / g, b * g, 0.0]);
            d.push([b * g, 0.0, a / g]);
        }
    }
    Constellation::from_directions(20, &d).unwrap()
}

pub fn tetrahedron() -> Constellation {
    let d = [[1., 1., 1.], [1., -1., -1.], [-1., 1., -1.], [-1., -1., 1.]];
    Constellation::from_directions(4, &d).unwrap()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
