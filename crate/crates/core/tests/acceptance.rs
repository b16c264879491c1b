//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

mod common;

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use kings::majorana::{constellation_from_state, state_from_constellation};
use kings::metrology::{
    axis_scan, facet_normals, kings_formula, noon_crossover, noon_formula, omega_grid,
    projection_probability, sensitivity, small_angle_sensitivity, vertex_axes,
};
use kings::multipole::{anticoherence_order, cumulative_a, husimi_q_toward, multipoles};
use kings::reference::king;
use kings::search::{find_king, match_constellations, SearchConfig};
use kings::spin::{fidelity, noon_state, RotationAxis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{icosahedron, octahedron, random_axis, random_state, rel_err};

type Outcome = (bool, String);

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 9] = [
        (1, "closed-form sensitivities", closed_forms),
        (2, "axis independence of the Kings", axis_independence),
        (3, "anticoherence orders", anticoherence_orders),
        (4, "NOON orthogonality and revival", noon_angles),
        (5, "revival structure of symmetry axes", revival_structure),
        (6, "NOON/King crossover", crossover),
        (7, "Majorana round trip and Q zeros", majorana_round_trip),
        (8, "purity identity", purity_identity),
        (9, "search reproduces octahedron and icosahedron", search_reproduction),
    ];
    let mut failed = 0;
    for (n, name, check) in criteria {
        let start = Instant::now();
        let (ok, detail) = check();
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {n} {}: {name}; {detail} [{:.1?}]",
            if ok { "PASS" } else { "FAIL" },
            start.elapsed()
        );
    }
    let s5 = king(10).expect("shipped S=5 King");
    println!("recorded: S=5 King anticoherence order {}", anticoherence_order(&s5, 1e-8));
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}

const KING_TWO_S: [u32; 4] = [6, 10, 12, 20];

fn closed_forms() -> Outcome {
    let mut worst: f64 = 0.0;
    // printed values
    worst = worst.max((kings_formula(6) - 0.25).abs() / 0.25);
    worst = worst.max(rel_err(kings_formula(12), 3f64.sqrt() / (2.0 * 42f64.sqrt())));
    worst = worst.max(rel_err(kings_formula(20), 3f64.sqrt() / (2.0 * 110f64.sqrt())));
    let printed = (kings_formula(12) - 0.133631).abs() < 5e-7 && (kings_formula(20) - 0.082572).abs() < 5e-7;

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for two_s in [6, 12, 20] {
        let st = king(two_s).unwrap();
        let mut axes = vec![RotationAxis::z()];
        axes.extend((0..10).map(|_| random_axis(&mut rng)));
        for axis in axes {
            let limit = small_angle_sensitivity(&st, axis).unwrap();
            let finite = sensitivity(&st, axis, 1e-4).unwrap().delta_omega;
            worst = worst.max(rel_err(limit, kings_formula(two_s)));
            worst = worst.max(rel_err(finite, kings_formula(two_s)));
        }
    }
    for two_s in [6, 10, 12, 20] {
        let s = two_s as f64 / 2.0;
        let st = noon_state(two_s);
        for (theta, expected) in [(0.0, 1.0 / (2.0 * s)), (FRAC_PI_2, 1.0 / (2.0 * s).sqrt())] {
            let axis = RotationAxis::new(theta, 0.3);
            worst = worst.max(rel_err(noon_formula(two_s, theta), expected));
            worst = worst.max(rel_err(small_angle_sensitivity(&st, axis).unwrap(), expected));
            worst = worst.max(rel_err(sensitivity(&st, axis, 1e-4).unwrap().delta_omega, expected));
        }
    }
    (printed && worst < 1e-6, format!("max relative deviation {worst:.2e} (limit 1e-6)"))
}

fn axis_independence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let mut worst_finite: f64 = 0.0;
    for two_s in KING_TWO_S {
        let st = king(two_s).unwrap();
        let axes: Vec<RotationAxis> = (0..200).map(|_| random_axis(&mut rng)).collect();
        let spread = |v: &[f64]| {
            let max = v.iter().cloned().fold(f64::MIN, f64::max);
            let min = v.iter().cloned().fold(f64::MAX, f64::min);
            (max - min) / (v.iter().sum::<f64>() / v.len() as f64)
        };
        let limit: Vec<f64> = axes.iter().map(|&a| small_angle_sensitivity(&st, a).unwrap()).collect();
        let finite: Vec<f64> = axes.iter().map(|&a| sensitivity(&st, a, 1e-4).unwrap().delta_omega).collect();
        worst = worst.max(spread(&limit));
        worst_finite = worst_finite.max(spread(&finite));
    }
    (
        worst < 1e-8,
        format!("max relative spread {worst:.2e} (limit 1e-8); at omega = 1e-4: {worst_finite:.2e}"),
    )
}

fn anticoherence_orders() -> Outcome {
    let found: Vec<(u32, u32)> = [(6, 3), (12, 5), (20, 5)]
        .iter()
        .map(|&(two_s, _)| (two_s, anticoherence_order(&king(two_s).unwrap(), 1e-8)))
        .collect();
    let ok = found == [(6, 3), (12, 5), (20, 5)];
    let detail = found
        .iter()
        .map(|(t, m)| format!("S={}: M={m}", t / 2))
        .collect::<Vec<_>>()
        .join(", ");
    (ok, detail)
}

fn noon_angles() -> Outcome {
    let mut worst_zero: f64 = 0.0;
    let mut worst_one: f64 = 0.0;
    for two_s in KING_TWO_S {
        let s = two_s as f64 / 2.0;
        let st = noon_state(two_s);
        worst_zero = worst_zero.max(projection_probability(&st, RotationAxis::z(), PI / (2.0 * s)));
        worst_one = worst_one.max((projection_probability(&st, RotationAxis::z(), PI / s) - 1.0).abs());
    }
    (
        worst_zero < 1e-10 && worst_one < 1e-10,
        format!("max <P>(pi/2S) = {worst_zero:.2e}, max |<P>(pi/S) - 1| = {worst_one:.2e}"),
    )
}

fn revival_structure() -> Outcome {
    const STEPS: usize = 120;
    let grid = omega_grid(0.0, 2.0 * PI, STEPS);
    let mut ok = true;
    let mut parts = Vec::new();
    for (two_s, vertex_fold, facet_fold) in [(6, 4, 3), (12, 5, 3), (20, 3, 5)] {
        let st = king(two_s).unwrap();
        let con = constellation_from_state(&st);
        for (label, axes, fold) in [("vertex", vertex_axes(&con), vertex_fold), ("facet", facet_normals(&con), facet_fold)] {
            let scan = axis_scan(&st, &axes, &grid);
            let mut worst: f64 = 0.0;
            let mut all_found = !axes.is_empty();
            for a in 0..axes.len() {
                let peaks: Vec<usize> = scan.revivals(a, 1e-8).iter().map(|r| r.index).collect();
                for j in 0..=fold {
                    let idx = j * STEPS / fold;
                    all_found &= peaks.contains(&idx);
                    worst = worst.max(1.0 - scan.p_mean[a][idx]);
                }
            }
            ok &= all_found;
            parts.push(format!(
                "S={} {label} {fold}-fold on {} axes (min <P> = 1 - {worst:.1e})",
                two_s / 2,
                axes.len()
            ));
        }
    }
    (ok, parts.join("; "))
}

fn crossover() -> Outcome {
    let c = noon_crossover(100).unwrap();
    let dev = (c - 1.0 / 3f64.sqrt()).abs();
    (dev < 2e-2, format!("S=50: cos Theta = {c:.12}, |diff from 1/sqrt 3| = {dev:.2e}"))
}

fn majorana_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_infid: f64 = 0.0;
    let mut worst_q: f64 = 0.0;
    for _ in 0..1000 {
        let two_s = rng.gen_range(1..=30);
        let st = random_state(&mut rng, two_s);
        let con = constellation_from_state(&st);
        let back = state_from_constellation(&con).unwrap();
        worst_infid = worst_infid.max(1.0 - fidelity(&st, &back).unwrap());
        for d in con.directions() {
            worst_q = worst_q.max(husimi_q_toward(&st, d));
        }
    }
    (
        worst_infid < 1e-9 && worst_q < 1e-12,
        format!("1000 states, S <= 15: max infidelity {worst_infid:.2e}, max Q at stars {worst_q:.2e}"),
    )
}

fn purity_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_sum: f64 = 0.0;
    let mut worst_a: f64 = 0.0;
    for _ in 0..300 {
        let two_s = rng.gen_range(1..=30);
        let spectrum = multipoles(&random_state(&mut rng, two_s));
        worst_sum = worst_sum.max((spectrum.purity_sum() - 1.0).abs());
        let a = cumulative_a(&spectrum, two_s).unwrap();
        worst_a = worst_a.max((a - (1.0 - 1.0 / (two_s as f64 + 1.0))).abs());
    }
    (
        worst_sum < 1e-10 && worst_a < 1e-9,
        format!("300 states: max |sum rho^2 - 1| = {worst_sum:.2e}, max |A_2S - 2S/(2S+1)| = {worst_a:.2e}"),
    )
}

fn search_reproduction() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (two_s, order, reference, name) in [(6, 3, octahedron(), "octahedron"), (12, 5, icosahedron(), "icosahedron")] {
        let result = find_king(&SearchConfig::new(two_s, order)).unwrap();
        let con = constellation_from_state(&result.state);
        let matched = match_constellations(&con, &reference, 1e-6).unwrap();
        ok &= result.objective < 1e-8 && matched;
        parts.push(format!(
            "S={}: A_{order} = {:.1e}, {name} match {matched}, {} restarts",
            two_s / 2,
            result.objective,
            result.restarts_used
        ));
    }
    let elapsed = start.elapsed();
    ok &= elapsed.as_secs() < 600;
    (ok, parts.join("; "))
}
