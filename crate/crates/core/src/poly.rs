//! Complex polynomial roots: companion-matrix eigenvalues, Newton polish,
//! and recovery of multiple roots from the clusters the eigenvalue solver
//! splits them into.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Backward error (relative to the largest coefficient) accepted when
/// collapsing a cluster onto one multiple root.
const MULTIPLICITY_TOL: f64 = 1e-12;

/// Root of a polynomial on the Riemann sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Root {
    Finite(Complex64),
    Infinite,
}

/// Evaluates `sum_k coeffs[k] z^k` (ascending order) by Horner's rule.
pub fn eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Taylor coefficient `p^{(j)}(z) / j!` together with the scale
/// `max_i |a_i| * sum_i C(i, j) |z|^{i-j}` it would have if every
/// coefficient were perturbed by the largest one.
fn taylor(coeffs: &[Complex64], z: Complex64, j: usize) -> (Complex64, f64) {
    let amax = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut val = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    let mut binom = 1.0f64; // C(i, j) for i = j
    for i in j..coeffs.len() {
        if i > j {
            binom *= i as f64 / (i - j) as f64;
        }
        let zp = z.powi((i - j) as i32);
        val += coeffs[i] * zp * binom;
        scale += binom * zp.norm();
    }
    (val, amax * scale)
}

/// All roots of the ascending-order coefficient list, with multiplicity.
///
/// Exactly vanishing leading coefficients become [`Root::Infinite`]; exactly
/// vanishing trailing coefficients become exact zeros. Tiny but nonzero ones
/// are kept, since a high-multiplicity root near a pole legitimately makes
/// them tiny. The remaining roots come from
/// the companion matrix of the unit-max-normalized polynomial, are polished
/// with Newton steps in whichever chart (`z` or `1/z`) keeps them inside the
/// unit disk, and clusters that verify as a single multiple root are
/// collapsed onto it.
pub fn roots(coeffs: &[Complex64]) -> Vec<Root> {
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    assert!(max > 0.0, "zero polynomial has no root set");
    let a: Vec<Complex64> = coeffs.iter().map(|c| c / max).collect();
    let deg_nominal = a.len() - 1;

    let hi = a
        .iter()
        .rposition(|c| c.norm() > 0.0)
        .expect("nonzero polynomial");
    let lo = a.iter().position(|c| c.norm() > 0.0).unwrap();

    let mut out = Vec::with_capacity(deg_nominal);
    out.extend(std::iter::repeat(Root::Infinite).take(deg_nominal - hi));
    out.extend(std::iter::repeat(Root::Finite(Complex64::new(0.0, 0.0))).take(lo));

    let core = &a[lo..=hi];
    if core.len() > 1 {
        let raw = companion_roots(core);
        let polished: Vec<Complex64> = raw.into_iter().map(|z| polish(core, z)).collect();
        out.extend(merge_multiple_roots(core, polished).into_iter().map(Root::Finite));
    }
    out
}

/// Companion eigenvalues after rescaling `z = rho w` so the end coefficients
/// have equal modulus, which keeps clustered roots near a pole well scaled.
fn companion_roots(a: &[Complex64]) -> Vec<Complex64> {
    let n = a.len() - 1;
    if n == 1 {
        return vec![-a[0] / a[1]];
    }
    let rho = (a[0].norm() / a[n].norm()).powf(1.0 / n as f64);
    let mut b: Vec<Complex64> = a.iter().enumerate().map(|(i, c)| c * rho.powi(i as i32)).collect();
    let bmax = b.iter().map(|c| c.norm()).fold(0.0, f64::max);
    b.iter_mut().for_each(|c| *c /= bmax);
    unscaled_companion_roots(&b).into_iter().map(|w| w * rho).collect()
}

fn unscaled_companion_roots(a: &[Complex64]) -> Vec<Complex64> {
    let n = a.len() - 1;
    if let Some(r) = schur_eigenvalues(a) {
        return r;
    }
    // Equal-modulus root sets (z^n - 1 and friends) give permutation-like
    // companion matrices on which shifted QR can stall; a complex shift of
    // the variable breaks the symmetry.
    for shift in [Complex64::new(0.173, 0.091), Complex64::new(-0.311, 0.227), Complex64::new(0.05, -0.41)] {
        let shifted: Vec<Complex64> = (0..=n).map(|j| taylor(a, shift, j).0).collect();
        if let Some(r) = schur_eigenvalues(&shifted) {
            return r.into_iter().map(|w| w + shift).collect();
        }
    }
    panic!("companion eigenvalue iteration failed to converge");
}

fn schur_eigenvalues(a: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = a.len() - 1;
    let lead = a[n];
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        m[(0, j)] = -a[n - 1 - j] / lead;
    }
    for i in 1..n {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    let schur = nalgebra::Schur::try_new(m, f64::EPSILON, 400 * n)?;
    let (_, t) = schur.unpack();
    Some((0..n).map(|i| t[(i, i)]).collect())
}

/// Reversed coefficients: roots of the result are reciprocals.
fn reversed(a: &[Complex64]) -> Vec<Complex64> {
    a.iter().rev().copied().collect()
}

/// Newton polish; keeps an update only if it lowers the residual.
fn polish(a: &[Complex64], z: Complex64) -> Complex64 {
    if z.norm() > 1.0 {
        let rev = reversed(a);
        return 1.0 / newton(&rev, 1.0 / z);
    }
    newton(a, z)
}

fn newton(a: &[Complex64], mut z: Complex64) -> Complex64 {
    let deriv: Vec<Complex64> = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect();
    let mut res = eval(a, z).norm();
    for _ in 0..3 {
        let d = eval(&deriv, z);
        if d.norm() == 0.0 {
            break;
        }
        let cand = z - eval(a, z) / d;
        let r = eval(a, cand).norm();
        if r < res {
            z = cand;
            res = r;
        } else {
            break;
        }
    }
    z
}

/// Chordal distance between the points of the Riemann sphere for `z`, `w`.
fn chordal(z: Complex64, w: Complex64) -> f64 {
    2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()).sqrt() * (1.0 + w.norm_sqr()).sqrt())
}

fn merge_multiple_roots(a: &[Complex64], mut roots: Vec<Complex64>) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(roots.len());
    for &threshold in &[0.8, 0.3, 0.1, 0.02, 1e-3, 1e-5] {
        if roots.len() < 2 {
            break;
        }
        let clusters = single_linkage(&roots, threshold);
        let mut leftover = Vec::new();
        for cluster in clusters {
            if cluster.len() < 2 {
                leftover.push(roots[cluster[0]]);
                continue;
            }
            let members: Vec<Complex64> = cluster.iter().map(|&i| roots[i]).collect();
            match verify_multiple(a, &members) {
                Some(c) => out.extend(std::iter::repeat(c).take(members.len())),
                None => leftover.extend(members),
            }
        }
        roots = leftover;
    }
    out.extend(roots);
    out
}

fn single_linkage(points: &[Complex64], threshold: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut k = i;
        while p[k] != r {
            let next = p[k];
            p[k] = r;
            k = next;
        }
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if chordal(points[i], points[j]) < threshold {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// If `members` are the split images of one root of multiplicity
/// `members.len()`, returns that root refined to full precision.
fn verify_multiple(a: &[Complex64], members: &[Complex64]) -> Option<Complex64> {
    let k = members.len();
    let mean_abs = members.iter().map(|z| z.norm()).sum::<f64>() / k as f64;
    let use_reciprocal = mean_abs > 1.0;
    let (poly, pts): (Vec<Complex64>, Vec<Complex64>) = if use_reciprocal {
        (reversed(a), members.iter().map(|z| 1.0 / z).collect())
    } else {
        (a.to_vec(), members.to_vec())
    };
    if poly.len() <= k {
        return None;
    }
    let mut c = pts.iter().sum::<Complex64>() / k as f64;
    // p^{(k-1)} has a simple root at a k-fold root of p.
    for _ in 0..3 {
        let (num, _) = taylor(&poly, c, k - 1);
        let (den, _) = taylor(&poly, c, k);
        if den.norm() == 0.0 {
            break;
        }
        let step = num / (den * k as f64);
        c -= step;
        if step.norm() < 1e-17 * (1.0 + c.norm()) {
            break;
        }
    }
    for j in 0..k {
        let (v, scale) = taylor(&poly, c, j);
        if v.norm() > MULTIPLICITY_TOL * scale.max(f64::MIN_POSITIVE) {
            return None;
        }
    }
    Some(if use_reciprocal { 1.0 / c } else { c })
}
