//! Numeric roots of complex polynomials (Aberth–Ehrlich iteration with
//! Newton polishing and multiplicity clustering).

use num_complex::Complex64;

const MAX_ITER: usize = 800;
const CLUSTER_TOL: f64 = 1e-5;

/// Roots of `Σ coeffs[k]·z^k` with multiplicities, sorted by `(re, im)`.
/// Leading zero coefficients are ignored.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<(Complex64, u32)> {
    let mut a = coeffs.to_vec();
    while a.last().is_some_and(|c| c.norm() == 0.0) {
        a.pop();
    }
    let n = a.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = a[n];
    let monic: Vec<Complex64> = a.iter().map(|c| c / lead).collect();

    let radius = 1.0 + monic[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * (k as f64 + 0.25) / n as f64 + 0.4;
            Complex64::from_polar(radius * 0.5, theta)
        })
        .collect();

    for _ in 0..MAX_ITER {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = horner(&monic, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }

    // cluster near-coincident roots into multiplicities
    let mut clusters: Vec<(Complex64, u32)> = Vec::new();
    for r in z {
        match clusters
            .iter_mut()
            .find(|(c, m)| ((*c / *m as f64) - r).norm() <= CLUSTER_TOL * (1.0 + r.norm()))
        {
            Some((c, m)) => {
                *c += r;
                *m += 1;
            }
            None => clusters.push((r, 1)),
        }
    }
    let mut out: Vec<(Complex64, u32)> = clusters
        .into_iter()
        .map(|(c, m)| (polish(&monic, c / m as f64, m), m))
        .collect();
    out.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    out
}

/// `(p(z), p'(z))`.
pub fn horner(a: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in a.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Multiplicity-aware Newton steps until the relative residual is below
/// `1e-12` or no longer improves.
fn polish(a: &[Complex64], mut z: Complex64, mult: u32) -> Complex64 {
    let scale = a.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut best = (horner(a, z).0.norm(), z);
    for _ in 0..50 {
        let (p, dp) = horner(a, z);
        if p.norm() <= 1e-12 * scale * (1.0 + z.norm()).powi(a.len() as i32) || dp.norm() == 0.0 {
            break;
        }
        let next = z - p / dp * mult as f64;
        let r = horner(a, next).0.norm();
        if !next.is_finite() || r >= best.0 {
            break;
        }
        best = (r, next);
        z = next;
    }
    best.1
}
