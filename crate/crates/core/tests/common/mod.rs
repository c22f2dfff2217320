//! Reference computations kept apart from the library code paths.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// Gauss-Legendre rule from the eigen-decomposition of the Jacobi matrix.
pub fn golub_welsch(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let b = kf / (4.0 * kf * kf - 1.0).sqrt();
        jac[(k - 1, k)] = b;
        jac[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Associated Legendre function normalized so that its square integrates to 1 on [-1, 1];
/// no Condon-Shortley phase. Unnormalized recurrence, then the factorial normalization.
pub fn legendre(l: u32, m: u32, x: f64) -> f64 {
    if l < m {
        return 0.0;
    }
    let s = (1.0 - x * x).sqrt();
    let mut pmm = 1.0;
    for k in 1..=m {
        pmm *= (2 * k - 1) as f64 * s;
    }
    let raw = if l == m {
        pmm
    } else {
        let mut prev = pmm;
        let mut cur = x * (2 * m + 1) as f64 * pmm;
        for ll in (m + 2)..=l {
            let next =
                (x * (2 * ll - 1) as f64 * cur - (ll + m - 1) as f64 * prev) / (ll - m) as f64;
            prev = cur;
            cur = next;
        }
        cur
    };
    let ln_norm =
        0.5 * (((2 * l + 1) as f64 / 2.0).ln() + ln_factorial(l - m) - ln_factorial(l + m));
    raw * ln_norm.exp()
}

/// ⟨j1, m| cos^k θ |j2, m⟩ by quadrature.
pub fn cos_power_element(k: i32, j1: u32, j2: u32, m: u32, n_nodes: usize) -> f64 {
    let (x, w) = golub_welsch(n_nodes);
    x.iter()
        .zip(&w)
        .map(|(&xi, &wi)| wi * xi.powi(k) * legendre(j1, m, xi) * legendre(j2, m, xi))
        .sum()
}

/// Largest |a_i - b_i|.
pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
