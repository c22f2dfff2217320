//! Truncated `|J, M⟩` basis at fixed M, banded cos^k θ operators, and the
//! Gauss–Legendre pseudo-spectral transform between coefficients and the θ-grid.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_PAD: u32 = 3;
pub const DEFAULT_J_MAX: u32 = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BasisSpec {
    pub j_max: u32,
    pub m: i32,
    /// Extra levels used while building cos² and cos³ so truncation only touches the discarded edge.
    pub pad: u32,
    pub n_grid: usize,
}

impl BasisSpec {
    /// Basis with the default padding and `n_grid = 2(J_max + pad + 1)`.
    pub fn new(j_max: u32, m: i32) -> Result<Self> {
        Self::with_pad(j_max, m, DEFAULT_PAD)
    }

    pub fn with_pad(j_max: u32, m: i32, pad: u32) -> Result<Self> {
        let spec = BasisSpec {
            j_max,
            m,
            pad,
            n_grid: 2 * (j_max + pad + 1) as usize,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m.unsigned_abs() > self.j_max {
            return Err(Error::domain(format!(
                "|M| = {} exceeds J_max = {}",
                self.m.abs(),
                self.j_max
            )));
        }
        if self.n_grid < (self.j_max + self.pad + 1) as usize {
            return Err(Error::domain(format!(
                "n_grid = {} is below J_max + pad + 1 = {}",
                self.n_grid,
                self.j_max + self.pad + 1
            )));
        }
        Ok(())
    }

    pub fn abs_m(&self) -> u32 {
        self.m.unsigned_abs()
    }

    /// Number of retained coefficients, J = |M| ..= J_max.
    pub fn dim(&self) -> usize {
        (self.j_max - self.abs_m() + 1) as usize
    }

    pub fn j_of(&self, index: usize) -> u32 {
        self.abs_m() + index as u32
    }

    pub fn index_of(&self, j: u32) -> Option<usize> {
        (j >= self.abs_m() && j <= self.j_max).then(|| (j - self.abs_m()) as usize)
    }
}

/// `⟨J+1, M| cos θ |J, M⟩`.
pub fn cos_matrix_element(j: u32, m: i32) -> Result<f64> {
    let am = m.unsigned_abs();
    if am > j {
        return Err(Error::domain(format!("|M| = {am} exceeds J = {j}")));
    }
    let (j, m) = (j as f64, am as f64);
    Ok((((j + 1.0).powi(2) - m * m) / ((2.0 * j + 1.0) * (2.0 * j + 3.0))).sqrt())
}

/// Real symmetric banded matrix; `diags[k][i]` holds entry `(i, i + k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymBanded {
    n: usize,
    diags: Vec<Vec<f64>>,
}

impl SymBanded {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        let diags = (0..=bandwidth)
            .map(|k| vec![0.0; n.saturating_sub(k)])
            .collect();
        SymBanded { n, diags }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.diags.len() - 1
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        let k = hi - lo;
        if k < self.diags.len() && hi < self.n {
            self.diags[k][lo]
        } else {
            0.0
        }
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        self.diags[hi - lo][lo] = v;
    }

    /// Product of two symmetric banded matrices that commute (powers of one operator),
    /// so the result is symmetric as well.
    fn mul(&self, other: &SymBanded) -> SymBanded {
        let n = self.n;
        let bw = self.bandwidth() + other.bandwidth();
        let mut out = SymBanded::zeros(n, bw);
        for i in 0..n {
            for j in i..n.min(i + bw + 1) {
                let lo = i.saturating_sub(self.bandwidth());
                let hi = (i + self.bandwidth()).min(n - 1);
                let mut s = 0.0;
                for k in lo..=hi {
                    s += self.get(i, k) * other.get(k, j);
                }
                out.set(i, j, s);
            }
        }
        out
    }

    /// Leading `n × n` block.
    fn restrict(&self, n: usize) -> SymBanded {
        let diags = self
            .diags
            .iter()
            .enumerate()
            .map(|(k, d)| d[..n.saturating_sub(k)].to_vec())
            .collect();
        SymBanded { n, diags }
    }

    /// `⟨c|A|c⟩` for a complex vector.
    pub fn quad_form(&self, c: &[Complex64]) -> f64 {
        debug_assert_eq!(c.len(), self.n);
        let mut s: f64 = self.diags[0]
            .iter()
            .zip(c)
            .map(|(a, x)| a * x.norm_sqr())
            .sum();
        for (k, d) in self.diags.iter().enumerate().skip(1) {
            let off: f64 = d
                .iter()
                .enumerate()
                .map(|(i, a)| a * (c[i].conj() * c[i + k]).re)
                .sum();
            s += 2.0 * off;
        }
        s
    }

    pub fn matvec(&self, c: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        for (i, a) in self.diags[0].iter().enumerate() {
            out[i] += c[i] * a;
        }
        for (k, d) in self.diags.iter().enumerate().skip(1) {
            for (i, a) in d.iter().enumerate() {
                out[i] += c[i + k] * a;
                out[i + k] += c[i] * a;
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// CSV dump (row, col, value) of the upper band, for debugging.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "row,col,value")?;
        for (k, d) in self.diags.iter().enumerate() {
            for (i, v) in d.iter().enumerate() {
                writeln!(w, "{},{},{:e}", i, i + k, v)?;
            }
        }
        Ok(())
    }
}

/// cos θ, cos² θ, cos³ θ in the retained basis.
#[derive(Clone, Debug)]
pub struct CosOperators {
    pub basis: BasisSpec,
    pub c1: SymBanded,
    pub c2: SymBanded,
    pub c3: SymBanded,
}

pub fn build_cos_operators(basis: &BasisSpec) -> CosOperators {
    let am = basis.abs_m();
    let n_pad = (basis.j_max + basis.pad - am + 1) as usize;
    let mut c1 = SymBanded::zeros(n_pad, 1);
    for i in 0..n_pad - 1 {
        let j = am + i as u32;
        c1.set(
            i,
            i + 1,
            cos_matrix_element(j, basis.m).expect("J >= |M| by construction"),
        );
    }
    let c2 = c1.mul(&c1);
    let c3 = c2.mul(&c1);
    let n = basis.dim();
    CosOperators {
        basis: *basis,
        c1: c1.restrict(n),
        c2: c2.restrict(n),
        c3: c3.restrict(n),
    }
}

/// Gauss–Legendre nodes (ascending) and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

/// Fully normalized associated Legendre functions `P̃_l^m(x)` for `l = m ..= l_max`,
/// with `∫₋₁¹ P̃_l^m(x)² dx = 1` and no Condon–Shortley phase.
pub fn normalized_legendre(m: u32, l_max: u32, x: f64) -> Vec<f64> {
    assert!(m <= l_max);
    let mut out = Vec::with_capacity((l_max - m + 1) as usize);
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = std::f64::consts::FRAC_1_SQRT_2;
    for k in 1..=m {
        let k = k as f64;
        pmm *= ((2.0 * k + 1.0) / (2.0 * k)).sqrt() * s;
    }
    out.push(pmm);
    if l_max == m {
        return out;
    }
    let mf = m as f64;
    out.push((2.0 * mf + 3.0).sqrt() * x * pmm);
    for l in (m + 2)..=l_max {
        let lf = l as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
        let n = out.len();
        out.push(a * (x * out[n - 1] - b * out[n - 2]));
    }
    out
}

/// Maps coefficients over `J = |M| ..= J_max` to values at the Gauss–Legendre nodes and back.
#[derive(Clone, Debug)]
pub struct GridTransform {
    pub basis: BasisSpec,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `values[i * dim + j] = P̃_j(x_i)`
    values: Vec<f64>,
    /// `weighted[j * n_grid + i] = w_i P̃_j(x_i)`
    weighted: Vec<f64>,
}

pub fn grid_transform(basis: &BasisSpec) -> GridTransform {
    let (nodes, weights) = gauss_legendre(basis.n_grid);
    let dim = basis.dim();
    let ng = basis.n_grid;
    let mut values = vec![0.0; ng * dim];
    let mut weighted = vec![0.0; ng * dim];
    for (i, (&x, &w)) in nodes.iter().zip(&weights).enumerate() {
        let p = normalized_legendre(basis.abs_m(), basis.j_max, x);
        for (j, v) in p.into_iter().enumerate() {
            values[i * dim + j] = v;
            weighted[j * ng + i] = w * v;
        }
    }
    GridTransform {
        basis: *basis,
        nodes,
        weights,
        values,
        weighted,
    }
}

impl GridTransform {
    pub fn n_grid(&self) -> usize {
        self.nodes.len()
    }

    pub fn forward_into(&self, coeffs: &[Complex64], grid: &mut [Complex64]) {
        let dim = self.basis.dim();
        let ng = self.n_grid();
        if ng.is_multiple_of(2) {
            // P̃_J(-x) = (-1)^(J-|M|) P̃_J(x) on the mirror-symmetric node set
            let half = ng / 2;
            for i in half..ng {
                let row = &self.values[i * dim..(i + 1) * dim];
                let (mut even, mut odd) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                for (j, (p, c)) in row.iter().zip(coeffs).enumerate() {
                    if j % 2 == 0 {
                        even += c * p;
                    } else {
                        odd += c * p;
                    }
                }
                grid[i] = even + odd;
                grid[ng - 1 - i] = even - odd;
            }
            return;
        }
        for (i, g) in grid.iter_mut().enumerate() {
            let row = &self.values[i * dim..(i + 1) * dim];
            let (mut re, mut im) = (0.0, 0.0);
            for (p, c) in row.iter().zip(coeffs) {
                re += p * c.re;
                im += p * c.im;
            }
            *g = Complex64::new(re, im);
        }
    }

    pub fn backward_into(&self, grid: &[Complex64], coeffs: &mut [Complex64]) {
        let ng = self.n_grid();
        if ng.is_multiple_of(2) {
            let half = ng / 2;
            let mut folded = Vec::with_capacity(ng);
            folded.extend((half..ng).map(|i| grid[i] + grid[ng - 1 - i]));
            folded.extend((half..ng).map(|i| grid[i] - grid[ng - 1 - i]));
            let (sym, anti) = folded.split_at(half);
            for (j, c) in coeffs.iter_mut().enumerate() {
                let row = &self.weighted[j * ng + half..(j + 1) * ng];
                let src = if j % 2 == 0 { sym } else { anti };
                let (mut re, mut im) = (0.0, 0.0);
                for (p, g) in row.iter().zip(src) {
                    re += p * g.re;
                    im += p * g.im;
                }
                *c = Complex64::new(re, im);
            }
            return;
        }
        for (j, c) in coeffs.iter_mut().enumerate() {
            let row = &self.weighted[j * ng..(j + 1) * ng];
            let (mut re, mut im) = (0.0, 0.0);
            for (p, g) in row.iter().zip(grid) {
                re += p * g.re;
                im += p * g.im;
            }
            *c = Complex64::new(re, im);
        }
    }

    pub fn forward(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut g = vec![Complex64::new(0.0, 0.0); self.n_grid()];
        self.forward_into(coeffs, &mut g);
        g
    }

    pub fn backward(&self, grid: &[Complex64]) -> Vec<Complex64> {
        let mut c = vec![Complex64::new(0.0, 0.0); self.basis.dim()];
        self.backward_into(grid, &mut c);
        c
    }
}

/// Rotational wavefunction at fixed M: coefficients over `J = |M| ..= J_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct RotorState {
    pub basis: BasisSpec,
    pub coeffs: Vec<Complex64>,
    /// Atomic units.
    pub time: f64,
}

impl RotorState {
    /// The field-free eigenstate `|J, M⟩`.
    pub fn eigenstate(basis: BasisSpec, j: u32) -> Result<Self> {
        let idx = basis.index_of(j).ok_or_else(|| {
            Error::domain(format!(
                "J = {j} not in basis (|M| = {}, J_max = {})",
                basis.abs_m(),
                basis.j_max
            ))
        })?;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); basis.dim()];
        coeffs[idx] = Complex64::new(1.0, 0.0);
        Ok(RotorState {
            basis,
            coeffs,
            time: 0.0,
        })
    }

    pub fn from_coeffs(basis: BasisSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != basis.dim() {
            return Err(Error::structure(format!(
                "{} coefficients for a basis of dimension {}",
                coeffs.len(),
                basis.dim()
            )));
        }
        Ok(RotorState {
            basis,
            coeffs,
            time: 0.0,
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Copy embedded in a larger basis with the same M (zero-padded).
    pub fn embed(&self, basis: BasisSpec) -> Result<Self> {
        if basis.m != self.basis.m || basis.j_max < self.basis.j_max {
            return Err(Error::structure(
                "target basis must share M and not be smaller",
            ));
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(basis.dim(), Complex64::new(0.0, 0.0));
        Ok(RotorState {
            basis,
            coeffs,
            time: self.time,
        })
    }
}
