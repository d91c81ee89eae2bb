//! Disk quadrature: Gauss-Legendre in `t = 2r² − 1` times the trapezoidal
//! rule in angle, with `∫_B f dx ≈ ¼ Σ_j Σ_i f(r_j, θ_i) ω_{t_j} ω_{θ_i}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pswf::{CutoffSet, PswfBasis};
use crate::specfun::{gauss_legendre_rule, spherical_harmonic};

#[derive(Debug, Clone, PartialEq)]
pub struct DiskQuadrature {
    /// Gauss-Legendre nodes in `t`, ascending.
    pub radial_nodes: Vec<f64>,
    pub radial_weights: Vec<f64>,
    /// `r_j = √((1 + t_j)/2)`.
    pub radii: Vec<f64>,
    /// `θ_i = 2πi/M`.
    pub angles: Vec<f64>,
    /// `2π/M`.
    pub angular_weight: f64,
}

impl DiskQuadrature {
    pub fn new(t_order: usize, m_order: usize) -> Result<Self> {
        if m_order == 0 {
            return Err(Error::Argument("angular order must be positive".into()));
        }
        let rule = gauss_legendre_rule(t_order)?;
        let radii = rule.nodes.iter().map(|t| ((1.0 + t) / 2.0).sqrt()).collect();
        let angles = (0..m_order).map(|i| 2.0 * PI * i as f64 / m_order as f64).collect();
        Ok(Self {
            radial_nodes: rule.nodes,
            radial_weights: rule.weights,
            radii,
            angles,
            angular_weight: 2.0 * PI / m_order as f64,
        })
    }

    /// Radial order `T`.
    pub fn t(&self) -> usize {
        self.radial_nodes.len()
    }

    /// Angular order `M`.
    pub fn m(&self) -> usize {
        self.angles.len()
    }

    pub fn len(&self) -> usize {
        self.t() * self.m()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cartesian node for radial index `j` and angular index `i`.
    pub fn node(&self, j: usize, i: usize) -> [f64; 2] {
        let (r, th) = (self.radii[j], self.angles[i]);
        [r * th.cos(), r * th.sin()]
    }

    /// Full weight `¼ ω_{t_j} ω_θ` of node `(j, i)`.
    pub fn weight(&self, j: usize) -> f64 {
        0.25 * self.radial_weights[j] * self.angular_weight
    }

    pub fn integrate<F: Fn([f64; 2]) -> f64>(&self, f: F) -> f64 {
        let mut sum = 0.0;
        for j in 0..self.t() {
            let w = self.weight(j);
            for i in 0..self.m() {
                sum += w * f(self.node(j, i));
            }
        }
        sum
    }

    /// Discrete `L²(B)` norm of samples laid out `[j][i]`.
    pub fn l2_norm(&self, values: &SampleMatrix) -> Result<f64> {
        self.check_shape(values)?;
        let mut sum = 0.0;
        for j in 0..self.t() {
            let w = self.weight(j);
            sum += w * values.row(j).iter().map(|v| v.norm_sqr()).sum::<f64>();
        }
        Ok(sum.sqrt())
    }

    pub fn check_shape(&self, values: &SampleMatrix) -> Result<()> {
        if values.rows != self.t() || values.cols != self.m() {
            return Err(Error::Argument(format!(
                "sample matrix is {}×{}, quadrature is {}×{}",
                values.rows,
                values.cols,
                self.t(),
                self.m()
            )));
        }
        Ok(())
    }

    /// Samples `f` on the nodes.
    pub fn sample<F: Fn([f64; 2]) -> Complex64>(&self, f: F) -> SampleMatrix {
        let mut out = SampleMatrix::zeros(self.t(), self.m());
        for j in 0..self.t() {
            for i in 0..self.m() {
                out.set(j, i, f(self.node(j, i)));
            }
        }
        out
    }
}

/// Complex `T × M` matrix, row-major, rows radial and columns angular.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl SampleMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn get(&self, j: usize, i: usize) -> Complex64 {
        self.data[j * self.cols + i]
    }

    pub fn set(&mut self, j: usize, i: usize, v: Complex64) {
        self.data[j * self.cols + i] = v;
    }

    pub fn row(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.cols..(j + 1) * self.cols]
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }
}

/// Knobs of the node-count rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeRule {
    /// The constant `a` inside `K(m, n)`.
    pub a: f64,
    /// Allowed coefficient mass beyond the exactness degree when measuring
    /// the polynomial support of basis products.
    pub degree_tolerance: f64,
}

impl Default for NodeRule {
    fn default() -> Self {
        Self { a: 1.0, degree_tolerance: 1e-12 }
    }
}

/// `K(m, n) = ⌈½(log_{1/2}(0.05 a ε/π) − m + ½)⌉` (independent of `n`).
pub fn degree_estimate(m: usize, epsilon: f64, a: f64) -> i64 {
    let log_half = -(0.05 * a * epsilon / PI).log2();
    (0.5 * (log_half - m as f64 + 0.5)).ceil() as i64
}

/// Node count from the pairwise formula
/// `T(m,m',n,n') = ⌈½((m+m'+2)/2 + K(m,n) + K(m',n'))⌉`, maximized over `J`.
pub fn formula_t(cutoff: &CutoffSet, epsilon: f64, a: f64) -> Result<usize> {
    if cutoff.is_empty() {
        return Err(Error::Argument("empty cutoff set".into()));
    }
    let mut ms: Vec<usize> = cutoff.indices.iter().map(|i| i.m).collect();
    ms.dedup();
    // K does not depend on n, so pairs of distinct m cover every pair in J.
    let mut best = i64::MIN;
    for &m in &ms {
        for &mp in &ms {
            let s = (m + mp + 2) as f64 / 2.0
                + (degree_estimate(m, epsilon, a) + degree_estimate(mp, epsilon, a)) as f64;
            best = best.max((0.5 * s).ceil() as i64);
        }
    }
    Ok(best.max(1) as usize)
}

/// Smallest `T` for which the rule integrates every product
/// `ψ_{m,n,l} ψ_{m,n',l}` with both indices in `J` to within `tolerance`.
///
/// For each `m` the coefficient envelope `e_j = max_n |β_j^{m,n}|` bounds the
/// part of the product of degree `m + j + j'` in `t`; the rule is exact up to
/// degree `2T − 1`, so `T` is raised until the envelope mass of the
/// higher-degree pairs drops below `tolerance`.
pub fn support_t(basis: &PswfBasis, cutoff: &CutoffSet, tolerance: f64) -> usize {
    let mut best = 1;
    let mut i = 0;
    let idx = &cutoff.indices;
    while i < idx.len() {
        let m = idx[i].m;
        let order = &basis.orders[m];
        let mut envelope = vec![0.0f64; order.k + 1];
        while i < idx.len() && idx[i].m == m {
            for (e, b) in envelope.iter_mut().zip(&order.beta[idx[i].n]) {
                *e = e.max(b.abs());
            }
            i += 1;
        }
        // mass[d] = Σ_{j + j' = d} e_j e_j'
        let mut mass = vec![0.0; 2 * order.k + 1];
        for (j, a) in envelope.iter().enumerate() {
            for (jp, b) in envelope.iter().enumerate() {
                mass[j + jp] += a * b;
            }
        }
        let mut tail = 0.0;
        let mut needed = 0;
        for d in (0..mass.len()).rev() {
            tail += mass[d];
            if tail > tolerance {
                needed = d;
                break;
            }
        }
        best = best.max((m + needed + 1).div_ceil(2));
    }
    best
}

/// Floors applied at `c ≥ 30`.
pub const FLOOR_T: usize = 24;
pub const FLOOR_M: usize = 47;

/// `(T, M)` for projecting onto `J`: `M = 2 m_max + 1`; `T` is the larger of
/// the pairwise formula and the measured polynomial support, then both are
/// raised to the `c ≥ 30` floors.
pub fn choose_t_m(
    basis: &PswfBasis,
    cutoff: &CutoffSet,
    epsilon: f64,
    rule: &NodeRule,
) -> Result<(usize, usize)> {
    let m_max = cutoff.max_m().ok_or_else(|| Error::Argument("empty cutoff set".into()))?;
    let mut t = formula_t(cutoff, epsilon, rule.a)?.max(support_t(basis, cutoff, rule.degree_tolerance));
    let mut m = 2 * m_max + 1;
    if basis.c >= 30.0 {
        t = t.max(FLOOR_T);
        m = m.max(FLOOR_M);
    }
    Ok((t, m))
}

/// Precomputed `ψ` values on the nodes, split into radial and angular tables.
#[derive(Debug, Clone)]
pub struct NodeTables {
    /// `radial[m][n][j] = r_j^m φ_{m,n}(t_j)`.
    pub radial: Vec<Vec<Vec<f64>>>,
    /// `angular[m][l-1][i] = Y_{m,l}(θ_i)`.
    pub angular: Vec<[Vec<f64>; 2]>,
}

impl NodeTables {
    pub fn new(basis: &PswfBasis, quad: &DiskQuadrature, m_max: usize) -> Self {
        let m_max = m_max.min(basis.max_order);
        let radial = (0..=m_max).map(|m| basis.radial_table(m, &quad.radii)).collect();
        let angular = (0..=m_max)
            .map(|m| {
                let branch = |l: u8| -> Vec<f64> {
                    quad.angles
                        .iter()
                        .map(|&th| spherical_harmonic(m, l, th).unwrap_or(0.0))
                        .collect()
                };
                [branch(1), branch(2)]
            })
            .collect();
        Self { radial, angular }
    }

    pub fn psi(&self, m: usize, n: usize, l: u8, j: usize, i: usize) -> f64 {
        self.radial[m][n][j] * self.angular[m][l as usize - 1][i]
    }
}

/// `¼ Σ_i Σ_j U_{ji} ψ(r_j, θ_i) ω_{t_j} ω_{θ_i}` for one basis function given
/// by its samples on the nodes.
pub fn project_samples(u: &SampleMatrix, psi_at_nodes: &[Vec<f64>], quad: &DiskQuadrature) -> Result<Complex64> {
    quad.check_shape(u)?;
    if psi_at_nodes.len() != quad.t() || psi_at_nodes.iter().any(|r| r.len() != quad.m()) {
        return Err(Error::Argument("basis samples do not match the quadrature shape".into()));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for (j, psi_row) in psi_at_nodes.iter().enumerate() {
        let row: Complex64 = u.row(j).iter().zip(psi_row).map(|(v, p)| v * p).sum();
        sum += row * quad.weight(j);
    }
    Ok(sum)
}
