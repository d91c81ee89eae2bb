//! Disk prolate spheroidal wave functions `ψ_{m,n,l}(x; c)` and the prolate
//! eigenvalues `α_{m,n}(c) = i^m λ_{m,n}(c)` of the restricted Fourier
//! operator `∫_B e^{i c x·y} f(y) dy` on the unit disk.
//!
//! Each angular order `m` gives one symmetric tridiagonal eigenproblem in the
//! normalized Jacobi basis `‖x‖^m P_j^{(m)}(2‖x‖² − 1) Y_{m,l}(x̂)`; its
//! eigenvectors are the expansion coefficients and its eigenvalues the
//! Sturm-Liouville eigenvalues `χ_{m,n}`. The prolate eigenvalue then follows
//! from the leading coefficient and the endpoint value `φ_{m,n}(−1)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{jacobi_eval_all, jacobi_recurrence_coeffs, spherical_harmonic, JacobiRecurrence};
use crate::tridiag::symmetric_tridiagonal_eig;

/// Index triple `(m, n, l)`: angular order, radial order, harmonic branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ProlateIndex {
    pub m: usize,
    pub n: usize,
    pub l: u8,
}

impl ProlateIndex {
    pub fn new(m: usize, n: usize, l: u8) -> Result<Self> {
        let ok = match l {
            1 => true,
            2 => m >= 1,
            _ => false,
        };
        if ok {
            Ok(Self { m, n, l })
        } else {
            Err(Error::Argument(format!("invalid prolate index ({m}, {n}, {l})")))
        }
    }

    /// Admissible branches for angular order `m`.
    pub fn branches(m: usize) -> &'static [u8] {
        if m == 0 {
            &[1]
        } else {
            &[1, 2]
        }
    }
}

impl std::fmt::Display for ProlateIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.m, self.n, self.l)
    }
}

/// Default maximal `2n + m` kept for a bandwidth `c`.
pub fn default_max_order(c: f64) -> usize {
    (1.2 * c).ceil() as usize + 20
}

/// Polynomial truncation `K = ⌈(M̃ − m)/2⌉` with `M̃ = 2N + 30`.
pub fn truncation_degree(max_order: usize, m: usize) -> usize {
    (2 * max_order + 30 - m).div_ceil(2)
}

/// Diagonal and off-diagonal of the `(K+1) × (K+1)` Sturm-Liouville matrix.
pub fn build_tridiagonal(m: usize, c: f64, k: usize) -> (Vec<f64>, Vec<f64>) {
    let half_c2 = 0.5 * c * c;
    let diagonal = (0..=k)
        .map(|j| {
            let s = (m + 2 * j) as f64;
            s * (s + 2.0) + (1.0 + jacobi_recurrence_coeffs(m, j).b) * half_c2
        })
        .collect();
    let off = (0..k).map(|j| jacobi_recurrence_coeffs(m, j).a * half_c2).collect();
    (diagonal, off)
}

/// All eigenpairs for one angular order.
#[derive(Debug, Clone)]
pub struct AngularOrder {
    pub m: usize,
    /// Jacobi truncation degree `K`.
    pub k: usize,
    /// Sturm-Liouville eigenvalues, ascending, `K + 1` of them.
    pub chi: Vec<f64>,
    /// Unit-norm expansion coefficients `β^{m,n}`, one per `chi` entry,
    /// signed so that `φ_{m,n}(−1) > 0`.
    pub beta: Vec<Vec<f64>>,
    /// `φ_{m,n}(−1)` for every eigenpair.
    pub endpoint: Vec<f64>,
    /// Signed prolate values `λ̃_{m,n}` for the retained radial orders, so
    /// that `α_{m,n} = i^m λ̃_{m,n}`; the sign alternates as `(−1)^n`.
    pub signed_lambda: Vec<f64>,
}

impl AngularOrder {
    /// Number of radial orders kept for reconstruction (`2n + m ≤ N`).
    pub fn retained(&self) -> usize {
        self.signed_lambda.len()
    }

    /// `λ_{m,n} = |α_{m,n}|`.
    pub fn lambda(&self, n: usize) -> f64 {
        self.signed_lambda[n].abs()
    }
}

/// Prolate basis for one bandwidth `c`, covering every `(m, n)` with
/// `2n + m ≤ N`.
#[derive(Debug, Clone)]
pub struct PswfBasis {
    pub c: f64,
    pub max_order: usize,
    pub orders: Vec<AngularOrder>,
}

/// `ln(π c^m / (2^{m−1/2} m! √(m+1)))`
fn log_prefactor(m: usize, c: f64) -> f64 {
    let mf = m as f64;
    let log_fact: f64 = (2..=m).map(|k| (k as f64).ln()).sum();
    mf * c.ln() - (mf - 0.5) * 2f64.ln() - log_fact - 0.5 * (mf + 1.0).ln() + PI.ln()
}

const ENDPOINT_FLOOR: f64 = 1e-300;

/// Signed `λ̃ = exp(log prefactor) · β_0 / φ(−1)`; invariant under `β → −β`.
pub fn signed_prolate_value(m: usize, c: f64, beta0: f64, endpoint: f64) -> Result<f64> {
    if endpoint.abs() < ENDPOINT_FLOOR {
        return Err(Error::Numerical(format!(
            "degenerate endpoint value φ(−1) = {endpoint:e} at m = {m}; truncation too small"
        )));
    }
    Ok(log_prefactor(m, c).exp() * beta0 / endpoint)
}

fn solve_order(c: f64, max_order: usize, m: usize) -> Result<AngularOrder> {
    let k = truncation_degree(max_order, m);
    let (diag, off) = build_tridiagonal(m, c, k);
    let eig = symmetric_tridiagonal_eig(&diag, &off)?;
    let p_at_minus_one = jacobi_eval_all(m, k, -1.0);
    let mut beta = eig.vectors;
    let mut endpoint = Vec::with_capacity(k + 1);
    for b in beta.iter_mut() {
        let norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        b.iter_mut().for_each(|v| *v /= norm);
        let mut phi: f64 = b.iter().zip(&p_at_minus_one).map(|(x, p)| x * p).sum();
        if phi < 0.0 {
            b.iter_mut().for_each(|v| *v = -*v);
            phi = -phi;
        }
        endpoint.push(phi);
    }
    let retained = if m <= max_order { (max_order - m) / 2 + 1 } else { 0 };
    let signed_lambda = (0..retained)
        .map(|n| signed_prolate_value(m, c, beta[n][0], endpoint[n]))
        .collect::<Result<Vec<_>>>()?;
    Ok(AngularOrder { m, k, chi: eig.values, beta, endpoint, signed_lambda })
}

impl PswfBasis {
    /// Solves the eigenproblems for `m = 0..=N`.
    pub fn assemble(c: f64, max_order: usize) -> Result<Self> {
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::Argument(format!("bandwidth must be positive, got {c}")));
        }
        let orders = (0..=max_order)
            .into_par_iter()
            .map(|m| solve_order(c, max_order, m))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { c, max_order, orders })
    }

    /// Basis with the default `N` for this bandwidth.
    pub fn with_default_order(c: f64) -> Result<Self> {
        Self::assemble(c, default_max_order(c))
    }

    pub fn order(&self, m: usize) -> Option<&AngularOrder> {
        self.orders.get(m)
    }

    pub fn contains(&self, m: usize, n: usize) -> bool {
        self.order(m).is_some_and(|o| n < o.retained())
    }

    fn retained_order(&self, m: usize, n: usize) -> Result<&AngularOrder> {
        self.order(m)
            .filter(|o| n < o.retained())
            .ok_or_else(|| Error::Argument(format!("(m={m}, n={n}) is not in the basis")))
    }

    /// `λ_{m,n} = |α_{m,n}|`.
    pub fn lambda(&self, m: usize, n: usize) -> Result<f64> {
        Ok(self.retained_order(m, n)?.lambda(n))
    }

    pub fn signed_lambda(&self, m: usize, n: usize) -> Result<f64> {
        Ok(self.retained_order(m, n)?.signed_lambda[n])
    }

    pub fn chi(&self, m: usize, n: usize) -> Result<f64> {
        Ok(self.retained_order(m, n)?.chi[n])
    }

    /// `α_{m,n} = i^m λ̃_{m,n}`.
    pub fn prolate_eigenvalue(&self, m: usize, n: usize) -> Result<Complex64> {
        Ok(i_pow(m) * self.signed_lambda(m, n)?)
    }

    /// `λ_{0,0}`, the largest prolate magnitude.
    pub fn lambda_max(&self) -> f64 {
        self.orders[0].lambda(0)
    }

    /// Every retained `(m, n, l)` in ascending order.
    pub fn all_indices(&self) -> Vec<ProlateIndex> {
        let mut out = Vec::new();
        for o in &self.orders {
            for n in 0..o.retained() {
                for &l in ProlateIndex::branches(o.m) {
                    out.push(ProlateIndex { m: o.m, n, l });
                }
            }
        }
        out
    }

    /// `J_ε = {(m, n, l) : λ_{m,n} > ε}`.
    pub fn cutoff_set(&self, epsilon: f64) -> Result<CutoffSet> {
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(Error::Argument(format!("cutoff must be positive, got {epsilon}")));
        }
        let indices = self
            .all_indices()
            .into_iter()
            .filter(|idx| self.orders[idx.m].lambda(idx.n) > epsilon)
            .collect();
        Ok(CutoffSet { epsilon, indices })
    }

    /// Radial factor `r^m φ_{m,n}(2r² − 1)`.
    pub fn radial(&self, m: usize, n: usize, r: f64) -> Result<f64> {
        let o = self.retained_order(m, n)?;
        let p = jacobi_eval_all(m, o.k, 2.0 * r * r - 1.0);
        Ok(r.powi(m as i32) * dot(&o.beta[n], &p))
    }

    /// `ψ_{m,n,l}(x; c)` for `‖x‖ ≤ 1`.
    pub fn eval(&self, idx: ProlateIndex, x: [f64; 2]) -> Result<f64> {
        let (r, theta) = polar(x)?;
        if idx.m > 0 && r == 0.0 {
            return Ok(0.0);
        }
        Ok(self.radial(idx.m, idx.n, r)? * spherical_harmonic(idx.m, idx.l, theta)?)
    }

    /// Radial factors for all retained `n` of order `m` at the points `radii`,
    /// laid out `out[n][point]`.
    pub fn radial_table(&self, m: usize, radii: &[f64]) -> Vec<Vec<f64>> {
        let o = &self.orders[m];
        let rec = JacobiRecurrence::new(m, o.k);
        let mut p = vec![0.0; o.k + 1];
        let mut out = vec![vec![0.0; radii.len()]; o.retained()];
        for (i, &r) in radii.iter().enumerate() {
            rec.eval_into(2.0 * r * r - 1.0, &mut p);
            let rm = r.powi(m as i32);
            for (n, row) in out.iter_mut().enumerate() {
                row[i] = rm * dot(&o.beta[n], &p);
            }
        }
        out
    }

    /// `Σ λ²` over every retained `(m, n, l)`; tends to `π²` as `N` grows.
    pub fn hilbert_schmidt_sum(&self) -> f64 {
        self.all_indices()
            .iter()
            .map(|i| self.orders[i.m].signed_lambda[i.n].powi(2))
            .sum()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `i^m` as a complex number.
pub fn i_pow(m: usize) -> Complex64 {
    match m % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

const DISK_SLACK: f64 = 1e-12;

/// Polar coordinates of a point in the closed unit disk. Radii within
/// rounding of 1 are clamped to 1.
pub fn polar(x: [f64; 2]) -> Result<(f64, f64)> {
    let r = x[0].hypot(x[1]);
    if r > 1.0 + DISK_SLACK || !r.is_finite() {
        return Err(Error::Domain(x[0], x[1]));
    }
    Ok((r.min(1.0), x[1].atan2(x[0])))
}

/// A spectral-cutoff index set, ordered ascending by `(m, n, l)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutoffSet {
    pub epsilon: f64,
    pub indices: Vec<ProlateIndex>,
}

impl CutoffSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn max_m(&self) -> Option<usize> {
        self.indices.iter().map(|i| i.m).max()
    }

    pub fn contains(&self, idx: &ProlateIndex) -> bool {
        self.indices.binary_search(idx).is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn tridiagonal_entries() {
        let (d, e) = build_tridiagonal(0, 30.0, 4);
        assert_abs_diff_eq!(d[0], 450.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e[0], 259.8076, epsilon = 1e-4);
        let (d, e) = build_tridiagonal(2, 0.0, 6);
        for (j, v) in d.iter().enumerate() {
            assert_eq!(*v, ((2 + 2 * j) * (4 + 2 * j)) as f64);
        }
        assert!(e.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn truncation_rule() {
        assert_eq!(truncation_degree(35, 0), 50);
        assert_eq!(truncation_degree(35, 1), 50);
        assert_eq!(truncation_degree(35, 2), 49);
        assert_eq!(default_max_order(30.0), 56);
    }

    #[test]
    fn index_validation() {
        assert!(ProlateIndex::new(0, 3, 1).is_ok());
        assert!(ProlateIndex::new(0, 3, 2).is_err());
        assert!(ProlateIndex::new(4, 0, 2).is_ok());
        assert!(ProlateIndex::new(4, 0, 3).is_err());
    }

    #[test]
    fn small_bandwidth_limits() {
        let basis = PswfBasis::assemble(0.01, 8).unwrap();
        for o in &basis.orders {
            for n in 0..o.retained() {
                let s = (o.m + 2 * n) as f64;
                assert_abs_diff_eq!(o.chi[n], s * (s + 2.0), epsilon = 1e-3);
            }
        }
        let alpha = basis.prolate_eigenvalue(0, 0).unwrap();
        assert_abs_diff_eq!(alpha.re, PI, epsilon = 1e-3);
        assert_eq!(alpha.im, 0.0);
    }

    #[test]
    fn odd_order_eigenvalues_are_imaginary() {
        let basis = PswfBasis::assemble(10.0, 12).unwrap();
        for n in 0..basis.orders[1].retained() {
            let a = basis.prolate_eigenvalue(1, n).unwrap();
            assert_eq!(a.re, 0.0);
            assert!(a.im != 0.0);
        }
    }

    #[test]
    fn sign_flip_leaves_lambda_unchanged() {
        let basis = PswfBasis::assemble(20.0, 30).unwrap();
        for o in basis.orders.iter().take(6) {
            for n in 0..o.retained().min(5) {
                let a = signed_prolate_value(o.m, basis.c, o.beta[n][0], o.endpoint[n]).unwrap();
                let b = signed_prolate_value(o.m, basis.c, -o.beta[n][0], -o.endpoint[n]).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn degenerate_endpoint_is_an_error() {
        assert!(signed_prolate_value(3, 30.0, 0.1, 0.0).is_err());
    }

    #[test]
    fn origin_values() {
        let basis = PswfBasis::assemble(30.0, 20).unwrap();
        let v = basis.eval(ProlateIndex::new(3, 1, 2).unwrap(), [0.0, 0.0]).unwrap();
        assert_eq!(v, 0.0);
        let v = basis.eval(ProlateIndex::new(0, 2, 1).unwrap(), [0.0, 0.0]).unwrap();
        let want = basis.orders[0].endpoint[2] / (2.0 * PI).sqrt();
        assert_abs_diff_eq!(v, want, epsilon = 1e-12 * want.abs());
        assert!(basis.eval(ProlateIndex::new(0, 0, 1).unwrap(), [0.9, 0.5]).is_err());
        assert!(basis.eval(ProlateIndex::new(0, 99, 1).unwrap(), [0.1, 0.5]).is_err());
    }

    #[test]
    fn cutoff_edges() {
        let basis = PswfBasis::assemble(30.0, 56).unwrap();
        let top = basis.lambda_max();
        assert!(basis.cutoff_set(top * 1.0001).unwrap().is_empty());
        let j = basis.cutoff_set(0.1 * top).unwrap();
        assert_eq!(j.indices[0], ProlateIndex { m: 0, n: 0, l: 1 });
        assert!(j.indices.windows(2).all(|w| w[0] < w[1]));
        assert!(basis.cutoff_set(0.0).is_err());
    }
}
