//! Scalar kernels: normalized Jacobi polynomials `P_n^{(0,m)}`, circular
//! harmonics, the Bessel function `J_1` and Gauss-Legendre rules.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Three-term recurrence coefficients of the normalized Jacobi family
/// `P_n^{(m)} = P_n^{(0,m)}` at index `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurrenceCoeffs {
    pub a: f64,
    pub b: f64,
    pub h: f64,
}

pub fn jacobi_recurrence_coeffs(m: usize, n: usize) -> RecurrenceCoeffs {
    let (m, n) = (m as f64, n as f64);
    let s = 2.0 * n + m;
    let a = 2.0 * (n + 1.0) * (n + m + 1.0) / ((s + 2.0) * ((s + 1.0) * (s + 3.0)).sqrt());
    // 0/0 at m = n = 0; every b_n vanishes in the Legendre case
    let b = if m == 0.0 { 0.0 } else { m * m / (s * (s + 2.0)) };
    let h = 1.0 / (2.0 * (s + 1.0)).sqrt();
    RecurrenceCoeffs { a, b, h }
}

/// Evaluates `P_0^{(m)}(t), ..., P_K^{(m)}(t)` into `out` (length `K + 1`).
///
/// The family is orthogonal under `(1 + t)^m` with
/// `∫ (1+t)^m P_j P_k dt = 2^{m+2} δ_jk`.
pub fn jacobi_eval_into(m: usize, t: f64, out: &mut [f64]) {
    let len = out.len();
    if len == 0 {
        return;
    }
    let mf = m as f64;
    out[0] = 1.0 / jacobi_recurrence_coeffs(m, 0).h;
    if len == 1 {
        return;
    }
    out[1] = ((mf + 2.0) * t - mf) / (2.0 * jacobi_recurrence_coeffs(m, 1).h);
    let mut prev = jacobi_recurrence_coeffs(m, 0);
    for n in 1..len - 1 {
        let cur = jacobi_recurrence_coeffs(m, n);
        out[n + 1] = ((t - cur.b) * out[n] - prev.a * out[n - 1]) / cur.a;
        prev = cur;
    }
}

/// Cached recurrence for repeated evaluation of `P_0^{(m)}, ..., P_K^{(m)}`.
#[derive(Debug, Clone)]
pub struct JacobiRecurrence {
    m: usize,
    /// `(a_n, b_n, 1/a_n)` for `n = 0..K`.
    coeffs: Vec<(f64, f64, f64)>,
    p0: f64,
    p1_scale: f64,
}

impl JacobiRecurrence {
    pub fn new(m: usize, k: usize) -> Self {
        let coeffs = (0..k.max(1))
            .map(|n| {
                let c = jacobi_recurrence_coeffs(m, n);
                (c.a, c.b, 1.0 / c.a)
            })
            .collect();
        Self {
            m,
            coeffs,
            p0: 1.0 / jacobi_recurrence_coeffs(m, 0).h,
            p1_scale: 1.0 / (2.0 * jacobi_recurrence_coeffs(m, 1).h),
        }
    }

    /// Same values as [`jacobi_eval_into`]; `out.len()` may not exceed `K + 1`.
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        let len = out.len();
        assert!(len <= self.coeffs.len() + 1, "recurrence built for fewer degrees");
        if len == 0 {
            return;
        }
        out[0] = self.p0;
        if len == 1 {
            return;
        }
        let mf = self.m as f64;
        out[1] = ((mf + 2.0) * t - mf) * self.p1_scale;
        for n in 1..len - 1 {
            let (_, b, inv_a) = self.coeffs[n];
            let a_prev = self.coeffs[n - 1].0;
            out[n + 1] = ((t - b) * out[n] - a_prev * out[n - 1]) * inv_a;
        }
    }
}

pub fn jacobi_eval_all(m: usize, k: usize, t: f64) -> Vec<f64> {
    let mut out = vec![0.0; k + 1];
    jacobi_eval_into(m, t, &mut out);
    out
}

/// Orthonormal circular harmonic `Y_{m,l}(θ)`; `l = 1` is the cosine branch,
/// `l = 2` the sine branch (only for `m ≥ 1`).
pub fn spherical_harmonic(m: usize, l: u8, theta: f64) -> Result<f64> {
    match (m, l) {
        (0, 1) => Ok(1.0 / (2.0 * PI).sqrt()),
        (m, 1) if m >= 1 => Ok((m as f64 * theta).cos() / PI.sqrt()),
        (m, 2) if m >= 1 => Ok((m as f64 * theta).sin() / PI.sqrt()),
        _ => Err(Error::Argument(format!("invalid harmonic index (m={m}, l={l})"))),
    }
}

const J1_SERIES_LIMIT: f64 = 14.0;

/// Bessel function of the first kind of order one, for `z ≥ 0`.
///
/// Ascending series below `z = 14`, Hankel asymptotic expansion above.
/// The crossover sits where the asymptotic series, truncated at its smallest
/// term, first reaches ~1e-12 absolute; at `z = 14` the ascending series
/// still loses less than 1e-11 to cancellation.
pub fn bessel_j1(z: f64) -> f64 {
    if z < 0.0 {
        return -bessel_j1(-z);
    }
    if z < J1_SERIES_LIMIT {
        j1_series(z)
    } else {
        j1_asymptotic(z)
    }
}

fn j1_series(z: f64) -> f64 {
    let half = 0.5 * z;
    let q = -half * half;
    let mut term = half;
    let mut sum = term;
    for k in 1..200 {
        term *= q / (k as f64 * (k + 1) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn j1_asymptotic(z: f64) -> f64 {
    // a_k = Π_{j=1..k} (4 - (2j-1)^2) / (k! 8^k z^k)
    let mu = 4.0;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0_f64;
    let mut last = f64::INFINITY;
    for k in 1..120 {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (k as f64 * 8.0 * z);
        if next.abs() >= last || next == 0.0 {
            break;
        }
        last = next.abs();
        term = next;
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if last < 1e-17 {
            break;
        }
    }
    let chi = z - 0.75 * PI;
    (2.0 / (PI * z)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Gauss-Legendre nodes (ascending) and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendreRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendreRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }
}

/// Legendre `P_T(t)` and its derivative.
fn legendre_with_derivative(order: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = t;
    for k in 2..=order {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let n = order as f64;
    let dp = n * (t * p1 - p0) / (t * t - 1.0);
    (p1, dp)
}

const GL_MAX_ITER: usize = 100;
const GL_TOL: f64 = 1e-15;

pub fn gauss_legendre_rule(order: usize) -> Result<GaussLegendreRule> {
    if order == 0 {
        return Err(Error::Argument("Gauss-Legendre order must be positive".into()));
    }
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    // Roots come in ± pairs; solve the positive half and mirror.
    for i in 0..n.div_ceil(2) {
        // i-th largest root
        let mut t = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut converged = false;
        for _ in 0..GL_MAX_ITER {
            let (p, dp) = legendre_with_derivative(n, t);
            let step = p / dp;
            t -= step;
            if step.abs() <= GL_TOL {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Numerical(format!(
                "Legendre root {i} of degree {n} did not converge"
            )));
        }
        if n % 2 == 1 && i == n / 2 {
            t = 0.0;
        }
        let (_, dp) = legendre_with_derivative(n, t);
        let w = 2.0 / ((1.0 - t * t) * dp * dp);
        nodes[n - 1 - i] = t;
        nodes[i] = -t;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    Ok(GaussLegendreRule { nodes, weights })
}
