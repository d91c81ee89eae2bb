//! Oracles shared by the integration suites.

#![allow(dead_code)]

use std::f64::consts::PI;

use lowrank_scatter::pswf::{ProlateIndex, PswfBasis};
use lowrank_scatter::quadrature::{choose_t_m, DiskQuadrature, NodeRule};
use lowrank_scatter::specfun::gauss_legendre_rule;
use lowrank_scatter::pswf::CutoffSet;
use num_complex::Complex64;
use rayon::prelude::*;

/// `‖𝔉_c ψ − α ψ‖_{L²(B)} / λ` for every index in `indices`.
///
/// `𝔉_c ψ(x) = ∫_B e^{i c x·y} ψ(y) dy` is computed by brute force: plain
/// Gauss-Legendre in `r ∈ [0, 1]` (weight `r dr`) times a dense trapezoid in
/// angle. By rotation covariance the residual is `g(ρ) Y(φ)`, so it is
/// sampled along one ray where `Y` is maximal and integrated in `ρ`.
pub fn eigen_residuals(basis: &PswfBasis, indices: &[ProlateIndex]) -> Vec<f64> {
    let c = basis.c;
    let radial = gauss_legendre_rule(96).unwrap();
    let r: Vec<f64> = radial.nodes.iter().map(|t| 0.5 * (t + 1.0)).collect();
    let wr: Vec<f64> = radial.weights.iter().zip(&r).map(|(w, r)| 0.5 * w * r).collect();
    let n_theta = 256;
    let wt = 2.0 * PI / n_theta as f64;
    let outer = gauss_legendre_rule(32).unwrap();
    let rho: Vec<f64> = outer.nodes.iter().map(|t| 0.5 * (t + 1.0)).collect();
    let wrho: Vec<f64> = outer.weights.iter().zip(&rho).map(|(w, r)| 0.5 * w * r).collect();

    indices
        .par_iter()
        .map(|idx| {
            let m = idx.m as f64;
            let (phi, ymax) = match (idx.m, idx.l) {
                (0, _) => (0.0, 1.0 / (2.0 * PI).sqrt()),
                (_, 1) => (0.0, 1.0 / PI.sqrt()),
                _ => (PI / (2.0 * m), 1.0 / PI.sqrt()),
            };
            let y = |th: f64| -> f64 {
                match (idx.m, idx.l) {
                    (0, _) => 1.0 / (2.0 * PI).sqrt(),
                    (_, 1) => (m * th).cos() / PI.sqrt(),
                    _ => (m * th).sin() / PI.sqrt(),
                }
            };
            let psi_r: Vec<f64> = r.iter().map(|&rr| basis.radial(idx.m, idx.n, rr).unwrap()).collect();
            let alpha = basis.prolate_eigenvalue(idx.m, idx.n).unwrap();
            let mut resid = 0.0;
            for (&p, &wp) in rho.iter().zip(&wrho) {
                let mut f = Complex64::new(0.0, 0.0);
                for a in 0..n_theta {
                    let th = a as f64 * wt;
                    let yt = y(th) * wt;
                    let cos_rel = (th - phi).cos();
                    for ((&rr, &w), &pr) in r.iter().zip(&wr).zip(&psi_r) {
                        f += Complex64::from_polar(w * pr * yt, c * p * rr * cos_rel);
                    }
                }
                let g = f / ymax;
                let want = alpha * basis.radial(idx.m, idx.n, p).unwrap();
                resid += wp * (g - want).norm_sqr();
            }
            resid.sqrt() / basis.lambda(idx.m, idx.n).unwrap()
        })
        .collect()
}

/// Largest `|G − I|` entry of the quadrature Gram matrix over `cutoff`,
/// using the rule `choose_t_m` selects.
pub fn gram_deviation(basis: &PswfBasis, cutoff: &CutoffSet) -> f64 {
    let (t, m) = choose_t_m(basis, cutoff, cutoff.epsilon, &NodeRule::default()).unwrap();
    let quad = DiskQuadrature::new(t, m).unwrap();
    let samples: Vec<Vec<f64>> = cutoff
        .indices
        .par_iter()
        .map(|idx| {
            let mut v = Vec::with_capacity(quad.len());
            for j in 0..quad.t() {
                let w = quad.weight(j).sqrt();
                for i in 0..quad.m() {
                    v.push(w * basis.eval(*idx, quad.node(j, i)).unwrap());
                }
            }
            v
        })
        .collect();
    (0..samples.len())
        .into_par_iter()
        .map(|a| {
            (a..samples.len())
                .map(|b| {
                    let g: f64 = samples[a].iter().zip(&samples[b]).map(|(x, y)| x * y).sum();
                    (g - if a == b { 1.0 } else { 0.0 }).abs()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}
