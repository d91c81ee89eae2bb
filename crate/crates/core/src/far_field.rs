//! Born far-field synthesis, multiplicative noise, and the mapping of
//! direction pairs onto disk quadrature nodes.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contrast::ContrastSpec;
use crate::error::{Error, Result};
use crate::pswf::PswfBasis;
use crate::quadrature::{DiskQuadrature, SampleMatrix};

/// Unit vector at angle `2πj/n`.
pub fn direction(j: usize, n: usize) -> [f64; 2] {
    let phi = 2.0 * PI * j as f64 / n as f64;
    [phi.cos(), phi.sin()]
}

/// Far-field samples `u^∞(x̂_m; θ̂_ℓ)`, rows observation and columns incidence.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldMatrix {
    pub k: f64,
    pub n1: usize,
    pub n2: usize,
    /// Row-major, `values[m * n2 + ℓ]`.
    pub values: Vec<Complex64>,
}

impl FarFieldMatrix {
    pub fn new(k: f64, n1: usize, n2: usize, values: Vec<Complex64>) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Argument(format!("wave number must be positive, got {k}")));
        }
        if n1 == 0 || n2 == 0 {
            return Err(Error::Argument("direction grids must be non-empty".into()));
        }
        if values.len() != n1 * n2 {
            return Err(Error::Argument(format!("expected {} values, got {}", n1 * n2, values.len())));
        }
        Ok(Self { k, n1, n2, values })
    }

    pub fn get(&self, obs: usize, inc: usize) -> Complex64 {
        self.values[obs * self.n2 + inc]
    }

    /// Bandwidth `c = 2k`.
    pub fn c(&self) -> f64 {
        2.0 * self.k
    }

    /// Fourier point `(θ̂_ℓ − x̂_m)/2` probed by entry `(m, ℓ)`.
    pub fn fourier_point(&self, obs: usize, inc: usize) -> [f64; 2] {
        pair_point(direction(obs, self.n1), direction(inc, self.n2))
    }
}

fn pair_point(obs: [f64; 2], inc: [f64; 2]) -> [f64; 2] {
    [0.5 * (inc[0] - obs[0]), 0.5 * (inc[1] - obs[1])]
}

/// `k² u((θ̂_ℓ − x̂_m)/2; 2k)` on the uniform direction grids.
pub fn synthesize_born(
    spec: &ContrastSpec,
    k: f64,
    n1: usize,
    n2: usize,
    basis: Option<&PswfBasis>,
) -> Result<FarFieldMatrix> {
    spec.validate()?;
    let shell = FarFieldMatrix::new(k, n1, n2, vec![Complex64::new(0.0, 0.0); n1 * n2])?;
    let c = shell.c();
    let values = (0..n1 * n2)
        .into_par_iter()
        .map(|e| {
            let p = shell.fourier_point(e / n2, e % n2);
            spec.born_point_value(c, clamp_to_disk(p), basis).map(|u| u * k * k)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FarFieldMatrix { values, ..shell })
}

/// Differences of unit vectors can exceed the unit disk by rounding.
fn clamp_to_disk(p: [f64; 2]) -> [f64; 2] {
    let r = p[0].hypot(p[1]);
    if r > 1.0 {
        [p[0] / r, p[1] / r]
    } else {
        p
    }
}

/// `u ↦ u (1 + δξ)` with one `ξ ~ U(−1, 1)` per entry, drawn in slice order
/// from ChaCha8 seeded by `seed`.
pub fn perturb_multiplicative(values: &mut [Complex64], delta: f64, seed: u64) -> Result<()> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::Argument(format!("noise level must be non-negative, got {delta}")));
    }
    if delta == 0.0 {
        return Ok(());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for v in values.iter_mut() {
        let xi: f64 = rng.gen_range(-1.0..1.0);
        *v *= 1.0 + delta * xi;
    }
    Ok(())
}

pub fn add_noise(f: &FarFieldMatrix, delta: f64, seed: u64) -> Result<FarFieldMatrix> {
    let mut out = f.clone();
    perturb_multiplicative(&mut out.values, delta, seed)?;
    Ok(out)
}

/// Direction pair assigned to each quadrature node.
#[derive(Debug, Clone, PartialEq)]
pub struct MockNodes {
    pub n1: usize,
    pub n2: usize,
    /// `(observation index, incidence index)` for node `j * M + i`.
    pub pairs: Vec<(usize, usize)>,
    /// `‖p̃_n − p_n‖` per node.
    pub distances: Vec<f64>,
}

impl MockNodes {
    pub fn max_distance(&self) -> f64 {
        self.distances.iter().copied().fold(0.0, f64::max)
    }
}

/// Nearest direction pair `(θ̂_ℓ − x̂_j)/2` to every exact node. Ties go to the
/// lexicographically smallest `(ℓ, j)`.
pub fn mock_nodes(quad: &DiskQuadrature, n1: usize, n2: usize) -> Result<MockNodes> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::Argument("direction grids must be non-empty".into()));
    }
    let obs: Vec<[f64; 2]> = (0..n1).map(|j| direction(j, n1)).collect();
    // ℓ-major so a linear scan with strict `<` honours the tie-break
    let candidates: Vec<[f64; 2]> = (0..n2)
        .flat_map(|l| {
            let inc = direction(l, n2);
            obs.iter().map(move |&o| pair_point(o, inc))
        })
        .collect();
    let nodes: Vec<[f64; 2]> = (0..quad.t())
        .flat_map(|j| (0..quad.m()).map(move |i| (j, i)))
        .map(|(j, i)| quad.node(j, i))
        .collect();
    let best: Vec<(usize, f64)> = nodes.par_iter().map(|p| nearest(&candidates, *p)).collect();
    Ok(MockNodes {
        n1,
        n2,
        pairs: best.iter().map(|&(e, _)| (e % n1, e / n1)).collect(),
        distances: best.iter().map(|&(_, d)| d).collect(),
    })
}

/// First index of minimal distance to `p`, with that distance.
fn nearest(candidates: &[[f64; 2]], p: [f64; 2]) -> (usize, f64) {
    let mut arg = 0;
    let mut d2 = f64::INFINITY;
    for (e, q) in candidates.iter().enumerate() {
        let dx = q[0] - p[0];
        let dy = q[1] - p[1];
        let d = dx * dx + dy * dy;
        if d < d2 {
            d2 = d;
            arg = e;
        }
    }
    (arg, d2.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    Exact,
    Mock,
}

/// Fourier data on the quadrature nodes, `U[j][i] ≈ u(p_{ji}; c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PostProcessedData {
    pub c: f64,
    pub u: SampleMatrix,
    pub nodes: NodeKind,
}

impl PostProcessedData {
    pub fn with_noise(&self, delta: f64, seed: u64) -> Result<Self> {
        let mut out = self.clone();
        perturb_multiplicative(&mut out.u.data, delta, seed)?;
        Ok(out)
    }
}

/// Picks the far-field entry at each mock node and divides by `k²`.
pub fn process_farfield(f: &FarFieldMatrix, quad: &DiskQuadrature) -> Result<PostProcessedData> {
    let mock = mock_nodes(quad, f.n1, f.n2)?;
    process_with_nodes(f, quad, &mock)
}

/// [`process_farfield`] with a precomputed node assignment.
pub fn process_with_nodes(f: &FarFieldMatrix, quad: &DiskQuadrature, mock: &MockNodes) -> Result<PostProcessedData> {
    if mock.n1 != f.n1 || mock.n2 != f.n2 || mock.pairs.len() != quad.len() {
        return Err(Error::Argument("mock nodes were built for a different grid".into()));
    }
    let scale = 1.0 / (f.k * f.k);
    let mut u = SampleMatrix::zeros(quad.t(), quad.m());
    for (slot, &(obs, inc)) in u.data.iter_mut().zip(&mock.pairs) {
        *slot = f.get(obs, inc) * scale;
    }
    if u.data.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Numerical("far-field data contains non-finite values".into()));
    }
    Ok(PostProcessedData { c: f.c(), u, nodes: NodeKind::Mock })
}

/// Closed-form data on the exact quadrature nodes.
pub fn exact_postprocessed(
    spec: &ContrastSpec,
    c: f64,
    quad: &DiskQuadrature,
    basis: Option<&PswfBasis>,
) -> Result<PostProcessedData> {
    spec.validate()?;
    let cols = quad.m();
    let data = (0..quad.len())
        .into_par_iter()
        .map(|e| spec.born_point_value(c, quad.node(e / cols, e % cols), basis))
        .collect::<Result<Vec<_>>>()?;
    Ok(PostProcessedData { c, u: SampleMatrix { rows: quad.t(), cols, data }, nodes: NodeKind::Exact })
}
