//! Projection onto a spectral cutoff set, inversion of the prolate
//! eigenvalues, and evaluation of the regularized contrast.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contrast::ContrastSpec;
use crate::error::{Error, Result};
use crate::far_field::{exact_postprocessed, mock_nodes, process_with_nodes, FarFieldMatrix, PostProcessedData};
use crate::pswf::{polar, CutoffSet, ProlateIndex, PswfBasis};
use crate::quadrature::{choose_t_m, DiskQuadrature, NodeRule};
use crate::specfun::{spherical_harmonic, JacobiRecurrence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientKind {
    /// `u_{m,n,l}`, projections of the Fourier data.
    Data,
    /// `q_{m,n,l}`, projections of the contrast.
    Contrast,
}

/// Coefficients keyed by the indices of a cutoff set, ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientVector {
    pub c: f64,
    pub kind: CoefficientKind,
    pub indices: Vec<ProlateIndex>,
    pub values: Vec<Complex64>,
}

impl CoefficientVector {
    pub fn zeros(c: f64, kind: CoefficientKind, cutoff: &CutoffSet) -> Self {
        let indices = cutoff.indices.clone();
        let values = vec![Complex64::new(0.0, 0.0); indices.len()];
        Self { c, kind, indices, values }
    }

    pub fn get(&self, idx: &ProlateIndex) -> Option<Complex64> {
        self.indices.binary_search(idx).ok().map(|p| self.values[p])
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖a − b‖_ℓ²` over the union of both index sets.
    pub fn l2_distance(&self, other: &Self) -> f64 {
        let mut sum = 0.0;
        let (mut a, mut b) = (0, 0);
        while a < self.len() || b < other.len() {
            let d = match (self.indices.get(a), other.indices.get(b)) {
                (Some(x), Some(y)) if x == y => {
                    a += 1;
                    b += 1;
                    self.values[a - 1] - other.values[b - 1]
                }
                (Some(x), Some(y)) if x < y => {
                    a += 1;
                    self.values[a - 1]
                }
                (Some(_), None) => {
                    a += 1;
                    self.values[a - 1]
                }
                _ => {
                    b += 1;
                    other.values[b - 1]
                }
            };
            sum += d.norm_sqr();
        }
        sum.sqrt()
    }
}

fn check_bandwidth(basis: &PswfBasis, c: f64) -> Result<()> {
    if (basis.c - c).abs() > 1e-12 * c.max(1.0) {
        return Err(Error::Argument(format!("data at c = {c} but basis built for c = {}", basis.c)));
    }
    Ok(())
}

/// `u_{m,n,l} = ¼ Σ_j Σ_i U_{ji} ψ_{m,n,l}(r_j, θ_i) ω_{t_j} ω_θ` for every index
/// of `cutoff`, evaluated separably (angular sums first).
pub fn project_data(
    data: &PostProcessedData,
    basis: &PswfBasis,
    quad: &DiskQuadrature,
    cutoff: &CutoffSet,
) -> Result<CoefficientVector> {
    check_bandwidth(basis, data.c)?;
    quad.check_shape(&data.u)?;
    for idx in &cutoff.indices {
        if !basis.contains(idx.m, idx.n) {
            return Err(Error::Argument(format!("index {idx} is not in the basis")));
        }
    }
    let orders: Vec<usize> = {
        let mut v: Vec<usize> = cutoff.indices.iter().map(|i| i.m).collect();
        v.dedup();
        v
    };
    let t = quad.t();
    let per_order: Vec<Vec<Complex64>> = orders
        .par_iter()
        .map(|&m| {
            let radial = basis.radial_table(m, &quad.radii);
            let mut angular = [vec![Complex64::new(0.0, 0.0); t], vec![Complex64::new(0.0, 0.0); t]];
            for &l in ProlateIndex::branches(m) {
                let y: Vec<f64> = quad
                    .angles
                    .iter()
                    .map(|&th| spherical_harmonic(m, l, th).expect("valid branch"))
                    .collect();
                for (j, slot) in angular[l as usize - 1].iter_mut().enumerate() {
                    let s: Complex64 = data.u.row(j).iter().zip(&y).map(|(v, w)| v * w).sum();
                    *slot = s * quad.angular_weight;
                }
            }
            cutoff
                .indices
                .iter()
                .filter(|i| i.m == m)
                .map(|i| {
                    let a = &angular[i.l as usize - 1];
                    (0..t)
                        .map(|j| a[j] * (0.25 * quad.radial_weights[j] * radial[i.n][j]))
                        .sum()
                })
                .collect()
        })
        .collect();
    Ok(CoefficientVector {
        c: data.c,
        kind: CoefficientKind::Data,
        indices: cutoff.indices.clone(),
        values: per_order.into_iter().flatten().collect(),
    })
}

/// Smallest `λ` that may be divided by.
const MIN_DIVISOR: f64 = 1e-300;

/// `q_{m,n,l} = u_{m,n,l} / α_{m,n}`.
pub fn solve_coefficients(u: &CoefficientVector, basis: &PswfBasis) -> Result<CoefficientVector> {
    if u.kind != CoefficientKind::Data {
        return Err(Error::Argument("expected data-side coefficients".into()));
    }
    check_bandwidth(basis, u.c)?;
    let values = u
        .indices
        .iter()
        .zip(&u.values)
        .map(|(idx, v)| {
            if basis.lambda(idx.m, idx.n)? < MIN_DIVISOR {
                return Err(Error::Numerical(format!("prolate eigenvalue of {idx} is too small to divide by")));
            }
            Ok(v / basis.prolate_eigenvalue(idx.m, idx.n)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoefficientVector { c: u.c, kind: CoefficientKind::Contrast, indices: u.indices.clone(), values })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutoffMode {
    NoiselessBorn,
    NoisyBorn,
    FullData,
}

impl FromStr for CutoffMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "noiseless-born" => Ok(Self::NoiselessBorn),
            "noisy-born" => Ok(Self::NoisyBorn),
            "full-data" => Ok(Self::FullData),
            _ => Err(Error::Argument(format!(
                "unknown mode '{s}' (expected noiseless-born, noisy-born or full-data)"
            ))),
        }
    }
}

impl fmt::Display for CutoffMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::NoiselessBorn => "noiseless-born",
            Self::NoisyBorn => "noisy-born",
            Self::FullData => "full-data",
        })
    }
}

/// `ε` as a multiple of `λ_{0,0}`: 0.1 noiseless, `δ` noisy (0.1 when
/// `δ = 0`), 0.9 for full-model data.
pub fn cutoff_rule(mode: CutoffMode, delta: f64, basis: &PswfBasis) -> Result<f64> {
    let lambda00 = basis.lambda(0, 0)?;
    let factor = match mode {
        CutoffMode::NoiselessBorn => 0.1,
        CutoffMode::NoisyBorn => {
            if !(0.0..1.0).contains(&delta) {
                return Err(Error::Argument(format!("noise level must lie in [0, 1), got {delta}")));
            }
            if delta == 0.0 {
                0.1
            } else {
                delta
            }
        }
        CutoffMode::FullData => 0.9,
    };
    Ok(factor * lambda00)
}

/// Optional pins for individual pipeline stages.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Overrides {
    pub t: Option<usize>,
    pub m: Option<usize>,
    pub epsilon: Option<f64>,
    /// Basis truncation `N`.
    pub max_order: Option<usize>,
}

/// `q̃^ε = Σ_{J_ε} q_{m,n,l} ψ_{m,n,l}`.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub coefficients: CoefficientVector,
    pub basis: Arc<PswfBasis>,
    pub epsilon: f64,
    profiles: Vec<Profile>,
}

/// Drops trailing Jacobi coefficients that are negligible against the
/// profile, weighting each by `P_n^{(m)}(1) = √(2(2n + m + 1))`.
fn trim_tail(m: usize, jacobi: &mut [Vec<Complex64>; 2]) {
    let weight = |n: usize| (2.0 * (2 * n + m + 1) as f64).sqrt();
    let norm: f64 = (0..jacobi[0].len())
        .map(|n| (jacobi[0][n].norm() + jacobi[1][n].norm()) * weight(n))
        .sum();
    let mut tail = 0.0;
    let mut keep = jacobi[0].len();
    while keep > 1 {
        let n = keep - 1;
        let add = (jacobi[0][n].norm() + jacobi[1][n].norm()) * weight(n);
        if tail + add > 1e-17 * norm {
            break;
        }
        tail += add;
        keep -= 1;
    }
    for branch in jacobi.iter_mut() {
        branch.truncate(keep);
    }
}

/// Coefficients of one angular order collapsed onto the Jacobi basis, per branch.
#[derive(Debug, Clone)]
struct Profile {
    m: usize,
    recurrence: JacobiRecurrence,
    jacobi: [Vec<Complex64>; 2],
}

impl Reconstruction {
    pub fn new(coefficients: CoefficientVector, basis: Arc<PswfBasis>, epsilon: f64) -> Result<Self> {
        if coefficients.kind != CoefficientKind::Contrast {
            return Err(Error::Argument("a reconstruction needs contrast-side coefficients".into()));
        }
        check_bandwidth(&basis, coefficients.c)?;
        let mut profiles: Vec<Profile> = Vec::new();
        for (idx, q) in coefficients.indices.iter().zip(&coefficients.values) {
            let order = basis
                .order(idx.m)
                .filter(|o| idx.n < o.retained())
                .ok_or_else(|| Error::Argument(format!("index {idx} is not in the basis")))?;
            if profiles.last().is_none_or(|p| p.m != idx.m) {
                let zero = vec![Complex64::new(0.0, 0.0); order.k + 1];
                profiles.push(Profile { m: idx.m, recurrence: JacobiRecurrence::new(idx.m, order.k), jacobi: [zero.clone(), zero] });
            }
            let target = &mut profiles.last_mut().expect("pushed above").jacobi[idx.l as usize - 1];
            for (t, b) in target.iter_mut().zip(&order.beta[idx.n]) {
                *t += q * b;
            }
        }
        for p in &mut profiles {
            trim_tail(p.m, &mut p.jacobi);
        }
        Ok(Self { coefficients, basis, epsilon, profiles })
    }

    pub fn evaluate(&self, x: [f64; 2]) -> Result<Complex64> {
        let (r, theta) = polar(x)?;
        let mut scratch = Vec::new();
        Ok(self.evaluate_polar(r, theta, &mut scratch))
    }

    fn evaluate_polar(&self, r: f64, theta: f64, scratch: &mut Vec<f64>) -> Complex64 {
        let t = 2.0 * r * r - 1.0;
        let mut sum = Complex64::new(0.0, 0.0);
        for p in &self.profiles {
            if p.m > 0 && r == 0.0 {
                continue;
            }
            let k = p.jacobi[0].len();
            scratch.resize(k, 0.0);
            p.recurrence.eval_into(t, scratch);
            let radial = |c: &[Complex64]| -> Complex64 { c.iter().zip(scratch.iter()).map(|(a, b)| a * b).sum() };
            let rm = r.powi(p.m as i32);
            let y1 = spherical_harmonic(p.m, 1, theta).unwrap_or(0.0);
            let mut v = radial(&p.jacobi[0]) * y1;
            if p.m > 0 {
                v += radial(&p.jacobi[1]) * spherical_harmonic(p.m, 2, theta).unwrap_or(0.0);
            }
            sum += v * rm;
        }
        sum
    }

    /// Samples on the `n × n` cell centres of `[−1, 1]²`, masking `‖x‖ > 1`.
    pub fn evaluate_grid(&self, n: usize) -> Result<ContrastGrid> {
        if n < 2 {
            return Err(Error::Argument(format!("grid resolution must be at least 2, got {n}")));
        }
        let values = (0..n * n)
            .into_par_iter()
            .map_init(Vec::new, |scratch, e| {
                let [x, y] = ContrastGrid::cell_center(n, e / n, e % n);
                let r = x.hypot(y);
                (r <= 1.0).then(|| self.evaluate_polar(r, y.atan2(x), scratch))
            })
            .collect();
        Ok(ContrastGrid { n, values })
    }

    /// `q̃^ε` on the nodes of `quad`, laid out `[j * M + i]`.
    pub fn evaluate_on(&self, quad: &DiskQuadrature) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); quad.len()];
        let idx = &self.coefficients.indices;
        let mut start = 0;
        while start < idx.len() {
            let m = idx[start].m;
            let end = start + idx[start..].iter().take_while(|i| i.m == m).count();
            let radial = self.basis.radial_table(m, &quad.radii);
            for &l in ProlateIndex::branches(m) {
                // combine radial profiles first, then spread over angles
                let mut profile = vec![Complex64::new(0.0, 0.0); quad.t()];
                for (i, q) in idx[start..end].iter().zip(&self.coefficients.values[start..end]) {
                    if i.l == l {
                        for (p, r) in profile.iter_mut().zip(&radial[i.n]) {
                            *p += q * r;
                        }
                    }
                }
                let y: Vec<f64> = quad.angles.iter().map(|&th| spherical_harmonic(m, l, th).unwrap_or(0.0)).collect();
                for (j, p) in profile.iter().enumerate() {
                    for (i, yi) in y.iter().enumerate() {
                        out[j * quad.m() + i] += p * yi;
                    }
                }
            }
            start = end;
        }
        out
    }

    /// `‖q̃^ε‖_{L²(B)}` by quadrature.
    pub fn l2_norm(&self, quad: &DiskQuadrature) -> f64 {
        let values = self.evaluate_on(quad);
        weighted_norm(quad, values.iter().copied())
    }

    /// Ratio of imaginary to total `L²` mass; a diagnostic for real truths.
    pub fn imaginary_fraction(&self, quad: &DiskQuadrature) -> f64 {
        let values = self.evaluate_on(quad);
        let total = weighted_norm(quad, values.iter().copied());
        if total == 0.0 {
            return 0.0;
        }
        weighted_norm(quad, values.iter().map(|v| Complex64::new(0.0, v.im))) / total
    }
}

fn weighted_norm(quad: &DiskQuadrature, values: impl Iterator<Item = Complex64>) -> f64 {
    let m = quad.m();
    values
        .enumerate()
        .map(|(e, v)| quad.weight(e / m) * v.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Samples on an `n × n` grid over `[−1, 1]²`. Row 0 is the top (`y` near 1),
/// column 0 the left edge; `None` marks cells outside the disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ContrastGrid {
    pub n: usize,
    pub values: Vec<Option<Complex64>>,
}

impl ContrastGrid {
    pub fn cell_center(n: usize, row: usize, col: usize) -> [f64; 2] {
        let h = 2.0 / n as f64;
        [-1.0 + (col as f64 + 0.5) * h, 1.0 - (row as f64 + 0.5) * h]
    }

    pub fn get(&self, row: usize, col: usize) -> Option<Complex64> {
        self.values[row * self.n + col]
    }

    pub fn cell_area(&self) -> f64 {
        (2.0 / self.n as f64).powi(2)
    }

    /// Riemann-sum `L²` norm over unmasked cells.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().flatten().map(|v| v.norm_sqr()).sum();
        (s * self.cell_area()).sqrt()
    }

    /// 4-connected regions where `Re > threshold`, in scan order of their
    /// first cell.
    pub fn components_above(&self, threshold: f64) -> Vec<Component> {
        let n = self.n;
        let hot = |e: usize| self.values[e].is_some_and(|v| v.re > threshold);
        let mut seen = vec![false; n * n];
        let mut out = Vec::new();
        for start in 0..n * n {
            if seen[start] || !hot(start) {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let (mut sx, mut sy, mut cells) = (0.0, 0.0, 0usize);
            while let Some(e) = stack.pop() {
                let (row, col) = (e / n, e % n);
                let [x, y] = Self::cell_center(n, row, col);
                sx += x;
                sy += y;
                cells += 1;
                let neighbours = [
                    (row > 0).then(|| e - n),
                    (row + 1 < n).then(|| e + n),
                    (col > 0).then(|| e - 1),
                    (col + 1 < n).then(|| e + 1),
                ];
                for nb in neighbours.into_iter().flatten() {
                    if !seen[nb] && hot(nb) {
                        seen[nb] = true;
                        stack.push(nb);
                    }
                }
            }
            out.push(Component { cells, centroid: [sx / cells as f64, sy / cells as f64] });
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Component {
    pub cells: usize,
    pub centroid: [f64; 2],
}

/// Reference against which a reconstruction is scored.
#[derive(Debug, Clone, Copy)]
pub enum Truth<'a> {
    Spec(&'a ContrastSpec),
    Coefficients(&'a CoefficientVector),
}

/// Over-resolved rule for scoring against discontinuous truths.
pub const TRUTH_QUADRATURE: (usize, usize) = (400, 401);

/// `‖q̃^ε − q‖_{L²(B)} / ‖q‖_{L²(B)}`.
pub fn relative_l2_error(rec: &Reconstruction, truth: Truth<'_>) -> Result<f64> {
    match truth {
        Truth::Coefficients(q) => {
            if q.kind != CoefficientKind::Contrast {
                return Err(Error::Argument("truth coefficients must be contrast-side".into()));
            }
            let norm = q.l2_norm();
            if norm == 0.0 {
                return Err(Error::Argument("truth has zero norm".into()));
            }
            Ok(rec.coefficients.l2_distance(q) / norm)
        }
        Truth::Spec(spec) => {
            let quad = DiskQuadrature::new(TRUTH_QUADRATURE.0, TRUTH_QUADRATURE.1)?;
            let approx = rec.evaluate_on(&quad);
            let cols = quad.m();
            let truth = (0..quad.len())
                .into_par_iter()
                .map(|e| spec.contrast_value(quad.node(e / cols, e % cols), Some(&rec.basis)))
                .collect::<Result<Vec<_>>>()?;
            let norm = weighted_norm(&quad, truth.iter().copied());
            if norm == 0.0 {
                return Err(Error::Argument("truth has zero norm".into()));
            }
            let diff = weighted_norm(&quad, approx.iter().zip(&truth).map(|(a, b)| a - b));
            Ok(diff / norm)
        }
    }
}

/// Contrast coefficients of `spec` on `cutoff`, via `⟨u, ψ⟩ = α ⟨q, ψ⟩` with
/// closed-form data on a rule twice as fine as the one `choose_t_m` picks.
pub fn truth_coefficients(spec: &ContrastSpec, basis: &PswfBasis, cutoff: &CutoffSet) -> Result<CoefficientVector> {
    if cutoff.is_empty() {
        return Ok(CoefficientVector::zeros(basis.c, CoefficientKind::Contrast, cutoff));
    }
    let (t, m) = choose_t_m(basis, cutoff, cutoff.epsilon, &NodeRule::default())?;
    let quad = DiskQuadrature::new(2 * t, 2 * m + 1)?;
    let data = exact_postprocessed(spec, basis.c, &quad, Some(basis))?;
    solve_coefficients(&project_data(&data, basis, &quad, cutoff)?, basis)
}

/// Resolved configuration of one reconstruction.
#[derive(Debug, Clone)]
pub struct Plan {
    pub epsilon: f64,
    pub cutoff: CutoffSet,
    /// `None` when the cutoff set is empty.
    pub quadrature: Option<DiskQuadrature>,
}

impl Plan {
    pub fn t(&self) -> usize {
        self.quadrature.as_ref().map_or(0, |q| q.t())
    }

    pub fn m(&self) -> usize {
        self.quadrature.as_ref().map_or(0, |q| q.m())
    }
}

/// Outcome of a pipeline run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub reconstruction: Reconstruction,
    /// Data-side coefficients.
    pub data_coefficients: CoefficientVector,
    pub plan: Plan,
    /// Largest node displacement from mock-node extraction.
    pub mock_max_distance: Option<f64>,
    pub warnings: Vec<String>,
}

/// Basis, cutoff, quadrature and data processing with a reusable basis.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub basis: Arc<PswfBasis>,
    pub rule: NodeRule,
}

impl Pipeline {
    pub fn new(c: f64, max_order: Option<usize>) -> Result<Self> {
        let basis = match max_order {
            Some(n) => PswfBasis::assemble(c, n)?,
            None => PswfBasis::with_default_order(c)?,
        };
        Ok(Self::from_basis(Arc::new(basis)))
    }

    pub fn from_basis(basis: Arc<PswfBasis>) -> Self {
        Self { basis, rule: NodeRule::default() }
    }

    pub fn plan(&self, mode: CutoffMode, delta: f64, overrides: &Overrides) -> Result<Plan> {
        let epsilon = match overrides.epsilon {
            Some(e) if e >= 0.0 && e.is_finite() => e,
            Some(e) => return Err(Error::Argument(format!("cutoff must be non-negative, got {e}"))),
            None => cutoff_rule(mode, delta, &self.basis)?,
        };
        let cutoff = self.basis.cutoff_set(epsilon)?;
        if cutoff.is_empty() {
            return Ok(Plan { epsilon, cutoff, quadrature: None });
        }
        let (t, m) = match (overrides.t, overrides.m) {
            (Some(t), Some(m)) => (t, m),
            (t_pin, m_pin) => {
                let (t, m) = choose_t_m(&self.basis, &cutoff, epsilon, &self.rule)?;
                (t_pin.unwrap_or(t), m_pin.unwrap_or(m))
            }
        };
        Ok(Plan { epsilon, cutoff, quadrature: Some(DiskQuadrature::new(t, m)?) })
    }

    /// Projects already post-processed data.
    pub fn reconstruct_data(&self, data: &PostProcessedData, plan: &Plan) -> Result<RunOutput> {
        check_bandwidth(&self.basis, data.c)?;
        let mut warnings = Vec::new();
        let u = match &plan.quadrature {
            Some(quad) => project_data(data, &self.basis, quad, &plan.cutoff)?,
            None => {
                warnings.push(format!(
                    "cutoff {:.6e} exceeds every prolate eigenvalue; the reconstruction is zero",
                    plan.epsilon
                ));
                CoefficientVector::zeros(data.c, CoefficientKind::Data, &plan.cutoff)
            }
        };
        let q = solve_coefficients(&u, &self.basis)?;
        Ok(RunOutput {
            reconstruction: Reconstruction::new(q, self.basis.clone(), plan.epsilon)?,
            data_coefficients: u,
            plan: plan.clone(),
            mock_max_distance: None,
            warnings,
        })
    }

    /// The full far-field pipeline.
    pub fn reconstruct(&self, f: &FarFieldMatrix, mode: CutoffMode, delta: f64, overrides: &Overrides) -> Result<RunOutput> {
        check_bandwidth(&self.basis, f.c())?;
        let plan = self.plan(mode, delta, overrides)?;
        let Some(quad) = &plan.quadrature else {
            let empty = PostProcessedData {
                c: f.c(),
                u: crate::quadrature::SampleMatrix::zeros(0, 0),
                nodes: crate::far_field::NodeKind::Mock,
            };
            return self.reconstruct_data(&empty, &plan);
        };
        let mock = mock_nodes(quad, f.n1, f.n2)?;
        let data = process_with_nodes(f, quad, &mock)?;
        let mut out = self.reconstruct_data(&data, &plan)?;
        out.mock_max_distance = Some(mock.max_distance());
        Ok(out)
    }
}

/// One-shot pipeline that assembles its own basis at `c = 2k`.
pub fn reconstruct(f: &FarFieldMatrix, mode: CutoffMode, delta: f64, overrides: &Overrides) -> Result<RunOutput> {
    Pipeline::new(f.c(), overrides.max_order)?.reconstruct(f, mode, delta, overrides)
}
