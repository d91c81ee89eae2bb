use std::sync::{Arc, OnceLock};

use lowrank_scatter::contrast::{ContrastSpec, Rectangle};
use lowrank_scatter::far_field::{add_noise, direction, exact_postprocessed, mock_nodes, synthesize_born, PostProcessedData};
use lowrank_scatter::pswf::{ProlateIndex, PswfBasis};
use lowrank_scatter::quadrature::{choose_t_m, DiskQuadrature, NodeRule, SampleMatrix};
use lowrank_scatter::reconstruction::{project_data, solve_coefficients, CoefficientKind, CoefficientVector, Pipeline};
use lowrank_scatter::specfun::{gauss_legendre_rule, jacobi_eval_all};
use num_complex::Complex64;
use proptest::prelude::*;

fn basis() -> Arc<PswfBasis> {
    static BASIS: OnceLock<Arc<PswfBasis>> = OnceLock::new();
    BASIS.get_or_init(|| Arc::new(PswfBasis::with_default_order(12.0).unwrap())).clone()
}

fn rectangle() -> impl Strategy<Value = Rectangle> {
    (-0.6..0.5f64, 0.05..0.2f64, -0.6..0.5f64, 0.05..0.2f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(
        |(a1, w1, b1, w2, re, im)| Rectangle {
            a1,
            a2: a1 + w1,
            b1,
            b2: b1 + w2,
            amplitude: Complex64::new(re, im),
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn jacobi_family_is_weighted_orthonormal(m in 0usize..30, j in 0usize..20, k in 0usize..20) {
        let rule = gauss_legendre_rule(80).unwrap();
        let s: f64 = rule.nodes.iter().zip(&rule.weights).map(|(&t, &w)| {
            let p = jacobi_eval_all(m, 20, t);
            w * (1.0 + t).powi(m as i32) * p[j] * p[k]
        }).sum();
        let want = if j == k { 2f64.powi(m as i32 + 2) } else { 0.0 };
        prop_assert!((s - want).abs() < 1e-9 * 2f64.powi(m as i32 + 2));
    }

    #[test]
    fn cutoff_sets_are_nested(a in 1e-6..1.0f64, b in 1e-6..1.0f64) {
        let basis = basis();
        let l00 = basis.lambda(0, 0).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let big = basis.cutoff_set(lo * l00).unwrap();
        let small = basis.cutoff_set(hi * l00).unwrap();
        prop_assert!(small.indices.iter().all(|i| big.contains(i)));
        for idx in &big.indices {
            prop_assert!(basis.lambda(idx.m, idx.n).unwrap() > lo * l00);
        }
    }

    #[test]
    fn node_counts_grow_as_the_cutoff_shrinks(a in 1e-4..0.9f64, b in 1e-4..0.9f64) {
        let basis = basis();
        let l00 = basis.lambda(0, 0).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let rule = NodeRule::default();
        let big = basis.cutoff_set(lo * l00).unwrap();
        let small = basis.cutoff_set(hi * l00).unwrap();
        let (t1, m1) = choose_t_m(&basis, &big, lo * l00, &rule).unwrap();
        let (t2, m2) = choose_t_m(&basis, &small, hi * l00, &rule).unwrap();
        prop_assert!(t1 >= t2 && m1 >= m2);
    }

    #[test]
    fn born_synthesis_is_linear(rects in proptest::collection::vec(rectangle(), 1..4), k in 2.0..20.0f64) {
        let union = ContrastSpec::RectangleUnion { rectangles: rects.clone() };
        let whole = synthesize_born(&union, k, 9, 7, None).unwrap();
        let mut sum = vec![Complex64::new(0.0, 0.0); 63];
        for r in rects {
            let part = synthesize_born(&ContrastSpec::RectangleUnion { rectangles: vec![r] }, k, 9, 7, None).unwrap();
            for (s, v) in sum.iter_mut().zip(&part.values) {
                *s += v;
            }
        }
        for (a, b) in whole.values.iter().zip(&sum) {
            prop_assert!((a - b).norm() <= 1e-12 * k * k * (1.0 + b.norm()));
        }
    }

    #[test]
    fn reciprocity_on_antipodal_grids(rects in proptest::collection::vec(rectangle(), 1..3), half in 2usize..10, k in 2.0..20.0f64) {
        let n = 2 * half;
        let f = synthesize_born(&ContrastSpec::RectangleUnion { rectangles: rects }, k, n, n, None).unwrap();
        for m in 0..n {
            for l in 0..n {
                let a = f.get(m, l);
                let b = f.get((l + half) % n, (m + half) % n);
                prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
            }
        }
    }

    #[test]
    fn noise_is_bounded_and_deterministic(delta in 0.0..0.9f64, seed in any::<u64>()) {
        let spec = ContrastSpec::Disk { radius: 0.4, amplitude: 1.0 };
        let f = synthesize_born(&spec, 7.0, 6, 5, None).unwrap();
        let a = add_noise(&f, delta, seed).unwrap();
        prop_assert_eq!(&a, &add_noise(&f, delta, seed).unwrap());
        for (x, y) in a.values.iter().zip(&f.values) {
            prop_assert!((x - y).norm() <= delta * y.norm() * (1.0 + 1e-15));
        }
    }

    #[test]
    fn mock_nodes_follow_the_declared_tie_break(t in 1usize..6, m in 1usize..9, n1 in 1usize..12, n2 in 1usize..12) {
        let quad = DiskQuadrature::new(t, m).unwrap();
        let mock = mock_nodes(&quad, n1, n2).unwrap();
        for j in 0..t {
            for i in 0..m {
                let p = quad.node(j, i);
                // lexicographic minimum of (distance², ℓ, j)
                let mut best = (f64::INFINITY, 0, 0);
                for l in 0..n2 {
                    for o in 0..n1 {
                        let (x, th) = (direction(o, n1), direction(l, n2));
                        let q = [0.5 * (th[0] - x[0]), 0.5 * (th[1] - x[1])];
                        let d = (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2);
                        if (d, l, o) < best {
                            best = (d, l, o);
                        }
                    }
                }
                prop_assert_eq!(mock.pairs[j * m + i], (best.2, best.1));
            }
        }
    }

    #[test]
    fn projection_is_linear(re in -3.0..3.0f64, im in -3.0..3.0f64, seed in 0u64..1000) {
        let basis = basis();
        let cutoff = basis.cutoff_set(0.1 * basis.lambda(0, 0).unwrap()).unwrap();
        let (t, m) = choose_t_m(&basis, &cutoff, cutoff.epsilon, &NodeRule::default()).unwrap();
        let quad = DiskQuadrature::new(t, m).unwrap();
        let spec = ContrastSpec::Disk { radius: 0.3 + (seed % 7) as f64 * 0.1, amplitude: 1.0 };
        let data = exact_postprocessed(&spec, basis.c, &quad, None).unwrap();
        let s = Complex64::new(re, im);
        let scaled = PostProcessedData { u: data.u.scale(s), ..data.clone() };
        let a = project_data(&data, &basis, &quad, &cutoff).unwrap();
        let b = project_data(&scaled, &basis, &quad, &cutoff).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((x * s - y).norm() <= 1e-12 * (1.0 + y.norm()));
        }
    }

    #[test]
    fn truncation_keeps_included_coefficients(a in 0.05..0.9f64, b in 0.05..0.9f64) {
        let basis = basis();
        let l00 = basis.lambda(0, 0).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let big = basis.cutoff_set(lo * l00).unwrap();
        let small = basis.cutoff_set(hi * l00).unwrap();
        let (t, m) = choose_t_m(&basis, &big, lo * l00, &NodeRule::default()).unwrap();
        let quad = DiskQuadrature::new(t, m).unwrap();
        let spec = ContrastSpec::CenteredRectangle { half_widths: [0.4, 0.3], amplitude: 1.0 };
        let data = exact_postprocessed(&spec, basis.c, &quad, None).unwrap();
        let qa = solve_coefficients(&project_data(&data, &basis, &quad, &big).unwrap(), &basis).unwrap();
        let qb = solve_coefficients(&project_data(&data, &basis, &quad, &small).unwrap(), &basis).unwrap();
        for (idx, v) in qb.indices.iter().zip(&qb.values) {
            prop_assert_eq!(qa.get(idx).unwrap(), *v);
        }
    }

    #[test]
    fn perturbations_obey_the_lipschitz_bound(seed in any::<u64>(), delta in 1e-4..1.0f64, eta_factor in 0.05..0.9f64) {
        use rand::{Rng, SeedableRng};
        let pipeline = Pipeline::from_basis(basis());
        let basis = &pipeline.basis;
        let eta = eta_factor * basis.lambda(0, 0).unwrap();
        let cutoff = basis.cutoff_set(eta).unwrap();
        let (t, m) = choose_t_m(basis, &cutoff, eta, &NodeRule::default()).unwrap();
        let quad = DiskQuadrature::new(t, m).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut noise = SampleMatrix::zeros(t, m);
        for v in noise.data.iter_mut() {
            *v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let norm = quad.l2_norm(&noise).unwrap();
        let noise = noise.scale(Complex64::new(delta / norm, 0.0));
        // zero truth, so the reconstruction is the error itself
        let data = PostProcessedData { c: basis.c, u: noise, nodes: lowrank_scatter::far_field::NodeKind::Exact };
        let q = solve_coefficients(&project_data(&data, basis, &quad, &cutoff).unwrap(), basis).unwrap();
        prop_assert!(q.l2_norm() <= delta / eta);
    }

    #[test]
    fn contrast_text_form_round_trips(rects in proptest::collection::vec(rectangle(), 1..4), r in 0.01..1.0f64, mode in -20i32..20) {
        for spec in [
            ContrastSpec::RectangleUnion { rectangles: rects.clone() },
            ContrastSpec::Disk { radius: r, amplitude: -1.5 },
            ContrastSpec::Oscillatory { mode },
            ContrastSpec::PswfMode { index: ProlateIndex::new((mode.unsigned_abs() as usize) % 5 + 1, 2, 2).unwrap() },
        ] {
            let parsed: ContrastSpec = spec.to_string().parse().unwrap();
            prop_assert_eq!(parsed, spec);
        }
    }
}

#[test]
fn zero_coefficients_from_zero_data() {
    let basis = basis();
    let cutoff = basis.cutoff_set(0.1 * basis.lambda(0, 0).unwrap()).unwrap();
    let quad = DiskQuadrature::new(20, 31).unwrap();
    let data = PostProcessedData {
        c: basis.c,
        u: SampleMatrix::zeros(20, 31),
        nodes: lowrank_scatter::far_field::NodeKind::Exact,
    };
    let q = solve_coefficients(&project_data(&data, &basis, &quad, &cutoff).unwrap(), &basis).unwrap();
    assert_eq!(q, CoefficientVector { kind: CoefficientKind::Contrast, ..CoefficientVector::zeros(basis.c, CoefficientKind::Contrast, &cutoff) });
}
