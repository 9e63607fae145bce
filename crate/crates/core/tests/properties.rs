//! Seeded property tests. Each case draws a seed and builds its random
//! matrices from it, so failures shrink to a reproducible seed.

use gd_core::garding::{
    fd_step, garding_spectrum, gradient_matrix, i_eigenvalues, in_garding_cone, log_derivative,
    log_derivative_fd,
};
use gd_core::linalg::{
    char_series, det_field, eigenvalues_sym, matrix_from_json, matrix_to_json, Algebra,
    SymmetricMatrix,
};
use gd_core::majorize::{majorization_sides, random_crh_polynomial};
use gd_core::operators::{
    field_eigenvalues, spec_from_json, spec_to_json, Domain, OperatorSpec, Space,
};
use gd_core::parallel::sample_rng;
use gd_core::poly::{
    elementary_symmetric_all, interpolate_univariate, real_roots, series_qth_root, SparseSymPoly,
    TruncatedSeries, UnivariatePoly,
};
use gd_core::sampling::{random_spd, random_symmetric, random_unitary, ScaleRange};
use proptest::prelude::*;
use rand::Rng;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 48,
        ..ProptestConfig::default()
    }
}

fn spaces() -> impl Strategy<Value = Space> {
    prop_oneof![
        (1usize..=5).prop_map(Space::real),
        (1usize..=3).prop_map(Space::complex),
        (1usize..=2).prop_map(Space::quaternionic),
    ]
}

fn domain(s: Space) -> Domain {
    OperatorSpec::det(s).unwrap().domain()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// Built-in invariant operators on `s`.
fn builtins(s: Space) -> Vec<OperatorSpec> {
    let mut out: Vec<_> = (1..=s.n)
        .map(|k| OperatorSpec::sigma(s, k).unwrap())
        .collect();
    out.push(OperatorSpec::det(s).unwrap());
    if s.n >= 2 {
        out.push(OperatorSpec::pfold(s, 2).unwrap());
    }
    out
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn close_sorted(a: Vec<f64>, b: Vec<f64>, tol: f64) -> bool {
    let (a, b) = (sorted(a), sorted(b));
    a.len() == b.len()
        && a.iter()
            .zip(&b)
            .all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn trace_and_det_from_eigenvalues(seed in any::<u64>(), n in 1usize..=7) {
        let a = random_symmetric(Domain::Full(n), &mut sample_rng(seed, 0));
        let ev = eigenvalues_sym(&a).unwrap().values;
        let scale = a.frobenius_norm().max(1.0);
        prop_assert!((a.trace() - ev.iter().sum::<f64>()).abs() <= 1e-10 * scale);
        let prod: f64 = ev.iter().product();
        prop_assert!((a.det() - prod).abs() <= 1e-8 * prod.abs().max(1e-12 * scale.powi(n as i32)));
    }

    #[test]
    fn projection_idempotent_and_self_adjoint(seed in any::<u64>(), s in spaces()) {
        let d = domain(s);
        let mut rng = sample_rng(seed, 0);
        let full = Domain::Full(d.dim());
        let (a, b) = (random_symmetric(full, &mut rng), random_symmetric(full, &mut rng));
        let (pa, pb) = (d.project(&a).unwrap(), d.project(&b).unwrap());
        let ppa = d.project(&pa).unwrap();
        prop_assert!(ppa.sub(&pa).frobenius_norm() <= 1e-12 * a.frobenius_norm().max(1.0));
        let lhs = pa.matrix().frobenius_inner(b.matrix());
        let rhs = a.matrix().frobenius_inner(pb.matrix());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn field_det_powers(seed in any::<u64>(), s in spaces()) {
        let d = domain(s);
        let a = random_spd(d, ScaleRange::default(), &mut sample_rng(seed, 0));
        let m = s.algebra.multiplicity() as i32;
        let real = a.det();
        let field = det_field(&a).unwrap();
        prop_assert!(rel(real, field.powi(m)) <= 1e-8, "{real} vs {field}^{m}");
    }

    #[test]
    fn char_series_is_elementary_symmetric(seed in any::<u64>(), n in 1usize..=7) {
        let a = random_symmetric(Domain::Full(n), &mut sample_rng(seed, 0));
        let c = char_series(&a, n).unwrap();
        let e = elementary_symmetric_all(&eigenvalues_sym(&a).unwrap().values);
        let scale = a.frobenius_norm().max(1.0);
        for (k, (ck, ek)) in c.coeffs().iter().zip(&e).enumerate() {
            prop_assert!((ck - ek).abs() <= 1e-8 * scale.powi(k as i32), "k = {k}");
        }
    }

    #[test]
    fn matrix_json_round_trip(seed in any::<u64>(), s in spaces()) {
        let a = random_symmetric(domain(s), &mut sample_rng(seed, 0));
        let back = matrix_from_json(&matrix_to_json(&a), "m").unwrap();
        prop_assert_eq!(back.algebra(), a.algebra());
        prop_assert!(back.sub(&a).frobenius_norm() == 0.0);
    }

    #[test]
    fn real_roots_of_real_rooted_products(roots in prop::collection::vec(-5.0f64..5.0, 1..=8), lead in 0.5f64..3.0) {
        let q = UnivariatePoly::from_roots(lead, &roots);
        let (found, imag) = real_roots(&q).unwrap();
        let scale = roots.iter().fold(1.0f64, |m, r| m.max(r.abs()));
        prop_assert!(imag <= 1e-8 * scale || has_cluster(&roots));
        if !has_cluster(&roots) {
            prop_assert!(close_sorted(found, roots.clone(), 1e-7));
        }
    }

    #[test]
    fn series_root_inverts_power(tail in prop::collection::vec(-1.0f64..1.0, 1..=12), q in 2usize..=4) {
        let mut c = vec![1.0];
        c.extend(tail);
        let s = TruncatedSeries::new(c);
        let r = series_qth_root(&s.pow(q), q).unwrap();
        for (x, y) in r.coeffs().iter().zip(s.coeffs()) {
            prop_assert!((x - y).abs() <= 1e-10 * (1.0 + y.abs()));
        }
    }

    /// Dyadic coefficients keep every node value exact, so only the
    /// interpolation itself contributes error.
    #[test]
    fn interpolation_reproduces_polynomials(quarters in prop::collection::vec(-8i32..=8, 1..=13)) {
        let coeffs: Vec<f64> = quarters.iter().map(|&q| q as f64 / 4.0).collect();
        let p = UnivariatePoly::raw(coeffs.clone());
        let nodes: Vec<f64> = (0..coeffs.len()).map(|i| i as f64).collect();
        let values: Vec<f64> = nodes.iter().map(|&t| p.eval(t)).collect();
        let q = interpolate_univariate(&nodes, &values).unwrap();
        let big = coeffs.iter().fold(1.0f64, |m, c| m.max(c.abs()));
        for (k, c) in coeffs.iter().enumerate() {
            let got = q.coeffs().get(k).copied().unwrap_or(0.0);
            prop_assert!((got - c).abs() <= 1e-9 * big, "k = {k}: {got} vs {c}");
        }
    }

    #[test]
    fn euler_identity_at_e(seed in any::<u64>(), n in 2usize..=5, degree in 1u32..=5) {
        let p = random_crh_polynomial(n, degree, 3, &mut sample_rng(seed, 0)).unwrap();
        let sum: f64 = p.partials_at_e().iter().sum();
        prop_assert!(rel(sum, degree as f64 * p.value_at_e()) <= 1e-12);
    }

    #[test]
    fn elementary_symmetric_is_permutation_symmetric((n, k) in (1usize..=6).prop_flat_map(|n| (Just(n), 0..=n))) {
        prop_assert!(SparseSymPoly::elementary(n, k).unwrap().is_permutation_symmetric());
    }
}

fn has_cluster(roots: &[f64]) -> bool {
    let r = sorted(roots.to_vec());
    r.windows(2).any(|w| w[1] - w[0] < 1e-3)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn spectrum_factorizes(seed in any::<u64>(), s in spaces()) {
        let mut rng = sample_rng(seed, 0);
        for f in builtins(s) {
            let b = random_symmetric(f.domain(), &mut rng);
            let sp = garding_spectrum(&f, &f.identity(), &b).unwrap();
            prop_assert_eq!(sp.values.len(), f.degree());
            prop_assert!(sp.hyperbolicity_residual <= 1e-7, "{}: {}", f.describe(), sp.hyperbolicity_residual);
        }
    }

    #[test]
    fn spectrum_shift_covariance(seed in any::<u64>(), s in spaces(), t in -2.0f64..2.0) {
        let mut rng = sample_rng(seed, 0);
        for f in builtins(s) {
            let a = random_symmetric(f.domain(), &mut rng);
            let base = i_eigenvalues(&f, &a).unwrap().values;
            let shifted = i_eigenvalues(&f, &a.shift(t)).unwrap().values;
            // sigma_k eigenvalues shift by t; p-fold sums shift by t as well
            // since each I-eigenvalue is an average over the p-subset.
            let expect: Vec<f64> = base.iter().map(|x| x + t).collect();
            prop_assert!(close_sorted(shifted, expect, 1e-7), "{}", f.describe());
        }
    }

    #[test]
    fn product_spectrum_is_union(seed in any::<u64>(), (n, k) in (2usize..=4).prop_flat_map(|n| (Just(n), 1..=n))) {
        let s = Space::real(n);
        let f = OperatorSpec::sigma(s, k).unwrap();
        let g = OperatorSpec::det(s).unwrap();
        let fg = OperatorSpec::product(vec![f.clone(), g.clone()]).unwrap();
        prop_assert_eq!(fg.degree(), f.degree() + g.degree());
        let b = random_symmetric(f.domain(), &mut sample_rng(seed, 0));
        let id = f.identity();
        let mut union = garding_spectrum(&f, &id, &b).unwrap().values;
        union.extend(garding_spectrum(&g, &id, &b).unwrap().values);
        prop_assert!(close_sorted(garding_spectrum(&fg, &id, &b).unwrap().values, union, 1e-7));
    }

    #[test]
    fn unitary_conjugation_invariance(seed in any::<u64>(), s in spaces()) {
        prop_assume!(s.algebra != Algebra::Real);
        let mut rng = sample_rng(seed, 0);
        for f in builtins(s) {
            let a = random_symmetric(f.domain(), &mut rng);
            let q = random_unitary(f.domain(), &mut rng);
            let b = a.conjugate(&q);
            let (fa, fb) = (f.evaluate(&a).unwrap(), f.evaluate(&b).unwrap());
            prop_assert!((fa - fb).abs() <= 1e-8 * fa.abs().max(a.frobenius_norm().powi(f.degree() as i32) * 1e-4));
        }
    }

    #[test]
    fn directional_derivative_matches_fd(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = sample_rng(seed, 0);
        let f = OperatorSpec::sigma(Space::real(n), n.min(3)).unwrap();
        let a = random_spd(f.domain(), ScaleRange::default(), &mut rng);
        let p = random_symmetric(f.domain(), &mut rng);
        let d = OperatorSpec::directional(f.clone(), p.clone(), 1).unwrap();
        prop_assert_eq!(d.degree(), f.degree() - 1);
        // Richardson-extrapolated centered difference, O(h^4).
        let central = |h: f64| {
            (f.evaluate(&a.axpy(1.0, &p.scale_by(h))).unwrap() - f.evaluate(&a.axpy(1.0, &p.scale_by(-h))).unwrap())
                / (2.0 * h)
        };
        let h = 1e-3 / p.frobenius_norm();
        let fd = (4.0 * central(h / 2.0) - central(h)) / 3.0;
        let exact = d.evaluate(&a).unwrap();
        prop_assert!((exact - fd).abs() <= 1e-6 * exact.abs().max(1.0), "{exact} vs {fd}");
    }

    #[test]
    fn compose_keeps_outer_degree((n, k, j) in (2usize..=4).prop_flat_map(|n| (Just(n), 1..=n)).prop_flat_map(|(n, k)| (Just(n), Just(k), 1..=k))) {
        let inner = OperatorSpec::sigma(Space::real(n), k).unwrap();
        let c = OperatorSpec::compose(SparseSymPoly::elementary(k, j).unwrap(), inner).unwrap();
        prop_assert_eq!(c.degree(), j);
    }

    #[test]
    fn spec_json_round_trip(seed in any::<u64>(), s in spaces()) {
        let mut rng = sample_rng(seed, 0);
        for f in builtins(s) {
            let back = spec_from_json(&spec_to_json(&f).to_string(), "spec", None).unwrap();
            prop_assert_eq!(back.degree(), f.degree());
            let a = random_symmetric(f.domain(), &mut rng);
            prop_assert_eq!(back.evaluate(&a).unwrap(), f.evaluate(&a).unwrap());
        }
    }

    #[test]
    fn positive_definite_is_in_cone(seed in any::<u64>(), s in spaces()) {
        let mut rng = sample_rng(seed, 0);
        for f in builtins(s) {
            let a = random_spd(f.domain(), ScaleRange::default(), &mut rng);
            prop_assert!(in_garding_cone(&f, &a, 1e-9).unwrap(), "{}", f.describe());
        }
    }

    #[test]
    fn monotone_along_positive_directions(seed in any::<u64>(), s in spaces()) {
        let mut rng = sample_rng(seed, 0);
        for f in builtins(s) {
            let a = random_spd(f.domain(), ScaleRange::default(), &mut rng);
            let p = random_spd(f.domain(), ScaleRange { lo: 0.01, hi: 1.0 }, &mut rng);
            prop_assert!(f.evaluate(&a.add(&p)).unwrap() > f.evaluate(&a).unwrap());
        }
    }

    #[test]
    fn log_derivatives_match_fd(seed in any::<u64>(), s in spaces(), k in 1usize..=4) {
        let mut rng = sample_rng(seed, 0);
        let f = OperatorSpec::sigma(s, s.n.min(2)).unwrap();
        let a = random_spd(f.domain(), ScaleRange::default(), &mut rng);
        let b = random_symmetric(f.domain(), &mut rng);
        let sp = i_eigenvalues(&f, &a).unwrap();
        let exact = log_derivative(&f, &a, &b, k).unwrap();
        let sb = garding_spectrum(&f, &a, &b).unwrap();
        let fd = log_derivative_fd(&f, &a, &b, k, fd_step(&sb));
        let floor: f64 = (1..k).map(|j| j as f64).product::<f64>() * sb.values.iter().map(|l| l.abs().powi(k as i32)).sum::<f64>();
        prop_assert!(sp.min() > 0.0);
        prop_assert!((exact - fd).abs() <= 1e-4 * exact.abs().max(floor).max(1e-12), "{exact} vs {fd}");
    }

    #[test]
    fn gradient_positive_definite_on_spd(seed in any::<u64>(), s in spaces()) {
        let mut rng = sample_rng(seed, 0);
        for f in builtins(s) {
            let a = random_spd(f.domain(), ScaleRange { lo: 0.5, hi: 2.0 }, &mut rng);
            let g = gradient_matrix(&f, &a).unwrap();
            let ev = eigenvalues_sym(&g).unwrap().values;
            prop_assert!(ev[0] > 0.0, "{}: {:?}", f.describe(), ev);
        }
    }

    #[test]
    fn majorization_on_spd(seed in any::<u64>(), s in spaces()) {
        let mut rng = sample_rng(seed, 0);
        for f in builtins(s) {
            let a = random_spd(f.domain(), ScaleRange::default(), &mut rng);
            let f1 = f.evaluate(&f.identity()).unwrap().powf(1.0 / f.degree() as f64);
            let (lhs, det_root) = majorization_sides(&f, &a).unwrap();
            prop_assert!(lhs - f1 * det_root >= -1e-9 * lhs.max(1.0), "{}: {lhs} < {f1} * {det_root}", f.describe());
        }
    }

    #[test]
    fn root_concave_in_cone(seed in any::<u64>(), s in spaces(), tau in 0.05f64..0.95) {
        let mut rng = sample_rng(seed, 0);
        for f in builtins(s) {
            let big_n = f.degree() as f64;
            let a = random_spd(f.domain(), ScaleRange::default(), &mut rng);
            let b = random_spd(f.domain(), ScaleRange::default(), &mut rng);
            let root = |m: &SymmetricMatrix| f.evaluate(m).unwrap().powf(1.0 / big_n);
            let mid = a.scale_by(tau).add(&b.scale_by(1.0 - tau));
            let lhs = root(&mid);
            let rhs = tau * root(&a) + (1.0 - tau) * root(&b);
            prop_assert!(lhs >= rhs - 1e-9 * rhs.max(1.0), "{}", f.describe());
        }
    }

    #[test]
    fn field_eigenvalue_count(seed in any::<u64>(), s in spaces()) {
        let d = domain(s);
        let a = random_symmetric(d, &mut sample_rng(seed, 0));
        let ev = field_eigenvalues(&a, d).unwrap();
        prop_assert_eq!(ev.len(), s.n);
        prop_assert!((ev.iter().sum::<f64>() * s.algebra.multiplicity() as f64 - a.trace()).abs() <= 1e-9 * a.frobenius_norm().max(1.0));
    }

    #[test]
    fn crh_polynomials_satisfy_pointwise_inequality(seed in any::<u64>(), n in 2usize..=5, degree in 1u32..=5) {
        let mut rng = sample_rng(seed, 0);
        let p = random_crh_polynomial(n, degree, 3, &mut rng).unwrap();
        let pe = p.value_at_e();
        for _ in 0..20 {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(1e-3..10.0)).collect();
            let lhs = p.eval(&x).unwrap().powf(1.0 / degree as f64);
            let geo = x.iter().product::<f64>().powf(1.0 / n as f64);
            let rhs = pe.powf(1.0 / degree as f64) * geo;
            prop_assert!(lhs - rhs >= -1e-10 * rhs.max(1.0));
        }
    }
}
