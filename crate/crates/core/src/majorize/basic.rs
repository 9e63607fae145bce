use rand::Rng;
use rand_distr::{Distribution, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel::{map_indexed, Exec};
use crate::poly::SparseSymPoly;
use crate::report::{CheckReport, Witness};

/// The three coefficient-level hypotheses: nonnegative coefficients,
/// `p(e) > 0`, and equal partials `sum_alpha a_alpha alpha_j = k` at `e`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasicLemmaReport {
    pub pass: bool,
    pub coefficients_nonneg: bool,
    /// Exponent of the most negative coefficient when one is negative.
    pub violating_alpha: Option<Vec<u32>>,
    /// `p(e) = sum of coefficients`.
    pub normalization: f64,
    /// `sum_alpha a_alpha alpha_j` for each `j`.
    pub central_ray: Vec<f64>,
    pub central_ray_equal: bool,
    /// Common partial of `p / p(e)`; the mean when they differ.
    pub k: f64,
    /// `N / n`.
    pub euler_k: f64,
}

pub fn check_basic_lemma(p: &SparseSymPoly) -> BasicLemmaReport {
    let (alpha, min) = p.min_coefficient();
    let coefficients_nonneg = min >= 0.0;
    let normalization = p.value_at_e();
    let central_ray = p.partials_at_e();
    let top = central_ray.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let lo = central_ray.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = central_ray
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let central_ray_equal = hi - lo <= 1e-12 * top.max(f64::MIN_POSITIVE) && lo > 0.0;
    let mean = central_ray.iter().sum::<f64>() / central_ray.len() as f64;
    let k = mean / normalization;
    BasicLemmaReport {
        pass: coefficients_nonneg && normalization > 0.0 && central_ray_equal,
        coefficients_nonneg,
        violating_alpha: (!coefficients_nonneg).then_some(alpha),
        normalization,
        central_ray,
        central_ray_equal,
        k,
        euler_k: p.degree() as f64 / p.nvars() as f64,
    }
}

/// `p(x)^{1/N} >= p(e)^{1/N} (x_1 ... x_n)^{1/n}` at points uniform in
/// `(0, 10]^n`. Gaps are relative to `max(1, rhs)`; pass needs `>= -1e-10`.
pub fn basic_lemma_harness(
    p: &SparseSymPoly,
    samples: usize,
    seed: u64,
    exec: Exec,
) -> CheckReport {
    let n = p.nvars();
    let big_n = p.degree() as f64;
    let scale = p.value_at_e().powf(1.0 / big_n);
    let dist = Uniform::new_inclusive(0.0f64, 10.0).expect("valid range");
    let rows = map_indexed(exec, samples, seed, |_, rng| {
        let x: Vec<f64> = (0..n)
            .map(|_| loop {
                let v = dist.sample(rng);
                if v > 0.0 {
                    break v;
                }
            })
            .collect();
        let lhs = p.eval_unchecked(&x).powf(1.0 / big_n);
        let geo = (x.iter().map(|v| v.ln()).sum::<f64>() / n as f64).exp();
        let rhs = scale * geo;
        ((lhs - rhs) / rhs.max(1.0), x)
    });
    let mut report = CheckReport::new(samples, seed);
    for (gap, x) in &rows {
        report.observe(*gap, || Witness::Vector(x.clone()));
    }
    report.finish(1e-10)
}

/// Random polynomial satisfying the hypotheses: `terms` monomials with
/// uniform `(0, 1]` coefficients, averaged over the cyclic shifts of the
/// variables (which equalizes the partials at `e`), then normalized.
pub fn random_crh_polynomial<R: Rng + ?Sized>(
    n: usize,
    degree: u32,
    terms: usize,
    rng: &mut R,
) -> Result<SparseSymPoly> {
    if n == 0 || degree == 0 || terms == 0 {
        return Err(Error::precondition("need n, degree and term count >= 1"));
    }
    let mut out = Vec::with_capacity(terms * n);
    for _ in 0..terms {
        let mut alpha = vec![0u32; n];
        for _ in 0..degree {
            alpha[rng.random_range(0..n)] += 1;
        }
        let c: f64 = 1.0 - rng.random::<f64>();
        for shift in 0..n {
            let rotated: Vec<u32> = (0..n).map(|j| alpha[(j + shift) % n]).collect();
            out.push((rotated, c / n as f64));
        }
    }
    SparseSymPoly::new(n, out)?.normalized()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parallel::sample_rng;
    use approx::assert_relative_eq;

    #[test]
    fn mean_passes() {
        let r = check_basic_lemma(&SparseSymPoly::mean(2).unwrap());
        assert!(r.pass);
        assert_relative_eq!(r.k, 0.5, epsilon = 1e-15);
        assert_relative_eq!(r.k, r.euler_k, epsilon = 1e-12);
    }

    #[test]
    fn counterexample_fails_central_ray() {
        let r = check_basic_lemma(&SparseSymPoly::monomial(vec![2, 1], 1.0).unwrap());
        assert!(!r.pass && r.coefficients_nonneg && !r.central_ray_equal);
        assert_eq!(r.central_ray, vec![2.0, 1.0]);
    }

    #[test]
    fn sigma2_over_three() {
        let p = SparseSymPoly::elementary(3, 2).unwrap().scale(1.0 / 3.0);
        let r = check_basic_lemma(&p);
        assert!(r.pass);
        assert_relative_eq!(r.normalization, 1.0, epsilon = 1e-15);
        assert_relative_eq!(r.k, 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn negative_coefficient_reported() {
        let p = SparseSymPoly::new(
            2,
            [(vec![2, 0], 1.0), (vec![1, 1], -0.5), (vec![0, 2], 1.0)],
        )
        .unwrap();
        let r = check_basic_lemma(&p);
        assert!(!r.pass);
        assert_eq!(r.violating_alpha, Some(vec![1, 1]));
    }

    #[test]
    fn random_polynomials_satisfy_hypotheses() {
        let mut rng = sample_rng(11, 0);
        for _ in 0..10 {
            let p = random_crh_polynomial(4, 3, 3, &mut rng).unwrap();
            let r = check_basic_lemma(&p);
            assert!(r.pass, "{r:?}");
            assert!(basic_lemma_harness(&p, 200, 3, Exec::Sequential).pass);
        }
    }
}
