use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Homogeneous polynomial `p(x) = sum_alpha a_alpha x^alpha` in `nvars`
/// variables.
///
/// Terms are keyed by multi-index; duplicates are merged on construction and
/// zero coefficients are dropped. Every stored `alpha` has `|alpha| = degree`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSymPoly {
    nvars: usize,
    degree: u32,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl SparseSymPoly {
    pub fn new(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, f64)>) -> Result<Self> {
        let mut map: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        let mut degree = None;
        for (alpha, coeff) in terms {
            if alpha.len() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: alpha.len(),
                });
            }
            let d: u32 = alpha.iter().sum();
            match degree {
                None => degree = Some(d),
                Some(expected) if expected != d => {
                    return Err(Error::NotHomogeneous {
                        alpha,
                        found: d,
                        expected,
                    });
                }
                _ => {}
            }
            *map.entry(alpha).or_insert(0.0) += coeff;
        }
        map.retain(|_, c| *c != 0.0);
        let degree = match degree {
            Some(d) if !map.is_empty() => d,
            _ => return Err(Error::ZeroPolynomial),
        };
        Ok(SparseSymPoly {
            nvars,
            degree,
            terms: map,
        })
    }

    pub fn monomial(alpha: Vec<u32>, coeff: f64) -> Result<Self> {
        let n = alpha.len();
        Self::new(n, [(alpha, coeff)])
    }

    /// `sigma_k` in `n` variables.
    pub fn elementary(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::OutOfRange {
                what: "k",
                value: k.to_string(),
                allowed: format!("0..={n}"),
            });
        }
        let mut terms = Vec::new();
        let mut alpha = vec![0u32; n];
        fn rec(start: usize, left: usize, alpha: &mut Vec<u32>, out: &mut Vec<(Vec<u32>, f64)>) {
            if left == 0 {
                out.push((alpha.clone(), 1.0));
                return;
            }
            for i in start..alpha.len() {
                if alpha.len() - i < left {
                    break;
                }
                alpha[i] = 1;
                rec(i + 1, left - 1, alpha, out);
                alpha[i] = 0;
            }
        }
        rec(0, k, &mut alpha, &mut terms);
        Self::new(n, terms)
    }

    /// Power mean `P_j(x) = (x_1^j + ... + x_j^j) / j` in `j` variables.
    pub fn power_mean(j: usize) -> Result<Self> {
        if j == 0 {
            return Err(Error::ZeroPolynomial);
        }
        let terms = (0..j).map(|i| {
            let mut alpha = vec![0u32; j];
            alpha[i] = j as u32;
            (alpha, 1.0 / j as f64)
        });
        Self::new(j, terms)
    }

    /// Arithmetic mean `(x_1 + ... + x_n) / n`.
    pub fn mean(n: usize) -> Result<Self> {
        Ok(Self::elementary(n, 1)?.scale(1.0 / n as f64))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.terms.iter().map(|(a, &c)| (a.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: x.len(),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(alpha, c)| {
                alpha.iter().zip(x).fold(
                    *c,
                    |acc, (&e, &xi)| if e == 0 { acc } else { acc * xi.powi(e as i32) },
                )
            })
            .sum()
    }

    /// `p(e) = sum of coefficients`.
    pub fn value_at_e(&self) -> f64 {
        self.terms.values().sum()
    }

    /// `dp/dx_j (e) = sum_alpha a_alpha alpha_j`.
    pub fn partials_at_e(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.nvars];
        for (alpha, c) in &self.terms {
            for (o, &a) in out.iter_mut().zip(alpha) {
                *o += c * a as f64;
            }
        }
        out
    }

    /// Invariance under every adjacent transposition, to `1e-12` of the
    /// largest coefficient.
    pub fn is_permutation_symmetric(&self) -> bool {
        let tol = 1e-12 * self.terms.values().fold(0.0f64, |m, c| m.max(c.abs()));
        for i in 0..self.nvars.saturating_sub(1) {
            for (alpha, c) in &self.terms {
                let mut swapped = alpha.clone();
                swapped.swap(i, i + 1);
                let other = self.terms.get(&swapped).copied().unwrap_or(0.0);
                if (other - c).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn min_coefficient(&self) -> (Vec<u32>, f64) {
        self.terms
            .iter()
            .map(|(a, &c)| (a.clone(), c))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("polynomial has at least one term")
    }

    pub fn scale(&self, s: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(a, c)| (a.clone(), c * s))
            .filter(|(_, c)| *c != 0.0)
            .collect();
        SparseSymPoly {
            nvars: self.nvars,
            degree: self.degree,
            terms,
        }
    }

    /// Rescaled so that `p(e) = 1`.
    pub fn normalized(&self) -> Result<Self> {
        let v = self.value_at_e();
        if v == 0.0 {
            return Err(Error::precondition("p(e) = 0 cannot be normalized"));
        }
        Ok(self.scale(1.0 / v))
    }

    /// Product in the same variables.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let alpha = a.iter().zip(b).map(|(x, y)| x + y).collect();
                terms.push((alpha, ca * cb));
            }
        }
        Self::new(self.nvars, terms)
    }

    /// `q(x_1..x_n) r(x_{n+1}..x_{n+m})`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut terms = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let alpha: Vec<u32> = a.iter().chain(b).copied().collect();
                terms.insert(alpha, ca * cb);
            }
        }
        SparseSymPoly {
            nvars: self.nvars + other.nvars,
            degree: self.degree + other.degree,
            terms,
        }
    }

    /// `wq q(x_1..x_n) + wr r(x_{n+1}..x_{n+m})`; degrees must agree.
    pub fn disjoint_sum(&self, wq: f64, other: &Self, wr: f64) -> Result<Self> {
        if self.degree != other.degree {
            return Err(Error::precondition(format!(
                "convex combination needs equal degrees, found {} and {}",
                self.degree, other.degree
            )));
        }
        let pad_q = vec![0u32; other.nvars];
        let pad_r = vec![0u32; self.nvars];
        let terms = self
            .terms
            .iter()
            .map(|(a, c)| (a.iter().chain(&pad_q).copied().collect(), wq * c))
            .chain(
                other
                    .terms
                    .iter()
                    .map(|(b, c)| (pad_r.iter().chain(b).copied().collect(), wr * c)),
            );
        Self::new(self.nvars + other.nvars, terms)
    }

    /// Dense expansion of `prod_j (sum_{i in J_j} x_i)` for index groups `J_j`.
    pub fn product_of_linear_forms(nvars: usize, groups: &[Vec<usize>]) -> Result<Self> {
        let mut acc = Self::new(nvars, [(vec![0u32; nvars], 1.0)])?;
        for g in groups {
            let lin = Self::new(
                nvars,
                g.iter().map(|&i| {
                    let mut a = vec![0u32; nvars];
                    a[i] = 1;
                    (a, 1.0)
                }),
            )?;
            acc = acc.mul(&lin)?;
        }
        Ok(acc)
    }
}

/// `sigma_k(values)` by the standard dynamic program.
pub fn elementary_symmetric(values: &[f64], k: usize) -> Result<f64> {
    if k > values.len() {
        return Err(Error::OutOfRange {
            what: "k",
            value: k.to_string(),
            allowed: format!("0..={}", values.len()),
        });
    }
    Ok(elementary_symmetric_all(values)[k])
}

/// `[sigma_0, ..., sigma_n](values)`.
pub fn elementary_symmetric_all(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (i, &v) in values.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] += v * e[k - 1];
        }
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma2_at_123() {
        let p = SparseSymPoly::elementary(3, 2).unwrap();
        assert_eq!(p.eval(&[1.0, 2.0, 3.0]).unwrap(), 11.0);
        assert_eq!(p.partials_at_e(), vec![2.0, 2.0, 2.0]);
        assert!(p.is_permutation_symmetric());
    }

    #[test]
    fn monomial_of_three() {
        let p = SparseSymPoly::monomial(vec![2, 1], 1.0).unwrap();
        assert_eq!(p.eval(&[2.0, 3.0]).unwrap(), 12.0);
        assert_eq!(p.partials_at_e(), vec![2.0, 1.0]);
        assert!(!p.is_permutation_symmetric());
    }

    #[test]
    fn duplicates_merge() {
        let p = SparseSymPoly::new(2, [(vec![1, 1], 0.5), (vec![1, 1], 0.5)]).unwrap();
        assert_eq!(p.num_terms(), 1);
        assert!(p.is_permutation_symmetric());
        assert_eq!(p.value_at_e(), 1.0);
    }

    #[test]
    fn inhomogeneous_rejected() {
        let err = SparseSymPoly::new(2, [(vec![1, 1], 1.0), (vec![1, 0], 1.0)]).unwrap_err();
        assert!(matches!(
            err,
            Error::NotHomogeneous {
                found: 1,
                expected: 2,
                ..
            }
        ));
    }

    #[test]
    fn mean_partials() {
        let p = SparseSymPoly::mean(2).unwrap();
        assert_eq!(p.partials_at_e(), vec![0.5, 0.5]);
    }

    #[test]
    fn elementary_values() {
        assert_eq!(elementary_symmetric(&[1.0, 2.0, 3.0], 2).unwrap(), 11.0);
        assert_eq!(elementary_symmetric(&[7.0, -2.0], 0).unwrap(), 1.0);
        assert_eq!(elementary_symmetric(&[1.0; 4], 2).unwrap(), 6.0);
        assert!(elementary_symmetric(&[1.0], 2).is_err());
    }

    #[test]
    fn disjoint_sum_of_means() {
        let q = SparseSymPoly::mean(2).unwrap();
        let p = q.disjoint_sum(0.5, &q, 0.5).unwrap();
        assert_eq!(p, SparseSymPoly::mean(4).unwrap());
    }
}
