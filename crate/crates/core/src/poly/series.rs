use crate::error::{Error, Result};

/// Power series `c_0 + c_1 t + ... + c_m t^m` truncated at order `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<f64>,
}

impl TruncatedSeries {
    /// Order is `coeffs.len() - 1`; an empty list becomes the zero series of
    /// order 0.
    pub fn new(coeffs: Vec<f64>) -> Self {
        if coeffs.is_empty() {
            return TruncatedSeries { coeffs: vec![0.0] };
        }
        TruncatedSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn mul(&self, other: &Self) -> Self {
        let m = self.order().min(other.order());
        let mut out = vec![0.0; m + 1];
        for (i, &a) in self.coeffs.iter().enumerate().take(m + 1) {
            for (j, &b) in other.coeffs.iter().enumerate().take(m + 1 - i) {
                out[i + j] += a * b;
            }
        }
        TruncatedSeries { coeffs: out }
    }

    pub fn pow(&self, q: usize) -> Self {
        let mut acc = TruncatedSeries {
            coeffs: vec![0.0; self.order() + 1],
        };
        acc.coeffs[0] = 1.0;
        for _ in 0..q {
            acc = acc.mul(self);
        }
        acc
    }
}

/// Formal `s^(1/q)` for `s` with constant term 1.
///
/// Uses the power recurrence `k r_k = sum_{j=1..k} ((a + 1) j - k) s_j r_{k-j}`
/// with `a = 1/q`.
pub fn series_qth_root(s: &TruncatedSeries, q: usize) -> Result<TruncatedSeries> {
    let c = s.coeffs();
    if (c[0] - 1.0).abs() > 1e-12 {
        return Err(Error::SeriesConstant(c[0]));
    }
    if q == 0 {
        return Err(Error::OutOfRange {
            what: "q",
            value: "0".into(),
            allowed: ">= 1".into(),
        });
    }
    let a = 1.0 / q as f64;
    let m = s.order();
    let mut r = vec![0.0; m + 1];
    r[0] = 1.0;
    for k in 1..=m {
        let mut acc = 0.0;
        for j in 1..=k {
            acc += ((a + 1.0) * j as f64 - k as f64) * c[j] * r[k - j];
        }
        r[k] = acc / k as f64;
    }
    Ok(TruncatedSeries { coeffs: r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fourth_root_of_binomial() {
        let s = TruncatedSeries::new(vec![1.0, 4.0, 6.0, 4.0, 1.0]);
        let r = series_qth_root(&s, 4).unwrap();
        for (got, want) in r.coeffs().iter().zip([1.0, 1.0, 0.0, 0.0, 0.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
        }
        let r = series_qth_root(&s, 2).unwrap();
        for (got, want) in r.coeffs().iter().zip([1.0, 2.0, 1.0, 0.0, 0.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
        }
    }

    #[test]
    fn block_scalar_root() {
        let (a, b) = (2.0, -0.5);
        let base = TruncatedSeries::new(vec![1.0, a + b, a * b, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let r = series_qth_root(&base.pow(4), 4).unwrap();
        for (got, want) in r.coeffs().iter().zip(base.coeffs()) {
            assert_abs_diff_eq!(*got, *want, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_bad_constant() {
        let s = TruncatedSeries::new(vec![2.0, 1.0]);
        assert!(matches!(
            series_qth_root(&s, 2),
            Err(Error::SeriesConstant(_))
        ));
    }
}
