use crate::error::{Error, Result};

/// Real polynomial with ascending coefficients.
///
/// [`UnivariatePoly::new`] trims leading coefficients below `1e-12` of the
/// largest magnitude, so the last stored coefficient is the leading one.
#[derive(Clone, Debug, PartialEq)]
pub struct UnivariatePoly {
    coeffs: Vec<f64>,
}

impl UnivariatePoly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self::trimmed(coeffs, 1e-12)
    }

    /// Drops leading coefficients with `|c| <= rel * max|c|`.
    pub fn trimmed(mut coeffs: Vec<f64>, rel: f64) -> Self {
        let max = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        while let Some(&last) = coeffs.last() {
            if last.abs() <= rel * max {
                coeffs.pop();
            } else {
                break;
            }
        }
        UnivariatePoly { coeffs }
    }

    /// Stores `coeffs` verbatim.
    pub fn raw(coeffs: Vec<f64>) -> Self {
        UnivariatePoly { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Degree of the stored coefficient list; 0 for constants and zero.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| k as f64 * c)
            .collect();
        UnivariatePoly { coeffs }
    }

    /// `lead * prod (t - r_j)`.
    pub fn from_roots(lead: f64, roots: &[f64]) -> Self {
        let mut c = vec![lead];
        for &r in roots {
            let mut next = vec![0.0; c.len() + 1];
            for (k, &ck) in c.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= r * ck;
            }
            c = next;
        }
        UnivariatePoly { coeffs: c }
    }

    /// `1 + max |c_k / c_lead|`, a bound on every root's modulus.
    pub fn cauchy_bound(&self) -> f64 {
        let lead = self.leading().abs();
        let d = self.degree();
        1.0 + self.coeffs[..d]
            .iter()
            .fold(0.0f64, |m, c| m.max(c.abs() / lead))
    }
}

/// Newton divided-difference interpolation, converted to monomial form.
pub fn interpolate_univariate(nodes: &[f64], values: &[f64]) -> Result<UnivariatePoly> {
    if nodes.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: nodes.len(),
            found: values.len(),
        });
    }
    let n = nodes.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if nodes[i] == nodes[j] {
                return Err(Error::DuplicateNodes(nodes[i]));
            }
        }
    }
    let mut dd = values.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - level]);
        }
    }
    let mut poly = vec![dd.last().copied().unwrap_or(0.0)];
    for k in (0..n.saturating_sub(1)).rev() {
        let mut next = vec![0.0; poly.len() + 1];
        for (j, &c) in poly.iter().enumerate() {
            next[j + 1] += c;
            next[j] -= nodes[k] * c;
        }
        next[0] += dd[k];
        poly = next;
    }
    Ok(UnivariatePoly::new(poly))
}

fn balance(a: &mut [Vec<f64>]) {
    let n = a.len();
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let (mut r, mut c) = (0.0, 0.0);
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        a[i][j] *= g;
                    }
                    for row in a.iter_mut() {
                        row[i] *= f;
                    }
                }
            }
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by Francis double-shift QR.
/// Returns `(re, im)` pairs.
fn hessenberg_eigenvalues(a: &mut [Vec<f64>]) -> Result<Vec<(f64, f64)>> {
    let n = a.len();
    let mut out = vec![(0.0, 0.0); n];
    if n == 0 {
        return Ok(out);
    }
    let eps = f64::EPSILON;
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l > 0 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() <= eps * s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[nu][nu];
            if l == nu {
                out[nu] = (x + t, 0.0);
                nn -= 1;
                break;
            }
            let mut y = a[nu - 1][nu - 1];
            let mut w = a[nu][nu - 1] * a[nu - 1][nu];
            if l == nu - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + z.copysign(p);
                    out[nu - 1] = (x + z, 0.0);
                    out[nu] = (if z != 0.0 { x - w / z } else { x + z }, 0.0);
                } else {
                    out[nu] = (x + p, -z);
                    out[nu - 1] = (x + p, z);
                }
                nn -= 2;
                break;
            }
            if its == 60 {
                return Err(Error::NotConverged {
                    sweeps: its,
                    residual: a[nu][nu - 1].abs(),
                });
            }
            if its == 10 || its == 20 || its == 40 {
                t += x;
                for i in 0..=nu {
                    a[i][i] -= x;
                }
                let s = a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            let (mut p, mut q, mut r): (f64, f64, f64);
            let mut m = nu - 2;
            loop {
                let z = a[m][m];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - rr - ss;
                r = a[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m..nu - 1 {
                a[i + 2][i] = 0.0;
                if i != m {
                    a[i + 2][i - 1] = 0.0;
                }
            }
            let mut k = m;
            while k < nu {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = if k + 1 != nu { a[k + 2][k - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = a[k][j] + q * a[k + 1][j];
                        if k + 1 != nu {
                            pp += r * a[k + 2][j];
                            a[k + 2][j] -= pp * z;
                        }
                        a[k + 1][j] -= pp * y;
                        a[k][j] -= pp * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = x * a[i][k] + y * a[i][k + 1];
                        if k + 1 != nu {
                            pp += z * a[i][k + 2];
                            a[i][k + 2] -= pp * r;
                        }
                        a[i][k + 1] -= pp * q;
                        a[i][k] -= pp;
                    }
                }
                k += 1;
            }
            if l + 1 >= nu {
                break;
            }
        }
    }
    Ok(out)
}

/// Real parts of the companion-matrix eigenvalues, sorted, and the largest
/// imaginary magnitude met.
///
/// `max_imag` is the non-hyperbolicity signal: it is zero for real-rooted
/// input up to rounding.
pub fn real_roots(q: &UnivariatePoly) -> Result<(Vec<f64>, f64)> {
    let q = UnivariatePoly::new(q.coeffs().to_vec());
    if q.is_zero() || q.coeffs().is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    let d = q.degree();
    if d == 0 {
        return Ok((Vec::new(), 0.0));
    }
    let c = q.coeffs();
    let lead = c[d];
    let mut a = vec![vec![0.0; d]; d];
    for j in 0..d {
        a[0][j] = -c[d - j - 1] / lead;
    }
    for j in 1..d {
        a[j][j - 1] = 1.0;
    }
    balance(&mut a);
    let eig = hessenberg_eigenvalues(&mut a)?;
    let mut roots: Vec<f64> = eig.iter().map(|e| e.0).collect();
    roots.sort_by(f64::total_cmp);
    let max_imag = eig.iter().fold(0.0f64, |m, e| m.max(e.1.abs()));
    Ok((roots, max_imag))
}

fn bisect(q: &UnivariatePoly, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = q.eval(lo);
    let fhi = q.eval(hi);
    if flo == 0.0 {
        return lo;
    }
    if fhi == 0.0 {
        return hi;
    }
    if flo.signum() == fhi.signum() {
        return if flo.abs() <= fhi.abs() { lo } else { hi };
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = q.eval(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Real-rooted fit of `q`: sorted roots obtained by bracketing each root of
/// `q^(i)` between consecutive roots of `q^(i+1)`.
///
/// For real-rooted `q` the brackets are exact (roots interlace) and the fit
/// reproduces `q`; otherwise some brackets hold no sign change and the fit
/// differs from `q`, which [`factorization_residual`] measures. Clusters
/// of nearly equal roots are re-centred on the simple root of the matching
/// derivative.
pub fn real_rooted_fit(q: &UnivariatePoly) -> Result<Vec<f64>> {
    let q = UnivariatePoly::new(q.coeffs().to_vec());
    if q.is_zero() || q.coeffs().is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    let d = q.degree();
    if d == 0 {
        return Ok(Vec::new());
    }
    let mut derivs = vec![q.clone()];
    for i in 1..d {
        let next = derivs[i - 1].derivative();
        derivs.push(next);
    }
    let lin = &derivs[d - 1];
    let mut roots = vec![-lin.coeffs()[0] / lin.coeffs()[1]];
    for level in (0..d - 1).rev() {
        let p = &derivs[level];
        let bound = p.cauchy_bound();
        let mut edges = Vec::with_capacity(roots.len() + 2);
        edges.push(-bound.max(roots[0].abs() + 1.0));
        edges.extend_from_slice(&roots);
        edges.push(bound.max(roots[roots.len() - 1].abs() + 1.0));
        roots = edges.windows(2).map(|w| bisect(p, w[0], w[1])).collect();
    }
    refine_clusters(&derivs, &mut roots);
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

fn refine_clusters(derivs: &[UnivariatePoly], roots: &mut [f64]) {
    let scale = 1.0 + roots.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let gap = 1e-6 * scale;
    let mut start = 0;
    while start < roots.len() {
        let mut end = start + 1;
        while end < roots.len() && roots[end] - roots[end - 1] <= gap {
            end += 1;
        }
        let mult = end - start;
        if mult > 1 {
            let p = &derivs[mult - 1];
            let dp = p.derivative();
            let mut x = roots[start..end].iter().sum::<f64>() / mult as f64;
            for _ in 0..8 {
                let slope = dp.eval(x);
                if slope == 0.0 {
                    break;
                }
                let step = p.eval(x) / slope;
                if !step.is_finite() || step.abs() > gap * mult as f64 {
                    break;
                }
                x -= step;
                if step.abs() <= 1e-16 * scale {
                    break;
                }
            }
            for r in &mut roots[start..end] {
                *r = x;
            }
        }
        start = end;
    }
}

/// Relative coefficient-wise gap between `q` and `lead(q) * prod (t - r_j)`.
pub fn factorization_residual(q: &UnivariatePoly, roots: &[f64]) -> f64 {
    let rebuilt = UnivariatePoly::from_roots(q.leading(), roots);
    let scale = q.max_abs_coeff().max(f64::MIN_POSITIVE);
    let n = q.coeffs().len().max(rebuilt.coeffs().len());
    (0..n)
        .map(|k| {
            let a = q.coeffs().get(k).copied().unwrap_or(0.0);
            let b = rebuilt.coeffs().get(k).copied().unwrap_or(0.0);
            (a - b).abs()
        })
        .fold(0.0, f64::max)
        / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn interpolation_examples() {
        let p = interpolate_univariate(&[0.0, 1.0], &[1.0, 3.0]).unwrap();
        assert_eq!(p.coeffs(), &[1.0, 2.0]);
        let p = interpolate_univariate(&[0.0, 1.0, 2.0], &[1.0, 4.0, 9.0]).unwrap();
        assert_eq!(p.coeffs(), &[1.0, 2.0, 1.0]);
        // 2 - t + 0.5 t^2 + 3 t^3
        let f = |t: f64| 2.0 - t + 0.5 * t * t + 3.0 * t * t * t;
        let nodes = [0.0, 1.0, 2.0, 3.0];
        let vals: Vec<f64> = nodes.iter().map(|&t| f(t)).collect();
        let p = interpolate_univariate(&nodes, &vals).unwrap();
        for (got, want) in p.coeffs().iter().zip([2.0, -1.0, 0.5, 3.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        assert!(matches!(
            interpolate_univariate(&[1.0, 1.0], &[0.0, 0.0]),
            Err(Error::DuplicateNodes(_))
        ));
    }

    #[test]
    fn root_examples() {
        let (r, im) = real_roots(&UnivariatePoly::new(vec![2.0, -3.0, 1.0])).unwrap();
        assert_abs_diff_eq!(r[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r[1], 2.0, epsilon = 1e-14);
        assert_eq!(im, 0.0);

        let (r, im) = real_roots(&UnivariatePoly::new(vec![11.0, 12.0, 3.0])).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert_abs_diff_eq!(r[0], -2.0 - s, epsilon = 1e-13);
        assert_abs_diff_eq!(r[1], -2.0 + s, epsilon = 1e-13);
        assert_eq!(im, 0.0);

        let (r, im) = real_roots(&UnivariatePoly::new(vec![1.0, 0.0, 1.0])).unwrap();
        assert_abs_diff_eq!(r[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(im, 1.0, epsilon = 1e-15);

        assert!(matches!(
            real_roots(&UnivariatePoly::new(vec![0.0])),
            Err(Error::ZeroPolynomial)
        ));
    }

    #[test]
    fn higher_degree_roots() {
        let want = [-3.5, -1.0, 0.25, 0.5, 2.0, 7.0, 11.0];
        let q = UnivariatePoly::from_roots(2.0, &want);
        let (r, im) = real_roots(&q).unwrap();
        for (a, b) in r.iter().zip(want) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-9);
        }
        assert!(im < 1e-8);
    }

    #[test]
    fn fit_handles_multiple_roots() {
        let q = UnivariatePoly::from_roots(3.0, &[-1.0; 6]);
        let r = real_rooted_fit(&q).unwrap();
        assert!(r.iter().all(|x| (x + 1.0).abs() < 1e-12), "{r:?}");
        assert!(factorization_residual(&q, &r) < 1e-13);
    }

    #[test]
    fn fit_flags_complex_pair() {
        let q = UnivariatePoly::new(vec![1.0, 0.0, 1.0]);
        let r = real_rooted_fit(&q).unwrap();
        assert!(factorization_residual(&q, &r) > 0.5);
    }

    #[test]
    fn fit_matches_quadratic_formula() {
        let r = real_rooted_fit(&UnivariatePoly::new(vec![11.0, 12.0, 3.0])).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert_abs_diff_eq!(r[0], -2.0 - s, epsilon = 1e-14);
        assert_abs_diff_eq!(r[1], -2.0 + s, epsilon = 1e-14);
    }
}
