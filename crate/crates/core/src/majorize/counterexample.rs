use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, SymmetricMatrix};
use crate::operators::OperatorSpec;
use crate::parallel::sample_rng;
use crate::poly::SparseSymPoly;
use crate::report::{CheckReport, Witness};

fn require_positive(what: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0) {
        return Err(Error::OutOfRange {
            what,
            value: v.to_string(),
            allowed: "> 0".into(),
        });
    }
    Ok(())
}

/// `F = a_11^2 a_22` on 2x2 symmetric matrices.
pub fn counterexample_operator() -> OperatorSpec {
    OperatorSpec::diagonal(SparseSymPoly::monomial(vec![2, 1], 1.0).expect("nonzero monomial"))
        .expect("diagonal operator")
}

/// `F(A)^{1/3} / det(A)^{1/2}` at `A = diag(s, 1)`; equals `s^{1/6}`.
pub fn counterexample_ratio(s: f64) -> Result<f64> {
    require_positive("s", s)?;
    let a = SymmetricMatrix::diag(&[s, 1.0]);
    let f = counterexample_operator().evaluate(&a)?;
    Ok(f.cbrt() / a.det().sqrt())
}

/// `F = a_11^{N-1} (1/n)(a_22 + ... + a_{n+1,n+1})` on `(n+1) x (n+1)`.
pub fn generalized_counterexample_operator(big_n: u32, n: usize) -> Result<OperatorSpec> {
    if big_n < 2 || n == 0 {
        return Err(Error::precondition("need N >= 2 and n >= 1"));
    }
    let terms = (0..n).map(|j| {
        let mut alpha = vec![0u32; n + 1];
        alpha[0] = big_n - 1;
        alpha[j + 1] = 1;
        (alpha, 1.0 / n as f64)
    });
    OperatorSpec::diagonal(SparseSymPoly::new(n + 1, terms)?)
}

/// `F(A)^{1/N} / det(A)^{1/(n+1)}` at `A = diag(a_11, 1, ..., 1)`, which is
/// `a_11^{1 - 1/N - 1/(n+1)}`.
pub fn generalized_counterexample_ratio(big_n: u32, n: usize, a11: f64) -> Result<f64> {
    require_positive("a11", a11)?;
    let f = generalized_counterexample_operator(big_n, n)?;
    let mut d = vec![1.0; n + 1];
    d[0] = a11;
    let a = SymmetricMatrix::diag(&d);
    Ok(f.evaluate(&a)?.powf(1.0 / big_n as f64) / a.det().powf(1.0 / (n + 1) as f64))
}

/// Ratio scan at `s = 10^{-1}, ..., 10^{-12}` against a fixed `gamma`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleScan {
    pub gamma: f64,
    /// `(s, ratio)` pairs in scan order.
    pub ratios: Vec<(f64, f64)>,
    /// First `s` with `ratio < gamma`.
    pub witness_s: Option<f64>,
    /// `min (ratio - gamma)`.
    pub min_gap: f64,
    /// Largest `|ratio - s^{1/6}| / s^{1/6}` over the scan.
    pub max_formula_deviation: f64,
    /// A violating witness was found, so majorization fails for `gamma`.
    pub reproduced: bool,
}

pub fn counterexample_scan(gamma: f64) -> Result<CounterexampleScan> {
    require_positive("gamma", gamma)?;
    let mut ratios = Vec::with_capacity(12);
    let mut witness_s = None;
    let mut min_gap = f64::INFINITY;
    let mut dev = 0.0f64;
    for e in 1..=12 {
        let s = 10f64.powi(-e);
        let r = counterexample_ratio(s)?;
        let exact = s.powf(1.0 / 6.0);
        dev = dev.max((r - exact).abs() / exact);
        min_gap = min_gap.min(r - gamma);
        if r < gamma && witness_s.is_none() {
            witness_s = Some(s);
        }
        ratios.push((s, r));
    }
    Ok(CounterexampleScan {
        gamma,
        ratios,
        witness_s,
        min_gap,
        max_formula_deviation: dev,
        reproduced: witness_s.is_some(),
    })
}

/// `k = (2/(nN)) (n - 2 + 2/N)`.
pub fn pogorelov_k(big_n: u32, n: usize) -> f64 {
    let (bn, n) = (big_n as f64, n as f64);
    2.0 / (n * bn) * (n - 2.0 + 2.0 / bn)
}

/// `(2/(nN)) (C |x|^2 + eps n) / (|x|^2 + eps)` with `C = n - 2 + 2/N`.
pub fn pogorelov_formula(big_n: u32, n: usize, eps: f64, r2: f64) -> f64 {
    let (bn, nf) = (big_n as f64, n as f64);
    let c = nf - 2.0 + 2.0 / bn;
    2.0 / (nf * bn) * (c * r2 + eps * nf) / (r2 + eps)
}

/// RK4 solution of `g'' = g^{-1/(N-1)}`, `g(0) = 1`, `g'(0) = 0`, with
/// cubic Hermite dense output. `g` is even, so negative `t` reflect.
#[derive(Clone, Debug)]
pub struct PogorelovProfile {
    step: f64,
    g: Vec<f64>,
    dg: Vec<f64>,
    exponent: f64,
}

impl PogorelovProfile {
    pub fn solve(big_n: u32, t_max: f64, step: f64) -> Result<Self> {
        if big_n < 2 {
            return Err(Error::OutOfRange {
                what: "N",
                value: big_n.to_string(),
                allowed: ">= 2".into(),
            });
        }
        require_positive("step", step)?;
        let exponent = -1.0 / (big_n as f64 - 1.0);
        let steps = (t_max / step).ceil() as usize;
        let rhs = |g: f64| g.powf(exponent);
        let mut g = Vec::with_capacity(steps + 1);
        let mut dg = Vec::with_capacity(steps + 1);
        let (mut y, mut v) = (1.0f64, 0.0f64);
        g.push(y);
        dg.push(v);
        for _ in 0..steps {
            let (k1y, k1v) = (v, rhs(y));
            let (k2y, k2v) = (v + 0.5 * step * k1v, rhs(y + 0.5 * step * k1y));
            let (k3y, k3v) = (v + 0.5 * step * k2v, rhs(y + 0.5 * step * k2y));
            let (k4y, k4v) = (v + step * k3v, rhs(y + step * k3y));
            y += step / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
            v += step / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            g.push(y);
            dg.push(v);
        }
        Ok(PogorelovProfile {
            step,
            g,
            dg,
            exponent,
        })
    }

    pub fn t_max(&self) -> f64 {
        self.step * (self.g.len() - 1) as f64
    }

    /// `g(t)` for `|t| <= t_max`.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.abs();
        let pos = (t / self.step).min((self.g.len() - 1) as f64);
        let i = (pos.floor() as usize).min(self.g.len() - 2);
        let u = t / self.step - i as f64;
        let (h00, h10) = (
            2.0 * u.powi(3) - 3.0 * u * u + 1.0,
            u.powi(3) - 2.0 * u * u + u,
        );
        let (h01, h11) = (-2.0 * u.powi(3) + 3.0 * u * u, u.powi(3) - u * u);
        h00 * self.g[i]
            + h10 * self.step * self.dg[i]
            + h01 * self.g[i + 1]
            + h11 * self.step * self.dg[i + 1]
    }

    /// `g''(t)` from the ODE.
    pub fn second_derivative(&self, t: f64) -> f64 {
        self.eval(t).powf(self.exponent)
    }
}

/// Evaluation points `(t, x)`: `t` evenly spaced in `[t_lo, t_hi]`, and for
/// each radius in `[r_lo, r_hi]` a seeded random direction in `R^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PogorelovGrid {
    pub t_points: usize,
    pub t_lo: f64,
    pub t_hi: f64,
    pub x_points: usize,
    pub r_lo: f64,
    pub r_hi: f64,
    pub seed: u64,
}

impl Default for PogorelovGrid {
    fn default() -> Self {
        PogorelovGrid {
            t_points: 10,
            t_lo: 0.0,
            t_hi: 1.0,
            x_points: 10,
            r_lo: 0.1,
            r_hi: 1.0,
            seed: 42,
        }
    }
}

impl PogorelovGrid {
    fn points(&self, n: usize) -> Result<Vec<(f64, Vec<f64>)>> {
        if self.r_lo <= 0.0 || self.r_hi < self.r_lo {
            return Err(Error::precondition(
                "grid radii must satisfy 0 < r_lo <= r_hi (x = 0 excluded)",
            ));
        }
        if self.t_points == 0
            || self.x_points == 0
            || self.t_lo < 0.0
            || self.t_hi < self.t_lo
            || self.t_hi > 1.0
        {
            return Err(Error::precondition(
                "grid needs t points in [0, 1] and at least one x point",
            ));
        }
        let lin = |lo: f64, hi: f64, k: usize, i: usize| {
            if k == 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (k - 1) as f64
            }
        };
        let mut rng = sample_rng(self.seed, 0);
        let xs: Vec<Vec<f64>> = (0..self.x_points)
            .map(|i| {
                let r = lin(self.r_lo, self.r_hi, self.x_points, i);
                let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.iter().map(|x| r * x / norm).collect()
            })
            .collect();
        let mut out = Vec::with_capacity(self.t_points * self.x_points);
        for i in 0..self.t_points {
            let t = lin(self.t_lo, self.t_hi, self.t_points, i);
            for x in &xs {
                out.push((t, x.clone()));
            }
        }
        Ok(out)
    }
}

/// Finite-difference Hessian at `z` with steps `1e-4 (1 + |z_i|)`.
pub fn fd_hessian(u: impl Fn(&[f64]) -> f64, z: &[f64]) -> SymmetricMatrix {
    let d = z.len();
    let h: Vec<f64> = z.iter().map(|v| 1e-4 * (1.0 + v.abs())).collect();
    let at = |di: &[(usize, f64)]| {
        let mut p = z.to_vec();
        for &(i, s) in di {
            p[i] += s;
        }
        u(&p)
    };
    let u0 = u(z);
    let mut m = Matrix::zeros(d);
    for i in 0..d {
        m[(i, i)] = (at(&[(i, h[i])]) - 2.0 * u0 + at(&[(i, -h[i])])) / (h[i] * h[i]);
        for j in (i + 1)..d {
            let v = (at(&[(i, h[i]), (j, h[j])])
                - at(&[(i, h[i]), (j, -h[j])])
                - at(&[(i, -h[i]), (j, h[j])])
                + at(&[(i, -h[i]), (j, -h[j])]))
                / (4.0 * h[i] * h[j]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    SymmetricMatrix::real(m)
}

/// Checks, at grid points with `x != 0`, that the finite-difference Hessian
/// of `u_eps(t, x) = g(t) (|x|^2 + eps)^{1/N}` gives
/// `F(D^2 u_eps) = (2/(nN)) (C|x|^2 + eps n)/(|x|^2 + eps)` to `1e-3`
/// relative, and that `F(D^2 u_eps) >= k` (subsolution) to the same slack.
pub fn pogorelov_verify(
    big_n: u32,
    n: usize,
    eps: f64,
    grid: &PogorelovGrid,
) -> Result<CheckReport> {
    if big_n < 3 || n < 2 {
        return Err(Error::precondition("need N >= 3 and n >= 2"));
    }
    require_positive("eps", eps)?;
    let points = grid.points(n)?;
    let profile = PogorelovProfile::solve(big_n, 1.0 + 0.01, 1e-4)?;
    let f = generalized_counterexample_operator(big_n, n)?;
    let k = pogorelov_k(big_n, n);
    let inv_n = 1.0 / big_n as f64;
    let u = |z: &[f64]| {
        let r2: f64 = z[1..].iter().map(|x| x * x).sum();
        profile.eval(z[0]) * (r2 + eps).powf(inv_n)
    };
    let mut report = CheckReport::new(points.len(), grid.seed);
    let mut max_dev = 0.0f64;
    let mut min_sub = f64::INFINITY;
    for (t, x) in &points {
        let z: Vec<f64> = std::iter::once(*t).chain(x.iter().copied()).collect();
        let hess = fd_hessian(u, &z);
        let got = f.evaluate(&hess)?;
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let want = pogorelov_formula(big_n, n, eps, r2);
        let dev = (got - want).abs() / want.abs();
        let sub = (got - k) / k;
        max_dev = max_dev.max(dev);
        min_sub = min_sub.min(sub);
        report.observe((1e-3 - dev).min(sub + 1e-3), || Witness::Vector(z.clone()));
    }
    report.set("k", k);
    report.set("max_relative_deviation", max_dev);
    report.set("min_subsolution_margin", min_sub);
    report.set("g_at_1", profile.eval(1.0));
    Ok(report.finish(0.0))
}
