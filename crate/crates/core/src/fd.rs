//! Finite-difference oracles: centered stencils with Fornberg weights.

/// Weights `w[k][j]` for the `k`-th derivative at `z` from samples at `x[j]`,
/// `k = 0..=m`.
pub fn fornberg_weights(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Half-width of the centered stencil.
pub const STENCIL_HALF_WIDTH: i32 = 4;

/// `order`-th derivative of `f` at 0 from a 9-point centered stencil with
/// step `h`.
pub fn centered_derivative(f: impl Fn(f64) -> f64, order: usize, h: f64) -> f64 {
    let offsets: Vec<f64> = (-STENCIL_HALF_WIDTH..=STENCIL_HALF_WIDTH)
        .map(|i| i as f64)
        .collect();
    let w = fornberg_weights(0.0, &offsets, order);
    let scale = h.powi(order as i32);
    offsets
        .iter()
        .zip(&w[order])
        .map(|(&o, &wj)| if wj == 0.0 { 0.0 } else { wj * f(o * h) })
        .sum::<f64>()
        / scale
}

/// Classical 3-point second difference `(f(h) - 2 f(0) + f(-h)) / h^2`.
pub fn second_difference(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn classical_weights() {
        let w = fornberg_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert_relative_eq!(w[1][0], -0.5);
        assert_relative_eq!(w[1][2], 0.5);
        assert_relative_eq!(w[2][0], 1.0);
        assert_relative_eq!(w[2][1], -2.0);
    }

    #[test]
    fn derivatives_of_exp() {
        for k in 1..=4 {
            let d = centered_derivative(f64::exp, k, 0.05);
            assert_relative_eq!(d, 1.0, max_relative = 1e-8);
        }
    }
}
