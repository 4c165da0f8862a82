//! Least-squares response surfaces.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Solve the symmetric positive definite system `a x = b` in place
/// (Cholesky). `a` is row-major `n × n`.
fn cholesky_solve(a: &mut [f64], b: &mut [f64], n: usize) -> Result<()> {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > 0.0) {
            return Err(Error::InvalidParams(
                "least-squares system is not positive definite",
            ));
        }
        let d = libm::sqrt(d);
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= a[i * n + k] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= a[k * n + i] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    Ok(())
}

/// Coefficients `c` minimizing `Σ (rows[i]·c - y[i])²`, with a tiny ridge
/// so collinear columns stay solvable.
pub fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    let m = rows.first().map_or(0, Vec::len);
    if m == 0 || rows.len() != y.len() || rows.iter().any(|r| r.len() != m) {
        return Err(Error::InvalidParams(
            "least-squares rows are ragged or empty",
        ));
    }
    let mut a = alloc::vec![0.0; m * m];
    let mut b = alloc::vec![0.0; m];
    for (r, &yi) in rows.iter().zip(y) {
        for i in 0..m {
            b[i] += r[i] * yi;
            for j in 0..=i {
                a[i * m + j] += r[i] * r[j];
            }
        }
    }
    let trace: f64 = (0..m).map(|i| a[i * m + i]).sum();
    let ridge = 1e-12 * trace / m as f64;
    for i in 0..m {
        a[i * m + i] += ridge;
        for j in 0..i {
            a[j * m + i] = a[i * m + j];
        }
    }
    cholesky_solve(&mut a, &mut b, m)?;
    Ok(b)
}

/// Full quadratic in standardized inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSurface {
    pub center: Vec<f64>,
    pub scale: Vec<f64>,
    pub coeffs: Vec<f64>,
}

impl QuadraticSurface {
    fn features(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.push(1.0);
        let z: Vec<f64> = x
            .iter()
            .zip(&self.center)
            .zip(&self.scale)
            .map(|((v, c), s)| (v - c) / s)
            .collect();
        out.extend_from_slice(&z);
        for i in 0..z.len() {
            for j in 0..=i {
                out.push(z[i] * z[j]);
            }
        }
    }

    /// Fit to `(x, y)` pairs; inputs are standardized by their sample mean
    /// and spread (constant columns get unit spread).
    pub fn fit(xs: &[Vec<f64>], y: &[f64]) -> Result<Self> {
        let n = xs.len();
        let d = xs.first().map_or(0, Vec::len);
        if n == 0 || d == 0 {
            return Err(Error::InvalidParams("no data to fit"));
        }
        let mut center = alloc::vec![0.0; d];
        for x in xs {
            for i in 0..d {
                center[i] += x[i] / n as f64;
            }
        }
        let mut scale = alloc::vec![0.0; d];
        for x in xs {
            for i in 0..d {
                scale[i] += (x[i] - center[i]) * (x[i] - center[i]) / n as f64;
            }
        }
        for s in &mut scale {
            *s = libm::sqrt(*s);
            if !(*s > 0.0) {
                *s = 1.0;
            }
        }
        let mut surf = QuadraticSurface {
            center,
            scale,
            coeffs: Vec::new(),
        };
        let mut rows = Vec::with_capacity(n);
        let mut buf = Vec::new();
        for x in xs {
            surf.features(x, &mut buf);
            rows.push(buf.clone());
        }
        surf.coeffs = least_squares(&rows, y)?;
        Ok(surf)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut buf = Vec::with_capacity(self.coeffs.len());
        self.features(x, &mut buf);
        buf.iter().zip(&self.coeffs).map(|(a, b)| a * b).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn recovers_exact_quadratic() {
        let f = |x: f64, y: f64| 1.0 + 2.0 * x - 3.0 * y + 0.5 * x * y + 0.25 * x * x;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..7 {
            for j in 0..5 {
                let (x, y) = (i as f64 * 0.3, j as f64 - 2.0);
                xs.push(vec![x, y]);
                ys.push(f(x, y));
            }
        }
        let s = QuadraticSurface::fit(&xs, &ys).unwrap();
        assert!((s.eval(&[0.77, 1.3]) - f(0.77, 1.3)).abs() < 1e-8);
    }

    #[test]
    fn line_fit() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![1.0, i as f64]).collect();
        let y: Vec<f64> = (0..10).map(|i| 3.0 - 0.5 * i as f64).collect();
        let c = least_squares(&rows, &y).unwrap();
        assert!((c[0] - 3.0).abs() < 1e-9 && (c[1] + 0.5).abs() < 1e-9);
    }
}
