//! Dense univariate polynomials with real-root extraction.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// Degree ignoring exact trailing zeros; the zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Sum of |a_k| |x|^k; the natural scale for rounding in `eval`.
    pub fn eval_scale(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * ax + c.abs())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::constant(0.0);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        Self::new((0..n).map(|i| get(&self.coeffs, i) + get(&other.coeffs, i)).collect())
    }

    pub fn scale(&self, f: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * f).collect())
    }

    /// Product with `a + b x`.
    pub fn mul_affine(&self, a: f64, b: f64) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            out[k] += a * c;
            out[k + 1] += b * c;
        }
        Self::new(out)
    }

    /// All real roots, ascending.
    ///
    /// Seeds come from the eigenvalues of the companion matrix; each seed with a
    /// small imaginary part is polished by Newton iteration on the real axis and
    /// kept only if the polished value is at rounding level. Near-coincident
    /// roots are merged.
    pub fn real_roots(&self) -> Result<Vec<f64>> {
        let deg = self.degree();
        if deg == 0 {
            return Ok(Vec::new());
        }
        let lead = self.coeffs[deg];
        if deg == 1 {
            return Ok(vec![-self.coeffs[0] / lead]);
        }
        if deg == 2 {
            return Ok(quadratic_roots(self.coeffs[2], self.coeffs[1], self.coeffs[0]));
        }
        let mut companion = DMatrix::<f64>::zeros(deg, deg);
        for i in 1..deg {
            companion[(i, i - 1)] = 1.0;
        }
        for i in 0..deg {
            companion[(i, deg - 1)] = -self.coeffs[i] / lead;
        }
        let eigs = companion.complex_eigenvalues();
        let dp = self.derivative();
        let mut roots: Vec<f64> = Vec::new();
        for z in eigs.iter() {
            if z.im.abs() > 1e-6 * z.re.abs().max(1.0) {
                continue;
            }
            let x = newton_polish(self, &dp, z.re);
            let tol = 1e-9 * self.eval_scale(x).max(f64::MIN_POSITIVE);
            if self.eval(x).abs() <= tol {
                roots.push(x);
            }
        }
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0));
        if roots.iter().any(|r| !r.is_finite()) {
            return Err(Error::RootPolish("non-finite root".into()));
        }
        Ok(roots)
    }
}

fn newton_polish(p: &Polynomial, dp: &Polynomial, mut x: f64) -> f64 {
    for _ in 0..60 {
        let f = p.eval(x);
        let df = dp.eval(x);
        if df == 0.0 || !df.is_finite() {
            break;
        }
        let step = f / df;
        let next = x - step;
        if !next.is_finite() {
            break;
        }
        // stop once the value no longer decreases
        if p.eval(next).abs() >= f.abs() && step.abs() <= 1e-12 * x.abs().max(1.0) {
            break;
        }
        x = next;
        if step.abs() <= 1e-16 * x.abs().max(1.0) {
            break;
        }
    }
    x
}

/// Real roots of `a x^2 + b x + c`, ascending, computed without cancellation.
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    let mut r = if q == 0.0 {
        vec![0.0, 0.0]
    } else {
        vec![q / a, c / q]
    };
    r.sort_by(|x, y| x.partial_cmp(y).unwrap());
    if disc == 0.0 {
        r.truncate(1);
    }
    r
}
