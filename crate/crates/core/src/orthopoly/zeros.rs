//! Largest zeros and the interlacing roots of `P_k + P_{k+1}`.

use nalgebra::SymmetricEigen;

use super::quadrature::jacobi_matrix;
use super::{PolyFamily, RecurrenceTable};
use crate::error::{Error, Result};
use crate::numeric::bisect;

/// Abscissa tolerance for every root refinement here.
pub const ROOT_XTOL: f64 = 1e-15;

impl RecurrenceTable {
    /// Largest zero `z_k` of `P_k`: top eigenvalue of the `k × k` truncated
    /// recurrence matrix, refined by bisection on `P_k`.
    pub fn largest_zero(&self, k: usize) -> Result<f64> {
        if k == 0 {
            return Err(Error::NoZero);
        }
        let coeffs: Vec<_> = (0..=k.min(self.max_degree() - 1))
            .map(|i| *self.coeffs(i))
            .collect();
        let eig = SymmetricEigen::new(jacobi_matrix(&coeffs, k)).eigenvalues;
        let seed = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (_, hi_end) = self.family().support();
        let p = |x: f64| self.eval(k, x);

        // P_k > 0 right of z_k; widen until the seed is bracketed
        let mut h = 1e-12;
        let (mut lo, mut hi) = (seed - h, (seed + h).min(hi_end));
        while !(p(lo) <= 0.0 && p(hi) >= 0.0) {
            h *= 4.0;
            if h > 1e-2 {
                return Err(Error::BracketFailure {
                    what: format!("largest zero of P_{k}"),
                    lo: seed - h,
                    hi: seed + h,
                });
            }
            lo = seed - h;
            hi = (seed + h).min(hi_end);
        }
        bisect(p, lo, hi, ROOT_XTOL, "largest zero")
    }

    /// Root `y` of `P_k + P_{k+1}` with `z_k <= y <= z_{k+1}`, where
    /// `z_0` is the left end of the support.
    pub fn companion_root(&self, k: usize) -> Result<f64> {
        let g = |x: f64| {
            let v = self.eval_upto(k + 1, x);
            v[k] + v[k + 1]
        };
        let lo = if k == 0 {
            self.family().support().0
        } else {
            self.largest_zero(k)?
        };
        let hi = self.largest_zero(k + 1)?;
        let what = format!("root of P_{k} + P_{} on [z_{k}, z_{}]", k + 1, k + 1);
        let glo = g(lo);
        if glo.abs() < 1e-14 {
            return Ok(lo);
        }
        bisect(g, lo, hi, ROOT_XTOL, &what)
    }
}

impl PolyFamily {
    pub fn largest_zero(&self, k: usize) -> Result<f64> {
        self.table(k).largest_zero(k)
    }

    pub fn companion_root(&self, k: usize) -> Result<f64> {
        self.table(k + 1).companion_root(k)
    }
}

pub fn largest_zero(family: &PolyFamily, k: usize) -> Result<f64> {
    family.largest_zero(k)
}

pub fn companion_root(family: &PolyFamily, k: usize) -> Result<f64> {
    family.companion_root(k)
}
