//! Zonal polynomial families of the two-point homogeneous spaces.
//!
//! Spheres `S^{n-1}` carry Gegenbauer polynomials on `[-1, 1]` with weight
//! `(1-x²)^{(n-3)/2}`; projective spaces `P^{n-1}(K)` carry Jacobi
//! polynomials on `[0, 1]` with weight `x^β (1-x)^α`. Every family is
//! normalized so that `P_k(1) = 1`, and its measure has total mass 1.
//!
//! The normalized three-term relation is
//!
//! ```text
//! x P_k(x) = a_k P_{k+1}(x) + b_k P_k(x) + c_k P_{k-1}(x),   a_k + b_k + c_k = 1.
//! ```
//!
//! Dimensions follow from it as well: `d_k = 1/[P_k, P_k]` satisfies
//! `d_{k+1} c_{k+1} = d_k a_k`, which is the identity the Christoffel–Darboux
//! formula depends on. Quadrature gives an independent route to the same
//! numbers (see [`PolyFamily::squared_norm`]).

mod quadrature;
mod zeros;

pub use quadrature::squared_norm;
pub use zeros::{companion_root, largest_zero, ROOT_XTOL};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::DoubleDouble;
use crate::spaces::Field;

pub use quadrature::QuadratureRule;

/// Degrees above this are evaluated with double-double accumulation.
pub const EXTENDED_PRECISION_DEGREE: usize = 64;

/// A one-variable orthogonal polynomial family, normalized by `P_k(1) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PolyFamily {
    /// Zonal polynomials of `S^{n-1}`: Gegenbauer with parameter `n/2 - 1`.
    Gegenbauer { n: usize },
    /// Jacobi polynomials on `[0, 1]` with weight `x^beta (1-x)^alpha`.
    Jacobi { alpha: f64, beta: f64 },
}

/// Coefficients of `x P_k = a P_{k+1} + b P_k + c P_{k-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceCoeffs {
    pub k: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl PolyFamily {
    pub fn gegenbauer(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidFamily(format!(
                "Gegenbauer family needs sphere dimension n >= 2, got {n}"
            )));
        }
        Ok(PolyFamily::Gegenbauer { n })
    }

    pub fn jacobi(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > -1.0 && beta > -1.0) {
            return Err(Error::InvalidFamily(format!(
                "Jacobi parameters must exceed -1, got ({alpha}, {beta})"
            )));
        }
        Ok(PolyFamily::Jacobi { alpha, beta })
    }

    /// Family of `P^{n-1}(K)`: `alpha = (c/2)(n-1) - 1`, `beta = c/2 - 1`.
    pub fn projective(field: Field, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidFamily(format!(
                "projective family needs n >= 2, got {n}"
            )));
        }
        if field == Field::O && n != 3 {
            return Err(Error::InvalidFamily(
                "octonionic projective family exists only for n = 3".into(),
            ));
        }
        let half_c = field.degree() as f64 / 2.0;
        Self::jacobi(half_c * (n as f64 - 1.0) - 1.0, half_c - 1.0)
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            PolyFamily::Gegenbauer { .. } => (-1.0, 1.0),
            PolyFamily::Jacobi { .. } => (0.0, 1.0),
        }
    }

    pub fn in_support(&self, x: f64) -> bool {
        let (lo, hi) = self.support();
        (lo..=hi).contains(&x)
    }

    /// Normalized recurrence coefficients for `k = 0..=kmax`.
    pub fn recurrence_table(&self, kmax: usize) -> Vec<RecurrenceCoeffs> {
        match *self {
            PolyFamily::Gegenbauer { n } => (0..=kmax)
                .map(|k| {
                    if k == 0 {
                        RecurrenceCoeffs {
                            k,
                            a: 1.0,
                            b: 0.0,
                            c: 0.0,
                        }
                    } else {
                        let denom = (n + 2 * k - 2) as f64;
                        RecurrenceCoeffs {
                            k,
                            a: (n + k - 2) as f64 / denom,
                            b: 0.0,
                            c: k as f64 / denom,
                        }
                    }
                })
                .collect(),
            PolyFamily::Jacobi { alpha, beta } => {
                // ratio q_{k+1}(1)/q_k(1) of the monic polynomials
                let mut out = Vec::with_capacity(kmax + 1);
                let mut prev_ratio = f64::NAN;
                for k in 0..=kmax {
                    let (diag, off) = jacobi_monic(alpha, beta, k);
                    let c = if k == 0 { 0.0 } else { off / prev_ratio };
                    let ratio = (1.0 - diag) - c;
                    out.push(RecurrenceCoeffs {
                        k,
                        a: ratio,
                        b: diag,
                        c,
                    });
                    prev_ratio = ratio;
                }
                out
            }
        }
    }

    pub fn recurrence_coeffs(&self, k: usize) -> RecurrenceCoeffs {
        self.recurrence_table(k)[k]
    }

    /// Precomputes coefficients and dimensions so that `P_0 ..= P_{kmax+1}`
    /// can be evaluated.
    pub fn table(&self, kmax: usize) -> RecurrenceTable {
        RecurrenceTable::new(*self, self.recurrence_table(kmax))
    }

    /// `P_k(x)` by forward recurrence. Values outside the support are
    /// computed but logged.
    pub fn eval(&self, k: usize, x: f64) -> f64 {
        if !self.in_support(x) {
            log::debug!("evaluating {self:?} outside its support at x = {x}");
        }
        let coeffs = self.recurrence_table(k.saturating_sub(1));
        let mut out = vec![0.0; k + 1];
        eval_into(&coeffs, x, &mut out);
        out[k]
    }

    /// `d_k`, from `d_0 = 1` and `d_{k+1} = d_k a_k / c_{k+1}`.
    pub fn dimension(&self, k: usize) -> f64 {
        self.table(k).dimension(k)
    }

    /// `D_k = d_0 + ... + d_k`.
    pub fn cumulative_dimension(&self, k: usize) -> f64 {
        self.table(k).cumulative_dimension(k)
    }
}

pub fn recurrence_coeffs(family: &PolyFamily, k: usize) -> RecurrenceCoeffs {
    family.recurrence_coeffs(k)
}

pub fn eval_pk(family: &PolyFamily, k: usize, x: f64) -> f64 {
    family.eval(k, x)
}

pub fn cumulative_dimension(family: &PolyFamily, k: usize) -> f64 {
    family.cumulative_dimension(k)
}

/// Monic Jacobi recurrence on `[0, 1]`: `q_{k+1} = (x - diag_k) q_k - off_k q_{k-1}`.
/// Returns `(diag_k, off_k)` with `off_0 = 0`.
fn jacobi_monic(a: f64, b: f64, k: usize) -> (f64, f64) {
    let kf = k as f64;
    let s = 2.0 * kf + a + b;
    // k = 0 and k = 1 are written with the (a + b) factors cancelled so that
    // a + b = 0 and a + b = -1 do not produce 0/0
    let big_b = if k == 0 {
        (b - a) / (a + b + 2.0)
    } else {
        (b * b - a * a) / (s * (s + 2.0))
    };
    let big_a = match k {
        0 => 0.0,
        1 => 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b)),
        _ => 4.0 * kf * (kf + a) * (kf + b) * (kf + a + b) / (s * s * (s + 1.0) * (s - 1.0)),
    };
    // affine map u = 2x - 1 from [-1, 1] onto [0, 1]
    ((1.0 + big_b) / 2.0, big_a / 4.0)
}

/// Fills `out[i] = P_i(x)` for `i < out.len()`; needs `coeffs.len() >= out.len() - 1`.
fn eval_into(coeffs: &[RecurrenceCoeffs], x: f64, out: &mut [f64]) {
    let len = out.len();
    if len == 0 {
        return;
    }
    out[0] = 1.0;
    if len == 1 {
        return;
    }
    if len - 1 > EXTENDED_PRECISION_DEGREE {
        eval_into_extended(coeffs, x, out);
        return;
    }
    let r = &coeffs[0];
    out[1] = (x - r.b) / r.a;
    for k in 1..len - 1 {
        let r = &coeffs[k];
        out[k + 1] = ((x - r.b) * out[k] - r.c * out[k - 1]) / r.a;
    }
}

fn eval_into_extended(coeffs: &[RecurrenceCoeffs], x: f64, out: &mut [f64]) {
    let len = out.len();
    let mut prev = DoubleDouble::new(1.0);
    let r = &coeffs[0];
    let mut cur = DoubleDouble::new(x)
        .add(DoubleDouble::new(-r.b))
        .div_f64(r.a);
    out[1] = cur.to_f64();
    let xd = DoubleDouble::new(x);
    for k in 1..len - 1 {
        let r = &coeffs[k];
        let shifted = xd.add(DoubleDouble::new(-r.b));
        // (x - b) * P_k with the shift kept exact
        let term = cur.mul_f64(shifted.hi).add(cur.mul_f64(shifted.lo));
        let next = term.add(prev.mul_f64(r.c).neg()).div_f64(r.a);
        prev = cur;
        cur = next;
        out[k + 1] = cur.to_f64();
    }
}

/// Precomputed recurrence coefficients and dimensions of one family.
#[derive(Debug, Clone)]
pub struct RecurrenceTable {
    family: PolyFamily,
    coeffs: Vec<RecurrenceCoeffs>,
    dims: Vec<f64>,
}

impl RecurrenceTable {
    fn new(family: PolyFamily, coeffs: Vec<RecurrenceCoeffs>) -> Self {
        let mut dims = Vec::with_capacity(coeffs.len() + 1);
        dims.push(1.0);
        for k in 0..coeffs.len() {
            let next_c = if k + 1 < coeffs.len() {
                coeffs[k + 1].c
            } else {
                family.recurrence_table(k + 1)[k + 1].c
            };
            dims.push(dims[k] * coeffs[k].a / next_c);
        }
        Self {
            family,
            coeffs,
            dims,
        }
    }

    pub fn family(&self) -> &PolyFamily {
        &self.family
    }

    /// Highest degree that can be evaluated.
    pub fn max_degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self, k: usize) -> &RecurrenceCoeffs {
        &self.coeffs[k]
    }

    pub fn dimension(&self, k: usize) -> f64 {
        self.dims[k]
    }

    pub fn cumulative_dimension(&self, k: usize) -> f64 {
        self.dims[..=k].iter().sum()
    }

    /// `P_0(x) ..= P_k(x)`.
    pub fn eval_upto(&self, k: usize, x: f64) -> Vec<f64> {
        assert!(k <= self.max_degree(), "degree {k} beyond table");
        let mut out = vec![0.0; k + 1];
        eval_into(&self.coeffs, x, &mut out);
        out
    }

    pub fn eval(&self, k: usize, x: f64) -> f64 {
        self.eval_upto(k, x)[k]
    }

    /// Copy with `a_k` scaled by `factor`. Only meant for fault-injection
    /// checks of the verification harness.
    #[doc(hidden)]
    pub fn with_corrupted_a(&self, k: usize, factor: f64) -> Self {
        let mut out = self.clone();
        out.coeffs[k].a *= factor;
        out
    }
}

/// Binomial coefficient, `None` on `u128` overflow.
fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 1..=k as u128 {
        r = r.checked_mul(n as u128 - k as u128 + i)? / i;
    }
    Some(r)
}

/// `dim Harm_k(R^n) = C(n+k-1, k) - C(n+k-3, k-2)`; `None` if it overflows `u128`.
pub fn harmonic_dimension(n: usize, k: usize) -> Option<u128> {
    let (n, k) = (n as u64, k as u64);
    let first = binomial(n + k - 1, k)?;
    let second = if k >= 2 { binomial(n + k - 3, k - 2)? } else { 0 };
    Some(first - second)
}
