//! Small scalar root-finding and minimization helpers shared by the
//! polynomial and rate modules.

use crate::error::{Error, Result};

/// Bisection for a sign change of `f` on `[lo, hi]`.
///
/// Returns an endpoint directly when `f` vanishes there. Iterates until the
/// bracket width is below `xtol` or the midpoint stops moving.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, xtol: f64, what: &str) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.signum() != fb.signum()) || fa.is_nan() || fb.is_nan() {
        return Err(Error::BracketFailure {
            what: what.to_string(),
            lo,
            hi,
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b || (b - a) <= xtol {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    // return whichever endpoint has the smaller residual
    let (ra, rb) = (f(a).abs(), f(b).abs());
    Ok(if ra <= rb { a } else { b })
}

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
/// Returns `(argmin, min)`.
pub fn golden_min<F>(mut f: F, lo: f64, hi: f64, xtol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a) > xtol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    // endpoints are legitimate minimizers on a closed interval
    let (fl, fh) = (f(lo), f(hi));
    if fl < fx && fl <= fh {
        (lo, fl)
    } else if fh < fx {
        (hi, fh)
    } else {
        (x, fx)
    }
}

/// Grid scan followed by golden-section refinement around the best cell.
/// Robust to functions that are only piecewise unimodal.
pub fn scan_min<F>(mut f: F, lo: f64, hi: f64, cells: usize, xtol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    if hi <= lo {
        return (lo, f(lo));
    }
    let h = (hi - lo) / cells as f64;
    let mut best = (lo, f(lo));
    for i in 1..=cells {
        let x = if i == cells { hi } else { lo + h * i as f64 };
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    let a = (best.0 - h).max(lo);
    let b = (best.0 + h).min(hi);
    let refined = golden_min(&mut f, a, b, xtol);
    if refined.1 < best.1 {
        refined
    } else {
        best
    }
}

/// Unevaluated sum `hi + lo` carrying roughly 106 bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[allow(clippy::should_implement_trait)]
impl DoubleDouble {
    pub const fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        (s, err)
    }

    fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        (s, b - (s - a))
    }

    pub fn add(self, other: Self) -> Self {
        let (s, e) = Self::two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = Self::quick_two_sum(s, e);
        Self { hi, lo }
    }

    pub fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let p = self.hi * b;
        let e = self.hi.mul_add(b, -p);
        let e = e + self.lo * b;
        let (hi, lo) = Self::quick_two_sum(p, e);
        Self { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let r = self.add(Self::new(q1).mul_f64(b).neg());
        let q2 = r.hi / b;
        let (hi, lo) = Self::quick_two_sum(q1, q2);
        Self { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15, "sqrt2").unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn bisect_reports_missing_bracket() {
        let err = bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12, "none").unwrap_err();
        assert!(matches!(err, Error::BracketFailure { .. }));
    }

    #[test]
    fn bisect_accepts_root_at_endpoint() {
        assert_eq!(bisect(|x| x + 1.0, -1.0, 0.0, 1e-12, "end").unwrap(), -1.0);
    }

    #[test]
    fn golden_and_scan() {
        let (x, v) = golden_min(|x| (x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8 && v < 1e-15);
        // two wells, the deeper one on the right
        let f = |x: f64| ((x - 0.2).powi(2) + 0.01).min((x - 0.8).powi(2));
        let (x, _) = scan_min(f, 0.0, 1.0, 50, 1e-10);
        assert!((x - 0.8).abs() < 1e-6);
    }

    #[test]
    fn double_double_recovers_lost_bits() {
        let a = DoubleDouble::new(1.0).add(DoubleDouble::new(1e-20));
        let b = a.add(DoubleDouble::new(-1.0));
        assert!((b.to_f64() - 1e-20).abs() < 1e-35);
        let third = DoubleDouble::new(1.0).div_f64(3.0).mul_f64(3.0);
        assert!((third.to_f64() - 1.0).abs() < 1e-30);
    }
}
