//! Upper bounds on the size of codes for finite parameters.
//!
//! Product spaces get the small-degree bounds and the two bounds built on
//! the product Christoffel–Darboux kernel. Grassmann and Stiefel spaces
//! are reduced to products: a Grassmann code with minimum chordal distance
//! `d` is a code of `P^{n-1}(K)^m` with `cos² θ = 1 - d²/m` (via the
//! pairwise orthogonal lines of each plane), and a Stiefel code is a code
//! of `(S^{cn-1})^m` with `cos θ = 1 - d²/(2m)`. The reduction only uses a
//! rough estimate of the overlap, so bounds obtained this way can be weak
//! for small parameters; the Grassmann dispatcher also tries the
//! simplex/orthoplex bound.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orthopoly::{PolyFamily, RecurrenceTable};
use crate::spaces::{AngleKind, Field, Space};

/// Default cap on polynomial degrees tried by the multi-index search.
pub const DEFAULT_DEGREE_BUDGET: usize = 30;

/// Slack allowed in `m t <= Σ z_{k_t}` for zeros computed to rounding
/// accuracy. Validity itself is checked on `σ(y)`, which has no slack.
const FEASIBILITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Deg1,
    Deg2,
    Deg1Proj,
    CdExact,
    CdClosed,
    Simplex,
    /// No method applies; the reported value is `+∞`.
    None,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Deg1 => "deg1",
            Method::Deg2 => "deg2",
            Method::Deg1Proj => "deg1-proj",
            Method::CdExact => "cd-exact",
            Method::CdClosed => "cd-closed",
            Method::Simplex => "simplex",
            Method::None => "none",
        }
    }
}

/// Multi-index and the point `y` a kernel bound was evaluated at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub multi_index: Vec<usize>,
    pub y: Vec<f64>,
    pub sigma_y: f64,
}

/// Interval of the variable (`t` or `d`) on which a bound holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Applicability {
    pub variable: String,
    pub lo: f64,
    pub hi: f64,
    pub hi_inclusive: bool,
}

impl Applicability {
    fn new(variable: &str, lo: f64, hi: f64, hi_inclusive: bool) -> Self {
        Self {
            variable: variable.into(),
            lo,
            hi,
            hi_inclusive,
        }
    }
}

/// The product space a reduced bound was computed on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionInfo {
    pub from: String,
    pub to: String,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub method: Method,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    /// Upper bound on `|C|`, unfloored. `+∞` (JSON `null`) when trivial.
    pub value: f64,
    pub method: Method,
    pub witness: Option<Witness>,
    pub applicability: Option<Applicability>,
    pub reduction: Option<ReductionInfo>,
    /// Every method that applied, in evaluation order.
    pub candidates: Vec<Candidate>,
    pub trivial: bool,
}

impl BoundResult {
    fn simple(value: f64, method: Method, applicability: Applicability) -> Self {
        Self {
            value,
            method,
            witness: None,
            applicability: Some(applicability),
            reduction: None,
            candidates: vec![Candidate { method, value }],
            trivial: false,
        }
    }

    fn trivial() -> Self {
        Self {
            value: f64::INFINITY,
            method: Method::None,
            witness: None,
            applicability: None,
            reduction: None,
            candidates: Vec::new(),
            trivial: true,
        }
    }

    /// Largest integer not above the bound.
    pub fn floor(&self) -> f64 {
        (self.value + 1e-9).floor()
    }
}

fn inapplicable(method: &'static str, reason: String) -> Error {
    Error::Inapplicable { method, reason }
}

/// Degree-1 bound on `(S^{n-1})^m`: `|C| <= 1 - 1/t` for `t < 0`.
pub fn deg1_sphere_product(m: usize, t: f64) -> Result<BoundResult> {
    if m == 0 {
        return Err(Error::InvalidSpace("product needs m >= 1".into()));
    }
    if !(-1.0..0.0).contains(&t) {
        return Err(inapplicable("deg1", format!("needs -1 <= t < 0, got {t}")));
    }
    Ok(BoundResult::simple(
        1.0 - 1.0 / t,
        Method::Deg1,
        Applicability::new("t", -1.0, 0.0, false),
    ))
}

/// Degree-2 bound on `(S^{n-1})^m`: `|C| <= 2mn(1-t)/(1-mnt)` for `t < 1/(mn)`.
pub fn deg2_sphere_product(m: usize, n: usize, t: f64) -> Result<BoundResult> {
    let mn = (m * n) as f64;
    if m == 0 || n < 2 {
        return Err(Error::InvalidSpace(format!("need m >= 1 and n >= 2, got m = {m}, n = {n}")));
    }
    if !(t >= -1.0 && t < 1.0 / mn) {
        return Err(inapplicable("deg2", format!("needs -1 <= t < 1/(mn) = {}, got {t}", 1.0 / mn)));
    }
    Ok(BoundResult::simple(
        2.0 * mn * (1.0 - t) / (1.0 - mn * t),
        Method::Deg2,
        Applicability::new("t", -1.0, 1.0 / mn, false),
    ))
}

/// Degree-1 bound on `P^{n-1}(K)^m`: `|C| <= (1-t)/(1/n - t)` for
/// `t < 1/n`, independent of `m` and of the field.
pub fn deg1_projective_product(n: usize, t: f64) -> Result<BoundResult> {
    if n < 2 {
        return Err(Error::InvalidSpace(format!("projective space needs n >= 2, got {n}")));
    }
    let inv_n = 1.0 / n as f64;
    if !(t >= 0.0 && t < inv_n) {
        return Err(inapplicable("deg1-proj", format!("needs 0 <= t < 1/n = {inv_n}, got {t}")));
    }
    Ok(BoundResult::simple(
        (1.0 - t) / (inv_n - t),
        Method::Deg1Proj,
        Applicability::new("t", 0.0, inv_n, false),
    ))
}

/// [`deg1_sphere_product`] in exact rational arithmetic.
pub fn deg1_sphere_product_exact(t: Rational64) -> Result<Rational64> {
    if !(t >= Rational64::from_integer(-1) && t < Rational64::from_integer(0)) {
        return Err(inapplicable("deg1", format!("needs -1 <= t < 0, got {t}")));
    }
    Ok(Rational64::from_integer(1) - t.recip())
}

/// [`deg2_sphere_product`] in exact rational arithmetic.
pub fn deg2_sphere_product_exact(m: i64, n: i64, t: Rational64) -> Result<Rational64> {
    let one = Rational64::from_integer(1);
    let mn = Rational64::from_integer(m * n);
    if !(t >= -one && t < mn.recip()) {
        return Err(inapplicable("deg2", format!("needs -1 <= t < 1/(mn), got {t}")));
    }
    Ok(Rational64::from_integer(2) * mn * (one - t) / (one - mn * t))
}

fn kernel_factor(table: &RecurrenceTable, k: usize, x: f64, y: f64) -> (f64, f64, f64) {
    let px = table.eval_upto(k + 1, x);
    let py = table.eval_upto(k + 1, y);
    let sum = (0..=k).map(|i| table.dimension(i) * px[i] * py[i]).sum();
    let q = px[k + 1] * py[k] - px[k] * py[k + 1];
    (sum, table.dimension(k) * table.coeffs(k).a * q, (x - y).abs())
}

fn check_kernel_args(table: &RecurrenceTable, k: &[usize], x: &[f64], y: &[f64]) -> Result<()> {
    if k.is_empty() || k.len() != x.len() || k.len() != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "multi-index of length {}, x of length {}, y of length {}",
            k.len(),
            x.len(),
            y.len()
        )));
    }
    let top = k.iter().copied().max().unwrap_or(0);
    if top + 1 > table.max_degree() {
        return Err(Error::ShapeMismatch(format!(
            "multi-index entry {top} needs a table of degree {}",
            top + 1
        )));
    }
    Ok(())
}

/// `(K_k(x, y), N_k(x, y))` of the product Christoffel–Darboux formula
/// `K · (σ(x) - σ(y)) = N`.
pub fn cd_kernel(table: &RecurrenceTable, k: &[usize], x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let (kv, nv, _) = cd_kernel_parts(table, k, x, y)?;
    Ok((kv, nv))
}

/// Returns `(K, N, scale)`; `scale` bounds the magnitude of the terms
/// that cancel in the identity.
fn cd_kernel_parts(table: &RecurrenceTable, k: &[usize], x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    check_kernel_args(table, k, x, y)?;
    let parts: Vec<(f64, f64, f64)> = k
        .iter()
        .zip(x.iter().zip(y))
        .map(|(&kt, (&xt, &yt))| kernel_factor(table, kt, xt, yt))
        .collect();
    let kv: f64 = parts.iter().map(|p| p.0).product();
    let mut nv = 0.0;
    let mut scale = 0.0;
    for (t, &(_, nt, gap)) in parts.iter().enumerate() {
        let others: f64 = parts
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != t)
            .map(|(_, p)| p.0)
            .product();
        nv += nt * others;
        scale += nt.abs() * others.abs() + gap * kv.abs();
    }
    Ok((kv, nv, scale))
}

/// Relative residual `|K (σ(x) - σ(y)) - N| / (1 + Σ|terms|)`.
pub fn cd_identity_residual(table: &RecurrenceTable, k: &[usize], x: &[f64], y: &[f64]) -> Result<f64> {
    let (kv, nv, scale) = cd_kernel_parts(table, k, x, y)?;
    let ds: f64 = x.iter().sum::<f64>() - y.iter().sum::<f64>();
    Ok((kv * ds - nv).abs() / (1.0 + scale))
}

/// Per-degree data of the kernel bounds at `y_k`, the root of
/// `P_k + P_{k+1}` between the largest zeros of `P_k` and `P_{k+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct DegreeData {
    /// left end of the feasible region: `z_k`, or the support's left end for `k = 0`
    z: f64,
    y: f64,
    p_k: f64,
    p_k1: f64,
    dim: f64,
    a: f64,
    /// `Σ_{i<=k} d_i P_i(y)`
    s1: f64,
    /// `Σ_{i<=k} d_i P_i(y)²`
    s2: f64,
    cumulative: f64,
}

/// Cached zeros and companion roots of one family up to a degree budget.
#[derive(Debug, Clone)]
pub struct KernelBoundTable {
    family: PolyFamily,
    budget: usize,
    degrees: Vec<Option<DegreeData>>,
}

impl KernelBoundTable {
    pub fn new(family: &PolyFamily, budget: usize) -> Result<Self> {
        let table = family.table(budget + 1);
        let degrees = (0..=budget)
            .map(|k| {
                let z = if k == 0 {
                    family.support().0
                } else {
                    table.largest_zero(k)?
                };
                let y = match table.companion_root(k) {
                    Ok(y) => y,
                    // k = 0 has no root for the projective families
                    Err(Error::BracketFailure { .. }) if k == 0 => return Ok(None),
                    Err(e) => return Err(e),
                };
                let p = table.eval_upto(k + 1, y);
                let s1 = (0..=k).map(|i| table.dimension(i) * p[i]).sum();
                let s2 = (0..=k).map(|i| table.dimension(i) * p[i] * p[i]).sum();
                Ok(Some(DegreeData {
                    z,
                    y,
                    p_k: p[k],
                    p_k1: p[k + 1],
                    dim: table.dimension(k),
                    a: table.coeffs(k).a,
                    s1,
                    s2,
                    cumulative: table.cumulative_dimension(k),
                }))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            family: *family,
            budget,
            degrees,
        })
    }

    pub fn family(&self) -> &PolyFamily {
        &self.family
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    fn data(&self, k: usize) -> Result<&DegreeData> {
        self.degrees
            .get(k)
            .and_then(Option::as_ref)
            .ok_or_else(|| inapplicable("cd-exact", format!("degree {k} is unavailable within budget {}", self.budget)))
    }

    /// Whether `m t <= Σ z_{k_t}`.
    pub fn is_feasible(&self, k: &[usize], t: f64) -> bool {
        let zs: Option<f64> = k
            .iter()
            .map(|&kt| self.degrees.get(kt).and_then(Option::as_ref).map(|d| d.z))
            .sum();
        zs.is_some_and(|s| s >= k.len() as f64 * t - FEASIBILITY_SLACK)
    }

    pub fn witness(&self, k: &[usize]) -> Result<Witness> {
        let y: Vec<f64> = k.iter().map(|&kt| self.data(kt).map(|d| d.y)).collect::<Result<_>>()?;
        let sigma_y = y.iter().sum();
        Ok(Witness {
            multi_index: k.to_vec(),
            y,
            sigma_y,
        })
    }

    /// The tighter kernel bound at multi-index `k`, valid for `t <= σ(y)/m`.
    pub fn exact_value(&self, k: &[usize]) -> Result<f64> {
        let ds: Vec<&DegreeData> = k.iter().map(|&kt| self.data(kt)).collect::<Result<_>>()?;
        let m = ds.len() as f64;
        let sigma: f64 = ds.iter().map(|d| d.y).sum();
        // numerator (Π S1)² (Σ A_t/S1_t)², denominator (m - σ) Π S2 Σ B_t/S2_t,
        // with the products kept in log space
        let log_ratio: f64 = ds.iter().map(|d| 2.0 * d.s1.ln() - d.s2.ln()).sum();
        let sum_a: f64 = ds.iter().map(|d| d.dim * d.a * (d.p_k - d.p_k1) / d.s1).sum();
        let sum_b: f64 = ds.iter().map(|d| -d.dim * d.a * d.p_k * d.p_k1 / d.s2).sum();
        Ok(log_ratio.exp() * sum_a * sum_a / ((m - sigma) * sum_b))
    }

    /// `4 (Σ a_{k_t}) Π D_{k_t} / (m - σ(y))`; never below [`Self::exact_value`].
    pub fn closed_value(&self, k: &[usize]) -> Result<f64> {
        let ds: Vec<&DegreeData> = k.iter().map(|&kt| self.data(kt)).collect::<Result<_>>()?;
        let m = ds.len() as f64;
        let sigma: f64 = ds.iter().map(|d| d.y).sum();
        let sum_a: f64 = ds.iter().map(|d| d.a).sum();
        let log_d: f64 = ds.iter().map(|d| d.cumulative.ln()).sum();
        Ok(4.0 * sum_a * log_d.exp() / (m - sigma))
    }

    /// Sign conditions the kernel bounds need at `y`: `P_i(y_t) >= 0`
    /// for `i <= k_t` and `P_{k_t+1}(y_t) <= 0`.
    pub fn sign_conditions_hold(&self, k: &[usize]) -> Result<bool> {
        let table = self.family.table(self.budget + 1);
        for &kt in k {
            let d = self.data(kt)?;
            let p = table.eval_upto(kt + 1, d.y);
            if p[..=kt].iter().any(|&v| v < 0.0) || p[kt + 1] > 0.0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn lowest_degree(&self) -> usize {
        usize::from(self.degrees[0].is_none())
    }

    /// Feasible multi-index minimizing the exact kernel bound among the
    /// equal-entry indices and a ±1 coordinate-descent neighbourhood of the
    /// best of them. Ties go to the lexicographically smallest index.
    pub fn select(&self, m: usize, t: f64) -> Result<(Vec<usize>, f64)> {
        if m == 0 {
            return Err(Error::InvalidSpace("product needs m >= 1".into()));
        }
        let (lo, hi) = self.family.support();
        if !(lo..=hi).contains(&t) {
            return Err(Error::OutOfRange {
                what: "t",
                value: t,
                lo,
                hi,
            });
        }
        let score = |k: &[usize]| -> Option<f64> {
            if !self.is_feasible(k, t) {
                return None;
            }
            let w = self.witness(k).ok()?;
            if w.sigma_y < m as f64 * t {
                return None;
            }
            self.exact_value(k).ok().filter(|v| v.is_finite() && *v > 0.0)
        };
        let better = |a: (&[usize], f64), b: (&[usize], f64)| a.1 < b.1 || (a.1 == b.1 && a.0 < b.0);

        let mut best: Option<(Vec<usize>, f64)> = None;
        for kk in self.lowest_degree()..=self.budget {
            let k = vec![kk; m];
            if let Some(v) = score(&k) {
                if best.as_ref().is_none_or(|b| better((&k, v), (&b.0, b.1))) {
                    best = Some((k, v));
                }
            }
        }
        let Some(mut cur) = best else {
            return Err(Error::Infeasible { t, budget: self.budget });
        };
        if m > 1 {
            for _ in 0..self.budget {
                let mut step: Option<(Vec<usize>, f64)> = None;
                for i in 0..m {
                    for delta in [-1i64, 1] {
                        let ki = cur.0[i] as i64 + delta;
                        if ki < self.lowest_degree() as i64 || ki > self.budget as i64 {
                            continue;
                        }
                        let mut k = cur.0.clone();
                        k[i] = ki as usize;
                        if let Some(v) = score(&k) {
                            if step.as_ref().is_none_or(|s| better((&k, v), (&s.0, s.1))) {
                                step = Some((k, v));
                            }
                        }
                    }
                }
                match step {
                    Some(s) if better((&s.0, s.1), (&cur.0, cur.1)) => cur = s,
                    _ => break,
                }
            }
        }
        Ok(cur)
    }

    fn bound(&self, k: &[usize], method: Method) -> Result<BoundResult> {
        let value = match method {
            Method::CdClosed => self.closed_value(k)?,
            _ => self.exact_value(k)?,
        };
        let witness = self.witness(k)?;
        let applicability = Applicability::new(
            "t",
            self.family.support().0,
            witness.sigma_y / k.len() as f64,
            true,
        );
        Ok(BoundResult {
            value,
            method,
            witness: Some(witness),
            applicability: Some(applicability),
            reduction: None,
            candidates: vec![Candidate { method, value }],
            trivial: false,
        })
    }

    /// Tighter kernel bound at the given multi-index.
    pub fn exact_bound(&self, k: &[usize]) -> Result<BoundResult> {
        self.bound(k, Method::CdExact)
    }

    /// Closed-form kernel bound at the given multi-index.
    pub fn closed_bound(&self, k: &[usize]) -> Result<BoundResult> {
        self.bound(k, Method::CdClosed)
    }
}

/// Best multi-index for the kernel bound of `X^m` at `t`.
pub fn select_multiindex(family: &PolyFamily, m: usize, t: f64, budget: usize) -> Result<Vec<usize>> {
    Ok(KernelBoundTable::new(family, budget)?.select(m, t)?.0)
}

/// Tighter kernel bound on `X^m` at `t` with the selected multi-index.
pub fn cd_bound_exact(family: &PolyFamily, m: usize, t: f64, budget: usize) -> Result<BoundResult> {
    let table = KernelBoundTable::new(family, budget)?;
    let (k, _) = table.select(m, t)?;
    table.exact_bound(&k)
}

/// Closed-form kernel bound on `X^m` at `t`, on the same multi-index as
/// [`cd_bound_exact`].
pub fn cd_bound_closed(family: &PolyFamily, m: usize, t: f64, budget: usize) -> Result<BoundResult> {
    let table = KernelBoundTable::new(family, budget)?;
    let (k, _) = table.select(m, t)?;
    table.closed_bound(&k)
}

/// Orthoplex threshold for `G_{m,n}(K)`: one more than the dimension of the
/// space the isometric spherical embedding lives in.
pub fn orthoplex_threshold(field: Field, n: usize) -> Result<f64> {
    let n = n as f64;
    match field {
        Field::R => Ok(n * (n + 1.0) / 2.0),
        Field::C => Ok(n * n),
        other => Err(Error::InvalidSpace(format!("no Grassmann embedding over {other}"))),
    }
}

/// Simplex/orthoplex bound on `G_{m,n}`: with `Δ = m(n-m)/n` and `d² > Δ`,
/// `|C| <= min(d²/(d² - Δ), threshold)`. The relation inverted is
/// `d² <= Δ |C|/(|C| - 1)` in the squared distance.
pub fn simplex_bound_grassmann(m: usize, n: usize, num_points_threshold: f64, d: f64) -> Result<BoundResult> {
    if m == 0 || m > n {
        return Err(Error::InvalidSpace(format!("need 1 <= m <= n, got m = {m}, n = {n}")));
    }
    let (mf, nf) = (m as f64, n as f64);
    if !(0.0..=mf.sqrt()).contains(&d) {
        return Err(Error::OutOfRange {
            what: "d",
            value: d,
            lo: 0.0,
            hi: mf.sqrt(),
        });
    }
    let delta = mf * (nf - mf) / nf;
    let d2 = d * d;
    if d2 <= delta {
        return Err(inapplicable("simplex", format!("needs d² > m(n-m)/n = {delta}, got d² = {d2}")));
    }
    let value = (d2 / (d2 - delta)).min(num_points_threshold);
    Ok(BoundResult::simple(
        value,
        Method::Simplex,
        Applicability::new("d", delta.sqrt(), mf.sqrt(), true),
    ))
}

fn keep_best(best: &mut Option<BoundResult>, candidates: &mut Vec<Candidate>, r: Result<BoundResult>) -> Result<()> {
    match r {
        Ok(b) => {
            candidates.push(Candidate {
                method: b.method,
                value: b.value,
            });
            if best.as_ref().is_none_or(|cur| b.value < cur.value) {
                *best = Some(b);
            }
            Ok(())
        }
        Err(Error::Inapplicable { .. } | Error::Infeasible { .. }) => Ok(()),
        Err(e) => Err(e),
    }
}

/// Best bound on a product of spheres or projective spaces at product angle `t`.
fn best_product_bound(kind: AngleKind, family: &PolyFamily, n: usize, m: usize, t: f64, budget: usize) -> Result<(Option<BoundResult>, Vec<Candidate>)> {
    let mut best = None;
    let mut candidates = Vec::new();
    match kind {
        AngleKind::Sphere => {
            keep_best(&mut best, &mut candidates, deg1_sphere_product(m, t))?;
            keep_best(&mut best, &mut candidates, deg2_sphere_product(m, n, t))?;
        }
        AngleKind::Projective => {
            keep_best(&mut best, &mut candidates, deg1_projective_product(n, t))?;
        }
    }
    if t < 1.0 {
        let table = KernelBoundTable::new(family, budget)?;
        let exact = table.select(m, t).and_then(|(k, _)| table.exact_bound(&k));
        keep_best(&mut best, &mut candidates, exact)?;
    }
    Ok((best, candidates))
}

/// Best bound for a code with minimum distance `d` in `space`.
///
/// Grassmann codes: the minimum of the simplex bound and the bounds on
/// `P^{n-1}(K)^m` at `cos² θ = 1 - d²/m`. Stiefel codes: the bounds on
/// `(S^{cn-1})^m` at `cos θ = 1 - d²/(2m)`. Products: the minimum over the
/// degree bounds and the kernel bound. `d = 0`, or no applicable method,
/// gives `+∞` with `trivial` set.
pub fn best_finite_bound(space: &Space, d: f64, budget: usize) -> Result<BoundResult> {
    let angle = space.distance_to_angle(d)?;
    best_bound_with(space, angle.t, Some(d), budget)
}

/// As [`best_finite_bound`], with the product-angle variable `t` given directly.
pub fn best_bound_at_t(space: &Space, t: f64, budget: usize) -> Result<BoundResult> {
    let red = space.product_reduction()?;
    let (lo, hi) = red.kind.t_range();
    if !(lo..=hi).contains(&t) {
        return Err(Error::OutOfRange {
            what: "t",
            value: t,
            lo,
            hi,
        });
    }
    best_bound_with(space, t, None, budget)
}

fn best_bound_with(space: &Space, t: f64, d: Option<f64>, budget: usize) -> Result<BoundResult> {
    let red = space.product_reduction()?;
    let d = d.unwrap_or_else(|| space.angle_to_distance(&crate::spaces::AngleSpec::from_t(t, red.kind).expect("t checked")));
    if d == 0.0 || t >= 1.0 {
        return Ok(BoundResult::trivial());
    }
    let (mut best, mut candidates) = best_product_bound(red.kind, &red.family, red.n, red.m, t, budget)?;
    if let Space::Grassmann { field, m, n } = *space {
        let threshold = orthoplex_threshold(field, n)?;
        keep_best(&mut best, &mut candidates, simplex_bound_grassmann(m, n, threshold, d))?;
    }
    let Some(mut out) = best else {
        return Ok(BoundResult::trivial());
    };
    if matches!(space, Space::Grassmann { .. } | Space::Stiefel { .. }) && out.method != Method::Simplex {
        let to = match red.kind {
            AngleKind::Sphere => Space::ProductSphere { n: red.n, m: red.m },
            AngleKind::Projective => Space::ProductProjective {
                field: red.field,
                n: red.n,
                m: red.m,
            },
        };
        out.reduction = Some(ReductionInfo {
            from: space.to_string(),
            to: to.to_string(),
            t,
        });
    }
    out.candidates = candidates;
    Ok(out)
}
