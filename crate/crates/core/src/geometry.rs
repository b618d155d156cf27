//! Concrete points of Grassmann, Stiefel and product spaces, the overlap
//! `σ(p, q)`, principal angles, the embeddings into spheres and products of
//! projective spaces, and a greedy code sampler.
//!
//! Vectors over `C` and `H` are stored realified: `x + iy` becomes `(x, y)`
//! and a quaternion `a + bi + cj + dk` becomes `(a, b, c, d)`. The real
//! scalar product is then the real part of the Hermitian one.

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orthopoly::RecurrenceTable;
use crate::spaces::{AngleKind, Field, Space};

pub type Complex64 = Complex<f64>;

/// Tolerance on `X X* = Id` for accepted points.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// Deterministic generator for stream `stream` of seed `seed`. Distinct
/// streams are independent, so parallel tasks can each take their own.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, field: Field) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| match field {
        Field::R => Complex64::new(gaussian(rng), 0.0),
        _ => Complex64::new(gaussian(rng), gaussian(rng)),
    })
}

/// Haar-distributed `m × n` matrix with orthonormal rows: QR of a Gaussian
/// `n × m` matrix with the phases of `R`'s diagonal moved into `Q`.
fn random_orthonormal_rows<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    n: usize,
    field: Field,
) -> DMatrix<Complex64> {
    loop {
        let g = gaussian_matrix(rng, n, m, field);
        let qr = g.qr();
        let r = qr.r();
        if (0..m).any(|i| r[(i, i)].norm() < 1e-8) {
            log::debug!("degenerate Gaussian draw, resampling");
            continue;
        }
        let mut q = qr.q();
        for j in 0..m {
            let phase = r[(j, j)] / r[(j, j)].norm();
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
        return q.adjoint();
    }
}

fn check_field(field: Field) -> Result<()> {
    match field {
        Field::R | Field::C => Ok(()),
        other => Err(Error::InvalidSpace(format!(
            "matrix points need field R or C, got {other}"
        ))),
    }
}

fn orthonormality_defect(a: &DMatrix<Complex64>) -> f64 {
    let g = a * a.adjoint();
    let id = DMatrix::<Complex64>::identity(a.nrows(), a.nrows());
    (g - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn realify_rows(a: &DMatrix<Complex64>, field: Field) -> Vec<Vec<f64>> {
    (0..a.nrows())
        .map(|i| {
            let mut row = Vec::with_capacity(2 * a.ncols());
            for j in 0..a.ncols() {
                row.push(a[(i, j)].re);
                if field == Field::C {
                    row.push(a[(i, j)].im);
                }
            }
            row
        })
        .collect()
}

fn unrealify_rows(rows: &[Vec<f64>], field: Field, n: usize) -> Result<DMatrix<Complex64>> {
    let c = field.degree() as usize;
    if rows.iter().any(|r| r.len() != c * n) {
        return Err(Error::ShapeMismatch(format!(
            "every row must hold {} reals for n = {n} over {field}",
            c * n
        )));
    }
    Ok(DMatrix::from_fn(rows.len(), n, |i, j| match field {
        Field::R => Complex64::new(rows[i][j], 0.0),
        _ => Complex64::new(rows[i][2 * j], rows[i][2 * j + 1]),
    }))
}

/// Serialized form of matrix points: realified rows, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub field: Field,
    pub m: usize,
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
}

/// An `m`-plane in `K^n`, given by a basis with orthonormal rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "MatrixRecord", try_from = "MatrixRecord")]
pub struct GrassmannPoint {
    field: Field,
    basis: DMatrix<Complex64>,
}

/// An orthonormal `m`-frame in `K^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "MatrixRecord", try_from = "MatrixRecord")]
pub struct StiefelPoint {
    field: Field,
    frame: DMatrix<Complex64>,
}

fn validated(field: Field, a: DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    check_field(field)?;
    if a.nrows() == 0 || a.nrows() > a.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "need 1 <= m <= n, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if field == Field::R && a.iter().any(|z| z.im != 0.0) {
        return Err(Error::ShapeMismatch("real point with complex entries".into()));
    }
    let defect = orthonormality_defect(&a);
    if defect > ORTHONORMAL_TOL {
        return Err(Error::ShapeMismatch(format!(
            "rows are not orthonormal (defect {defect:e})"
        )));
    }
    Ok(a)
}

impl GrassmannPoint {
    pub fn from_basis(field: Field, basis: DMatrix<Complex64>) -> Result<Self> {
        Ok(Self {
            field,
            basis: validated(field, basis)?,
        })
    }

    pub fn random<R: Rng + ?Sized>(m: usize, n: usize, field: Field, rng: &mut R) -> Result<Self> {
        check_field(field)?;
        if m == 0 || m > n {
            return Err(Error::InvalidSpace(format!("need 1 <= m <= n, got m = {m}, n = {n}")));
        }
        Ok(Self {
            field,
            basis: random_orthonormal_rows(rng, m, n, field),
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn m(&self) -> usize {
        self.basis.nrows()
    }

    pub fn n(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<Complex64> {
        &self.basis
    }

    /// Same plane with the basis multiplied by a random `m × m` orthogonal
    /// (or unitary) matrix.
    pub fn rebased<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        let u = random_orthonormal_rows(rng, self.m(), self.m(), self.field);
        Self {
            field: self.field,
            basis: u * &self.basis,
        }
    }

    /// Projection matrix `A* A` onto the plane.
    pub fn projector(&self) -> DMatrix<Complex64> {
        self.basis.adjoint() * &self.basis
    }
}

impl StiefelPoint {
    pub fn from_frame(field: Field, frame: DMatrix<Complex64>) -> Result<Self> {
        Ok(Self {
            field,
            frame: validated(field, frame)?,
        })
    }

    pub fn random<R: Rng + ?Sized>(m: usize, n: usize, field: Field, rng: &mut R) -> Result<Self> {
        let p = GrassmannPoint::random(m, n, field, rng)?;
        Ok(Self {
            field,
            frame: p.basis,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn m(&self) -> usize {
        self.frame.nrows()
    }

    pub fn n(&self) -> usize {
        self.frame.ncols()
    }

    pub fn frame(&self) -> &DMatrix<Complex64> {
        &self.frame
    }

    /// The plane spanned by the frame.
    pub fn span(&self) -> GrassmannPoint {
        GrassmannPoint {
            field: self.field,
            basis: self.frame.clone(),
        }
    }
}

macro_rules! matrix_record_impls {
    ($ty:ident, $field:ident) => {
        impl From<$ty> for MatrixRecord {
            fn from(p: $ty) -> Self {
                MatrixRecord {
                    field: p.field,
                    m: p.$field.nrows(),
                    n: p.$field.ncols(),
                    rows: realify_rows(&p.$field, p.field),
                }
            }
        }

        impl TryFrom<MatrixRecord> for $ty {
            type Error = Error;

            fn try_from(r: MatrixRecord) -> Result<Self> {
                if r.rows.len() != r.m {
                    return Err(Error::ShapeMismatch(format!(
                        "expected {} rows, found {}",
                        r.m,
                        r.rows.len()
                    )));
                }
                check_field(r.field)?;
                let a = unrealify_rows(&r.rows, r.field, r.n)?;
                Ok($ty {
                    field: r.field,
                    $field: validated(r.field, a)?,
                })
            }
        }
    };
}

matrix_record_impls!(GrassmannPoint, basis);
matrix_record_impls!(StiefelPoint, frame);

fn same_shape(a: &DMatrix<Complex64>, fa: Field, b: &DMatrix<Complex64>, fb: Field) -> Result<()> {
    if fa != fb || a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} over {fa} vs {}x{} over {fb}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(())
}

/// `σ(p, q) = Σ_{i,j} |e_i · e'_j|² = trace(π_p π_q)`.
pub fn sigma_overlap(p: &GrassmannPoint, q: &GrassmannPoint) -> Result<f64> {
    same_shape(&p.basis, p.field, &q.basis, q.field)?;
    let cross = &p.basis * q.basis.adjoint();
    Ok(cross.iter().map(|z| z.norm_sqr()).sum())
}

/// Principal angles in ascending order.
pub fn principal_angles(p: &GrassmannPoint, q: &GrassmannPoint) -> Result<Vec<f64>> {
    same_shape(&p.basis, p.field, &q.basis, q.field)?;
    let cross = &p.basis * q.basis.adjoint();
    let sv = cross.singular_values();
    let mut angles: Vec<f64> = sv
        .iter()
        .map(|&s| {
            let c = s.clamp(0.0, 1.0);
            if (s - c).abs() > 1e-10 {
                log::warn!("singular value {s} clamped to [0, 1]");
            }
            c.acos()
        })
        .collect();
    angles.sort_by(|a, b| a.total_cmp(b));
    Ok(angles)
}

/// `d_c(p, q) = √(m - σ(p, q))`.
pub fn chordal_distance(p: &GrassmannPoint, q: &GrassmannPoint) -> Result<f64> {
    let s = sigma_overlap(p, q)?;
    Ok((p.m() as f64 - s).max(0.0).sqrt())
}

/// Frobenius distance `‖X - Y‖` between frames.
pub fn stiefel_distance(x: &StiefelPoint, y: &StiefelPoint) -> Result<f64> {
    same_shape(&x.frame, x.field, &y.frame, y.field)?;
    Ok((&x.frame - &y.frame).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
}

fn concat_rows_scaled(a: &DMatrix<Complex64>, field: Field) -> Vec<f64> {
    let scale = 1.0 / (a.nrows() as f64).sqrt();
    realify_rows(a, field)
        .into_iter()
        .flatten()
        .map(|v| v * scale)
        .collect()
}

/// Basis rows concatenated and scaled by `1/√m`: a unit vector of `R^{cmn}`.
/// Depends on the chosen basis, not only on the plane.
pub fn embed_beta(p: &GrassmannPoint) -> Vec<f64> {
    concat_rows_scaled(&p.basis, p.field)
}

/// Frame rows concatenated and scaled by `1/√m`; `‖X - Y‖ = √m ‖γ(X) - γ(Y)‖`.
pub fn embed_gamma(x: &StiefelPoint) -> Vec<f64> {
    concat_rows_scaled(&x.frame, x.field)
}

/// The basis rows of `p` as `m` pairwise orthogonal lines.
pub fn embed_nu(p: &GrassmannPoint) -> ProductPoint {
    ProductPoint {
        kind: AngleKind::Projective,
        field: p.field,
        n: p.n(),
        components: realify_rows(&p.basis, p.field),
    }
}

pub fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn quaternion_mul(p: [f64; 4], q: [f64; 4]) -> [f64; 4] {
    [
        p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
        p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2],
        p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1],
        p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0],
    ]
}

/// `|Σ_i x_i conj(y_i)|²` for realified vectors over `field`.
pub fn hermitian_modulus_sq(x: &[f64], y: &[f64], field: Field) -> Result<f64> {
    match field {
        Field::R => Ok(dot(x, y).powi(2)),
        Field::C => {
            let (mut re, mut im) = (0.0, 0.0);
            for (a, b) in x.chunks_exact(2).zip(y.chunks_exact(2)) {
                re += a[0] * b[0] + a[1] * b[1];
                im += a[1] * b[0] - a[0] * b[1];
            }
            Ok(re * re + im * im)
        }
        Field::H => {
            let mut acc = [0.0; 4];
            for (a, b) in x.chunks_exact(4).zip(y.chunks_exact(4)) {
                let conj_b = [b[0], -b[1], -b[2], -b[3]];
                let p = quaternion_mul([a[0], a[1], a[2], a[3]], conj_b);
                for (s, v) in acc.iter_mut().zip(p) {
                    *s += v;
                }
            }
            Ok(acc.iter().map(|v| v * v).sum())
        }
        Field::O => Err(Error::Inapplicable {
            method: "hermitian product",
            reason: "octonionic lines are not modelled by vectors".into(),
        }),
    }
}

/// A point of `(S^{n-1})^m` or `(P^{n-1}(K))^m`: `m` unit vectors, realified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductPoint {
    pub kind: AngleKind,
    pub field: Field,
    pub n: usize,
    pub components: Vec<Vec<f64>>,
}

impl ProductPoint {
    pub fn random<R: Rng + ?Sized>(
        kind: AngleKind,
        field: Field,
        n: usize,
        m: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if field == Field::O {
            return Err(Error::Inapplicable {
                method: "sampling",
                reason: "octonionic projective points are not supported".into(),
            });
        }
        if kind == AngleKind::Sphere && field != Field::R {
            return Err(Error::InvalidSpace("sphere products are real".into()));
        }
        let len = field.degree() as usize * n;
        let components = (0..m)
            .map(|_| loop {
                let v: Vec<f64> = (0..len).map(|_| gaussian(rng)).collect();
                let norm = dot(&v, &v).sqrt();
                if norm > 1e-8 {
                    break v.into_iter().map(|x| x / norm).collect();
                }
            })
            .collect();
        Ok(Self {
            kind,
            field,
            n,
            components,
        })
    }

    pub fn m(&self) -> usize {
        self.components.len()
    }

    /// Per-component `t`: `cos θ_i` on spheres, `cos² θ_i` on projective spaces.
    pub fn component_t(&self, other: &Self) -> Result<Vec<f64>> {
        if self.kind != other.kind
            || self.field != other.field
            || self.n != other.n
            || self.m() != other.m()
        {
            return Err(Error::ShapeMismatch("product points of different spaces".into()));
        }
        self.components
            .iter()
            .zip(&other.components)
            .map(|(u, v)| match self.kind {
                AngleKind::Sphere => Ok(dot(u, v).clamp(-1.0, 1.0)),
                AngleKind::Projective => Ok(hermitian_modulus_sq(u, v, self.field)?.min(1.0)),
            })
            .collect()
    }

    /// `t` of the product angle: the mean of the component values.
    pub fn product_t(&self, other: &Self) -> Result<f64> {
        let ts = self.component_t(other)?;
        Ok(ts.iter().sum::<f64>() / ts.len() as f64)
    }

    /// Distance in the product metric: `√(Σ|u_i - v_i|²)` on spheres,
    /// `√(Σ sin² θ_i)` on projective spaces.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        let m = self.m() as f64;
        let t = self.product_t(other)?;
        Ok(match self.kind {
            AngleKind::Sphere => (2.0 * m * (1.0 - t)).max(0.0).sqrt(),
            AngleKind::Projective => (m * (1.0 - t)).max(0.0).sqrt(),
        })
    }
}

/// A point of any supported space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Point {
    Product(ProductPoint),
    Grassmann(GrassmannPoint),
    Stiefel(StiefelPoint),
}

impl Point {
    pub fn random<R: Rng + ?Sized>(space: &Space, rng: &mut R) -> Result<Self> {
        space.validate()?;
        Ok(match *space {
            Space::Sphere { n } => Point::Product(ProductPoint::random(AngleKind::Sphere, Field::R, n, 1, rng)?),
            Space::ProductSphere { n, m } => {
                Point::Product(ProductPoint::random(AngleKind::Sphere, Field::R, n, m, rng)?)
            }
            Space::Projective { field, n } => {
                Point::Product(ProductPoint::random(AngleKind::Projective, field, n, 1, rng)?)
            }
            Space::ProductProjective { field, n, m } => {
                Point::Product(ProductPoint::random(AngleKind::Projective, field, n, m, rng)?)
            }
            Space::Grassmann { field, m, n } => Point::Grassmann(GrassmannPoint::random(m, n, field, rng)?),
            Space::Stiefel { field, m, n } => Point::Stiefel(StiefelPoint::random(m, n, field, rng)?),
        })
    }

    /// Distance in the space's own metric.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        match (self, other) {
            (Point::Product(a), Point::Product(b)) => a.distance(b),
            (Point::Grassmann(a), Point::Grassmann(b)) => chordal_distance(a, b),
            (Point::Stiefel(a), Point::Stiefel(b)) => stiefel_distance(a, b),
            _ => Err(Error::ShapeMismatch("points of different spaces".into())),
        }
    }
}

/// Greedy code with uniform proposals: a sample is kept when it is at
/// distance at least `min_distance` from everything kept so far.
pub fn greedy_code(space: &Space, min_distance: f64, max_iters: usize, seed: u64) -> Result<Vec<Point>> {
    let mut rng = seeded_rng(seed, 0);
    let mut code: Vec<Point> = Vec::new();
    for _ in 0..max_iters {
        let cand = Point::random(space, &mut rng)?;
        let mut ok = true;
        for p in &code {
            if p.distance(&cand)? < min_distance {
                ok = false;
                break;
            }
        }
        if ok {
            code.push(cand);
        }
    }
    debug_assert!(minimum_distance(&code).is_none_or(|d| d >= min_distance));
    Ok(code)
}

/// Smallest pairwise distance, `None` for fewer than two points.
pub fn minimum_distance(code: &[Point]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for i in 0..code.len() {
        for j in i + 1..code.len() {
            let d = code[i].distance(&code[j]).ok()?;
            best = Some(best.map_or(d, |b: f64| b.min(d)));
        }
    }
    best
}

/// `Σ_{u,v ∈ code} Π_i P_{k_i}(t(u_i, v_i))`, nonnegative for every code.
pub fn positivity_sum(code: &[ProductPoint], table: &RecurrenceTable, multi_index: &[usize]) -> Result<f64> {
    let mut total = 0.0;
    for u in code {
        for v in code {
            let ts = u.component_t(v)?;
            if ts.len() != multi_index.len() {
                return Err(Error::ShapeMismatch(format!(
                    "multi-index of length {} for m = {}",
                    multi_index.len(),
                    ts.len()
                )));
            }
            total += ts
                .iter()
                .zip(multi_index)
                .map(|(&t, &k)| table.eval(k, t))
                .product::<f64>();
        }
    }
    Ok(total)
}

/// Worst excess over the two embedding inequalities on random pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingCheck {
    pub pairs: usize,
    /// `max (cos θ(β(p), β(q)) - √(σ/m))`
    pub beta_excess: f64,
    /// `max (cos² θ(ν(p), ν(q)) - σ/m)`
    pub nu_excess: f64,
    pub violations: usize,
}

/// Samples `pairs` random pairs of `G_{m,n}(K)` and measures how far
/// `cos θ(β(p), β(q)) ≤ √(σ/m)` and `cos² θ(ν(p), ν(q)) ≤ σ/m` are from
/// failing. Pair `i` uses stream `i` of `seed`.
pub fn check_embedding_inequalities(
    m: usize,
    n: usize,
    field: Field,
    pairs: usize,
    seed: u64,
    slack: f64,
) -> Result<EmbeddingCheck> {
    let per_pair: Vec<(f64, f64)> = (0..pairs)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded_rng(seed, i as u64);
            let p = GrassmannPoint::random(m, n, field, &mut rng)?;
            let q = GrassmannPoint::random(m, n, field, &mut rng)?;
            let ratio = sigma_overlap(&p, &q)? / m as f64;
            let cos_beta = dot(&embed_beta(&p), &embed_beta(&q));
            let t_nu = embed_nu(&p).product_t(&embed_nu(&q))?;
            Ok((cos_beta - ratio.sqrt(), t_nu - ratio))
        })
        .collect::<Result<_>>()?;
    let mut out = EmbeddingCheck {
        pairs,
        beta_excess: f64::NEG_INFINITY,
        nu_excess: f64::NEG_INFINITY,
        violations: 0,
    };
    for (b, v) in per_pair {
        out.beta_excess = out.beta_excess.max(b);
        out.nu_excess = out.nu_excess.max(v);
        if b > slack || v > slack {
            out.violations += 1;
        }
    }
    Ok(out)
}
