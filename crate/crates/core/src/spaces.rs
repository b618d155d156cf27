//! Space descriptors and the angle conversions that reduce Grassmann and
//! Stiefel codes to codes in products of projective spaces and spheres.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orthopoly::PolyFamily;

/// Grammar accepted by [`Space::from_str`], quoted in parse diagnostics.
pub const SPACE_GRAMMAR: &str = "sphere:<n> | proj:<F>:<n> | prod-sphere:<n>:<m> | \
prod-proj:<F>:<n>:<m> | grassmann:<F>:<m>:<n> | stiefel:<F>:<m>:<n>, F in {R,C,H,O}";

/// Division algebra of coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    R,
    C,
    H,
    O,
}

impl Field {
    /// Real dimension `c = [K:R]`.
    pub fn degree(self) -> u32 {
        match self {
            Field::R => 1,
            Field::C => 2,
            Field::H => 4,
            Field::O => 8,
        }
    }
}

pub fn field_degree(field: Field) -> u32 {
    field.degree()
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Field::R => "R",
            Field::C => "C",
            Field::H => "H",
            Field::O => "O",
        };
        f.write_str(s)
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "R" => Ok(Field::R),
            "C" => Ok(Field::C),
            "H" => Ok(Field::H),
            "O" => Ok(Field::O),
            other => Err(Error::Parse(format!(
                "unknown field `{other}` (expected R, C, H or O)"
            ))),
        }
    }
}

/// Which cosine variable a space uses: `t = cos θ` for sphere-type spaces,
/// `t = cos² θ` for projective-type spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleKind {
    Sphere,
    Projective,
}

impl AngleKind {
    pub fn max_theta(self) -> f64 {
        match self {
            AngleKind::Sphere => std::f64::consts::PI,
            AngleKind::Projective => FRAC_PI_2,
        }
    }

    pub fn t_range(self) -> (f64, f64) {
        match self {
            AngleKind::Sphere => (-1.0, 1.0),
            AngleKind::Projective => (0.0, 1.0),
        }
    }
}

/// An angular distance. `t` is authoritative; `theta` is derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleSpec {
    pub theta: f64,
    pub t: f64,
    pub kind: AngleKind,
}

impl AngleSpec {
    pub fn from_t(t: f64, kind: AngleKind) -> Result<Self> {
        let (lo, hi) = kind.t_range();
        if !(lo..=hi).contains(&t) {
            return Err(Error::OutOfRange {
                what: "t",
                value: t,
                lo,
                hi,
            });
        }
        let theta = match kind {
            AngleKind::Sphere => t.acos(),
            AngleKind::Projective => t.sqrt().acos(),
        };
        Ok(Self { theta, t, kind })
    }

    pub fn from_theta(theta: f64, kind: AngleKind) -> Result<Self> {
        let hi = kind.max_theta();
        if !(0.0..=hi).contains(&theta) {
            return Err(Error::OutOfRange {
                what: "theta",
                value: theta,
                lo: 0.0,
                hi,
            });
        }
        let c = theta.cos();
        let t = match kind {
            AngleKind::Sphere => c,
            AngleKind::Projective => (c * c).min(1.0),
        };
        Ok(Self { theta, t, kind })
    }
}

fn check_distance(d: f64, hi: f64) -> Result<()> {
    // the upper end is accepted inclusively; beyond it fails
    if !(0.0..=hi).contains(&d) || d.is_nan() {
        return Err(Error::OutOfRange {
            what: "d",
            value: d,
            lo: 0.0,
            hi,
        });
    }
    Ok(())
}

// `d = √m` squares back to `m` only up to rounding
fn snap_zero(t: f64) -> f64 {
    if t.abs() < 8.0 * f64::EPSILON {
        0.0
    } else {
        t
    }
}

/// Chordal distance on `G_{m,n}` to the product angle on `P^{n-1}(K)^m`:
/// `cos² θ = 1 - d²/m`.
pub fn grassmann_to_product_angle(d: f64, m: usize) -> Result<AngleSpec> {
    let mf = m as f64;
    check_distance(d, mf.sqrt())?;
    let t = snap_zero((1.0 - d * d / mf).clamp(0.0, 1.0));
    AngleSpec::from_t(t, AngleKind::Projective)
}

/// Euclidean distance on `V_{m,n}` to the product angle on `(S^{cn-1})^m`:
/// `cos θ = 1 - d²/(2m)`.
pub fn stiefel_to_product_angle(d: f64, m: usize) -> Result<AngleSpec> {
    let mf = m as f64;
    check_distance(d, 2.0 * mf.sqrt())?;
    let t = snap_zero((1.0 - d * d / (2.0 * mf)).clamp(-1.0, 1.0));
    AngleSpec::from_t(t, AngleKind::Sphere)
}

/// Angular distance of a product pair from its component angles.
pub fn product_angle_from_components(thetas: &[f64], kind: AngleKind) -> Result<AngleSpec> {
    if thetas.is_empty() {
        return Err(Error::ShapeMismatch("no component angles".into()));
    }
    let hi = kind.max_theta();
    for &th in thetas {
        if !(0.0..=hi).contains(&th) {
            return Err(Error::OutOfRange {
                what: "component theta",
                value: th,
                lo: 0.0,
                hi,
            });
        }
    }
    let m = thetas.len() as f64;
    let t = match kind {
        AngleKind::Sphere => thetas.iter().map(|th| th.cos()).sum::<f64>() / m,
        AngleKind::Projective => thetas.iter().map(|th| th.cos().powi(2)).sum::<f64>() / m,
    };
    let (lo, hi) = kind.t_range();
    AngleSpec::from_t(t.clamp(lo, hi), kind)
}

/// Product-space distance for a given product angle: `√m sin θ` on
/// projective products, `√(2m)·√(1 - cos θ)` on sphere products.
pub fn chordal_from_product_angle(angle: &AngleSpec, m: usize) -> f64 {
    let mf = m as f64;
    match angle.kind {
        AngleKind::Projective => (mf * (1.0 - angle.t)).max(0.0).sqrt(),
        AngleKind::Sphere => (2.0 * mf * (1.0 - angle.t)).max(0.0).sqrt(),
    }
}

/// A space in which codes live.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Space {
    /// `S^{n-1}` in `R^n`.
    Sphere { n: usize },
    /// `P^{n-1}(K)`.
    Projective { field: Field, n: usize },
    /// `(S^{n-1})^m`.
    ProductSphere { n: usize, m: usize },
    /// `(P^{n-1}(K))^m`.
    ProductProjective { field: Field, n: usize, m: usize },
    /// `m`-planes in `K^n`.
    Grassmann { field: Field, m: usize, n: usize },
    /// orthonormal `m`-frames in `K^n`.
    Stiefel { field: Field, m: usize, n: usize },
}

/// The product space a code problem reduces to, with its zonal family.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductReduction {
    pub kind: AngleKind,
    pub family: PolyFamily,
    pub m: usize,
    /// Ambient dimension parameter of the factor: `n` in `S^{n-1}` or `P^{n-1}(K)`.
    pub n: usize,
    pub field: Field,
}

impl Space {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpace(msg));
        match *self {
            Space::Sphere { n } | Space::ProductSphere { n, .. } if n < 2 => {
                bad(format!("sphere needs n >= 2, got {n}"))
            }
            Space::ProductSphere { m: 0, .. } | Space::ProductProjective { m: 0, .. } => {
                bad("product needs m >= 1".into())
            }
            Space::Projective { field, n } | Space::ProductProjective { field, n, .. } => {
                if n < 2 {
                    bad(format!("projective space needs n >= 2, got {n}"))
                } else if field == Field::O && n != 3 {
                    bad("the octonionic projective space exists only for n = 3".into())
                } else {
                    Ok(())
                }
            }
            Space::Grassmann { field, m, n } | Space::Stiefel { field, m, n } => {
                if !matches!(field, Field::R | Field::C) {
                    bad(format!("Grassmann/Stiefel spaces need field R or C, got {field}"))
                } else if m == 0 || m > n {
                    bad(format!("need 1 <= m <= n, got m = {m}, n = {n}"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Number of product factors (1 for spheres and projective spaces).
    pub fn m(&self) -> usize {
        match *self {
            Space::Sphere { .. } | Space::Projective { .. } => 1,
            Space::ProductSphere { m, .. }
            | Space::ProductProjective { m, .. }
            | Space::Grassmann { m, .. }
            | Space::Stiefel { m, .. } => m,
        }
    }

    pub fn field(&self) -> Field {
        match *self {
            Space::Sphere { .. } | Space::ProductSphere { .. } => Field::R,
            Space::Projective { field, .. }
            | Space::ProductProjective { field, .. }
            | Space::Grassmann { field, .. }
            | Space::Stiefel { field, .. } => field,
        }
    }

    /// Largest possible distance in the metric the space is measured in.
    pub fn diameter(&self) -> f64 {
        let m = self.m() as f64;
        match self {
            Space::Sphere { .. } => 2.0,
            Space::Projective { .. } => 1.0,
            Space::ProductSphere { .. } | Space::Stiefel { .. } => 2.0 * m.sqrt(),
            Space::ProductProjective { .. } | Space::Grassmann { .. } => m.sqrt(),
        }
    }

    /// The product of two-point homogeneous spaces whose codes bound this
    /// space's codes (identity for products themselves).
    pub fn product_reduction(&self) -> Result<ProductReduction> {
        self.validate()?;
        let (kind, field, n, m) = match *self {
            Space::Sphere { n } => (AngleKind::Sphere, Field::R, n, 1),
            Space::ProductSphere { n, m } => (AngleKind::Sphere, Field::R, n, m),
            Space::Projective { field, n } => (AngleKind::Projective, field, n, 1),
            Space::ProductProjective { field, n, m } | Space::Grassmann { field, m, n } => {
                (AngleKind::Projective, field, n, m)
            }
            Space::Stiefel { field, m, n } => {
                (AngleKind::Sphere, Field::R, field.degree() as usize * n, m)
            }
        };
        let family = match kind {
            AngleKind::Sphere => PolyFamily::gegenbauer(n)?,
            AngleKind::Projective => PolyFamily::projective(field, n)?,
        };
        Ok(ProductReduction {
            kind,
            family,
            m,
            n,
            field,
        })
    }

    /// Product angle the space's minimum distance `d` maps to.
    pub fn distance_to_angle(&self, d: f64) -> Result<AngleSpec> {
        self.validate()?;
        match self {
            Space::Grassmann { m, .. } | Space::ProductProjective { m, .. } => {
                grassmann_to_product_angle(d, *m)
            }
            Space::Projective { .. } => grassmann_to_product_angle(d, 1),
            Space::Stiefel { m, .. } | Space::ProductSphere { m, .. } => {
                stiefel_to_product_angle(d, *m)
            }
            Space::Sphere { .. } => stiefel_to_product_angle(d, 1),
        }
    }

    /// Inverse of [`Space::distance_to_angle`].
    pub fn angle_to_distance(&self, angle: &AngleSpec) -> f64 {
        chordal_from_product_angle(angle, self.m())
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Sphere { n } => write!(f, "sphere:{n}"),
            Space::Projective { field, n } => write!(f, "proj:{field}:{n}"),
            Space::ProductSphere { n, m } => write!(f, "prod-sphere:{n}:{m}"),
            Space::ProductProjective { field, n, m } => write!(f, "prod-proj:{field}:{n}:{m}"),
            Space::Grassmann { field, m, n } => write!(f, "grassmann:{field}:{m}:{n}"),
            Space::Stiefel { field, m, n } => write!(f, "stiefel:{field}:{m}:{n}"),
        }
    }
}

impl FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::Parse(format!("malformed space `{s}`; expected {SPACE_GRAMMAR}"));
        let parts: Vec<&str> = s.split(':').collect();
        let int = |p: &str| p.parse::<usize>().map_err(|_| err());
        let field = |p: &str| p.parse::<Field>().map_err(|_| err());
        let space = match parts.as_slice() {
            ["sphere", n] => Space::Sphere { n: int(n)? },
            ["proj", k, n] => Space::Projective {
                field: field(k)?,
                n: int(n)?,
            },
            ["prod-sphere", n, m] => Space::ProductSphere {
                n: int(n)?,
                m: int(m)?,
            },
            ["prod-proj", k, n, m] => Space::ProductProjective {
                field: field(k)?,
                n: int(n)?,
                m: int(m)?,
            },
            ["grassmann", k, m, n] => Space::Grassmann {
                field: field(k)?,
                m: int(m)?,
                n: int(n)?,
            },
            ["stiefel", k, m, n] => Space::Stiefel {
                field: field(k)?,
                m: int(m)?,
                n: int(n)?,
            },
            _ => return Err(err()),
        };
        space.validate()?;
        Ok(space)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_degrees() {
        assert_eq!(field_degree(Field::R), 1);
        assert_eq!(field_degree(Field::C), 2);
        assert_eq!(field_degree(Field::H), 4);
        assert_eq!(field_degree(Field::O), 8);
    }

    #[test]
    fn grassmann_angle_examples() {
        assert_eq!(grassmann_to_product_angle(0.0, 3).unwrap().theta, 0.0);
        // acos is ill-conditioned at the ends: one ulp in d moves θ by ~1e-8
        let a = grassmann_to_product_angle(3f64.sqrt(), 3).unwrap();
        assert!(a.t.abs() < 1e-15);
        assert!((a.theta - FRAC_PI_2).abs() < 1e-7);
        let a = grassmann_to_product_angle(1.0, 3).unwrap();
        assert!((a.theta - (2.0f64 / 3.0).sqrt().acos()).abs() < 1e-15);
        assert!((a.theta - 0.61548).abs() < 1e-5);
        assert!(grassmann_to_product_angle(1.8, 3).is_err());
        assert!(grassmann_to_product_angle(-0.1, 3).is_err());
    }

    #[test]
    fn stiefel_angle_examples() {
        let m = 3;
        assert_eq!(stiefel_to_product_angle(0.0, m).unwrap().theta, 0.0);
        let a = stiefel_to_product_angle((2.0 * m as f64).sqrt(), m).unwrap();
        assert!(a.t.abs() < 1e-15);
        assert!((a.theta - FRAC_PI_2).abs() < 1e-15);
        let a = stiefel_to_product_angle(2.0 * (m as f64).sqrt(), m).unwrap();
        assert!((a.t + 1.0).abs() < 1e-15);
        assert!((a.theta - std::f64::consts::PI).abs() < 1e-7);
        assert!(stiefel_to_product_angle(2.0 * (m as f64).sqrt() + 1e-9, m).is_err());
    }

    #[test]
    fn product_angle_examples() {
        let phi = 0.7;
        for kind in [AngleKind::Sphere, AngleKind::Projective] {
            let a = product_angle_from_components(&[phi, phi, phi], kind).unwrap();
            assert!((a.theta - phi).abs() < 1e-12);
        }
        let a = product_angle_from_components(&[0.0, std::f64::consts::PI], AngleKind::Sphere)
            .unwrap();
        assert!(a.t.abs() < 1e-15);
        assert!((a.theta - FRAC_PI_2).abs() < 1e-15);
        let a = product_angle_from_components(&[0.0, FRAC_PI_2], AngleKind::Projective).unwrap();
        assert!((a.t - 0.5).abs() < 1e-15);
        assert!((a.theta - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn chordal_examples() {
        let a = AngleSpec::from_theta(FRAC_PI_2, AngleKind::Projective).unwrap();
        assert!((chordal_from_product_angle(&a, 4) - 2.0).abs() < 1e-15);
        let a = AngleSpec::from_theta(FRAC_PI_2, AngleKind::Sphere).unwrap();
        assert!((chordal_from_product_angle(&a, 3) - 6f64.sqrt()).abs() < 1e-15);
        let a = grassmann_to_product_angle(1.0, 3).unwrap();
        assert!((chordal_from_product_angle(&a, 3) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in [
            "sphere:3",
            "proj:R:4",
            "proj:O:3",
            "prod-sphere:3:2",
            "prod-proj:C:4:2",
            "grassmann:R:2:5",
            "stiefel:C:2:6",
        ] {
            let sp: Space = s.parse().unwrap();
            assert_eq!(sp.to_string(), s);
        }
    }

    #[test]
    fn parse_rejects_bad_input() {
        for s in [
            "sphere",
            "sphere:x",
            "cube:3",
            "proj:Z:3",
            "proj:O:4",
            "grassmann:H:2:5",
            "grassmann:R:6:5",
            "stiefel:R:0:5",
            "sphere:1",
        ] {
            assert!(s.parse::<Space>().is_err(), "{s} should not parse");
        }
        let msg = "cube:3".parse::<Space>().unwrap_err().to_string();
        assert!(msg.contains("grassmann:<F>:<m>:<n>"));
    }

    #[test]
    fn reductions() {
        let r = Space::Stiefel {
            field: Field::C,
            m: 2,
            n: 3,
        }
        .product_reduction()
        .unwrap();
        assert_eq!(r.kind, AngleKind::Sphere);
        assert_eq!(r.n, 6);
        assert_eq!(r.m, 2);
        let r = Space::Grassmann {
            field: Field::C,
            m: 2,
            n: 5,
        }
        .product_reduction()
        .unwrap();
        assert_eq!(r.kind, AngleKind::Projective);
        assert_eq!(r.family, PolyFamily::projective(Field::C, 5).unwrap());
    }
}
