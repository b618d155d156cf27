//! Gauss rules for the normalized zonal measures.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{PolyFamily, RecurrenceCoeffs};
use crate::error::{Error, Result};

/// Nodes and positive weights integrating polynomials up to `exact_degree`
/// exactly against the family's normalized measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub exact_degree: usize,
}

impl QuadratureRule {
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Symmetric tridiagonal matrix of the orthonormal recurrence, truncated to `size`.
pub(super) fn jacobi_matrix(coeffs: &[RecurrenceCoeffs], size: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(size, size);
    for i in 0..size {
        j[(i, i)] = coeffs[i].b;
        if i + 1 < size {
            let off = (coeffs[i].a * coeffs[i + 1].c).sqrt();
            j[(i, i + 1)] = off;
            j[(i + 1, i)] = off;
        }
    }
    j
}

/// Orthonormal polynomial values `p̂_0(x) ..= p̂_{len-1}(x)`.
fn orthonormal_values(coeffs: &[RecurrenceCoeffs], x: f64, len: usize) -> Vec<f64> {
    let mut p = vec![0.0; len];
    p[0] = 1.0;
    if len > 1 {
        let s0 = (coeffs[0].a * coeffs[1].c).sqrt();
        p[1] = (x - coeffs[0].b) / s0;
    }
    for k in 1..len.saturating_sub(1) {
        let s_prev = (coeffs[k - 1].a * coeffs[k].c).sqrt();
        let s = (coeffs[k].a * coeffs[k + 1].c).sqrt();
        p[k + 1] = ((x - coeffs[k].b) * p[k] - s_prev * p[k - 1]) / s;
    }
    p
}

impl PolyFamily {
    /// Gauss rule with `num_nodes` nodes, exact to degree `2 num_nodes - 1`.
    ///
    /// Nodes are the eigenvalues of the truncated recurrence matrix. Weights
    /// come from the Christoffel function `1 / Σ_j p̂_j(x)²` rather than
    /// eigenvector components, which keeps tiny endpoint weights accurate
    /// in relative terms. The weight function itself is never sampled, so
    /// singular weights such as `x^{-1/2}` are handled.
    pub fn gauss_rule(&self, num_nodes: usize) -> Result<QuadratureRule> {
        if num_nodes == 0 {
            return Err(Error::QuadratureDegree { have: 0, need: 1 });
        }
        let coeffs = self.recurrence_table(num_nodes);
        let eig = SymmetricEigen::new(jacobi_matrix(&coeffs, num_nodes));
        let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        nodes.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        let weights = nodes
            .iter()
            .map(|&x| {
                let p = orthonormal_values(&coeffs, x, num_nodes);
                1.0 / p.iter().map(|v| v * v).sum::<f64>()
            })
            .collect();
        Ok(QuadratureRule {
            nodes,
            weights,
            exact_degree: 2 * num_nodes - 1,
        })
    }

    /// `[P_k, P_k]` under the normalized measure, by a Gauss rule with
    /// `k + 1` nodes.
    pub fn squared_norm(&self, k: usize) -> Result<f64> {
        let rule = self.gauss_rule(k + 1)?;
        self.squared_norm_with(&rule, k)
    }

    pub fn squared_norm_with(&self, rule: &QuadratureRule, k: usize) -> Result<f64> {
        if rule.exact_degree < 2 * k {
            return Err(Error::QuadratureDegree {
                have: rule.exact_degree,
                need: 2 * k,
            });
        }
        let table = self.table(k);
        let value = rule.integrate(|x| table.eval(k, x).powi(2));
        let dim = 1.0 / value;
        if (dim - dim.round()).abs() > 1e-4 * dim.max(1.0) {
            log::warn!("{self:?}: 1/[P_{k},P_{k}] = {dim} is not close to an integer");
        }
        Ok(value)
    }
}

pub fn squared_norm(family: &PolyFamily, k: usize) -> Result<f64> {
    family.squared_norm(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthopoly::harmonic_dimension;
    use crate::spaces::Field;

    fn grid() -> Vec<PolyFamily> {
        let mut v: Vec<PolyFamily> = (2..=10).map(|n| PolyFamily::gegenbauer(n).unwrap()).collect();
        for n in 3..=8 {
            for f in [Field::R, Field::C, Field::H] {
                v.push(PolyFamily::projective(f, n).unwrap());
            }
        }
        v
    }

    #[test]
    fn weights_positive_total_mass_one() {
        for fam in grid() {
            let rule = fam.gauss_rule(12).unwrap();
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            let total: f64 = rule.weights.iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "{fam:?}: {total}");
            let (lo, hi) = fam.support();
            assert!(rule.nodes.iter().all(|&x| x > lo && x < hi));
        }
    }

    #[test]
    fn moments_match_closed_forms() {
        // Beta-distribution moments for the Jacobi measure on [0, 1]:
        // E[x^j] = Π_{i<j} (beta + 1 + i) / (alpha + beta + 2 + i)
        for fam in grid() {
            let rule = fam.gauss_rule(8).unwrap();
            for j in 0..=rule.exact_degree {
                let got = rule.integrate(|x| x.powi(j as i32));
                let expect = match fam {
                    PolyFamily::Jacobi { alpha, beta } => (0..j)
                        .map(|i| (beta + 1.0 + i as f64) / (alpha + beta + 2.0 + i as f64))
                        .product::<f64>(),
                    PolyFamily::Gegenbauer { n } => {
                        // E[x^{2i}] = Π_{l<i} (2l+1)/(n+2l)
                        if j % 2 == 1 {
                            0.0
                        } else {
                            (0..j / 2)
                                .map(|l| (2 * l + 1) as f64 / (n + 2 * l) as f64)
                                .product::<f64>()
                        }
                    }
                };
                let err = (got - expect).abs();
                let tol = if expect == 0.0 { 1e-13 } else { 1e-12 * expect.abs() };
                assert!(
                    err < tol,
                    "{fam:?} j={j}: {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn squared_norm_examples() {
        let g3 = PolyFamily::gegenbauer(3).unwrap();
        assert!((g3.squared_norm(0).unwrap() - 1.0).abs() < 1e-14);
        assert!((1.0 / g3.squared_norm(2).unwrap() - 5.0).abs() < 1e-9);
        let g4 = PolyFamily::gegenbauer(4).unwrap();
        assert!((1.0 / g4.squared_norm(1).unwrap() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn squared_norm_rejects_short_rule() {
        let fam = PolyFamily::gegenbauer(5).unwrap();
        let rule = fam.gauss_rule(3).unwrap();
        assert!(matches!(
            fam.squared_norm_with(&rule, 4),
            Err(Error::QuadratureDegree { have: 5, need: 8 })
        ));
    }

    #[test]
    fn quadrature_dimensions_agree_with_recurrence_and_binomials() {
        for fam in grid() {
            let table = fam.table(10);
            for k in 0..=10 {
                let d_quad = 1.0 / fam.squared_norm(k).unwrap();
                let d_rec = table.dimension(k);
                assert!((d_quad - d_rec).abs() < 1e-9 * d_rec, "{fam:?} k={k}");
                assert!((d_quad - d_quad.round()).abs() < 1e-6 * d_quad);
                if let PolyFamily::Gegenbauer { n } = fam {
                    assert_eq!(d_quad.round() as u128, harmonic_dimension(n, k).unwrap());
                }
            }
        }
    }
}
