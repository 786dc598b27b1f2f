//! Quadrature rules on the unit interval and the reference triangle.

use crate::error::{Error, Result};

/// A rule on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Maps a rule given on `[-1, 1]` to `[0, 1]`.
    fn from_symmetric(points: &[f64], weights: &[f64]) -> Self {
        Self {
            points: points.iter().map(|t| 0.5 * (t + 1.0)).collect(),
            weights: weights.iter().map(|w| 0.5 * w).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }

    /// Integral of `g` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, g: impl Fn(f64) -> f64) -> f64 {
        let h = b - a;
        self.iter().map(|(t, w)| w * g(a + h * t)).sum::<f64>() * h
    }
}

/// Endpoint-inclusive Gauss–Lobatto rule, exact to degree `2 n - 3`.
pub fn gauss_lobatto_rule(npoints: usize) -> Result<QuadratureRule> {
    let rule = match npoints {
        2 => QuadratureRule::from_symmetric(&[-1.0, 1.0], &[1.0, 1.0]),
        3 => QuadratureRule::from_symmetric(&[-1.0, 0.0, 1.0], &[1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0]),
        4 => {
            let a = (1.0f64 / 5.0).sqrt();
            QuadratureRule::from_symmetric(
                &[-1.0, -a, a, 1.0],
                &[1.0 / 6.0, 5.0 / 6.0, 5.0 / 6.0, 1.0 / 6.0],
            )
        }
        5 => {
            let a = (3.0f64 / 7.0).sqrt();
            QuadratureRule::from_symmetric(
                &[-1.0, -a, 0.0, a, 1.0],
                &[0.1, 49.0 / 90.0, 32.0 / 45.0, 49.0 / 90.0, 0.1],
            )
        }
        n => {
            return Err(Error::InvalidParameter(format!(
                "Gauss-Lobatto rule with {n} points is not available (2..=5)"
            )))
        }
    };
    Ok(rule)
}

/// Gauss–Legendre rule, exact to degree `2 n - 1`.
pub fn gauss_legendre_rule(npoints: usize) -> Result<QuadratureRule> {
    let rule = match npoints {
        1 => QuadratureRule::from_symmetric(&[0.0], &[2.0]),
        2 => {
            let a = 1.0 / 3.0f64.sqrt();
            QuadratureRule::from_symmetric(&[-a, a], &[1.0, 1.0])
        }
        3 => {
            let a = (3.0f64 / 5.0).sqrt();
            QuadratureRule::from_symmetric(&[-a, 0.0, a], &[5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
        }
        4 => {
            let s = (6.0f64 / 5.0).sqrt() * 2.0 / 7.0;
            let a = (3.0 / 7.0 - s).sqrt();
            let b = (3.0 / 7.0 + s).sqrt();
            let wa = (18.0 + 30.0f64.sqrt()) / 36.0;
            let wb = (18.0 - 30.0f64.sqrt()) / 36.0;
            QuadratureRule::from_symmetric(&[-b, -a, a, b], &[wb, wa, wa, wb])
        }
        5 => {
            let s = 2.0 * (10.0f64 / 7.0).sqrt();
            let a = (5.0 - s).sqrt() / 3.0;
            let b = (5.0 + s).sqrt() / 3.0;
            let r70 = 70.0f64.sqrt();
            let wa = (322.0 + 13.0 * r70) / 900.0;
            let wb = (322.0 - 13.0 * r70) / 900.0;
            QuadratureRule::from_symmetric(&[-b, -a, 0.0, a, b], &[wb, wa, 128.0 / 225.0, wa, wb])
        }
        n => {
            return Err(Error::InvalidParameter(format!(
                "Gauss-Legendre rule with {n} points is not available (1..=5)"
            )))
        }
    };
    Ok(rule)
}

/// A rule on the reference triangle in barycentric coordinates. Weights
/// are relative to the triangle area and sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl TriangleRule {
    /// Vertex rule, exact for linear functions.
    pub fn vertex() -> Self {
        Self {
            points: vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            weights: vec![1.0 / 3.0; 3],
        }
    }

    /// Six-point symmetric rule exact to degree 4.
    pub fn degree4() -> Self {
        const A1: f64 = 0.445_948_490_915_965;
        const W1: f64 = 0.223_381_589_678_011;
        const A2: f64 = 0.091_576_213_509_771;
        const W2: f64 = 0.109_951_743_655_322;
        let b1 = 1.0 - 2.0 * A1;
        let b2 = 1.0 - 2.0 * A2;
        Self {
            points: vec![
                [b1, A1, A1],
                [A1, b1, A1],
                [A1, A1, b1],
                [b2, A2, A2],
                [A2, b2, A2],
                [A2, A2, b2],
            ],
            weights: vec![W1, W1, W1, W2, W2, W2],
        }
    }

    /// Vertex rule on the `k²` congruent subtriangles of a uniform
    /// subdivision; exact for linear functions, vertices included.
    pub fn composite_vertex(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("subdivision level must be positive".into()));
        }
        // lattice point (i, j) has barycentric coordinates (k - i - j, i, j) / k
        let side = k + 1;
        let mut weight = vec![0.0; side * side];
        let w = 1.0 / (3.0 * (k * k) as f64);
        for j in 0..k {
            for i in 0..k - j {
                for (a, b) in [(i, j), (i + 1, j), (i, j + 1)] {
                    weight[b * side + a] += w;
                }
                if i + j + 2 <= k {
                    for (a, b) in [(i + 1, j), (i, j + 1), (i + 1, j + 1)] {
                        weight[b * side + a] += w;
                    }
                }
            }
        }
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for j in 0..=k {
            for i in 0..=k - j {
                let (s, t) = (i as f64 / k as f64, j as f64 / k as f64);
                points.push([1.0 - s - t, s, t]);
                weights.push(weight[j * side + i]);
            }
        }
        Ok(Self { points, weights })
    }

    pub fn iter(&self) -> impl Iterator<Item = ([f64; 3], f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn composite_vertex_rule() {
        assert_eq!(TriangleRule::composite_vertex(1).unwrap(), TriangleRule::vertex());
        for k in 1..=6 {
            let rule = TriangleRule::composite_vertex(k).unwrap();
            assert_eq!(rule.points.len(), (k + 1) * (k + 2) / 2);
            assert_relative_eq!(rule.weights.iter().sum::<f64>(), 1.0, max_relative = 1e-14);
            // mean of ξ over the triangle is 1/3, of ξ² is 1/6; the latter
            // converges at second order under subdivision
            let m1: f64 = rule.iter().map(|(p, w)| w * p[1]).sum();
            assert_relative_eq!(m1, 1.0 / 3.0, max_relative = 1e-14);
            let m2: f64 = rule.iter().map(|(p, w)| w * p[1] * p[1]).sum();
            let err = (m2 - 1.0 / 6.0).abs();
            assert!(err <= 0.34 / (k * k) as f64, "k={k} err={err}");
        }
        assert!(TriangleRule::composite_vertex(0).is_err());
    }

    #[test]
    fn trapezoid_and_simpson() {
        let r2 = gauss_lobatto_rule(2).unwrap();
        assert_eq!(r2.points, vec![0.0, 1.0]);
        assert_eq!(r2.weights, vec![0.5, 0.5]);
        let r3 = gauss_lobatto_rule(3).unwrap();
        assert_eq!(r3.points, vec![0.0, 0.5, 1.0]);
        assert_relative_eq!(r3.weights[0], 1.0 / 6.0, epsilon = 1e-16);
        assert_relative_eq!(r3.weights[1], 2.0 / 3.0, epsilon = 1e-16);
        assert_relative_eq!(r3.integrate(0.0, 1.0, |x| x.powi(3)), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn unsupported_sizes() {
        assert!(gauss_lobatto_rule(1).is_err());
        assert!(gauss_lobatto_rule(6).is_err());
        assert!(gauss_legendre_rule(0).is_err());
    }

    #[test]
    fn lobatto_exactness() {
        for n in 2..=5 {
            let rule = gauss_lobatto_rule(n).unwrap();
            assert_eq!(rule.points[0], 0.0);
            assert_eq!(*rule.points.last().unwrap(), 1.0);
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            assert_relative_eq!(rule.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
            for deg in 0..=(2 * n - 3) {
                let q = rule.integrate(0.0, 1.0, |x| x.powi(deg as i32));
                assert!((q - 1.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n={n} deg={deg}");
            }
            // one degree past the guarantee is not integrated exactly
            let deg = 2 * n - 2;
            let q = rule.integrate(0.0, 1.0, |x| x.powi(deg as i32));
            assert!((q - 1.0 / (deg as f64 + 1.0)).abs() > 1e-6);
        }
    }

    #[test]
    fn legendre_exactness() {
        for n in 1..=5 {
            let rule = gauss_legendre_rule(n).unwrap();
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            for deg in 0..=(2 * n - 1) {
                let q = rule.integrate(0.0, 1.0, |x| x.powi(deg as i32));
                assert!((q - 1.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    #[test]
    fn triangle_rules_exactness() {
        // ∫_T λ1^a λ2^b λ3^c = 2|T| a! b! c! / (a+b+c+2)!
        for (rule, max_deg) in [(TriangleRule::vertex(), 1u32), (TriangleRule::degree4(), 4)] {
            assert_relative_eq!(rule.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
            for a in 0..=max_deg {
                for b in 0..=(max_deg - a) {
                    for c in 0..=(max_deg - a - b) {
                        let exact = 2.0 * factorial(a) * factorial(b) * factorial(c)
                            / factorial(a + b + c + 2);
                        let q: f64 = rule
                            .iter()
                            .map(|(l, w)| w * l[0].powi(a as i32) * l[1].powi(b as i32) * l[2].powi(c as i32))
                            .sum();
                        assert!((q - exact).abs() < 1e-13, "({a},{b},{c}) {q} vs {exact}");
                    }
                }
            }
        }
    }
}
