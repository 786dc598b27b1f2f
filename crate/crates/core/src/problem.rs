//! Two-parameter reaction-convection-diffusion problems
//!
//! `-eps Δu + mu b·∇u + r u = f` on the unit interval or unit square with
//! homogeneous Dirichlet data. Coefficients are plain point evaluators; a
//! 1D problem ignores the `y` argument and the second component of `b`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type ScalarField = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type VectorField = Arc<dyn Fn(f64, f64) -> [f64; 2] + Send + Sync>;

/// Spatial dimension of a problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    One,
    Two,
}

/// Built-in problem names accepted by [`make_problem`].
pub const REGISTRY: &[&str] = &["rcd1d-exp", "rcd2d-exp", "const1d"];

/// Names a registered problem together with its perturbation parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemId {
    pub name: String,
    pub eps: f64,
    pub mu: f64,
}

impl ProblemId {
    pub fn new(name: impl Into<String>, eps: f64, mu: f64) -> Self {
        Self {
            name: name.into(),
            eps,
            mu,
        }
    }
}

/// A singularly perturbed problem with its coefficient fields.
#[derive(Clone)]
pub struct TwoParamProblem {
    name: String,
    dim: Dim,
    eps: f64,
    mu: f64,
    b: VectorField,
    div_b: ScalarField,
    r: ScalarField,
    f: ScalarField,
}

impl fmt::Debug for TwoParamProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwoParamProblem")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("eps", &self.eps)
            .field("mu", &self.mu)
            .finish_non_exhaustive()
    }
}

/// Sample points used to check coercivity and finiteness at construction.
fn sample_points(dim: Dim) -> Vec<(f64, f64)> {
    const M: usize = 20;
    let t = |i: usize| i as f64 / M as f64;
    match dim {
        Dim::One => (0..=M).map(|i| (t(i), 0.0)).collect(),
        Dim::Two => (0..=M)
            .flat_map(|j| (0..=M).map(move |i| (t(i), t(j))))
            .collect(),
    }
}

impl TwoParamProblem {
    /// Builds a problem and checks `eps, mu > 0`, finiteness and
    /// `2 r >= mu div b` on a fixed sample grid.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        dim: Dim,
        eps: f64,
        mu: f64,
        b: VectorField,
        div_b: ScalarField,
        r: ScalarField,
        f: ScalarField,
    ) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!("mu must be positive, got {mu}")));
        }
        let p = Self {
            name: name.into(),
            dim,
            eps,
            mu,
            b,
            div_b,
            r,
            f,
        };
        for (x, y) in sample_points(dim) {
            let [b1, b2] = p.b(x, y);
            let (r, f, div) = (p.r(x, y), p.f(x, y), p.div_b(x, y));
            if ![b1, b2, r, f, div].iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "non-finite coefficient at ({x}, {y})"
                )));
            }
            if !p.is_coercive_at(x, y) {
                return Err(Error::InvalidParameter(format!(
                    "coercivity 2r >= mu div b violated at ({x}, {y})"
                )));
            }
        }
        Ok(p)
    }

    /// One-dimensional problem `-eps u'' + mu b u' + r u = f`.
    pub fn new_1d(
        name: impl Into<String>,
        eps: f64,
        mu: f64,
        b: impl Fn(f64) -> f64 + Send + Sync + 'static,
        db: impl Fn(f64) -> f64 + Send + Sync + 'static,
        r: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::new(
            name,
            Dim::One,
            eps,
            mu,
            Arc::new(move |x, _| [b(x), 0.0]),
            Arc::new(move |x, _| db(x)),
            Arc::new(move |x, _| r(x)),
            Arc::new(move |x, _| f(x)),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    #[inline]
    pub fn b(&self, x: f64, y: f64) -> [f64; 2] {
        (self.b)(x, y)
    }

    #[inline]
    pub fn div_b(&self, x: f64, y: f64) -> f64 {
        (self.div_b)(x, y)
    }

    #[inline]
    pub fn r(&self, x: f64, y: f64) -> f64 {
        (self.r)(x, y)
    }

    #[inline]
    pub fn f(&self, x: f64, y: f64) -> f64 {
        (self.f)(x, y)
    }

    /// `2 r >= mu div b`; equality is admitted so that pure diffusion
    /// problems (`b = 0`, `r = 0`) can be built.
    pub fn is_coercive_at(&self, x: f64, y: f64) -> bool {
        2.0 * self.r(x, y) >= self.mu * self.div_b(x, y)
    }

    /// Same coefficients, different source term.
    pub fn with_source(&self, f: ScalarField) -> Self {
        Self { f, ..self.clone() }
    }
}

/// Looks up a registered problem.
pub fn make_problem(id: &ProblemId) -> Result<TwoParamProblem> {
    let (eps, mu) = (id.eps, id.mu);
    match id.name.as_str() {
        "rcd1d-exp" => TwoParamProblem::new_1d(
            &id.name,
            eps,
            mu,
            |_| 1.0,
            |_| 0.0,
            |_| 1.0,
            |x| (1.0 + x).exp(),
        ),
        "const1d" => TwoParamProblem::new_1d(&id.name, eps, mu, |_| 1.0, |_| 0.0, |_| 1.0, |_| 1.0),
        "rcd2d-exp" => TwoParamProblem::new(
            &id.name,
            Dim::Two,
            eps,
            mu,
            Arc::new(|x, _| [3.0 - x, 0.0]),
            Arc::new(|_, _| -1.0),
            Arc::new(|_, _| 1.0),
            Arc::new(|x, y| (1.0 + x + y).exp()),
        ),
        other => Err(Error::UnknownProblem(other.to_string())),
    }
}

/// Decay rates of the two boundary layers of a 1D problem at `x`.
///
/// Returns `(lambda0, lambda1)`: the magnitude of the negative root and the
/// positive root of `-eps λ² + mu b(x) λ + r(x) = 0`.
pub fn characteristic_rates(p: &TwoParamProblem, x: f64) -> Result<(f64, f64)> {
    if p.dim() != Dim::One {
        return Err(Error::Dimension("characteristic rates are defined in 1D only".into()));
    }
    // eps λ² - mu b λ - r = 0
    let a = p.eps();
    let bq = -p.mu() * p.b(x, 0.0)[0];
    let c = -p.r(x, 0.0);
    let disc = bq * bq - 4.0 * a * c;
    if !(disc >= 0.0) {
        return Err(Error::ComplexRoots(x));
    }
    let sq = disc.sqrt();
    let q = -0.5 * (bq + if bq >= 0.0 { sq } else { -sq });
    if q == 0.0 {
        return Err(Error::ComplexRoots(x));
    }
    let (r1, r2) = (q / a, c / q);
    let (neg, pos) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
    Ok((neg.abs(), pos))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn registry_1d_source() {
        let p = make_problem(&ProblemId::new("rcd1d-exp", 1e-8, 1e-3)).unwrap();
        assert_eq!(p.dim(), Dim::One);
        assert_relative_eq!(p.f(0.0, 0.0), std::f64::consts::E, epsilon = 1e-12);
        assert_relative_eq!(p.f(1.0, 0.0), 7.38905609893065, epsilon = 1e-12);
    }

    #[test]
    fn registry_2d_coefficients() {
        let p = make_problem(&ProblemId::new("rcd2d-exp", 1e-3, 1e-1)).unwrap();
        assert_eq!(p.dim(), Dim::Two);
        assert_eq!(p.b(0.25, 0.7), [2.75, 0.0]);
        assert_relative_eq!(p.f(0.0, 0.0), std::f64::consts::E, epsilon = 1e-14);
    }

    #[test]
    fn unknown_and_invalid() {
        assert!(matches!(
            make_problem(&ProblemId::new("bogus", 1.0, 1.0)),
            Err(Error::UnknownProblem(_))
        ));
        assert!(matches!(
            make_problem(&ProblemId::new("const1d", 0.0, 1.0)),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            make_problem(&ProblemId::new("const1d", 1.0, -1.0)),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn coercivity_violation_rejected() {
        let bad = TwoParamProblem::new_1d("bad", 1.0, 1.0, |x| 3.0 * x, |_| 3.0, |_| 1.0, |_| 1.0);
        assert!(bad.is_err());
    }

    #[test]
    fn rates_symmetric_case() {
        // mu is required positive, so use a tiny convection to approach mu = 0
        let p = TwoParamProblem::new_1d("sym", 1.0, 1e-300, |_| 1.0, |_| 0.0, |_| 1.0, |_| 1.0).unwrap();
        let (l0, l1) = characteristic_rates(&p, 0.3).unwrap();
        assert_relative_eq!(l0, 1.0, epsilon = 1e-14);
        assert_relative_eq!(l1, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rates_reaction_convection_diffusion() {
        let p = make_problem(&ProblemId::new("rcd1d-exp", 1e-8, 1e-3)).unwrap();
        let (l0, l1) = characteristic_rates(&p, 0.0).unwrap();
        // (mu ± sqrt(mu² + 4 eps)) / (2 eps) with mu = 1e-3, eps = 1e-8
        let d = (1.04e-6f64).sqrt();
        assert_relative_eq!(l0, 2.0 / (1e-3 + d), max_relative = 1e-12);
        assert_relative_eq!(l1, (1e-3 + d) / 2e-8, max_relative = 1e-12);
        assert!((l0 - 990.2).abs() < 0.5);
        assert!((l1 - 1.0099e5).abs() < 10.0);
    }

    #[test]
    fn rates_reaction_diffusion() {
        let p = make_problem(&ProblemId::new("rcd1d-exp", 1e-8, 1e-8)).unwrap();
        let (l0, l1) = characteristic_rates(&p, 0.5).unwrap();
        assert_relative_eq!(l0, 1e4, max_relative = 1e-3);
        assert_relative_eq!(l1, 1e4, max_relative = 1e-3);
    }

    #[test]
    fn rates_require_1d() {
        let p = make_problem(&ProblemId::new("rcd2d-exp", 1e-3, 1e-3)).unwrap();
        assert!(characteristic_rates(&p, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn registered_problems_are_coercive(
            x in 0.0f64..=1.0, y in 0.0f64..=1.0,
            leps in -12.0f64..0.0, lmu in -8.0f64..0.0,
        ) {
            for name in REGISTRY {
                let p = make_problem(&ProblemId::new(*name, 10f64.powf(leps), 10f64.powf(lmu))).unwrap();
                prop_assert!(p.is_coercive_at(x, y));
            }
        }

        #[test]
        fn rates_are_roots(
            x in 0.0f64..=1.0, leps in -12.0f64..0.0, lmu in -8.0f64..0.0,
        ) {
            let p = make_problem(&ProblemId::new("rcd1d-exp", 10f64.powf(leps), 10f64.powf(lmu))).unwrap();
            let (l0, l1) = characteristic_rates(&p, x).unwrap();
            prop_assert!(l0 <= l1);
            let (eps, mu) = (p.eps(), p.mu());
            for lam in [-l0, l1] {
                let res = -eps * lam * lam + mu * lam + 1.0;
                prop_assert!(res.abs() < 1e-8 * (eps * lam * lam).max(1.0));
            }
        }
    }
}
