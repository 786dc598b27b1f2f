//! One-dimensional a posteriori mesh densities and the fixed-point /
//! h-refinement mesh generator.
//!
//! Each fixed-point step solves the physical problem on the current mesh,
//! reads the one-sided boundary derivatives of the P1 solution, builds
//!
//! ```text
//! ρ(x) = max{1, K (υ0 exp(-υ0 x / σ) + υ1 exp(-υ1 (1 - x) / σ))}
//! ```
//!
//! along the current map and solves `(ρ x_ξ)_ξ = 0` for the next map. The
//! density integral over each computational cell uses a Gauss–Lobatto rule
//! with [`DriverOptions::density_points`] points; two points is the plain
//! vertex rule.
//! When the relative change of the boundary derivatives drops below `tol`
//! the computational mesh is refined uniformly and the map interpolated.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fem::mesh1d::{self, Mesh1D};
use crate::fem::quadrature::gauss_lobatto_rule;
use crate::fem::{one_sided_derivative_1d, solve_spde_1d, solve_weighted_laplace_1d_cellwise, Degree, End, Field1D};
use crate::problem::{characteristic_rates, Dim, TwoParamProblem};

/// Parameters of the mesh density and the stopping test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityParams {
    /// Layer-point proportion control in 1D.
    pub k: f64,
    /// x-direction proportion control in 2D.
    pub k1: f64,
    /// y-direction proportion control in 2D.
    pub k2: f64,
    pub sigma: f64,
    pub tol: f64,
}

impl Default for DensityParams {
    fn default() -> Self {
        Self {
            k: 0.28,
            k1: 0.28,
            k2: 0.28,
            sigma: 2.5,
            tol: 1e-3,
        }
    }
}

impl DensityParams {
    /// Checks `0 < K < 1`, `σ > p + 1` for FEM order `p`, and `tol > 0`.
    pub fn validate(&self, order: usize) -> Result<()> {
        for (name, k) in [("K", self.k), ("K1", self.k1), ("K2", self.k2)] {
            if !(k > 0.0 && k < 1.0) {
                return Err(Error::InvalidParameter(format!("{name} must lie in (0, 1), got {k}")));
            }
        }
        if !(self.sigma > (order + 1) as f64) || !self.sigma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sigma must exceed {} for order {order}, got {}",
                order + 1,
                self.sigma
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

/// Iteration schedule shared by the 1D and 2D generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DriverOptions {
    /// Intervals of the first computational mesh.
    pub initial_n: usize,
    /// Fixed-point cap per refinement level (1D).
    pub max_iterations: usize,
    /// Fixed-point iterations after each refinement (2D).
    pub level_iterations: usize,
    /// Gauss–Lobatto points per cell for the 1D density integral.
    pub density_points: usize,
    /// Integration of the 2D monitor over computational cells.
    pub monitor_rule: MonitorRule,
    /// Which monitor entries weight each component of the 2D map.
    pub map_coupling: MapCoupling,
}

/// Diffusion tensor of each 2D map component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapCoupling {
    /// Both components use `diag(m11, m22)`.
    Shared,
    /// The x-component uses `m11 I`, the y-component `m22 I`.
    Split,
    /// Each component takes its own entry on its own axis and the larger
    /// of the two entries across it.
    Max,
}

/// How the 2D monitor enters the mesh equation on each cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonitorRule {
    /// Mean of the nodal values at the four corners of each square.
    CornerMean,
    /// Vertex rule on `k²` subtriangles of each triangle, along the current map.
    Subdivided(usize),
    /// Exact mean of m11 along the leg parallel to ξ and of m22 along the
    /// leg parallel to η; the cross entries use a Gauss–Lobatto rule with
    /// the given point count.
    Legs(usize),
}

impl Default for DriverOptions {
    fn default() -> Self {
        Self {
            initial_n: 16,
            max_iterations: 100,
            level_iterations: 5,
            density_points: 5,
            monitor_rule: MonitorRule::Legs(5),
            map_coupling: MapCoupling::Max,
        }
    }
}

/// Checks that `n` is a power of two no smaller than `initial`.
pub fn check_target_n(n: usize, initial: usize) -> Result<()> {
    if !n.is_power_of_two() || n < initial {
        return Err(Error::InvalidParameter(format!(
            "N must be a power of 2 and at least {initial}, got {n}"
        )));
    }
    Ok(())
}

/// Raw one-sided derivatives `(u_h)_{x+}(x_0)` and `(u_h)_{x-}(x_N)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryDerivatives {
    pub left: f64,
    pub right: f64,
}

impl BoundaryDerivatives {
    pub fn of(u: &Field1D) -> Self {
        Self {
            left: one_sided_derivative_1d(u, End::Left),
            right: one_sided_derivative_1d(u, End::Right),
        }
    }
}

/// Boundary-derivative decay rates normalised by the source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerScales {
    pub upsilon0: f64,
    pub upsilon1: f64,
}

pub fn layer_scales_1d(u: &Field1D, p: &TwoParamProblem) -> LayerScales {
    let d = BoundaryDerivatives::of(u);
    let (x0, x1) = (u.mesh.a(), u.mesh.b());
    LayerScales {
        upsilon0: d.left.abs() / p.f(x0, 0.0).abs().max(1.0),
        upsilon1: d.right.abs() / p.f(x1, 0.0).abs().max(1.0),
    }
}

/// Exponential layer term `K υ exp(-υ d / σ)` at distance `d` from the boundary.
#[inline]
pub fn layer_term(k: f64, upsilon: f64, dist: f64, sigma: f64) -> f64 {
    if upsilon == 0.0 {
        return 0.0;
    }
    k * upsilon * (-upsilon * dist / sigma).exp()
}

pub fn density_aposteriori(x: f64, s: &LayerScales, dp: &DensityParams) -> f64 {
    let layers = layer_term(dp.k, s.upsilon0, x, dp.sigma) + layer_term(dp.k, s.upsilon1, 1.0 - x, dp.sigma);
    layers.max(1.0)
}

/// Density of the classical Bakhvalov mesh with known decay rates.
pub fn density_apriori(x: f64, lambda0: f64, lambda1: f64, dp: &DensityParams) -> f64 {
    let layers = layer_term(dp.k, lambda0, x, dp.sigma) + layer_term(dp.k, lambda1, 1.0 - x, dp.sigma);
    layers.max(1.0)
}

/// Relative change of the boundary derivatives between two iterates.
///
/// A vanishing current derivative contributes 0 if the previous one also
/// vanished and 1 otherwise.
pub fn delta_k(prev: &BoundaryDerivatives, curr: &BoundaryDerivatives) -> f64 {
    let term = |p: f64, c: f64| {
        if c == 0.0 {
            if p == 0.0 {
                0.0
            } else {
                1.0
            }
        } else {
            ((c - p) / c).abs()
        }
    };
    term(prev.left, curr.left) + term(prev.right, curr.right)
}

/// One fixed-point step of the 1D generator.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub level: usize,
    pub n: usize,
    pub iteration: usize,
    pub delta: f64,
    pub upsilon0: f64,
    pub upsilon1: f64,
    pub min_cell: f64,
    pub max_cell: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationLog {
    pub records: Vec<IterationRecord>,
    /// `(N, iterations)` for each completed refinement level.
    pub level_counts: Vec<(usize, usize)>,
}

impl IterationLog {
    /// Iterations spent on the last completed level.
    pub fn final_count(&self) -> usize {
        self.level_counts.last().map_or(0, |&(_, c)| c)
    }

    pub fn count_at(&self, n: usize) -> Option<usize> {
        self.level_counts.iter().find(|(m, _)| *m == n).map(|&(_, c)| c)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("level,n,iteration,delta,upsilon0,upsilon1,min_cell,max_cell\n");
        for r in &self.records {
            let _ = writeln!(
                s,
                "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.level, r.n, r.iteration, r.delta, r.upsilon0, r.upsilon1, r.min_cell, r.max_cell
            );
        }
        s
    }
}

/// Final mesh of one refinement level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelMesh {
    pub n: usize,
    pub mesh: Mesh1D,
    pub iterations: usize,
}

/// Generates a layer-adapted mesh with `n` intervals using the default
/// schedule. Returns the mesh, the P1 solution on it and the iteration log.
pub fn generate_mesh_1d(
    p: &TwoParamProblem,
    n: usize,
    dp: &DensityParams,
) -> Result<(Mesh1D, Field1D, IterationLog)> {
    generate_mesh_1d_with(p, n, dp, &DriverOptions::default())
}

pub fn generate_mesh_1d_with(
    p: &TwoParamProblem,
    n: usize,
    dp: &DensityParams,
    opts: &DriverOptions,
) -> Result<(Mesh1D, Field1D, IterationLog)> {
    let (levels, log) = generate_mesh_1d_levels(p, n, dp, opts)?;
    let mesh = levels.into_iter().last().expect("at least one level").mesh;
    let u = solve_spde_1d(p, &mesh, Degree::P1)?;
    Ok((mesh, u, log))
}

/// Mean of `rho(x(ξ))` over each computational cell, with `x` the linear
/// interpolant of the nodal map `r`.
pub fn cell_weights(r: &[f64], npoints: usize, rho: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
    let rule = gauss_lobatto_rule(npoints)?;
    Ok(r.windows(2)
        .map(|c| rule.iter().map(|(t, w)| w * rho(c[0] + (c[1] - c[0]) * t)).sum())
        .collect())
}

/// Runs the generator up to `n` intervals and keeps the final mesh of every
/// level; the entry for `m` equals the result of a run with target `m`.
pub fn generate_mesh_1d_levels(
    p: &TwoParamProblem,
    n: usize,
    dp: &DensityParams,
    opts: &DriverOptions,
) -> Result<(Vec<LevelMesh>, IterationLog)> {
    if p.dim() != Dim::One {
        return Err(Error::Dimension("generate_mesh_1d needs a 1D problem".into()));
    }
    dp.validate(1)?;
    check_target_n(n, opts.initial_n)?;

    let mut log = IterationLog::default();
    let mut levels = Vec::new();
    let mut m = opts.initial_n;
    // nodal values of the current map on the computational mesh
    let mut r: Vec<f64> = Mesh1D::uniform(m).into_nodes();
    let mut level = 0;
    loop {
        let mut prev: Option<BoundaryDerivatives> = None;
        let mut count = 0;
        loop {
            let mesh = Mesh1D::new(r.clone())?;
            let u = solve_spde_1d(p, &mesh, Degree::P1)?;
            let d = BoundaryDerivatives::of(&u);
            let delta = prev.map_or(f64::INFINITY, |pd| delta_k(&pd, &d));
            let s = layer_scales_1d(&u, p);
            let w = cell_weights(&r, opts.density_points, |x| density_aposteriori(x, &s, dp))?;
            r = solve_weighted_laplace_1d_cellwise(&w, 0.0, 1.0)?.coeffs;
            count += 1;
            log.records.push(IterationRecord {
                level,
                n: m,
                iteration: count,
                delta,
                upsilon0: s.upsilon0,
                upsilon1: s.upsilon1,
                min_cell: mesh.min_cell(),
                max_cell: mesh.max_cell(),
            });
            if delta <= dp.tol {
                break;
            }
            if count >= opts.max_iterations {
                return Err(Error::NotConverged {
                    level,
                    iterations: count,
                    log: Box::new(log),
                });
            }
            prev = Some(d);
        }
        log.level_counts.push((m, count));
        levels.push(LevelMesh {
            n: m,
            mesh: Mesh1D::new(r.clone())?,
            iterations: count,
        });
        if m >= n {
            break;
        }
        r = mesh1d::refine_values(&r);
        m *= 2;
        level += 1;
    }
    Ok((levels, log))
}

/// Mesh that exactly equidistributes the a priori density, with decay
/// rates taken from the characteristic equation at each end.
pub fn bakhvalov_mesh_1d(p: &TwoParamProblem, n: usize, dp: &DensityParams) -> Result<Mesh1D> {
    if p.dim() != Dim::One {
        return Err(Error::Dimension("bakhvalov_mesh_1d needs a 1D problem".into()));
    }
    equidistributed_mesh_1d(n, characteristic_rates(p, 0.0)?.0, characteristic_rates(p, 1.0)?.1, dp)
}

/// Mesh of `n` cells that exactly equidistributes `density_apriori` with
/// rates `lambda0`, `lambda1`. Nodes solve `∫_0^x ρ = (i / N) ∫_0^1 ρ` by
/// bisection on the closed-form primitive; nodes in the right half use the
/// primitive anchored at `x = 1`.
pub fn equidistributed_mesh_1d(n: usize, lambda0: f64, lambda1: f64, dp: &DensityParams) -> Result<Mesh1D> {
    dp.validate(1)?;
    if n == 0 {
        return Err(Error::InvalidParameter("N must be positive".into()));
    }
    if !(lambda0 >= 0.0 && lambda1 >= 0.0 && lambda0.is_finite() && lambda1.is_finite()) {
        return Err(Error::InvalidParameter("rates must be finite and non-negative".into()));
    }
    let prim = LayerPrimitive::new(dp.k, lambda0, lambda1, dp.sigma);
    let total = prim.mass_below(1.0);
    let mut x = vec![0.0; n + 1];
    x[n] = 1.0;
    for (i, xi) in x.iter_mut().enumerate().take(n).skip(1) {
        let t = i as f64 / n as f64;
        *xi = if 2 * i <= n {
            bisect(0.0, 1.0, |y| prim.mass_below(y) - t * total)
        } else {
            bisect(0.0, 1.0, |y| (1.0 - t) * total - prim.mass_above(y))
        };
    }
    Mesh1D::new(x)
}

/// Root of an increasing function on `[lo, hi]`.
fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Primitive of `max{1, g}` with `g` the (convex) sum of both layer terms.
/// `g ≤ 1` exactly on `[a, b]`.
pub(crate) struct LayerPrimitive {
    c0: f64,
    c1: f64,
    l0: f64,
    l1: f64,
    a: f64,
    b: f64,
}

impl LayerPrimitive {
    /// `g(x) = k (r0 exp(-r0 x / σ) + r1 exp(-r1 (1 - x) / σ))`.
    pub(crate) fn new(k: f64, r0: f64, r1: f64, sigma: f64) -> Self {
        let g = |x: f64| layer_term(k, r0, x, sigma) + layer_term(k, r1, 1.0 - x, sigma);
        let dg = |x: f64| -r0 / sigma * layer_term(k, r0, x, sigma) + r1 / sigma * layer_term(k, r1, 1.0 - x, sigma);
        let xm = bisect(0.0, 1.0, dg);
        let (a, b) = if g(xm) >= 1.0 {
            (xm, xm)
        } else {
            let a = if g(0.0) > 1.0 { bisect(0.0, xm, |x| 1.0 - g(x)) } else { 0.0 };
            let b = if g(1.0) > 1.0 { bisect(xm, 1.0, |x| g(x) - 1.0) } else { 1.0 };
            (a, b)
        };
        Self {
            c0: k * sigma,
            c1: k * sigma,
            l0: r0 / sigma,
            l1: r1 / sigma,
            a,
            b,
        }
    }

    /// `∫_s^t g` for `s ≤ t`.
    fn g_integral(&self, s: f64, t: f64) -> f64 {
        let left = if self.l0 > 0.0 {
            -self.c0 * (-self.l0 * s).exp() * (-self.l0 * (t - s)).exp_m1()
        } else {
            0.0
        };
        let right = if self.l1 > 0.0 {
            -self.c1 * (-self.l1 * (1.0 - t)).exp() * (-self.l1 * (t - s)).exp_m1()
        } else {
            0.0
        };
        left + right
    }

    /// `∫_s^t ρ` for `s ≤ t`, split at the clamp points.
    fn integral(&self, s: f64, t: f64) -> f64 {
        let mut acc = 0.0;
        if s < self.a {
            acc += self.g_integral(s, t.min(self.a));
        }
        let (c0, c1) = (s.max(self.a), t.min(self.b));
        if c1 > c0 {
            acc += c1 - c0;
        }
        if t > self.b {
            acc += self.g_integral(s.max(self.b), t);
        }
        acc
    }

    fn mass_below(&self, x: f64) -> f64 {
        self.integral(0.0, x)
    }

    fn mass_above(&self, x: f64) -> f64 {
        self.integral(x, 1.0)
    }

    /// Mean of `max{1, g}` between `p` and `q` in either order.
    pub(crate) fn mean(&self, p: f64, q: f64) -> f64 {
        let (s, t) = if p <= q { (p, q) } else { (q, p) };
        if t > s {
            self.integral(s, t) / (t - s)
        } else {
            self.value(s)
        }
    }

    fn value(&self, x: f64) -> f64 {
            let g = if self.l0 > 0.0 { self.c0 * self.l0 * (-self.l0 * x).exp() } else { 0.0 }
            + if self.l1 > 0.0 { self.c1 * self.l1 * (-self.l1 * (1.0 - x)).exp() } else { 0.0 };
        g.max(1.0)
    }
}
