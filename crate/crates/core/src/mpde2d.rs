//! Two-dimensional diagonal monitor and the fixed-iteration mesh generator.
//!
//! For node k in row j and column i, the x-entry of the monitor uses the
//! decay rates read at the left and right ends of row j, the y-entry those
//! at the bottom and top of column i:
//!
//! ```text
//! m11 = max{1, K1 (υ4 exp(-υ4 x / σ) + υ2 exp(-υ2 (1 - x) / σ))}
//! m22 = max{1, K2 (υ1 exp(-υ1 y / σ) + υ3 exp(-υ3 (1 - y) / σ))}
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fem::mesh2d::{self, Edge, Mesh2D};
use crate::fem::{
    boundary_derivative_2d, gauss_lobatto_rule, solve_map_component_2d, solve_spde_2d, Component, Degree, Field2D,
    TriangleRule,
};
use crate::mpde1d::{check_target_n, layer_term, DensityParams, DriverOptions, LayerPrimitive, MapCoupling, MonitorRule};
use crate::problem::{Dim, TwoParamProblem};

/// Normalised boundary-derivative rates propagated into the domain.
///
/// Nodal arrays in lexicographic order: υ1 (bottom) and υ3 (top) are copied
/// up the columns, υ4 (left) and υ2 (right) along the rows.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerScales2D {
    pub n: usize,
    pub upsilon1: Vec<f64>,
    pub upsilon2: Vec<f64>,
    pub upsilon3: Vec<f64>,
    pub upsilon4: Vec<f64>,
}

impl LayerScales2D {
    /// Builds the nodal arrays from per-edge values: `bottom[i]`, `top[i]`
    /// indexed by column, `left[j]`, `right[j]` by row.
    pub fn from_edges(n: usize, bottom: &[f64], right: &[f64], top: &[f64], left: &[f64]) -> Self {
        let s = n + 1;
        let nn = s * s;
        Self {
            n,
            upsilon1: (0..nn).map(|k| bottom[k % s]).collect(),
            upsilon2: (0..nn).map(|k| right[k / s]).collect(),
            upsilon3: (0..nn).map(|k| top[k % s]).collect(),
            upsilon4: (0..nn).map(|k| left[k / s]).collect(),
        }
    }
}

fn normalised(p: &TwoParamProblem, u: &Field2D, edge: Edge, node: usize) -> Result<f64> {
    let c = u.mesh.coords()[node];
    let d = boundary_derivative_2d(u, edge, node)?;
    Ok(d.abs() / p.f(c[0], c[1]).abs().max(1.0))
}

/// Rates at node k come from boundary node `k mod (N+1)` (υ1),
/// `N + ⌊k/(N+1)⌋(N+1)` (υ2), `N(N+1) + k mod (N+1)` (υ3) and
/// `⌊k/(N+1)⌋(N+1)` (υ4).
pub fn layer_scales_2d(u: &Field2D, p: &TwoParamProblem) -> Result<LayerScales2D> {
    let n = u.mesh.n();
    let s = n + 1;
    let mut bottom = Vec::with_capacity(s);
    let mut right = Vec::with_capacity(s);
    let mut top = Vec::with_capacity(s);
    let mut left = Vec::with_capacity(s);
    for m in 0..s {
        bottom.push(normalised(p, u, Edge::Bottom, m)?);
        right.push(normalised(p, u, Edge::Right, n + m * s)?);
        top.push(normalised(p, u, Edge::Top, n * s + m)?);
        left.push(normalised(p, u, Edge::Left, m * s)?);
    }
    Ok(LayerScales2D::from_edges(n, &bottom, &right, &top, &left))
}

/// Nodal values of the diagonal monitor in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorField {
    pub m11: Vec<f64>,
    pub m22: Vec<f64>,
}

/// Monitor entries at physical point `c` for rates `[υ1, υ2, υ3, υ4]`.
fn monitor_at(c: [f64; 2], ups: [f64; 4], dp: &DensityParams) -> (f64, f64) {
    let [u1, u2, u3, u4] = ups;
    let mx = layer_term(dp.k1, u4, c[0], dp.sigma) + layer_term(dp.k1, u2, 1.0 - c[0], dp.sigma);
    let my = layer_term(dp.k2, u1, c[1], dp.sigma) + layer_term(dp.k2, u3, 1.0 - c[1], dp.sigma);
    (mx.max(1.0), my.max(1.0))
}

/// Evaluates the monitor at the nodes of `mesh`.
pub fn monitor_matrix(mesh: &Mesh2D, s: &LayerScales2D, dp: &DensityParams) -> MonitorField {
    let (m11, m22) = mesh
        .coords()
        .iter()
        .enumerate()
        .map(|(k, &c)| monitor_at(c, [s.upsilon1[k], s.upsilon2[k], s.upsilon3[k], s.upsilon4[k]], dp))
        .unzip();
    MonitorField { m11, m22 }
}

/// Monitor constant on each computational triangle, ordered as
/// [`mesh2d::triangles`]. Index 0 of each entry weights fluxes along ξ,
/// index 1 fluxes along η.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMonitor {
    pub m11: [Vec<f64>; 2],
    pub m22: [Vec<f64>; 2],
}

impl TriangleMonitor {
    fn isotropic(m11: Vec<f64>, m22: Vec<f64>) -> Self {
        Self {
            m11: [m11.clone(), m11],
            m22: [m22.clone(), m22],
        }
    }
}

/// Integrates the monitor over the triangles of the current physical mesh.
/// Points and rates are interpolated linearly along the map.
pub fn triangle_monitor(mesh: &Mesh2D, s: &LayerScales2D, dp: &DensityParams, rule: MonitorRule) -> Result<TriangleMonitor> {
    let n = mesh.n();
    let coords = mesh.coords();
    let arrays = [&s.upsilon1, &s.upsilon2, &s.upsilon3, &s.upsilon4];
    let tris = mesh2d::triangles(n);
    let at = |bary: &[(usize, f64)]| {
        let c = [0, 1].map(|d| bary.iter().map(|&(k, b)| b * coords[k][d]).sum());
        let ups = arrays.map(|a| bary.iter().map(|&(k, b)| b * a[k]).sum());
        monitor_at(c, ups, dp)
    };
    match rule {
        MonitorRule::CornerMean => {
            let nodal = monitor_matrix(mesh, s, dp);
            let stride = n + 1;
            let corner_mean = |v: &[f64], t: &[usize; 3]| {
                let (i, j) = t.iter().fold((usize::MAX, usize::MAX), |(i, j), &k| (i.min(k % stride), j.min(k / stride)));
                let k = j * stride + i;
                (v[k] + v[k + 1] + v[k + stride] + v[k + stride + 1]) / 4.0
            };
            let m11 = tris.iter().map(|t| corner_mean(&nodal.m11, t)).collect();
            let m22 = tris.iter().map(|t| corner_mean(&nodal.m22, t)).collect();
            Ok(TriangleMonitor::isotropic(m11, m22))
        }
        MonitorRule::Subdivided(k) => {
            let rule = TriangleRule::composite_vertex(k)?;
            let (m11, m22) = tris
                .iter()
                .map(|t| {
                    rule.iter().fold((0.0, 0.0), |acc, (b, w)| {
                        let m = at(&[(t[0], b[0]), (t[1], b[1]), (t[2], b[2])]);
                        (acc.0 + w * m.0, acc.1 + w * m.1)
                    })
                })
                .unzip();
            Ok(TriangleMonitor::isotropic(m11, m22))
        }
        MonitorRule::Legs(npoints) => {
            // exact means for each entry along its own axis, where the rates
            // are constant; Gauss–Lobatto for the cross entries
            let rule = gauss_lobatto_rule(npoints)?;
            let stride = n + 1;
            let rows: Vec<LayerPrimitive> = (0..stride)
                .map(|j| LayerPrimitive::new(dp.k1, s.upsilon4[j * stride], s.upsilon2[j * stride], dp.sigma))
                .collect();
            let cols: Vec<LayerPrimitive> = (0..stride)
                .map(|i| LayerPrimitive::new(dp.k2, s.upsilon1[i], s.upsilon3[i], dp.sigma))
                .collect();
            let cross = |a: usize, b: usize| {
                rule.iter().fold((0.0, 0.0), |acc, (t, w)| {
                    let m = at(&[(a, 1.0 - t), (b, t)]);
                    (acc.0 + w * m.0, acc.1 + w * m.1)
                })
            };
            let mut out = TriangleMonitor {
                m11: [Vec::with_capacity(tris.len()), Vec::with_capacity(tris.len())],
                m22: [Vec::with_capacity(tris.len()), Vec::with_capacity(tris.len())],
            };
            for t in &tris {
                let legs = [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])];
                let &(a, b) = legs.iter().find(|(a, b)| a / stride == b / stride).expect("triangle has a ξ leg");
                out.m11[0].push(rows[a / stride].mean(coords[a][0], coords[b][0]));
                out.m22[0].push(cross(a, b).1);
                let &(a, b) = legs.iter().find(|(a, b)| a % stride == b % stride).expect("triangle has an η leg");
                out.m11[1].push(cross(a, b).0);
                out.m22[1].push(cols[a % stride].mean(coords[a][1], coords[b][1]));
            }
            Ok(out)
        }
    }
}

/// Solves both map components on the computational grid `comp`.
pub fn solve_map_2d(mon: &TriangleMonitor, comp: &Mesh2D, coupling: MapCoupling) -> Result<(Vec<f64>, Vec<f64>)> {
    let max = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(p, q)| p.max(*q)).collect() };
    let (x, y) = match coupling {
        MapCoupling::Shared => ((mon.m11[0].clone(), mon.m22[1].clone()), (mon.m11[0].clone(), mon.m22[1].clone())),
        MapCoupling::Split => ((mon.m11[0].clone(), mon.m11[1].clone()), (mon.m22[0].clone(), mon.m22[1].clone())),
        MapCoupling::Max => ((mon.m11[0].clone(), max(&mon.m11[1], &mon.m22[1])), (max(&mon.m22[0], &mon.m11[0]), mon.m22[1].clone())),
    };
    Ok((
        solve_map_component_2d(&x.0, &x.1, comp, Component::X)?,
        solve_map_component_2d(&y.0, &y.1, comp, Component::Y)?,
    ))
}

/// Fixed-point iterations on the initial `N = 16` level: `⌈6 log10(1/ε)⌉`,
/// and at least one.
pub fn initial_iterations(eps: f64) -> usize {
    let k = (6.0 * (1.0 / eps).log10()).ceil();
    if k.is_finite() && k >= 1.0 {
        k as usize
    } else {
        1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord2D {
    pub level: usize,
    pub n: usize,
    pub iteration: usize,
    /// `(min, max)` of υ1..υ4.
    pub upsilon: [(f64, f64); 4],
    pub min_area: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationLog2D {
    pub records: Vec<IterationRecord2D>,
    pub level_counts: Vec<(usize, usize)>,
}

impl IterationLog2D {
    pub fn total_iterations(&self) -> usize {
        self.level_counts.iter().map(|&(_, c)| c).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "level,n,iteration,ups1_min,ups1_max,ups2_min,ups2_max,ups3_min,ups3_max,ups4_min,ups4_max,min_area\n",
        );
        for r in &self.records {
            let _ = write!(s, "{},{},{}", r.level, r.n, r.iteration);
            for (lo, hi) in r.upsilon {
                let _ = write!(s, ",{lo:.16e},{hi:.16e}");
            }
            let _ = writeln!(s, ",{:.16e}", r.min_area);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelMesh2D {
    pub n: usize,
    pub mesh: Mesh2D,
    pub iterations: usize,
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// Generates an `n × n` layer-adapted mesh. Returns the mesh, the P1
/// solution on it and the iteration log.
pub fn generate_mesh_2d(
    p: &TwoParamProblem,
    n: usize,
    dp: &DensityParams,
    opts: &DriverOptions,
) -> Result<(Mesh2D, Field2D, IterationLog2D)> {
    let (levels, log) = generate_mesh_2d_levels(p, n, dp, opts)?;
    let mesh = levels.into_iter().last().expect("at least one level").mesh;
    let u = solve_spde_2d(p, &mesh, Degree::P1)?;
    Ok((mesh, u, log))
}

/// Runs the generator up to `n` and keeps the final mesh of every level.
pub fn generate_mesh_2d_levels(
    p: &TwoParamProblem,
    n: usize,
    dp: &DensityParams,
    opts: &DriverOptions,
) -> Result<(Vec<LevelMesh2D>, IterationLog2D)> {
    if p.dim() != Dim::Two {
        return Err(Error::Dimension("generate_mesh_2d needs a 2D problem".into()));
    }
    dp.validate(1)?;
    check_target_n(n, opts.initial_n)?;
    if opts.level_iterations == 0 {
        return Err(Error::InvalidParameter("per-level iterations must be positive".into()));
    }

    let mut log = IterationLog2D::default();
    let mut levels = Vec::new();
    let mut m = opts.initial_n;
    let mut mesh = Mesh2D::identity(m);
    let mut iterations = initial_iterations(p.eps());
    let mut level = 0;
    loop {
        for it in 1..=iterations {
            let u = solve_spde_2d(p, &mesh, Degree::P1)?;
            let s = layer_scales_2d(&u, p)?;
            let comp = Mesh2D::identity(m);
            log.records.push(IterationRecord2D {
                level,
                n: m,
                iteration: it,
                upsilon: [
                    min_max(&s.upsilon1),
                    min_max(&s.upsilon2),
                    min_max(&s.upsilon3),
                    min_max(&s.upsilon4),
                ],
                min_area: mesh.min_area(),
            });
            let mon = triangle_monitor(&mesh, &s, dp, opts.monitor_rule)?;
            let (x, y) = solve_map_2d(&mon, &comp, opts.map_coupling)?;
            mesh = Mesh2D::new(m, x.into_iter().zip(y).map(|(a, b)| [a, b]).collect())?;
        }
        log.level_counts.push((m, iterations));
        levels.push(LevelMesh2D {
            n: m,
            mesh: mesh.clone(),
            iterations,
        });
        if m >= n {
            break;
        }
        mesh = mesh.refine_uniform();
        m *= 2;
        level += 1;
        iterations = opts.level_iterations;
    }
    Ok((levels, log))
}

/// Refines nodal values given on the grid of `mesh` by edge and diagonal averages.
pub fn refine_map(mesh: &Mesh2D) -> Vec<[f64; 2]> {
    let n = mesh.n();
    let xs: Vec<f64> = mesh.coords().iter().map(|c| c[0]).collect();
    let ys: Vec<f64> = mesh.coords().iter().map(|c| c[1]).collect();
    mesh2d::refine_nodal(n, &xs)
        .into_iter()
        .zip(mesh2d::refine_nodal(n, &ys))
        .map(|(a, b)| [a, b])
        .collect()
}
