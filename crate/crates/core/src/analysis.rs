//! Energy-norm error estimation, convergence tables and mesh diagnostics.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fem::field::{self, basis_1d, basis_1d_deriv, basis_tri, basis_tri_grad, triangle_dofs};
use crate::fem::{gauss_legendre_rule, solve_spde_1d, solve_spde_2d, Degree, Field1D, Field2D, Mesh1D, Mesh2D, TriangleRule};
use crate::mpde1d::{generate_mesh_1d_levels, layer_term, DensityParams, DriverOptions, LayerScales};
use crate::mpde2d::generate_mesh_2d_levels;
use crate::problem::{make_problem, Dim, ProblemId, TwoParamProblem};

/// `(ε |e|_1² + ‖e‖_0²)^{1/2}` by three-point Gauss–Legendre on every cell.
pub fn energy_norm_1d(e: &Field1D, eps: f64) -> f64 {
    let rule = gauss_legendre_rule(3).expect("rule exists");
    let mut grad = 0.0;
    let mut mass = 0.0;
    for c in 0..e.mesh.n_cells() {
        let (xl, xr) = e.mesh.cell(c);
        let h = xr - xl;
        let coeffs = e.cell_coeffs(c);
        for (t, w) in rule.iter() {
            let phi = basis_1d(e.degree, t);
            let dphi = basis_1d_deriv(e.degree, t);
            let v: f64 = coeffs.iter().zip(&phi).map(|(a, b)| a * b).sum();
            let d: f64 = coeffs.iter().zip(&dphi).map(|(a, b)| a * b).sum::<f64>() / h;
            grad += w * h * d * d;
            mass += w * h * v * v;
        }
    }
    (eps * grad + mass).sqrt()
}

/// Energy norm of a 2D field with the degree-4 triangle rule.
pub fn energy_norm_2d(e: &Field2D, eps: f64) -> f64 {
    let rule = TriangleRule::degree4();
    let coords = e.mesh.coords();
    let n = e.mesh.n();
    let mut grad = 0.0;
    let mut mass = 0.0;
    for t in e.mesh.triangles() {
        let (area, g) = field::triangle_geometry([coords[t[0]], coords[t[1]], coords[t[2]]]);
        let dofs = triangle_dofs(n, e.degree, t);
        for (l, w) in rule.iter() {
            let phi = basis_tri(e.degree, l);
            let dphi = basis_tri_grad(e.degree, l, g);
            let mut v = 0.0;
            let mut d = [0.0; 2];
            for (a, &dof) in dofs.iter().enumerate() {
                let c = e.coeffs[dof];
                v += c * phi[a];
                d[0] += c * dphi[a][0];
                d[1] += c * dphi[a][1];
            }
            grad += w * area * (d[0] * d[0] + d[1] * d[1]);
            mass += w * area * v * v;
        }
    }
    (eps * grad + mass).sqrt()
}

/// `‖u_h − u_{2,h}‖_E` with both solutions computed on `mesh`.
pub fn estimate_error_1d(p: &TwoParamProblem, mesh: &Mesh1D) -> Result<f64> {
    let u1 = solve_spde_1d(p, mesh, Degree::P1)?;
    let u2 = solve_spde_1d(p, mesh, Degree::P2)?;
    Ok(energy_norm_1d(&u1.to_p2().sub(&u2)?, p.eps()))
}

pub fn estimate_error_2d(p: &TwoParamProblem, mesh: &Mesh2D) -> Result<f64> {
    let u1 = solve_spde_2d(p, mesh, Degree::P1)?;
    let u2 = solve_spde_2d(p, mesh, Degree::P2)?;
    Ok(energy_norm_2d(&u1.to_p2().sub(&u2)?, p.eps()))
}

/// One entry of a convergence table.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub eps: f64,
    pub mu: f64,
    pub n: usize,
    pub error: f64,
    /// `log2(E_{N/2} / E_N)`; absent for the first entry of a row.
    pub rate: Option<f64>,
    /// Fixed-point iterations spent on the final level.
    pub iterations: usize,
}

pub const REPORT_HEADER: &str = "eps,mu,N,error,rate,iterations";

impl ErrorReport {
    pub fn csv_row(&self) -> String {
        let rate = self.rate.map_or(String::new(), |r| format!("{r:.16e}"));
        format!(
            "{:.16e},{:.16e},{},{:.16e},{},{}",
            self.eps, self.mu, self.n, self.error, rate, self.iterations
        )
    }
}

pub fn rate(coarse: f64, fine: f64) -> f64 {
    if coarse == fine {
        return 0.0;
    }
    (coarse / fine).log2()
}

fn check_doublings(ns: &[usize]) -> Result<()> {
    if ns.is_empty() {
        return Err(Error::InvalidParameter("empty N list".into()));
    }
    if ns.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(Error::InvalidParameter(format!("N list must double consecutively: {ns:?}")));
    }
    Ok(())
}

fn fill_rates(rows: &mut [ErrorReport]) {
    for i in 1..rows.len() {
        rows[i].rate = Some(rate(rows[i - 1].error, rows[i].error));
    }
}

/// Error reports of one problem at each `N`, taken from a single generator
/// run up to the largest `N`.
pub fn convergence_row(
    p: &TwoParamProblem,
    ns: &[usize],
    dp: &DensityParams,
    opts: &DriverOptions,
) -> Result<Vec<ErrorReport>> {
    check_doublings(ns)?;
    let top = *ns.last().expect("non-empty");
    let mut rows = Vec::with_capacity(ns.len());
    match p.dim() {
        Dim::One => {
            let (levels, _) = generate_mesh_1d_levels(p, top, dp, opts)?;
            for &n in ns {
                let l = levels
                    .iter()
                    .find(|l| l.n == n)
                    .ok_or_else(|| Error::InvalidParameter(format!("N = {n} below the initial mesh")))?;
                rows.push(report(p, n, estimate_error_1d(p, &l.mesh)?, l.iterations));
            }
        }
        Dim::Two => {
            let (levels, _) = generate_mesh_2d_levels(p, top, dp, opts)?;
            for &n in ns {
                let l = levels
                    .iter()
                    .find(|l| l.n == n)
                    .ok_or_else(|| Error::InvalidParameter(format!("N = {n} below the initial mesh")))?;
                rows.push(report(p, n, estimate_error_2d(p, &l.mesh)?, l.iterations));
            }
        }
    }
    fill_rates(&mut rows);
    Ok(rows)
}

fn report(p: &TwoParamProblem, n: usize, error: f64, iterations: usize) -> ErrorReport {
    ErrorReport {
        eps: p.eps(),
        mu: p.mu(),
        n,
        error,
        rate: None,
        iterations,
    }
}

/// One ε row of a table; failures are kept so the remaining rows can still
/// be reported.
#[derive(Debug)]
pub struct TableRow {
    pub eps: f64,
    pub result: Result<Vec<ErrorReport>>,
}

/// Runs `convergence_row` for every ε. Rows are ordered as `eps_list`.
pub fn convergence_table(
    problem: &str,
    eps_list: &[f64],
    mu: f64,
    ns: &[usize],
    dp: &DensityParams,
    opts: &DriverOptions,
) -> Result<Vec<TableRow>> {
    check_doublings(ns)?;
    if eps_list.is_empty() {
        return Err(Error::InvalidParameter("empty eps list".into()));
    }
    Ok(eps_list
        .iter()
        .map(|&eps| TableRow {
            eps,
            result: make_problem(&ProblemId::new(problem, eps, mu)).and_then(|p| convergence_row(&p, ns, dp, opts)),
        })
        .collect())
}

/// Table as CSV; a failed row becomes a comment line.
pub fn table_csv(rows: &[TableRow], mu: f64) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{REPORT_HEADER}");
    for row in rows {
        match &row.result {
            Ok(reports) => {
                for r in reports {
                    let _ = writeln!(s, "{}", r.csv_row());
                }
            }
            Err(e) => {
                let _ = writeln!(s, "# failed eps={:.16e} mu={mu:.16e}: {e}", row.eps);
            }
        }
    }
    s
}

/// Largest relative deviation of the per-cell integral of the piecewise
/// linear interpolant of `rho` from its mean.
pub fn equidistribution_residual(mesh: &Mesh1D, rho: &[f64]) -> Result<f64> {
    let x = mesh.nodes();
    if rho.len() != x.len() {
        return Err(Error::Dimension(format!("{} density values for {} nodes", rho.len(), x.len())));
    }
    let cells: Vec<f64> = (0..mesh.n_cells())
        .map(|i| 0.5 * (rho[i] + rho[i + 1]) * (x[i + 1] - x[i]))
        .collect();
    let theta = cells.iter().sum::<f64>() / cells.len() as f64;
    Ok(cells.iter().map(|c| (c - theta).abs() / theta).fold(0.0, f64::max))
}

/// Fraction of mesh nodes where the layer term of `side` is at least 1.
pub fn layer_fraction(mesh: &Mesh1D, s: &LayerScales, dp: &DensityParams, side: crate::fem::End) -> f64 {
    let (ups, a) = match side {
        crate::fem::End::Left => (s.upsilon0, mesh.a()),
        crate::fem::End::Right => (s.upsilon1, mesh.b()),
    };
    if ups <= 0.0 {
        return 0.0;
    }
    let x = mesh.nodes();
    let inside = x
        .iter()
        .filter(|&&xi| layer_term(dp.k, ups, (xi - a).abs(), dp.sigma) >= 1.0)
        .count();
    inside as f64 / x.len() as f64
}

pub fn min_cell_width_1d(mesh: &Mesh1D) -> f64 {
    mesh.min_cell()
}

/// Shortest triangle edge.
pub fn min_cell_width_2d(mesh: &Mesh2D) -> f64 {
    mesh.min_edge()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::End;
    use proptest::prelude::*;

    #[test]
    fn norm_of_linear_interpolant() {
        let m = Mesh1D::uniform(8);
        let e = Field1D::interpolate(m.clone(), Degree::P1, |x| x);
        assert!((energy_norm_1d(&e, 1.0) - (4.0f64 / 3.0).sqrt()).abs() < 1e-13);
        assert!((energy_norm_1d(&e, 1e-16) - (1.0f64 / 3.0).sqrt()).abs() < 1e-8);
        let z = Field1D::interpolate(m, Degree::P2, |_| 0.0);
        assert_eq!(energy_norm_1d(&z, 1.0), 0.0);
    }

    #[test]
    fn norm_2d_of_linear_field() {
        let e = Field2D::interpolate(Mesh2D::identity(4), Degree::P1, |x, _| x);
        assert!((energy_norm_2d(&e, 1.0) - (4.0f64 / 3.0).sqrt()).abs() < 1e-13);
        let q = Field2D::interpolate(Mesh2D::identity(4), Degree::P2, |x, y| x * y);
        // ∫ x²y² = 1/9, ∫ |∇(xy)|² = 2/3
        assert!((energy_norm_2d(&q, 0.5) - (1.0f64 / 9.0 + 1.0 / 3.0).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn zero_source_gives_zero_estimate() {
        let p = make_problem(&ProblemId::new("rcd1d-exp", 1e-4, 1e-3))
            .unwrap()
            .with_source(std::sync::Arc::new(|_, _| 0.0));
        assert_eq!(estimate_error_1d(&p, &Mesh1D::uniform(32)).unwrap(), 0.0);
    }

    #[test]
    fn rates() {
        assert_eq!(rate(1e-3, 1e-3), 0.0);
        assert!((rate(4e-2, 2e-2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn doubling_check() {
        assert!(check_doublings(&[]).is_err());
        assert!(check_doublings(&[32, 128]).is_err());
        check_doublings(&[32, 64, 128]).unwrap();
    }

    #[test]
    fn csv_row_format() {
        let r = ErrorReport {
            eps: 1.0,
            mu: 1e-3,
            n: 32,
            error: 0.5,
            rate: None,
            iterations: 3,
        };
        assert_eq!(r.csv_row(), "1.0000000000000000e0,1.0000000000000000e-3,32,5.0000000000000000e-1,,3");
    }

    #[test]
    fn equidistribution_cases() {
        let m = Mesh1D::uniform(16);
        assert_eq!(equidistribution_residual(&m, &[1.0; 17]).unwrap(), 0.0);
        let rho: Vec<f64> = m
            .nodes()
            .iter()
            .map(|&x| 1.0 + 0.28 * 1e4 * (-1e4 * (1.0 - x) / 2.5).exp())
            .collect();
        assert!(equidistribution_residual(&m, &rho).unwrap() > 10.0);
    }

    #[test]
    fn layer_fraction_bounds() {
        let dp = DensityParams::default();
        let m = Mesh1D::uniform(16);
        let none = LayerScales { upsilon0: 0.0, upsilon1: 0.0 };
        assert_eq!(layer_fraction(&m, &none, &dp, End::Right), 0.0);
        let huge = LayerScales { upsilon0: 0.0, upsilon1: 1e3 };
        let tiny = Mesh1D::new(vec![1.0 - 1e-6, 1.0 - 5e-7, 1.0]).unwrap();
        assert_eq!(layer_fraction(&tiny, &huge, &dp, End::Right), 1.0);
    }

    #[test]
    fn min_widths() {
        assert_eq!(min_cell_width_1d(&Mesh1D::uniform(16)), 1.0 / 16.0);
        assert!((min_cell_width_2d(&Mesh2D::identity(16)) - 1.0 / 16.0).abs() < 1e-15);
    }

    fn field(coeffs: Vec<f64>) -> Field1D {
        let mesh = Mesh1D::new(vec![0.0, 0.1, 0.35, 0.4, 0.8, 1.0]).unwrap();
        Field1D::new(mesh, Degree::P2, coeffs).unwrap()
    }

    proptest! {
        #[test]
        fn norm_axioms(
            a in prop::collection::vec(-10.0f64..10.0, 11),
            b in prop::collection::vec(-10.0f64..10.0, 11),
            alpha in -5.0f64..5.0,
            eps in 1e-8f64..1.0,
        ) {
            let fa = field(a.clone());
            let fb = field(b.clone());
            let na = energy_norm_1d(&fa, eps);
            let nb = energy_norm_1d(&fb, eps);
            let sum = field(a.iter().zip(&b).map(|(x, y)| x + y).collect());
            prop_assert!(energy_norm_1d(&sum, eps) <= na + nb + 1e-12 * (na + nb).max(1.0));
            let scaled = field(a.iter().map(|x| alpha * x).collect());
            prop_assert!((energy_norm_1d(&scaled, eps) - alpha.abs() * na).abs() <= 1e-12 * na.max(1.0));
            prop_assert_eq!(na == 0.0, a.iter().all(|&x| x == 0.0));
        }
    }
}
