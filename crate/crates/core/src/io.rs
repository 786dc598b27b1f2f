//! Plain-text mesh formats, legacy VTK export and CSV helpers.
//!
//! Every writer takes a list of `key=value` header entries that are emitted
//! as `#` comment lines ahead of the data.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fem::{Mesh1D, Mesh2D};

/// Header comment lines, one `# key=value` per entry.
pub fn header(params: &[(&str, String)]) -> String {
    let mut s = String::new();
    for (k, v) in params {
        let _ = writeln!(s, "# {k}={v}");
    }
    s
}

/// `N <n>` followed by one node per line.
pub fn write_mesh1d(mesh: &Mesh1D, params: &[(&str, String)]) -> String {
    let mut s = header(params);
    let _ = writeln!(s, "N {}", mesh.n_cells());
    for x in mesh.nodes() {
        let _ = writeln!(s, "{x:.16e}");
    }
    s
}

pub fn read_mesh1d(text: &str) -> Result<Mesh1D> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let head = lines.next().ok_or_else(|| Error::Parse("missing `N <n>` line".into()))?;
    let n: usize = head
        .strip_prefix('N')
        .map(str::trim)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad header line `{head}`")))?;
    let nodes = lines
        .map(|l| l.parse::<f64>().map_err(|e| Error::Parse(format!("`{l}`: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    if nodes.len() != n + 1 {
        return Err(Error::Parse(format!("expected {} nodes, found {}", n + 1, nodes.len())));
    }
    Mesh1D::new(nodes)
}

/// Nodal values, one `x value` pair per line.
pub fn write_nodal_1d(mesh: &Mesh1D, values: &[f64], params: &[(&str, String)]) -> String {
    let mut s = header(params);
    s.push_str("x,u\n");
    for (x, v) in mesh.nodes().iter().zip(values) {
        let _ = writeln!(s, "{x:.16e},{v:.16e}");
    }
    s
}

/// Lexicographic dump: `N <n>` then `k i j x y [value]` per node.
pub fn write_lexicographic(mesh: &Mesh2D, values: Option<&[f64]>, params: &[(&str, String)]) -> String {
    let mut s = header(params);
    let _ = writeln!(s, "N {}", mesh.n());
    for (k, c) in mesh.coords().iter().enumerate() {
        let (i, j) = mesh.grid_position(k);
        let _ = write!(s, "{k} {i} {j} {:.16e} {:.16e}", c[0], c[1]);
        if let Some(v) = values {
            let _ = write!(s, " {:.16e}", v[k]);
        }
        s.push('\n');
    }
    s
}

pub fn read_lexicographic(text: &str) -> Result<Mesh2D> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let head = lines.next().ok_or_else(|| Error::Parse("missing `N <n>` line".into()))?;
    let n: usize = head
        .strip_prefix('N')
        .map(str::trim)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad header line `{head}`")))?;
    let mut coords = Vec::with_capacity((n + 1) * (n + 1));
    for l in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() < 5 {
            return Err(Error::Parse(format!("short line `{l}`")));
        }
        let p = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("`{s}`: {e}")));
        coords.push([p(f[3])?, p(f[4])?]);
    }
    Mesh2D::new(n, coords)
}

/// Legacy ASCII VTK unstructured grid of triangles. The title line carries
/// the header entries; `values` become point data named `u`.
pub fn write_vtk(mesh: &Mesh2D, values: Option<&[f64]>, params: &[(&str, String)]) -> String {
    let mut s = String::from("# vtk DataFile Version 3.0\n");
    let title: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let title = if title.is_empty() {
        "layermesh".to_string()
    } else {
        title.join(" ")
    };
    let _ = writeln!(s, "{title}");
    s.push_str("ASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(s, "POINTS {} double", mesh.n_nodes());
    for c in mesh.coords() {
        let _ = writeln!(s, "{:.16e} {:.16e} 0", c[0], c[1]);
    }
    let tris = mesh.triangles();
    let _ = writeln!(s, "CELLS {} {}", tris.len(), 4 * tris.len());
    for t in &tris {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(s, "CELL_TYPES {}", tris.len());
    for _ in &tris {
        s.push_str("5\n");
    }
    if let Some(v) = values {
        let _ = writeln!(s, "POINT_DATA {}", mesh.n_nodes());
        s.push_str("SCALARS u double 1\nLOOKUP_TABLE default\n");
        for x in v {
            let _ = writeln!(s, "{x:.16e}");
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh1d_round_trip() {
        let m = Mesh1D::new(vec![0.0, 1.0 / 3.0, 0.7, 1.0 - 1e-12, 1.0]).unwrap();
        let text = write_mesh1d(&m, &[("eps", "1e-8".into())]);
        assert!(text.starts_with("# eps=1e-8\nN 4\n"));
        assert_eq!(read_mesh1d(&text).unwrap(), m);
    }

    #[test]
    fn mesh1d_parse_errors() {
        assert!(read_mesh1d("").is_err());
        assert!(read_mesh1d("N 2\n0\n1\n").is_err());
        assert!(read_mesh1d("M 1\n0\n1\n").is_err());
        assert!(read_mesh1d("N 1\n0\nx\n").is_err());
    }

    #[test]
    fn lexicographic_round_trip() {
        let m = Mesh2D::identity(4);
        let text = write_lexicographic(&m, None, &[]);
        assert_eq!(read_lexicographic(&text).unwrap(), m);
    }

    #[test]
    fn vtk_layout() {
        let m = Mesh2D::identity(2);
        let v = vec![0.0; 9];
        let text = write_vtk(&m, Some(&v), &[("n", "2".into())]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "n=2");
        assert!(text.contains("POINTS 9 double"));
        assert!(text.contains("CELLS 8 32"));
        assert!(text.contains("CELL_TYPES 8"));
        assert!(text.contains("POINT_DATA 9"));
        assert_eq!(lines.iter().filter(|l| **l == "5").count(), 8);
    }
}
