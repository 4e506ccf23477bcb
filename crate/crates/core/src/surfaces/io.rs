//! Plain-text mesh dumps and CSV node tables.
//!
//! Mesh format: one `v x y z …` line per vertex, then one `f i j k` line per
//! triangle with 1-based vertex indices (OBJ-compatible for `n = 3`). Grids are
//! triangulated row-major, two triangles per cell.

use super::{GraphBoundary, Surface};
use crate::error::Result;
use crate::geometry::curvature_data;
use std::io::Write;

/// Writes the surface as a triangulated grid; axisymmetric profiles are swept
/// through `azimuthal` angles.
pub fn write_mesh<W: Write>(surface: &Surface, azimuthal: usize, out: &mut W) -> Result<()> {
    let (rows, cols, wrap_rows, wrap_cols, verts): (usize, usize, bool, bool, Vec<Vec<f64>>) = match surface {
        Surface::Graph(g) => {
            let [n1, n2] = g.grid();
            let wrap = g.boundary() == GraphBoundary::Periodic;
            (n1, n2, wrap, wrap, (0..g.node_count()).map(|k| g.position(k)).collect())
        }
        Surface::Torus(t) => {
            let [n1, n2] = t.grid();
            (n1, n2, true, true, (0..t.node_count()).map(|k| t.position(k)).collect())
        }
        Surface::Axisym(s) => {
            let k = azimuthal.max(3);
            let mut v = Vec::with_capacity(s.node_count() * k);
            for j in 0..s.node_count() {
                let (r, z) = s.node_rz(j);
                for a in 0..k {
                    let th = std::f64::consts::TAU * a as f64 / k as f64;
                    v.push(vec![r * th.cos(), r * th.sin(), z]);
                }
            }
            let tube = s.closure() == super::Closure::PeriodicTube;
            (s.node_count(), k, tube, true, v)
        }
    };
    for v in &verts {
        write!(out, "v")?;
        for x in v {
            write!(out, " {x:.17e}")?;
        }
        writeln!(out)?;
    }
    let last_i = if wrap_rows { rows } else { rows - 1 };
    let last_j = if wrap_cols { cols } else { cols - 1 };
    let idx = |i: usize, j: usize| (i % rows) * cols + (j % cols) + 1;
    for i in 0..last_i {
        for j in 0..last_j {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            writeln!(out, "f {a} {b} {c}")?;
            writeln!(out, "f {a} {c} {d}")?;
        }
    }
    Ok(())
}

/// CSV with one row per quadrature node: index, parameters, position, |A|², |H|².
pub fn write_node_table<W: Write>(surface: &Surface, out: &mut W) -> Result<()> {
    let params = surface.parameters(0).len();
    let n = surface.dim();
    let mut header = vec!["node".to_string()];
    header.extend((1..=params).map(|k| format!("t{k}")));
    header.extend((1..=n).map(|k| format!("f{k}")));
    header.push("norm_a2".into());
    header.push("norm_h2".into());
    writeln!(out, "{}", header.join(","))?;
    for node in 0..surface.node_count() {
        let cd = curvature_data(&surface.jet_at(node)?).map_err(|e| e.at_node(node))?;
        let mut row = vec![node.to_string()];
        row.extend(surface.parameters(node).iter().map(|x| format!("{x:.17e}")));
        row.extend(surface.position(node).iter().map(|x| format!("{x:.17e}")));
        row.push(format!("{:.17e}", cd.norm_a2));
        row.push(format!("{:.17e}", cd.norm_h2));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::{make_torus, AxisymProfile};

    #[test]
    fn torus_mesh_counts() {
        let s = Surface::Torus(make_torus(3, 2.0, 1.0, [8, 10]).unwrap());
        let mut buf = Vec::new();
        write_mesh(&s, 0, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 80);
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 160);
    }

    #[test]
    fn sphere_node_table_has_one_row_per_node() {
        let s = Surface::Axisym(AxisymProfile::sphere(1.0, 16).unwrap());
        let mut buf = Vec::new();
        write_node_table(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "node,t1,f1,f2,f3,norm_a2,norm_h2");
        assert_eq!(lines.count(), 16);
    }
}
