use crate::error::Result;
use crate::geometry::curvature_data;
use crate::surfaces::{GraphPatch, Surface};

/// Residual of the prescribed mean curvature system of a graph,
/// `g^{αβ}(δ_{ij} − g^{λμ}∂_λu^i ∂_μu^j) ∂²_{αβ}u^i − H^{j+2}`, per node and
/// component (row-major, `n − 2` values per node). The left side is assembled
/// directly from the stencil derivatives of `u`; `H` comes from the curvature kernel.
pub fn mean_curvature_residual(graph: &GraphPatch) -> Result<Vec<f64>> {
    let surface = Surface::Graph(graph.clone());
    let m = graph.dim() - 2;
    let mut out = Vec::with_capacity(surface.node_count() * m);
    for node in 0..surface.node_count() {
        let jet = surface.jet_at(node)?;
        let h = curvature_data(&jet).map_err(|e| e.at_node(node))?.h;
        let du = |a: usize, i: usize| jet.df[a][i + 2];
        let d2u = |a: usize, b: usize, i: usize| jet.d2f[a][b][i + 2];
        let mut g = [[0.0; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                g[a][b] = if a == b { 1.0 } else { 0.0 } + (0..m).map(|i| du(a, i) * du(b, i)).sum::<f64>();
            }
        }
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        let gi = [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]];
        for j in 0..m {
            let mut lhs = 0.0;
            for i in 0..m {
                let mut proj = if i == j { 1.0 } else { 0.0 };
                for l in 0..2 {
                    for mu in 0..2 {
                        proj -= gi[l][mu] * du(l, i) * du(mu, j);
                    }
                }
                for a in 0..2 {
                    for b in 0..2 {
                        lhs += gi[a][b] * proj * d2u(a, b, i);
                    }
                }
            }
            out.push(lhs - h[j + 2]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::GraphBoundary;

    #[test]
    fn flat_graph_has_zero_residual() {
        let g = GraphPatch::flat(4, [1.0, 1.0], [8, 8], GraphBoundary::Periodic).unwrap();
        assert!(mean_curvature_residual(&g).unwrap().iter().all(|&r| r == 0.0));
    }

    #[test]
    fn paraboloid_center() {
        let g = GraphPatch::from_fn(3, [2.0, 2.0], [21, 21], GraphBoundary::DirichletFixed, |x, y| {
            vec![0.5 * ((x - 1.0).powi(2) + (y - 1.0).powi(2))]
        })
        .unwrap();
        let r = mean_curvature_residual(&g).unwrap();
        assert!(r[10 * 21 + 10].abs() <= 1e-10);
        let s = Surface::Graph(g);
        let h = curvature_data(&s.jet_at(10 * 21 + 10).unwrap()).unwrap().h;
        assert!((h[2] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn random_smooth_patch() {
        let g = GraphPatch::from_fn(5, [1.0, 1.5], [14, 11], GraphBoundary::Periodic, |x, y| {
            let (a, b) = (std::f64::consts::TAU * x, std::f64::consts::TAU * y / 1.5);
            vec![0.3 * (a + b).sin(), 0.2 * a.cos() * b.sin(), 0.1 * (2.0 * b).cos()]
        })
        .unwrap();
        let r = mean_curvature_residual(&g).unwrap();
        assert!(r.iter().all(|x| x.abs() <= 1e-10));
    }
}
