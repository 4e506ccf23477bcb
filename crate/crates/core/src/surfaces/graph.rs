use super::{d1, d2, SlotP, SlotQ};
use crate::error::{invalid, Result};
use crate::geometry::{check_dim, Jet2, Vecn, MAX_DIM};

/// Boundary treatment of a graph patch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphBoundary {
    /// Doubly periodic, `N` nodes per direction at spacing `L/N`.
    Periodic,
    /// `N` domain nodes at spacing `L/(N−1)` plus one padding ring outside the
    /// rectangle. The padding ring and the domain boundary ring are frozen.
    DirichletFixed,
}

/// A graph `f(x) = (x, u(x))` over a rectangle with `u: Ω → R^{n−2}`.
///
/// Values live on a storage grid (`S₁×S₂` nodes, `n−2` components per node,
/// row-major). For Dirichlet patches the storage grid is the domain grid plus
/// one padding ring; quadrature runs over the domain nodes with trapezoid weights.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphPatch {
    n: usize,
    lengths: [f64; 2],
    nodes: [usize; 2],
    bc: GraphBoundary,
    spacing: [f64; 2],
    storage: [usize; 2],
    u: Vec<f64>,
}

impl GraphPatch {
    /// Samples `u` (returning `n−2` values) on the grid, padding included.
    pub fn from_fn<F>(n: usize, lengths: [f64; 2], nodes: [usize; 2], bc: GraphBoundary, u: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Vec<f64>,
    {
        check_dim(n)?;
        if nodes[0] < 8 || nodes[1] < 8 {
            return Err(invalid("graph patches need at least 8 nodes per direction"));
        }
        if !(lengths[0] > 0.0 && lengths[1] > 0.0) {
            return Err(invalid("graph patch side lengths must be positive"));
        }
        let (spacing, storage) = match bc {
            GraphBoundary::Periodic => ([lengths[0] / nodes[0] as f64, lengths[1] / nodes[1] as f64], nodes),
            GraphBoundary::DirichletFixed => (
                [lengths[0] / (nodes[0] - 1) as f64, lengths[1] / (nodes[1] - 1) as f64],
                [nodes[0] + 2, nodes[1] + 2],
            ),
        };
        let m = n - 2;
        let mut patch = GraphPatch { n, lengths, nodes, bc, spacing, storage, u: vec![0.0; storage[0] * storage[1] * m] };
        for i in 0..storage[0] {
            for j in 0..storage[1] {
                let x = patch.storage_coords(i, j);
                let val = u(x[0], x[1]);
                if val.len() != m {
                    return Err(crate::error::PcurvError::ShapeMismatch { expected: m, got: val.len() });
                }
                let base = (i * storage[1] + j) * m;
                patch.u[base..base + m].copy_from_slice(&val);
            }
        }
        Ok(patch)
    }

    /// The flat patch `u ≡ 0`.
    pub fn flat(n: usize, lengths: [f64; 2], nodes: [usize; 2], bc: GraphBoundary) -> Result<Self> {
        Self::from_fn(n, lengths, nodes, bc, |_, _| vec![0.0; n - 2])
    }

    pub fn dim(&self) -> usize {
        self.n
    }
    pub fn boundary(&self) -> GraphBoundary {
        self.bc
    }
    pub fn lengths(&self) -> [f64; 2] {
        self.lengths
    }
    pub fn grid(&self) -> [usize; 2] {
        self.nodes
    }
    pub fn spacing(&self) -> [f64; 2] {
        self.spacing
    }
    pub fn storage_grid(&self) -> [usize; 2] {
        self.storage
    }
    pub(crate) fn dofs(&self) -> &[f64] {
        &self.u
    }

    pub fn node_count(&self) -> usize {
        self.nodes[0] * self.nodes[1]
    }

    pub fn parameter_area(&self) -> f64 {
        self.lengths[0] * self.lengths[1]
    }

    /// Storage coordinates of a quadrature node.
    pub(crate) fn node_storage(&self, node: usize) -> (usize, usize) {
        let (i, j) = (node / self.nodes[1], node % self.nodes[1]);
        match self.bc {
            GraphBoundary::Periodic => (i, j),
            GraphBoundary::DirichletFixed => (i + 1, j + 1),
        }
    }

    fn storage_coords(&self, i: usize, j: usize) -> [f64; 2] {
        let off = match self.bc {
            GraphBoundary::Periodic => 0.0,
            GraphBoundary::DirichletFixed => 1.0,
        };
        [(i as f64 - off) * self.spacing[0], (j as f64 - off) * self.spacing[1]]
    }

    pub fn parameters(&self, node: usize) -> [f64; 2] {
        let (i, j) = self.node_storage(node);
        self.storage_coords(i, j)
    }

    pub fn weight(&self, node: usize) -> f64 {
        let h = self.spacing[0] * self.spacing[1];
        match self.bc {
            GraphBoundary::Periodic => h,
            GraphBoundary::DirichletFixed => {
                let (i, j) = (node / self.nodes[1], node % self.nodes[1]);
                let ci = if i == 0 || i + 1 == self.nodes[0] { 0.5 } else { 1.0 };
                let cj = if j == 0 || j + 1 == self.nodes[1] { 0.5 } else { 1.0 };
                h * ci * cj
            }
        }
    }

    pub fn position(&self, node: usize) -> Vec<f64> {
        let (i, j) = self.node_storage(node);
        let x = self.storage_coords(i, j);
        let m = self.n - 2;
        let base = self.sidx(i, j) * m;
        let mut p = vec![x[0], x[1]];
        p.extend_from_slice(&self.u[base..base + m]);
        p
    }

    #[inline]
    fn sidx(&self, i: usize, j: usize) -> usize {
        i * self.storage[1] + j
    }

    #[inline]
    fn neighbors(&self, i: usize, j: usize) -> ([usize; 3], [usize; 3]) {
        let [s0, s1] = self.storage;
        match self.bc {
            GraphBoundary::Periodic => ([(i + s0 - 1) % s0, i, (i + 1) % s0], [(j + s1 - 1) % s1, j, (j + 1) % s1]),
            GraphBoundary::DirichletFixed => ([i - 1, i, i + 1], [j - 1, j, j + 1]),
        }
    }

    /// Jet at a quadrature node of `data` (dof layout). With `as_field` only the
    /// vertical components are filled; otherwise the graph coordinates are added.
    pub(crate) fn jet_from(&self, data: &[f64], node: usize, as_field: bool) -> Jet2 {
        let (i, j) = self.node_storage(node);
        let (ii, jj) = self.neighbors(i, j);
        let m = self.n - 2;
        let [h1, h2] = self.spacing;
        let at = |a: usize, b: usize, c: usize| data[self.sidx(ii[a], jj[b]) * m + c];
        let mut f: Vecn<f64> = [0.0; MAX_DIM];
        let mut df = [[0.0; MAX_DIM]; 2];
        let mut d2f = [[[0.0; MAX_DIM]; 2]; 2];
        if !as_field {
            let x = self.storage_coords(i, j);
            f[0] = x[0];
            f[1] = x[1];
            df[0][0] = 1.0;
            df[1][1] = 1.0;
        }
        for c in 0..m {
            let k = c + 2;
            f[k] = at(1, 1, c);
            df[0][k] = d1(at(0, 1, c), at(2, 1, c), h1);
            df[1][k] = d1(at(1, 0, c), at(1, 2, c), h2);
            d2f[0][0][k] = d2(at(0, 1, c), at(1, 1, c), at(2, 1, c), h1);
            d2f[1][1][k] = d2(at(1, 0, c), at(1, 1, c), at(1, 2, c), h2);
            let mixed = (at(2, 2, c) - at(2, 0, c) - at(0, 2, c) + at(0, 0, c)) / (4.0 * h1 * h2);
            d2f[0][1][k] = mixed;
            d2f[1][0][k] = mixed;
        }
        Jet2::from_parts(self.n, f, df, d2f)
    }

    pub(crate) fn scatter(&self, node: usize, cp: &SlotP, cq: &SlotQ, scale: f64, out: &mut [f64]) {
        let (i, j) = self.node_storage(node);
        let (ii, jj) = self.neighbors(i, j);
        let m = self.n - 2;
        let [h1, h2] = self.spacing;
        for c in 0..m {
            let k = c + 2;
            let mut add = |a: usize, b: usize, v: f64| {
                out[self.sidx(ii[a], jj[b]) * m + c] += scale * v;
            };
            let p0 = cp[0][k] / (2.0 * h1);
            add(2, 1, p0);
            add(0, 1, -p0);
            let p1 = cp[1][k] / (2.0 * h2);
            add(1, 2, p1);
            add(1, 0, -p1);
            let q00 = cq[0][0][k] / (h1 * h1);
            add(0, 1, q00);
            add(1, 1, -2.0 * q00);
            add(2, 1, q00);
            let q11 = cq[1][1][k] / (h2 * h2);
            add(1, 0, q11);
            add(1, 1, -2.0 * q11);
            add(1, 2, q11);
            let q01 = (cq[0][1][k] + cq[1][0][k]) / (4.0 * h1 * h2);
            add(2, 2, q01);
            add(2, 0, -q01);
            add(0, 2, -q01);
            add(0, 0, q01);
        }
    }

    pub(crate) fn free_mask(&self) -> Vec<bool> {
        let m = self.n - 2;
        let [s0, s1] = self.storage;
        let mut mask = vec![true; self.u.len()];
        if self.bc == GraphBoundary::DirichletFixed {
            for i in 0..s0 {
                for j in 0..s1 {
                    let frozen = i < 2 || j < 2 || i + 2 >= s0 || j + 2 >= s1;
                    if frozen {
                        let b = self.sidx(i, j) * m;
                        mask[b..b + m].iter_mut().for_each(|x| *x = false);
                    }
                }
            }
        }
        mask
    }

    pub(crate) fn with_dofs(&self, u: Vec<f64>) -> GraphPatch {
        GraphPatch { u, ..self.clone() }
    }

    pub(crate) fn scaled(&self, lambda: f64) -> GraphPatch {
        GraphPatch {
            lengths: [self.lengths[0] * lambda, self.lengths[1] * lambda],
            spacing: [self.spacing[0] * lambda, self.spacing[1] * lambda],
            u: self.u.iter().map(|x| x * lambda).collect(),
            ..self.clone()
        }
    }

    /// Parameter coordinates of the storage node carrying `dof`, and the graph component.
    pub fn dof_coords(&self, dof: usize) -> ([f64; 2], usize) {
        let m = self.n - 2;
        let s = dof / m;
        let (i, j) = (s / self.storage[1], s % self.storage[1]);
        (self.storage_coords(i, j), dof % m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::curvature_data;
    use crate::surfaces::Surface;

    #[test]
    fn flat_patch_jets_are_flat() {
        for bc in [GraphBoundary::Periodic, GraphBoundary::DirichletFixed] {
            let s = Surface::Graph(GraphPatch::flat(3, [1.0, 1.0], [10, 12], bc).unwrap());
            for node in 0..s.node_count() {
                let cd = curvature_data(&s.jet_at(node).unwrap()).unwrap();
                assert_eq!(cd.g, [[1.0, 0.0], [0.0, 1.0]]);
                assert_eq!(cd.norm_a2, 0.0);
                assert_eq!(cd.norm_h2, 0.0);
            }
            let total: f64 = (0..s.node_count()).map(|k| s.weight(k)).sum();
            assert!((total - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn quadratic_is_differentiated_exactly() {
        let s = GraphPatch::from_fn(3, [2.0, 1.0], [9, 9], GraphBoundary::DirichletFixed, |x, y| {
            vec![0.5 * x * x + 0.25 * x * y - y * y]
        })
        .unwrap();
        let jet = s.jet_from(s.dofs(), 40, false);
        let x = s.parameters(40);
        assert!((jet.df[0][2] - (x[0] + 0.25 * x[1])).abs() < 1e-12);
        assert!((jet.df[1][2] - (0.25 * x[0] - 2.0 * x[1])).abs() < 1e-12);
        assert!((jet.d2f[0][0][2] - 1.0).abs() < 1e-10);
        assert!((jet.d2f[0][1][2] - 0.25).abs() < 1e-10);
        assert!((jet.d2f[1][1][2] + 2.0).abs() < 1e-10);
    }

    #[test]
    fn dirichlet_freezes_two_rings() {
        let s = GraphPatch::flat(4, [1.0, 1.0], [8, 8], GraphBoundary::DirichletFixed).unwrap();
        let mask = s.free_mask();
        assert_eq!(mask.len(), 10 * 10 * 2);
        assert_eq!(mask.iter().filter(|&&b| b).count(), 6 * 6 * 2);
        assert!(GraphPatch::flat(3, [1.0, 1.0], [7, 8], GraphBoundary::Periodic).is_err());
    }
}
