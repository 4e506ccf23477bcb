use super::{d1, d2, SlotP, SlotQ};
use crate::error::{invalid, Result};
use crate::geometry::{check_dim, Jet2, MAX_DIM};
use std::f64::consts::TAU;

/// Doubly periodic grid of nodal positions over `[0, 2π)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusGrid {
    n: usize,
    grid: [usize; 2],
    f: Vec<f64>,
}

impl TorusGrid {
    /// Samples `f(θ₁, θ₂)` (length `n`) at nodes `θ = 2π k / N`.
    pub fn from_fn<F>(n: usize, grid: [usize; 2], f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Vec<f64>,
    {
        check_dim(n)?;
        if grid[0] < 8 || grid[1] < 8 {
            return Err(invalid("torus grids need at least 8 nodes per direction"));
        }
        let mut data = Vec::with_capacity(grid[0] * grid[1] * n);
        for i in 0..grid[0] {
            for j in 0..grid[1] {
                let v = f(TAU * i as f64 / grid[0] as f64, TAU * j as f64 / grid[1] as f64);
                if v.len() != n {
                    return Err(crate::error::PcurvError::ShapeMismatch { expected: n, got: v.len() });
                }
                data.extend_from_slice(&v);
            }
        }
        Ok(TorusGrid { n, grid, f: data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }
    pub fn grid(&self) -> [usize; 2] {
        self.grid
    }
    pub(crate) fn dofs(&self) -> &[f64] {
        &self.f
    }
    pub fn node_count(&self) -> usize {
        self.grid[0] * self.grid[1]
    }
    pub fn spacing(&self) -> [f64; 2] {
        [TAU / self.grid[0] as f64, TAU / self.grid[1] as f64]
    }
    pub fn weight(&self, _node: usize) -> f64 {
        let h = self.spacing();
        h[0] * h[1]
    }
    pub fn parameter_area(&self) -> f64 {
        TAU * TAU
    }
    pub fn parameters(&self, node: usize) -> [f64; 2] {
        let h = self.spacing();
        [(node / self.grid[1]) as f64 * h[0], (node % self.grid[1]) as f64 * h[1]]
    }
    pub fn position(&self, node: usize) -> Vec<f64> {
        self.f[node * self.n..(node + 1) * self.n].to_vec()
    }

    /// Cyclic re-indexing of the nodes by `(s₁, s₂)`: node `(i, j)` of the result is
    /// node `(i + s₁, j + s₂)` of `self`.
    pub fn shifted(&self, s1: usize, s2: usize) -> TorusGrid {
        let [g0, g1] = self.grid;
        let n = self.n;
        let mut f = vec![0.0; self.f.len()];
        for i in 0..g0 {
            for j in 0..g1 {
                let src = ((i + s1) % g0) * g1 + (j + s2) % g1;
                let dst = i * g1 + j;
                f[dst * n..(dst + 1) * n].copy_from_slice(&self.f[src * n..(src + 1) * n]);
            }
        }
        TorusGrid { f, ..self.clone() }
    }

    /// The same cyclic re-indexing applied to a nodal field in dof layout.
    pub fn shift_field(&self, field: &[f64], s1: usize, s2: usize) -> Vec<f64> {
        TorusGrid { f: field.to_vec(), ..self.clone() }.shifted(s1, s2).f
    }

    #[inline]
    fn neighbors(&self, node: usize) -> ([usize; 3], [usize; 3]) {
        let [g0, g1] = self.grid;
        let (i, j) = (node / g1, node % g1);
        ([(i + g0 - 1) % g0, i, (i + 1) % g0], [(j + g1 - 1) % g1, j, (j + 1) % g1])
    }

    pub(crate) fn jet_from(&self, data: &[f64], node: usize) -> Jet2 {
        let (ii, jj) = self.neighbors(node);
        let g1 = self.grid[1];
        let n = self.n;
        let [h1, h2] = self.spacing();
        let at = |a: usize, b: usize, c: usize| data[(ii[a] * g1 + jj[b]) * n + c];
        let mut f = [0.0; MAX_DIM];
        let mut df = [[0.0; MAX_DIM]; 2];
        let mut d2f = [[[0.0; MAX_DIM]; 2]; 2];
        for c in 0..n {
            f[c] = at(1, 1, c);
            df[0][c] = d1(at(0, 1, c), at(2, 1, c), h1);
            df[1][c] = d1(at(1, 0, c), at(1, 2, c), h2);
            d2f[0][0][c] = d2(at(0, 1, c), at(1, 1, c), at(2, 1, c), h1);
            d2f[1][1][c] = d2(at(1, 0, c), at(1, 1, c), at(1, 2, c), h2);
            let mixed = (at(2, 2, c) - at(2, 0, c) - at(0, 2, c) + at(0, 0, c)) / (4.0 * h1 * h2);
            d2f[0][1][c] = mixed;
            d2f[1][0][c] = mixed;
        }
        Jet2::from_parts(n, f, df, d2f)
    }

    pub(crate) fn scatter(&self, node: usize, cp: &SlotP, cq: &SlotQ, scale: f64, out: &mut [f64]) {
        let (ii, jj) = self.neighbors(node);
        let g1 = self.grid[1];
        let n = self.n;
        let [h1, h2] = self.spacing();
        for c in 0..n {
            let mut add = |a: usize, b: usize, v: f64| out[(ii[a] * g1 + jj[b]) * n + c] += scale * v;
            let p0 = cp[0][c] / (2.0 * h1);
            add(2, 1, p0);
            add(0, 1, -p0);
            let p1 = cp[1][c] / (2.0 * h2);
            add(1, 2, p1);
            add(1, 0, -p1);
            let q00 = cq[0][0][c] / (h1 * h1);
            add(0, 1, q00);
            add(1, 1, -2.0 * q00);
            add(2, 1, q00);
            let q11 = cq[1][1][c] / (h2 * h2);
            add(1, 0, q11);
            add(1, 1, -2.0 * q11);
            add(1, 2, q11);
            let q01 = (cq[0][1][c] + cq[1][0][c]) / (4.0 * h1 * h2);
            add(2, 2, q01);
            add(2, 0, -q01);
            add(0, 2, -q01);
            add(0, 0, q01);
        }
    }

    pub(crate) fn with_dofs(&self, f: Vec<f64>) -> TorusGrid {
        TorusGrid { f, ..self.clone() }
    }

    pub(crate) fn scaled(&self, lambda: f64) -> TorusGrid {
        TorusGrid { f: self.f.iter().map(|x| x * lambda).collect(), ..self.clone() }
    }
}

/// Torus of revolution with center-circle radius `big_r` and tube radius `a`,
/// embedded in the first three coordinates of `R^n`.
pub fn make_torus(n: usize, big_r: f64, a: f64, grid: [usize; 2]) -> Result<TorusGrid> {
    if !(a > 0.0 && big_r > a) {
        return Err(invalid(format!("torus needs R > a > 0 (R = {big_r}, a = {a})")));
    }
    TorusGrid::from_fn(n, grid, |t1, t2| {
        let rho = big_r + a * t1.cos();
        let mut v = vec![0.0; n];
        v[0] = rho * t2.cos();
        v[1] = rho * t2.sin();
        v[2] = a * t1.sin();
        v
    })
}

/// Embedded torus without rotational or reflection symmetry:
/// `ρ = 2 + cos u + 0.2 sin(u + 2v)`, `f = (ρ cos v, ρ sin v + 0.3 cos 2u, sin u + 0.1 cos 3v)`.
pub fn make_skew_torus(grid: [usize; 2]) -> Result<TorusGrid> {
    TorusGrid::from_fn(3, grid, |u, v| {
        let rho = 2.0 + u.cos() + 0.2 * (u + 2.0 * v).sin();
        vec![rho * v.cos(), rho * v.sin() + 0.3 * (2.0 * u).cos(), u.sin() + 0.1 * (3.0 * v).cos()]
    })
}
