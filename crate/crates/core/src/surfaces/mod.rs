//! Discrete surfaces: nodal degrees of freedom, centered difference stencils
//! and quadrature rules, plus a small library of analytic shapes.
//!
//! Every representation exposes the same contract to the energy and variation
//! code: a list of quadrature nodes with positive weights, a jet at each node,
//! the jet of an arbitrary nodal test field (same layout as the dofs), and the
//! adjoint of that linear map.

mod axisym;
mod graph;
mod io;
mod neck;
mod perturb;
mod torus;

pub use axisym::{AxisymProfile, Closure, ProfileJet, ProfileShape};
pub use graph::{GraphBoundary, GraphPatch};
pub use io::{write_mesh, write_node_table};
pub use neck::{make_neck_family, NeckProfile};
pub use perturb::perturb;
pub use torus::{make_skew_torus, make_torus, TorusGrid};

use crate::error::{PcurvError, Result};
use crate::geometry::{kernel, Jet2, Vecn, MAX_DIM};

/// Slot cotangents `∂F/∂(Df)` and `∂F/∂(D²f)` at one node.
pub(crate) type SlotP = [Vecn<f64>; 2];
pub(crate) type SlotQ = [[Vecn<f64>; 2]; 2];

/// Any of the supported surface representations.
#[derive(Debug, Clone, PartialEq)]
pub enum Surface {
    Graph(GraphPatch),
    Torus(TorusGrid),
    Axisym(AxisymProfile),
}

/// One area element used by ball-restricted integrals.
#[derive(Debug, Clone, Copy)]
pub struct AreaSample {
    pub x: [f64; 3],
    pub dmu: f64,
    pub abs_h: f64,
}

impl Surface {
    pub fn kind(&self) -> &'static str {
        match self {
            Surface::Graph(_) => "graph",
            Surface::Torus(_) => "torus",
            Surface::Axisym(_) => "axisym",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Surface::Graph(s) => s.dim(),
            Surface::Torus(s) => s.dim(),
            Surface::Axisym(_) => 3,
        }
    }

    /// Number of quadrature nodes.
    pub fn node_count(&self) -> usize {
        match self {
            Surface::Graph(s) => s.node_count(),
            Surface::Torus(s) => s.node_count(),
            Surface::Axisym(s) => s.node_count(),
        }
    }

    /// Parameter-space quadrature weight of a node.
    pub fn weight(&self, node: usize) -> f64 {
        match self {
            Surface::Graph(s) => s.weight(node),
            Surface::Torus(s) => s.weight(node),
            Surface::Axisym(s) => s.weight(node),
        }
    }

    /// Sum of all quadrature weights (the parameter-domain measure).
    pub fn parameter_area(&self) -> f64 {
        match self {
            Surface::Graph(s) => s.parameter_area(),
            Surface::Torus(s) => s.parameter_area(),
            Surface::Axisym(s) => s.parameter_area(),
        }
    }

    /// Jet of the immersion at a quadrature node; fails on non-immersed nodes.
    pub fn jet_at(&self, node: usize) -> Result<Jet2> {
        if node >= self.node_count() {
            return Err(PcurvError::StencilOutOfDomain { node });
        }
        let jet = match self {
            Surface::Graph(s) => s.jet_from(s.dofs(), node, false),
            Surface::Torus(s) => s.jet_from(s.dofs(), node),
            Surface::Axisym(s) => s.surface_jet(node)?,
        };
        kernel::<f64>(jet.dim(), &jet.df, &jet.d2f, false).map_err(|e| e.at_node(node))?;
        Ok(jet)
    }

    /// Jet of a nodal test field (dof layout) realized by the stencils.
    pub fn field_jet(&self, field: &[f64], node: usize) -> Result<Jet2> {
        self.check_len(field)?;
        Ok(match self {
            Surface::Graph(s) => s.jet_from(field, node, true),
            Surface::Torus(s) => s.jet_from(field, node),
            Surface::Axisym(s) => s.sampled_jet(field, node)?,
        })
    }

    /// Accumulates the adjoint of the stencil map: `out += Jᵀ (cp, cq) * scale`.
    pub(crate) fn scatter(&self, node: usize, cp: &SlotP, cq: &SlotQ, scale: f64, out: &mut [f64]) -> Result<()> {
        match self {
            Surface::Graph(s) => s.scatter(node, cp, cq, scale, out),
            Surface::Torus(s) => s.scatter(node, cp, cq, scale, out),
            Surface::Axisym(s) => s.scatter(node, cp, cq, scale, out)?,
        }
        Ok(())
    }

    pub fn dofs(&self) -> &[f64] {
        match self {
            Surface::Graph(s) => s.dofs(),
            Surface::Torus(s) => s.dofs(),
            Surface::Axisym(s) => s.dofs(),
        }
    }

    pub fn dof_count(&self) -> usize {
        self.dofs().len()
    }

    /// `true` for dofs the optimizer may move (Dirichlet rings are frozen).
    pub fn free_mask(&self) -> Vec<bool> {
        match self {
            Surface::Graph(s) => s.free_mask(),
            _ => vec![true; self.dof_count()],
        }
    }

    /// Same grid and metadata with new nodal values. Analytic profiles become sampled.
    pub fn with_dofs(&self, dofs: Vec<f64>) -> Result<Surface> {
        self.check_len(&dofs)?;
        Ok(match self {
            Surface::Graph(s) => Surface::Graph(s.with_dofs(dofs)),
            Surface::Torus(s) => Surface::Torus(s.with_dofs(dofs)),
            Surface::Axisym(s) => Surface::Axisym(s.with_dofs(dofs)),
        })
    }

    /// Pointwise normal part `P^⊥V` of a nodal field. Graph dofs are already
    /// transverse to the fixed parameter plane and are returned unchanged;
    /// frozen dofs stay zero.
    pub fn normal_part(&self, field: &[f64]) -> Result<Vec<f64>> {
        self.check_len(field)?;
        let n = self.dim();
        let stride = match self {
            Surface::Graph(_) => return Ok(field.to_vec()),
            Surface::Torus(_) => n,
            Surface::Axisym(_) => 2,
        };
        let rows = crate::sum::try_map_nodes(self.node_count(), |node| {
            let jet = self.jet_at(node)?;
            let mut v = [0.0; MAX_DIM];
            let x = &field[node * stride..(node + 1) * stride];
            if stride == 2 {
                v[0] = x[0];
                v[2] = x[1];
            } else {
                v[..n].copy_from_slice(x);
            }
            let g = |a: usize, b: usize| crate::geometry::dot(&jet.df[a], &jet.df[b], n);
            let det = g(0, 0) * g(1, 1) - g(0, 1) * g(0, 1);
            if !(det > 0.0) {
                return Err(PcurvError::DegenerateJet { node: Some(node), detg: det });
            }
            let gi = [[g(1, 1) / det, -g(0, 1) / det], [-g(0, 1) / det, g(0, 0) / det]];
            let c = [crate::geometry::dot(&v, &jet.df[0], n), crate::geometry::dot(&v, &jet.df[1], n)];
            let mut out = v;
            for a in 0..2 {
                let k = gi[a][0] * c[0] + gi[a][1] * c[1];
                for i in 0..n {
                    out[i] -= k * jet.df[a][i];
                }
            }
            Ok(if stride == 2 { vec![out[0], out[2]] } else { out[..n].to_vec() })
        })?;
        Ok(rows.concat())
    }

    /// Drops closed-form jets so that every derivative comes from the nodal values.
    pub fn to_sampled(&self) -> Surface {
        match self {
            Surface::Axisym(s) => Surface::Axisym(s.to_sampled()),
            other => other.clone(),
        }
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self, Surface::Axisym(s) if s.is_analytic())
    }

    /// The surface `f + t·φ`.
    pub fn displaced(&self, field: &[f64], t: f64) -> Result<Surface> {
        self.check_len(field)?;
        let dofs = self.dofs().iter().zip(field).map(|(x, v)| x + t * v).collect();
        self.with_dofs(dofs)
    }

    /// The surface `λ f` (graph patches scale their domain as well).
    pub fn scaled(&self, lambda: f64) -> Surface {
        match self {
            Surface::Graph(s) => Surface::Graph(s.scaled(lambda)),
            Surface::Torus(s) => Surface::Torus(s.scaled(lambda)),
            Surface::Axisym(s) => Surface::Axisym(s.scaled(lambda)),
        }
    }

    /// Euler characteristic from the representation tag; `None` if not closed.
    pub fn euler_characteristic(&self) -> Option<i32> {
        match self {
            Surface::Graph(_) => None,
            Surface::Torus(_) => Some(0),
            Surface::Axisym(s) => s.closure().euler_characteristic(),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.euler_characteristic().is_some()
    }

    /// Ambient position of a quadrature node (for axisymmetric profiles, at azimuth 0).
    pub fn position(&self, node: usize) -> Vec<f64> {
        match self {
            Surface::Graph(s) => s.position(node),
            Surface::Torus(s) => s.position(node),
            Surface::Axisym(s) => {
                let (r, z) = s.node_rz(node);
                vec![r, 0.0, z]
            }
        }
    }

    /// Parameter coordinates of a quadrature node.
    pub fn parameters(&self, node: usize) -> Vec<f64> {
        match self {
            Surface::Graph(s) => s.parameters(node).to_vec(),
            Surface::Torus(s) => s.parameters(node).to_vec(),
            Surface::Axisym(s) => vec![s.node_t(node)],
        }
    }

    /// Area elements with positions and `|H|` over the whole surface; axisymmetric
    /// profiles are swept through `azimuthal` equally spaced angles.
    pub fn area_samples(&self, azimuthal: usize) -> Result<Vec<AreaSample>> {
        if self.dim() != 3 {
            return Err(crate::error::invalid("area samples need an ambient dimension of 3"));
        }
        let mut out = Vec::new();
        for node in 0..self.node_count() {
            let jet = self.jet_at(node)?;
            let cd = crate::geometry::curvature_data(&jet).map_err(|e| e.at_node(node))?;
            let dmu = self.weight(node) * cd.sqrtdetg;
            let abs_h = cd.norm_h2.sqrt();
            match self {
                Surface::Axisym(s) => {
                    let (r, z) = s.node_rz(node);
                    let m = azimuthal.max(1);
                    let w = dmu / m as f64;
                    for k in 0..m {
                        let th = std::f64::consts::TAU * (k as f64 + 0.5) / m as f64;
                        out.push(AreaSample { x: [r * th.cos(), r * th.sin(), z], dmu: w, abs_h });
                    }
                }
                _ => {
                    let p = self.position(node);
                    out.push(AreaSample { x: [p[0], p[1], p[2]], dmu, abs_h });
                }
            }
        }
        Ok(out)
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dof_count() {
            return Err(PcurvError::ShapeMismatch { expected: self.dof_count(), got: v.len() });
        }
        Ok(())
    }

    /// Minimum `det g` over all quadrature nodes (no early exit on degeneracy).
    pub fn min_detg(&self) -> f64 {
        (0..self.node_count())
            .map(|node| {
                let jet = match self {
                    Surface::Graph(s) => s.jet_from(s.dofs(), node, false),
                    Surface::Torus(s) => s.jet_from(s.dofs(), node),
                    Surface::Axisym(s) => match s.surface_jet(node) {
                        Ok(j) => j,
                        Err(_) => return f64::NEG_INFINITY,
                    },
                };
                let g00 = crate::geometry::dot(&jet.df[0], &jet.df[0], jet.dim());
                let g11 = crate::geometry::dot(&jet.df[1], &jet.df[1], jet.dim());
                let g01 = crate::geometry::dot(&jet.df[0], &jet.df[1], jet.dim());
                g00 * g11 - g01 * g01
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Validates the immersion condition at every node.
    pub fn check_immersed(&self) -> Result<()> {
        for node in 0..self.node_count() {
            self.jet_at(node)?;
        }
        if let Surface::Axisym(s) = self {
            s.check_profile()?;
        }
        Ok(())
    }
}

impl From<GraphPatch> for Surface {
    fn from(s: GraphPatch) -> Self {
        Surface::Graph(s)
    }
}
impl From<TorusGrid> for Surface {
    fn from(s: TorusGrid) -> Self {
        Surface::Torus(s)
    }
}
impl From<AxisymProfile> for Surface {
    fn from(s: AxisymProfile) -> Self {
        Surface::Axisym(s)
    }
}

/// Centered second-order difference weights for first and second derivatives
/// on a uniform grid: neighbors at offsets −1, 0, +1.
#[inline]
pub(crate) fn d1(m: f64, p: f64, h: f64) -> f64 {
    (p - m) / (2.0 * h)
}
#[inline]
pub(crate) fn d2(m: f64, c: f64, p: f64, h: f64) -> f64 {
    (p - 2.0 * c + m) / (h * h)
}

/// Analytic round sphere of the given radius sampled at `m` half-offset nodes.
pub fn make_sphere(radius: f64, m: usize) -> Result<AxisymProfile> {
    AxisymProfile::sphere(radius, m)
}
