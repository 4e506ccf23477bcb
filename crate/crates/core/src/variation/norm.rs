use super::gradient::{discrete_gradient, first_variation};
use crate::energy::{check_exponent, Functional};
use crate::error::{invalid, PcurvError, Result};
use crate::geometry::{christoffel, curvature_data, metric_derivative, MAX_DIM};
use crate::rng;
use crate::sum::{pairwise_sum, try_map_nodes};
use crate::surfaces::Surface;
use rand::Rng as _;

/// The three integrals making up `‖V‖^p_{W^{2,p}_f}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct W2pParts {
    /// `∫|∇(DV)|^p_g dμ`
    pub hessian: f64,
    /// `∫|DV|^p_g dμ`
    pub gradient: f64,
    /// `∫|V|^p dμ`
    pub value: f64,
}

impl W2pParts {
    pub fn norm(&self, p: f64) -> f64 {
        (self.hessian + self.gradient + self.value).powf(1.0 / p)
    }
}

/// Quadrature of `|∇(DV)|^p_g`, `|DV|^p_g` and `|V|^p` for a nodal field in dof layout.
/// The covariant Hessian is `∂²_{αβ}V − Γ^γ_{αβ} ∂_γ V`, indices raised by `g`.
pub fn w2p_norm_parts(surface: &Surface, field: &[f64], p: f64) -> Result<W2pParts> {
    if !(p >= 1.0) {
        return Err(invalid("norm exponent must be ≥ 1"));
    }
    if field.len() != surface.dof_count() {
        return Err(PcurvError::ShapeMismatch { expected: surface.dof_count(), got: field.len() });
    }
    let rows = try_map_nodes(surface.node_count(), |node| {
        let jet = surface.jet_at(node)?;
        let cd = curvature_data(&jet).map_err(|e| e.at_node(node))?;
        let gam = christoffel(&cd.g, &metric_derivative(&jet)).map_err(|e| e.at_node(node))?.gamma;
        let v = surface.field_jet(field, node)?;
        let n = jet.dim();
        let gi = cd.ginv;
        let dot = |x: &[f64; MAX_DIM], y: &[f64; MAX_DIM]| (0..n).map(|i| x[i] * y[i]).sum::<f64>();
        let mut dv2 = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                dv2 += gi[a][b] * dot(&v.df[a], &v.df[b]);
            }
        }
        let mut c = [[[0.0; MAX_DIM]; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                for i in 0..n {
                    c[a][b][i] = v.d2f[a][b][i] - gam[0][a][b] * v.df[0][i] - gam[1][a][b] * v.df[1][i];
                }
            }
        }
        let mut h2 = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                for g in 0..2 {
                    for l in 0..2 {
                        h2 += gi[a][g] * gi[b][l] * dot(&c[a][b], &c[g][l]);
                    }
                }
            }
        }
        let v2 = dot(&v.f, &v.f);
        let dmu = surface.weight(node) * cd.sqrtdetg;
        let pw = |x2: f64| if x2 <= 0.0 { 0.0 } else { x2.max(0.0).powf(0.5 * p) };
        Ok::<[f64; 3], PcurvError>([dmu * pw(h2), dmu * pw(dv2), dmu * pw(v2)])
    })?;
    let col = |k: usize| pairwise_sum(&rows.iter().map(|r| r[k]).collect::<Vec<_>>());
    Ok(W2pParts { hessian: col(0), gradient: col(1), value: col(2) })
}

/// `‖V‖_{W^{2,p}_f} = (∫|∇(DV)|^p_g + |DV|^p_g + |V|^p dμ)^{1/p}`.
pub fn w2p_norm(surface: &Surface, field: &[f64], p: f64) -> Result<f64> {
    Ok(w2p_norm_parts(surface, field, p)?.norm(p))
}

/// Dictionary lower bound on the dual norm `sup{D𝓔(f)V : ‖V‖_{W^{2,p}_f} ≤ 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PSNormReport {
    pub surrogate: f64,
    pub dictionary_size: usize,
    /// Index of the maximizing dictionary element (0 is the discrete gradient).
    pub best_index: usize,
    pub best_direction: Vec<f64>,
}

/// Ambient test field `R^n → R^n` used by the dictionary.
enum AmbientField {
    /// `Σ_k c_k sin(ω_k·x + φ_k)` with seeded coefficients.
    Random { terms: Vec<(Vec<f64>, Vec<f64>, f64)> },
    /// `sin` or `cos` of `ω x_axis` in one component.
    Trig { component: usize, axis: usize, omega: f64, cosine: bool },
}

impl AmbientField {
    fn eval(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        match self {
            AmbientField::Random { terms } => {
                for (c, w, ph) in terms {
                    let arg: f64 = w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + ph;
                    let s = arg.sin();
                    for (o, ci) in out.iter_mut().zip(c) {
                        *o += ci * s;
                    }
                }
            }
            AmbientField::Trig { component, axis, omega, cosine } => {
                let a = omega * x[*axis];
                out[*component] = if *cosine { a.cos() } else { a.sin() };
            }
        }
    }
}

const RANDOM_TERMS: usize = 4;
const MAX_FREQUENCY: f64 = 3.0;

/// Dictionary element `k ≥ 1`: odd indices are seeded random band-limited
/// fields, even indices enumerate low-frequency trigonometric fields.
fn dictionary_element(n: usize, k: usize, seed: u64) -> AmbientField {
    if k % 2 == 1 {
        let mut rng = rng::stream(seed, k as u64);
        let terms = (0..RANDOM_TERMS)
            .map(|_| {
                let c = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let w = (0..n).map(|_| rng.gen_range(-MAX_FREQUENCY..MAX_FREQUENCY) / (n as f64).sqrt()).collect();
                (c, w, rng.gen_range(0.0..std::f64::consts::TAU))
            })
            .collect();
        AmbientField::Random { terms }
    } else {
        let j = k / 2 - 1;
        let cosine = j % 2 == 1;
        let j = j / 2;
        let component = j % n;
        let axis = (j / n) % n;
        let omega = (1 + j / (n * n)) as f64;
        AmbientField::Trig { component, axis, omega, cosine }
    }
}

/// Samples an ambient field at the nodes in dof layout. Graph fields act on the
/// vertical components and vanish on frozen dofs; axisymmetric fields use
/// `V_r = r F₀(r², 0, z)`, `V_z = F₂(r², 0, z)` so they are smooth at the poles.
fn sample_field(surface: &Surface, f: &AmbientField) -> Vec<f64> {
    let n = surface.dim();
    let mut out = vec![0.0; surface.dof_count()];
    let mut buf = vec![0.0; n];
    match surface {
        Surface::Torus(_) => {
            for node in 0..surface.node_count() {
                f.eval(&surface.position(node), &mut buf);
                out[node * n..(node + 1) * n].copy_from_slice(&buf);
            }
        }
        Surface::Axisym(s) => {
            for j in 0..s.node_count() {
                let (r, z) = s.node_rz(j);
                f.eval(&[r * r, 0.0, z], &mut buf);
                out[2 * j] = r * buf[0];
                out[2 * j + 1] = buf[2];
            }
        }
        Surface::Graph(g) => {
            let m = n - 2;
            let mask = surface.free_mask();
            for dof in 0..out.len() {
                if !mask[dof] {
                    continue;
                }
                let (x, c) = g.dof_coords(dof);
                let storage = dof / m;
                let mut pos = vec![x[0], x[1]];
                pos.extend_from_slice(&surface.dofs()[storage * m..(storage + 1) * m]);
                f.eval(&pos, &mut buf);
                out[dof] = buf[c + 2];
            }
        }
    }
    out
}

/// Max of `|D𝓔(f)V| / ‖V‖_{W^{2,p}_f}` over a dictionary of `dictionary_size`
/// fields: the discrete gradient, then alternating seeded random band-limited
/// and low-frequency trigonometric ambient fields. Dictionaries with a common
/// seed are nested, and fields defined through ambient positions make the
/// value invariant under reparametrizations that permute nodes.
///
/// Every test field is replaced by its normal part `P^⊥V`: tangential fields
/// only reparametrize, so their first variation is pure discretization error.
pub fn ps_norm_surrogate(
    surface: &Surface,
    p: f64,
    functional: Functional,
    dictionary_size: usize,
    seed: u64,
) -> Result<PSNormReport> {
    check_exponent(p)?;
    if dictionary_size == 0 {
        return Err(invalid("dictionary size must be at least 1"));
    }
    let grad = discrete_gradient(surface, p, functional)?.grad;
    surrogate_with_gradient(surface, p, functional, &grad, dictionary_size, seed)
}

/// [`ps_norm_surrogate`] with the discrete gradient already at hand.
pub(crate) fn surrogate_with_gradient(
    surface: &Surface,
    p: f64,
    functional: Functional,
    grad: &[f64],
    dictionary_size: usize,
    seed: u64,
) -> Result<PSNormReport> {
    if dictionary_size == 0 {
        return Err(invalid("dictionary size must be at least 1"));
    }
    let mut best = (0.0, 0usize, grad.to_vec());
    for k in 0..dictionary_size {
        let v = if k == 0 { grad.to_vec() } else { sample_field(surface, &dictionary_element(surface.dim(), k, seed)) };
        let v = surface.normal_part(&v)?;
        let norm = w2p_norm(surface, &v, p)?;
        if !(norm > 0.0) {
            continue;
        }
        let ratio = first_variation(surface, p, functional, &v)?.abs() / norm;
        if ratio > best.0 {
            best = (ratio, k, v);
        }
    }
    Ok(PSNormReport { surrogate: best.0, dictionary_size, best_index: best.1, best_direction: best.2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::{make_sphere, make_torus, perturb, GraphBoundary, GraphPatch};

    #[test]
    fn constant_field_norm() {
        let s = Surface::Torus(make_torus(3, 2.0, 1.0, [24, 24]).unwrap());
        let c = [0.3, -0.4, 1.2];
        let v: Vec<f64> = (0..s.dof_count()).map(|k| c[k % 3]).collect();
        let area = crate::energy::energy_ep(&s, 2.0).unwrap().area;
        let cn = (c.iter().map(|x| x * x).sum::<f64>()).sqrt();
        for p in [2.0, 3.0] {
            let got = w2p_norm(&s, &v, p).unwrap();
            assert!((got - cn * area.powf(1.0 / p)).abs() <= 1e-12 * got);
        }
    }

    #[test]
    fn linear_field_on_flat_patch() {
        let g = GraphPatch::flat(3, [1.0, 1.0], [12, 12], GraphBoundary::DirichletFixed).unwrap();
        let s = Surface::Graph(g.clone());
        let v: Vec<f64> = (0..s.dof_count()).map(|d| g.dof_coords(d).0[0]).collect();
        let p = 3.0;
        let parts = w2p_norm_parts(&s, &v, p).unwrap();
        assert!((parts.gradient - 1.0).abs() <= 1e-12);
        assert!(parts.hessian <= 1e-12);
        let oracle: f64 = (0..s.node_count()).map(|k| s.weight(k) * s.parameters(k)[0].powf(p)).sum();
        assert!((parts.value - oracle).abs() <= 1e-12);
    }

    #[test]
    fn flat_patch_surrogate_vanishes() {
        let s = Surface::Graph(GraphPatch::flat(3, [1.0, 1.0], [10, 10], GraphBoundary::DirichletFixed).unwrap());
        let r = ps_norm_surrogate(&s, 3.0, Functional::Ep, 16, 1).unwrap();
        assert!(r.surrogate <= 1e-12);
    }

    #[test]
    fn nested_dictionaries_are_monotone() {
        let s = perturb(&Surface::Axisym(make_sphere(1.0, 48).unwrap()), 0.05, 3).unwrap();
        let vals: Vec<f64> = [4, 16, 64].iter().map(|&d| ps_norm_surrogate(&s, 3.0, Functional::Ep, d, 7).unwrap().surrogate).collect();
        assert!(vals[0] <= vals[1] && vals[1] <= vals[2]);
        assert!(vals[0] > 0.0);
    }

    #[test]
    fn torus_shift_invariance() {
        let t = perturb(&Surface::Torus(make_torus(3, 2.0, 1.0, [16, 12]).unwrap()), 0.05, 1).unwrap();
        let Surface::Torus(grid) = &t else { unreachable!() };
        let shifted = Surface::Torus(grid.shifted(5, 7));
        let v: Vec<f64> = (0..t.dof_count()).map(|k| ((k * 7919) % 13) as f64 / 13.0).collect();
        let vs = grid.shift_field(&v, 5, 7);
        let (a, b) = (w2p_norm(&t, &v, 3.0).unwrap(), w2p_norm(&shifted, &vs, 3.0).unwrap());
        assert!((a - b).abs() <= 1e-13 * a);
        let (a, b) = (
            ps_norm_surrogate(&t, 3.0, Functional::Wp, 8, 2).unwrap().surrogate,
            ps_norm_surrogate(&shifted, 3.0, Functional::Wp, 8, 2).unwrap().surrogate,
        );
        assert!((a - b).abs() <= 1e-13 * a, "{a} {b}");
    }

    #[test]
    fn critical_sphere_surrogate() {
        for p in [3.0, 4.0] {
            let s = Surface::Axisym(make_sphere((p - 2.0f64).sqrt(), 128).unwrap());
            let r = ps_norm_surrogate(&s, p, Functional::Ep, 64, 1).unwrap();
            assert!(r.surrogate <= 1e-6, "{}", r.surrogate);
        }
    }
}
