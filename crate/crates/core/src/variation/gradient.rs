use crate::energy::{check_exponent, density, density_cotangents, density_slots, Functional};
use crate::error::{PcurvError, Result};
use crate::geometry::{kernel, MAX_DIM};
use crate::real::Taylor2;
use crate::sum::{pairwise_sum, try_map_nodes};
use crate::surfaces::{AxisymProfile, Surface};

/// Discrete gradient of a functional with respect to the nodal dofs.
///
/// `grad` has the surface's dof layout; entries of frozen (Dirichlet) dofs are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationField {
    pub functional: Functional,
    pub p: f64,
    pub energy: f64,
    pub grad: Vec<f64>,
}

impl VariationField {
    pub fn norm(&self) -> f64 {
        pairwise_sum(&self.grad.iter().map(|g| g * g).collect::<Vec<_>>()).sqrt()
    }

    pub fn dot(&self, phi: &[f64]) -> f64 {
        pairwise_sum(&self.grad.iter().zip(phi).map(|(g, v)| g * v).collect::<Vec<_>>())
    }
}

/// `D𝓔(f)φ = ¼ Σ_j w_j [∂F/∂(Df)·Dφ + ∂F/∂(D²f)·D²φ]` with `Dφ`, `D²φ` realized
/// by the surface stencils. `φ` is expected to vanish on frozen dofs.
///
/// Smooth closed-form profiles use `¼ Σ_j w_j EL(t_j)·φ_j` with the exact
/// Euler–Lagrange expression instead, matching [`discrete_gradient`].
pub fn first_variation(surface: &Surface, p: f64, functional: Functional, phi: &[f64]) -> Result<f64> {
    check_exponent(p)?;
    if phi.len() != surface.dof_count() {
        return Err(PcurvError::ShapeMismatch { expected: surface.dof_count(), got: phi.len() });
    }
    if let Some(g) = analytic_gradient(surface, p, functional) {
        return Ok(g?.dot(phi));
    }
    let terms = try_map_nodes(surface.node_count(), |node| {
        let jet = surface.jet_at(node)?;
        let (_, cp, cq) = density_slots(functional, p, &jet).map_err(|e| e.at_node(node))?;
        let fj = surface.field_jet(phi, node)?;
        let n = jet.dim();
        let mut s = 0.0;
        for a in 0..2 {
            for i in 0..n {
                s += cp[a][i] * fj.df[a][i];
                for b in 0..2 {
                    s += cq[a][b][i] * fj.d2f[a][b][i];
                }
            }
        }
        Ok::<f64, PcurvError>(0.25 * surface.weight(node) * s)
    })?;
    Ok(pairwise_sum(&terms))
}

/// Exact gradient of the discrete energy: per-node slot cotangents pushed
/// through the adjoint of the stencils (cost linear in the node count).
///
/// Smooth closed-form profiles (sphere, catenoid, torus tube) have no dof
/// dependence in their energy; their gradient is the nodal Euler–Lagrange
/// expression `¼ w_j (E_r, E_z)(t_j)` with `E_r = C_r − C_{r′}′ + C_{r″}″`,
/// `E_z = −C_{z′}′ + C_{z″}″`, the `t`-derivatives of the cotangents taken
/// exactly with second-order Taylor arithmetic.
pub fn discrete_gradient(surface: &Surface, p: f64, functional: Functional) -> Result<VariationField> {
    check_exponent(p)?;
    if let Some(g) = analytic_gradient(surface, p, functional) {
        return g;
    }
    let slots = try_map_nodes(surface.node_count(), |node| {
        let jet = surface.jet_at(node)?;
        density_slots(functional, p, &jet).map_err(|e| e.at_node(node))
    })?;
    let mut grad = vec![0.0; surface.dof_count()];
    let mut dens = Vec::with_capacity(slots.len());
    for (node, (f, cp, cq)) in slots.iter().enumerate() {
        let w = 0.25 * surface.weight(node);
        dens.push(w * f);
        surface.scatter(node, cp, cq, w, &mut grad)?;
    }
    for (g, free) in grad.iter_mut().zip(surface.free_mask()) {
        if !free {
            *g = 0.0;
        }
    }
    Ok(VariationField { functional, p, energy: pairwise_sum(&dens), grad })
}

fn analytic_gradient(surface: &Surface, p: f64, functional: Functional) -> Option<Result<VariationField>> {
    let Surface::Axisym(profile) = surface else { return None };
    profile.analytic_derivatives(0)?;
    Some(profile_el_gradient(profile, p, functional))
}

fn profile_el_gradient(profile: &AxisymProfile, p: f64, functional: Functional) -> Result<VariationField> {
    let rows = try_map_nodes(profile.node_count(), |j| {
        let d = profile.analytic_derivatives(j).expect("smooth closed-form profile");
        let t = |k: usize, c: usize| Taylor2::new(d[k][c], d[k + 1][c], d[k + 2][c]);
        let zero = Taylor2::default();
        let mut df = [[zero; MAX_DIM]; 2];
        let mut d2f = [[[zero; MAX_DIM]; 2]; 2];
        df[0][0] = t(1, 0);
        df[0][2] = t(1, 1);
        df[1][1] = t(0, 0);
        d2f[0][0][0] = t(2, 0);
        d2f[0][0][2] = t(2, 1);
        d2f[0][1][1] = t(1, 0);
        d2f[1][0][1] = t(1, 0);
        d2f[1][1][0] = -t(0, 0);
        let k = kernel::<Taylor2>(3, &df, &d2f, true).map_err(|e| e.at_node(j))?;
        let (cp, cq) = density_cotangents(functional, p, &k);
        let c_r = cp[1][1] - cq[1][1][0];
        let c_rt = cp[0][0] + cq[0][1][1] + cq[1][0][1];
        let (c_rtt, c_zt, c_ztt) = (cq[0][0][0], cp[0][2], cq[0][0][2]);
        let w = 0.25 * profile.weight(j);
        let e_r = c_r.v - c_rt.d + c_rtt.dd;
        let e_z = -c_zt.d + c_ztt.dd;
        Ok::<[f64; 3], PcurvError>([w * density(functional, p, &k).v, w * e_r, w * e_z])
    })?;
    let dens: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let grad = rows.iter().flat_map(|r| [r[1], r[2]]).collect();
    Ok(VariationField { functional, p, energy: pairwise_sum(&dens), grad })
}

/// One spot check of [`discrete_gradient`] against a central difference.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GradCheckRow {
    pub dof: usize,
    pub gradient: f64,
    pub central_difference: f64,
    /// `|fd − g| / (|fd| + ‖g‖/√free)`
    pub rel_error: f64,
}

/// Compares `count` seeded random free dofs of the gradient with
/// `(E(f + t e_k) − E(f − t e_k)) / 2t`. Closed-form profiles are checked on
/// their sampled representation, whose energy actually depends on the dofs.
pub fn gradient_check(
    surface: &Surface,
    p: f64,
    functional: Functional,
    count: usize,
    step: f64,
    seed: u64,
) -> Result<Vec<GradCheckRow>> {
    use rand::Rng as _;
    if !(step > 0.0 && step.is_finite()) {
        return Err(crate::error::invalid("difference step must be positive"));
    }
    let s = surface.to_sampled();
    let g = discrete_gradient(&s, p, functional)?;
    let mask = s.free_mask();
    let free: Vec<usize> = (0..s.dof_count()).filter(|&k| mask[k]).collect();
    if free.is_empty() {
        return Ok(Vec::new());
    }
    let scale = g.norm() / (free.len() as f64).sqrt();
    let mut rng = crate::rng::stream(seed, 0);
    (0..count)
        .map(|_| {
            let k = free[rng.gen_range(0..free.len())];
            let mut e = vec![0.0; s.dof_count()];
            e[k] = 1.0;
            let ep = crate::energy::energy_value(&s.displaced(&e, step)?, functional, p)?;
            let em = crate::energy::energy_value(&s.displaced(&e, -step)?, functional, p)?;
            let fd = (ep - em) / (2.0 * step);
            let den = fd.abs() + scale;
            let rel_error = if den == 0.0 { 0.0 } else { (fd - g.grad[k]).abs() / den };
            Ok(GradCheckRow { dof: k, gradient: g.grad[k], central_difference: fd, rel_error })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::energy_value;
    use crate::rng;
    use crate::surfaces::{make_sphere, make_torus, perturb, GraphBoundary, GraphPatch, Surface};
    use rand::Rng;
    use std::f64::consts::PI;

    fn random_field(s: &Surface, seed: u64) -> Vec<f64> {
        let mut rng = rng::stream(seed, 9);
        let mask = s.free_mask();
        mask.iter().map(|&m| if m { rng.gen_range(-1.0..1.0) } else { 0.0 }).collect()
    }

    fn library() -> Vec<Surface> {
        let sphere = Surface::Axisym(make_sphere(1.0, 32).unwrap());
        let torus = Surface::Torus(make_torus(3, 2.0, 1.0, [12, 10]).unwrap());
        let torus4 = Surface::Torus(make_torus(4, 2.0, 1.0, [10, 10]).unwrap());
        let graph = Surface::Graph(
            GraphPatch::from_fn(3, [1.0, 1.0], [10, 9], GraphBoundary::DirichletFixed, |x, y| vec![0.3 * (x * y).sin()]).unwrap(),
        );
        let periodic = Surface::Graph(
            GraphPatch::from_fn(4, [1.0, 2.0], [8, 10], GraphBoundary::Periodic, |x, y| {
                vec![0.2 * (std::f64::consts::TAU * x).sin(), 0.1 * (std::f64::consts::PI * y).cos()]
            })
            .unwrap(),
        );
        vec![
            perturb(&sphere, 0.05, 1).unwrap(),
            perturb(&torus, 0.05, 2).unwrap(),
            perturb(&torus4, 0.05, 3).unwrap(),
            graph,
            periodic,
        ]
    }

    #[test]
    fn gradient_dot_equals_first_variation() {
        for s in library() {
            for f in [Functional::Ep, Functional::Wp] {
                let g = discrete_gradient(&s, 3.0, f).unwrap();
                for k in 0..10 {
                    let phi = random_field(&s, k);
                    let a = g.dot(&phi);
                    let b = first_variation(&s, 3.0, f, &phi).unwrap();
                    assert!((a - b).abs() <= 1e-12 * (a.abs() + b.abs()).max(1e-300) + 1e-14, "{} {a} {b}", s.kind());
                }
            }
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        for s in library() {
            for f in [Functional::Ep, Functional::Wp] {
                let g = discrete_gradient(&s, 2.5, f).unwrap();
                let mask = s.free_mask();
                let free: Vec<usize> = (0..s.dof_count()).filter(|&k| mask[k]).collect();
                let mut rng = rng::stream(5, 0);
                for _ in 0..10 {
                    let k = free[rng.gen_range(0..free.len())];
                    let mut e = vec![0.0; s.dof_count()];
                    e[k] = 1.0;
                    let t = 1e-6;
                    let ep = energy_value(&s.displaced(&e, t).unwrap(), f, 2.5).unwrap();
                    let em = energy_value(&s.displaced(&e, -t).unwrap(), f, 2.5).unwrap();
                    let fd = (ep - em) / (2.0 * t);
                    let scale = g.norm() / (free.len() as f64).sqrt();
                    assert!((fd - g.grad[k]).abs() <= 1e-5 * (fd.abs() + scale), "{} dof {k}: {fd} vs {}", s.kind(), g.grad[k]);
                }
            }
        }
    }

    #[test]
    fn gradient_check_rows_are_seeded() {
        let s = &library()[1];
        let a = gradient_check(s, 3.0, Functional::Wp, 6, 1e-6, 2).unwrap();
        assert_eq!(a, gradient_check(s, 3.0, Functional::Wp, 6, 1e-6, 2).unwrap());
        assert!(a.iter().all(|r| r.rel_error <= 1e-5));
        assert!(gradient_check(s, 3.0, Functional::Wp, 1, 0.0, 2).is_err());
    }

    #[test]
    fn flat_dirichlet_patch_is_critical() {
        let s = Surface::Graph(GraphPatch::flat(3, [1.0, 1.0], [10, 10], GraphBoundary::DirichletFixed).unwrap());
        let g = discrete_gradient(&s, 3.0, Functional::Ep).unwrap();
        assert!(g.norm() <= 1e-12);
        let phi = random_field(&s, 1);
        assert!(first_variation(&s, 3.0, Functional::Wp, &phi).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn translations_do_not_vary_closed_surfaces() {
        let torus = perturb(&Surface::Torus(make_torus(3, 2.0, 1.0, [16, 16]).unwrap()), 0.1, 4).unwrap();
        let c: Vec<f64> = (0..torus.dof_count()).map(|k| [0.3, -1.0, 0.7][k % 3]).collect();
        for f in [Functional::Ep, Functional::Wp] {
            let e = energy_value(&torus, f, 3.0).unwrap();
            assert!(first_variation(&torus, 3.0, f, &c).unwrap().abs() <= 1e-12 * e);
        }
        let sphere = perturb(&Surface::Axisym(make_sphere(1.0, 64).unwrap()), 0.05, 1).unwrap();
        let z: Vec<f64> = (0..sphere.dof_count()).map(|k| (k % 2) as f64).collect();
        let e = energy_value(&sphere, Functional::Ep, 3.0).unwrap();
        assert!(first_variation(&sphere, 3.0, Functional::Ep, &z).unwrap().abs() <= 1e-12 * e);
    }

    #[test]
    fn critical_sphere_has_small_gradient() {
        for p in [3.0, 4.0] {
            let s = Surface::Axisym(make_sphere((p - 2.0f64).sqrt(), 128).unwrap());
            let g = discrete_gradient(&s, p, Functional::Ep).unwrap();
            assert!(g.norm() <= 1e-6 * s.dof_count() as f64, "{}", g.norm());
        }
    }

    #[test]
    fn analytic_dilation_matches_sphere_family() {
        let (p, r) = (3.0, 1.5);
        let x = 1.0 + 2.0 / (r * r);
        let de = 2.0 * PI * r * x.powf(p / 2.0) - 2.0 * PI * p * x.powf(p / 2.0 - 1.0) / r;
        let s = Surface::Axisym(make_sphere(r, 128).unwrap());
        let dil = s.dofs().to_vec();
        let got = first_variation(&s, p, Functional::Ep, &dil).unwrap();
        assert!((got - r * de).abs() <= 1e-7 * (r * de).abs(), "{got} {}", r * de);
    }

    #[test]
    fn analytic_and_stencil_variations_agree_on_smooth_fields() {
        let errs: Vec<f64> = [32, 64]
            .iter()
            .map(|&m| {
                let a = make_sphere(1.2, m).unwrap();
                let phi: Vec<f64> = (0..m).flat_map(|j| {
                    let (r, z) = a.node_rz(j);
                    [r * (1.0 + z).cos(), (2.0 * z).sin() + r * r]
                }).collect();
                let x = first_variation(&Surface::Axisym(a.clone()), 4.0, Functional::Wp, &phi).unwrap();
                let y = first_variation(&Surface::Axisym(a.to_sampled()), 4.0, Functional::Wp, &phi).unwrap();
                (x - y).abs() / x.abs()
            })
            .collect();
        assert!(errs[1] < 1e-2 && errs[1] < 0.4 * errs[0], "{errs:?}");
    }
}
