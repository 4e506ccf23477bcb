use super::{GraphBoundary, Surface};
use crate::error::{PcurvError, Result};
use crate::geometry::curvature_data;
use crate::rng;
use rand::Rng as _;
use std::f64::consts::PI;

/// Highest Fourier mode of the random displacement.
const MODES: usize = 4;
const MAX_HALVINGS: u32 = 8;

/// Adds a smooth random displacement of size `amplitude` along the normal
/// directions (vertical for graph patches), deterministic in `seed`. If the
/// result is not immersed the amplitude is halved, at most 8 times.
pub fn perturb(surface: &Surface, amplitude: f64, seed: u64) -> Result<Surface> {
    if amplitude == 0.0 {
        return Ok(surface.clone());
    }
    let field = displacement_field(surface, seed)?;
    let mut amp = amplitude;
    for _ in 0..=MAX_HALVINGS {
        if let Ok(s) = surface.displaced(&field, amp) {
            if s.check_immersed().is_ok() {
                return Ok(s);
            }
        }
        amp *= 0.5;
    }
    Err(PcurvError::PerturbationDegenerate { halvings: MAX_HALVINGS })
}

/// Random trigonometric polynomial on `[0, 1]²` (or `[0, 1]` when `v` is unused).
struct Modes {
    c: Vec<[f64; 4]>,
}

impl Modes {
    fn draw(rng: &mut rng::Rng, two_d: bool) -> Modes {
        let count = if two_d { (MODES + 1) * (MODES + 1) } else { MODES + 1 };
        Modes { c: (0..count).map(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0))).collect() }
    }

    /// Periodic in both arguments with period 1.
    fn periodic(&self, u: f64, v: f64) -> f64 {
        let mut acc = 0.0;
        for k in 0..=MODES {
            for l in 0..=MODES {
                let [a, b, c, d] = self.c[k * (MODES + 1) + l];
                let (x, y) = (2.0 * PI * k as f64 * u, 2.0 * PI * l as f64 * v);
                acc += (a * x.cos() + b * x.sin()) * (c * y.cos() + d * y.sin());
            }
        }
        acc
    }

    /// Cosine series in one variable, even about both ends of `[0, 1]`.
    fn cosine(&self, u: f64) -> f64 {
        (0..=MODES).map(|k| self.c[k][0] * (PI * k as f64 * u).cos()).sum()
    }
}

fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let m = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if m > 0.0 {
        v.iter_mut().for_each(|x| *x /= m);
    }
    v
}

fn displacement_field(surface: &Surface, seed: u64) -> Result<Vec<f64>> {
    let mut rng = rng::stream(seed, 0);
    let mut out = vec![0.0; surface.dof_count()];
    match surface {
        Surface::Axisym(s) => {
            let modes = Modes::draw(&mut rng, false);
            let [t0, t1] = s.t_range();
            for j in 0..s.node_count() {
                let pj = s.profile_jet(j)?;
                let w = pj.speed();
                let d = modes.cosine((s.node_t(j) - t0) / (t1 - t0));
                out[2 * j] = d * pj.zt / w;
                out[2 * j + 1] = -d * pj.rt / w;
            }
        }
        Surface::Torus(s) => {
            let n = s.dim();
            let comps: Vec<Modes> = (0..n).map(|_| Modes::draw(&mut rng, true)).collect();
            for node in 0..s.node_count() {
                let th = s.parameters(node);
                let v: Vec<f64> = comps.iter().map(|m| m.periodic(th[0] / (2.0 * PI), th[1] / (2.0 * PI))).collect();
                let cd = curvature_data(&surface.jet_at(node)?)?;
                for i in 0..n {
                    out[node * n + i] = (0..n).map(|k| cd.pperp[i][k] * v[k]).sum();
                }
            }
        }
        Surface::Graph(g) => {
            let m = g.dim() - 2;
            let comps: Vec<Modes> = (0..m).map(|_| Modes::draw(&mut rng, true)).collect();
            let [l1, l2] = g.lengths();
            let [h1, h2] = g.spacing();
            for (dof, slot) in out.iter_mut().enumerate() {
                let (x, c) = g.dof_coords(dof);
                let (u, v) = (x[0] / l1, x[1] / l2);
                *slot = match g.boundary() {
                    GraphBoundary::Periodic => comps[c].periodic(u, v),
                    GraphBoundary::DirichletFixed => {
                        let taper = |x: f64, l: f64, h: f64| {
                            let s = (x - h) / (l - 2.0 * h);
                            if s <= 0.0 || s >= 1.0 {
                                0.0
                            } else {
                                (PI * s).sin().powi(2)
                            }
                        };
                        taper(x[0], l1, h1) * taper(x[1], l2, h2) * comps[c].periodic(u, v)
                    }
                };
            }
        }
    }
    Ok(normalize(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::{make_torus, GraphPatch, AxisymProfile};

    #[test]
    fn zero_amplitude_is_identity() {
        let s = Surface::Axisym(AxisymProfile::sphere(1.0, 64).unwrap());
        assert_eq!(perturb(&s, 0.0, 7).unwrap(), s);
    }

    #[test]
    fn same_seed_same_surface() {
        let s = Surface::Torus(make_torus(3, 2.0, 1.0, [16, 16]).unwrap());
        let a = perturb(&s, 0.05, 3).unwrap();
        let b = perturb(&s, 0.05, 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, perturb(&s, 0.05, 4).unwrap());
    }

    #[test]
    fn dirichlet_rings_stay_fixed() {
        let g = GraphPatch::flat(3, [1.0, 1.0], [12, 12], GraphBoundary::DirichletFixed).unwrap();
        let s = Surface::Graph(g);
        let p = perturb(&s, 0.1, 1).unwrap();
        let mask = s.free_mask();
        for (k, &free) in mask.iter().enumerate() {
            if !free {
                assert_eq!(p.dofs()[k], 0.0);
            }
        }
        assert!(p.dofs().iter().any(|&x| x != 0.0));
    }

    #[test]
    fn displacement_is_bounded_by_amplitude() {
        let s = Surface::Axisym(AxisymProfile::sphere(1.0, 128).unwrap());
        let p = perturb(&s, 0.05, 1).unwrap();
        let max = s.dofs().iter().zip(p.dofs()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(max <= 0.05 + 1e-15 && max > 0.0);
    }
}
