//! Monotonicity ratios, the catenoid-neck scan and the identity suite.

use crate::energy::{energy, energy_value, scaling_check, willmore, Functional};
use crate::error::{invalid, PcurvError, Result};
use crate::surfaces::{make_neck_family, Surface};
use crate::variation::ps_norm_surrogate;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub center: [f64; 3],
    pub sigmas: Vec<f64>,
    /// `σ⁻² μ(Σ ∩ B_σ)`
    pub ratios: Vec<f64>,
    /// `∫_{Σ∩B_σ} |H| dμ`
    pub ball_abs_h: Vec<f64>,
    /// `¼𝒲 + (2σ)⁻¹ ∫_{Σ∩B_σ} |H| dμ`
    pub rhs_simon: Vec<f64>,
    /// `¼𝒲 + C σ^{(p−2)/p}` with the fitted `C`.
    pub rhs_es: Vec<f64>,
    pub es_constant: f64,
    pub willmore: f64,
}

impl MonotonicityReport {
    /// `min_σ (rhs_simon − ratio)`.
    pub fn min_slack(&self) -> f64 {
        self.rhs_simon.iter().zip(&self.ratios).map(|(r, q)| r - q).fold(f64::INFINITY, f64::min)
    }
}

/// Area ratios of `Σ ∩ B_σ(center)` with sharp 0/1 node weights. Axisymmetric
/// profiles are swept through `azimuthal` angles; other surfaces ignore it.
pub fn monotonicity_scan(
    surface: &Surface,
    center: [f64; 3],
    sigmas: &[f64],
    p: f64,
    azimuthal: usize,
) -> Result<MonotonicityReport> {
    if !surface.is_closed() {
        return Err(PcurvError::NotClosed);
    }
    if sigmas.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
        return Err(invalid("radii must be positive"));
    }
    crate::energy::check_exponent(p)?;
    if let Some(d) = self_intersection_hint(surface) {
        log::warn!("surface may self-intersect: non-adjacent nodes {d:.3e} apart");
    }
    let w = willmore(surface)?.willmore;
    let samples = surface.area_samples(azimuthal)?;
    let mut dist: Vec<(f64, f64, f64)> = samples
        .iter()
        .map(|s| {
            let d2: f64 = (0..3).map(|i| (s.x[i] - center[i]).powi(2)).sum();
            (d2.sqrt(), s.dmu, s.dmu * s.abs_h)
        })
        .collect();
    dist.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut ratios = Vec::with_capacity(sigmas.len());
    let mut ball_abs_h = Vec::with_capacity(sigmas.len());
    let mut rhs_simon = Vec::with_capacity(sigmas.len());
    for &s in sigmas {
        let inside = dist.partition_point(|d| d.0 <= s);
        let area = crate::sum::pairwise_sum(&dist[..inside].iter().map(|d| d.1).collect::<Vec<_>>());
        let h = crate::sum::pairwise_sum(&dist[..inside].iter().map(|d| d.2).collect::<Vec<_>>());
        ratios.push(area / (s * s));
        ball_abs_h.push(h);
        rhs_simon.push(0.25 * w + h / (2.0 * s));
    }
    let e = (p - 2.0) / p;
    let es_constant = sigmas
        .iter()
        .zip(&ratios)
        .map(|(s, r)| (r - 0.25 * w) / s.powf(e))
        .fold(0.0, f64::max);
    let rhs_es = sigmas.iter().map(|s| 0.25 * w + es_constant * s.powf(e)).collect();
    Ok(MonotonicityReport { center, sigmas: sigmas.to_vec(), ratios, ball_abs_h, rhs_simon, rhs_es, es_constant, willmore: w })
}

/// Smallest distance between nodes at least four grid steps apart, when it is
/// below half the largest neighbor spacing. Large grids are subsampled.
pub fn self_intersection_hint(surface: &Surface) -> Option<f64> {
    let n = surface.node_count();
    let pts: Vec<Vec<f64>> = (0..n).map(|j| surface.position(j)).collect();
    let d = |a: usize, b: usize| pts[a].iter().zip(&pts[b]).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    type Steps = Box<dyn Fn(usize, usize) -> usize + Sync>;
    let (steps, neighbors): (Steps, Vec<(usize, usize)>) = match surface {
        Surface::Graph(_) => return None,
        Surface::Axisym(_) => (Box::new(|a: usize, b: usize| a.abs_diff(b)), (1..n).map(|j| (j - 1, j)).collect()),
        Surface::Torus(t) => {
            let [g0, g1] = t.grid();
            let cyc = move |a: usize, b: usize, g: usize| a.abs_diff(b).min(g - a.abs_diff(b));
            let nb = (0..n).flat_map(|k| [(k, ((k / g1 + 1) % g0) * g1 + k % g1), (k, (k / g1) * g1 + (k % g1 + 1) % g1)]).collect();
            (Box::new(move |a: usize, b: usize| cyc(a / g1, b / g1, g0).max(cyc(a % g1, b % g1, g1))), nb)
        }
    };
    let spacing = neighbors.iter().map(|&(a, b)| d(a, b)).fold(0.0, f64::max);
    let stride = (n / 4096).max(1);
    let min = (0..n)
        .into_par_iter()
        .step_by(stride)
        .map(|a| (0..n).step_by(stride).filter(|&b| steps(a, b) >= 4).map(|b| d(a, b)).fold(f64::INFINITY, f64::min))
        .reduce(|| f64::INFINITY, f64::min);
    (min < 0.5 * spacing).then_some(min)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeckScanReport {
    pub p: f64,
    pub m: usize,
    pub eps: Vec<f64>,
    pub ep: Vec<f64>,
    pub wp: Vec<f64>,
    pub willmore: Vec<f64>,
    pub area: Vec<f64>,
    /// Least-squares slope of `log E^p` against `log eps`.
    pub slope: f64,
    /// Same fit after subtracting `2·E^p` of the unit sphere.
    pub excess_slope: f64,
}

impl NeckScanReport {
    pub fn wp_spread(&self) -> f64 {
        let max = self.wp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.wp.iter().copied().fold(f64::INFINITY, f64::min);
        max / min
    }
}

pub(crate) fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Energies of the sphere–catenoid–sphere family for each neck scale.
pub fn neck_scan(eps: &[f64], p: f64, m: usize) -> Result<NeckScanReport> {
    crate::energy::check_exponent(p)?;
    if eps.len() < 2 {
        return Err(invalid("neck scan needs at least two scales"));
    }
    if eps.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(invalid("neck scales must be strictly decreasing"));
    }
    let rows = eps
        .par_iter()
        .map(|&e| {
            let s = Surface::Axisym(make_neck_family(e, m)?);
            let ep = energy(&s, Functional::Ep, p, false)?;
            let wp = energy_value(&s, Functional::Wp, p)?;
            Ok((ep.value, wp, ep.willmore, ep.area))
        })
        .collect::<Result<Vec<_>>>()?;
    let lx: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let ep: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let two_spheres = 2.0 * PI * 3f64.powf(0.5 * p);
    let slope = ls_slope(&lx, &ep.iter().map(|v| v.ln()).collect::<Vec<_>>());
    let excess: Vec<f64> = ep.iter().map(|v| (v - two_spheres).max(f64::MIN_POSITIVE).ln()).collect();
    Ok(NeckScanReport {
        p,
        m,
        eps: eps.to_vec(),
        wp: rows.iter().map(|r| r.1).collect(),
        willmore: rows.iter().map(|r| r.2).collect(),
        area: rows.iter().map(|r| r.3).collect(),
        ep,
        slope,
        excess_slope: ls_slope(&lx, &excess),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityRow {
    pub shape: String,
    pub check: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub error: Option<String>,
}

/// Scale factor used by the scaling rows.
pub const SUITE_SCALE: f64 = 1.7;

/// Gauss–Bonnet defect, scaling residuals, `p`-monotonicity and (for tori)
/// cyclic-shift invariance over a set of named surfaces. Each check produces
/// one row; failures of the numerics are recorded in the row.
pub fn identity_suite(shapes: &[(String, Surface)], ps: &[f64]) -> Result<Vec<IdentityRow>> {
    if ps.is_empty() || ps.iter().any(|&p| !(p >= 2.0 && p.is_finite())) {
        return Err(invalid("p grid must be non-empty with p ≥ 2"));
    }
    let mut rows = Vec::new();
    for (name, s) in shapes {
        let mut push = |check: &str, r: Result<f64>, tol: f64| {
            rows.push(match r {
                Ok(v) => IdentityRow { shape: name.clone(), check: check.into(), value: v, tolerance: tol, pass: v <= tol, error: None },
                Err(e) => IdentityRow {
                    shape: name.clone(),
                    check: check.into(),
                    value: f64::NAN,
                    tolerance: tol,
                    pass: false,
                    error: Some(e.to_string()),
                },
            })
        };
        if s.is_closed() {
            let gb = willmore(s);
            let tol = match &gb {
                Ok(w) if !s.is_analytic() => 1e-3 * (1.0 + w.willmore),
                _ => 1e-6,
            };
            push("gb_defect", gb.map(|w| w.gauss_bonnet_defect.abs()), tol);
        }
        for &p in ps {
            let r = scaling_check(s, SUITE_SCALE, p);
            push(&format!("scaling_willmore_p{p}"), r.clone().map(|r| r.0), 1e-12);
            push(&format!("scaling_ep_p{p}"), r.map(|r| r.1), 1e-12);
        }
        for f in [Functional::Ep, Functional::Wp] {
            let vals: Result<Vec<f64>> = ps.iter().map(|&p| energy_value(s, f, p)).collect();
            // largest relative decrease along the increasing p grid; ≤ 0 when monotone
            let drop = vals.map(|v| {
                let mut idx: Vec<usize> = (0..ps.len()).collect();
                idx.sort_by(|&a, &b| ps[a].total_cmp(&ps[b]));
                idx.windows(2).map(|w| (v[w[0]] - v[w[1]]) / v[w[0]].abs()).fold(0.0, f64::max)
            });
            push(&format!("p_monotone_{}", f.name()), drop, 0.0);
        }
        if let Surface::Torus(t) = s {
            let [g0, g1] = t.grid();
            let sh = Surface::Torus(t.shifted(g0 / 3, g1 / 5));
            let p = ps[0];
            let e = (|| {
                let (a, b) = (energy_value(s, Functional::Ep, p)?, energy_value(&sh, Functional::Ep, p)?);
                Ok((a - b).abs() / a.abs())
            })();
            push("shift_energy", e, 1e-13);
            let ps_r = (|| {
                let a = ps_norm_surrogate(s, p, Functional::Wp, 8, 0)?.surrogate;
                let b = ps_norm_surrogate(&sh, p, Functional::Wp, 8, 0)?.surrogate;
                Ok(if a == 0.0 { b.abs() } else { (a - b).abs() / a })
            })();
            push("shift_ps_surrogate", ps_r, 1e-13);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::{make_sphere, make_torus, AxisymProfile, GraphBoundary, GraphPatch, ProfileShape};

    #[test]
    fn sphere_caps_have_ratio_pi() {
        let s = Surface::Axisym(make_sphere(1.0, 1024).unwrap());
        let sig = [0.3, 0.7, 1.2, 1.9];
        let r = monotonicity_scan(&s, [1.0, 0.0, 0.0], &sig, 3.0, 2048).unwrap();
        for (k, q) in r.ratios.iter().enumerate() {
            assert!((q - PI).abs() <= 1e-3, "{k}: {q}");
            // cap integral of |H| = 2πσ², so the bound is π + πσ
            assert!((r.rhs_simon[k] - PI * (1.0 + sig[k])).abs() <= 2e-3 * (1.0 + sig[k]));
        }
        assert!(r.min_slack() > 0.0);
        assert!((r.willmore - 4.0 * PI).abs() < 1e-6);
    }

    #[test]
    fn es_constant_dominates_every_ratio() {
        let s = Surface::Torus(make_torus(3, 2.0, 1.0, [48, 32]).unwrap());
        let sig = [0.2, 0.5, 1.0, 2.0];
        let r = monotonicity_scan(&s, [3.0, 0.0, 0.0], &sig, 3.0, 1).unwrap();
        assert!(r.es_constant >= 0.0);
        for (q, b) in r.ratios.iter().zip(&r.rhs_es) {
            assert!(q <= &(b + 1e-12));
        }
    }

    #[test]
    fn open_surfaces_are_rejected() {
        let g = Surface::Graph(GraphPatch::flat(3, [1.0, 1.0], [8, 8], GraphBoundary::Periodic).unwrap());
        assert_eq!(monotonicity_scan(&g, [0.0; 3], &[1.0], 3.0, 1).unwrap_err(), PcurvError::NotClosed);
        let cat = Surface::Axisym(
            AxisymProfile::analytic(ProfileShape::Catenoid { scale: 1.0, half_height: 1.0 }, 64).unwrap(),
        );
        assert_eq!(monotonicity_scan(&cat, [0.0; 3], &[1.0], 3.0, 4).unwrap_err(), PcurvError::NotClosed);
    }

    #[test]
    fn embedded_library_shapes_raise_no_hint() {
        assert!(self_intersection_hint(&Surface::Torus(make_torus(3, 2.0, 1.0, [32, 24]).unwrap())).is_none());
        assert!(self_intersection_hint(&Surface::Axisym(make_sphere(1.0, 64).unwrap())).is_none());
    }

    #[test]
    fn folded_torus_raises_hint() {
        let t = make_torus(3, 2.0, 1.0, [32, 16]).unwrap();
        let mut dofs = t.dofs().to_vec();
        // collapse the ring at index 16 onto the ring at index 0
        for j in 0..16 {
            for c in 0..3 {
                dofs[(16 * 16 + j) * 3 + c] = dofs[j * 3 + c] + 1e-3;
            }
        }
        let s = Surface::Torus(t).with_dofs(dofs).unwrap();
        assert!(self_intersection_hint(&s).is_some());
    }

    #[test]
    fn slope_fit_recovers_power_law() {
        let x: Vec<f64> = [0.1f64, 0.05, 0.025].iter().map(|e| e.ln()).collect();
        let y: Vec<f64> = x.iter().map(|l| 2.0 - 1.3 * l).collect();
        assert!((ls_slope(&x, &y) + 1.3).abs() < 1e-12);
    }

    #[test]
    fn neck_scan_rejects_bad_grids() {
        assert!(neck_scan(&[0.1], 3.0, 512).is_err());
        assert!(neck_scan(&[0.05, 0.1], 3.0, 512).is_err());
        assert!(matches!(neck_scan(&[0.3, 0.1], 3.0, 512), Err(PcurvError::InvalidParameter(_))));
    }

    #[test]
    fn identity_suite_rows() {
        let shapes = vec![
            ("sphere".to_string(), Surface::Axisym(make_sphere(1.0, 256).unwrap())),
            ("torus".to_string(), Surface::Torus(make_torus(3, 2.0, 1.0, [64, 64]).unwrap())),
        ];
        let rows = identity_suite(&shapes, &[2.5, 3.0, 4.0]).unwrap();
        for r in &rows {
            assert!(r.pass, "{r:?}");
        }
        assert!(rows.iter().any(|r| r.shape == "torus" && r.check == "shift_ps_surrogate"));
        assert!(rows.iter().any(|r| r.shape == "sphere" && r.check == "gb_defect"));
    }
}
