use super::axisym::{AxisymProfile, ProfileJet, ProfileShape};
use crate::error::{invalid, PcurvError, Result};
use std::f64::consts::PI;

/// Two unit spheres (centers `(0, ±c)`) with polar caps removed, joined by the
/// catenoid `r = ε cosh(z/ε)` with matching tangents.
///
/// The profile parameter `t ∈ [0, π]` is split into three pieces (lower
/// sphere, neck, upper sphere), each mapped linearly onto its natural
/// parameter: the polar angle on the spheres and `s = z/ε` on the neck. The
/// piece lengths in `t` are proportional to `∫(1 + |κ₁| + |κ₂|) ds`, so the
/// highly curved neck receives nodes in proportion to its curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct NeckProfile {
    eps: f64,
    phi0: f64,
    s0: f64,
    c: f64,
    breaks: [f64; 2],
    speeds: [f64; 3],
}

const BISECTION_STEPS: usize = 200;

impl NeckProfile {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 0.2) {
            return Err(invalid(format!("neck scale must lie in (0, 0.2], got {eps}")));
        }
        let phi0 = solve_tangency(eps)?;
        let s0 = (1.0 / phi0.tan()).asinh();
        let z0 = eps * s0;
        let c = z0 + phi0.cos();
        let sphere_mass = 3.0 * (PI - phi0);
        let neck_mass = 2.0 * eps * s0.sinh() + 4.0 * gudermannian(s0);
        let total = 2.0 * sphere_mass + neck_mass;
        let t1 = PI * sphere_mass / total;
        let t2 = t1 + PI * neck_mass / total;
        let speeds = [(PI - phi0) / t1, 2.0 * s0 / (t2 - t1), (PI - phi0) / (PI - t2)];
        Ok(NeckProfile { eps, phi0, s0, c, breaks: [t1, t2], speeds })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
    /// Polar angle of the removed cap, `sin² φ₀ = ε`.
    pub fn cap_angle(&self) -> f64 {
        self.phi0
    }
    /// Half-height `z₀` of the neck.
    pub fn neck_half_height(&self) -> f64 {
        self.eps * self.s0
    }
    pub fn sphere_offset(&self) -> f64 {
        self.c
    }
    /// Parameter values `t₁ < t₂` where the pieces meet.
    pub fn breaks(&self) -> [f64; 2] {
        self.breaks
    }

    /// Willmore energy of the exact construction: the neck is minimal and each
    /// sphere piece contributes its area.
    pub fn willmore_exact(&self) -> f64 {
        8.0 * PI - 4.0 * PI * (1.0 - self.phi0.cos())
    }

    pub fn eval(&self, t: f64) -> ProfileJet {
        let [t1, t2] = self.breaks;
        if t < t1 {
            self.lower(t)
        } else if t <= t2 {
            self.neck(t)
        } else {
            self.upper(t)
        }
    }

    fn lower(&self, t: f64) -> ProfileJet {
        let k = self.speeds[0];
        let (s, co) = (k * t).sin_cos();
        ProfileJet { r: s, z: -self.c - co, rt: k * co, zt: k * s, rtt: -k * k * s, ztt: k * k * co }
    }

    fn neck(&self, t: f64) -> ProfileJet {
        let k = self.speeds[1];
        let s = -self.s0 + k * (t - self.breaks[0]);
        let e = self.eps;
        ProfileJet { r: e * s.cosh(), z: e * s, rt: e * k * s.sinh(), zt: e * k, rtt: e * k * k * s.cosh(), ztt: 0.0 }
    }

    fn upper(&self, t: f64) -> ProfileJet {
        let k = self.speeds[2];
        let phi = self.phi0 + k * (t - self.breaks[1]);
        let (s, co) = phi.sin_cos();
        ProfileJet { r: s, z: self.c - co, rt: k * co, zt: k * s, rtt: -k * k * s, ztt: k * k * co }
    }

    /// Position gap and tangent-angle gap at the two junctions.
    pub fn junction_residuals(&self) -> [(f64, f64); 2] {
        let [t1, t2] = self.breaks;
        let gap = |a: ProfileJet, b: ProfileJet| {
            let c0 = (a.r - b.r).hypot(a.z - b.z);
            let c1 = (a.rt * b.zt - a.zt * b.rt).atan2(a.rt * b.rt + a.zt * b.zt).abs();
            (c0, c1)
        };
        [gap(self.lower(t1), self.neck(t1)), gap(self.neck(t2), self.upper(t2))]
    }
}

/// Solves `ε √(1 + cot² φ) = sin φ` on `(0, π/2)` by bisection.
fn solve_tangency(eps: f64) -> Result<f64> {
    let f = |phi: f64| eps * (1.0 + (1.0 / phi.tan()).powi(2)).sqrt() - phi.sin();
    let (mut lo, mut hi) = (1e-12, PI / 2.0);
    if !(f(lo) > 0.0 && f(hi) < 0.0) {
        return Err(PcurvError::MatchingFailed { eps, reason: "tangency equation does not change sign".into() });
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn gudermannian(s: f64) -> f64 {
    2.0 * (s / 2.0).tanh().atan()
}

/// Sphere–catenoid–sphere profile with analytic derivatives at `m ≥ 512` nodes.
pub fn make_neck_family(eps: f64, m: usize) -> Result<AxisymProfile> {
    if m < 512 {
        return Err(invalid(format!("neck profiles need at least 512 nodes, got {m}")));
    }
    AxisymProfile::analytic(ProfileShape::Neck(NeckProfile::new(eps)?), m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tangency_angle_matches_closed_form() {
        for eps in [0.2, 0.1, 0.0125, 1e-4] {
            let n = NeckProfile::new(eps).unwrap();
            assert!((n.cap_angle().sin().powi(2) - eps).abs() < 1e-13);
            assert!((n.s0.cosh() - 1.0 / eps.sqrt()).abs() < 1e-9 / eps.sqrt());
        }
    }

    #[test]
    fn junctions_are_c1() {
        let n = NeckProfile::new(0.1).unwrap();
        for (c0, c1) in n.junction_residuals() {
            assert!(c0 <= 1e-10, "C0 gap {c0}");
            assert!(c1 <= 1e-8, "C1 gap {c1}");
        }
    }

    #[test]
    fn profile_closes_at_both_poles() {
        let n = NeckProfile::new(0.1).unwrap();
        let (a, b) = (n.eval(0.0), n.eval(PI));
        assert!(a.r.abs() < 1e-12 && b.r.abs() < 1e-12);
        assert!((a.z + b.z).abs() < 1e-12);
    }

    #[test]
    fn neck_gets_a_quarter_of_the_parameter() {
        let n = NeckProfile::new(0.0125).unwrap();
        let [t1, t2] = n.breaks();
        let frac = (t2 - t1) / PI;
        assert!(frac > 0.2 && frac < 0.3, "{frac}");
    }

    #[test]
    fn rejects_out_of_range_scale() {
        assert!(NeckProfile::new(0.0).is_err());
        assert!(NeckProfile::new(0.3).is_err());
        assert!(make_neck_family(0.1, 256).is_err());
    }
}
