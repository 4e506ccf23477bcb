use super::neck::NeckProfile;
use super::{d1, d2, SlotP, SlotQ};
use crate::error::{invalid, PcurvError, Result};
use crate::geometry::{Jet2, MAX_DIM};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

/// How the ends of the profile parameter interval are closed up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Closure {
    /// `r → 0` at both ends; a topological sphere (χ = 2).
    Poles,
    /// The profile is periodic in `t`; a torus of revolution (χ = 0).
    PeriodicTube,
    /// Free ends (e.g. a catenoid piece); not closed.
    Open,
}

impl Closure {
    pub fn euler_characteristic(self) -> Option<i32> {
        match self {
            Closure::Poles => Some(2),
            Closure::PeriodicTube => Some(0),
            Closure::Open => None,
        }
    }
}

/// Profile curve `(r, z)` and its first two `t`-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileJet {
    pub r: f64,
    pub z: f64,
    pub rt: f64,
    pub zt: f64,
    pub rtt: f64,
    pub ztt: f64,
}

impl ProfileJet {
    fn scaled(self, s: f64) -> Self {
        ProfileJet { r: s * self.r, z: s * self.z, rt: s * self.rt, zt: s * self.zt, rtt: s * self.rtt, ztt: s * self.ztt }
    }

    /// Profile speed `w = √(r′² + z′²)`.
    pub fn speed(&self) -> f64 {
        self.rt.hypot(self.zt)
    }

    /// Meridian curvature `(r′z″ − z′r″)/w³`.
    pub fn kappa_meridian(&self) -> f64 {
        (self.rt * self.ztt - self.zt * self.rtt) / self.speed().powi(3)
    }

    /// Parallel curvature `z′/(r w)`.
    pub fn kappa_parallel(&self) -> f64 {
        self.zt / (self.r * self.speed())
    }

    /// Ambient jet at azimuth 0 of the surface `(r cos θ, r sin θ, z)` in coordinates `(t, θ)`.
    pub(crate) fn to_jet(self) -> Jet2 {
        let mut f = [0.0; MAX_DIM];
        let mut df = [[0.0; MAX_DIM]; 2];
        let mut d2f = [[[0.0; MAX_DIM]; 2]; 2];
        f[0] = self.r;
        f[2] = self.z;
        df[0][0] = self.rt;
        df[0][2] = self.zt;
        df[1][1] = self.r;
        d2f[0][0][0] = self.rtt;
        d2f[0][0][2] = self.ztt;
        d2f[0][1][1] = self.rt;
        d2f[1][0][1] = self.rt;
        d2f[1][1][0] = -self.r;
        Jet2::from_parts(3, f, df, d2f)
    }
}

/// Closed-form profiles.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileShape {
    /// `r = R sin t`, `z = −R cos t`, `t ∈ [0, π]`.
    Sphere { radius: f64 },
    /// `r = c cosh(t/c)`, `z = t`, `t ∈ [−h, h]`.
    Catenoid { scale: f64, half_height: f64 },
    /// `r = R + a cos t`, `z = a sin t`, `t ∈ [0, 2π)`.
    TorusTube { big_r: f64, a: f64 },
    /// Two unit spheres joined by a catenoid neck.
    Neck(NeckProfile),
}

impl ProfileShape {
    pub fn eval(&self, t: f64) -> ProfileJet {
        match self {
            ProfileShape::Sphere { radius } => {
                let (s, c) = t.sin_cos();
                ProfileJet { r: radius * s, z: -radius * c, rt: radius * c, zt: radius * s, rtt: -radius * s, ztt: radius * c }
            }
            ProfileShape::Catenoid { scale, .. } => {
                let u = t / scale;
                ProfileJet { r: scale * u.cosh(), z: t, rt: u.sinh(), zt: 1.0, rtt: u.cosh() / scale, ztt: 0.0 }
            }
            ProfileShape::TorusTube { big_r, a } => {
                let (s, c) = t.sin_cos();
                ProfileJet { r: big_r + a * c, z: a * s, rt: -a * s, zt: a * c, rtt: -a * c, ztt: -a * s }
            }
            ProfileShape::Neck(neck) => neck.eval(t),
        }
    }

    /// `[(r, z)^{(k)}(t)]` for `k = 0..=4`; `None` for the piecewise neck.
    pub(crate) fn derivatives(&self, t: f64) -> Option<[[f64; 2]; 5]> {
        let mut out = [[0.0; 2]; 5];
        match self {
            ProfileShape::Sphere { radius } => {
                for (k, o) in out.iter_mut().enumerate() {
                    let phase = t + k as f64 * FRAC_PI_2;
                    *o = [radius * phase.sin(), -radius * phase.cos()];
                }
            }
            ProfileShape::Catenoid { scale, .. } => {
                let u = t / scale;
                for (k, o) in out.iter_mut().enumerate() {
                    let f = if k % 2 == 0 { u.cosh() } else { u.sinh() };
                    o[0] = scale.powi(1 - k as i32) * f;
                }
                out[0][1] = t;
                out[1][1] = 1.0;
            }
            ProfileShape::TorusTube { big_r, a } => {
                for (k, o) in out.iter_mut().enumerate() {
                    let phase = t + k as f64 * FRAC_PI_2;
                    *o = [a * phase.cos(), a * phase.sin()];
                }
                out[0][0] += big_r;
            }
            ProfileShape::Neck(_) => return None,
        }
        Some(out)
    }

    fn parameter_range(&self) -> [f64; 2] {
        match self {
            ProfileShape::Sphere { .. } | ProfileShape::Neck(_) => [0.0, PI],
            ProfileShape::Catenoid { half_height, .. } => [-half_height, *half_height],
            ProfileShape::TorusTube { .. } => [0.0, TAU],
        }
    }

    fn closure(&self) -> Closure {
        match self {
            ProfileShape::Sphere { .. } | ProfileShape::Neck(_) => Closure::Poles,
            ProfileShape::Catenoid { .. } => Closure::Open,
            ProfileShape::TorusTube { .. } => Closure::PeriodicTube,
        }
    }
}

/// Surface of revolution about the `z`-axis, described by its profile curve
/// at `M` half-offset nodes `t_j = t₀ + (j + ½)Δt`. Dofs are `(r_j, z_j)`
/// interleaved. Analytic profiles keep their closed form for jets; any change
/// of nodal values turns the profile into a sampled one.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisymProfile {
    t_range: [f64; 2],
    m: usize,
    closure: Closure,
    rz: Vec<f64>,
    analytic: Option<(ProfileShape, f64)>,
}

impl AxisymProfile {
    /// Samples a closed-form shape, keeping the analytic derivatives.
    pub fn analytic(shape: ProfileShape, m: usize) -> Result<Self> {
        if m < 8 {
            return Err(invalid("axisymmetric profiles need at least 8 nodes"));
        }
        let t_range = shape.parameter_range();
        let closure = shape.closure();
        let dt = (t_range[1] - t_range[0]) / m as f64;
        let mut rz = Vec::with_capacity(2 * m);
        for j in 0..m {
            let pj = shape.eval(t_range[0] + (j as f64 + 0.5) * dt);
            rz.push(pj.r);
            rz.push(pj.z);
        }
        let p = AxisymProfile { t_range, m, closure, rz, analytic: Some((shape, 1.0)) };
        p.check_profile()?;
        Ok(p)
    }

    /// Profile from nodal samples with finite-difference derivatives.
    pub fn sampled(t_range: [f64; 2], closure: Closure, rz: Vec<f64>) -> Result<Self> {
        if !rz.len().is_multiple_of(2) || rz.len() < 8 {
            return Err(invalid("sampled profiles need an even number (≥ 8) of values"));
        }
        let p = AxisymProfile { t_range, m: rz.len() / 2, closure, rz, analytic: None };
        p.check_profile()?;
        Ok(p)
    }

    pub fn sphere(radius: f64, m: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(invalid("sphere radius must be positive"));
        }
        Self::analytic(ProfileShape::Sphere { radius }, m)
    }

    /// Sampled (finite-difference) copy of this profile.
    pub fn to_sampled(&self) -> Self {
        AxisymProfile { analytic: None, ..self.clone() }
    }

    pub fn is_analytic(&self) -> bool {
        self.analytic.is_some()
    }
    pub fn shape(&self) -> Option<&ProfileShape> {
        self.analytic.as_ref().map(|(s, _)| s)
    }
    pub fn closure(&self) -> Closure {
        self.closure
    }
    pub fn node_count(&self) -> usize {
        self.m
    }
    pub fn dt(&self) -> f64 {
        (self.t_range[1] - self.t_range[0]) / self.m as f64
    }
    pub fn t_range(&self) -> [f64; 2] {
        self.t_range
    }
    pub fn node_t(&self, j: usize) -> f64 {
        self.t_range[0] + (j as f64 + 0.5) * self.dt()
    }
    /// `2πΔt` times the midpoint weight. Without periodicity the first and last
    /// three weights carry the `h²/24 [f′]` Euler–Maclaurin correction, with `f′`
    /// at the ends from the one-sided quadratic through the three nearest nodes;
    /// the rule is then fourth order and still sums to the parameter length.
    pub fn weight(&self, node: usize) -> f64 {
        const END: [f64; 3] = [26.0 / 24.0, 21.0 / 24.0, 25.0 / 24.0];
        let c = match self.closure {
            Closure::PeriodicTube => 1.0,
            _ => {
                let k = node.min(self.m - 1 - node);
                if k < 3 {
                    END[k]
                } else {
                    1.0
                }
            }
        };
        TAU * self.dt() * c
    }
    pub fn parameter_area(&self) -> f64 {
        TAU * (self.t_range[1] - self.t_range[0])
    }
    pub(crate) fn dofs(&self) -> &[f64] {
        &self.rz
    }
    pub fn node_rz(&self, j: usize) -> (f64, f64) {
        (self.rz[2 * j], self.rz[2 * j + 1])
    }

    /// Profile jet at node `j`: closed form when analytic, stencils otherwise.
    pub fn profile_jet(&self, j: usize) -> Result<ProfileJet> {
        match &self.analytic {
            Some((shape, s)) => Ok(shape.eval(self.node_t(j)).scaled(*s)),
            None => self.sampled_profile_jet(&self.rz, j),
        }
    }

    /// Profile derivatives up to fourth order at node `j` for smooth closed-form
    /// shapes; `None` for sampled profiles and the neck.
    pub(crate) fn analytic_derivatives(&self, j: usize) -> Option<[[f64; 2]; 5]> {
        let (shape, s) = self.analytic.as_ref()?;
        let mut d = shape.derivatives(self.node_t(j))?;
        d.iter_mut().flatten().for_each(|x| *x *= s);
        Some(d)
    }

    pub(crate) fn surface_jet(&self, j: usize) -> Result<Jet2> {
        Ok(self.profile_jet(j)?.to_jet())
    }

    pub(crate) fn sampled_jet(&self, data: &[f64], j: usize) -> Result<Jet2> {
        Ok(self.sampled_profile_jet(data, j)?.to_jet())
    }

    /// Neighbor `(index, r-sign, z-sign)`; pole ghosts reflect `r` oddly and `z` evenly.
    fn neighbor(&self, j: isize) -> Option<(usize, f64)> {
        let m = self.m as isize;
        if (0..m).contains(&j) {
            return Some((j as usize, 1.0));
        }
        match self.closure {
            Closure::Poles => Some(if j < 0 { (0, -1.0) } else { (self.m - 1, -1.0) }),
            Closure::PeriodicTube => Some((j.rem_euclid(m) as usize, 1.0)),
            Closure::Open => None,
        }
    }

    fn sampled_profile_jet(&self, data: &[f64], j: usize) -> Result<ProfileJet> {
        let (lo, slo) = self.neighbor(j as isize - 1).ok_or(PcurvError::StencilOutOfDomain { node: j })?;
        let (hi, shi) = self.neighbor(j as isize + 1).ok_or(PcurvError::StencilOutOfDomain { node: j })?;
        let h = self.dt();
        let (rm, zm) = (slo * data[2 * lo], data[2 * lo + 1]);
        let (rp, zp) = (shi * data[2 * hi], data[2 * hi + 1]);
        let (r, z) = (data[2 * j], data[2 * j + 1]);
        Ok(ProfileJet { r, z, rt: d1(rm, rp, h), zt: d1(zm, zp, h), rtt: d2(rm, r, rp, h), ztt: d2(zm, z, zp, h) })
    }

    pub(crate) fn scatter(&self, j: usize, cp: &SlotP, cq: &SlotQ, scale: f64, out: &mut [f64]) -> Result<()> {
        let (lo, slo) = self.neighbor(j as isize - 1).ok_or(PcurvError::StencilOutOfDomain { node: j })?;
        let (hi, shi) = self.neighbor(j as isize + 1).ok_or(PcurvError::StencilOutOfDomain { node: j })?;
        let h = self.dt();
        // cotangents of (r, r', r'', z', z'') from the jet layout in `ProfileJet::to_jet`
        let c_r = cp[1][1] - cq[1][1][0];
        let c_rt = cp[0][0] + cq[0][1][1] + cq[1][0][1];
        let c_rtt = cq[0][0][0];
        let c_zt = cp[0][2];
        let c_ztt = cq[0][0][2];
        let a1 = 1.0 / (2.0 * h);
        let a2 = 1.0 / (h * h);
        out[2 * j] += scale * (c_r - 2.0 * a2 * c_rtt);
        out[2 * hi] += scale * shi * (a1 * c_rt + a2 * c_rtt);
        out[2 * lo] += scale * slo * (-a1 * c_rt + a2 * c_rtt);
        out[2 * j + 1] += scale * (-2.0 * a2 * c_ztt);
        out[2 * hi + 1] += scale * (a1 * c_zt + a2 * c_ztt);
        out[2 * lo + 1] += scale * (-a1 * c_zt + a2 * c_ztt);
        Ok(())
    }

    /// Checks `r > 0` at every node and profile speed above `1e-10`.
    pub fn check_profile(&self) -> Result<()> {
        for j in 0..self.m {
            let (r, _) = self.node_rz(j);
            if !(r > 0.0) {
                return Err(PcurvError::DegenerateJet { node: Some(j), detg: 0.0 });
            }
            let pj = match self.profile_jet(j) {
                Ok(pj) => pj,
                // open sampled ends have no stencil; only analytic open profiles are usable
                Err(PcurvError::StencilOutOfDomain { .. }) => continue,
                Err(e) => return Err(e),
            };
            if !(pj.speed() > 1e-10) {
                let w = pj.speed();
                return Err(PcurvError::DegenerateJet { node: Some(j), detg: (w * r).powi(2) });
            }
        }
        Ok(())
    }

    pub(crate) fn with_dofs(&self, rz: Vec<f64>) -> AxisymProfile {
        AxisymProfile { rz, analytic: None, ..self.clone() }
    }

    pub(crate) fn scaled(&self, lambda: f64) -> AxisymProfile {
        AxisymProfile {
            rz: self.rz.iter().map(|x| x * lambda).collect(),
            analytic: self.analytic.as_ref().map(|(s, f)| (s.clone(), f * lambda)),
            ..self.clone()
        }
    }
}
