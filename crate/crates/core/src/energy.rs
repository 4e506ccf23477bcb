//! Quadrature evaluation of `E^p`, `W^p`, the Willmore energy, area and the
//! Gauss–Bonnet defect.

use crate::error::{invalid, PcurvError, Result};
use crate::geometry::{kernel, Jet2, Kernel, Vecn, MAX_DIM};
use crate::real::Real;
use crate::sum::{pairwise_sum, try_map_nodes};
use crate::surfaces::{SlotP, SlotQ, Surface};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Which curvature enters the integrand `(1 + s)^{p/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Functional {
    /// `s = |A|²`
    Ep,
    /// `s = |H|²`
    Wp,
}

impl Functional {
    pub fn name(self) -> &'static str {
        match self {
            Functional::Ep => "Ep",
            Functional::Wp => "Wp",
        }
    }

    #[inline]
    pub(crate) fn curvature<T: Real>(self, k: &Kernel<T>) -> T {
        match self {
            Functional::Ep => k.norm_a2,
            Functional::Wp => k.norm_h2,
        }
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Functional {
    type Err = PcurvError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Ep" | "ep" | "E" => Ok(Functional::Ep),
            "Wp" | "wp" | "W" => Ok(Functional::Wp),
            _ => Err(invalid(format!("unknown functional '{s}' (expected Ep or Wp)"))),
        }
    }
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if !(p >= 2.0 && p.is_finite()) {
        return Err(invalid(format!("exponent p must be a finite number ≥ 2, got {p}")));
    }
    Ok(())
}

/// Pointwise density `(1 + s)^{p/2} √det g` (without the ¼ and the weight).
#[inline]
pub(crate) fn density<T: Real>(functional: Functional, p: f64, k: &Kernel<T>) -> T {
    (T::cst(1.0) + functional.curvature(k)).powf(0.5 * p) * k.sqrtg
}

/// Slot cotangents `∂F/∂(Df)`, `∂F/∂(D²f)` of the density from a kernel
/// evaluated with derivatives.
pub(crate) fn density_cotangents<T: Real>(functional: Functional, p: f64, k: &Kernel<T>) -> ([Vecn<T>; 2], [[Vecn<T>; 2]; 2]) {
    let (ds_dp, ds_dq) = match functional {
        Functional::Ep => (&k.da2_dp, &k.da2_dq),
        Functional::Wp => (&k.dh2_dp, &k.dh2_dq),
    };
    let x = T::cst(1.0) + functional.curvature(k);
    let xp = x.powf(0.5 * p);
    let coef = x.powf(0.5 * p - 1.0).scale(0.5 * p) * k.sqrtg;
    let mut cp = [[T::zero(); MAX_DIM]; 2];
    let mut cq = [[[T::zero(); MAX_DIM]; 2]; 2];
    for a in 0..2 {
        for i in 0..k.n {
            cp[a][i] = coef * ds_dp[a][i] + xp * k.dsqrtg_dp[a][i];
        }
        for b in 0..2 {
            for i in 0..k.n {
                cq[a][b][i] = coef * ds_dq[a][b][i];
            }
        }
    }
    (cp, cq)
}

/// Density and its slot cotangents at one jet.
pub(crate) fn density_slots(functional: Functional, p: f64, jet: &Jet2) -> Result<(f64, SlotP, SlotQ)> {
    let k = kernel::<f64>(jet.dim(), &jet.df, &jet.d2f, true)?;
    let (cp, cq) = density_cotangents(functional, p, &k);
    Ok((density(functional, p, &k), cp, cq))
}

/// Energy of one functional together with the basic geometric integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub functional: Functional,
    pub p: f64,
    pub value: f64,
    pub area: f64,
    /// `¼∫|H|² dμ`
    pub willmore: f64,
    pub int_a2: f64,
    pub int_h2: f64,
    /// `¼ w_j F_j` per quadrature node, when requested.
    pub per_node: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy)]
struct NodeSample {
    dens: f64,
    dmu: f64,
    a2: f64,
    h2: f64,
}

fn node_samples(surface: &Surface, functional: Functional, p: f64) -> Result<Vec<NodeSample>> {
    try_map_nodes(surface.node_count(), |node| {
        let jet = surface.jet_at(node)?;
        let k = kernel::<f64>(jet.dim(), &jet.df, &jet.d2f, false).map_err(|e| e.at_node(node))?;
        let w = surface.weight(node);
        Ok(NodeSample {
            dens: 0.25 * w * density(functional, p, &k),
            dmu: w * k.sqrtg,
            a2: w * k.sqrtg * k.norm_a2,
            h2: w * k.sqrtg * k.norm_h2,
        })
    })
}

/// Full report for `functional` at exponent `p`.
pub fn energy(surface: &Surface, functional: Functional, p: f64, keep_per_node: bool) -> Result<EnergyReport> {
    check_exponent(p)?;
    let s = node_samples(surface, functional, p)?;
    let col = |f: fn(&NodeSample) -> f64| pairwise_sum(&s.iter().map(f).collect::<Vec<_>>());
    let per_node: Vec<f64> = s.iter().map(|x| x.dens).collect();
    let int_h2 = col(|x| x.h2);
    Ok(EnergyReport {
        functional,
        p,
        value: pairwise_sum(&per_node),
        area: col(|x| x.dmu),
        willmore: 0.25 * int_h2,
        int_a2: col(|x| x.a2),
        int_h2,
        per_node: keep_per_node.then_some(per_node),
    })
}

/// `E^p = ¼∫(1 + |A|²)^{p/2} dμ`.
pub fn energy_ep(surface: &Surface, p: f64) -> Result<EnergyReport> {
    energy(surface, Functional::Ep, p, false)
}

/// `W^p = ¼∫(1 + |H|²)^{p/2} dμ`.
pub fn energy_wp(surface: &Surface, p: f64) -> Result<EnergyReport> {
    energy(surface, Functional::Wp, p, false)
}

/// Energy value only.
pub fn energy_value(surface: &Surface, functional: Functional, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let v = try_map_nodes(surface.node_count(), |node| {
        let jet = surface.jet_at(node)?;
        let k = kernel::<f64>(jet.dim(), &jet.df, &jet.d2f, false).map_err(|e| e.at_node(node))?;
        Ok::<f64, PcurvError>(0.25 * surface.weight(node) * density(functional, p, &k))
    })?;
    Ok(pairwise_sum(&v))
}

/// Willmore energy with the Gauss–Bonnet check `𝒲 − ¼∫|A|² − πχ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WillmoreReport {
    pub willmore: f64,
    pub int_a2: f64,
    pub euler_characteristic: i32,
    pub gauss_bonnet_defect: f64,
}

pub fn willmore(surface: &Surface) -> Result<WillmoreReport> {
    let chi = surface.euler_characteristic().ok_or(PcurvError::NotClosed)?;
    let r = energy(surface, Functional::Wp, 2.0, false)?;
    Ok(WillmoreReport {
        willmore: r.willmore,
        int_a2: r.int_a2,
        euler_characteristic: chi,
        gauss_bonnet_defect: r.willmore - 0.25 * r.int_a2 - PI * chi as f64,
    })
}

/// Residuals of the scaling laws `𝒲(λf) = 𝒲(f)` and
/// `E^p(λf) = ¼∫(1 + λ⁻²|A|²)^{p/2} λ² dμ`, both relative.
pub fn scaling_check(surface: &Surface, lambda: f64, p: f64) -> Result<(f64, f64)> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid("scale factor must be positive"));
    }
    check_exponent(p)?;
    let scaled = surface.scaled(lambda);
    let base = energy(surface, Functional::Wp, 2.0, false)?;
    let big = energy(&scaled, Functional::Ep, p, false)?;
    let w_scaled = energy(&scaled, Functional::Wp, 2.0, false)?.willmore;
    let predicted = try_map_nodes(surface.node_count(), |node| {
        let jet = surface.jet_at(node)?;
        let k = kernel::<f64>(jet.dim(), &jet.df, &jet.d2f, false).map_err(|e| e.at_node(node))?;
        let x = 1.0 + k.norm_a2 / (lambda * lambda);
        Ok::<f64, PcurvError>(0.25 * surface.weight(node) * x.powf(0.5 * p) * lambda * lambda * k.sqrtg)
    })?;
    let predicted = pairwise_sum(&predicted);
    let r_w = if base.willmore == 0.0 { (w_scaled - base.willmore).abs() } else { (w_scaled - base.willmore).abs() / base.willmore };
    Ok((r_w, (big.value - predicted).abs() / big.value))
}
