//! Euler–Lagrange coefficient fields in graph form and their sampled
//! certification.
//!
//! For a graph `f(x) = (x, u(x))` the density `F(Du, D²u)` of `E^p` gives
//! `a^{αβ}_i = (1/p) ∂F/∂q^i_{αβ}` and `b^α_i = −(1/p) ∂F/∂p^i_α`; for `W^p`,
//! `B^α_i = ¼ ∂F/∂(∂_α f^i)`. First slot derivatives come from the closed-form
//! kernel; second derivatives (`D_p a`, `D_q a`, `D_p b`, `D_q b`) are exact
//! directional derivatives obtained by running the same kernel on dual numbers.

use crate::energy::{density_cotangents, Functional};
use crate::error::{invalid, PcurvError, Result};
use crate::geometry::{kernel, Jet2, Vecn, MAX_DIM};
use crate::real::{Dual, Real};
use crate::rng;
use crate::sum::map_nodes;
use rand::Rng as _;

/// Maximum number of graph components `n − 2`.
pub const MAX_GRAPH: usize = MAX_DIM - 2;

/// Slot values `p = Du` (`2 × m`) and `q = D²u` (`2 × 2 × m`, symmetric) of a graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphJet {
    m: usize,
    pub du: [[f64; MAX_GRAPH]; 2],
    pub d2u: [[[f64; MAX_GRAPH]; 2]; 2],
}

impl GraphJet {
    pub fn new(du: [&[f64]; 2], d2u: [[&[f64]; 2]; 2]) -> Result<Self> {
        let m = du[0].len();
        if !(1..=MAX_GRAPH).contains(&m) {
            return Err(invalid(format!("graph codimension {m} outside 1..={MAX_GRAPH}")));
        }
        for s in du.iter().chain(d2u.iter().flatten()) {
            if s.len() != m {
                return Err(PcurvError::ShapeMismatch { expected: m, got: s.len() });
            }
        }
        if d2u[0][1] != d2u[1][0] {
            return Err(invalid("mixed second partials must be symmetric"));
        }
        let mut g = GraphJet::zeros(m);
        for a in 0..2 {
            g.du[a][..m].copy_from_slice(du[a]);
            for b in 0..2 {
                g.d2u[a][b][..m].copy_from_slice(d2u[a][b]);
            }
        }
        Ok(g)
    }

    fn zeros(m: usize) -> Self {
        GraphJet { m, du: [[0.0; MAX_GRAPH]; 2], d2u: [[[0.0; MAX_GRAPH]; 2]; 2] }
    }

    /// Number of graph components `n − 2`.
    pub fn codim(&self) -> usize {
        self.m
    }

    /// `V = (1 + |q|²)^{1/2}`.
    pub fn v(&self) -> f64 {
        let mut q2 = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                q2 += self.d2u[a][b][..self.m].iter().map(|x| x * x).sum::<f64>();
            }
        }
        (1.0 + q2).sqrt()
    }

    pub fn q_norm(&self) -> f64 {
        (self.v().powi(2) - 1.0).max(0.0).sqrt()
    }

    /// The ambient jet of `(x, u(x))` at `x = 0`, `u(0) = 0`.
    pub fn to_jet(&self) -> Jet2 {
        let (p, q) = self.slots::<f64>();
        Jet2::from_parts(self.m + 2, [0.0; MAX_DIM], p, q)
    }

    /// Ambient slots `P = (e_α, ∂_α u)`, `Q = (0, ∂²_{αβ} u)`.
    fn slots<T: Real>(&self) -> ([Vecn<T>; 2], [[Vecn<T>; 2]; 2]) {
        let mut p = [[T::zero(); MAX_DIM]; 2];
        let mut q = [[[T::zero(); MAX_DIM]; 2]; 2];
        for a in 0..2 {
            p[a][a] = T::cst(1.0);
            for j in 0..self.m {
                p[a][j + 2] = T::cst(self.du[a][j]);
                for b in 0..2 {
                    q[a][b][j + 2] = T::cst(self.d2u[a][b][j]);
                }
            }
        }
        (p, q)
    }
}

/// A direction in graph slot space.
#[derive(Debug, Clone, Copy)]
struct Direction {
    dp: [[f64; MAX_GRAPH]; 2],
    dq: [[[f64; MAX_GRAPH]; 2]; 2],
}

impl Direction {
    fn zero() -> Self {
        Direction { dp: [[0.0; MAX_GRAPH]; 2], dq: [[[0.0; MAX_GRAPH]; 2]; 2] }
    }

    /// Orthonormal basis of `p`-directions (`2m` of them).
    fn p_basis(m: usize) -> Vec<Direction> {
        let mut out = Vec::new();
        for a in 0..2 {
            for j in 0..m {
                let mut d = Direction::zero();
                d.dp[a][j] = 1.0;
                out.push(d);
            }
        }
        out
    }

    /// Orthonormal basis (Frobenius) of symmetric `q`-directions (`3m` of them).
    fn q_basis(m: usize) -> Vec<Direction> {
        let mut out = Vec::new();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for j in 0..m {
            for (a, b) in [(0, 0), (1, 1)] {
                let mut d = Direction::zero();
                d.dq[a][b][j] = 1.0;
                out.push(d);
            }
            let mut d = Direction::zero();
            d.dq[0][1][j] = r;
            d.dq[1][0][j] = r;
            out.push(d);
        }
        out
    }
}

fn dual_slots(g: &GraphJet, dir: &Direction) -> ([Vecn<Dual>; 2], [[Vecn<Dual>; 2]; 2]) {
    let (mut p, mut q) = g.slots::<Dual>();
    for a in 0..2 {
        for j in 0..g.m {
            p[a][j + 2].d = dir.dp[a][j];
            for b in 0..2 {
                q[a][b][j + 2].d = dir.dq[a][b][j];
            }
        }
    }
    (p, q)
}

type GraphP<T> = [[T; MAX_GRAPH]; 2];
type GraphQ<T> = [[[T; MAX_GRAPH]; 2]; 2];

/// `(a, b)` of `E^p` from ambient slots.
fn ab_from_slots<T: Real>(
    m: usize,
    p_exp: f64,
    p: &[Vecn<T>; 2],
    q: &[[Vecn<T>; 2]; 2],
) -> Result<(GraphQ<T>, GraphP<T>)> {
    let k = kernel::<T>(m + 2, p, q, true)?;
    let (cp, cq) = density_cotangents(Functional::Ep, p_exp, &k);
    let mut a = [[[T::zero(); MAX_GRAPH]; 2]; 2];
    let mut b = [[T::zero(); MAX_GRAPH]; 2];
    for al in 0..2 {
        for j in 0..m {
            b[al][j] = cp[al][j + 2].scale(-1.0 / p_exp);
            for be in 0..2 {
                a[al][be][j] = cq[al][be][j + 2].scale(1.0 / p_exp);
            }
        }
    }
    Ok((a, b))
}

/// Coefficients of the graph Euler–Lagrange system of `E^p` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ELCoefficientsE {
    m: usize,
    pub a: [[[f64; MAX_GRAPH]; 2]; 2],
    pub b: [[f64; MAX_GRAPH]; 2],
    /// `V = (1 + |q|²)^{1/2}`
    pub v: f64,
}

impl ELCoefficientsE {
    pub fn a_norm(&self) -> f64 {
        frob_q(&self.a, self.m)
    }
    pub fn b_norm(&self) -> f64 {
        frob_p(&self.b, self.m)
    }
}

fn frob_q(x: &GraphQ<f64>, m: usize) -> f64 {
    x.iter().flatten().map(|r| r[..m].iter().map(|v| v * v).sum::<f64>()).sum::<f64>().sqrt()
}
fn frob_p(x: &GraphP<f64>, m: usize) -> f64 {
    x.iter().map(|r| r[..m].iter().map(|v| v * v).sum::<f64>()).sum::<f64>().sqrt()
}

/// `a^{αβ}_i` and `b^α_i` of the `E^p` system.
pub fn el_coeffs_e(g: &GraphJet, p: f64) -> Result<ELCoefficientsE> {
    crate::energy::check_exponent(p)?;
    let (sp, sq) = g.slots::<f64>();
    let (a, b) = ab_from_slots(g.m, p, &sp, &sq)?;
    Ok(ELCoefficientsE { m: g.m, a, b, v: g.v() })
}

/// Directional derivatives `(ȧ, ḃ)` along a slot direction.
fn ab_directional(g: &GraphJet, p: f64, dir: &Direction) -> Result<(GraphQ<f64>, GraphP<f64>)> {
    let (sp, sq) = dual_slots(g, dir);
    let (a, b) = ab_from_slots(g.m, p, &sp, &sq)?;
    Ok((a.map(|r| r.map(|c| c.map(|x| x.d))), b.map(|r| r.map(|x| x.d))))
}

/// Frobenius norms of `D_p a`, `D_q a`, `D_p b`, `D_q b` (orthonormal slot bases).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientDerivativeNorms {
    pub dp_a: f64,
    pub dq_a: f64,
    pub dp_b: f64,
    pub dq_b: f64,
}

pub fn el_coeff_derivative_norms(g: &GraphJet, p: f64) -> Result<CoefficientDerivativeNorms> {
    let mut acc = [0.0; 4];
    for (basis, off) in [(Direction::p_basis(g.m), 0), (Direction::q_basis(g.m), 1)] {
        for dir in &basis {
            let (da, db) = ab_directional(g, p, dir)?;
            acc[off] += frob_q(&da, g.m).powi(2);
            acc[off + 2] += frob_p(&db, g.m).powi(2);
        }
    }
    Ok(CoefficientDerivativeNorms { dp_a: acc[0].sqrt(), dq_a: acc[1].sqrt(), dp_b: acc[2].sqrt(), dq_b: acc[3].sqrt() })
}

/// Ellipticity contraction `∂a^{αβ}_i/∂q^j_{γλ} ξ^i_{αβ} ξ^j_{γλ}` for symmetric `ξ`.
pub fn ellipticity_contraction(g: &GraphJet, p: f64, xi: &[[[f64; MAX_GRAPH]; 2]; 2]) -> Result<f64> {
    let mut dir = Direction::zero();
    dir.dq = *xi;
    let (da, _) = ab_directional(g, p, &dir)?;
    let mut s = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            for j in 0..g.m {
                s += da[a][b][j] * xi[a][b][j];
            }
        }
    }
    Ok(s)
}

/// Coefficient fields of the first variation of `W^p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ELCoefficientsW {
    n: usize,
    /// `B^α_i` over all ambient components.
    pub b: [Vecn<f64>; 2],
    /// `√det g · g^{γλ}`, the coefficients of `L_g`.
    pub lg_weight: [[f64; 2]; 2],
    /// `𝓗 = (1 + |H|²)^{p/2 − 1} H`
    pub hcal: Vecn<f64>,
}

impl ELCoefficientsW {
    pub fn b_norm(&self) -> f64 {
        self.b.iter().map(|r| r[..self.n].iter().map(|v| v * v).sum::<f64>()).sum::<f64>().sqrt()
    }
    /// Norm of the components normal to the graph domain (`i ≥ 2`).
    pub fn b_graph_norm(&self) -> f64 {
        self.b.iter().map(|r| r[2..self.n].iter().map(|v| v * v).sum::<f64>()).sum::<f64>().sqrt()
    }
    pub fn hcal(&self) -> &[f64] {
        &self.hcal[..self.n]
    }
    /// `L_g φ = √det g g^{γλ} ∂²_{γλ} φ` for the second partials of a field.
    pub fn apply_lg(&self, d2phi: [[&[f64]; 2]; 2]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..2).flat_map(|a| (0..2).map(move |b| (a, b))).map(|(a, b)| self.lg_weight[a][b] * d2phi[a][b][i]).sum())
            .collect()
    }
}

/// `B^α_i`, `L_g` weights and `𝓗` of `W^p` at an ambient jet.
pub fn el_coeffs_w(jet: &Jet2, p: f64) -> Result<ELCoefficientsW> {
    crate::energy::check_exponent(p)?;
    let n = jet.dim();
    let k = kernel::<f64>(n, &jet.df, &jet.d2f, true)?;
    let (cp, _) = density_cotangents(Functional::Wp, p, &k);
    let mut b = [[0.0; MAX_DIM]; 2];
    for a in 0..2 {
        for i in 0..n {
            b[a][i] = 0.25 * cp[a][i];
        }
    }
    let pref = (1.0 + k.norm_h2).powf(0.5 * p - 1.0);
    let mut hcal = [0.0; MAX_DIM];
    for i in 0..n {
        hcal[i] = pref * k.h[i];
    }
    let lg_weight = [[k.sqrtg * k.ginv[0][0], k.sqrtg * k.ginv[0][1]], [k.sqrtg * k.ginv[1][0], k.sqrtg * k.ginv[1][1]]];
    Ok(ELCoefficientsW { n, b, lg_weight, hcal })
}

/// Random graph slots: `Du` uniform in the `Λ`-ball, `|D²u|` log-uniform in
/// `[1e-2, 1e3]` with a uniformly random symmetric direction.
pub fn sample_graph_jet(rng: &mut rng::Rng, m: usize, cap: f64) -> GraphJet {
    let mut g = GraphJet::zeros(m);
    let dim = 2 * m;
    let dir = loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r2: f64 = v.iter().map(|x| x * x).sum();
        if r2 > 1e-12 && r2 <= 1.0 {
            break v.iter().map(|x| x / r2.sqrt()).collect::<Vec<_>>();
        }
    };
    let radius = cap * rng.gen::<f64>().powf(1.0 / dim as f64);
    for a in 0..2 {
        for j in 0..m {
            g.du[a][j] = radius * dir[a * m + j];
        }
    }
    let mag = 10f64.powf(rng.gen_range(-2.0..3.0));
    g.d2u = random_symmetric(rng, m);
    for a in 0..2 {
        for b in 0..2 {
            for j in 0..m {
                g.d2u[a][b][j] *= mag;
            }
        }
    }
    g
}

/// Uniformly oriented symmetric tensor of unit Frobenius norm.
pub(crate) fn random_symmetric(rng: &mut rng::Rng, m: usize) -> GraphQ<f64> {
    loop {
        let mut x = [[[0.0; MAX_GRAPH]; 2]; 2];
        for j in 0..m {
            x[0][0][j] = rng.gen_range(-1.0..1.0);
            x[1][1][j] = rng.gen_range(-1.0..1.0);
            let off = rng.gen_range(-1.0..1.0) * std::f64::consts::FRAC_1_SQRT_2;
            x[0][1][j] = off;
            x[1][0][j] = off;
        }
        let nrm = frob_q(&x, m);
        if nrm > 1e-6 && nrm <= 1.0 {
            for r in x.iter_mut().flatten() {
                r.iter_mut().for_each(|v| *v /= nrm);
            }
            return x;
        }
    }
}

/// Result of [`verify_ellipticity`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticityReport {
    pub p: f64,
    pub lambda_cap: f64,
    pub samples: usize,
    /// `min V^{2−p} D_q a[ξ, ξ]` over the samples.
    pub lambda_min: f64,
    /// Number of samples with a non-positive contraction.
    pub violations: usize,
}

/// Samples `(Du, D²u, ξ)` with `|Du| ≤ Λ` and reports the smallest scaled
/// ellipticity contraction. Sample `k` uses stream `k` of `seed`.
pub fn verify_ellipticity(n: usize, p: f64, lambda_cap: f64, samples: usize, seed: u64) -> Result<EllipticityReport> {
    crate::geometry::check_dim(n)?;
    crate::energy::check_exponent(p)?;
    if !(lambda_cap > 0.0) {
        return Err(invalid("slope cap must be positive"));
    }
    let m = n - 2;
    let vals = map_nodes(samples, |k| {
        let mut rng = rng::stream(seed, k as u64);
        let g = sample_graph_jet(&mut rng, m, lambda_cap);
        let xi = random_symmetric(&mut rng, m);
        ellipticity_contraction(&g, p, &xi).map(|c| c * g.v().powf(2.0 - p))
    });
    let mut lambda_min = f64::INFINITY;
    let mut violations = 0;
    for v in vals {
        let v = v?;
        lambda_min = lambda_min.min(v);
        if !(v > 0.0) {
            violations += 1;
        }
    }
    Ok(EllipticityReport { p, lambda_cap, samples, lambda_min, violations })
}

/// Names of the growth ratios reported by [`verify_growth`], in order.
pub const GROWTH_RATIOS: [&str; 7] = [
    "dq_a/V^(p-2)",
    "a/V^(p-1)",
    "dp_a/V^(p-1)",
    "dq_b/V^(p-1)",
    "b/V^p",
    "dp_b/V^p",
    "B/(V^(p-2)|q|^2)",
];

/// `|q|` decades over which growth ratios are compared for stability.
pub const STABILITY_DECADES: [(f64, f64); 3] = [(1.0, 10.0), (10.0, 100.0), (100.0, 1000.0)];

/// Result of [`verify_growth`].
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    pub p: f64,
    pub lambda_cap: f64,
    pub samples: usize,
    /// Maximum of each ratio over all samples.
    pub max: [f64; 7],
    /// Maximum of each ratio per `|q|` decade in [`STABILITY_DECADES`].
    pub decade_max: [[f64; 7]; 3],
}

impl GrowthReport {
    /// Largest-to-smallest decade maximum, per ratio.
    pub fn stability(&self) -> [f64; 7] {
        std::array::from_fn(|r| {
            let xs = self.decade_max.iter().map(|d| d[r]);
            let hi = xs.clone().fold(0.0, f64::max);
            let lo = xs.fold(f64::INFINITY, f64::min);
            hi / lo
        })
    }

    pub fn all_finite(&self) -> bool {
        self.max.iter().all(|x| x.is_finite())
    }
}

/// The seven growth ratios at one graph sample.
pub fn growth_ratios(g: &GraphJet, p: f64) -> Result<[f64; 7]> {
    let v = g.v();
    let c = el_coeffs_e(g, p)?;
    let d = el_coeff_derivative_norms(g, p)?;
    let w = el_coeffs_w(&g.to_jet(), p)?;
    let q2 = v * v - 1.0;
    Ok([
        d.dq_a / v.powf(p - 2.0),
        c.a_norm() / v.powf(p - 1.0),
        d.dp_a / v.powf(p - 1.0),
        d.dq_b / v.powf(p - 1.0),
        c.b_norm() / v.powf(p),
        d.dp_b / v.powf(p),
        w.b_graph_norm() / (v.powf(p - 2.0) * q2),
    ])
}

/// Samples graph slots and reports the maxima of the growth ratios.
pub fn verify_growth(n: usize, p: f64, lambda_cap: f64, samples: usize, seed: u64) -> Result<GrowthReport> {
    crate::geometry::check_dim(n)?;
    crate::energy::check_exponent(p)?;
    if !(lambda_cap > 0.0) {
        return Err(invalid("slope cap must be positive"));
    }
    let m = n - 2;
    let rows = map_nodes(samples, |k| {
        let mut rng = rng::stream(seed, k as u64);
        let g = sample_graph_jet(&mut rng, m, lambda_cap);
        growth_ratios(&g, p).map(|r| (g.q_norm(), r))
    });
    let mut max = [0.0_f64; 7];
    let mut decade_max = [[0.0_f64; 7]; 3];
    for row in rows {
        let (qn, r) = row?;
        for i in 0..7 {
            max[i] = max[i].max(r[i]);
        }
        for (d, &(lo, hi)) in STABILITY_DECADES.iter().enumerate() {
            if qn >= lo && (qn < hi || (d == STABILITY_DECADES.len() - 1 && qn <= hi)) {
                for i in 0..7 {
                    decade_max[d][i] = decade_max[d][i].max(r[i]);
                }
            }
        }
    }
    Ok(GrowthReport { p, lambda_cap, samples, max, decade_max })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_jet(seed: u64, m: usize, cap: f64, qmag: f64) -> GraphJet {
        let mut rng = rng::stream(seed, 0);
        let mut g = sample_graph_jet(&mut rng, m, cap);
        let s = random_symmetric(&mut rng, m);
        for a in 0..2 {
            for b in 0..2 {
                for j in 0..m {
                    g.d2u[a][b][j] = qmag * s[a][b][j];
                }
            }
        }
        g
    }

    #[test]
    fn zero_slots_give_zero_coefficients() {
        let g = GraphJet::new([&[0.0], &[0.0]], [[&[0.0], &[0.0]], [&[0.0], &[0.0]]]).unwrap();
        let c = el_coeffs_e(&g, 3.0).unwrap();
        assert_eq!(c.a_norm(), 0.0);
        assert_eq!(c.b_norm(), 0.0);
        let r = growth_ratios(&g, 3.0).unwrap();
        assert_eq!((r[1], r[4]), (0.0, 0.0));
    }

    #[test]
    fn flat_metric_reduction() {
        // Du = 0: a = (1 + |q|²)^{(p−2)/2} q
        let q = [[[0.3, -1.2], [0.7, 0.1]], [[0.7, 0.1], [-0.4, 2.0]]];
        let g = GraphJet::new([&[0.0, 0.0], &[0.0, 0.0]], [[&q[0][0], &q[0][1]], [&q[1][0], &q[1][1]]]).unwrap();
        for p in [2.0, 3.0, 4.5] {
            let c = el_coeffs_e(&g, p).unwrap();
            let pref = g.v().powf(p - 2.0);
            for a in 0..2 {
                for b in 0..2 {
                    for j in 0..2 {
                        assert!((c.a[a][b][j] - pref * q[a][b][j]).abs() < 1e-13 * pref);
                    }
                }
            }
        }
    }

    #[test]
    fn second_derivatives_match_finite_differences() {
        let p = 3.0;
        for seed in 0..20 {
            let g = random_jet(seed, 2, 1.0, 1.5);
            let h = 1e-6;
            let dirs: Vec<Direction> = Direction::p_basis(2).into_iter().chain(Direction::q_basis(2)).collect();
            for dir in &dirs {
                let (da, db) = ab_directional(&g, p, dir).unwrap();
                let shifted = |s: f64| {
                    let mut x = g;
                    for a in 0..2 {
                        for j in 0..2 {
                            x.du[a][j] += s * dir.dp[a][j];
                            for b in 0..2 {
                                x.d2u[a][b][j] += s * dir.dq[a][b][j];
                            }
                        }
                    }
                    el_coeffs_e(&x, p).unwrap()
                };
                let (cp, cm) = (shifted(h), shifted(-h));
                for a in 0..2 {
                    for j in 0..2 {
                        let fd = (cp.b[a][j] - cm.b[a][j]) / (2.0 * h);
                        assert!((fd - db[a][j]).abs() <= 1e-6 * (1.0 + fd.abs()), "{fd} {}", db[a][j]);
                        for b in 0..2 {
                            let fd = (cp.a[a][b][j] - cm.a[a][b][j]) / (2.0 * h);
                            assert!((fd - da[a][b][j]).abs() <= 1e-6 * (1.0 + fd.abs()));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn a_is_q_derivative_of_density() {
        // a = (1/p) ∂F/∂q against finite differences of the density itself
        let p = 3.5;
        let g = random_jet(4, 1, 0.8, 2.0);
        let c = el_coeffs_e(&g, p).unwrap();
        let dens = |x: &GraphJet| {
            let j = x.to_jet();
            let k = kernel::<f64>(3, &j.df, &j.d2f, false).unwrap();
            crate::energy::density(Functional::Ep, p, &k)
        };
        let h = 1e-6;
        let (mut gp, mut gm) = (g, g);
        gp.d2u[0][0][0] += h;
        gm.d2u[0][0][0] -= h;
        let fd = (dens(&gp) - dens(&gm)) / (2.0 * h) / p;
        assert!((fd - c.a[0][0][0]).abs() < 1e-6 * (1.0 + fd.abs()));
        let (mut gp, mut gm) = (g, g);
        gp.du[1][0] += h;
        gm.du[1][0] -= h;
        let fd = -(dens(&gp) - dens(&gm)) / (2.0 * h) / p;
        assert!((fd - c.b[1][0]).abs() < 1e-6 * (1.0 + fd.abs()));
    }

    #[test]
    fn flat_p2_contraction_is_unit() {
        let g = GraphJet::zeros(1);
        let mut rng = rng::stream(3, 0);
        let xi = random_symmetric(&mut rng, 1);
        let c = ellipticity_contraction(&g, 2.0, &xi).unwrap();
        assert!((c - 1.0).abs() < 1e-14);
    }

    #[test]
    fn planar_graph_has_vanishing_w_coefficients() {
        let g = GraphJet::zeros(1);
        let w = el_coeffs_w(&g.to_jet(), 3.0).unwrap();
        assert_eq!(w.b_graph_norm(), 0.0);
        assert!(w.hcal().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn sphere_hcal_at_p2_is_h() {
        let s = crate::surfaces::make_sphere(1.0, 32).unwrap();
        let jet = s.profile_jet(7).unwrap().to_jet();
        let w = el_coeffs_w(&jet, 2.0).unwrap();
        let norm: f64 = w.hcal().iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 2.0).abs() < 1e-12);
    }

    #[test]
    fn lg_annihilates_linear_fields() {
        let g = random_jet(9, 1, 1.0, 1.0);
        let w = el_coeffs_w(&g.to_jet(), 3.0).unwrap();
        let zero = [0.0; 3];
        assert_eq!(w.apply_lg([[&zero, &zero], [&zero, &zero]]), vec![0.0; 3]);
    }

    #[test]
    fn ellipticity_certified() {
        let r = verify_ellipticity(3, 3.0, 1.0, 2000, 1).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.lambda_min > 0.0);
        let small = verify_ellipticity(3, 4.0, 0.3, 2000, 5).unwrap();
        let large = verify_ellipticity(3, 4.0, 1.0, 2000, 5).unwrap();
        assert!(small.lambda_min >= large.lambda_min);
    }

    #[test]
    fn growth_ratios_are_finite() {
        let r = verify_growth(3, 3.0, 1.0, 2000, 2).unwrap();
        assert!(r.all_finite());
        assert!(r.max.iter().all(|&x| x > 0.0));
    }
}
