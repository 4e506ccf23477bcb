//! Pointwise differential geometry of a parametrized surface in `R^n`.
//!
//! Everything here is a pure function of a second-order jet `(f, Df, D²f)` at
//! one parameter point. Arrays are dense and fixed-size: parameter indices run
//! over `{0, 1}` and ambient indices over `0..n` with `3 <= n <= 8`.

use crate::error::{invalid, PcurvError, Result};
use crate::real::Real;

pub const MIN_DIM: usize = 3;
pub const MAX_DIM: usize = 8;

/// Jets with `det g` at or below this value are rejected as non-immersed.
pub const DEGENERACY_THRESHOLD: f64 = 1e-14;

pub(crate) type Vecn<T> = [T; MAX_DIM];

/// Second-order jet of an immersion at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    n: usize,
    pub(crate) f: Vecn<f64>,
    pub(crate) df: [Vecn<f64>; 2],
    pub(crate) d2f: [[Vecn<f64>; 2]; 2],
}

impl Jet2 {
    pub fn zeros(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Jet2 { n, f: [0.0; MAX_DIM], df: [[0.0; MAX_DIM]; 2], d2f: [[[0.0; MAX_DIM]; 2]; 2] })
    }

    /// Builds a jet from slices of length `n`. `d2f[0][1]` and `d2f[1][0]` must agree exactly.
    pub fn new(f: &[f64], df: [&[f64]; 2], d2f: [[&[f64]; 2]; 2]) -> Result<Self> {
        let n = f.len();
        let mut jet = Jet2::zeros(n)?;
        for s in df.iter().chain(d2f.iter().flatten()) {
            if s.len() != n {
                return Err(PcurvError::ShapeMismatch { expected: n, got: s.len() });
            }
        }
        if d2f[0][1] != d2f[1][0] {
            return Err(invalid("mixed second partials must be symmetric"));
        }
        jet.f[..n].copy_from_slice(f);
        for a in 0..2 {
            jet.df[a][..n].copy_from_slice(df[a]);
            for b in 0..2 {
                jet.d2f[a][b][..n].copy_from_slice(d2f[a][b]);
            }
        }
        Ok(jet)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }
    pub fn f(&self) -> &[f64] {
        &self.f[..self.n]
    }
    pub fn df(&self, alpha: usize) -> &[f64] {
        &self.df[alpha][..self.n]
    }
    pub fn d2f(&self, alpha: usize, beta: usize) -> &[f64] {
        &self.d2f[alpha][beta][..self.n]
    }

    /// The jet of `lambda * f`.
    pub fn scaled(&self, lambda: f64) -> Jet2 {
        let mut out = *self;
        for i in 0..self.n {
            out.f[i] *= lambda;
            for a in 0..2 {
                out.df[a][i] *= lambda;
                for b in 0..2 {
                    out.d2f[a][b][i] *= lambda;
                }
            }
        }
        out
    }

    /// The jet of `R f` for an `n×n` matrix `R` given row-major.
    pub fn transformed(&self, rot: &[f64]) -> Result<Jet2> {
        let n = self.n;
        if rot.len() != n * n {
            return Err(PcurvError::ShapeMismatch { expected: n * n, got: rot.len() });
        }
        let apply = |v: &Vecn<f64>| {
            let mut w = [0.0; MAX_DIM];
            for i in 0..n {
                w[i] = (0..n).map(|j| rot[i * n + j] * v[j]).sum();
            }
            w
        };
        let mut out = *self;
        out.f = apply(&self.f);
        for a in 0..2 {
            out.df[a] = apply(&self.df[a]);
            for b in 0..2 {
                out.d2f[a][b] = apply(&self.d2f[a][b]);
            }
        }
        Ok(out)
    }

    pub(crate) fn from_parts(n: usize, f: Vecn<f64>, df: [Vecn<f64>; 2], d2f: [[Vecn<f64>; 2]; 2]) -> Jet2 {
        debug_assert!((MIN_DIM..=MAX_DIM).contains(&n));
        Jet2 { n, f, df, d2f }
    }
}

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if (MIN_DIM..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(invalid(format!("ambient dimension {n} outside {MIN_DIM}..={MAX_DIM}")))
    }
}

/// Fundamental forms and curvature quantities at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureData {
    pub n: usize,
    pub g: [[f64; 2]; 2],
    pub ginv: [[f64; 2]; 2],
    pub detg: f64,
    pub sqrtdetg: f64,
    /// Normal projector, row-major `n×n` in the leading block.
    pub pperp: [[f64; MAX_DIM]; MAX_DIM],
    /// Second fundamental form `A_{αβ}`.
    pub a: [[[f64; MAX_DIM]; 2]; 2],
    /// Mean curvature vector `H = g^{αβ} A_{αβ}`.
    pub h: [f64; MAX_DIM],
    pub norm_a2: f64,
    pub norm_h2: f64,
}

impl CurvatureData {
    pub fn a_vec(&self, alpha: usize, beta: usize) -> &[f64] {
        &self.a[alpha][beta][..self.n]
    }
    pub fn h_vec(&self) -> &[f64] {
        &self.h[..self.n]
    }
    pub fn pperp_row(&self, i: usize) -> &[f64] {
        &self.pperp[i][..self.n]
    }
}

/// Computes `g`, `P^⊥`, `A`, `H`, `|A|²` and `|H|²` from a jet.
pub fn curvature_data(jet: &Jet2) -> Result<CurvatureData> {
    let n = jet.n;
    let k = kernel::<f64>(n, &jet.df, &jet.d2f, false)?;
    let mut pperp = [[0.0; MAX_DIM]; MAX_DIM];
    for i in 0..n {
        for j in 0..n {
            let mut t = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    t += k.ginv[a][b] * jet.df[a][i] * jet.df[b][j];
                }
            }
            pperp[i][j] = if i == j { 1.0 } else { 0.0 } - t;
        }
    }
    Ok(CurvatureData {
        n,
        g: k.g,
        ginv: k.ginv,
        detg: k.detg,
        sqrtdetg: k.sqrtg,
        pperp,
        a: k.a,
        h: k.h,
        norm_a2: k.norm_a2,
        norm_h2: k.norm_h2,
    })
}

/// Levi-Cività connection coefficients `Γ^γ_{αβ}`, indexed `gamma[γ][α][β]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Christoffel {
    pub gamma: [[[f64; 2]; 2]; 2],
}

/// Standard Christoffel symbols of the second kind from `g` and `dg[γ][α][β] = ∂_γ g_{αβ}`.
pub fn christoffel(g: &[[f64; 2]; 2], dg: &[[[f64; 2]; 2]; 2]) -> Result<Christoffel> {
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    if !(det > DEGENERACY_THRESHOLD) || g[0][0] <= 0.0 {
        return Err(PcurvError::DegenerateJet { node: None, detg: det });
    }
    let ginv = [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]];
    let mut gamma = [[[0.0; 2]; 2]; 2];
    for c in 0..2 {
        for a in 0..2 {
            for b in 0..2 {
                let mut s = 0.0;
                for d in 0..2 {
                    s += ginv[c][d] * (dg[a][d][b] + dg[b][d][a] - dg[d][a][b]);
                }
                gamma[c][a][b] = 0.5 * s;
            }
        }
    }
    Ok(Christoffel { gamma })
}

/// First partials of the induced metric computed from the jet:
/// `∂_γ g_{αβ} = ⟨∂²_{γα} f, ∂_β f⟩ + ⟨∂_α f, ∂²_{γβ} f⟩`.
pub fn metric_derivative(jet: &Jet2) -> [[[f64; 2]; 2]; 2] {
    let n = jet.n;
    let mut dg = [[[0.0; 2]; 2]; 2];
    for c in 0..2 {
        for a in 0..2 {
            for b in 0..2 {
                dg[c][a][b] = dot(&jet.d2f[c][a], &jet.df[b], n) + dot(&jet.df[a], &jet.d2f[c][b], n);
            }
        }
    }
    dg
}

#[inline]
pub(crate) fn dot<T: Real>(x: &Vecn<T>, y: &Vecn<T>, n: usize) -> T {
    let mut s = T::zero();
    for i in 0..n {
        s += x[i] * y[i];
    }
    s
}

/// Pointwise quantities plus their partial derivatives with respect to the
/// slot variables `P = Df` and `Q = D²f` (entries of `Q` treated as independent).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Kernel<T> {
    pub n: usize,
    pub g: [[T; 2]; 2],
    pub ginv: [[T; 2]; 2],
    pub detg: T,
    pub sqrtg: T,
    pub a: [[Vecn<T>; 2]; 2],
    pub h: Vecn<T>,
    pub norm_a2: T,
    pub norm_h2: T,
    pub da2_dp: [Vecn<T>; 2],
    pub da2_dq: [[Vecn<T>; 2]; 2],
    pub dh2_dp: [Vecn<T>; 2],
    pub dh2_dq: [[Vecn<T>; 2]; 2],
    pub dsqrtg_dp: [Vecn<T>; 2],
}

/// The pointwise kernel.
///
/// With `d^k_{αβ} = g^{kσ}⟨P_σ, Q_{αβ}⟩` the tangential coordinates of `Q_{αβ}`,
/// the normal part is `A_{αβ} = Q_{αβ} − d^k_{αβ} P_k = P^⊥ Q_{αβ}`. Varying the
/// frame gives `⟨δP^⊥ Q₁, Q₂⟩ = −d₁^k⟨δP_k, A₂⟩ − d₂^k⟨δP_k, A₁⟩`, from which
///
/// ```text
/// ∂|A|²/∂P_k = −4 S^{kτ} P_τ − 2 d^k_{αβ} A^{αβ},   S^{στ} = g^{σα} g^{τγ} g^{βλ} ⟨A_{αβ}, A_{γλ}⟩
/// ∂|H|²/∂P_k = −4 K^{kτ} P_τ − 2 e^k H,           K^{στ} = g^{σα} g^{τβ} ⟨H, A_{αβ}⟩, e^k = g^{αβ} d^k_{αβ}
/// ∂|A|²/∂Q_{αβ} = 2 A^{αβ},  ∂|H|²/∂Q_{αβ} = 2 g^{αβ} H,  ∂√det g/∂P_k = √det g · g^{kτ} P_τ
/// ```
/// where `A^{αβ} = g^{αγ} g^{βλ} A_{γλ}`.
pub(crate) fn kernel<T: Real>(
    n: usize,
    p: &[Vecn<T>; 2],
    q: &[[Vecn<T>; 2]; 2],
    with_derivs: bool,
) -> Result<Kernel<T>> {
    let mut g = [[T::zero(); 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            g[a][b] = dot(&p[a], &p[b], n);
        }
    }
    let detg = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let dv = detg.value();
    if !(dv > DEGENERACY_THRESHOLD) {
        return Err(PcurvError::DegenerateJet { node: None, detg: dv });
    }
    let ginv = [[g[1][1] / detg, -g[0][1] / detg], [-g[1][0] / detg, g[0][0] / detg]];
    let sqrtg = detg.sqrt();

    // d[k][α][β]
    let mut d = [[[T::zero(); 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let c0 = dot(&p[0], &q[a][b], n);
            let c1 = dot(&p[1], &q[a][b], n);
            for k in 0..2 {
                d[k][a][b] = ginv[k][0] * c0 + ginv[k][1] * c1;
            }
        }
    }
    let mut a_ff = [[[T::zero(); MAX_DIM]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for i in 0..n {
                a_ff[a][b][i] = q[a][b][i] - d[0][a][b] * p[0][i] - d[1][a][b] * p[1][i];
            }
        }
    }
    let mut h = [T::zero(); MAX_DIM];
    let mut htil = [T::zero(); MAX_DIM];
    for a in 0..2 {
        for b in 0..2 {
            for i in 0..n {
                h[i] += ginv[a][b] * a_ff[a][b][i];
                htil[i] += ginv[a][b] * q[a][b][i];
            }
        }
    }
    // A^{αβ} = g^{αγ} g^{βλ} A_{γλ}
    let mut a_up = [[[T::zero(); MAX_DIM]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for l in 0..2 {
                    let w = ginv[a][c] * ginv[b][l];
                    for i in 0..n {
                        a_up[a][b][i] += w * a_ff[c][l][i];
                    }
                }
            }
        }
    }
    let mut norm_a2 = T::zero();
    for a in 0..2 {
        for b in 0..2 {
            norm_a2 += dot(&a_up[a][b], &q[a][b], n);
        }
    }
    let norm_h2 = dot(&h, &htil, n);

    let zero_p = [[T::zero(); MAX_DIM]; 2];
    let zero_q = [[[T::zero(); MAX_DIM]; 2]; 2];
    let mut k = Kernel {
        n,
        g,
        ginv,
        detg,
        sqrtg,
        a: a_ff,
        h,
        norm_a2,
        norm_h2,
        da2_dp: zero_p,
        da2_dq: zero_q,
        dh2_dp: zero_p,
        dh2_dq: zero_q,
        dsqrtg_dp: zero_p,
    };
    if !with_derivs {
        return Ok(k);
    }

    // N_{αγ} = g^{βλ} ⟨A_{αβ}, A_{γλ}⟩, S = ginv N ginv
    let mut nmat = [[T::zero(); 2]; 2];
    for a in 0..2 {
        for c in 0..2 {
            let mut s = T::zero();
            for b in 0..2 {
                for l in 0..2 {
                    s += ginv[b][l] * dot(&a_ff[a][b], &a_ff[c][l], n);
                }
            }
            nmat[a][c] = s;
        }
    }
    let mut hk = [[T::zero(); 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            hk[a][b] = dot(&h, &a_ff[a][b], n);
        }
    }
    let s_up = congruence(&ginv, &nmat);
    let k_up = congruence(&ginv, &hk);
    let mut e = [T::zero(); 2];
    for kk in 0..2 {
        for a in 0..2 {
            for b in 0..2 {
                e[kk] += ginv[a][b] * d[kk][a][b];
            }
        }
    }
    let m4 = T::cst(-4.0);
    let m2 = T::cst(-2.0);
    for kk in 0..2 {
        for i in 0..n {
            let mut da = m4 * (s_up[kk][0] * p[0][i] + s_up[kk][1] * p[1][i]);
            for a in 0..2 {
                for b in 0..2 {
                    da += m2 * d[kk][a][b] * a_up[a][b][i];
                }
            }
            k.da2_dp[kk][i] = da;
            k.dh2_dp[kk][i] = m4 * (k_up[kk][0] * p[0][i] + k_up[kk][1] * p[1][i]) + m2 * e[kk] * h[i];
            k.dsqrtg_dp[kk][i] = sqrtg * (ginv[kk][0] * p[0][i] + ginv[kk][1] * p[1][i]);
        }
    }
    let two = T::cst(2.0);
    for a in 0..2 {
        for b in 0..2 {
            for i in 0..n {
                k.da2_dq[a][b][i] = two * a_up[a][b][i];
                k.dh2_dq[a][b][i] = two * ginv[a][b] * h[i];
            }
        }
    }
    Ok(k)
}

/// `G M G` for symmetric 2×2 `G`.
fn congruence<T: Real>(gi: &[[T; 2]; 2], m: &[[T; 2]; 2]) -> [[T; 2]; 2] {
    let mut out = [[T::zero(); 2]; 2];
    for s in 0..2 {
        for t in 0..2 {
            let mut acc = T::zero();
            for a in 0..2 {
                for c in 0..2 {
                    acc += gi[s][a] * gi[t][c] * m[a][c];
                }
            }
            out[s][t] = acc;
        }
    }
    out
}
