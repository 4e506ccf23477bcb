//! Steepest descent on the free nodal dofs with Armijo backtracking and a
//! Palais–Smale surrogate stopping rule.

use crate::energy::{check_exponent, energy_value, willmore, Functional};
use crate::error::{invalid, PcurvError, Result};
use crate::geometry::curvature_data;
use crate::sum::{pairwise_sum, try_map_nodes};
use crate::surfaces::Surface;
use crate::variation::{discrete_gradient, surrogate_with_gradient, VariationField};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Below this trial step the line search gives up.
pub const STEP_FLOOR: f64 = 1e-16;
/// Accepted iterates keep `det g` above this at every node.
pub const DETG_FLOOR: f64 = 1e-12;
/// Window (in iterations) of the relative energy stopping rule.
pub const ENERGY_WINDOW: usize = 25;
/// Absolute floor of the default surrogate tolerance.
pub const PS_TOL_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    pub max_iters: usize,
    pub armijo_c: f64,
    pub backtrack_factor: f64,
    pub init_step: f64,
    /// `None`: `max(1e-4 · initial surrogate, PS_TOL_FLOOR)`.
    pub stop_ps_tol: Option<f64>,
    pub stop_rel_energy_tol: f64,
    pub seed: u64,
    /// Recenter closed surfaces so their area centroid sits at the origin.
    pub renormalize_center: bool,
    pub ps_dictionary_size: usize,
    /// Start each line search from the Barzilai–Borwein step (long and short
    /// formulas alternating) instead of the previous accepted step.
    pub bb_step: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_iters: 20_000,
            armijo_c: 1e-4,
            backtrack_factor: 0.5,
            init_step: 1e-3,
            stop_ps_tol: None,
            stop_rel_energy_tol: 1e-10,
            seed: 0,
            renormalize_center: true,
            ps_dictionary_size: 8,
            bb_step: true,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = |x: f64| x.is_finite() && x > 0.0;
        if self.max_iters == 0 {
            return Err(invalid("max_iters must be positive"));
        }
        if !(self.armijo_c > 0.0 && self.armijo_c <= 0.5) {
            return Err(invalid("armijo_c must lie in (0, 1/2]"));
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return Err(invalid("backtrack_factor must lie in (0, 1)"));
        }
        if !pos(self.init_step) || !pos(self.stop_rel_energy_tol) {
            return Err(invalid("init_step and stop_rel_energy_tol must be positive"));
        }
        if self.stop_ps_tol.is_some_and(|t| !pos(t)) {
            return Err(invalid("stop_ps_tol must be positive"));
        }
        if self.ps_dictionary_size == 0 {
            return Err(invalid("ps_dictionary_size must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub energy: f64,
    /// Step that produced this iterate (0 for the start).
    pub step: f64,
    pub ps_surrogate: f64,
    pub grad_norm: f64,
    pub min_detg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OptStatus {
    ConvergedPS,
    ConvergedEnergy,
    MaxIters,
    DegenerateStep,
}

impl fmt::Display for OptStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OptStatus::ConvergedPS => "ConvergedPS",
            OptStatus::ConvergedEnergy => "ConvergedEnergy",
            OptStatus::MaxIters => "MaxIters",
            OptStatus::DegenerateStep => "DegenerateStep",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct OptRun {
    pub functional: Functional,
    pub p: f64,
    pub trace: Vec<TraceRow>,
    pub final_surface: Surface,
    pub status: OptStatus,
    /// Surrogate tolerance in effect.
    pub ps_tol: f64,
}

impl OptRun {
    pub fn final_energy(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |r| r.energy)
    }

    pub fn initial_surrogate(&self) -> f64 {
        self.trace.first().map_or(f64::NAN, |r| r.ps_surrogate)
    }

    pub fn final_surrogate(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |r| r.ps_surrogate)
    }

    /// Turns a collapsed line search into [`PcurvError::DegenerateStep`].
    pub fn into_result(self) -> Result<OptRun> {
        if self.status == OptStatus::DegenerateStep {
            let last = self.trace.last().copied();
            return Err(PcurvError::DegenerateStep {
                iteration: last.map_or(0, |r| r.iteration),
                step: STEP_FLOOR,
            });
        }
        Ok(self)
    }
}

struct Iterate {
    surface: Surface,
    field: VariationField,
    surrogate: f64,
    min_detg: f64,
}

fn evaluate(surface: Surface, p: f64, functional: Functional, cfg: &OptimizerConfig) -> Result<Iterate> {
    let field = discrete_gradient(&surface, p, functional)?;
    let surrogate = surrogate_with_gradient(&surface, p, functional, &field.grad, cfg.ps_dictionary_size, cfg.seed)?.surrogate;
    let min_detg = surface.min_detg();
    Ok(Iterate { surface, field, surrogate, min_detg })
}

/// Area centroid of a closed surface (only `z` for axisymmetric profiles).
fn recenter(surface: &Surface) -> Result<Surface> {
    if !surface.is_closed() {
        return Ok(surface.clone());
    }
    let rows = try_map_nodes(surface.node_count(), |node| {
        let jet = surface.jet_at(node)?;
        let dmu = surface.weight(node) * curvature_data(&jet).map_err(|e| e.at_node(node))?.sqrtdetg;
        Ok::<(f64, Vec<f64>), PcurvError>((dmu, surface.position(node)))
    })?;
    let area = pairwise_sum(&rows.iter().map(|r| r.0).collect::<Vec<_>>());
    let n = surface.dim();
    let c: Vec<f64> =
        (0..n).map(|i| pairwise_sum(&rows.iter().map(|r| r.0 * r.1[i]).collect::<Vec<_>>()) / area).collect();
    let mut dofs = surface.dofs().to_vec();
    match surface {
        Surface::Axisym(_) => dofs.chunks_mut(2).for_each(|rz| rz[1] -= c[2]),
        _ => dofs.chunks_mut(n).for_each(|x| x.iter_mut().zip(&c).for_each(|(a, b)| *a -= b)),
    }
    surface.with_dofs(dofs)
}

fn admissible(s: &Surface) -> bool {
    s.check_immersed().is_ok() && s.min_detg() > DETG_FLOOR
}

/// Minimizes `functional` at exponent `p` over the free dofs of `surface`.
///
/// The descent direction is the pointwise normal part of the discrete gradient.
/// Tangential node motion only reparametrizes the surface, and letting it run
/// free drives the centered stencils into an odd–even staircase whose discrete
/// energy undercuts the smooth minimum.
///
/// Closed-form profiles are first tested for criticality as given; if the
/// surrogate is not already below tolerance, descent continues on the sampled
/// representation of the same nodes. A collapsed line search ends the run with
/// [`OptStatus::DegenerateStep`] and keeps the trace.
pub fn minimize(surface: &Surface, p: f64, functional: Functional, cfg: &OptimizerConfig) -> Result<OptRun> {
    check_exponent(p)?;
    cfg.validate()?;
    surface.check_immersed()?;
    let finish = |trace, final_surface, status, ps_tol| OptRun { functional, p, trace, final_surface, status, ps_tol };
    let row = |k: usize, it: &Iterate, step: f64| TraceRow {
        iteration: k,
        energy: it.field.energy,
        step,
        ps_surrogate: it.surrogate,
        grad_norm: it.field.norm(),
        min_detg: it.min_detg,
    };

    let start = if cfg.renormalize_center && !surface.is_analytic() { recenter(surface)? } else { surface.clone() };
    let mut it = evaluate(start, p, functional, cfg)?;
    let mut ps_tol = cfg.stop_ps_tol.unwrap_or(PS_TOL_FLOOR.max(1e-4 * it.surrogate));
    if it.surface.is_analytic() {
        if it.surrogate <= ps_tol {
            let r = row(0, &it, 0.0);
            return Ok(finish(vec![r], it.surface, OptStatus::ConvergedPS, ps_tol));
        }
        it = evaluate(it.surface.to_sampled(), p, functional, cfg)?;
        ps_tol = cfg.stop_ps_tol.unwrap_or(PS_TOL_FLOOR.max(1e-4 * it.surrogate));
    }

    let mut trace = vec![row(0, &it, 0.0)];
    let mut step = cfg.init_step;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    for k in 1..=cfg.max_iters + 1 {
        if it.surrogate <= ps_tol {
            return Ok(finish(trace, it.surface, OptStatus::ConvergedPS, ps_tol));
        }
        if trace.len() > ENERGY_WINDOW {
            let old = trace[trace.len() - 1 - ENERGY_WINDOW].energy;
            let e = it.field.energy;
            if (old - e) <= cfg.stop_rel_energy_tol * e.abs() {
                return Ok(finish(trace, it.surface, OptStatus::ConvergedEnergy, ps_tol));
            }
        }
        if k > cfg.max_iters {
            break;
        }

        let x = it.surface.dofs().to_vec();
        let g = it.surface.normal_part(&it.field.grad)?;
        let g = &g;
        let g2 = it.field.dot(g);
        if cfg.bb_step {
            if let Some((xo, go)) = &prev {
                let (mut ss, mut sy, mut yy) = (0.0, 0.0, 0.0);
                for i in 0..x.len() {
                    let (s, y) = (x[i] - xo[i], g[i] - go[i]);
                    ss += s * s;
                    sy += s * y;
                    yy += y * y;
                }
                if sy > 0.0 && ss > 0.0 {
                    step = if k % 2 == 0 { ss / sy } else { sy / yy };
                }
            }
        }
        let e0 = it.field.energy;
        let accepted = loop {
            if step < STEP_FLOOR {
                break None;
            }
            let cand = it.surface.displaced(g, -step)?;
            if admissible(&cand) {
                if let Ok(e) = energy_value(&cand, functional, p) {
                    if e <= e0 - cfg.armijo_c * step * g2 && e < e0 {
                        break Some(cand);
                    }
                }
            }
            step *= cfg.backtrack_factor;
        };
        let Some(cand) = accepted else {
            return Ok(finish(trace, it.surface, OptStatus::DegenerateStep, ps_tol));
        };
        let cand = if cfg.renormalize_center { recenter(&cand)? } else { cand };
        it = evaluate(cand, p, functional, cfg)?;
        prev = Some((x, g.clone()));
        trace.push(row(k, &it, step));
        if !cfg.bb_step {
            step = (step / cfg.backtrack_factor).min(cfg.init_step.max(step));
        }
    }
    Ok(finish(trace, it.surface, OptStatus::MaxIters, ps_tol))
}

/// One entry of a p-sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PSweepRow {
    pub p: f64,
    pub energy: f64,
    pub willmore: f64,
    pub status: Option<OptStatus>,
    pub iterations: usize,
    pub ps_surrogate: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PSweepTable {
    pub functional: Functional,
    pub rows: Vec<PSweepRow>,
    /// `α̂(p₁) ≤ α̂(p₂)(1 + slack)` for consecutive successful rows.
    pub monotone: bool,
    pub slack: f64,
}

/// Attained minima over a grid of exponents in `(2, 6]`. `start(p)` builds the
/// initial surface of each run; failures are recorded in their row.
pub fn p_sweep<F>(functional: Functional, ps: &[f64], cfg: &OptimizerConfig, start: F) -> Result<PSweepTable>
where
    F: Fn(f64) -> Result<Surface>,
{
    if ps.iter().any(|&p| !(p > 2.0 && p <= 6.0)) {
        return Err(invalid("p grid must lie in (2, 6]"));
    }
    cfg.validate()?;
    let slack = 1e-3;
    let rows: Vec<PSweepRow> = ps
        .iter()
        .map(|&p| {
            let run = start(p).and_then(|s| minimize(&s, p, functional, cfg));
            match run {
                Ok(run) => {
                    let w = willmore(&run.final_surface).map_or(f64::NAN, |w| w.willmore);
                    PSweepRow {
                        p,
                        energy: run.final_energy(),
                        willmore: w,
                        status: Some(run.status),
                        iterations: run.trace.len() - 1,
                        ps_surrogate: run.final_surrogate(),
                        error: None,
                    }
                }
                Err(e) => PSweepRow {
                    p,
                    energy: f64::NAN,
                    willmore: f64::NAN,
                    status: None,
                    iterations: 0,
                    ps_surrogate: f64::NAN,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let mut ok: Vec<&PSweepRow> = rows.iter().filter(|r| r.error.is_none()).collect();
    ok.sort_by(|a, b| a.p.total_cmp(&b.p));
    let monotone = ok.windows(2).all(|w| w[0].energy <= w[1].energy * (1.0 + slack));
    Ok(PSweepTable { functional, rows, monotone, slack })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::{make_sphere, perturb};
    use std::f64::consts::PI;

    fn sphere(r: f64, m: usize) -> Surface {
        Surface::Axisym(make_sphere(r, m).unwrap())
    }

    #[test]
    fn config_validation() {
        assert!(OptimizerConfig::default().validate().is_ok());
        let bad = [
            OptimizerConfig { armijo_c: 0.6, ..Default::default() },
            OptimizerConfig { backtrack_factor: 1.0, ..Default::default() },
            OptimizerConfig { init_step: -1.0, ..Default::default() },
            OptimizerConfig { stop_ps_tol: Some(0.0), ..Default::default() },
            OptimizerConfig { max_iters: 0, ..Default::default() },
        ];
        for c in bad {
            assert!(matches!(c.validate(), Err(PcurvError::InvalidParameter(_))));
        }
    }

    #[test]
    fn config_from_toml() {
        let c: OptimizerConfig = toml::from_str("max_iters = 10\nbb_step = false\n").unwrap();
        assert_eq!(c.max_iters, 10);
        assert!(!c.bb_step);
        assert!(toml::from_str::<OptimizerConfig>("max_iter = 10\n").is_err());
    }

    #[test]
    fn critical_sphere_converges_immediately() {
        let run = minimize(&sphere(2f64.sqrt(), 128), 4.0, Functional::Ep, &OptimizerConfig::default()).unwrap();
        assert_eq!(run.status, OptStatus::ConvergedPS);
        assert_eq!(run.trace.len(), 1);
        assert!((run.final_energy() - 8.0 * PI).abs() <= 5e-3 * 8.0 * PI);
    }

    #[test]
    fn trace_invariants_and_determinism() {
        let s = perturb(&sphere(1.0, 32), 0.05, 2).unwrap();
        let cfg = OptimizerConfig { max_iters: 150, ..Default::default() };
        let a = minimize(&s, 3.0, Functional::Ep, &cfg).unwrap();
        let b = minimize(&s, 3.0, Functional::Ep, &cfg).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.status, OptStatus::MaxIters);
        for w in a.trace.windows(2) {
            assert!(w[1].energy < w[0].energy);
        }
        assert!(a.trace.iter().all(|r| r.min_detg > DETG_FLOOR));
        assert!(a.final_energy() < a.trace[0].energy);
    }

    #[test]
    fn armijo_condition_holds_on_accepted_steps() {
        let s = perturb(&sphere(1.2, 24), 0.05, 5).unwrap();
        let cfg = OptimizerConfig { max_iters: 40, ..Default::default() };
        let run = minimize(&s, 3.0, Functional::Wp, &cfg).unwrap();
        let mut cur = s.clone();
        if cfg.renormalize_center {
            cur = recenter(&cur).unwrap();
        }
        for r in &run.trace[1..] {
            let g = discrete_gradient(&cur, 3.0, Functional::Wp).unwrap();
            let d = cur.normal_part(&g.grad).unwrap();
            let g2 = g.dot(&d);
            assert!(r.energy <= g.energy - cfg.armijo_c * r.step * g2 + 1e-12 * g.energy.abs());
            cur = recenter(&cur.displaced(&d, -r.step).unwrap()).unwrap();
            assert!((energy_value(&cur, Functional::Wp, 3.0).unwrap() - r.energy).abs() <= 1e-12 * r.energy);
        }
    }

    #[test]
    fn recentering_moves_centroid_to_origin() {
        let s = sphere(1.0, 32).to_sampled();
        let shifted = s.with_dofs(s.dofs().chunks(2).flat_map(|rz| [rz[0], rz[1] + 0.3]).collect()).unwrap();
        let c = recenter(&shifted).unwrap();
        for (a, b) in c.dofs().iter().zip(s.dofs()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_status_maps_to_error() {
        let run = OptRun {
            functional: Functional::Ep,
            p: 3.0,
            trace: vec![],
            final_surface: sphere(1.0, 16),
            status: OptStatus::DegenerateStep,
            ps_tol: 1.0,
        };
        assert!(matches!(run.into_result(), Err(PcurvError::DegenerateStep { .. })));
    }

    #[test]
    fn p_sweep_records_failures() {
        let cfg = OptimizerConfig { max_iters: 5, ..Default::default() };
        let t = p_sweep(Functional::Ep, &[3.0, 4.0], &cfg, |p| {
            if p == 4.0 {
                Err(invalid("no start"))
            } else {
                Ok(sphere(1.0, 24))
            }
        })
        .unwrap();
        assert!(t.rows[0].error.is_none());
        assert!(t.rows[1].error.is_some());
        assert!(t.monotone);
        assert!(p_sweep(Functional::Ep, &[7.0], &cfg, |_| Ok(sphere(1.0, 24))).is_err());
    }
}
