use crate::energy::Functional;
use crate::optimize::OptimizerConfig;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Effective parameters of one CLI run. Loaded from a TOML file (unknown keys
/// are rejected), then overridden by flags, then by `PCURV_THREADS`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub threads: usize,
    /// CSV destination; standard output when absent.
    pub out: Option<PathBuf>,
    /// Final mesh of `minimize`, directory of per-scale meshes for `neck`.
    pub mesh_out: Option<PathBuf>,
    pub shape: String,
    /// Shape list of `suite`.
    pub shapes: Vec<String>,
    pub p: f64,
    /// Exponent grid of `p-sweep`, `suite` and `verify-bounds`.
    pub ps: Vec<f64>,
    pub functional: Functional,
    pub eps: Vec<f64>,
    /// Profile nodes per neck surface.
    pub neck_m: usize,
    /// Ball center; defaults to the middle node of the surface.
    pub center: Option<[f64; 3]>,
    pub sigmas: Vec<f64>,
    /// Azimuthal sweep of axisymmetric profiles; 0 picks `2M` (64 for meshes).
    pub azimuthal: usize,
    pub samples: usize,
    pub lambda_caps: Vec<f64>,
    pub dim: usize,
    /// Dofs spot-checked by `gradcheck`.
    pub checks: usize,
    pub fd_step: f64,
    /// `mesh` or `nodes` for `dump-mesh`.
    pub format: String,
    pub optimizer: OptimizerConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            threads: 1,
            out: None,
            mesh_out: None,
            shape: "sphere:r=1,M=256".into(),
            shapes: vec![
                "sphere:r=1,M=256".into(),
                "tube:R=2,a=1,M=256".into(),
                "torus:R=2,a=1,N=64".into(),
                "skew-torus:N=64".into(),
                "torus:R=2,a=1,N=32,n=4".into(),
                "graph:n=3,N=32,amp=0.1".into(),
            ],
            p: 4.0,
            ps: vec![2.5, 3.0, 3.5, 4.0, 5.0, 6.0],
            functional: Functional::Ep,
            eps: vec![0.1, 0.05, 0.025, 0.0125],
            neck_m: 1024,
            center: None,
            sigmas: (1..=8).map(|k| 0.25 * k as f64).collect(),
            azimuthal: 0,
            samples: 10_000,
            lambda_caps: vec![0.3, 1.0],
            dim: 3,
            checks: 10,
            fd_step: 1e-6,
            format: "mesh".into(),
            optimizer: OptimizerConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let mut c = RunConfig { center: Some([1.0, 0.0, 0.1]), out: Some("a.csv".into()), ..Default::default() };
        c.optimizer.stop_ps_tol = Some(1e-7);
        c.fd_step = 0.1 + 0.2;
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn unknown_keys_are_errors() {
        assert!(RunConfig::from_toml("sead = 1\n").is_err());
        assert!(RunConfig::from_toml("[optimizer]\nmax_iter = 3\n").is_err());
        assert_eq!(RunConfig::from_toml("p = 3.0\n").unwrap().p, 3.0);
    }
}
