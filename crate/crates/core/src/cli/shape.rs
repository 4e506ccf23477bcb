//! Shape specifications of the form `kind:key=value,key=value`.

use crate::energy::Functional;
use crate::error::{invalid, Result};
use crate::surfaces::{
    make_neck_family, make_skew_torus, make_sphere, make_torus, perturb, AxisymProfile, GraphBoundary, GraphPatch,
    ProfileShape, Surface,
};
use std::collections::BTreeMap;
use std::f64::consts::TAU;

/// Parsed shape specification.
///
/// | kind | keys (defaults) |
/// |---|---|
/// | `sphere` | `r=1` (or `r=critical`), `M=256`, `repr=analytic\|sampled` |
/// | `torus` | `R=2`, `a=1`, `N=64` (or `N1`, `N2`), `n=3` |
/// | `skew-torus` | `N=64` |
/// | `tube` | `R=2`, `a=1`, `M=256`, `repr` |
/// | `catenoid` | `c=1`, `h=1`, `M=256`, `repr` |
/// | `neck` | `eps=0.05`, `M=1024` |
/// | `graph` | `n=3`, `L=1`, `N=32`, `bc=periodic\|dirichlet`, `amp=0.1` |
///
/// Every kind also accepts `perturb=<amplitude>`, seeded by the run seed.
/// `r=critical` selects `√(p−2)` for `Ep` and `√(2p−4)` for `Wp`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSpec {
    pub kind: String,
    params: BTreeMap<String, String>,
}

const KINDS: [(&str, &[&str]); 7] = [
    ("sphere", &["r", "M", "repr"]),
    ("torus", &["R", "a", "N", "N1", "N2", "n"]),
    ("skew-torus", &["N"]),
    ("tube", &["R", "a", "M", "repr"]),
    ("catenoid", &["c", "h", "M", "repr"]),
    ("neck", &["eps", "M"]),
    ("graph", &["n", "L", "N", "bc", "amp"]),
];

impl std::str::FromStr for ShapeSpec {
    type Err = crate::error::PcurvError;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let keys = KINDS
            .iter()
            .find(|(k, _)| *k == kind)
            .map(|(_, keys)| *keys)
            .ok_or_else(|| invalid(format!("unknown shape kind `{kind}`")))?;
        let mut params = BTreeMap::new();
        for item in rest.split(',').filter(|x| !x.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| invalid(format!("expected key=value, got `{item}`")))?;
            if k != "perturb" && !keys.contains(&k) {
                return Err(invalid(format!("unknown key `{k}` for shape `{kind}`")));
            }
            if params.insert(k.to_string(), v.to_string()).is_some() {
                return Err(invalid(format!("duplicate key `{k}`")));
            }
        }
        Ok(ShapeSpec { kind: kind.to_string(), params })
    }
}

impl ShapeSpec {
    fn num(&self, key: &str, default: f64) -> Result<f64> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| invalid(format!("`{key}` must be a number, got `{v}`"))),
        }
    }

    fn count(&self, key: &str, default: usize) -> Result<usize> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| invalid(format!("`{key}` must be a non-negative integer, got `{v}`"))),
        }
    }

    fn sampled(&self) -> Result<bool> {
        match self.params.get("repr").map(String::as_str) {
            None | Some("analytic") => Ok(false),
            Some("sampled") => Ok(true),
            Some(v) => Err(invalid(format!("`repr` must be analytic or sampled, got `{v}`"))),
        }
    }

    /// Builds the surface; `p` and `functional` only matter for `r=critical`.
    pub fn build(&self, p: f64, functional: Functional, seed: u64) -> Result<Surface> {
        let axisym = |shape: ProfileShape, m: usize| -> Result<Surface> {
            let prof = AxisymProfile::analytic(shape, m)?;
            Ok(Surface::Axisym(if self.sampled()? { prof.to_sampled() } else { prof }))
        };
        let surface = match self.kind.as_str() {
            "sphere" => {
                let r = match self.params.get("r").map(String::as_str) {
                    Some("critical") => match functional {
                        Functional::Ep => (p - 2.0).sqrt(),
                        Functional::Wp => (2.0 * p - 4.0).sqrt(),
                    },
                    _ => self.num("r", 1.0)?,
                };
                let prof = make_sphere(r, self.count("M", 256)?)?;
                Surface::Axisym(if self.sampled()? { prof.to_sampled() } else { prof })
            }
            "torus" => {
                let n = self.count("N", 64)?;
                let grid = [self.count("N1", n)?, self.count("N2", n)?];
                Surface::Torus(make_torus(self.count("n", 3)?, self.num("R", 2.0)?, self.num("a", 1.0)?, grid)?)
            }
            "skew-torus" => {
                let n = self.count("N", 64)?;
                Surface::Torus(make_skew_torus([n, n])?)
            }
            "tube" => axisym(
                ProfileShape::TorusTube { big_r: self.num("R", 2.0)?, a: self.num("a", 1.0)? },
                self.count("M", 256)?,
            )?,
            "catenoid" => axisym(
                ProfileShape::Catenoid { scale: self.num("c", 1.0)?, half_height: self.num("h", 1.0)? },
                self.count("M", 256)?,
            )?,
            "neck" => Surface::Axisym(make_neck_family(self.num("eps", 0.05)?, self.count("M", 1024)?)?),
            "graph" => {
                let n = self.count("n", 3)?;
                let l = self.num("L", 1.0)?;
                let nodes = self.count("N", 32)?;
                let bc = match self.params.get("bc").map(String::as_str) {
                    None | Some("periodic") => GraphBoundary::Periodic,
                    Some("dirichlet") => GraphBoundary::DirichletFixed,
                    Some(v) => return Err(invalid(format!("`bc` must be periodic or dirichlet, got `{v}`"))),
                };
                let amp = self.num("amp", 0.1)?;
                Surface::Graph(GraphPatch::from_fn(n, [l, l], [nodes, nodes], bc, |x, y| {
                    let (a, b) = (TAU * x / l, TAU * y / l);
                    (0..n.saturating_sub(2)).map(|i| amp * ((i + 1) as f64 * a + b).sin() * a.cos()).collect()
                })?)
            }
            _ => unreachable!("kind validated on parse"),
        };
        match self.num("perturb", 0.0)? {
            0.0 => Ok(surface),
            a => perturb(&surface.to_sampled(), a, seed),
        }
    }
}
