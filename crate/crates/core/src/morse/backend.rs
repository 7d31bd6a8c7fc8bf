use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{Manifold, MorseError, MorseFunction};

/// Numerical tolerances shared by the Morse routines.
#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    /// RK4 step.
    pub h: f64,
    /// Capture radius around a critical point when following a flow to its limit.
    pub eps: f64,
    /// Time cap when following a flow to its limit.
    pub t_max: f64,
    /// Newton seeds per chart side when searching for critical points.
    pub grid: usize,
    /// Critical points closer than this are merged.
    pub dedup: f64,
    /// Gradient norm accepted at a critical point.
    pub grad: f64,
    /// Smallest admissible |Hessian eigenvalue|.
    pub degenerate: f64,
    /// Directions swept on the unstable circle of an index-2 point.
    pub sweep: usize,
    /// Radius of the ball around a saddle used to classify passing trajectories.
    pub sweep_radius: f64,
    /// Offset from a critical point when shooting along an eigendirection.
    pub shoot_radius: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            h: 1e-3,
            eps: 1e-4,
            t_max: 50.0,
            grid: 64,
            dedup: 1e-6,
            grad: 1e-10,
            degenerate: 1e-6,
            sweep: 4096,
            sweep_radius: 0.1,
            shoot_radius: 1e-3,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 10] = [
        "h",
        "eps",
        "t_max",
        "grid",
        "dedup",
        "grad",
        "degenerate",
        "sweep",
        "sweep_radius",
        "shoot_radius",
    ];

    pub fn set(&mut self, name: &str, value: f64) -> Result<(), MorseError> {
        let bad = || MorseError::InvalidValue {
            key: alloc::format!("tol.{name}"),
            value: value.to_string(),
        };
        if !(value > 0.0 && value.is_finite()) {
            return Err(bad());
        }
        let as_count = || {
            if value.fract() == 0.0 && value >= 1.0 {
                Ok(value as usize)
            } else {
                Err(bad())
            }
        };
        match name {
            "h" => self.h = value,
            "eps" => self.eps = value,
            "t_max" => self.t_max = value,
            "grid" => self.grid = as_count()?,
            "dedup" => self.dedup = value,
            "grad" => self.grad = value,
            "degenerate" => self.degenerate = value,
            "sweep" => self.sweep = as_count()?,
            "sweep_radius" => self.sweep_radius = value,
            "shoot_radius" => self.shoot_radius = value,
            _ => return Err(MorseError::UnknownConfigKey(alloc::format!("tol.{name}"))),
        }
        Ok(())
    }
}

/// A manifold, one catalog function on it, and tolerances.
#[derive(Clone, Debug, PartialEq)]
pub struct MorseBackend {
    function: MorseFunction,
    tol: Tolerances,
}

impl MorseBackend {
    pub fn new(function: MorseFunction, tol: Tolerances) -> Result<Self, MorseError> {
        if function.manifold() == Manifold::Rp2 && !function.is_even() {
            return Err(MorseError::NotEven(function.key().to_string()));
        }
        Ok(MorseBackend { function, tol })
    }

    /// Catalog entry with default tolerances.
    pub fn from_catalog(
        manifold: Manifold,
        key: &str,
        params: &[(&str, f64)],
    ) -> Result<Self, MorseError> {
        let params = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        Self::new(
            MorseFunction::from_catalog(manifold, key, &params)?,
            Tolerances::default(),
        )
    }

    pub fn manifold(&self) -> Manifold {
        self.function.manifold()
    }

    pub fn function(&self) -> &MorseFunction {
        &self.function
    }

    pub fn tol(&self) -> &Tolerances {
        &self.tol
    }

    pub fn with_tol(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn tol_mut(&mut self) -> &mut Tolerances {
        &mut self.tol
    }
}

/// A parsed backend configuration: the main function plus any number of named
/// label functions on the same manifold.
#[derive(Clone, Debug, PartialEq)]
pub struct BackendConfig {
    pub manifold: Manifold,
    pub function: String,
    pub params: BTreeMap<String, f64>,
    pub tol: Tolerances,
    pub labels: BTreeMap<String, (String, BTreeMap<String, f64>)>,
}

fn parse_f64(key: &str, value: &str) -> Result<f64, MorseError> {
    value.trim().parse::<f64>().map_err(|_| MorseError::InvalidValue {
        key: key.to_string(),
        value: value.to_string(),
    })
}

impl BackendConfig {
    /// Interprets `key=value` entries. Recognized keys: `manifold`, `function`,
    /// `param.<p>`, `tol.<name>`, `label.<name>`, `label.<name>.param.<p>`.
    pub fn from_entries<'a>(
        entries: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self, MorseError> {
        let mut manifold = None;
        let mut function = None;
        let mut params = BTreeMap::new();
        let mut tol = Tolerances::default();
        let mut label_keys: BTreeMap<String, String> = BTreeMap::new();
        let mut label_params: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
        for (key, value) in entries {
            let key = key.trim();
            let value = value.trim();
            if key == "manifold" {
                manifold = Some(value.parse::<Manifold>()?);
            } else if key == "function" {
                function = Some(value.to_string());
            } else if let Some(p) = key.strip_prefix("param.") {
                params.insert(p.to_string(), parse_f64(key, value)?);
            } else if let Some(t) = key.strip_prefix("tol.") {
                tol.set(t, parse_f64(key, value)?)?;
            } else if let Some(rest) = key.strip_prefix("label.") {
                match rest.split_once(".param.") {
                    Some((name, p)) if !name.is_empty() && !p.is_empty() => {
                        label_params
                            .entry(name.to_string())
                            .or_default()
                            .insert(p.to_string(), parse_f64(key, value)?);
                    }
                    None if !rest.is_empty() && !rest.contains('.') => {
                        label_keys.insert(rest.to_string(), value.to_string());
                    }
                    _ => return Err(MorseError::UnknownConfigKey(key.to_string())),
                }
            } else {
                return Err(MorseError::UnknownConfigKey(key.to_string()));
            }
        }
        let manifold = manifold.ok_or_else(|| MorseError::MissingConfigKey("manifold".into()))?;
        let function = function.ok_or_else(|| MorseError::MissingConfigKey("function".into()))?;
        if let Some(name) = label_params.keys().find(|n| !label_keys.contains_key(*n)) {
            return Err(MorseError::UnknownLabel(name.clone()));
        }
        let labels = label_keys
            .into_iter()
            .map(|(name, key)| {
                let p = label_params.remove(&name).unwrap_or_default();
                (name, (key, p))
            })
            .collect();
        let cfg = BackendConfig {
            manifold,
            function,
            params,
            tol,
            labels,
        };
        // validate every function eagerly
        cfg.backend()?;
        for name in cfg.labels.keys() {
            cfg.label_backend(name)?;
        }
        Ok(cfg)
    }

    pub fn backend(&self) -> Result<MorseBackend, MorseError> {
        MorseBackend::new(
            MorseFunction::from_catalog(self.manifold, &self.function, &self.params)?,
            self.tol.clone(),
        )
    }

    /// Backend for a named label. The main function is also reachable under
    /// its catalog key unless a label of that name is defined.
    pub fn label_backend(&self, name: &str) -> Result<MorseBackend, MorseError> {
        match self.labels.get(name) {
            Some((key, params)) => MorseBackend::new(
                MorseFunction::from_catalog(self.manifold, key, params)?,
                self.tol.clone(),
            ),
            None if name == self.function => self.backend(),
            None => Err(MorseError::UnknownLabel(name.to_string())),
        }
    }

    pub fn is_known_label(&self, name: &str) -> bool {
        self.labels.contains_key(name) || name == self.function
    }

    pub fn label_names(&self) -> Vec<&str> {
        self.labels.keys().map(String::as_str).collect()
    }
}
