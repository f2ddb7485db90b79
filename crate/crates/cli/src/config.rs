//! Flat `key = value` run configuration.
//!
//! Frequencies are ordinary frequencies in GHz, chirp rates in GHz/ns and
//! times in ns. Everything is multiplied by 2π on the way into the library.

use std::f64::consts::TAU;
use std::path::Path;

use chirp_tls::analysis::{self, ExperimentPreset, LZ_DEFAULT_WINDOW};
use chirp_tls::integrator::IntegratorConfig;
use chirp_tls::{BlochVector, ChirpDrive, Method, TlsParams};
use serde::{Deserialize, Serialize};

use crate::CliError;

macro_rules! run_config {
    ($($(#[doc = $doc:literal])* $field:ident: $ty:ty,)*) => {
        /// Every field is optional so that presets, files and command-line
        /// flags can be layered; required values are checked on use.
        #[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct RunConfig {
            $(
                $(#[doc = $doc])*
                #[serde(default, skip_serializing_if = "Option::is_none")]
                pub $field: Option<$ty>,
            )*
        }

        impl RunConfig {
            /// Values set in `top` take precedence.
            pub fn overlay(self, top: RunConfig) -> RunConfig {
                RunConfig { $($field: top.$field.or(self.$field),)* }
            }
        }
    };
}

run_config! {
    /// Name of the preset the configuration started from.
    preset: String,
    delta0_ghz: f64,
    epsilon0_ghz: f64,
    omega0_ghz: f64,
    alpha_ghz_per_ns: f64,
    eta_ghz: f64,
    /// Number of drive periods; takes precedence over `omega_end_ghz`.
    n_periods: usize,
    /// Stop at the first period point where the drive frequency reaches this value.
    omega_end_ghz: f64,
    rel_tol: f64,
    abs_tol: f64,
    /// Unbounded when absent.
    max_step_ns: f64,
    initial_step_ns: f64,
    backends: Vec<String>,
    initial_state: [f64; 3],
    output_path: String,
    /// Landau-Zener chirp rates.
    alphas_ghz_per_ns: Vec<f64>,
    /// Landau-Zener chirp rates as `2α/(uη)²`.
    alpha_ratios: Vec<f64>,
    /// Half-width of the Landau-Zener window in units of `uη`.
    lz_window: f64,
    /// Explicit drive frequencies of the resonance scan.
    omega0s_ghz: Vec<f64>,
    /// Resonance scan half-width in units of `uη` around the splitting.
    scan_span: f64,
    scan_points: usize,
}

fn to_ghz(w: f64) -> f64 {
    w / TAU
}

impl RunConfig {
    pub fn from_preset(p: &ExperimentPreset) -> Self {
        let init = p.initial_state.vector();
        RunConfig {
            preset: Some(p.name.to_string()),
            delta0_ghz: Some(to_ghz(p.tls.delta0())),
            epsilon0_ghz: Some(to_ghz(p.tls.epsilon0())),
            omega0_ghz: Some(to_ghz(p.drive.omega0)),
            alpha_ghz_per_ns: Some(to_ghz(p.drive.alpha)),
            eta_ghz: Some(to_ghz(p.drive.eta)),
            omega_end_ghz: Some(to_ghz(p.omega_end)),
            rel_tol: Some(p.integrator.rel_tol),
            abs_tol: Some(p.integrator.abs_tol),
            max_step_ns: p
                .integrator
                .max_step
                .is_finite()
                .then_some(p.integrator.max_step),
            initial_step_ns: Some(p.integrator.initial_step),
            backends: Some(p.backends.iter().map(|m| m.name().to_string()).collect()),
            initial_state: Some([init.x, init.y, init.z]),
            ..Default::default()
        }
    }

    pub fn preset(name: &str) -> Result<Self, CliError> {
        analysis::preset(name)
            .map(|p| Self::from_preset(&p))
            .ok_or_else(|| {
                CliError::Config(format!(
                    "unknown preset `{name}` (expected fig3 or shalibo)"
                ))
            })
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.message().to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config always serialises")
    }

    /// Fill the settings that have a sensible default.
    pub fn with_defaults(self) -> Self {
        let cfg = IntegratorConfig::default();
        let defaults = RunConfig {
            epsilon0_ghz: Some(0.0),
            rel_tol: Some(cfg.rel_tol),
            abs_tol: Some(cfg.abs_tol),
            initial_step_ns: Some(cfg.initial_step),
            backends: Some(Method::ALL.iter().map(|m| m.name().to_string()).collect()),
            initial_state: Some([-1.0, 0.0, 0.0]),
            lz_window: Some(LZ_DEFAULT_WINDOW),
            scan_span: Some(0.5),
            scan_points: Some(21),
            ..Default::default()
        };
        defaults.overlay(self)
    }

    pub fn tls(&self) -> Result<TlsParams, CliError> {
        let delta0 = require(self.delta0_ghz, "delta0_ghz")?;
        let epsilon0 = self.epsilon0_ghz.unwrap_or(0.0);
        Ok(TlsParams::new(TAU * delta0, TAU * epsilon0)?)
    }

    pub fn eta(&self) -> Result<f64, CliError> {
        Ok(TAU * require(self.eta_ghz, "eta_ghz")?)
    }

    /// Chirped drive with the period count resolved.
    pub fn drive(&self) -> Result<ChirpDrive, CliError> {
        let omega0 = require(self.omega0_ghz, "omega0_ghz")?;
        let alpha = require(self.alpha_ghz_per_ns, "alpha_ghz_per_ns")?;
        let drive = ChirpDrive::new(TAU * omega0, TAU * alpha, self.eta()?, 1)?;
        let n = match (self.n_periods, self.omega_end_ghz) {
            (Some(n), _) => n,
            (None, Some(end)) => drive.periods_until(TAU * end)?,
            (None, None) => {
                return Err(CliError::Config(
                    "missing required field `n_periods` (or `omega_end_ghz`)".into(),
                ))
            }
        };
        Ok(drive.with_periods(n))
    }

    pub fn integrator(&self) -> Result<IntegratorConfig, CliError> {
        let d = IntegratorConfig::default();
        let cfg = IntegratorConfig {
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
            max_step: self.max_step_ns.unwrap_or(d.max_step),
            initial_step: self.initial_step_ns.unwrap_or(d.initial_step),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn backends(&self) -> Result<Vec<Method>, CliError> {
        let names = self.backends.as_deref().unwrap_or_default();
        if names.is_empty() {
            return Err(CliError::Config(
                "`backends` must name at least one backend".into(),
            ));
        }
        let mut methods = Vec::with_capacity(names.len());
        for name in names {
            let m: Method = name.trim().parse()?;
            if methods.contains(&m) {
                return Err(CliError::Config(format!(
                    "backend `{m}` listed twice in `backends`"
                )));
            }
            methods.push(m);
        }
        Ok(methods)
    }

    pub fn initial_state(&self) -> Result<BlochVector, CliError> {
        let [x, y, z] = self.initial_state.unwrap_or([-1.0, 0.0, 0.0]);
        BlochVector::new(x, y, z)
            .map_err(|e| CliError::Config(format!("invalid `initial_state`: {e}")))
    }

    /// Landau-Zener chirp rates in rad/ns².
    pub fn lz_alphas(&self, tls: &TlsParams) -> Result<Vec<f64>, CliError> {
        let alphas = match (&self.alphas_ghz_per_ns, &self.alpha_ratios) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "set only one of `alphas_ghz_per_ns` and `alpha_ratios`".into(),
                ))
            }
            (Some(a), None) => a.iter().map(|a| TAU * a).collect(),
            (None, Some(r)) => {
                let ueta = tls.u() * self.eta()?;
                r.iter().map(|r| r * ueta * ueta / 2.0).collect()
            }
            (None, None) => Vec::new(),
        };
        if alphas.is_empty() {
            return Err(CliError::Config(
                "no chirp rates given: set `alphas_ghz_per_ns` or `alpha_ratios`".into(),
            ));
        }
        Ok(alphas)
    }

    /// Drive frequencies of the resonance scan in rad/ns.
    pub fn scan_grid(&self, tls: &TlsParams) -> Result<Vec<f64>, CliError> {
        if let Some(list) = &self.omega0s_ghz {
            return Ok(list.iter().map(|w| TAU * w).collect());
        }
        let span = self.scan_span.unwrap_or(0.5);
        let points = self.scan_points.unwrap_or(21);
        if !span.is_finite() || span <= 0.0 || points < 3 {
            return Err(CliError::Config(
                "`scan_span` must be positive and `scan_points` at least 3".into(),
            ));
        }
        Ok(analysis::default_omega0_grid(
            tls,
            self.eta()?,
            span,
            points,
        ))
    }
}

fn require<T: Copy>(value: Option<T>, name: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Config(format!("missing required field `{name}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlay_prefers_top_layer() {
        let base = RunConfig {
            eta_ghz: Some(1.0),
            omega0_ghz: Some(2.0),
            ..Default::default()
        };
        let top = RunConfig {
            eta_ghz: Some(3.0),
            ..Default::default()
        };
        let merged = base.overlay(top);
        assert_eq!(merged.eta_ghz, Some(3.0));
        assert_eq!(merged.omega0_ghz, Some(2.0));
    }

    #[test]
    fn presets_round_trip_through_toml() {
        for name in ["fig3", "shalibo"] {
            let cfg = RunConfig::preset(name).unwrap().with_defaults();
            assert_eq!(RunConfig::parse(&cfg.to_toml()).unwrap(), cfg);
        }
    }

    #[test]
    fn preset_reproduces_library_grid() {
        let p = analysis::fig3_preset();
        let cfg = RunConfig::from_preset(&p);
        assert_eq!(cfg.drive().unwrap().n_periods, p.drive.n_periods);
        assert!((cfg.drive().unwrap().alpha - p.drive.alpha).abs() <= 1e-15 * p.drive.alpha);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::parse("omega_0 = 1.0").is_err());
        assert!(RunConfig::parse("omega0_ghz = \"fast\"").is_err());
    }

    #[test]
    fn missing_fields_are_named() {
        let cfg = RunConfig {
            delta0_ghz: Some(6.0),
            eta_ghz: Some(0.01),
            alpha_ghz_per_ns: Some(0.0),
            n_periods: Some(3),
            ..Default::default()
        };
        match cfg.drive() {
            Err(CliError::Config(msg)) => assert!(msg.contains("omega0_ghz"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn backends_are_validated() {
        let mut cfg = RunConfig::default().with_defaults();
        assert_eq!(cfg.backends().unwrap(), Method::ALL.to_vec());
        cfg.backends = Some(vec![]);
        assert!(cfg.backends().is_err());
        cfg.backends = Some(vec!["exact".into(), "exact".into()]);
        assert!(cfg.backends().is_err());
        cfg.backends = Some(vec!["magnus3".into()]);
        assert!(cfg.backends().is_err());
    }
}
