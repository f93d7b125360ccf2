//! Declarative planner configuration (TOML).
//!
//! Every knob the CLI exposes lives here; flags override file values.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinodyn::MotionLimits;
use crate::roi::{footprint_width, FootprintSpec};
use crate::route::{CostParams, GaConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    pub footprint: FootprintConfig,
    /// Coverage acceptance threshold.
    pub alpha: f64,
    /// Turn penalty in meters per turn.
    pub rho: f64,
    /// Largest partition count routed exactly.
    pub dp_limit: usize,
    /// Coverage oracle resolution (sample points per cell side).
    pub coverage_samples: usize,
    pub seed: u64,
    pub limits: LimitsConfig,
    pub ga: GaSettings,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FootprintConfig {
    /// Direct footprint width in meters.
    pub width: Option<f64>,
    /// Altitude in meters (with `half_angle`).
    pub altitude: Option<f64>,
    /// Field-of-view half-angle in radians (with `altitude`).
    pub half_angle: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LimitsConfig {
    pub v_max: f64,
    pub a_max: f64,
    /// Omit for unbounded jerk (trapezoidal profiles).
    pub j_max: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaSettings {
    pub lambda_turns: f64,
    pub population: usize,
    pub generations: usize,
    pub elite_fraction: f64,
    pub tournament_size: usize,
    pub p_mut_order: f64,
    pub p_mut_choice: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            footprint: FootprintConfig {
                width: Some(2.0),
                altitude: None,
                half_angle: None,
            },
            alpha: 0.99,
            rho: 0.15,
            dp_limit: 15,
            coverage_samples: crate::roi::DEFAULT_COVERAGE_SAMPLES,
            seed: 1,
            limits: LimitsConfig::default(),
            ga: GaSettings::default(),
        }
    }
}

impl Default for LimitsConfig {
    fn default() -> Self {
        LimitsConfig {
            v_max: 5.0,
            a_max: 2.5,
            j_max: None,
        }
    }
}

impl Default for GaSettings {
    fn default() -> Self {
        let g = GaConfig::benchmark_defaults(0);
        GaSettings {
            lambda_turns: g.lambda_turns,
            population: g.population,
            generations: g.generations,
            elite_fraction: g.elite_fraction,
            tournament_size: g.tournament_size,
            p_mut_order: g.p_mut_order,
            p_mut_choice: g.p_mut_choice,
        }
    }
}

impl PlannerConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    /// Footprint width in meters; exactly one source must be configured.
    pub fn footprint_width(&self) -> Result<f64> {
        let spec = match (self.footprint.width, self.footprint.altitude, self.footprint.half_angle) {
            (Some(width), None, None) => FootprintSpec::Direct { width },
            (None, Some(altitude), Some(half_angle)) => FootprintSpec::Derived { altitude, half_angle },
            _ => {
                return Err(Error::InvalidConfig(
                    "configure either footprint.width or footprint.altitude with footprint.half_angle".into(),
                ))
            }
        };
        footprint_width(&spec)
    }

    pub fn motion_limits(&self) -> MotionLimits {
        MotionLimits {
            v_max: self.limits.v_max,
            a_max: self.limits.a_max,
            j_max: self.limits.j_max.unwrap_or(f64::INFINITY),
        }
    }

    pub fn cost_params(&self) -> CostParams {
        CostParams { rho: self.rho }
    }

    pub fn ga_config(&self) -> GaConfig {
        GaConfig {
            lambda_turns: self.ga.lambda_turns,
            population: self.ga.population,
            generations: self.ga.generations,
            elite_fraction: self.ga.elite_fraction,
            tournament_size: self.ga.tournament_size,
            p_mut_order: self.ga.p_mut_order,
            p_mut_choice: self.ga.p_mut_choice,
            seed: self.seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_consistent() {
        let cfg = PlannerConfig::default();
        assert_eq!(cfg.footprint_width().unwrap(), 2.0);
        assert_eq!(cfg.alpha, 0.99);
        assert_eq!(cfg.rho, 0.15);
        assert_eq!(cfg.dp_limit, 15);
        assert!(cfg.motion_limits().j_max.is_infinite());
        let ga = cfg.ga_config();
        assert_eq!(ga.population, 450);
        assert_eq!(ga.generations, 350);
        assert_eq!(ga.lambda_turns, 0.15);
        assert_eq!(ga.elite_fraction, 0.05);
        assert_eq!(ga.tournament_size, 4);
        assert_eq!((ga.p_mut_order, ga.p_mut_choice), (0.30, 0.40));
    }

    #[test]
    fn toml_round_trip() {
        let cfg = PlannerConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        let back: PlannerConfig = toml::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn footprint_requires_exactly_one_source() {
        let mut cfg = PlannerConfig::default();
        cfg.footprint.altitude = Some(10.0);
        cfg.footprint.half_angle = Some(0.5);
        assert!(cfg.footprint_width().is_err());
        cfg.footprint.width = None;
        assert!(cfg.footprint_width().is_ok());
        cfg.footprint.half_angle = None;
        assert!(cfg.footprint_width().is_err());
    }

    #[test]
    fn partial_toml_fills_defaults() {
        let cfg: PlannerConfig = toml::from_str("alpha = 0.95\n[limits]\nv_max = 8.0\n").unwrap();
        assert_eq!(cfg.alpha, 0.95);
        assert_eq!(cfg.limits.v_max, 8.0);
        assert_eq!(cfg.limits.a_max, 2.5);
        assert_eq!(cfg.rho, 0.15);
    }
}
