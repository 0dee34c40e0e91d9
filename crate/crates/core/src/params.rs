//! Model constants.

use alloc::format;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the active-collaboration synergy of a pair counts collaborative networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynergyCountMode {
    /// Number of active networks shared by both organizations.
    #[default]
    Shared,
    /// Number of active networks the first organization takes part in.
    Own,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    /// Value of an employee whose profile differs from the organization's.
    pub rho: f64,
    /// Discount on synergy with partners sharing the organization's profile.
    pub theta_same: f64,
    /// Weight of synergy value relative to employee value.
    pub alpha: f64,
    pub fade_slope: f64,
    pub fade_duration: f64,
    /// Faded links whose synergy drops below this are removed.
    pub fade_threshold: f64,
    /// Probability that a quitting employee restricts the search to neighbors.
    pub pi_local: f64,
    /// Probability that a quitting employee restricts the search to its profile.
    pub pi_profile: f64,
    /// Per-organization, per-step probability of creating a collaborative network.
    pub pi_cn: f64,
    /// Inclusion probability of each organization outside the creator's 2-neighborhood.
    pub pi_random: f64,
    /// Share of invited members that have the creator's profile.
    pub pi_same: f64,
    pub cn_duration_min: u32,
    pub cn_duration_max: u32,
    pub cn_members_min: u32,
    pub cn_members_max: u32,
    pub kappa_hire: f64,
    pub kappa_fire: f64,
    pub kappa_quit: f64,
    pub synergy_count_mode: SynergyCountMode,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            rho: 0.5,
            theta_same: 0.8,
            alpha: 1.0,
            fade_slope: 0.5,
            fade_duration: 10.0,
            fade_threshold: 0.1,
            pi_local: 0.8,
            pi_profile: 0.8,
            pi_cn: 0.03,
            pi_random: 0.05,
            pi_same: 0.5,
            cn_duration_min: 5,
            cn_duration_max: 20,
            cn_members_min: 2,
            cn_members_max: 4,
            kappa_hire: 0.05,
            kappa_fire: 0.05,
            kappa_quit: 0.05,
            synergy_count_mode: SynergyCountMode::Shared,
        }
    }
}

/// Names accepted by [`ModelParams::set`], in declaration order.
pub const NUMERIC_PARAMS: &[&str] = &[
    "rho",
    "theta_same",
    "alpha",
    "fade_slope",
    "fade_duration",
    "fade_threshold",
    "pi_local",
    "pi_profile",
    "pi_cn",
    "pi_random",
    "pi_same",
    "cn_duration_min",
    "cn_duration_max",
    "cn_members_min",
    "cn_members_max",
    "kappa_hire",
    "kappa_fire",
    "kappa_quit",
];

fn open_unit(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::config(field, format!("{v} must lie in (0, 1)")))
    }
}

fn probability(field: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::config(field, format!("{v} must lie in [0, 1]")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::config(field, format!("{v} must be finite and >= 0")))
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::config(field, format!("{v} must be finite and > 0")))
    }
}

fn as_count(field: &str, v: f64) -> Result<u32> {
    if v.is_finite() && v >= 0.0 && v <= u32::MAX as f64 && libm::trunc(v) == v {
        Ok(v as u32)
    } else {
        Err(Error::config(field, format!("{v} is not a non-negative integer")))
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        open_unit("rho", self.rho)?;
        open_unit("theta_same", self.theta_same)?;
        non_negative("alpha", self.alpha)?;
        positive("fade_slope", self.fade_slope)?;
        positive("fade_duration", self.fade_duration)?;
        open_unit("fade_threshold", self.fade_threshold)?;
        probability("pi_local", self.pi_local)?;
        probability("pi_profile", self.pi_profile)?;
        probability("pi_cn", self.pi_cn)?;
        probability("pi_random", self.pi_random)?;
        probability("pi_same", self.pi_same)?;
        if self.cn_duration_min == 0 {
            return Err(Error::config("cn_duration_min", "must be >= 1"));
        }
        if self.cn_duration_min > self.cn_duration_max {
            return Err(Error::config(
                "cn_duration_max",
                format!(
                    "cn_duration_min ({}) exceeds cn_duration_max ({})",
                    self.cn_duration_min, self.cn_duration_max
                ),
            ));
        }
        if self.cn_members_min < 2 {
            return Err(Error::config("cn_members_min", "must be >= 2"));
        }
        if self.cn_members_min > self.cn_members_max {
            return Err(Error::config(
                "cn_members_max",
                format!(
                    "cn_members_min ({}) exceeds cn_members_max ({})",
                    self.cn_members_min, self.cn_members_max
                ),
            ));
        }
        non_negative("kappa_hire", self.kappa_hire)?;
        non_negative("kappa_fire", self.kappa_fire)?;
        non_negative("kappa_quit", self.kappa_quit)?;
        Ok(())
    }

    /// Sets a numeric field by name. Does not validate cross-field constraints.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "rho" => self.rho = value,
            "theta_same" => self.theta_same = value,
            "alpha" => self.alpha = value,
            "fade_slope" => self.fade_slope = value,
            "fade_duration" => self.fade_duration = value,
            "fade_threshold" => self.fade_threshold = value,
            "pi_local" => self.pi_local = value,
            "pi_profile" => self.pi_profile = value,
            "pi_cn" => self.pi_cn = value,
            "pi_random" => self.pi_random = value,
            "pi_same" => self.pi_same = value,
            "cn_duration_min" => self.cn_duration_min = as_count(name, value)?,
            "cn_duration_max" => self.cn_duration_max = as_count(name, value)?,
            "cn_members_min" => self.cn_members_min = as_count(name, value)?,
            "cn_members_max" => self.cn_members_max = as_count(name, value)?,
            "kappa_hire" => self.kappa_hire = value,
            "kappa_fire" => self.kappa_fire = value,
            "kappa_quit" => self.kappa_quit = value,
            _ => return Err(Error::config(name, "not a numeric model parameter")),
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "rho" => self.rho,
            "theta_same" => self.theta_same,
            "alpha" => self.alpha,
            "fade_slope" => self.fade_slope,
            "fade_duration" => self.fade_duration,
            "fade_threshold" => self.fade_threshold,
            "pi_local" => self.pi_local,
            "pi_profile" => self.pi_profile,
            "pi_cn" => self.pi_cn,
            "pi_random" => self.pi_random,
            "pi_same" => self.pi_same,
            "cn_duration_min" => self.cn_duration_min as f64,
            "cn_duration_max" => self.cn_duration_max as f64,
            "cn_members_min" => self.cn_members_min as f64,
            "cn_members_max" => self.cn_members_max as f64,
            "kappa_hire" => self.kappa_hire,
            "kappa_fire" => self.kappa_fire,
            "kappa_quit" => self.kappa_quit,
            _ => return None,
        })
    }
}
