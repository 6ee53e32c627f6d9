//! Scenario definition: everything a run needs, serializable as TOML.

use crate::attacker::AttackConfig;
use crate::core::{ChannelPlan, Duration, Timestamp};
use crate::device::{Activation, DefectFlags, DeviceProfile, PowerWindow};
use crate::gateway::GatewayConfig;
use crate::netserver::ServerConfig;
use crate::radio::{LinkModel, Position, RejectionMatrix, SensitivityTable};
use serde::{Deserialize, Serialize};

/// A group of identical devices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceCohort {
    pub count: usize,
    pub profile: DeviceProfile,
    #[serde(default)]
    pub defects: DefectFlags,
    pub activation: Activation,
    /// One position per device.
    pub positions: Vec<Position>,
    /// Power windows shared by the cohort; per-device power-on times are
    /// staggered by a seeded draw in `[0, power_stagger)`.
    pub power_windows: Vec<PowerWindow>,
    #[serde(default)]
    pub power_stagger: Duration,
}

/// A complete experiment definition. Identical `(Scenario, seed)` pairs
/// produce byte-identical event logs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub duration: Duration,
    pub link: LinkModel,
    pub plan: ChannelPlan,
    pub sensitivity: SensitivityTable,
    pub rejection: RejectionMatrix,
    pub server: ServerConfig,
    pub gateways: Vec<GatewayConfig>,
    pub fleet: Vec<DeviceCohort>,
    #[serde(default)]
    pub attacks: Vec<AttackConfig>,
}

impl Scenario {
    /// An empty scenario skeleton with EU868 defaults.
    pub fn skeleton(name: &str, seed: u64, duration: Duration) -> Self {
        Scenario {
            name: name.to_string(),
            seed,
            duration,
            link: LinkModel::urban_default(),
            plan: ChannelPlan::eu868_default(),
            sensitivity: SensitivityTable::default(),
            rejection: RejectionMatrix::default(),
            server: ServerConfig::default(),
            gateways: Vec::new(),
            fleet: Vec::new(),
            attacks: Vec::new(),
        }
    }

    pub fn device_count(&self) -> usize {
        self.fleet.iter().map(|c| c.count).sum()
    }

    /// All schema and invariant problems, with field names. Empty is valid.
    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.duration == Duration::ZERO {
            out.push("duration: must be positive".into());
        }
        if let Err(e) = self.plan.validate() {
            out.push(format!("plan: {e}"));
        }
        if let Err(e) = self.link.validate() {
            out.push(format!("link: {e}"));
        }
        if let Err(e) = self.sensitivity.validate() {
            out.push(format!("sensitivity: {e}"));
        }
        if let Err(e) = self.rejection.validate() {
            out.push(format!("rejection: {e}"));
        }
        if let Err(e) = self.server.adr.validate() {
            out.push(format!("server.adr: {e}"));
        }
        if self.gateways.is_empty() {
            out.push("gateways: at least one gateway required".into());
        }
        for (i, gw) in self.gateways.iter().enumerate() {
            if let Err(e) = gw.validate() {
                out.push(format!("gateways[{i}]: {e}"));
            }
        }
        for (i, cohort) in self.fleet.iter().enumerate() {
            if let Err(e) = cohort.profile.validate() {
                out.push(format!("fleet[{i}].profile: {e}"));
            }
            if cohort.positions.len() != cohort.count {
                out.push(format!(
                    "fleet[{i}].positions: {} positions for {} devices",
                    cohort.positions.len(),
                    cohort.count
                ));
            }
            for (j, p) in cohort.positions.iter().enumerate() {
                if !p.x_m.is_finite() || !p.y_m.is_finite() {
                    out.push(format!("fleet[{i}].positions[{j}]: non-finite"));
                }
            }
            if cohort.power_windows.is_empty() {
                out.push(format!("fleet[{i}].power_windows: none declared"));
            }
            for (j, w) in cohort.power_windows.iter().enumerate() {
                if w.off <= w.on {
                    out.push(format!("fleet[{i}].power_windows[{j}]: off before on"));
                }
            }
            for ch in &cohort.profile.enabled_channels {
                if *ch >= self.plan.uplink.len() {
                    out.push(format!("fleet[{i}].profile.enabled_channels: {ch} out of range"));
                }
            }
        }
        for (i, a) in self.attacks.iter().enumerate() {
            if let Err(e) = a.validate() {
                out.push(format!("attacks[{i}]: {e}"));
            }
            if a.end > Timestamp::ZERO + self.duration {
                // Clamp silently would hide config mistakes; flag it.
                let end = Timestamp::ZERO + self.duration;
                if a.start >= end {
                    out.push(format!("attacks[{i}]: activation starts after the scenario ends"));
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), crate::Error> {
        let diags = self.diagnostics();
        if diags.is_empty() {
            Ok(())
        } else {
            Err(crate::Error::InvalidConfig(diags.join("; ")))
        }
    }
}
