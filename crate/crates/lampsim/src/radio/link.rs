//! Log-distance path loss with frozen log-normal shadowing.

use crate::rng::SimRng;
use serde::{Deserialize, Serialize};

/// A point in the scenario plane, metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x_m: f64,
    pub y_m: f64,
}

impl Position {
    pub fn new(x_m: f64, y_m: f64) -> Self {
        Position { x_m, y_m }
    }

    pub fn distance_to(&self, other: &Position) -> f64 {
        let dx = self.x_m - other.x_m;
        let dy = self.y_m - other.y_m;
        (dx * dx + dy * dy).sqrt().max(0.1)
    }
}

/// Log-distance propagation parameters plus the receiver noise floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkModel {
    /// Reference loss PL0 in dB at `reference_distance_m`.
    pub reference_loss_db: f64,
    pub reference_distance_m: f64,
    pub path_loss_exponent: f64,
    /// Log-normal shadowing sigma in dB, frozen per link per scenario.
    pub shadowing_sigma_db: f64,
    pub noise_floor_dbm: f64,
}

impl LinkModel {
    /// Urban defaults: 40 dB at 1 m, exponent 2.7, 3 dB shadowing, and a
    /// −117 dBm noise floor (thermal noise in 125 kHz plus a 6 dB figure).
    pub fn urban_default() -> Self {
        LinkModel {
            reference_loss_db: 40.0,
            reference_distance_m: 1.0,
            path_loss_exponent: 2.7,
            shadowing_sigma_db: 3.0,
            noise_floor_dbm: -117.0,
        }
    }

    pub fn path_loss_db(&self, distance_m: f64) -> f64 {
        debug_assert!(distance_m > 0.0);
        self.reference_loss_db
            + 10.0 * self.path_loss_exponent * (distance_m / self.reference_distance_m).log10()
    }

    /// Received power in dBm for a given frozen shadowing draw.
    pub fn received_power(&self, tx_power_dbm: f64, distance_m: f64, shadow_db: f64) -> f64 {
        tx_power_dbm - self.path_loss_db(distance_m) - shadow_db
    }

    /// The frozen shadowing draw for an (emitter, receiver) pair. Derived
    /// from the scenario seed only, so reception order never affects it.
    pub fn shadow_draw(&self, seed: u64, emitter: u64, receiver: u64) -> f64 {
        if self.shadowing_sigma_db == 0.0 {
            return 0.0;
        }
        SimRng::stream(seed, "shadowing", &[emitter, receiver])
            .gauss(0.0, self.shadowing_sigma_db)
    }

    pub fn validate(&self) -> Result<(), crate::Error> {
        if self.path_loss_exponent <= 0.0 {
            return Err(crate::Error::InvalidConfig(
                "path-loss exponent must be positive".into(),
            ));
        }
        if self.shadowing_sigma_db < 0.0 {
            return Err(crate::Error::InvalidConfig(
                "shadowing sigma must be non-negative".into(),
            ));
        }
        if self.reference_distance_m <= 0.0 {
            return Err(crate::Error::InvalidConfig(
                "reference distance must be positive".into(),
            ));
        }
        Ok(())
    }
}
