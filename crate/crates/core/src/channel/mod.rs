//! Fiber and transceiver impairments: dispersion, time-varying polarization
//! rotation with PDL, laser phase noise and frequency offset, ASE loading,
//! and the four-tributary receiver front end.

mod frontend;
mod jones;
mod link;
mod rsop;

pub use frontend::{apply_rx_frontend, apply_tx_iq_delay, recombine, FrontEndImpairments};
pub use jones::{apply_polarization_channel, Jones, JonesTrajectory};
pub(crate) use jones::apply_matrices;
pub use link::{
    apply_cd, apply_laser, inf_f64, laser_phase, noise_power_for_osnr, set_osnr, LinkParams, OSNR_REF_BANDWIDTH,
    SPEED_OF_LIGHT,
};
pub use rsop::{apply_pmd, apply_rsop_pdl, jones_trajectory, rsop_matrix, RsopPdlParams};

use serde::{Deserialize, Serialize};

/// Every channel and front-end parameter of one scenario.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ImpairmentConfig {
    pub rsop: RsopPdlParams,
    pub link: LinkParams,
    pub frontend: FrontEndImpairments,
}

impl ImpairmentConfig {
    pub fn validate(&self) -> crate::Result<()> {
        self.rsop.validate()?;
        self.link.validate()
    }
}
