use std::f64::consts::PI;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::jones::{Jones, JonesTrajectory};
use crate::error::{Error, Result};
use crate::scalar::{db_to_lin, Real};
use crate::signal::{spectral::apply_response, DualPolWaveform};

/// PDL, rotation and DGD parameters of the polarization channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RsopPdlParams {
    pub pdl_db: f64,
    pub alpha0: f64,
    pub beta0: f64,
    pub eta0: f64,
    /// Rotation speed in rad/s.
    pub omega: f64,
    /// Differential group delay in seconds.
    pub dgd: f64,
}

impl Default for RsopPdlParams {
    fn default() -> Self {
        Self { pdl_db: 0.0, alpha0: 0.0, beta0: 0.0, eta0: 0.0, omega: 0.0, dgd: 0.0 }
    }
}

impl RsopPdlParams {
    /// Static rotation with the given initial angles.
    pub fn fixed(alpha0: f64, beta0: f64, eta0: f64) -> Self {
        Self { alpha0, beta0, eta0, ..Default::default() }
    }

    /// `gamma` from `pdl_db = 10 log10((1 + gamma) / (1 - gamma))`.
    pub fn gamma(&self) -> f64 {
        let r = db_to_lin(self.pdl_db);
        (r - 1.0) / (r + 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.pdl_db.is_finite() {
            return Err(Error::InvalidParameter(format!("pdl_db {}", self.pdl_db)));
        }
        if !(self.omega >= 0.0) || !self.omega.is_finite() {
            return Err(Error::InvalidParameter(format!("omega {}", self.omega)));
        }
        if !(self.dgd >= 0.0) || !self.dgd.is_finite() {
            return Err(Error::InvalidParameter(format!("dgd {}", self.dgd)));
        }
        Ok(())
    }

    pub fn pdl_matrix(&self) -> Jones {
        let g = self.gamma();
        Jones::diag(Complex::new((1.0 + g).sqrt(), 0.0), Complex::new((1.0 - g).sqrt(), 0.0))
    }

    /// `PDL x RSOP(alpha, beta, eta)` at sample `k`.
    pub fn matrix_at(&self, k: usize, fs: f64) -> Jones {
        let d = self.omega * k as f64 / fs;
        let pdl = self.pdl_matrix();
        pdl.mul(&rsop_matrix(self.alpha0 + d, self.beta0 + d, self.eta0 + d))
    }
}

pub fn rsop_matrix(alpha: f64, beta: f64, eta: f64) -> Jones {
    let (s, c) = alpha.sin_cos();
    Jones::new(
        Complex::from_polar(c, beta),
        Complex::from_polar(-s, eta),
        Complex::from_polar(s, -eta),
        Complex::from_polar(c, -beta),
    )
}

/// Per-sample channel matrices for `n` samples at rate `fs`. The DGD factor
/// is frequency dependent and is applied separately by [`apply_pmd`].
pub fn jones_trajectory(p: &RsopPdlParams, n: usize, fs: f64) -> Result<JonesTrajectory> {
    p.validate()?;
    crate::signal::check_rate(fs)?;
    if n == 0 {
        return Err(Error::InvalidParameter("trajectory needs n >= 1".into()));
    }
    let pdl = p.pdl_matrix();
    let matrices = (0..n)
        .map(|k| {
            let d = p.omega * k as f64 / fs;
            pdl.mul(&rsop_matrix(p.alpha0 + d, p.beta0 + d, p.eta0 + d))
        })
        .collect();
    Ok(JonesTrajectory { matrices, sample_rate: fs })
}

/// Frequency-domain DGD factor `diag(e^{j pi f tau}, e^{-j pi f tau})`.
pub fn apply_pmd<T: Real>(w: &DualPolWaveform<T>, dgd: f64) -> Result<DualPolWaveform<T>> {
    if dgd == 0.0 {
        return Ok(w.clone());
    }
    let fs = w.sample_rate();
    let x = apply_response(w.x.samples(), fs, |f| Complex::from_polar(1.0, PI * f * dgd));
    let y = apply_response(w.y.samples(), fs, |f| Complex::from_polar(1.0, -PI * f * dgd));
    DualPolWaveform::new(w.x.with_samples(x), w.y.with_samples(y))
}

/// Full polarization channel: DGD (when nonzero), then rotation, then PDL.
pub fn apply_rsop_pdl<T: Real>(w: &DualPolWaveform<T>, p: &RsopPdlParams) -> Result<DualPolWaveform<T>> {
    let w = apply_pmd(w, p.dgd)?;
    let traj = jones_trajectory(p, w.len(), w.sample_rate())?;
    super::apply_polarization_channel(&w, &traj)
}
