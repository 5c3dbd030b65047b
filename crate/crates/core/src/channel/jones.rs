use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{narrow, widen, Real};
use crate::signal::{ComplexBlock, DualPolWaveform};

type C = Complex<f64>;

/// 2x2 complex Jones matrix, row major: `[[xx, xy], [yx, yy]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jones(pub [[C; 2]; 2]);

impl Jones {
    pub fn new(xx: C, xy: C, yx: C, yy: C) -> Self {
        Self([[xx, xy], [yx, yy]])
    }

    pub fn identity() -> Self {
        let (o, z) = (C::new(1.0, 0.0), C::new(0.0, 0.0));
        Self::new(o, z, z, o)
    }

    pub fn diag(a: C, b: C) -> Self {
        let z = C::new(0.0, 0.0);
        Self::new(a, z, z, b)
    }

    /// Real rotation by `theta`: `[[cos, -sin], [sin, cos]]`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(C::new(c, 0.0), C::new(-s, 0.0), C::new(s, 0.0), C::new(c, 0.0))
    }

    pub fn xx(&self) -> C {
        self.0[0][0]
    }
    pub fn xy(&self) -> C {
        self.0[0][1]
    }
    pub fn yx(&self) -> C {
        self.0[1][0]
    }
    pub fn yy(&self) -> C {
        self.0[1][1]
    }

    pub fn det(&self) -> C {
        self.xx() * self.yy() - self.xy() * self.yx()
    }

    pub fn adjugate(&self) -> Self {
        Self::new(self.yy(), -self.xy(), -self.yx(), self.xx())
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == 0.0 || !d.is_finite() {
            return None;
        }
        Some(self.adjugate().scale(d.inv()))
    }

    pub fn hermitian(&self) -> Self {
        Self::new(self.xx().conj(), self.yx().conj(), self.xy().conj(), self.yy().conj())
    }

    pub fn scale(&self, s: C) -> Self {
        let m = self.0;
        Self([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = (self.0, o.0);
        let mut r = [[C::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self(r)
    }

    #[inline]
    pub fn apply(&self, x: C, y: C) -> (C, C) {
        (self.xx() * x + self.xy() * y, self.yx() * x + self.yy() * y)
    }

    /// Largest element-wise absolute difference.
    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.0[i][j] - o.0[i][j]).norm());
            }
        }
        m
    }

    /// `|| J^H J - I ||_max`.
    pub fn unitarity_error(&self) -> f64 {
        self.hermitian().mul(self).max_abs_diff(&Self::identity())
    }
}

/// Time series of Jones matrices on a sample grid.
#[derive(Debug, Clone, PartialEq)]
pub struct JonesTrajectory {
    pub matrices: Vec<Jones>,
    pub sample_rate: f64,
}

impl JonesTrajectory {
    pub fn constant(j: Jones, n: usize, sample_rate: f64) -> Self {
        Self { matrices: vec![j; n], sample_rate }
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }
}

/// Per-sample `[x'; y'] = J(k) [x; y]`.
pub fn apply_polarization_channel<T: Real>(w: &DualPolWaveform<T>, traj: &JonesTrajectory) -> Result<DualPolWaveform<T>> {
    if traj.len() < w.len() {
        return Err(Error::LengthMismatch(w.len(), traj.len()));
    }
    if (traj.sample_rate - w.sample_rate()).abs() > 1e-9 * w.sample_rate() {
        return Err(Error::RateMismatch(w.sample_rate(), traj.sample_rate));
    }
    let (xs, ys) = apply_matrices(w.x.samples(), w.y.samples(), &traj.matrices);
    DualPolWaveform::new(
        ComplexBlock::from_parts(xs, w.sample_rate()),
        ComplexBlock::from_parts(ys, w.sample_rate()),
    )
}

pub(crate) fn apply_matrices<T: Real>(x: &[Complex<T>], y: &[Complex<T>], m: &[Jones]) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
    let mut xs = Vec::with_capacity(x.len());
    let mut ys = Vec::with_capacity(x.len());
    for ((a, b), j) in x.iter().zip(y).zip(m) {
        let (p, q) = j.apply(widen(*a), widen(*b));
        xs.push(narrow(p));
        ys.push(narrow(q));
    }
    (xs, ys)
}
