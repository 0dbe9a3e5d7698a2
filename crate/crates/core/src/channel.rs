//! Effective channel gains under Rayleigh fading with MRC/MRT beamforming.
//!
//! With an M-antenna access point every power gain in the SINR expressions
//! is either ‖h‖² ~ Gamma(M, 1) (served link, beamformer matched to h) or
//! |w† h|² ~ Exp(1) (any link the beamformer is not matched to). The scalar
//! samplers draw those laws directly; [`vector`] builds the complex channels
//! explicitly and is used to check that the two agree.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainKind {
    /// ‖h‖² of the sensor → AP link after receive combining.
    DesiredMrc { antennas: u32 },
    /// ‖g‖² of the AP → sink link after transmit beamforming.
    DesiredMrt { antennas: u32 },
    /// Interferer seen through a beamformer matched to another channel.
    InterferenceProjection,
    /// Single-antenna eavesdropper link.
    EveDirect,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainSample {
    pub value: f64,
    pub kind: GainKind,
}

/// How gains are produced during simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GainMode {
    /// Draw Gamma(M,1) / Exp(1) scalars directly.
    #[default]
    Scalar,
    /// Materialize complex Gaussian vectors and beamformers.
    FullVector,
}

/// Draws one effective power gain.
///
/// # Panics
/// If an antenna count of zero is passed.
pub fn sample_gain<R: Rng + ?Sized>(kind: GainKind, rng: &mut R) -> GainSample {
    let value = match kind {
        GainKind::DesiredMrc { antennas } | GainKind::DesiredMrt { antennas } => {
            assert!(antennas >= 1, "antenna count must be positive");
            gamma_gain(antennas, rng)
        }
        GainKind::InterferenceProjection | GainKind::EveDirect => Exp1.sample(rng),
    };
    GainSample { value, kind }
}

#[inline]
pub(crate) fn gamma_gain<R: Rng + ?Sized>(antennas: u32, rng: &mut R) -> f64 {
    if antennas == 1 {
        Exp1.sample(rng)
    } else {
        Gamma::new(antennas as f64, 1.0).expect("positive shape").sample(rng)
    }
}

#[inline]
pub(crate) fn exp_gain<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

pub mod vector {
    //! Explicit complex channel vectors with unit variance per entry.

    use num_complex::Complex64;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    /// CN(0, 1) entry: real and imaginary parts each N(0, 1/2).
    pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    pub fn channel<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<Complex64> {
        (0..len).map(|_| complex_gaussian(rng)).collect()
    }

    pub fn norm_sq(v: &[Complex64]) -> f64 {
        v.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Unit-norm beamformer matched to `h`, together with ‖h‖².
    pub fn matched_beamformer(h: &[Complex64]) -> (Vec<Complex64>, f64) {
        let n2 = norm_sq(h);
        let inv = 1.0 / n2.sqrt();
        (h.iter().map(|z| z * inv).collect(), n2)
    }

    /// |w† h|².
    pub fn projection(w: &[Complex64], h: &[Complex64]) -> f64 {
        w.iter().zip(h).map(|(a, b)| a.conj() * b).sum::<Complex64>().norm_sqr()
    }

    /// Draws a random MRT precoder: the matched beamformer of a fresh channel.
    pub fn random_mrt<R: Rng + ?Sized>(antennas: usize, rng: &mut R) -> Vec<Complex64> {
        matched_beamformer(&channel(antennas, rng)).0
    }

    /// |w† H v|² for a fresh M×M Rayleigh matrix H.
    pub fn matrix_projection<R: Rng + ?Sized>(w: &[Complex64], v: &[Complex64], rng: &mut R) -> f64 {
        let m = w.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for wi in w.iter() {
            let mut row = Complex64::new(0.0, 0.0);
            for vj in v.iter().take(m) {
                row += complex_gaussian(rng) * vj;
            }
            acc += wi.conj() * row;
        }
        acc.norm_sqr()
    }
}
