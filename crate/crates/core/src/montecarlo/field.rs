//! Interference fields sampled lazily, nearest interferer first.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

/// One class of interferers: intensity and transmit power weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Component {
    pub intensity: f64,
    pub weight: f64,
}

/// A PPP interference field around a receiver, truncated at `radius` and
/// topped up with the mean of what lies beyond.
#[derive(Debug, Clone)]
pub(crate) struct LazyField<'a> {
    pub components: &'a [Component],
    pub eta: f64,
    pub radius: f64,
    pub far_mean: f64,
}

/// Mean interference from beyond radius `r`: 2π Σλw · r^(2−η) / (η − 2).
pub(crate) fn far_field_mean(components: &[Component], eta: f64, r: f64) -> f64 {
    let lw: f64 = components.iter().map(|c| c.intensity * c.weight).sum();
    2.0 * std::f64::consts::PI * lw * r.powf(2.0 - eta) / (eta - 2.0)
}

impl LazyField<'_> {
    /// SINR of `signal` against this field if it beats `floor`, else `None`.
    ///
    /// Points of the superposed process arrive in order of distance
    /// (unit-rate exponential steps in πλr²), each marked with its
    /// component. Interference only grows, so sampling stops as soon as
    /// the partial SINR drops to `floor`. The draws for a smaller radius
    /// are a prefix of those for a larger one.
    pub fn sinr_above<R: Rng + ?Sized, G: FnMut(usize, &mut R) -> f64>(
        &self,
        signal: f64,
        noise: f64,
        floor: f64,
        gain: &mut G,
        rng: &mut R,
    ) -> Option<f64> {
        let beats = |i: f64| signal / (i + noise) > floor;
        let mut interference = self.far_mean;
        if !beats(interference) {
            return None;
        }
        let total: f64 = self.components.iter().map(|c| c.intensity).sum();
        if total > 0.0 {
            let max_area = std::f64::consts::PI * self.radius * self.radius;
            let mut area = 0.0;
            loop {
                let step: f64 = Exp1.sample(rng);
                area += step / total;
                if area > max_area {
                    break;
                }
                let mut pick = rng.gen::<f64>() * total;
                let mut k = 0;
                while k + 1 < self.components.len() && pick >= self.components[k].intensity {
                    pick -= self.components[k].intensity;
                    k += 1;
                }
                let d2 = area / std::f64::consts::PI;
                interference += self.components[k].weight * gain(k, rng) * d2.powf(-0.5 * self.eta);
                if !beats(interference) {
                    return None;
                }
            }
        }
        let s = signal / (interference + noise);
        (s > floor).then_some(s)
    }
}
