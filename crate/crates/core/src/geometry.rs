//! Homogeneous Poisson point processes on a disc window.

use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("window radius must be positive and finite (got {0})")]
    InvalidRadius(f64),
    #[error("probability must lie in [0, 1] (got {0})")]
    InvalidProbability(f64),
    #[error("intensity must be finite and >= 0 (got {0})")]
    InvalidIntensity(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn distance_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// Disc observation window centered at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    radius: f64,
}

impl Window {
    pub fn new(radius: f64) -> Result<Self, GeometryError> {
        if radius > 0.0 && radius.is_finite() {
            Ok(Window { radius })
        } else {
            Err(GeometryError::InvalidRadius(radius))
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.norm() <= self.radius
    }

    /// Radius beyond which the residual interference fluctuation is small.
    ///
    /// Interference from beyond `R` is replaced by its mean, so the error left
    /// behind is the standard deviation of the out-of-window sum,
    /// `sqrt(2π λ E[h²] R^(2-2η) / (2η-2))` with `E[h²] = 2`. The radius is the
    /// smallest one making that deviation at most `tolerance` times the
    /// power received from an interferer at the mean nearest-neighbor
    /// distance `1 / (2 sqrt(λ))`.
    pub fn for_interference(intensity: f64, eta: f64, tolerance: f64) -> Result<Self, GeometryError> {
        if !(intensity > 0.0) || !intensity.is_finite() {
            return Err(GeometryError::InvalidIntensity(intensity));
        }
        let two_pi = 2.0 * std::f64::consts::PI;
        let nn = 0.5 / intensity.sqrt();
        let reference = nn.powf(-eta);
        let coeff = (two_pi * intensity * 2.0 / (2.0 * eta - 2.0)).sqrt();
        // coeff * R^(1-η) <= tolerance * reference
        let radius = (tolerance * reference / coeff).powf(1.0 / (1.0 - eta));
        Window::new(radius)
    }
}

/// Radius of the innermost sampling ring.
pub const FIRST_RING: f64 = 0.25;

impl Window {
    /// Rounds the radius up to the next ring boundary `0.25·2^(j/2)`, so
    /// doubling a snapped window adds exactly two rings.
    pub fn snapped(&self) -> Window {
        if self.radius <= FIRST_RING {
            return *self;
        }
        let mut j = (2.0 * (self.radius / FIRST_RING).log2()).ceil() as i32;
        while ring_boundary(j) < self.radius {
            j += 1;
        }
        while j > 0 && ring_boundary(j - 1) >= self.radius {
            j -= 1;
        }
        Window {
            radius: ring_boundary(j),
        }
    }

    /// Ring boundaries `0, 0.25, 0.25·√2, …` up to the radius. Sampling ring
    /// by ring keeps the inner draws of a larger window identical to those
    /// of a smaller one when both use the same random stream.
    pub fn rings(&self) -> Vec<f64> {
        let mut out = vec![0.0];
        let mut j = 0;
        while ring_boundary(j) < self.radius {
            out.push(ring_boundary(j));
            j += 1;
        }
        out.push(self.radius);
        out
    }
}

fn ring_boundary(j: i32) -> f64 {
    let base = FIRST_RING * 2f64.powi(j.div_euclid(2));
    if j % 2 == 0 {
        base
    } else {
        base * std::f64::consts::SQRT_2
    }
}

/// A sampled planar point set together with its window and intensity label.
#[derive(Debug, Clone, PartialEq)]
pub struct PointPattern {
    pub points: Vec<Point>,
    pub window_radius: f64,
    pub intensity: f64,
}

impl PointPattern {
    pub fn empty(window: Window, intensity: f64) -> Self {
        PointPattern {
            points: Vec::new(),
            window_radius: window.radius(),
            intensity,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points as `x,y` CSV lines with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{}", p.x, p.y);
        }
        out
    }
}

/// Uniform point on the disc of the given radius.
#[inline]
pub fn uniform_in_disc<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> Point {
    let r = radius * rng.gen::<f64>().sqrt();
    let theta = std::f64::consts::TAU * rng.gen::<f64>();
    let (s, c) = theta.sin_cos();
    Point::new(r * c, r * s)
}

/// Draws a Poisson(mean) count; zero for a non-positive mean.
#[inline]
pub fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|d| d.sample(rng) as usize).unwrap_or(0)
}

/// Samples an HPPP of the given intensity inside `window`.
pub fn sample_hppp<R: Rng + ?Sized>(
    intensity: f64,
    window: Window,
    rng: &mut R,
) -> Result<PointPattern, GeometryError> {
    if !(intensity >= 0.0) || !intensity.is_finite() {
        return Err(GeometryError::InvalidIntensity(intensity));
    }
    let n = poisson_count(intensity * window.area(), rng);
    let points = (0..n).map(|_| uniform_in_disc(window.radius(), rng)).collect();
    Ok(PointPattern {
        points,
        window_radius: window.radius(),
        intensity,
    })
}

/// Samples an HPPP on the disc of radius `rings.last()` around `center`,
/// one annulus at a time from the inside out.
pub fn sample_hppp_rings<R: Rng + ?Sized>(
    intensity: f64,
    center: Point,
    rings: &[f64],
    rng: &mut R,
) -> Result<PointPattern, GeometryError> {
    if !(intensity >= 0.0) || !intensity.is_finite() {
        return Err(GeometryError::InvalidIntensity(intensity));
    }
    let mut points = Vec::new();
    for w in rings.windows(2) {
        let (a2, b2) = (w[0] * w[0], w[1] * w[1]);
        let n = poisson_count(intensity * std::f64::consts::PI * (b2 - a2), rng);
        for _ in 0..n {
            let r = (a2 + rng.gen::<f64>() * (b2 - a2)).sqrt();
            let (s, c) = (std::f64::consts::TAU * rng.gen::<f64>()).sin_cos();
            points.push(Point::new(center.x + r * c, center.y + r * s));
        }
    }
    Ok(PointPattern {
        points,
        window_radius: rings.last().copied().unwrap_or(0.0),
        intensity,
    })
}

/// Independent thinning: each point is kept with probability `p`.
pub fn thin<R: Rng + ?Sized>(
    pattern: &PointPattern,
    p: f64,
    rng: &mut R,
) -> Result<(PointPattern, PointPattern), GeometryError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GeometryError::InvalidProbability(p));
    }
    let mut kept = Vec::with_capacity((pattern.len() as f64 * p) as usize + 1);
    let mut dropped = Vec::with_capacity((pattern.len() as f64 * (1.0 - p)) as usize + 1);
    for &pt in &pattern.points {
        if rng.gen::<f64>() < p {
            kept.push(pt);
        } else {
            dropped.push(pt);
        }
    }
    Ok((
        PointPattern {
            points: kept,
            window_radius: pattern.window_radius,
            intensity: pattern.intensity * p,
        },
        PointPattern {
            points: dropped,
            window_radius: pattern.window_radius,
            intensity: pattern.intensity * (1.0 - p),
        },
    ))
}

/// Nearest pattern point to `query`; ties go to the lowest index.
pub fn nearest(pattern: &PointPattern, query: Point) -> Option<(Point, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in pattern.points.iter().enumerate() {
        let d2 = p.distance_sq(&query);
        if best.map_or(true, |(_, b)| d2 < b) {
            best = Some((i, d2));
        }
    }
    best.map(|(i, d2)| (pattern.points[i], d2.sqrt()))
}

/// Merges two patterns over the same window (intensities add).
pub fn superpose(a: &PointPattern, b: &PointPattern) -> PointPattern {
    let mut points = a.points.clone();
    points.extend_from_slice(&b.points);
    PointPattern {
        points,
        window_radius: a.window_radius.max(b.window_radius),
        intensity: a.intensity + b.intensity,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn zero_intensity_is_empty() {
        let w = Window::new(100.0).unwrap();
        assert!(sample_hppp(0.0, w, &mut rng(1)).unwrap().is_empty());
    }

    #[test]
    fn invalid_inputs() {
        assert!(Window::new(0.0).is_err());
        assert!(Window::new(f64::INFINITY).is_err());
        let w = Window::new(10.0).unwrap();
        assert!(sample_hppp(-1.0, w, &mut rng(1)).is_err());
        let p = sample_hppp(0.1, w, &mut rng(1)).unwrap();
        assert_eq!(thin(&p, 1.5, &mut rng(2)), Err(GeometryError::InvalidProbability(1.5)));
    }

    #[test]
    fn points_stay_in_window() {
        let w = Window::new(50.0).unwrap();
        let p = sample_hppp(0.05, w, &mut rng(3)).unwrap();
        assert!(!p.is_empty());
        assert!(p.points.iter().all(|q| w.contains(q)));
    }

    #[test]
    fn thinning_extremes() {
        let w = Window::new(30.0).unwrap();
        let p = sample_hppp(0.05, w, &mut rng(4)).unwrap();
        let (kept, dropped) = thin(&p, 1.0, &mut rng(5)).unwrap();
        assert_eq!(kept.points, p.points);
        assert!(dropped.is_empty());
        let (kept, dropped) = thin(&p, 0.0, &mut rng(5)).unwrap();
        assert!(kept.is_empty());
        assert_eq!(dropped.len(), p.len());
        assert_eq!(kept.intensity, 0.0);
    }

    #[test]
    fn nearest_examples() {
        let w = Window::new(10.0).unwrap();
        assert!(nearest(&PointPattern::empty(w, 0.0), Point::ORIGIN).is_none());
        let single = PointPattern {
            points: vec![Point::new(3.0, 4.0)],
            window_radius: 10.0,
            intensity: 0.01,
        };
        let (p, d) = nearest(&single, Point::ORIGIN).unwrap();
        assert_eq!(p, Point::new(3.0, 4.0));
        assert_eq!(d, 5.0);
    }

    #[test]
    fn nearest_ties_prefer_first() {
        let pat = PointPattern {
            points: vec![Point::new(1.0, 0.0), Point::new(0.0, 1.0), Point::new(-1.0, 0.0)],
            window_radius: 2.0,
            intensity: 1.0,
        };
        assert_eq!(nearest(&pat, Point::ORIGIN).unwrap().0, Point::new(1.0, 0.0));
    }

    #[test]
    fn interference_window_grows_as_tolerance_shrinks() {
        let a = Window::for_interference(1e-3, 3.5, 1e-2).unwrap().radius();
        let b = Window::for_interference(1e-3, 3.5, 1e-3).unwrap().radius();
        assert!(b > a);
        // R ∝ tol^(-1/(η-1))
        assert!(((b / a) - 10f64.powf(1.0 / 2.5)).abs() < 1e-9);
    }

    #[test]
    fn snapping_and_rings() {
        let w = Window::new(100.0).unwrap().snapped();
        assert!(w.radius() >= 100.0 && w.radius() < 100.0 * std::f64::consts::SQRT_2);
        let k = 2.0 * w.radius().log2();
        assert!((k - k.round()).abs() < 1e-9);
        let doubled = Window::new(2.0 * w.radius()).unwrap().snapped();
        assert!((doubled.radius() - 2.0 * w.radius()).abs() < 1e-9);
        let small = w.rings();
        let big = doubled.rings();
        assert_eq!(big.len(), small.len() + 2);
        assert_eq!(&big[..small.len() - 1], &small[..small.len() - 1]);
    }

    #[test]
    fn ring_sampling_nests() {
        let w = Window::new(40.0).unwrap().snapped();
        let d = Window::new(2.0 * w.radius()).unwrap().snapped();
        let a = sample_hppp_rings(0.05, Point::ORIGIN, &w.rings(), &mut rng(9)).unwrap();
        let b = sample_hppp_rings(0.05, Point::ORIGIN, &d.rings(), &mut rng(9)).unwrap();
        assert!(b.len() >= a.len());
        assert_eq!(&b.points[..a.len()], &a.points[..]);
        assert!(a.points.iter().all(|p| p.norm() <= w.radius() + 1e-9));
    }

    #[test]
    fn csv_dump() {
        let pat = PointPattern {
            points: vec![Point::new(1.5, -2.0)],
            window_radius: 5.0,
            intensity: 0.1,
        };
        assert_eq!(pat.to_csv(), "x,y\n1.5,-2\n");
    }

    proptest! {
        #[test]
        fn thinning_partitions_the_pattern(seed in 0u64..1000, p in 0.0..=1.0f64) {
            let w = Window::new(20.0).unwrap();
            let pat = sample_hppp(0.05, w, &mut rng(seed)).unwrap();
            let (kept, dropped) = thin(&pat, p, &mut rng(seed + 1)).unwrap();
            prop_assert_eq!(kept.len() + dropped.len(), pat.len());
            prop_assert!((kept.intensity + dropped.intensity - pat.intensity).abs() < 1e-15);
        }

        #[test]
        fn nearest_is_minimal(seed in 0u64..1000, qx in -20.0..20.0f64, qy in -20.0..20.0f64) {
            let w = Window::new(20.0).unwrap();
            let pat = sample_hppp(0.02, w, &mut rng(seed)).unwrap();
            let q = Point::new(qx, qy);
            if let Some((best, _)) = nearest(&pat, q) {
                let d2 = best.distance_sq(&q);
                for p in &pat.points {
                    prop_assert!(d2 <= p.distance_sq(&q));
                }
            } else {
                prop_assert!(pat.is_empty());
            }
        }
    }
}
