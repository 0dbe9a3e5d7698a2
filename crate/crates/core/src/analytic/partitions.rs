use super::{AnalyticError, ServingLink};
use crate::Scalar;

/// Largest antenna count the partition expansion accepts.
pub const MAX_ANTENNAS: u32 = 16;

/// Integer partition stored as multiplicities: `m[l-1]` parts of size `l`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    multiplicities: Vec<u32>,
}

impl Partition {
    pub fn from_multiplicities(multiplicities: Vec<u32>) -> Self {
        let mut multiplicities = multiplicities;
        while multiplicities.last() == Some(&0) {
            multiplicities.pop();
        }
        Partition { multiplicities }
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicities
    }

    /// Multiplicity of parts of size `l` (1-based).
    pub fn multiplicity(&self, l: usize) -> u32 {
        if l == 0 {
            return 0;
        }
        self.multiplicities.get(l - 1).copied().unwrap_or(0)
    }

    /// Σ l·m_l.
    pub fn order(&self) -> u32 {
        self.multiplicities
            .iter()
            .enumerate()
            .map(|(i, &m)| (i as u32 + 1) * m)
            .sum()
    }

    /// 1 / ∏ (m_l! · l!^m_l).
    pub fn weight(&self) -> f64 {
        let mut denom = 1.0;
        let mut l_fact = 1.0;
        for (i, &m) in self.multiplicities.iter().enumerate() {
            l_fact *= (i + 1) as f64;
            denom *= factorial(m) * l_fact.powi(m as i32);
        }
        1.0 / denom
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// All partitions of `m`, largest parts first.
pub fn partitions(m: u32) -> Result<Vec<Partition>, AnalyticError> {
    if m == 0 {
        return Err(AnalyticError::Domain {
            name: "m",
            requirement: ">= 1",
            value: 0.0,
        });
    }
    let mut out = Vec::new();
    let mut mult = vec![0u32; m as usize];
    fill(m, m, &mut mult, &mut out);
    Ok(out)
}

fn fill(remaining: u32, max_part: u32, mult: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition::from_multiplicities(mult.clone()));
        return;
    }
    for part in (1..=max_part.min(remaining)).rev() {
        mult[part as usize - 1] += 1;
        fill(remaining - part, part, mult, out);
        mult[part as usize - 1] -= 1;
    }
}

/// Bracket values g_l for l = 1..=m at radius `r`.
///
/// g_1 = −(2/η) K γ^(2/η) r^(2−η) − γ n and
/// g_l = −K γ^(2/η) ∏_{j<l}(2/η − j) r^(2−lη).
fn brackets<T: Scalar>(link: &ServingLink<T>, r: T, gamma_th: T, m: usize) -> Vec<T> {
    let delta = T::lit(2.0) / link.eta;
    let k_gamma = link.interference * gamma_th.powf(delta);
    let mut falling = T::one();
    let mut out = Vec::with_capacity(m);
    for l in 1..=m {
        falling = falling * (delta - T::lit((l - 1) as f64));
        let l_t = T::lit(l as f64);
        let mut g = -k_gamma * falling * r.powf(T::lit(2.0) - l_t * link.eta);
        if l == 1 {
            g = g - gamma_th * link.noise;
        }
        out.push(g);
    }
    out
}

/// One partition's contribution to the m-th derivative of the interference
/// and noise kernel, divided by the kernel and by m!.
///
/// Summing over all partitions of m gives `V^(m)(x) / (m! V(x))` at
/// `x = r^η`, where `V(x) = exp(−K (γ x)^(2/η) − γ x n)`.
pub fn faa_di_bruno_term<T: Scalar>(
    partition: &Partition,
    link: &ServingLink<T>,
    r: T,
    gamma_th: T,
) -> Result<T, AnalyticError> {
    if link.antennas > MAX_ANTENNAS {
        return Err(AnalyticError::TooManyAntennas(link.antennas));
    }
    let order = partition.order();
    let max = link.antennas.saturating_sub(1);
    if order > max || order == 0 {
        return Err(AnalyticError::PartitionOrder { order, max });
    }
    let g = brackets(link, r, gamma_th, partition.multiplicities().len());
    let mut term = T::lit(partition.weight());
    for (gl, &ml) in g.iter().zip(partition.multiplicities()) {
        term = term * gl.powi(ml as i32);
    }
    Ok(term)
}

/// Σ_{m<M} (−x)^m Σ_p term(p) at x = r^η with t = r², with each bracket
/// pre-multiplied by x^l so nothing overflows at small r.
pub(crate) fn correction_factor<T: Scalar>(link: &ServingLink<T>, t: T, gamma_th: T, table: &[Vec<Partition>]) -> T {
    if table.is_empty() {
        return T::one();
    }
    let delta = T::lit(2.0) / link.eta;
    let k_gamma = link.interference * gamma_th.powf(delta);
    let x = t.powf(link.eta / T::lit(2.0));
    let mut scaled = Vec::with_capacity(table.len());
    let mut falling = T::one();
    for l in 1..=table.len() {
        falling = falling * (delta - T::lit((l - 1) as f64));
        let mut g = -k_gamma * falling * t;
        if l == 1 {
            g = g - gamma_th * link.noise * x;
        }
        // (−1)^l folded in so every summand is built from (−x^l g_l)
        let sign = if l % 2 == 1 { -T::one() } else { T::one() };
        scaled.push(sign * g);
    }
    let mut total = T::one();
    for parts in table {
        for p in parts {
            let mut term = T::lit(p.weight());
            for (gl, &ml) in scaled.iter().zip(p.multiplicities()) {
                term = term * gl.powi(ml as i32);
            }
            total = total + term;
        }
    }
    total
}

pub(crate) fn partition_table(antennas: u32) -> Result<Vec<Vec<Partition>>, AnalyticError> {
    if antennas > MAX_ANTENNAS {
        return Err(AnalyticError::TooManyAntennas(antennas));
    }
    if antennas > 8 {
        log::warn!("partition expansion for M = {antennas} grows combinatorially");
    }
    (1..antennas).map(partitions).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::collections::HashSet;

    fn link(antennas: u32, noise: f64) -> ServingLink<f64> {
        ServingLink {
            association: 0.03,
            interference: 0.02,
            eta: 3.5,
            noise,
            antennas,
        }
    }

    #[test]
    fn small_partitions() {
        assert_eq!(partitions(1).unwrap(), vec![Partition::from_multiplicities(vec![1])]);
        let p3: HashSet<_> = partitions(3).unwrap().into_iter().collect();
        let expect: HashSet<_> = [vec![3], vec![1, 1], vec![0, 0, 1]]
            .into_iter()
            .map(Partition::from_multiplicities)
            .collect();
        assert_eq!(p3, expect);
        assert!(partitions(0).is_err());
    }

    fn brute_force_count(m: u32) -> usize {
        // every multiplicity vector with m_l <= m / l
        let mut count = 0;
        let mut v = vec![0u32; m as usize];
        loop {
            let s: u32 = v.iter().enumerate().map(|(i, &x)| (i as u32 + 1) * x).sum();
            if s == m {
                count += 1;
            }
            let mut i = 0;
            loop {
                if i == v.len() {
                    return count;
                }
                v[i] += 1;
                if v[i] <= m / (i as u32 + 1) {
                    break;
                }
                v[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (1..=10).map(|m| partitions(m).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
        for m in 1..=8 {
            assert_eq!(partitions(m).unwrap().len(), brute_force_count(m));
        }
    }

    #[test]
    fn partitions_are_valid_and_distinct() {
        for m in 1..=12 {
            let ps = partitions(m).unwrap();
            let set: HashSet<_> = ps.iter().cloned().collect();
            assert_eq!(set.len(), ps.len());
            assert!(ps.iter().all(|p| p.order() == m));
        }
    }

    #[test]
    fn weights_sum_to_bell_over_factorial() {
        // Σ m!·weight over partitions of m counts set partitions (Bell numbers)
        let bell = [1.0, 2.0, 5.0, 15.0, 52.0, 203.0];
        for (i, b) in bell.iter().enumerate() {
            let m = i as u32 + 1;
            let s: f64 = partitions(m).unwrap().iter().map(|p| p.weight()).sum::<f64>() * factorial(m);
            assert_relative_eq!(s, *b, max_relative = 1e-12);
        }
    }

    #[test]
    fn first_order_term_is_negative() {
        let l = link(2, 0.0);
        let p = &partitions(1).unwrap()[0];
        for &r in &[0.1, 1.0, 10.0] {
            for &g in &[0.01, 1.0, 100.0] {
                assert!(faa_di_bruno_term(p, &l, r, g).unwrap() < 0.0);
            }
        }
    }

    #[test]
    fn order_checks() {
        let p2 = &partitions(2).unwrap()[0];
        assert!(matches!(
            faa_di_bruno_term(p2, &link(2, 0.0), 1.0, 1.0),
            Err(AnalyticError::PartitionOrder { order: 2, max: 1 })
        ));
        assert!(matches!(
            faa_di_bruno_term(p2, &link(17, 0.0), 1.0, 1.0),
            Err(AnalyticError::TooManyAntennas(17))
        ));
        assert!(partition_table(1).unwrap().is_empty());
    }

    /// ln V(x) = −K (γx)^(2/η) − γ x n
    fn log_v(l: &ServingLink<f64>, gamma: f64, x: f64) -> f64 {
        -l.interference * (gamma * x).powf(2.0 / l.eta) - gamma * x * l.noise
    }

    /// m-th derivative of V at x via Richardson-extrapolated central differences.
    fn fd_derivative(l: &ServingLink<f64>, gamma: f64, x: f64, m: usize) -> f64 {
        let v = |y: f64| log_v(l, gamma, y).exp();
        let stencil = |h: f64| -> f64 {
            // central difference of order m, accuracy O(h²)
            let mut acc = 0.0;
            let mut binom = 1.0;
            for k in 0..=m {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * binom * v(x + (m as f64 / 2.0 - k as f64) * h);
                binom = binom * (m - k) as f64 / (k + 1) as f64;
            }
            acc / h.powi(m as i32)
        };
        // three-level Richardson table in h²
        let h0 = x * 0.2;
        let d = [stencil(h0), stencil(h0 / 2.0), stencil(h0 / 4.0), stencil(h0 / 8.0)];
        let mut t = d.to_vec();
        let mut factor = 4.0;
        for _ in 0..3 {
            t = t.windows(2).map(|w| (factor * w[1] - w[0]) / (factor - 1.0)).collect();
            factor *= 4.0;
        }
        t[0]
    }

    #[test]
    fn partition_sum_matches_finite_differences() {
        for &noise in &[0.0, 0.05] {
            for antennas in 2..=5u32 {
                let l = link(antennas, noise);
                for &r in &[0.7f64, 1.3, 2.5] {
                    for &gamma in &[0.3, 1.0, 4.0] {
                        let x: f64 = r.powf(l.eta);
                        for m in 1..antennas {
                            let sum: f64 = partitions(m)
                                .unwrap()
                                .iter()
                                .map(|p| faa_di_bruno_term(p, &l, r, gamma).unwrap())
                                .sum();
                            let vx = log_v(&l, gamma, x).exp();
                            let fd = fd_derivative(&l, gamma, x, m as usize) / (factorial(m) * vx);
                            assert_relative_eq!(sum, fd, max_relative = 1e-6);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn scaled_correction_matches_raw_terms() {
        let l = link(4, 0.02);
        let table = partition_table(4).unwrap();
        for &r in &[0.05f64, 0.9, 3.0, 20.0] {
            for &gamma in &[0.1, 2.0] {
                let x: f64 = r.powf(l.eta);
                let mut raw = 1.0;
                for (m, parts) in table.iter().enumerate() {
                    let m = m as i32 + 1;
                    let s: f64 = parts.iter().map(|p| faa_di_bruno_term(p, &l, r, gamma).unwrap()).sum();
                    raw += (-x).powi(m) * s;
                }
                let scaled = correction_factor(&l, r * r, gamma, &table);
                assert_relative_eq!(scaled, raw, max_relative = 1e-10);
            }
        }
    }
}
