//! Coarse-grained lower bounds and the shared-component upper bound.
//!
//! Lumping two densities onto the cells of any partition can only shrink
//! their total variation, so `1/2 sum_s |M_s - M'_s| <= TV(m, m')` where
//! `M_s` and `M'_s` are the cell masses. Refining the partition gives a
//! nondecreasing chain of such bounds.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expfam::Component;
use crate::mixture::Mixture;
use crate::sum::compensated_sum;

/// Interior cut points of a partition of the real line. The two unbounded
/// end cells are implied; no cuts means a single cell.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Partition {
    cuts: Vec<f64>,
}

impl Partition {
    /// Cuts must be finite and strictly increasing.
    pub fn new(cuts: Vec<f64>) -> Result<Self> {
        if let Some(x) = cuts.iter().find(|x| !x.is_finite()) {
            return Err(Error::argument(format!("partition cut {x} is not finite")));
        }
        if let Some(w) = cuts.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::argument(format!(
                "partition cuts must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Self { cuts })
    }

    /// Sorts and deduplicates arbitrary finite values.
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        values.sort_by(f64::total_cmp);
        values.dedup();
        Self::new(values)
    }

    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    /// Number of cells (`cuts + 1`).
    pub fn cell_count(&self) -> usize {
        self.cuts.len() + 1
    }

    /// Cell endpoints `(a, b)` in order, starting at `-inf`.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.cuts.len();
        (0..=n).map(move |i| {
            let a = if i == 0 { f64::NEG_INFINITY } else { self.cuts[i - 1] };
            let b = if i == n { f64::INFINITY } else { self.cuts[i] };
            (a, b)
        })
    }

    /// Whether every cell of `self` lies inside a cell of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        let mut mine = self.cuts.iter().peekable();
        for c in &coarser.cuts {
            while mine.next_if(|x| *x < c).is_some() {}
            if mine.next_if(|x| *x == c).is_none() {
                return false;
            }
        }
        true
    }

    /// One refinement step: every finite cell is bisected and each end cell
    /// gets one new cut `step` further out.
    fn refine_step(&self, step: f64) -> Partition {
        if self.cuts.is_empty() {
            return Partition { cuts: vec![0.0] };
        }
        let mut cuts = Vec::with_capacity(2 * self.cuts.len() + 1);
        cuts.push(self.cuts[0] - step);
        for w in self.cuts.windows(2) {
            cuts.push(w[0]);
            cuts.push(0.5 * (w[0] + w[1]));
        }
        let last = *self.cuts.last().expect("non-empty");
        cuts.push(last);
        cuts.push(last + step);
        cuts.dedup();
        Partition { cuts }
    }
}

/// `1/2 sum_s |M_s - M'_s|` over the cells of `partition`.
pub fn cgqlb(m: &Mixture, m_prime: &Mixture, partition: &Partition) -> f64 {
    let tv = 0.5
        * compensated_sum(
            partition
                .cells()
                .map(|(a, b)| (m.mass_unchecked(a, b) - m_prime.mass_unchecked(a, b)).abs()),
        );
    tv.clamp(0.0, 1.0)
}

/// CGQLB on a chain of `levels` successively refined partitions.
///
/// The first level is `base`. Each later level bisects every finite cell and
/// adds one cut outward at each end, stepping by the width of the outermost
/// base cell (1 when the base has fewer than two cuts). The result is
/// nondecreasing.
pub fn nested_cgqlb(
    m: &Mixture,
    m_prime: &Mixture,
    base: &Partition,
    levels: usize,
) -> Result<Vec<f64>> {
    if levels == 0 {
        return Err(Error::argument("levels must be >= 1"));
    }
    let c = base.cuts();
    let step = match c.len() {
        0 | 1 => 1.0,
        n => (c[1] - c[0]).max(c[n - 1] - c[n - 2]),
    };
    let mut p = base.clone();
    let mut out = Vec::with_capacity(levels);
    let mut prev = f64::NEG_INFINITY;
    for level in 0..levels {
        if level > 0 {
            p = p.refine_step(step);
        }
        // refinement cannot decrease the exact value; guard against the
        // last-ulp wobble of the floating-point sum
        let v = cgqlb(m, m_prime, &p).max(prev);
        out.push(v);
        prev = v;
    }
    Ok(out)
}

/// Cuts at the sorted unique values of `ceil(n/2)` draws from `m` and
/// `floor(n/2)` draws from `m_prime`, all from one seeded stream.
pub fn sample_partition(m: &Mixture, m_prime: &Mixture, n: usize, seed: u64) -> Result<Partition> {
    if n == 0 {
        return Err(Error::argument("sample count must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = m.sample(&mut rng, n.div_ceil(2));
    values.extend(m_prime.sample(&mut rng, n / 2));
    Partition::from_unsorted(values)
}

/// `min(1, 1/2 sum_i |w_i - w'_i|)` for mixtures over the same component
/// list; an upper bound on their TV.
pub fn shared_component_upper(m: &Mixture, m_prime: &Mixture) -> Result<f64> {
    if m.components() != m_prime.components() {
        return Err(Error::argument(
            "shared-component bound needs identical component lists (zero-pad first)",
        ));
    }
    let d = 0.5
        * compensated_sum(
            m.weights()
                .iter()
                .zip(m_prime.weights())
                .map(|(w, v)| (w - v).abs()),
        );
    Ok(d.min(1.0))
}

/// Rewrites both mixtures over the union of their component lists, giving
/// zero weight to components a mixture lacks. The results are positive
/// measures suitable for [`shared_component_upper`].
pub fn zero_pad(m: &Mixture, m_prime: &Mixture) -> Result<(Mixture, Mixture)> {
    let mut union: Vec<Component> = m.components().to_vec();
    for c in m_prime.components() {
        if !union.contains(c) {
            union.push(*c);
        }
    }
    let weights_for = |mix: &Mixture| -> Vec<f64> {
        union
            .iter()
            .map(|c| {
                mix.components()
                    .iter()
                    .zip(mix.weights())
                    .filter(|(d, _)| *d == c)
                    .map(|(_, w)| *w)
                    .sum()
            })
            .collect()
    };
    Ok((
        Mixture::measure(union.clone(), weights_for(m))?,
        Mixture::measure(union.clone(), weights_for(m_prime))?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(mu: f64, s: f64) -> Component {
        Component::gaussian(mu, s).unwrap()
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![0.0, 0.0]).is_err());
        assert!(Partition::new(vec![1.0, 0.0]).is_err());
        assert!(Partition::new(vec![f64::INFINITY]).is_err());
        let p = Partition::from_unsorted(vec![3.0, 1.0, 3.0]).unwrap();
        assert_eq!(p.cuts(), &[1.0, 3.0]);
        assert_eq!(p.cells().count(), 3);
    }

    #[test]
    fn trivial_cases() {
        let m = Mixture::single(n(0.0, 1.0));
        let mp = Mixture::single(n(1.0, 2.0));
        assert_eq!(cgqlb(&m, &mp, &Partition::trivial()), 0.0);
        let p = Partition::new(vec![-1.0, 0.0, 2.5]).unwrap();
        assert_eq!(cgqlb(&m, &m, &p), 0.0);
        assert_eq!(cgqlb(&m, &mp, &p), cgqlb(&mp, &m, &p));
    }

    #[test]
    fn far_pair_single_cut() {
        let m = Mixture::single(n(-5.0, 1.0));
        let mp = Mixture::single(n(5.0, 1.0));
        let v = cgqlb(&m, &mp, &Partition::new(vec![0.0]).unwrap());
        // 1 - 2 Phi(-5)
        let want = 0.999999426696856241612176652495;
        assert!((v - want).abs() < 1e-15);
        assert!((v - 0.9999994).abs() < 1e-7);
    }

    #[test]
    fn nested_is_monotone_and_refining() {
        let m = Mixture::new(vec![n(0.0, 1.0), n(2.0, 0.5)], vec![0.5, 0.5]).unwrap();
        let mp = Mixture::single(n(1.0, 1.5));
        let base = Partition::new(vec![-1.0, 1.0, 3.0]).unwrap();
        let seq = nested_cgqlb(&m, &mp, &base, 5).unwrap();
        assert_eq!(seq.len(), 5);
        assert_eq!(seq[0], cgqlb(&m, &mp, &base));
        assert!(seq.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(nested_cgqlb(&m, &mp, &base, 1).unwrap(), vec![seq[0]]);
        let next = base.refine_step(2.0);
        assert!(next.refines(&base));
        assert_eq!(next.cuts(), &[-3.0, -1.0, 0.0, 1.0, 2.0, 3.0, 5.0]);
        assert!(!base.refines(&next));
        assert!(nested_cgqlb(&m, &mp, &base, 0).is_err());
        assert!(nested_cgqlb(&m, &m, &Partition::trivial(), 4)
            .unwrap()
            .iter()
            .all(|v| *v == 0.0));
    }

    #[test]
    fn sampled_partition() {
        let m = Mixture::single(n(0.0, 1.0));
        let mp = Mixture::single(n(3.0, 1.0));
        assert_eq!(sample_partition(&m, &mp, 1, 9).unwrap().cuts().len(), 1);
        let a = sample_partition(&m, &mp, 100, 9).unwrap();
        assert_eq!(a, sample_partition(&m, &mp, 100, 9).unwrap());
        assert_ne!(a, sample_partition(&m, &mp, 100, 10).unwrap());
        assert!(sample_partition(&m, &mp, 0, 9).is_err());
    }

    #[test]
    fn shared_components() {
        let comps = vec![n(0.0, 1.0), n(3.0, 1.0)];
        let m = Mixture::new(comps.clone(), vec![0.6, 0.4]).unwrap();
        let mp = Mixture::new(comps.clone(), vec![0.4, 0.6]).unwrap();
        assert!((shared_component_upper(&m, &mp).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(shared_component_upper(&m, &m).unwrap(), 0.0);
        let a = Mixture::measure(comps.clone(), vec![1.0, 0.0]).unwrap();
        let b = Mixture::measure(comps, vec![0.0, 1.0]).unwrap();
        assert_eq!(shared_component_upper(&a, &b).unwrap(), 1.0);
        let other = Mixture::single(n(0.0, 1.0));
        assert!(shared_component_upper(&m, &other).is_err());
        let (pa, pb) = zero_pad(&m, &Mixture::single(n(5.0, 1.0))).unwrap();
        assert_eq!(pa.len(), 3);
        assert_eq!(shared_component_upper(&pa, &pb).unwrap(), 1.0);
    }
}
