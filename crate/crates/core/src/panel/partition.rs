use serde::{Deserialize, Serialize};

use super::PanelError;
use crate::rng::SplitMix64;

/// Disjoint train/test/holdout index lists covering `0..n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub train_idx: Vec<usize>,
    pub test_idx: Vec<usize>,
    pub holdout_idx: Vec<usize>,
    pub seed: u64,
    pub proportions: [f64; 3],
}

impl Partition {
    pub fn sizes(&self) -> (usize, usize, usize) {
        (self.train_idx.len(), self.test_idx.len(), self.holdout_idx.len())
    }

    pub fn len(&self) -> usize {
        self.train_idx.len() + self.test_idx.len() + self.holdout_idx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Block sizes by largest remainder: floor every quota `n * p`, then hand the
/// leftover units to the largest fractional parts (earlier block wins ties).
pub fn block_sizes(n: usize, proportions: [f64; 3]) -> [usize; 3] {
    let mut sizes = [0usize; 3];
    let mut fracs = [0.0f64; 3];
    for k in 0..3 {
        let quota = n as f64 * proportions[k];
        // 100 * 0.7 must floor to 70, not 69
        let rounded = quota.round();
        let quota = if (quota - rounded).abs() < 1e-9 { rounded } else { quota };
        sizes[k] = quota.floor() as usize;
        fracs[k] = quota - quota.floor();
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| fracs[b].total_cmp(&fracs[a]).then(a.cmp(&b)));
    let mut left = n.saturating_sub(sizes.iter().sum());
    for &k in order.iter().cycle() {
        if left == 0 {
            break;
        }
        sizes[k] += 1;
        left -= 1;
    }
    sizes
}

/// Seeded random assignment of `0..n` to three blocks.
///
/// Indices are shuffled with [`SplitMix64::shuffle`] seeded by `seed` and then
/// cut into contiguous train, test and holdout blocks. Each returned list is
/// sorted ascending.
pub fn partition(n: usize, proportions: [f64; 3], seed: u64) -> Result<Partition, PanelError> {
    let valid =
        proportions.iter().all(|p| p.is_finite() && *p > 0.0) && (proportions.iter().sum::<f64>() - 1.0).abs() <= 1e-9;
    if !valid {
        return Err(PanelError::BadProportions(proportions));
    }
    if n < 3 {
        return Err(PanelError::TooFewRecords(n));
    }
    let [n_train, n_test, _] = block_sizes(n, proportions);
    let mut order: Vec<usize> = (0..n).collect();
    SplitMix64::new(seed).shuffle(&mut order);

    let cut = |range: std::ops::Range<usize>| {
        let mut v = order[range].to_vec();
        v.sort_unstable();
        v
    };
    Ok(Partition {
        train_idx: cut(0..n_train),
        test_idx: cut(n_train..n_train + n_test),
        holdout_idx: cut(n_train + n_test..n),
        seed,
        proportions,
    })
}
