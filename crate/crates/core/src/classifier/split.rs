//! Deterministic stratified train/validate/test splitting.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::CoarseClass;

use super::ClassifierError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    /// (train, validate, test); must sum to 1.
    pub fractions: (f64, f64, f64),
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            fractions: (0.8, 0.1, 0.1),
            seed: 42,
            stratified: true,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<(), ClassifierError> {
        let sum = self.fractions.0 + self.fractions.1 + self.fractions.2;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(ClassifierError::InvalidInput(format!(
                "split fractions sum to {sum}, expected 1.0"
            )));
        }
        if self.fractions.0 <= 0.0 || self.fractions.1 < 0.0 || self.fractions.2 < 0.0 {
            return Err(ClassifierError::InvalidInput(
                "split fractions must be non-negative with a positive train share".to_string(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub validate: Vec<usize>,
    pub test: Vec<usize>,
    /// Classes too small to stratify, placed wholly in train.
    pub warnings: Vec<String>,
}

/// Allocate `n` across the three splits by largest remainder, then force
/// at least one item into every nonzero-fraction split when `n` permits.
fn largest_remainder(n: usize, fractions: (f64, f64, f64)) -> [usize; 3] {
    let fracs = [fractions.0, fractions.1, fractions.2];
    let exact: Vec<f64> = fracs.iter().map(|f| f * n as f64).collect();
    let mut counts: [usize; 3] = [
        exact[0].floor() as usize,
        exact[1].floor() as usize,
        exact[2].floor() as usize,
    ];
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..3).collect();
    // ties broken in split order (train, validate, test)
    order.sort_by(|&a, &b| {
        let fa = exact[a] - exact[a].floor();
        let fb = exact[b] - exact[b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    for i in 0..(n - assigned) {
        counts[order[i % 3]] += 1;
    }
    // every split reachable: pull from the largest split if a nonzero
    // fraction ended up empty
    if n >= 3 {
        for s in 0..3 {
            if fracs[s] > 0.0 && counts[s] == 0 {
                let donor = (0..3).max_by_key(|&d| counts[d]).unwrap();
                if counts[donor] > 1 {
                    counts[donor] -= 1;
                    counts[s] += 1;
                }
            }
        }
    }
    counts
}

/// Split rows by label. Stratification shuffles each class separately
/// (one seeded RNG, classes in canonical order) and applies
/// largest-remainder rounding per class; classes with fewer than 3
/// samples go wholly to train with a warning.
pub fn split(labels: &[CoarseClass], spec: &SplitSpec) -> Result<SplitIndices, ClassifierError> {
    spec.validate()?;
    if labels.is_empty() {
        return Err(ClassifierError::InvalidInput("no rows to split".to_string()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = SplitIndices {
        train: Vec::new(),
        validate: Vec::new(),
        test: Vec::new(),
        warnings: Vec::new(),
    };

    let mut buckets: Vec<Vec<usize>> = if spec.stratified {
        CoarseClass::ALL
            .iter()
            .map(|&class| {
                (0..labels.len())
                    .filter(|&i| labels[i] == class)
                    .collect::<Vec<usize>>()
            })
            .filter(|b| !b.is_empty())
            .collect()
    } else {
        vec![(0..labels.len()).collect()]
    };

    for bucket in &mut buckets {
        bucket.shuffle(&mut rng);
        if spec.stratified && bucket.len() < 3 {
            out.warnings.push(format!(
                "class {} has only {} samples; all placed in train",
                labels[bucket[0]],
                bucket.len()
            ));
            out.train.extend(bucket.iter().copied());
            continue;
        }
        let counts = largest_remainder(bucket.len(), spec.fractions);
        out.train.extend(&bucket[..counts[0]]);
        out.validate.extend(&bucket[counts[0]..counts[0] + counts[1]]);
        out.test.extend(&bucket[counts[0] + counts[1]..]);
    }

    out.train.sort_unstable();
    out.validate.sort_unstable();
    out.test.sort_unstable();
    Ok(out)
}
