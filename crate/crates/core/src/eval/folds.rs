use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

const FOLD_TAG: u64 = 0x464f_4c44;
const HOLDOUT_TAG: u64 = 0x484f_4c44;

/// Assignment of every sample to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub assignments: Vec<usize>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }
}

fn class_members(labels: &[usize], indices: &[usize]) -> Vec<Vec<usize>> {
    let classes = indices.iter().map(|&i| labels[i] + 1).max().unwrap_or(0);
    let mut members = vec![Vec::new(); classes];
    for &i in indices {
        members[labels[i]].push(i);
    }
    members
}

/// Stratified k-fold split. Each class is shuffled and dealt round-robin,
/// continuing the deal across classes, so every fold holds within one sample
/// of each class's proportional share and fold sizes differ by at most one.
pub fn stratified_kfold(labels: &[usize], k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::Config(format!("k must be at least 2, got {k}")));
    }
    let all: Vec<usize> = (0..labels.len()).collect();
    let members = class_members(labels, &all);
    for (class, m) in members.iter().enumerate() {
        if !m.is_empty() && m.len() < k {
            return Err(Error::ClassTooSmall {
                class,
                count: m.len(),
                k,
            });
        }
    }
    let mut rng = seed::rng_for(seed, FOLD_TAG, 0);
    let mut assignments = vec![0; labels.len()];
    let mut position = 0;
    for mut m in members {
        m.shuffle(&mut rng);
        for i in m {
            assignments[i] = position % k;
            position += 1;
        }
    }
    Ok(FoldPlan { k, assignments, seed })
}

/// Stratified split of `indices` into `(train, validation)` with roughly
/// `fraction` of each class held out; classes with one member stay in train.
pub fn stratified_holdout(
    labels: &[usize],
    indices: &[usize],
    fraction: f64,
    seed: u64,
) -> (Vec<usize>, Vec<usize>) {
    let mut rng = seed::rng_for(seed, HOLDOUT_TAG, 0);
    let (mut train, mut val) = (Vec::new(), Vec::new());
    for mut m in class_members(labels, indices) {
        m.shuffle(&mut rng);
        let take = if m.len() < 2 {
            0
        } else {
            ((m.len() as f64 * fraction).round() as usize).clamp(1, m.len() - 1)
        };
        val.extend_from_slice(&m[..take]);
        train.extend_from_slice(&m[take..]);
    }
    train.sort_unstable();
    val.sort_unstable();
    (train, val)
}
