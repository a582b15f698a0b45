//! Trim planning: express every target thickness as the base minus a subset
//! of one shared set of milling depths.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest step-set size searched exhaustively when steps are solved.
const MAX_SEARCH_STEPS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrimPlan {
    pub base_nm: u32,
    /// Shared step depths in application order.
    pub steps: Vec<u32>,
    /// Per target, the steps applied (in order).
    pub sequences: Vec<Vec<u32>>,
}

impl TrimPlan {
    pub fn final_thickness(&self, i: usize) -> u32 {
        self.base_nm - self.sequences[i].iter().sum::<u32>()
    }
}

/// Plans trims for `targets` from `base_nm`.
///
/// With `allowed_steps`, every depth must be an exact subset sum of the
/// given steps (prefixes of the given order preferred). Without, the smallest
/// step set is solved for, preferring sets where every depth is a prefix sum
/// (a single nested milling sequence), then lexicographically smaller steps.
pub fn plan_trims(base_nm: u32, targets: &[u32], allowed_steps: Option<&[u32]>) -> Result<TrimPlan> {
    let mut depths = Vec::with_capacity(targets.len());
    for &t in targets {
        if t > base_nm {
            return Err(Error::InfeasibleTrim(format!(
                "target {t} nm is thicker than base {base_nm} nm"
            )));
        }
        depths.push(base_nm - t);
    }
    let steps = match allowed_steps {
        Some(s) => {
            if s.iter().any(|&x| x == 0) {
                return Err(Error::InfeasibleTrim("zero-depth step".into()));
            }
            s.to_vec()
        }
        None => solve_steps(&depths),
    };
    let mut sequences = Vec::with_capacity(depths.len());
    for (&d, &t) in depths.iter().zip(targets) {
        let seq = decompose(d, &steps).ok_or_else(|| {
            Error::InfeasibleTrim(format!(
                "depth {d} nm (target {t} nm) is not a subset sum of steps {steps:?}"
            ))
        })?;
        sequences.push(seq);
    }
    Ok(TrimPlan {
        base_nm,
        steps,
        sequences,
    })
}

/// Ordered subset of `steps` summing to `depth`: the shortest prefix if one
/// works, else the first subset in mask order.
fn decompose(depth: u32, steps: &[u32]) -> Option<Vec<u32>> {
    if depth == 0 {
        return Some(Vec::new());
    }
    let mut acc = 0;
    for (i, &s) in steps.iter().enumerate() {
        acc += s;
        if acc == depth {
            return Some(steps[..=i].to_vec());
        }
    }
    let n = steps.len();
    let mut best: Option<Vec<u32>> = None;
    for mask in 1u32..(1 << n) {
        let sum: u32 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| steps[i]).sum();
        if sum == depth {
            let sub: Vec<u32> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| steps[i]).collect();
            if best.as_ref().map_or(true, |b| sub.len() < b.len()) {
                best = Some(sub);
            }
        }
    }
    best
}

fn solve_steps(depths: &[u32]) -> Vec<u32> {
    let mut distinct: Vec<u32> = depths.iter().copied().filter(|&d| d > 0).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.is_empty() {
        return Vec::new();
    }
    let max = *distinct.last().unwrap();
    for k in 1..=distinct.len().min(MAX_SEARCH_STEPS) {
        let mut best: Option<(bool, Vec<u32>)> = None;
        let mut combo = Vec::with_capacity(k);
        search(1, max, k, &mut combo, &mut |set| {
            if !distinct.iter().all(|&d| decompose(d, set).is_some()) {
                return;
            }
            let chain = chain_order(set, &distinct);
            let nested = chain.is_some();
            let cand = chain.unwrap_or_else(|| set.to_vec());
            let better = match &best {
                None => true,
                Some((bn, bs)) => {
                    (nested && !bn) || (nested == *bn && sorted(&cand) < sorted(bs))
                }
            };
            if better {
                best = Some((nested, cand));
            }
        });
        if let Some((_, s)) = best {
            return s;
        }
    }
    distinct
}

fn sorted(v: &[u32]) -> Vec<u32> {
    let mut s = v.to_vec();
    s.sort_unstable();
    s
}

/// Ascending combinations of `k` values from `from..=max`.
fn search(from: u32, max: u32, k: usize, combo: &mut Vec<u32>, visit: &mut impl FnMut(&[u32])) {
    if combo.len() == k {
        visit(combo);
        return;
    }
    for v in from..=max {
        combo.push(v);
        search(v + 1, max, k, combo, visit);
        combo.pop();
    }
}

/// An ordering of `set` whose prefix sums cover every depth, if any.
fn chain_order(set: &[u32], depths: &[u32]) -> Option<Vec<u32>> {
    let mut best: Option<Vec<u32>> = None;
    permute(&mut set.to_vec(), 0, &mut |perm| {
        let mut acc = 0;
        let prefixes: Vec<u32> = perm
            .iter()
            .map(|s| {
                acc += s;
                acc
            })
            .collect();
        if depths.iter().all(|d| prefixes.contains(d))
            && best.as_ref().map_or(true, |b| perm < b.as_slice())
        {
            best = Some(perm.to_vec());
        }
    });
    best
}

fn permute(v: &mut Vec<u32>, i: usize, visit: &mut impl FnMut(&[u32])) {
    if i == v.len() {
        visit(v);
        return;
    }
    for j in i..v.len() {
        v.swap(i, j);
        permute(v, i + 1, visit);
        v.swap(i, j);
    }
}
