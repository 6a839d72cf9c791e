//! Natural-breaks (Fisher-Jenks) classification.
//!
//! Exact dynamic programming over the sorted distinct values with
//! multiplicity weights, minimizing the total within-class sum of squared
//! deviations. For a contiguous 1-D partition there is always an optimum
//! that keeps equal values together, so collapsing duplicates loses nothing
//! and keeps the O(k n^2) table small on rank-derived rasters. Ties in
//! optimal cost resolve to the lexicographically smallest break vector via
//! a left-to-right reconstruction against suffix costs.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Above this many finite values the input is subsampled (uniformly at
/// random, seeded) before the exact DP runs.
pub const JENKS_SUBSAMPLE_LIMIT: usize = 100_000;

/// `jenks_breaks_seeded` with seed 0.
pub fn jenks_breaks<T: Scalar>(values: &[T], k: usize) -> Result<Vec<T>> {
    jenks_breaks_seeded(values, k, 0)
}

/// The `k - 1` ascending class-maximum thresholds minimizing total
/// within-class squared deviation. Needs at least `k` distinct finite
/// values; non-finite inputs are ignored. `seed` only matters past
/// [`JENKS_SUBSAMPLE_LIMIT`] values.
pub fn jenks_breaks_seeded<T: Scalar>(values: &[T], k: usize, seed: u64) -> Result<Vec<T>> {
    if k < 2 {
        return Err(Error::Argument(format!(
            "class count must be at least 2, got {k}"
        )));
    }
    let mut data: Vec<T> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if data.len() > JENKS_SUBSAMPLE_LIMIT {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        data.shuffle(&mut rng);
        data.truncate(JENKS_SUBSAMPLE_LIMIT);
    }
    data.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());

    // Collapse duplicates into (value, count).
    let mut uniq: Vec<T> = Vec::new();
    let mut weight: Vec<T> = Vec::new();
    for &v in &data {
        if uniq.last() == Some(&v) {
            let last = weight.len() - 1;
            weight[last] = weight[last] + T::one();
        } else {
            uniq.push(v);
            weight.push(T::one());
        }
    }
    let u = uniq.len();
    if u < k {
        return Err(Error::Classification(format!(
            "need at least {k} distinct finite values, found {u}"
        )));
    }

    // Weighted prefix sums for O(1) interval costs.
    let mut pw = vec![T::zero(); u + 1];
    let mut pwv = vec![T::zero(); u + 1];
    let mut pwv2 = vec![T::zero(); u + 1];
    for i in 0..u {
        pw[i + 1] = pw[i] + weight[i];
        pwv[i + 1] = pwv[i] + weight[i] * uniq[i];
        pwv2[i + 1] = pwv2[i] + weight[i] * uniq[i] * uniq[i];
    }
    // Sum of squared deviations over uniq[i..=j].
    let cost = |i: usize, j: usize| -> T {
        let w = pw[j + 1] - pw[i];
        let s = pwv[j + 1] - pwv[i];
        let s2 = pwv2[j + 1] - pwv2[i];
        s2 - s * s / w
    };

    // sdp[m][i]: minimal cost of splitting uniq[i..] into m classes.
    let mut sdp = vec![vec![T::infinity(); u + 1]; k + 1];
    for i in 0..u {
        sdp[1][i] = cost(i, u - 1);
    }
    for m in 2..=k {
        // First class must leave m-1 values for the remaining classes.
        for i in 0..=(u - m) {
            let mut best = T::infinity();
            for j in i..=(u - m) {
                let total = cost(i, j) + sdp[m - 1][j + 1];
                if total < best {
                    best = total;
                }
            }
            sdp[m][i] = best;
        }
    }

    // Left-to-right reconstruction: picking the smallest boundary whose cost
    // matches the suffix optimum yields the lexicographically smallest break
    // vector among cost ties.
    let mut breaks = Vec::with_capacity(k - 1);
    let mut start = 0usize;
    let mut remaining = k;
    while remaining > 1 {
        let mut chosen = None;
        for j in start..=(u - remaining) {
            if cost(start, j) + sdp[remaining - 1][j + 1] == sdp[remaining][start] {
                chosen = Some(j);
                break;
            }
        }
        let j = chosen.expect("an optimal boundary always exists");
        breaks.push(uniq[j]);
        start = j + 1;
        remaining -= 1;
    }
    Ok(breaks)
}

/// Total within-class squared deviation of `values` classified by `breaks`
/// (break values belong to the lower class).
pub fn partition_cost<T: Scalar>(values: &[T], breaks: &[T]) -> T {
    let k = breaks.len() + 1;
    let mut sums = vec![(T::zero(), T::zero(), T::zero()); k]; // (w, sum, sumsq)
    for &v in values.iter().filter(|v| v.is_finite()) {
        let class = breaks.iter().filter(|&&b| b < v).count();
        let (w, s, s2) = &mut sums[class];
        *w = *w + T::one();
        *s = *s + v;
        *s2 = *s2 + v * v;
    }
    let mut total = T::zero();
    for (w, s, s2) in sums {
        if w > T::zero() {
            total = total + (s2 - s * s / w);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn five_values_five_classes_are_singletons() {
        let breaks = jenks_breaks(&[1.0, 2.0, 3.0, 4.0, 5.0], 5).unwrap();
        assert_eq!(breaks, vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn bimodal_split() {
        let breaks = jenks_breaks(&[1.0, 1.0, 1.0, 10.0, 10.0, 10.0], 2).unwrap();
        assert_eq!(breaks, vec![1.0]);
    }

    #[test]
    fn too_few_distinct_values_is_a_classification_error() {
        let err = jenks_breaks(&[2.0, 2.0, 7.0], 3).unwrap_err();
        assert!(matches!(err, Error::Classification(_)), "{err}");
    }

    #[test]
    fn breaks_strictly_ascending() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let values: Vec<f64> = (0..60).map(|_| rng.gen_range(0.0f64..9.0).round()).collect();
            if let Ok(breaks) = jenks_breaks(&values, 5) {
                assert!(breaks.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    /// Exact rational within-class cost of an integer-valued partition.
    fn rational_cost(sorted: &[i64], bounds: &[usize]) -> Ratio<i128> {
        // bounds = exclusive ends of each class over the sorted values.
        let mut total = Ratio::new(0, 1);
        let mut start = 0usize;
        for &end in bounds {
            let class = &sorted[start..end];
            let m = class.len() as i128;
            let s: i128 = class.iter().map(|&v| v as i128).sum();
            let s2: i128 = class.iter().map(|&v| (v as i128) * (v as i128)).sum();
            total += Ratio::new(m * s2 - s * s, m);
            start = end;
        }
        total
    }

    fn enumerate_min_cost(sorted: &[i64], k: usize) -> Ratio<i128> {
        // All contiguous partitions into k non-empty classes.
        fn rec(
            sorted: &[i64],
            k: usize,
            start: usize,
            bounds: &mut Vec<usize>,
            best: &mut Option<Ratio<i128>>,
        ) {
            let n = sorted.len();
            if k == 1 {
                bounds.push(n);
                let cost = rational_cost(sorted, bounds);
                if best.as_ref().is_none_or(|b| cost < *b) {
                    *best = Some(cost);
                }
                bounds.pop();
                return;
            }
            for end in (start + 1)..=(n - (k - 1)) {
                bounds.push(end);
                rec(sorted, k - 1, end, bounds, best);
                bounds.pop();
            }
        }
        let mut best = None;
        rec(sorted, k, 0, &mut Vec::new(), &mut best);
        best.unwrap()
    }

    /// The DP's partition must achieve the exhaustive-enumeration optimum,
    /// compared in exact rational arithmetic on integer inputs.
    #[test]
    fn dp_matches_exhaustive_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut tested = 0;
        while tested < 250 {
            let k = rng.gen_range(2..=4usize);
            let n = rng.gen_range(k..=12usize);
            let mut ints: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=10i64)).collect();
            ints.sort_unstable();
            let distinct = {
                let mut d = ints.clone();
                d.dedup();
                d.len()
            };
            if distinct < k {
                continue;
            }
            tested += 1;

            let floats: Vec<f64> = ints.iter().map(|&v| v as f64).collect();
            let breaks = jenks_breaks(&floats, k).unwrap();
            // Induced class ends over the sorted values.
            let mut bounds: Vec<usize> = breaks
                .iter()
                .map(|&b| ints.iter().filter(|&&v| (v as f64) <= b).count())
                .collect();
            bounds.push(n);
            let dp_cost = rational_cost(&ints, &bounds);
            let oracle = enumerate_min_cost(&ints, k);
            assert_eq!(dp_cost, oracle, "ints {ints:?} k {k}");
        }
    }

    #[test]
    fn subsampling_is_deterministic() {
        let values: Vec<f64> = (0..(JENKS_SUBSAMPLE_LIMIT + 500))
            .map(|i| (i % 977) as f64 + (i % 13) as f64 * 0.5)
            .collect();
        let a = jenks_breaks_seeded(&values, 5, 42).unwrap();
        let b = jenks_breaks_seeded(&values, 5, 42).unwrap();
        assert_eq!(a, b);
    }
}
