//! Metrics on finite sets.
//!
//! [`set_distance`] combines the two asymmetric difference sizes with a
//! p-norm; [`set_distance_normalized`] divides that by the size of the union.
//! At `p = 1` they are the symmetric-difference and Jaccard distances, at
//! `p = inf` the unnormalized form is the bag distance.
//!
//! ```
//! use std::collections::HashSet;
//! use ontometric::{set_distance, PParam};
//!
//! let a: HashSet<u32> = [1, 2, 4].into();
//! let b: HashSet<u32> = [2, 3, 4, 5].into();
//! assert_eq!(set_distance(&a, &b, PParam::ONE).unwrap(), 3.0);
//! assert!((set_distance(&a, &b, PParam::TWO).unwrap() - 5f64.sqrt()).abs() < 1e-12);
//! ```
//!
//! The Maryland-bridge and Czekanowsky-Dice distances are provided as
//! baselines; neither satisfies the triangle inequality.

use std::collections::HashSet;
use std::hash::{BuildHasher, Hash};

use crate::error::{Error, Result};
use crate::param::PParam;

/// `(|A - B|, |B - A|)`.
pub fn asymmetric_differences<T, S>(a: &HashSet<T, S>, b: &HashSet<T, S>) -> (usize, usize)
where
    T: Eq + Hash,
    S: BuildHasher,
{
    let common = intersection_size(a, b);
    (a.len() - common, b.len() - common)
}

fn intersection_size<T: Eq + Hash, S: BuildHasher>(a: &HashSet<T, S>, b: &HashSet<T, S>) -> usize {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small.iter().filter(|x| large.contains(*x)).count()
}

pub fn set_distance<T, S>(a: &HashSet<T, S>, b: &HashSet<T, S>, p: PParam) -> Result<f64>
where
    T: Eq + Hash,
    S: BuildHasher,
{
    let p = p.validate()?;
    let (ab, ba) = asymmetric_differences(a, b);
    Ok(p.combine(ab as f64, ba as f64))
}

/// Normalized set distance in `[0, 1]`; zero when both sets are empty.
pub fn set_distance_normalized<T, S>(a: &HashSet<T, S>, b: &HashSet<T, S>, p: PParam) -> Result<f64>
where
    T: Eq + Hash,
    S: BuildHasher,
{
    let p = p.validate()?;
    let common = intersection_size(a, b);
    let union = a.len() + b.len() - common;
    if union == 0 {
        return Ok(0.0);
    }
    let num = p.combine((a.len() - common) as f64, (b.len() - common) as f64);
    Ok(num / union as f64)
}

/// One minus the mean of precision and recall; both sets must be non-empty.
pub fn maryland_bridge_distance<T, S>(a: &HashSet<T, S>, b: &HashSet<T, S>) -> Result<f64>
where
    T: Eq + Hash,
    S: BuildHasher,
{
    if a.is_empty() || b.is_empty() {
        return Err(Error::Domain(
            "Maryland bridge distance is undefined for empty sets".into(),
        ));
    }
    let common = intersection_size(a, b) as f64;
    Ok(1.0 - (0.5 * common / a.len() as f64 + 0.5 * common / b.len() as f64))
}

/// One minus the F-measure, `1 - 2|A ∩ B| / (|A| + |B|)`. Two empty sets are
/// at distance zero.
pub fn czekanowsky_dice_distance<T, S>(a: &HashSet<T, S>, b: &HashSet<T, S>) -> f64
where
    T: Eq + Hash,
    S: BuildHasher,
{
    let total = a.len() + b.len();
    if total == 0 {
        return 0.0;
    }
    1.0 - 2.0 * intersection_size(a, b) as f64 / total as f64
}

/// Minkowski distance of order `p` between two equal-length vectors.
pub fn minkowski_distance(x: &[f64], y: &[f64], p: PParam) -> Result<f64> {
    let p = p.validate()?;
    if x.len() != y.len() {
        return Err(Error::Domain(format!(
            "vector lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let diffs = x.iter().zip(y).map(|(a, b)| (a - b).abs());
    Ok(match p {
        PParam::Infinity => diffs.fold(0.0, f64::max),
        PParam::Finite(q) => diffs.map(|d| d.powf(q)).sum::<f64>().powf(1.0 / q),
    })
}

/// Indicator encoding of `set` over the universe `1..=n`.
pub fn binary_encoding(set: &HashSet<u32>, n: u32) -> Vec<f64> {
    (1..=n).map(|i| if set.contains(&i) { 1.0 } else { 0.0 }).collect()
}
