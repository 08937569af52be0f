use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{DiagnosticsError, Result};

fn pairs(n: u64) -> i128 {
    (n as i128) * (n as i128 - 1) / 2
}

/// Hubert-Arabie adjusted Rand index between two labelings.
///
/// Computed from integer pair counts, so relabeling either partition gives
/// bit-identical results. When the index is undefined (both partitions
/// trivial in the same way, including `n = 1`) the result is 1.0.
pub fn adjusted_rand_index<A: Hash + Eq, B: Hash + Eq>(a: &[A], b: &[B]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(DiagnosticsError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(DiagnosticsError::Empty("partition"));
    }
    let mut joint: HashMap<(&A, &B), u64> = HashMap::new();
    let mut rows: HashMap<&A, u64> = HashMap::new();
    let mut cols: HashMap<&B, u64> = HashMap::new();
    for (x, y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let index: i128 = joint.values().map(|&c| pairs(c)).sum();
    let sa: i128 = rows.values().map(|&c| pairs(c)).sum();
    let sb: i128 = cols.values().map(|&c| pairs(c)).sum();
    let total = pairs(a.len() as u64);
    // (index - sa sb / total) / ((sa + sb) / 2 - sa sb / total), scaled by 2 total
    let num = 2 * (index * total - sa * sb);
    let den = (sa + sb) * total - 2 * sa * sb;
    if den == 0 {
        return Ok(1.0);
    }
    Ok(num as f64 / den as f64)
}

/// ARI between consecutive entries of a sequence of labelings.
pub fn ari_series<T: Hash + Eq>(labelings: &[Vec<T>]) -> Result<Vec<f64>> {
    labelings
        .windows(2)
        .map(|w| adjusted_rand_index(&w[0], &w[1]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_cases() {
        assert_eq!(adjusted_rand_index(&[1, 1, 2, 2], &[1, 1, 2, 2]).unwrap(), 1.0);
        assert_eq!(adjusted_rand_index(&[1, 1, 2, 2], &[1, 2, 1, 2]).unwrap(), -0.5);
        assert_eq!(adjusted_rand_index(&[7], &[3]).unwrap(), 1.0);
        assert!(adjusted_rand_index(&[1, 2], &[1]).is_err());
    }

    #[test]
    fn series_has_one_fewer_entry() {
        let s = ari_series(&[vec![0, 0, 1], vec![1, 1, 0], vec![0, 1, 2]]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0], 1.0);
    }
}
