//! Dynamic time warping with absolute-difference local cost.

use crate::{Error, Result};

/// Full, unconstrained DTW distance. Runs in `O(len(a) · len(b))` time with
/// two rolling rows of memory.
pub fn dtw_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySeries);
    }
    // Keep the shorter series along the row for the smaller buffer.
    let (rows, cols) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let m = cols.len();
    let mut prev = vec![f64::INFINITY; m + 1];
    let mut curr = vec![f64::INFINITY; m + 1];
    prev[0] = 0.0;
    for &x in rows {
        curr[0] = f64::INFINITY;
        for j in 1..=m {
            let best = prev[j - 1].min(prev[j]).min(curr[j - 1]);
            curr[j] = (x - cols[j - 1]).abs() + best;
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    Ok(prev[m])
}

const LANES: usize = 8;

#[inline(always)]
fn min2(a: f64, b: f64) -> f64 {
    if a < b {
        a
    } else {
        b
    }
}

/// DTW from `a` to every series in `others`, which must share one length.
/// Eight recurrences run interleaved so their dependency chains overlap;
/// results equal [`dtw_distance`] exactly.
pub fn dtw_batch(a: &[f64], others: &[&[f64]]) -> Result<Vec<f64>> {
    if a.is_empty() || others.iter().any(|b| b.is_empty()) {
        return Err(Error::EmptySeries);
    }
    let Some(m) = others.first().map(|b| b.len()) else {
        return Ok(Vec::new());
    };
    if let Some(b) = others.iter().find(|b| b.len() != m) {
        return Err(Error::LengthMismatch(m, b.len()));
    }
    let mut out = Vec::with_capacity(others.len());
    let mut cols = vec![[0.0; LANES]; m];
    let mut prev = vec![[f64::INFINITY; LANES]; m + 1];
    let mut curr = vec![[f64::INFINITY; LANES]; m + 1];
    for group in others.chunks(LANES) {
        for (j, c) in cols.iter_mut().enumerate() {
            for l in 0..LANES {
                c[l] = group[l.min(group.len() - 1)][j];
            }
        }
        prev.fill([f64::INFINITY; LANES]);
        prev[0] = [0.0; LANES];
        for &x in a {
            let mut left = [f64::INFINITY; LANES];
            let mut diag = prev[0];
            curr[0] = left;
            for ((c, up), dst) in cols.iter().zip(&prev[1..]).zip(&mut curr[1..]) {
                let mut cell = [0.0; LANES];
                for l in 0..LANES {
                    cell[l] = (x - c[l]).abs() + min2(min2(diag[l], up[l]), left[l]);
                }
                diag = *up;
                left = cell;
                *dst = cell;
            }
            std::mem::swap(&mut prev, &mut curr);
        }
        out.extend(prev[m][..group.len()].iter().copied());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identical_series() {
        assert_eq!(
            dtw_distance(&[0.0, 1.0, 2.0], &[0.0, 1.0, 2.0]).unwrap(),
            0.0
        );
    }

    #[test]
    fn constant_offset() {
        assert_eq!(dtw_distance(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 2.0);
    }

    #[test]
    fn alternating_series() {
        assert_eq!(
            dtw_distance(&[1.0, 0.0, 1.0, 0.0], &[0.0, 1.0, 0.0, 1.0]).unwrap(),
            2.0
        );
    }

    #[test]
    fn empty_is_error() {
        assert!(dtw_distance(&[], &[1.0]).is_err());
        assert!(dtw_distance(&[1.0], &[]).is_err());
    }

    #[test]
    fn batch_matches_scalar() {
        let a = [3.0, 1.0, 4.0, 1.0, 5.0];
        let bs: Vec<Vec<f64>> = (0..11)
            .map(|k| (0..4).map(|j| ((k * 7 + j * 3) % 5) as f64).collect())
            .collect();
        let refs: Vec<&[f64]> = bs.iter().map(|b| b.as_slice()).collect();
        let batch = dtw_batch(&a, &refs).unwrap();
        for (b, d) in bs.iter().zip(&batch) {
            assert_eq!(*d, dtw_distance(&a, b).unwrap());
        }
        assert!(dtw_batch(&a, &[&[1.0], &[1.0, 2.0]]).is_err());
        assert!(dtw_batch(&a, &[]).unwrap().is_empty());
    }

    proptest! {
        #[test]
        fn symmetric_and_nonnegative(
            a in proptest::collection::vec(-10.0f64..10.0, 1..20),
            b in proptest::collection::vec(-10.0f64..10.0, 1..20),
        ) {
            let ab = dtw_distance(&a, &b).unwrap();
            let ba = dtw_distance(&b, &a).unwrap();
            prop_assert!(ab >= 0.0);
            prop_assert!((ab - ba).abs() < 1e-9);
            prop_assert_eq!(dtw_distance(&a, &a).unwrap(), 0.0);
        }
    }
}
