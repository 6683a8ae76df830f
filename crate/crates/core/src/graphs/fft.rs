//! Iterative radix-2 Cooley–Tukey FFT and spectrum distances.

use num_complex::Complex64;

use crate::{Error, Result};

/// In-place forward DFT `X_k = Σ x_n e^{-2πi kn/N}`. The length must be a
/// power of two.
pub fn fft_in_place(buf: &mut [Complex64]) -> Result<()> {
    let n = buf.len();
    if n == 0 {
        return Err(Error::EmptySeries);
    }
    if !n.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "FFT length {n} is not a power of two"
        )));
    }
    let bits = n.trailing_zeros();
    if bits > 0 {
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if i < j {
                buf.swap(i, j);
            }
        }
    }
    let mut len = 2;
    while len <= n {
        let angle = -2.0 * std::f64::consts::PI / len as f64;
        let half = len / 2;
        // Twiddles computed directly per index to avoid accumulated rounding.
        let twiddles: Vec<Complex64> = (0..half)
            .map(|k| Complex64::from_polar(1.0, angle * k as f64))
            .collect();
        for chunk in buf.chunks_exact_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for k in 0..half {
                let t = twiddles[k] * hi[k];
                hi[k] = lo[k] - t;
                lo[k] += t;
            }
        }
        len <<= 1;
    }
    Ok(())
}

/// Zero-pads a real series to the next power of two and returns its DFT.
pub fn spectrum(series: &[f64]) -> Result<Vec<Complex64>> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    let n = series.len().next_power_of_two();
    let mut buf: Vec<Complex64> = series.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    buf.resize(n, Complex64::new(0.0, 0.0));
    fft_in_place(&mut buf)?;
    Ok(buf)
}

pub fn magnitude_spectrum(series: &[f64]) -> Result<Vec<f64>> {
    Ok(spectrum(series)?.iter().map(|c| c.norm()).collect())
}

/// Euclidean distance between the magnitude spectra of two equal-length
/// series. Phase is discarded, so circular shifts are at distance zero.
pub fn fft_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let (ma, mb) = (magnitude_spectrum(a)?, magnitude_spectrum(b)?);
    Ok(euclidean(&ma, &mb))
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
