//! Pulse cleanup: spike removal, smoothing, DC correction, and pulse
//! detection with time/amplitude normalization.
//!
//! Both windowed filters use centered windows that shrink symmetrically
//! near the edges (radius `min(h, i, N-1-i)` for half-width `h`), so no
//! fabricated samples are introduced and the window sample count stays
//! odd everywhere.

use crate::error::{Error, Result};
use crate::signal::SampledSignal;

fn validate_window(window: usize, len: usize) -> Result<()> {
    if window == 0 {
        return Err(Error::Parameter("filter window must be at least 1".into()));
    }
    if window % 2 == 0 {
        return Err(Error::Parameter(format!(
            "filter window must be odd for a centered filter, got {window}"
        )));
    }
    if window > len {
        return Err(Error::Parameter(format!(
            "filter window {window} exceeds signal length {len}"
        )));
    }
    Ok(())
}

fn insert_sorted(sorted: &mut Vec<f64>, v: f64) {
    let pos = sorted.partition_point(|x| x.total_cmp(&v).is_lt());
    sorted.insert(pos, v);
}

fn remove_sorted(sorted: &mut Vec<f64>, v: f64) {
    let pos = sorted
        .binary_search_by(|x| x.total_cmp(&v))
        .expect("window bookkeeping lost a sample");
    sorted.remove(pos);
}

/// Windowed median with symmetric shrinking at the edges, computed with
/// a sliding sorted window (O(window) work per sample).
pub fn median_filter(signal: &SampledSignal, window: usize) -> Result<SampledSignal> {
    let x = signal.samples();
    let n = x.len();
    validate_window(window, n)?;
    if window == 1 {
        return Ok(signal.clone());
    }
    let h = window / 2;
    let radius = |i: usize| h.min(i).min(n - 1 - i);
    let mut sorted = vec![x[0]];
    let (mut lo, mut hi) = (0usize, 0usize);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (tlo, thi) = (i - radius(i), i + radius(i));
        // both window bounds are non-decreasing in i
        while hi < thi {
            hi += 1;
            insert_sorted(&mut sorted, x[hi]);
        }
        while lo < tlo {
            remove_sorted(&mut sorted, x[lo]);
            lo += 1;
        }
        debug_assert_eq!(sorted.len() % 2, 1);
        out.push(sorted[sorted.len() / 2]);
    }
    SampledSignal::new(out, signal.duration())
}

/// Windowed arithmetic mean with the same symmetric edge shrinking,
/// via compensated prefix sums.
pub fn mean_filter(signal: &SampledSignal, window: usize) -> Result<SampledSignal> {
    let x = signal.samples();
    let n = x.len();
    validate_window(window, n)?;
    if window == 1 {
        return Ok(signal.clone());
    }
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    let (mut sum, mut c) = (0.0, 0.0);
    for &v in x {
        // Kahan compensation keeps prefix differences accurate for long signals
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
        prefix.push(sum);
    }
    let h = window / 2;
    let out = (0..n)
        .map(|i| {
            let r = h.min(i).min(n - 1 - i);
            (prefix[i + r + 1] - prefix[i - r]) / (2 * r + 1) as f64
        })
        .collect();
    SampledSignal::new(out, signal.duration())
}

/// Remove the DC level estimated as the mean of the first and last
/// `edge_window` samples pooled together.
pub fn offset_correction(signal: &SampledSignal, edge_window: usize) -> Result<SampledSignal> {
    let x = signal.samples();
    if edge_window == 0 {
        return Err(Error::Parameter("edge window must be at least 1".into()));
    }
    if 2 * edge_window > x.len() {
        return Err(Error::Parameter(format!(
            "edge windows of {edge_window} overlap on a signal of length {}",
            x.len()
        )));
    }
    let head: f64 = x[..edge_window].iter().sum();
    let tail: f64 = x[x.len() - edge_window..].iter().sum();
    let level = (head + tail) / (2 * edge_window) as f64;
    let out = x.iter().map(|v| v - level).collect();
    SampledSignal::new(out, signal.duration())
}

/// Crop the signal to the samples where `|f| >= threshold_frac * max|f|`,
/// remap the cropped time axis affinely to `[0, 1]`, and scale amplitudes
/// so the peak magnitude is exactly 1.
pub fn detect_and_normalize(signal: &SampledSignal, threshold_frac: f64) -> Result<SampledSignal> {
    if !threshold_frac.is_finite() || !(0.0..1.0).contains(&threshold_frac) {
        return Err(Error::Parameter(format!(
            "detection threshold must be in [0, 1), got {threshold_frac}"
        )));
    }
    let peak = signal.max_abs();
    if peak == 0.0 {
        return Err(Error::NoPulse("signal is identically zero".into()));
    }
    let thr = threshold_frac * peak;
    let x = signal.samples();
    let first = x.iter().position(|v| v.abs() >= thr).expect("peak exceeds threshold");
    let last = x.iter().rposition(|v| v.abs() >= thr).expect("peak exceeds threshold");
    if last == first {
        return Err(Error::NoPulse("pulse support is a single sample".into()));
    }
    let out = x[first..=last].iter().map(|v| v / peak).collect();
    SampledSignal::new(out, 1.0)
}
