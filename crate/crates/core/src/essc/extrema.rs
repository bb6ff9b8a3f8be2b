//! Extrema detection and the segment decomposition between consecutive
//! extrema.

use crate::error::{Error, Result};
use crate::signal::SampledSignal;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Max,
    Min,
}

/// Ordered local extrema of a signal, endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremaSequence {
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl ExtremaSequence {
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        false // detection always yields both endpoints
    }
}

/// Locate local extrema: interior maxima/minima at slope sign changes
/// (plateaus collapse to their midpoint sample), plus both endpoints as
/// boundary extrema. Consecutive entries alternate max/min; if two
/// same-kind neighbors ever arise the more extreme interior one is kept.
pub fn detect_extrema(signal: &SampledSignal) -> ExtremaSequence {
    let x = signal.samples();
    let n = x.len();

    // compress equal-value plateaus into runs of (start, end, value)
    let mut runs: Vec<(usize, usize, f64)> = Vec::new();
    for (i, &v) in x.iter().enumerate() {
        match runs.last_mut() {
            Some(r) if r.2 == v => r.1 = i,
            _ => runs.push((i, i, v)),
        }
    }

    if runs.len() == 1 {
        // constant signal: only the two endpoints, no interior structure
        return ExtremaSequence { indices: vec![0, n - 1], values: vec![x[0], x[n - 1]] };
    }

    // slope direction between consecutive runs is never zero
    let rising = |k: usize| runs[k + 1].2 > runs[k].2;
    let mut events: Vec<(usize, f64, Kind)> = Vec::new();
    events.push((0, x[0], if rising(0) { Kind::Min } else { Kind::Max }));
    for k in 1..runs.len() - 1 {
        let (was_rising, is_rising) = (rising(k - 1), rising(k));
        if was_rising != is_rising {
            let mid = (runs[k].0 + runs[k].1) / 2;
            events.push((mid, runs[k].2, if was_rising { Kind::Max } else { Kind::Min }));
        }
    }
    let last_kind = if rising(runs.len() - 2) { Kind::Max } else { Kind::Min };
    events.push((n - 1, x[n - 1], last_kind));

    // alternation is guaranteed by construction; this pass is defensive:
    // same-kind neighbors collapse to the more extreme one, but the two
    // endpoint entries are never dropped
    let mut kept: Vec<(usize, f64, Kind)> = Vec::with_capacity(events.len());
    for e in events {
        match kept.last() {
            Some(&(_, prev_value, prev_kind)) if prev_kind == e.2 => {
                let prev_is_first_endpoint = kept.len() == 1;
                if e.0 == n - 1 {
                    if !prev_is_first_endpoint {
                        kept.pop();
                    }
                    kept.push(e);
                } else if !prev_is_first_endpoint {
                    let more_extreme = match e.2 {
                        Kind::Max => e.1 > prev_value,
                        Kind::Min => e.1 < prev_value,
                    };
                    if more_extreme {
                        kept.pop();
                        kept.push(e);
                    }
                }
            }
            _ => kept.push(e),
        }
    }

    debug_assert!(kept.windows(2).all(|w| w[0].2 != w[1].2));
    let indices: Vec<usize> = kept.iter().map(|e| e.0).collect();
    let values: Vec<f64> = kept.iter().map(|e| e.1).collect();
    debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
    ExtremaSequence { indices, values }
}

/// The segments between consecutive extrema: amplitude magnitudes
/// `A_m = |v_m - v_{m-1}|` and time spans `T_m = t_m - t_{m-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSet {
    amplitudes: Vec<f64>,
    durations: Vec<f64>,
}

impl SegmentSet {
    /// Build a segment set from explicit amplitude/duration sequences.
    pub fn new(amplitudes: Vec<f64>, durations: Vec<f64>) -> Result<Self> {
        if amplitudes.is_empty() || amplitudes.len() != durations.len() {
            return Err(Error::InvalidSignal(format!(
                "segment set needs matching non-empty sequences, got {} amplitudes and {} durations",
                amplitudes.len(),
                durations.len()
            )));
        }
        if amplitudes.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::InvalidSignal("segment amplitudes must be non-negative".into()));
        }
        if durations.iter().any(|t| !t.is_finite() || *t <= 0.0) {
            return Err(Error::InvalidSignal("segment durations must be positive".into()));
        }
        Ok(Self { amplitudes, durations })
    }

    pub fn from_extrema(extrema: &ExtremaSequence, signal: &SampledSignal) -> Result<Self> {
        if extrema.len() < 2 {
            return Err(Error::InvalidSignal("need at least 2 extrema to form segments".into()));
        }
        let mut amplitudes = Vec::with_capacity(extrema.len() - 1);
        let mut durations = Vec::with_capacity(extrema.len() - 1);
        for m in 1..extrema.len() {
            amplitudes.push((extrema.values()[m] - extrema.values()[m - 1]).abs());
            durations
                .push(signal.time_at(extrema.indices()[m]) - signal.time_at(extrema.indices()[m - 1]));
        }
        Ok(Self { amplitudes, durations })
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn durations(&self) -> &[f64] {
        &self.durations
    }

    /// Segment count N_M.
    pub fn count(&self) -> usize {
        self.amplitudes.len()
    }
}
