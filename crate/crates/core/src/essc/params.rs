//! The ten per-waveform statistics: segment statistics, amplitude
//! central moments, and time cumulants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::essc::extrema::SegmentSet;
use crate::signal::SampledSignal;

/// Segment statistics: means and mean absolute deviations of the
/// segment time spans and amplitude magnitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SscParams {
    pub m_t: f64,
    pub d_t: f64,
    pub m_a: f64,
    pub d_a: f64,
}

/// `M_A = sum(A_m)/N_M`, `M_T = sum(T_m)/N_M`,
/// `D_A = sum|A_m - M_A|/N_M`, `D_T = sum|T_m - M_T|/N_M`.
pub fn ssc_params(segments: &SegmentSet) -> Result<SscParams> {
    let n = segments.count();
    if n == 0 {
        return Err(Error::InvalidSignal("cannot compute segment statistics of 0 segments".into()));
    }
    let n = n as f64;
    let m_a = segments.amplitudes().iter().sum::<f64>() / n;
    let m_t = segments.durations().iter().sum::<f64>() / n;
    let d_a = segments.amplitudes().iter().map(|a| (a - m_a).abs()).sum::<f64>() / n;
    let d_t = segments.durations().iter().map(|t| (t - m_t).abs()).sum::<f64>() / n;
    Ok(SscParams { m_t, d_t, m_a, d_a })
}

/// How samples are weighted when accumulating time moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TimeWeight {
    /// `g_n = f(t_n) / sum|f|` — signed weights, the literal reading.
    #[default]
    Signed,
    /// `g_n = |f(t_n)| / sum|f|` — the non-negative PDF variant.
    Absolute,
}

/// First three time cumulants under the chosen weighting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeCumulants {
    /// c1: weighted mean time.
    pub m_t1: f64,
    /// c2: weighted time variance.
    pub d_t2: f64,
    /// c3: weighted third-order time cumulant.
    pub d_t3: f64,
}

/// Accumulate `<t^q> = sum g_n t_n^q` for q = 1..3 in one pass and
/// assemble the cumulants `c1 = <t>`, `c2 = <t^2> - <t>^2`,
/// `c3 = <t^3> - 3 <t><t^2> + 2 <t>^3`. The formulas are applied
/// verbatim even when the signed weights do not sum to 1.
pub fn time_cumulants(signal: &SampledSignal, weight: TimeWeight) -> Result<TimeCumulants> {
    let denom: f64 = signal.samples().iter().map(|v| v.abs()).sum();
    if denom == 0.0 {
        return Err(Error::InvalidSignal(
            "time cumulants are undefined for an all-zero signal".into(),
        ));
    }
    let (mut m1, mut m2, mut m3) = (0.0, 0.0, 0.0);
    for (n, &v) in signal.samples().iter().enumerate() {
        let g = match weight {
            TimeWeight::Signed => v / denom,
            TimeWeight::Absolute => v.abs() / denom,
        };
        let t = signal.time_at(n);
        m1 += g * t;
        m2 += g * t * t;
        m3 += g * t * t * t;
    }
    Ok(TimeCumulants {
        m_t1: m1,
        d_t2: m2 - m1 * m1,
        d_t3: m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1,
    })
}

/// Amplitude central moments with uniform 1/N weighting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeMoments {
    /// Mean amplitude.
    pub m_f1: f64,
    /// Amplitude variance.
    pub d_f2: f64,
    /// Third central amplitude moment.
    pub d_f3: f64,
}

pub fn amplitude_moments(signal: &SampledSignal) -> AmplitudeMoments {
    let n = signal.len() as f64;
    let mean = signal.samples().iter().sum::<f64>() / n;
    let (mut var, mut third) = (0.0, 0.0);
    for &v in signal.samples() {
        let d = v - mean;
        var += d * d;
        third += d * d * d;
    }
    AmplitudeMoments { m_f1: mean, d_f2: var / n, d_f3: third / n }
}
