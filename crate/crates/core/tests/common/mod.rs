//! Brute-force oracle checks shared by the `oracles` and `acceptance`
//! integration test targets.
//!
//! Every check generates `instances` random small inputs and compares a
//! production routine against an independent straight-line reference
//! implemented here with the most literal summation possible. Panics
//! with context on the first disagreement.

use essc_core::analysis::relieff_weights;
use essc_core::essc::{
    amplitude_moments, mean_filter, median_filter, ssc_params, time_cumulants, SegmentSet,
    TimeWeight,
};
use essc_core::rng::{derive_stream, StreamDomain};
use essc_core::signal::SampledSignal;
use essc_core::spectral::dft_forward;
use ndarray::Array2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex;

/// Mixed absolute/relative comparison: |a−b| ≤ tol·max(1, |b|).
fn close(got: f64, expected: f64, tol: f64) -> bool {
    (got - expected).abs() <= tol * expected.abs().max(1.0)
}

fn oracle_rng(lane: u32, index: u32) -> ChaCha8Rng {
    derive_stream(0x0AC1E, StreamDomain::Fixture, lane, index)
}

fn random_signal(rng: &mut ChaCha8Rng, max_len: usize) -> SampledSignal {
    let n = rng.random_range(2..=max_len);
    let samples: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    SampledSignal::new(samples, rng.random_range(0.1..10.0)).unwrap()
}

/// Amplitude central moments vs literal Eq.-style sums with `powi`.
pub fn check_amplitude_moments(instances: usize) {
    let mut rng = oracle_rng(1, 0);
    for i in 0..instances {
        let s = random_signal(&mut rng, 256);
        let n = s.len() as f64;
        let mean: f64 = s.samples().iter().fold(0.0, |acc, v| acc + v) / n;
        let var: f64 = s.samples().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let third: f64 = s.samples().iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;

        let got = amplitude_moments(&s);
        assert!(close(got.m_f1, mean, 1e-10), "instance {i}: M_f1 {} vs {mean}", got.m_f1);
        assert!(close(got.d_f2, var, 1e-10), "instance {i}: D_f2 {} vs {var}", got.d_f2);
        assert!(close(got.d_f3, third, 1e-10), "instance {i}: D_f3 {} vs {third}", got.d_f3);
    }
}

/// Time cumulants vs separate-pass weighted power sums.
pub fn check_time_cumulants(instances: usize) {
    let mut rng = oracle_rng(2, 0);
    for i in 0..instances {
        let signed = rng.random_range(0..2) == 0;
        let s = random_signal(&mut rng, 256);
        let denom: f64 = s.samples().iter().map(|v| v.abs()).sum();
        let weight = |v: f64| if signed { v / denom } else { v.abs() / denom };
        let moment = |q: i32| -> f64 {
            s.samples()
                .iter()
                .enumerate()
                .map(|(n, &v)| weight(v) * s.time_at(n).powi(q))
                .sum()
        };
        let (m1, m2, m3) = (moment(1), moment(2), moment(3));
        let c2 = m2 - m1 * m1;
        let c3 = m3 - 3.0 * m1 * m2 + 2.0 * m1.powi(3);

        let mode = if signed { TimeWeight::Signed } else { TimeWeight::Absolute };
        let got = time_cumulants(&s, mode).unwrap();
        assert!(close(got.m_t1, m1, 1e-10), "instance {i}: M_t1 {} vs {m1}", got.m_t1);
        assert!(close(got.d_t2, c2, 1e-10), "instance {i}: D_t2 {} vs {c2}", got.d_t2);
        assert!(close(got.d_t3, c3, 1e-10), "instance {i}: D_t3 {} vs {c3}", got.d_t3);
    }
}

/// Segment statistics vs direct means / mean absolute deviations.
pub fn check_ssc_params(instances: usize) {
    let mut rng = oracle_rng(3, 0);
    for i in 0..instances {
        let n = rng.random_range(1..=64);
        let amps: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..5.0)).collect();
        let durs: Vec<f64> = (0..n).map(|_| rng.random_range(1e-3..1.0)).collect();
        let m_a = amps.iter().sum::<f64>() / n as f64;
        let m_t = durs.iter().sum::<f64>() / n as f64;
        let d_a = amps.iter().map(|a| (a - m_a).abs()).sum::<f64>() / n as f64;
        let d_t = durs.iter().map(|t| (t - m_t).abs()).sum::<f64>() / n as f64;

        let set = SegmentSet::new(amps, durs).unwrap();
        let got = ssc_params(&set).unwrap();
        for (name, g, e) in
            [("M_A", got.m_a, m_a), ("M_T", got.m_t, m_t), ("D_A", got.d_a, d_a), ("D_T", got.d_t, d_t)]
        {
            assert!(close(g, e, 1e-10), "instance {i}: {name} {g} vs {e}");
        }
    }
}

/// Sliding-window median vs per-window sort.
pub fn check_median_filter(instances: usize) {
    let mut rng = oracle_rng(4, 0);
    for i in 0..instances {
        let s = random_signal(&mut rng, 128);
        let n = s.len();
        let window = 2 * rng.random_range(0..=(n - 1) / 2) + 1;
        let h = window / 2;
        let expected: Vec<f64> = (0..n)
            .map(|j| {
                let r = h.min(j).min(n - 1 - j);
                let mut w: Vec<f64> = s.samples()[j - r..=j + r].to_vec();
                w.sort_by(|a, b| a.total_cmp(b));
                w[w.len() / 2]
            })
            .collect();
        let got = median_filter(&s, window).unwrap();
        for (j, (g, e)) in got.samples().iter().zip(&expected).enumerate() {
            assert!(close(*g, *e, 1e-10), "instance {i}, sample {j}, window {window}: {g} vs {e}");
        }
    }
}

/// Sliding-window mean vs direct per-window averaging.
pub fn check_mean_filter(instances: usize) {
    let mut rng = oracle_rng(5, 0);
    for i in 0..instances {
        let s = random_signal(&mut rng, 128);
        let n = s.len();
        let window = 2 * rng.random_range(0..=(n - 1) / 2) + 1;
        let h = window / 2;
        let expected: Vec<f64> = (0..n)
            .map(|j| {
                let r = h.min(j).min(n - 1 - j);
                s.samples()[j - r..=j + r].iter().sum::<f64>() / (2 * r + 1) as f64
            })
            .collect();
        let got = mean_filter(&s, window).unwrap();
        for (j, (g, e)) in got.samples().iter().zip(&expected).enumerate() {
            assert!(close(*g, *e, 1e-10), "instance {i}, sample {j}, window {window}: {g} vs {e}");
        }
    }
}

/// FFT-backed forward transform vs the naive O(N^2) summation.
pub fn check_dft(instances: usize) {
    let mut rng = oracle_rng(6, 0);
    for i in 0..instances {
        let s = random_signal(&mut rng, 64);
        let n = s.len();
        let scale: f64 = s.samples().iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        let spectrum = dft_forward(&s);
        assert!((spectrum.dnu() - 1.0 / (n as f64 * s.dt())).abs() < 1e-12);
        for k in 0..n {
            let mut expected = Complex::new(0.0, 0.0);
            for (j, &v) in s.samples().iter().enumerate() {
                let phase = -2.0 * std::f64::consts::PI * (k * j) as f64 / n as f64;
                expected += Complex::new(v * phase.cos(), v * phase.sin());
            }
            let got = spectrum.bins()[k];
            assert!(
                (got - expected).norm() <= 1e-9 * scale,
                "instance {i}, bin {k}: {got} vs {expected}"
            );
        }
    }
}

/// Production ReliefF (pre-scaled columns, partial selection, parallel
/// accumulation) vs a quadratic-time reference with full distance
/// matrices and full sorts on raw features.
pub fn check_relieff(instances: usize) {
    let mut rng = oracle_rng(7, 0);
    for i in 0..instances {
        let classes = rng.random_range(2..=4usize);
        let k = rng.random_range(1..=3usize);
        let d = rng.random_range(1..=6usize);
        // at least k+1 instances per class
        let counts: Vec<usize> =
            (0..classes).map(|_| rng.random_range(k + 1..=k + 6)).collect();
        let m: usize = counts.iter().sum();
        let mut labels = Vec::with_capacity(m);
        for (c, &count) in counts.iter().enumerate() {
            labels.extend(std::iter::repeat_n((c + 1) as u8, count));
        }
        let x = Array2::from_shape_fn((m, d), |_| rng.random_range(-2.0..2.0));

        let expected = relieff_reference(&x, &labels, k);
        let got = relieff_weights(x.view(), &labels, k).unwrap();
        for (a, (g, e)) in got.iter().zip(&expected).enumerate() {
            assert!(close(*g, *e, 1e-10), "instance {i}, feature {a}: {g} vs {e}");
        }
    }
}

fn relieff_reference(x: &Array2<f64>, labels: &[u8], k: usize) -> Vec<f64> {
    let (m, d) = x.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for row in x.rows() {
        for (a, &v) in row.iter().enumerate() {
            lo[a] = lo[a].min(v);
            hi[a] = hi[a].max(v);
        }
    }
    let diff = |a: usize, i: usize, j: usize| -> f64 {
        let range = hi[a] - lo[a];
        if range == 0.0 {
            0.0
        } else {
            (x[(i, a)] - x[(j, a)]).abs() / range
        }
    };
    let dist =
        |i: usize, j: usize| -> f64 { (0..d).map(|a| diff(a, i, j)).sum() };

    let mut class_ids: Vec<u8> = labels.to_vec();
    class_ids.sort_unstable();
    class_ids.dedup();
    let prior = |c: u8| labels.iter().filter(|&&l| l == c).count() as f64 / m as f64;

    let mut weights = vec![0.0; d];
    for i in 0..m {
        for &c in &class_ids {
            let mut members: Vec<usize> =
                (0..m).filter(|&j| j != i && labels[j] == c).collect();
            members.sort_by(|&a, &b| dist(i, a).total_cmp(&dist(i, b)).then(a.cmp(&b)));
            let factor = if c == labels[i] {
                -1.0
            } else {
                prior(c) / (1.0 - prior(labels[i]))
            };
            for &j in &members[..k] {
                for (a, w) in weights.iter_mut().enumerate() {
                    *w += factor * diff(a, i, j);
                }
            }
        }
    }
    weights.iter().map(|w| w / (m * k) as f64).collect()
}
