#!/usr/bin/env python3
"""Regenerate the golden reference files in this directory.

Straight-line reference implementation, independent of the Rust crate:
every computation below is written directly from the published formulas
(windowed median/mean, pooled-edge offset correction, threshold crop,
extrema segmentation, segment statistics, amplitude central moments,
time cumulants) with no shared code. Outputs:

  filter_gains.csv      gain curves of the six distinct deformation
                        profiles on a fixed frequency grid
  fixture_waveform.csv  a deterministic synthetic "acquired" pulse
  fixture_features.csv  the 30-parameter fingerprint of that pulse

Floats are written with repr(), which round-trips exactly.
"""

import math
import os

HERE = os.path.dirname(os.path.abspath(__file__))


# --- deformation filter gains -------------------------------------------

def lowpass_gain(nu, nu_c, slew):
    nu = abs(nu)
    return 0.5 * (math.tanh(slew * (nu + nu_c)) - math.tanh(slew * (nu - nu_c)))


def gaussian_sum(nu, nu_c, sigma):
    a = (nu + nu_c) / sigma
    b = (nu - nu_c) / sigma
    return math.exp(-0.5 * a * a) + math.exp(-0.5 * b * b)


def gaussian_sum_peak(nu_c, sigma):
    """max of gaussian_sum over nu >= 0 (the function is even and decays
    beyond nu_c, so the maximum lies in [0, nu_c]): dense scan plus
    golden-section refinement."""
    if nu_c == 0.0:
        return 2.0
    steps = 20000
    xs = [nu_c * i / steps for i in range(steps + 1)]
    best_i = max(range(len(xs)), key=lambda i: gaussian_sum(xs[i], nu_c, sigma))
    lo = xs[max(best_i - 1, 0)]
    hi = xs[min(best_i + 1, steps)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    while hi - lo > 1e-14:
        m1 = hi - invphi * (hi - lo)
        m2 = lo + invphi * (hi - lo)
        if gaussian_sum(m1, nu_c, sigma) < gaussian_sum(m2, nu_c, sigma):
            lo = m1
        else:
            hi = m2
    return max(gaussian_sum(xs[best_i], nu_c, sigma),
               gaussian_sum(0.5 * (lo + hi), nu_c, sigma))


def write_filter_gains(path):
    filters = [
        ("gstop_nu0", lambda nu: 1.0 - 0.4 / gaussian_sum_peak(0.0, 2.0) * gaussian_sum(abs(nu), 0.0, 2.0)),
        ("gstop_nu3", lambda nu: 1.0 - 0.4 / gaussian_sum_peak(3.0, 2.0) * gaussian_sum(abs(nu), 3.0, 2.0)),
        ("lp_nu2", lambda nu: lowpass_gain(nu, 2.0, 0.5)),
        ("lp_nu3", lambda nu: lowpass_gain(nu, 3.0, 0.5)),
        ("lp_nu4", lambda nu: lowpass_gain(nu, 4.0, 0.5)),
        ("lp_nu5", lambda nu: lowpass_gain(nu, 5.0, 0.5)),
    ]
    with open(path, "w") as f:
        f.write("label,nu,gain\n")
        for label, gain in filters:
            for i in range(401):
                nu = -10.0 + 0.05 * i
                f.write(f"{label},{nu!r},{gain(nu)!r}\n")


# --- fixture waveform -----------------------------------------------------

FIXTURE_LEN = 3001


def fixture_waveform():
    """Deterministic pulse with an offset, a slow ripple, and three spikes,
    so the cleanup stages all have work to do."""
    x = []
    for i in range(FIXTURE_LEN):
        t = i / (FIXTURE_LEN - 1)
        envelope = math.exp(-((t - 0.45) / 0.11) ** 2)
        carrier = math.sin(2.0 * math.pi * 4.5 * t + 0.7) \
            + 0.35 * math.sin(2.0 * math.pi * 9.5 * t)
        ripple = 0.01 * math.sin(2.0 * math.pi * 1.3 * t)
        x.append(envelope * carrier + 0.04 + ripple)
    x[700] += 0.8
    x[1400] -= 0.6
    x[2200] += 0.5
    return x


# --- cleanup pipeline -----------------------------------------------------

def shrunken_radius(i, n, window):
    return min(window // 2, i, n - 1 - i)


def median_filter(x, window):
    n = len(x)
    out = []
    for i in range(n):
        r = shrunken_radius(i, n, window)
        w = sorted(x[i - r:i + r + 1])
        out.append(w[len(w) // 2])
    return out


def mean_filter(x, window):
    n = len(x)
    out = []
    for i in range(n):
        r = shrunken_radius(i, n, window)
        w = x[i - r:i + r + 1]
        out.append(math.fsum(w) / len(w))
    return out


def offset_correction(x, edge_window):
    pooled = x[:edge_window] + x[-edge_window:]
    level = math.fsum(pooled) / len(pooled)
    return [v - level for v in x]


def detect_and_normalize(x, threshold_frac):
    peak = max(abs(v) for v in x)
    thr = threshold_frac * peak
    first = next(i for i, v in enumerate(x) if abs(v) >= thr)
    last = next(i for i in range(len(x) - 1, -1, -1) if abs(x[i]) >= thr)
    return [v / peak for v in x[first:last + 1]]


# --- extrema and segments -------------------------------------------------

def detect_extrema(x):
    """Alternating local extrema with plateaus collapsed to their midpoint
    sample and both endpoints included. Returns (indices, values)."""
    n = len(x)
    runs = []  # (start, end, value) of equal-value plateaus
    for i, v in enumerate(x):
        if runs and runs[-1][2] == v:
            runs[-1] = (runs[-1][0], i, v)
        else:
            runs.append((i, i, v))
    if len(runs) == 1:
        return [0, n - 1], [x[0], x[-1]]

    def rising(k):
        return runs[k + 1][2] > runs[k][2]

    indices = [0]
    values = [x[0]]
    for k in range(1, len(runs) - 1):
        if rising(k - 1) != rising(k):
            mid = (runs[k][0] + runs[k][1]) // 2
            indices.append(mid)
            values.append(runs[k][2])
    indices.append(n - 1)
    values.append(x[-1])
    return indices, values


def segments(indices, values, n):
    """Amplitude magnitudes and durations between consecutive extrema on
    a [0, 1] time axis with n samples."""
    amps, durs = [], []
    for m in range(1, len(indices)):
        amps.append(abs(values[m] - values[m - 1]))
        durs.append((indices[m] - indices[m - 1]) / (n - 1))
    return amps, durs


# --- the ten statistics ---------------------------------------------------

def ssc_params(amps, durs):
    n = len(amps)
    m_a = math.fsum(amps) / n
    m_t = math.fsum(durs) / n
    d_a = math.fsum(abs(a - m_a) for a in amps) / n
    d_t = math.fsum(abs(t - m_t) for t in durs) / n
    return m_t, d_t, m_a, d_a


def amplitude_moments(x):
    n = len(x)
    mean = math.fsum(x) / n
    var = math.fsum((v - mean) ** 2 for v in x) / n
    third = math.fsum((v - mean) ** 3 for v in x) / n
    return mean, var, third


def time_cumulants(x):
    denom = math.fsum(abs(v) for v in x)
    n = len(x)
    m1 = math.fsum(v / denom * (i / (n - 1)) for i, v in enumerate(x))
    m2 = math.fsum(v / denom * (i / (n - 1)) ** 2 for i, v in enumerate(x))
    m3 = math.fsum(v / denom * (i / (n - 1)) ** 3 for i, v in enumerate(x))
    return m1, m2 - m1 * m1, m3 - 3.0 * m1 * m2 + 2.0 * m1 ** 3


def branch_params(x):
    indices, values = detect_extrema(x)
    amps, durs = segments(indices, values, len(x))
    m_t, d_t, m_a, d_a = ssc_params(amps, durs)
    m_f1, d_f2, d_f3 = amplitude_moments(x)
    m_t1, d_t2, d_t3 = time_cumulants(x)
    return [m_t, d_t, m_a, d_a, m_f1, d_f2, d_f3, m_t1, d_t2, d_t3]


# --- derivative / integral branches ----------------------------------------

def derivative(x):
    return [x[i + 1] - x[i] for i in range(len(x) - 1)] + [0.0]


def integral(x):
    out, acc = [], 0.0
    for v in x:
        acc += v
        out.append(acc)
    return out


def normalize_peak(x):
    peak = max(abs(v) for v in x)
    return [v / peak for v in x]


def extract_features(raw):
    s = median_filter(raw, 41)
    s = mean_filter(s, 101)
    s = offset_correction(s, 100)
    s = detect_and_normalize(s, 0.03)

    sig = branch_params(s)
    der = branch_params(normalize_peak(median_filter(derivative(s), 21)))
    acc = branch_params(normalize_peak(integral(s)))
    return sig + der + acc


FEATURE_NAMES = [
    f"{src}_{p}"
    for src in ("sig", "der", "int")
    for p in ("MT", "DT", "MA", "DA", "Mf1", "Df2", "Df3", "Mt1", "Dt2", "Dt3")
]


def main():
    write_filter_gains(os.path.join(HERE, "filter_gains.csv"))

    raw = fixture_waveform()
    with open(os.path.join(HERE, "fixture_waveform.csv"), "w") as f:
        for v in raw:
            f.write(f"{v!r}\n")

    features = extract_features(raw)
    with open(os.path.join(HERE, "fixture_features.csv"), "w") as f:
        f.write("name,value\n")
        for name, value in zip(FEATURE_NAMES, features):
            f.write(f"{name},{value!r}\n")
    print(f"wrote {len(features)} features, {len(raw)} waveform samples")


if __name__ == "__main__":
    main()
