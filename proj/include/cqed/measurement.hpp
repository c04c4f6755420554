#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "cqed/fft.hpp"
#include "cqed/params.hpp"
#include "cqed/sensitivity.hpp"

namespace cqed {

// ---------------------------------------------------------------------------
// Test coil
// ---------------------------------------------------------------------------

struct CoilSpec {
    double turns = 400.0;
    double radius_m = 0.07;
    double distance_m = 0.22;
    double current_a = 0.043;
};

/// On-axis field of a current loop at distance d: mu0 N I r^2 / (2 (d^2+r^2)^{3/2}).
inline double coil_field(const CoilSpec& c) {
    if (!(c.turns > 0.0) || !(c.radius_m > 0.0) || c.distance_m < 0.0)
        throw ValidationError("coil_field: inputs must be positive");
    double r2 = c.radius_m * c.radius_m;
    double d2 = c.distance_m * c.distance_m;
    return constants.mu_0 * c.turns * c.current_a * r2 / (2.0 * std::pow(d2 + r2, 1.5));
}

// ---------------------------------------------------------------------------
// Traces and Welch PSD
// ---------------------------------------------------------------------------

struct TimeTrace {
    double fs = 200e3;             // Hz ("digitized using a sampling rate of 200 kS/s")
    std::vector<double> samples;   // V
    double duration() const { return samples.size() / fs; }
};

enum class Window { Hann, Rectangular };

inline std::vector<double> make_window(Window w, std::size_t n) {
    std::vector<double> win(n, 1.0);
    if (w == Window::Hann)
        for (std::size_t i = 0; i < n; ++i)
            win[i] = 0.5 * (1.0 - std::cos(two_pi * double(i) / double(n - 1)));
    return win;
}

struct Psd {
    std::vector<double> f;     // Hz, single-sided
    std::vector<double> p;     // V^2/Hz
    std::size_t segments = 0;

    double df() const { return f.size() > 1 ? f[1] - f[0] : 0.0; }
    /// trapezoid-free total power: sum p * df (bins already carry the edge factors)
    double integrated_power() const {
        double s = 0.0;
        for (double v : p) s += v;
        return s * df();
    }
};

/// Averaged modified periodograms, single-sided, normalized so white noise of
/// variance sigma^2 integrates to sigma^2 and a sinusoid of amplitude a to a^2/2.
inline Psd welch_psd(const TimeTrace& trace, std::size_t segment_len, double overlap = 0.5,
                     Window window = Window::Hann) {
    std::size_t n = trace.samples.size();
    if (segment_len < 2 || segment_len > n)
        throw ValidationError("welch_psd: segment length must be in [2, len(trace)]");
    if (!(overlap >= 0.0 && overlap < 1.0))
        throw ValidationError("welch_psd: overlap must be in [0, 1)");
    std::size_t noverlap = static_cast<std::size_t>(overlap * segment_len);
    std::size_t step = segment_len - noverlap;
    auto win = make_window(window, segment_len);
    double w2 = 0.0;
    for (double w : win) w2 += w * w;

    std::size_t nf = segment_len / 2 + 1;
    Psd out;
    out.f.resize(nf);
    out.p.assign(nf, 0.0);
    for (std::size_t k = 0; k < nf; ++k) out.f[k] = trace.fs * double(k) / double(segment_len);

    std::vector<std::complex<double>> buf(segment_len);
    for (std::size_t start = 0; start + segment_len <= n; start += step) {
        for (std::size_t i = 0; i < segment_len; ++i)
            buf[i] = trace.samples[start + i] * win[i];
        fft(buf);
        for (std::size_t k = 0; k < nf; ++k) {
            double scale = (k == 0 || 2 * k == segment_len) ? 1.0 : 2.0;
            out.p[k] += scale * std::norm(buf[k]) / (trace.fs * w2);
        }
        ++out.segments;
    }
    if (out.segments == 0) throw ValidationError("welch_psd: trace shorter than one segment");
    for (auto& v : out.p) v /= double(out.segments);
    return out;
}

// ---------------------------------------------------------------------------
// Trace synthesis
// ---------------------------------------------------------------------------

namespace detail {

/// Deterministic Gaussian stream (Box-Muller over mt19937_64) so traces are
/// byte-identical across platforms for a fixed seed.
class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : eng_(seed) {}
    double normal() {
        if (have_) {
            have_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        have_ = true;
        spare_ = r * std::sin(two_pi * u2);
        return r * std::cos(two_pi * u2);
    }

private:
    double uniform() {  // (0, 1)
        return (double(eng_() >> 11) + 0.5) * 0x1.0p-53;
    }
    std::mt19937_64 eng_;
    bool have_ = false;
    double spare_ = 0.0;
};

/// One block of Gaussian noise with single-sided PSD l_of_f, via Hermitian
/// frequency-domain synthesis. Strictly real by construction.
inline std::vector<double> colored_noise_block(const std::function<double(double)>& l_of_f,
                                               double fs, std::size_t n, GaussianRng& rng) {
    std::vector<std::complex<double>> spec(n, 0.0);
    double df = fs / double(n);
    std::size_t half = n / 2;
    spec[0] = rng.normal() * std::sqrt(std::max(l_of_f(df), 0.0) * fs * double(n));
    for (std::size_t k = 1; k < half; ++k) {
        double amp = std::sqrt(std::max(l_of_f(k * df), 0.0) * fs * double(n) / 2.0);
        double gr = rng.normal(), gi = rng.normal();
        spec[k] = amp * std::complex<double>(gr, gi) / std::sqrt(2.0);
        spec[n - k] = std::conj(spec[k]);
    }
    spec[half] = rng.normal() * std::sqrt(std::max(l_of_f(half * df), 0.0) * fs * double(n));
    fft(spec, true);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = spec[i].real();
    return out;
}

} // namespace detail

struct SynthesisOptions {
    std::size_t block_len = std::size_t(1) << 21;  // noise synthesized in stationary blocks
};

/// Detector-voltage trace: S * A * B(t) plus colored Gaussian noise shaped to
/// the single-sided voltage PSD l_of_f. Reproducible for a fixed seed.
inline TimeTrace synthesize_trace(double s_v_per_hz, const std::function<double(double)>& b_of_t,
                                  const std::function<double(double)>& l_of_f, double fs,
                                  double duration_s, std::uint64_t seed,
                                  const FieldConversion& conv = {},
                                  const SynthesisOptions& opt = {}) {
    if (!(fs > 0.0) || !(duration_s > 0.0))
        throw ValidationError("synthesize_trace: fs and duration must be positive");
    std::size_t n = static_cast<std::size_t>(std::llround(fs * duration_s));
    TimeTrace trace;
    trace.fs = fs;
    trace.samples.resize(n);
    detail::GaussianRng rng(seed);
    std::size_t block = opt.block_len;
    while (block > 2 && block / 2 >= n) block /= 2;
    std::size_t written = 0;
    while (written < n) {
        auto noise = detail::colored_noise_block(l_of_f, fs, block, rng);
        std::size_t take = std::min(block, n - written);
        for (std::size_t i = 0; i < take; ++i) trace.samples[written + i] = noise[i];
        written += take;
    }
    for (std::size_t i = 0; i < n; ++i) {
        double t = double(i) / fs;
        trace.samples[i] += s_v_per_hz * field_to_frequency(b_of_t(t), conv);
    }
    return trace;
}

// ---------------------------------------------------------------------------
// Field recovery
// ---------------------------------------------------------------------------

struct RecoveryResult {
    double b_tesla = 0.0;
    double snr = 0.0;
    bool low_snr = false;   // SNR < 3
    Psd psd;
};

/// Amplitude of a known-frequency test field from the Welch PSD: integrate the
/// spectral peak, a = sqrt(2 * sum P df), then invert the S * A chain.
inline RecoveryResult recover_field(const TimeTrace& trace, double s_v_per_hz, double f_signal,
                                    std::size_t segment_len = 0, const FieldConversion& conv = {}) {
    if (!(s_v_per_hz > 0.0)) throw ValidationError("recover_field: S must be positive");
    std::size_t n = trace.samples.size();
    if (segment_len == 0) {
        segment_len = 1;
        while (segment_len * 2 <= n / 8) segment_len *= 2;   // >= ~15 averaged segments
        std::size_t need = static_cast<std::size_t>(trace.fs / std::max(f_signal, 1e-9) * 8.0);
        while (segment_len < need && segment_len * 2 <= n) segment_len *= 2;
    }
    RecoveryResult res;
    res.psd = welch_psd(trace, segment_len, 0.5, Window::Hann);
    double df = res.psd.df();
    std::size_t k0 = static_cast<std::size_t>(std::llround(f_signal / df));
    std::size_t lo = k0 > 4 ? k0 - 4 : 1;
    std::size_t hi = std::min(k0 + 4, res.psd.p.size() - 1);
    double peak_power = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) peak_power += res.psd.p[k] * df;
    // noise floor from the bins flanking the peak
    std::vector<double> floor_bins;
    for (std::size_t k = (lo > 12 ? lo - 12 : 1); k < lo; ++k) floor_bins.push_back(res.psd.p[k]);
    for (std::size_t k = hi + 1; k < std::min(hi + 13, res.psd.p.size()); ++k)
        floor_bins.push_back(res.psd.p[k]);
    double floor = 0.0;
    for (double v : floor_bins) floor += v;
    floor = floor_bins.empty() ? 0.0 : floor / double(floor_bins.size());
    double signal_power = std::max(peak_power - floor * double(hi - lo + 1) * df, 0.0);
    double amp_v = std::sqrt(2.0 * signal_power);
    res.b_tesla = amp_v / (s_v_per_hz * conv.a_hz_per_t);
    double noise_in_band = floor * double(hi - lo + 1) * df;
    res.snr = noise_in_band > 0.0 ? signal_power / noise_in_band
                                  : std::numeric_limits<double>::infinity();
    res.low_snr = res.snr < 3.0;
    return res;
}

/// DC / slow-field estimate from the trace mean.
inline double recover_field_dc(const TimeTrace& trace, double s_v_per_hz,
                               const FieldConversion& conv = {}) {
    if (!(s_v_per_hz > 0.0)) throw ValidationError("recover_field_dc: S must be positive");
    double mean = 0.0;
    for (double v : trace.samples) mean += v;
    mean /= double(trace.samples.size());
    return mean / (s_v_per_hz * conv.a_hz_per_t);
}

} // namespace cqed
