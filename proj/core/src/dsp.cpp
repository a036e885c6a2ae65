#include "pulseaf/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "pulseaf/errors.hpp"

namespace pulseaf::dsp {

namespace {

constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;

// Left-half-plane Butterworth prototype poles on the unit circle.
std::vector<cplx> prototype_poles(int order) {
    std::vector<cplx> poles;
    poles.reserve(order);
    for (int k = 1; k <= order; ++k) {
        const double theta = kPi * (2.0 * k + order - 1.0) / (2.0 * order);
        poles.emplace_back(std::cos(theta), std::sin(theta));
    }
    return poles;
}

cplx bilinear(cplx s, double fs2) { return (fs2 + s) / (fs2 - s); }

// Groups digital poles into conjugate pairs and emits one biquad per pair
// (or a first-order tail for an odd count of real poles). `zero_pattern`
// supplies the numerator roots per section.
struct SectionZeros {
    double z1;
    double z2; // NaN for first-order numerator
};

SosChain assemble(std::vector<cplx> poles,
                  const std::vector<SectionZeros>& zero_pattern) {
    std::sort(poles.begin(), poles.end(), [](const cplx& a, const cplx& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return std::abs(a.imag()) < std::abs(b.imag());
    });

    constexpr double kImagTol = 1e-10;
    SosChain sos;
    std::vector<bool> used(poles.size(), false);
    std::size_t section = 0;
    for (std::size_t i = 0; i < poles.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        const cplx p = poles[i];
        Biquad q;
        if (std::abs(p.imag()) > kImagTol) {
            // Find the conjugate partner.
            std::size_t j = i + 1;
            for (; j < poles.size(); ++j) {
                if (!used[j] && std::abs(poles[j].real() - p.real()) < 1e-9 &&
                    std::abs(poles[j].imag() + p.imag()) < 1e-9) {
                    break;
                }
            }
            if (j == poles.size()) raise(ErrorKind::Internal, "unpaired complex pole");
            used[j] = true;
            q.a1 = -2.0 * p.real();
            q.a2 = std::norm(p);
        } else {
            // Pair two real poles if available.
            std::size_t j = i + 1;
            while (j < poles.size() &&
                   (used[j] || std::abs(poles[j].imag()) > kImagTol)) {
                ++j;
            }
            if (j < poles.size()) {
                used[j] = true;
                q.a1 = -(p.real() + poles[j].real());
                q.a2 = p.real() * poles[j].real();
            } else {
                q.a1 = -p.real();
                q.a2 = 0.0;
            }
        }
        const SectionZeros& z = zero_pattern[section % zero_pattern.size()];
        if (std::isnan(z.z2)) {
            q.b0 = 1.0;
            q.b1 = -z.z1;
            q.b2 = 0.0;
        } else {
            q.b0 = 1.0;
            q.b1 = -(z.z1 + z.z2);
            q.b2 = z.z1 * z.z2;
        }
        sos.push_back(q);
        ++section;
    }
    return sos;
}

cplx biquad_response(const Biquad& q, cplx z) {
    const cplx zi = 1.0 / z;
    return (q.b0 + q.b1 * zi + q.b2 * zi * zi) /
           (1.0 + q.a1 * zi + q.a2 * zi * zi);
}

// Scales each section so the cascade has unit gain at `freq_hz`.
void normalize_at(SosChain& sos, double freq_hz, double fs) {
    const cplx z = std::polar(1.0, 2.0 * kPi * freq_hz / fs);
    for (Biquad& q : sos) {
        const double g = std::abs(biquad_response(q, z));
        if (g <= 0.0) raise(ErrorKind::Internal, "degenerate filter section");
        q.b0 /= g;
        q.b1 /= g;
        q.b2 /= g;
    }
}

double reflect_sample(std::span<const double> x, long long i) {
    const long long n = static_cast<long long>(x.size());
    if (i >= 0 && i < n) return x[static_cast<std::size_t>(i)];
    if (i < 0) return 2.0 * x.front() - x[static_cast<std::size_t>(-i)];
    return 2.0 * x.back() - x[static_cast<std::size_t>(2 * (n - 1) - i)];
}

double bessel_i0(double x) {
    // Power series; converges fast for the beta values used here.
    double sum = 1.0, term = 1.0;
    const double q = x * x / 4.0;
    for (int k = 1; k < 64; ++k) {
        term *= q / (k * static_cast<double>(k));
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum;
}

} // namespace

SosChain butter_lowpass(int order, double cutoff_hz, double sample_rate_hz) {
    if (order < 1 || cutoff_hz <= 0.0 || cutoff_hz >= sample_rate_hz / 2.0)
        raise(ErrorKind::Config, "invalid low-pass design parameters");
    const double fs2 = 2.0 * sample_rate_hz;
    const double wc = fs2 * std::tan(kPi * cutoff_hz / sample_rate_hz);
    std::vector<cplx> zpoles;
    for (const cplx& p : prototype_poles(order)) zpoles.push_back(bilinear(wc * p, fs2));
    SosChain sos = assemble(std::move(zpoles), {{-1.0, -1.0}});
    // The odd-order design leaves one first-order section (a2 == 0); it
    // carries a single zero at z = -1.
    if (order % 2 == 1) {
        for (Biquad& q : sos) {
            if (q.a2 == 0.0) {
                q.b1 = 1.0;
                q.b2 = 0.0;
                break;
            }
        }
    }
    normalize_at(sos, 0.0, sample_rate_hz);
    return sos;
}

SosChain butter_highpass(int order, double cutoff_hz, double sample_rate_hz) {
    if (order < 1 || cutoff_hz <= 0.0 || cutoff_hz >= sample_rate_hz / 2.0)
        raise(ErrorKind::Config, "invalid high-pass design parameters");
    const double fs2 = 2.0 * sample_rate_hz;
    const double wc = fs2 * std::tan(kPi * cutoff_hz / sample_rate_hz);
    std::vector<cplx> zpoles;
    for (const cplx& p : prototype_poles(order)) zpoles.push_back(bilinear(wc / p, fs2));
    SosChain sos = assemble(std::move(zpoles), {{1.0, 1.0}});
    if (order % 2 == 1) {
        for (Biquad& q : sos) {
            if (q.a2 == 0.0) {
                q.b1 = -1.0;
                q.b2 = 0.0;
                break;
            }
        }
    }
    normalize_at(sos, sample_rate_hz / 2.0, sample_rate_hz);
    return sos;
}

SosChain butter_bandpass(int pole_pairs, double low_hz, double high_hz,
                         double sample_rate_hz) {
    if (pole_pairs < 1 || low_hz <= 0.0 || high_hz <= low_hz ||
        high_hz >= sample_rate_hz / 2.0)
        raise(ErrorKind::Config, "invalid band-pass design parameters");
    const double fs2 = 2.0 * sample_rate_hz;
    const double w1 = fs2 * std::tan(kPi * low_hz / sample_rate_hz);
    const double w2 = fs2 * std::tan(kPi * high_hz / sample_rate_hz);
    const double w0sq = w1 * w2;
    const double bw = w2 - w1;

    std::vector<cplx> zpoles;
    for (const cplx& p : prototype_poles(pole_pairs)) {
        const cplx bp = 0.5 * bw * p;
        const cplx disc = std::sqrt(bp * bp - w0sq);
        zpoles.push_back(bilinear(bp + disc, fs2));
        zpoles.push_back(bilinear(bp - disc, fs2));
    }
    // Each section takes one zero at z=+1 and one at z=-1.
    SosChain sos = assemble(std::move(zpoles), {{1.0, -1.0}});
    const double center_hz =
        sample_rate_hz / kPi * std::atan(std::sqrt(w0sq) / fs2);
    normalize_at(sos, center_hz, sample_rate_hz);
    return sos;
}

std::vector<double> sos_filter(const SosChain& sos, std::span<const double> x) {
    std::vector<double> y(x.begin(), x.end());
    for (const Biquad& q : sos) {
        double s1 = 0.0, s2 = 0.0;
        for (double& v : y) {
            const double in = v;
            const double out = q.b0 * in + s1;
            s1 = q.b1 * in - q.a1 * out + s2;
            s2 = q.b2 * in - q.a2 * out;
            v = out;
        }
    }
    return y;
}

std::vector<double> sos_filtfilt(const SosChain& sos, std::span<const double> x,
                                 std::size_t pad) {
    if (x.size() < 2) return {x.begin(), x.end()};
    pad = std::min(pad, x.size() - 1);
    const std::size_t n = x.size();

    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t i = 0; i < pad; ++i)
        ext.push_back(2.0 * x[0] - x[pad - i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 0; i < pad; ++i)
        ext.push_back(2.0 * x[n - 1] - x[n - 2 - i]);

    std::vector<double> y = sos_filter(sos, ext);
    std::reverse(y.begin(), y.end());
    y = sos_filter(sos, y);
    std::reverse(y.begin(), y.end());

    return {y.begin() + static_cast<std::ptrdiff_t>(pad),
            y.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

double sos_magnitude(const SosChain& sos, double freq_hz, double sample_rate_hz) {
    const cplx z = std::polar(1.0, 2.0 * kPi * freq_hz / sample_rate_hz);
    cplx h = 1.0;
    for (const Biquad& q : sos) h *= biquad_response(q, z);
    return std::abs(h);
}

FirDecimator design_fir_decimator(double cutoff_hz, double stop_hz,
                                  double stop_atten_db, double sample_rate_hz,
                                  int factor) {
    if (factor < 1 || cutoff_hz <= 0.0 || stop_hz <= cutoff_hz ||
        stop_hz > sample_rate_hz / 2.0)
        raise(ErrorKind::Config, "invalid decimator design parameters");

    const double a = stop_atten_db;
    double beta = 0.0;
    if (a > 50.0)
        beta = 0.1102 * (a - 8.7);
    else if (a >= 21.0)
        beta = 0.5842 * std::pow(a - 21.0, 0.4) + 0.07886 * (a - 21.0);

    const double dw = 2.0 * kPi * (stop_hz - cutoff_hz) / sample_rate_hz;
    std::size_t taps = static_cast<std::size_t>(std::ceil((a - 8.0) / (2.285 * dw))) + 1;
    if (taps % 2 == 0) ++taps;

    const double wc = kPi * (cutoff_hz + stop_hz) / sample_rate_hz; // mid-band
    const long long m = static_cast<long long>(taps / 2);
    const double i0b = bessel_i0(beta);

    FirDecimator fir;
    fir.factor = factor;
    fir.taps.resize(taps);
    double sum = 0.0;
    for (long long k = -m; k <= m; ++k) {
        const double sinc = (k == 0) ? wc / kPi : std::sin(wc * k) / (kPi * k);
        const double r = static_cast<double>(k) / static_cast<double>(m);
        const double win = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0b;
        fir.taps[static_cast<std::size_t>(k + m)] = sinc * win;
        sum += sinc * win;
    }
    for (double& t : fir.taps) t /= sum; // exact unit DC gain
    return fir;
}

std::vector<double> fir_decimate(const FirDecimator& fir,
                                 std::span<const double> x) {
    const long long m = static_cast<long long>(fir.taps.size() / 2);
    if (static_cast<long long>(x.size()) <= m + 1)
        raise(ErrorKind::InsufficientData, "record shorter than decimation filter");
    const std::size_t out_len = (x.size() + fir.factor - 1) / fir.factor;
    std::vector<double> y(out_len);
    for (std::size_t out = 0; out < out_len; ++out) {
        const long long center = static_cast<long long>(out) * fir.factor;
        double acc = 0.0;
        const long long lo = center - m;
        // Fast path when the whole window is interior.
        if (lo >= 0 && center + m < static_cast<long long>(x.size())) {
            const double* xp = x.data() + lo;
            for (std::size_t k = 0; k < fir.taps.size(); ++k) acc += fir.taps[k] * xp[k];
        } else {
            for (std::size_t k = 0; k < fir.taps.size(); ++k)
                acc += fir.taps[k] * reflect_sample(x, lo + static_cast<long long>(k));
        }
        y[out] = acc;
    }
    return y;
}

double fir_magnitude(const FirDecimator& fir, double freq_hz,
                     double sample_rate_hz) {
    // Symmetric taps: response is real; evaluate about the center.
    const long long m = static_cast<long long>(fir.taps.size() / 2);
    const double w = 2.0 * kPi * freq_hz / sample_rate_hz;
    double acc = 0.0;
    for (std::size_t k = 0; k < fir.taps.size(); ++k)
        acc += fir.taps[k] * std::cos(w * (static_cast<long long>(k) - m));
    return std::abs(acc);
}

std::vector<double> unwrap(std::span<const double> phase) {
    std::vector<double> y(phase.begin(), phase.end());
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    double corr = 0.0;
    for (std::size_t i = 1; i < y.size(); ++i) {
        const double d = phase[i] - phase[i - 1];
        const double wrapped = d - kTwoPi * std::round(d / kTwoPi);
        corr += wrapped - d;
        y[i] = phase[i] + corr;
    }
    return y;
}

LineFit fit_line(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n == 0) return {};
    if (n == 1) return {x[0], 0.0};
    const double tbar = (n - 1) / 2.0;
    double xbar = 0.0;
    for (double v : x) xbar += v;
    xbar /= static_cast<double>(n);
    double stx = 0.0, stt = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dt = static_cast<double>(i) - tbar;
        stx += dt * (x[i] - xbar);
        stt += dt * dt;
    }
    const double slope = (stt > 0.0) ? stx / stt : 0.0;
    return {xbar - slope * tbar, slope};
}

void remove_line(std::vector<double>& x) {
    const LineFit fit = fit_line(x);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] -= fit.intercept + fit.slope * static_cast<double>(i);
}

std::vector<std::size_t> local_maxima(std::span<const double> x) {
    std::vector<std::size_t> peaks;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        if (x[i] > x[i - 1] && x[i] > x[i + 1]) peaks.push_back(i);
    }
    return peaks;
}

std::vector<double> peak_prominences(std::span<const double> x,
                                     const std::vector<std::size_t>& peaks) {
    std::vector<double> prom(peaks.size(), 0.0);
    for (std::size_t pi = 0; pi < peaks.size(); ++pi) {
        const std::size_t p = peaks[pi];
        double left_min = x[p];
        for (std::size_t j = p; ; --j) {
            left_min = std::min(left_min, x[j]);
            if (x[j] > x[p]) break;
            if (j == 0) break;
        }
        double right_min = x[p];
        for (std::size_t j = p; j < x.size(); ++j) {
            right_min = std::min(right_min, x[j]);
            if (x[j] > x[p]) break;
        }
        prom[pi] = x[p] - std::max(left_min, right_min);
    }
    return prom;
}

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    double hi = values[mid];
    if (values.size() % 2 == 1) return hi;
    std::nth_element(values.begin(), values.begin() + mid - 1,
                     values.begin() + mid);
    return 0.5 * (values[mid - 1] + hi);
}

} // namespace pulseaf::dsp
