#include "pulseaf/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "pulseaf/dsp.hpp"
#include "pulseaf/errors.hpp"
#include "pulseaf/util.hpp"

namespace pulseaf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = 1e-12;

double mean_of(const std::vector<double>& x) {
    double acc = 0.0;
    for (double v : x) acc += v;
    return acc / static_cast<double>(x.size());
}

// Population standard deviation.
double sd_of(const std::vector<double>& x) {
    const double m = mean_of(x);
    double acc = 0.0;
    for (double v : x) acc += (v - m) * (v - m);
    return std::sqrt(acc / static_cast<double>(x.size()));
}

std::vector<double> successive_diffs(const std::vector<double>& x) {
    std::vector<double> d;
    d.reserve(x.size() - 1);
    for (std::size_t i = 1; i < x.size(); ++i) d.push_back(x[i] - x[i - 1]);
    return d;
}

// Chebyshev-distance template match counts for sample/approximate entropy.
// Self-matches excluded; i and j range over the first `templates` starts.
std::size_t sampen_matches(const std::vector<double>& x, std::size_t m,
                           double r, std::size_t templates) {
    std::size_t count = 0;
    for (std::size_t i = 0; i + 1 < templates; ++i) {
        for (std::size_t j = i + 1; j < templates; ++j) {
            bool match = true;
            for (std::size_t k = 0; k < m; ++k) {
                if (std::abs(x[i + k] - x[j + k]) > r) {
                    match = false;
                    break;
                }
            }
            if (match) ++count;
        }
    }
    return count;
}

// Sample entropy with embedding m and tolerance r; false when undefined
// (too short or no template matches).
bool sample_entropy(const std::vector<double>& x, std::size_t m, double r,
                    double& out) {
    if (x.size() < m + 2) return false;
    const std::size_t templates = x.size() - m; // same count for m and m+1
    const std::size_t b = sampen_matches(x, m, r, templates);
    const std::size_t a = sampen_matches(x, m + 1, r, templates);
    if (a == 0 || b == 0) return false;
    out = -std::log(static_cast<double>(a) / static_cast<double>(b));
    return true;
}

double approximate_entropy(const std::vector<double>& x, std::size_t m, double r) {
    const auto phi = [&](std::size_t mm) {
        const std::size_t count = x.size() - mm + 1;
        double acc = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            std::size_t matches = 0;
            for (std::size_t j = 0; j < count; ++j) {
                bool ok = true;
                for (std::size_t k = 0; k < mm; ++k) {
                    if (std::abs(x[i + k] - x[j + k]) > r) {
                        ok = false;
                        break;
                    }
                }
                if (ok) ++matches; // includes self-match
            }
            acc += std::log(static_cast<double>(matches) / static_cast<double>(count));
        }
        return acc / static_cast<double>(count);
    };
    return phi(m) - phi(m + 1);
}

std::vector<double> coarse_grain(const std::vector<double>& x, std::size_t tau) {
    std::vector<double> y;
    y.reserve(x.size() / tau);
    for (std::size_t i = 0; i + tau <= x.size(); i += tau) {
        double acc = 0.0;
        for (std::size_t k = 0; k < tau; ++k) acc += x[i + k];
        y.push_back(acc / static_cast<double>(tau));
    }
    return y;
}

} // namespace

const std::array<const char*, kFeatureCount> kFeatureNames = {
    "minHR",   "meanHR", "medianHR", "skRR",   "SDRR",       "CVRR",
    "pNN50",   "RMSSD",  "SDRMSSD",  "SDratio", "SDSD",      "CVSD",
    "HF",      "HFn",    "LnHF",     "TP",     "SD1",        "SD2",
    "SD1SD2",  "S",      "Difference", "SampEn", "ShanEn",   "ApEn",
    "MSE",     "TPR",
};

std::size_t feature_index(const std::string& name) {
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        if (name == kFeatureNames[i]) return i;
    }
    raise(ErrorKind::Config, "unknown feature name: " + name);
}

std::uint64_t feature_fingerprint() {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto mix = [&h](char c) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    };
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        if (i > 0) mix(',');
        for (const char* p = kFeatureNames[i]; *p; ++p) mix(*p);
    }
    return h;
}

RrFeatures rr_features(const RrSeries& rr) {
    const std::vector<double>& x = rr.rr_ms;
    if (x.size() < 3)
        raise(ErrorKind::InsufficientData, "need at least 3 RR intervals");

    RrFeatures f;
    const double mean = mean_of(x);
    const double sdrr = sd_of(x);
    const std::vector<double> d = successive_diffs(x);

    double rmssd_sq = 0.0;
    for (double v : d) rmssd_sq += v * v;
    rmssd_sq /= static_cast<double>(d.size());
    const double rmssd = std::sqrt(rmssd_sq);

    std::size_t over50 = 0;
    for (double v : d) {
        if (std::abs(v) > 50.0) ++over50;
    }

    f.values[0] = *std::min_element(x.begin(), x.end()); // minHR
    f.values[1] = mean;                                  // meanHR
    f.values[2] = dsp::median(x);                        // medianHR

    // Moment skewness g1 = m3 / m2^(3/2).
    double m2 = 0.0, m3 = 0.0;
    for (double v : x) {
        const double dv = v - mean;
        m2 += dv * dv;
        m3 += dv * dv * dv;
    }
    m2 /= static_cast<double>(x.size());
    m3 /= static_cast<double>(x.size());
    if (m2 > kEps) {
        f.values[3] = m3 / std::pow(m2, 1.5);
    } else {
        f.values[3] = 0.0;
        f.valid &= ~(1u << 3);
    }

    f.values[4] = sdrr;                                         // SDRR
    f.values[5] = sdrr / mean;                                  // CVRR
    f.values[6] = static_cast<double>(over50) / static_cast<double>(d.size()); // pNN50
    f.values[7] = rmssd;                                        // RMSSD

    if (rmssd > 0.0) {
        f.values[8] = sdrr / rmssd; // SDRMSSD
    } else {
        f.values[8] = 0.0;
        f.valid &= ~(1u << 8);
    }

    // SD ratio = sqrt(0.5*RMSSD^2) / sqrt(2*SDRR^2 - 0.5*RMSSD^2); the
    // radicand can go negative for short alternating series, in which case
    // the feature is undefined.
    const double radicand = 2.0 * sdrr * sdrr - 0.5 * rmssd * rmssd;
    if (radicand > kEps) {
        f.values[9] = std::sqrt(0.5 * rmssd * rmssd) / std::sqrt(radicand);
    } else {
        f.values[9] = 0.0;
        f.valid &= ~(1u << 9);
    }

    f.values[10] = sd_of(d);     // SDSD
    f.values[11] = rmssd / mean; // CVSD
    return f;
}

SpectralFeatures spectral_features(const RrSeries& rr) {
    constexpr double kGridHz = 4.0;
    constexpr double kHfLo = 0.15, kHfHi = 0.40;
    constexpr double kTpLo = 0.0033, kTpHi = 0.40;

    SpectralFeatures f;
    const std::vector<double>& x = rr.rr_ms;
    const auto invalidate = [&f] {
        f.valid = 0;
        f.hf = f.hfn = f.lnhf = f.tp = 0.0;
    };
    if (x.size() < 8) {
        invalidate();
        return f;
    }

    // Tachogram on cumulative beat time, linearly resampled at 4 Hz.
    std::vector<double> t(x.size());
    double cum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cum += x[i] / 1000.0;
        t[i] = cum;
    }
    const double span = t.back() - t.front();
    const auto grid_n = static_cast<std::size_t>(std::floor(span * kGridHz)) + 1;
    if (grid_n < 16) {
        invalidate();
        return f;
    }
    std::vector<double> g(grid_n);
    std::size_t seg = 0;
    for (std::size_t k = 0; k < grid_n; ++k) {
        const double tk = t.front() + static_cast<double>(k) / kGridHz;
        while (seg + 2 < t.size() && t[seg + 1] < tk) ++seg;
        const double t0 = t[seg], t1 = t[seg + 1];
        const double w = (t1 > t0) ? std::clamp((tk - t0) / (t1 - t0), 0.0, 1.0) : 0.0;
        g[k] = x[seg] + (x[seg + 1] - x[seg]) * w;
    }

    // Averaged periodogram: Hann-windowed segments of up to 256 samples,
    // 50% overlap, one-sided PSD in ms^2/Hz.
    const std::size_t seg_len = std::min<std::size_t>(grid_n, 256);
    const std::size_t hop = std::max<std::size_t>(1, seg_len / 2);
    std::vector<double> window(seg_len);
    double win_power = 0.0;
    for (std::size_t i = 0; i < seg_len; ++i) {
        window[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) /
                                         static_cast<double>(seg_len - 1));
        win_power += window[i] * window[i];
    }

    const std::size_t half = seg_len / 2;
    std::vector<double> psd(half + 1, 0.0);
    std::size_t segments = 0;
    for (std::size_t start = 0; start + seg_len <= grid_n; start += hop) {
        double seg_mean = 0.0;
        for (std::size_t i = 0; i < seg_len; ++i) seg_mean += g[start + i];
        seg_mean /= static_cast<double>(seg_len);
        for (std::size_t m = 0; m <= half; ++m) {
            double re = 0.0, im = 0.0;
            const double w0 = 2.0 * kPi * static_cast<double>(m) /
                              static_cast<double>(seg_len);
            for (std::size_t i = 0; i < seg_len; ++i) {
                const double v = (g[start + i] - seg_mean) * window[i];
                re += v * std::cos(w0 * static_cast<double>(i));
                im -= v * std::sin(w0 * static_cast<double>(i));
            }
            double p = (re * re + im * im) / (kGridHz * win_power);
            if (m != 0 && !(seg_len % 2 == 0 && m == half)) p *= 2.0; // one-sided
            psd[m] += p;
        }
        ++segments;
        if (start + seg_len == grid_n) break;
    }
    if (segments == 0) {
        invalidate();
        return f;
    }
    for (double& p : psd) p /= static_cast<double>(segments);

    const double df = kGridHz / static_cast<double>(seg_len);
    const auto band_power = [&](double lo, double hi) {
        double acc = 0.0;
        for (std::size_t m = 0; m <= half; ++m) {
            const double fm = static_cast<double>(m) * df;
            if (fm >= lo && fm <= hi) acc += psd[m] * df;
        }
        return acc;
    };

    f.hf = band_power(kHfLo, kHfHi);
    f.tp = band_power(kTpLo, kTpHi);
    if (f.tp > kEps) {
        f.hfn = f.hf / f.tp;
    } else {
        f.hfn = 0.0;
        f.valid &= ~(1u << 1);
    }
    f.lnhf = std::log(std::max(f.hf, kEps));
    return f;
}

PoincareFeatures poincare_features(const RrSeries& rr) {
    const std::vector<double>& x = rr.rr_ms;
    if (x.size() < 3)
        raise(ErrorKind::InsufficientData, "need at least 3 RR intervals");

    PoincareFeatures f;
    const double sdrr = sd_of(x);
    const double sdsd = sd_of(successive_diffs(x));

    f.sd1 = sdsd / std::numbers::sqrt2;
    const double radicand = 2.0 * sdrr * sdrr - 0.5 * sdsd * sdsd;
    if (radicand >= 0.0) {
        f.sd2 = std::sqrt(radicand);
    } else {
        f.sd2 = 0.0;
        f.valid &= ~(1u << 1);
    }
    if (f.sd2 > 0.0) {
        f.sd1sd2 = f.sd1 / f.sd2;
    } else {
        f.sd1sd2 = 0.0;
        f.valid &= ~(1u << 2);
    }
    f.s = kPi * f.sd1 * f.sd2;
    if (!(f.valid & (1u << 1))) f.valid &= ~(1u << 3); // S inherits SD2's flag
    return f;
}

ComplexityFeatures complexity_features(const RrSeries& rr) {
    const std::vector<double>& x = rr.rr_ms;
    if (x.size() < 3)
        raise(ErrorKind::InsufficientData, "need at least 3 RR intervals");

    ComplexityFeatures f;
    const std::vector<double> d = successive_diffs(x);
    const std::vector<double> dd = successive_diffs(d);

    double num = 0.0, den = 0.0;
    for (double v : d) num += std::abs(v);
    for (double v : dd) den += std::abs(v);
    if (den >= kEps) {
        f.difference = num / den;
    } else {
        f.difference = num / kEps; // floored denominator
        f.valid &= ~(1u << 0);
    }

    const double tolerance = 0.2 * sd_of(x);
    constexpr std::size_t kEmbed = 2;

    if (x.size() >= 10) {
        double se = 0.0;
        if (sample_entropy(x, kEmbed, tolerance, se)) {
            f.sampen = se;
        } else {
            f.sampen = 0.0;
            f.valid &= ~(1u << 1);
        }
        f.apen = approximate_entropy(x, kEmbed, tolerance);

        // Multiscale entropy: mean sample entropy over coarse-grained
        // scales 1-3 with the scale-1 tolerance; undefined if any scale is.
        double acc = 0.0;
        bool all_defined = true;
        for (std::size_t tau = 1; tau <= 3; ++tau) {
            const std::vector<double> y = coarse_grain(x, tau);
            double s = 0.0;
            if (sample_entropy(y, kEmbed, tolerance, s)) {
                acc += s;
            } else {
                all_defined = false;
                break;
            }
        }
        if (all_defined) {
            f.mse = acc / 3.0;
        } else {
            f.mse = 0.0;
            f.valid &= ~(1u << 4);
        }
    } else {
        f.sampen = f.apen = f.mse = 0.0;
        f.valid &= ~((1u << 1) | (1u << 3) | (1u << 4));
    }

    // Shannon entropy over a 10-bin equal-width histogram (natural log).
    {
        const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
        constexpr std::size_t kBins = 10;
        std::array<std::size_t, kBins> hist{};
        if (*hi - *lo < kEps) {
            hist[0] = x.size();
        } else {
            const double width = (*hi - *lo) / static_cast<double>(kBins);
            for (double v : x) {
                auto b = static_cast<std::size_t>((v - *lo) / width);
                hist[std::min(b, kBins - 1)] += 1;
            }
        }
        double h = 0.0;
        for (std::size_t b = 0; b < kBins; ++b) {
            if (hist[b] == 0) continue;
            const double p = static_cast<double>(hist[b]) / static_cast<double>(x.size());
            h -= p * std::log(p);
        }
        f.shanen = h;
    }

    // Turning point ratio: interior samples strictly above or strictly
    // below both neighbors, over the series length.
    std::size_t turns = 0;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        if ((x[i] - x[i - 1]) * (x[i] - x[i + 1]) > 0.0) ++turns;
    }
    f.tpr = static_cast<double>(turns) / static_cast<double>(x.size());
    return f;
}

FeatureVector extract_features(const RrSeries& rr) {
    const RrFeatures rrf = rr_features(rr);
    const SpectralFeatures sp = spectral_features(rr);
    const PoincareFeatures pc = poincare_features(rr);
    const ComplexityFeatures cx = complexity_features(rr);

    FeatureVector v;
    for (std::size_t i = 0; i < 12; ++i) {
        v.values[i] = rrf.values[i];
        if (rrf.valid & (1u << i)) v.valid_mask |= 1u << i;
    }
    const double spv[4] = {sp.hf, sp.hfn, sp.lnhf, sp.tp};
    for (std::size_t i = 0; i < 4; ++i) {
        v.values[12 + i] = spv[i];
        if (sp.valid & (1u << i)) v.valid_mask |= 1u << (12 + i);
    }
    const double pcv[4] = {pc.sd1, pc.sd2, pc.sd1sd2, pc.s};
    for (std::size_t i = 0; i < 4; ++i) {
        v.values[16 + i] = pcv[i];
        if (pc.valid & (1u << i)) v.valid_mask |= 1u << (16 + i);
    }
    const double cxv[6] = {cx.difference, cx.sampen, cx.shanen,
                           cx.apen,       cx.mse,    cx.tpr};
    for (std::size_t i = 0; i < 6; ++i) {
        v.values[20 + i] = cxv[i];
        if (cx.valid & (1u << i)) v.valid_mask |= 1u << (20 + i);
    }
    for (double value : v.values) {
        if (!std::isfinite(value)) raise(ErrorKind::Internal, "non-finite feature");
    }
    return v;
}

NormStats fit_norm(const std::vector<FeatureVector>& training) {
    if (training.size() < 2)
        raise(ErrorKind::Config, "need at least 2 vectors to fit normalization");
    NormStats stats;
    const auto n = static_cast<double>(training.size());
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        double mean = 0.0;
        for (const FeatureVector& v : training) mean += v.values[j];
        mean /= n;
        double var = 0.0;
        for (const FeatureVector& v : training) {
            const double d = v.values[j] - mean;
            var += d * d;
        }
        const double sd = std::sqrt(var / n);
        stats.mean[j] = mean;
        stats.scale[j] = (sd > kNormScaleFloor) ? sd : kNormScaleFloor;
    }
    return stats;
}

FeatureVector apply_norm(const FeatureVector& v, const NormStats& stats) {
    FeatureVector out = v;
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        out.values[j] = (stats.scale[j] <= kNormScaleFloor)
                            ? 0.0
                            : (v.values[j] - stats.mean[j]) / stats.scale[j];
    }
    return out;
}

void write_features_csv(const std::filesystem::path& path,
                        const std::vector<FeatureVector>& rows) {
    std::string out;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        out += kFeatureNames[i];
        out += ',';
    }
    out += "subject_id,label,flags\n";
    char hex[16];
    for (const FeatureVector& v : rows) {
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            out += format_double(v.values[i]);
            out += ',';
        }
        out += v.subject_id;
        out += ',';
        out += to_string(v.label);
        std::snprintf(hex, sizeof(hex), ",%x\n", v.valid_mask);
        out += hex;
    }
    write_file_atomic(path, out);
}

std::vector<FeatureVector> read_features_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorKind::Io, "cannot open feature CSV: " + path.string());
    std::string line;
    if (!std::getline(in, line))
        raise(ErrorKind::Io, "empty feature CSV: " + path.string());
    const auto header = split_csv_line(line);
    if (header.size() != kFeatureCount + 3)
        raise(ErrorKind::Incompatible, "unexpected feature CSV column count");
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        if (header[i] != kFeatureNames[i])
            raise(ErrorKind::Incompatible,
                  "feature CSV column order mismatch at '" + header[i] + "'");
    }

    std::vector<FeatureVector> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != kFeatureCount + 3)
            raise(ErrorKind::Io, "bad feature CSV row: " + path.string());
        FeatureVector v;
        for (std::size_t i = 0; i < kFeatureCount; ++i)
            v.values[i] = parse_double(fields[i]);
        v.subject_id = fields[kFeatureCount];
        v.label = label_from_string(fields[kFeatureCount + 1]);
        v.valid_mask = static_cast<std::uint32_t>(
            std::strtoul(fields[kFeatureCount + 2].c_str(), nullptr, 16));
        rows.push_back(std::move(v));
    }
    return rows;
}

} // namespace pulseaf
