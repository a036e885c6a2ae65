#include "pulseaf/beats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "pulseaf/dsp.hpp"
#include "pulseaf/errors.hpp"
#include "pulseaf/util.hpp"

namespace pulseaf {

namespace {

constexpr double kMinSeparationS = 0.33;
constexpr double kMaxPeriodS = 2.0;
constexpr double kRangeFloor = 1e-9;

bool marked(const std::vector<double>& x, std::size_t i, std::size_t k) {
    const bool left = (i < k) || x[i] > x[i - k];
    const bool right = (i + k >= x.size()) || x[i] > x[i + k];
    return left && right;
}

} // namespace

PeakList detect_peaks(const CprSeries& cpr) {
    const double rate = cpr.rate_hz;
    const std::size_t skip = std::min(cpr.skip_samples(), cpr.phi.size());
    std::vector<double> x(cpr.phi.begin() + static_cast<std::ptrdiff_t>(skip),
                          cpr.phi.end());
    const std::size_t n = x.size();
    if (static_cast<double>(n) / rate < 5.0)
        raise(ErrorKind::InsufficientData,
              "need at least 5 s of signal after the transient skip");

    dsp::remove_line(x);

    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    if (*hi - *lo < kRangeFloor)
        raise(ErrorKind::InsufficientData, "no peaks: signal is near-constant");

    const auto k_min = static_cast<std::size_t>(std::llround(kMinSeparationS * rate));
    auto k_max = static_cast<std::size_t>(std::llround(kMaxPeriodS * rate)) / 2;
    k_max = std::min(k_max, (n - 1) / 2);
    if (k_max < k_min)
        raise(ErrorKind::InsufficientData, "window too short for the scale range");

    // Candidates must be strict local maxima and far enough from the edges
    // that the smallest scale sees both neighbors.
    const std::size_t i_lo = k_min;
    const std::size_t i_hi = n - 1 - k_min;

    // Scale with the most marks wins (smallest scale on ties).
    std::size_t lambda = k_min;
    std::size_t best_count = 0;
    for (std::size_t k = k_min; k <= k_max; ++k) {
        std::size_t count = 0;
        for (std::size_t i = i_lo; i <= i_hi; ++i) {
            if (marked(x, i, k)) ++count;
        }
        if (count > best_count) {
            best_count = count;
            lambda = k;
        }
    }

    std::vector<std::size_t> candidates;
    for (std::size_t i = i_lo; i <= i_hi; ++i) {
        if (!(x[i] > x[i - 1] && x[i] > x[i + 1])) continue;
        bool all = true;
        for (std::size_t k = k_min; k <= lambda; ++k) {
            if (!marked(x, i, k)) {
                all = false;
                break;
            }
        }
        if (all) candidates.push_back(i);
    }

    // Minimum-separation pass: take candidates by descending height
    // (earlier index on ties), drop any within 0.33 s of an accepted peak.
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (x[candidates[a]] != x[candidates[b]])
            return x[candidates[a]] > x[candidates[b]];
        return candidates[a] < candidates[b];
    });
    const auto min_gap = static_cast<std::size_t>(std::llround(kMinSeparationS * rate));
    std::vector<std::size_t> accepted;
    for (std::size_t oi : order) {
        const std::size_t i = candidates[oi];
        bool clear = true;
        for (std::size_t j : accepted) {
            const std::size_t gap = (i > j) ? i - j : j - i;
            if (gap < min_gap) {
                clear = false;
                break;
            }
        }
        if (clear) accepted.push_back(i);
    }
    std::sort(accepted.begin(), accepted.end());

    if (accepted.size() < 4)
        raise(ErrorKind::InsufficientData, "fewer than 4 beats detected");

    PeakList peaks;
    peaks.rate_hz = rate;
    peaks.indices.reserve(accepted.size());
    peaks.times_s.reserve(accepted.size());
    for (std::size_t i : accepted) {
        peaks.indices.push_back(i + skip);
        peaks.times_s.push_back(static_cast<double>(i + skip) / rate);
    }
    return peaks;
}

RrSeries to_rr(const PeakList& peaks, double min_rr_ms, double max_rr_ms) {
    if (peaks.times_s.size() < 2)
        raise(ErrorKind::InsufficientData, "need at least 2 peaks for RR intervals");
    if (!(min_rr_ms > 0.0) || !(max_rr_ms > min_rr_ms))
        raise(ErrorKind::Config, "invalid RR bounds");
    RrSeries rr;
    for (std::size_t j = 1; j < peaks.times_s.size(); ++j) {
        const double v = (peaks.times_s[j] - peaks.times_s[j - 1]) * 1000.0;
        if (v < min_rr_ms || v > max_rr_ms) {
            ++rr.discarded;
            continue;
        }
        rr.rr_ms.push_back(v);
    }
    if (rr.rr_ms.size() < 3)
        raise(ErrorKind::InsufficientData, "fewer than 3 usable RR intervals");
    return rr;
}

void write_peaks_csv(const std::filesystem::path& path, const PeakList& peaks,
                     const CprSeries& cpr) {
    std::string out = "index,time_s,phi_rad\n";
    for (std::size_t j = 0; j < peaks.indices.size(); ++j) {
        out += std::to_string(peaks.indices[j]);
        out += ',';
        out += format_double(peaks.times_s[j]);
        out += ',';
        out += format_double(cpr.phi[peaks.indices[j]]);
        out += '\n';
    }
    write_file_atomic(path, out);
}

void write_rr_csv(const std::filesystem::path& path, const RrSeries& rr) {
    std::string out = "rr_ms\n";
    for (double v : rr.rr_ms) {
        out += format_double(v);
        out += '\n';
    }
    write_file_atomic(path, out);
}

RrSeries read_rr_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorKind::Io, "cannot open RR CSV: " + path.string());
    std::string line;
    if (!std::getline(in, line) || !line.starts_with("rr_ms"))
        raise(ErrorKind::Io, "bad RR CSV header: " + path.string());
    RrSeries rr;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        rr.rr_ms.push_back(parse_double(line));
    }
    return rr;
}

} // namespace pulseaf
