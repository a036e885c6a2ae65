#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "pulseaf/cpr.hpp"

namespace pulseaf {

struct PeakList {
    std::vector<std::size_t> indices; // into CprSeries::phi, strictly increasing
    std::vector<double> times_s;      // indices / rate
    double rate_hz = 150.0;
};

struct RrSeries {
    std::vector<double> rr_ms;   // surviving intervals, [300, 2000] ms
    std::size_t discarded = 0;   // intervals dropped by the physiological bounds
};

// Multiscale local-maxima peak detection. A sample is marked at scale k
// when it exceeds both neighbors k samples away; the winning scale lambda
// is the one with the most marks, and peaks are the samples marked at
// every scale from k_min through lambda. Scales are restricted to the
// physiological beat range (k_min = 0.33 s, k_max = half of 2.0 s), the
// analysis window is linearly detrended first, and a minimum peak
// separation of 0.33 s is enforced (higher peak wins, then earlier).
PeakList detect_peaks(const CprSeries& cpr);

// RR intervals in milliseconds from consecutive peak times; values outside
// [min_rr_ms, max_rr_ms] are discarded and counted.
RrSeries to_rr(const PeakList& peaks, double min_rr_ms = 300.0,
               double max_rr_ms = 2000.0);

// CSV exports: "index,time_s,phi_rad" and "rr_ms".
void write_peaks_csv(const std::filesystem::path& path, const PeakList& peaks,
                     const CprSeries& cpr);
void write_rr_csv(const std::filesystem::path& path, const RrSeries& rr);
RrSeries read_rr_csv(const std::filesystem::path& path);

} // namespace pulseaf
