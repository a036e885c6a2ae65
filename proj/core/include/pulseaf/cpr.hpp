#pragma once

#include <filesystem>
#include <vector>

#include "pulseaf/audio.hpp"

namespace pulseaf {

// In-phase / quadrature pair after mixing, low-pass filtering and
// downsampling to the analysis rate.
struct IqSeries {
    std::vector<double> i;
    std::vector<double> q;
    double rate_hz = 150.0;
};

// Recovered channel phase response: the pulse wave.
struct CprSeries {
    std::vector<double> phi; // radians, conditioned (unwrapped, detrended)
    double rate_hz = 150.0;
    double transient_skip_s = 1.0; // excluded from downstream analysis

    std::size_t skip_samples() const {
        return static_cast<std::size_t>(transient_skip_s * rate_hz);
    }
};

// Pre-filter around the carrier. Zero-phase (forward-backward) 4th-order
// Butterworth band-pass whose design edges are widened so the combined
// response is within 1 dB over [carrier-hw, carrier+hw] Hz and at least
// 40 dB down at carrier +/- 10*hw.
AudioRecording bandpass(const AudioRecording& rec, double carrier_hz,
                        double passband_halfwidth_hz = 50.0);

// Mixes with cos/sin references at the carrier, low-passes (cutoff 20 Hz,
// >= 60 dB at 75 Hz) and decimates to 150 Hz. Zero phase throughout.
IqSeries iq_demodulate(const AudioRecording& rec, double carrier_hz);

// Four-quadrant phase of (I, Q), unwrapped, detrended (mean/line removal
// plus a 0.4 Hz zero-phase high-pass) and orientation-normalized so the
// dominant per-beat extremum is a maximum.
CprSeries estimate_cpr(const IqSeries& iq);

// Detrend + orientation only; exposed so ground-truth phase series can be
// conditioned identically when comparing against recovered CPR.
std::vector<double> condition_phase(const std::vector<double>& phi, double rate_hz);

// Full extraction: bandpass -> iq_demodulate -> estimate_cpr.
CprSeries extract_cpr(const AudioRecording& rec, double carrier_hz,
                      double passband_halfwidth_hz = 50.0);

// CSV export: header "time_s,phi_rad", 150 rows per second.
void write_cpr_csv(const std::filesystem::path& path, const CprSeries& cpr);
CprSeries read_cpr_csv(const std::filesystem::path& path);

} // namespace pulseaf
