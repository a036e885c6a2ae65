#pragma once

#include <cstdint>

#include "pulseaf/beats.hpp"
#include "pulseaf/cpr.hpp"
#include "pulseaf/features.hpp"

namespace pulseaf {

// Process-level knobs; defaults reproduce the reference settings with no
// flags.
struct PipelineConfig {
    double carrier_hz = 18000.0;
    double input_rate_hz = 48000.0;
    double bandpass_halfwidth_hz = 50.0;
    double min_rr_ms = 300.0;
    double max_rr_ms = 2000.0;
    double c = 1.0;
    std::uint64_t seed = 42;
    int knn_k = 5;

    static constexpr double kCprRateHz = 150.0;

    void validate() const;
};

struct RecordAnalysis {
    CprSeries cpr;
    PeakList peaks;
    RrSeries rr;
    FeatureVector features; // subject_id/label copied from the recording
};

// recording -> CPR -> peaks -> RR -> features. Raises per-stage errors
// (no-carrier, insufficient beats, rate mismatch).
RecordAnalysis analyze_record(const AudioRecording& rec,
                              const PipelineConfig& cfg);

} // namespace pulseaf
