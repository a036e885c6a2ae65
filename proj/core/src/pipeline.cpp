#include "pulseaf/pipeline.hpp"

#include <cmath>

#include "pulseaf/errors.hpp"

namespace pulseaf {

void PipelineConfig::validate() const {
    if (!(carrier_hz > 0.0) || !(carrier_hz < input_rate_hz / 2.0))
        raise(ErrorKind::Config, "carrier must lie in (0, input rate / 2)");
    if (!(bandpass_halfwidth_hz > 0.0))
        raise(ErrorKind::Config, "bandpass halfwidth must be positive");
    if (!(min_rr_ms > 0.0) || !(max_rr_ms > min_rr_ms))
        raise(ErrorKind::Config, "invalid RR bounds");
    if (!(c > 0.0)) raise(ErrorKind::Config, "C must be positive");
    if (knn_k < 1 || knn_k % 2 == 0)
        raise(ErrorKind::Config, "knn_k must be odd and positive");
}

RecordAnalysis analyze_record(const AudioRecording& rec,
                              const PipelineConfig& cfg) {
    cfg.validate();
    if (std::llround(rec.sample_rate_hz) != std::llround(cfg.input_rate_hz))
        raise(ErrorKind::Config, "recording rate differs from configured input rate");

    RecordAnalysis out;
    out.cpr = extract_cpr(rec, cfg.carrier_hz, cfg.bandpass_halfwidth_hz);
    out.peaks = detect_peaks(out.cpr);
    out.rr = to_rr(out.peaks, cfg.min_rr_ms, cfg.max_rr_ms);
    out.features = extract_features(out.rr);
    out.features.subject_id = rec.subject_id;
    out.features.label = rec.label;
    return out;
}

} // namespace pulseaf
