#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "pulseaf/signal_model.hpp"

namespace pulseaf {

// Shape of a synthetic study cohort. Defaults mirror the reference
// protocol: 20 subjects, 6 of them AF, 30 s records.
struct CohortSpec {
    std::size_t subjects = 20;
    std::size_t af_subjects = 6;
    std::size_t records_per_subject = 40;
    double duration_s = 30.0;
    std::uint64_t seed = 42;
    Scenario scenario = Scenario::Quiet;
    std::optional<double> snr_db;
    double carrier_hz = 18000.0;
    double sample_rate_hz = 48000.0;
    double gain = 1.0;

    void validate() const;
};

// Fully resolved generation parameters for one cohort record. Subject-level
// physiology (mean RR, variability) is drawn from the subject seed; each
// record then gets its own beat/noise seed.
struct RecordSpec {
    std::string subject_id;
    Label label = Label::NSR;
    std::size_t subject_index = 0;
    std::size_t record_index = 0;
    std::uint64_t record_seed = 0;
    ProbeConfig probe;
    BeatModel beats;
    NoiseSpec noise;
    SynthOptions synth;
};

std::string cohort_subject_id(const CohortSpec& spec, std::size_t subject_index);

RecordSpec cohort_record_spec(const CohortSpec& spec, std::size_t subject_index,
                              std::size_t record_index);

inline std::pair<AudioRecording, ChannelTruth> synthesize(const RecordSpec& rs) {
    auto out = synth_recording(rs.probe, rs.beats, rs.noise, rs.synth);
    out.first.subject_id = rs.subject_id;
    out.first.label = rs.label;
    out.first.scenario = to_string(rs.noise.scenario);
    return out;
}

} // namespace pulseaf
