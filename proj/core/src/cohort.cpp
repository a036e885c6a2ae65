#include "pulseaf/cohort.hpp"

#include <cstdio>

#include "pulseaf/errors.hpp"
#include "pulseaf/rng.hpp"

namespace pulseaf {

void CohortSpec::validate() const {
    if (subjects < 2) raise(ErrorKind::Config, "cohort needs at least 2 subjects");
    if (af_subjects == 0 || af_subjects >= subjects)
        raise(ErrorKind::Config, "AF subject count must be in [1, subjects-1]");
    if (records_per_subject == 0)
        raise(ErrorKind::Config, "records_per_subject must be positive");
    if (!(duration_s >= 5.0))
        raise(ErrorKind::Config, "record duration must be at least 5 s");
}

std::string cohort_subject_id(const CohortSpec& spec, std::size_t subject_index) {
    char buf[16];
    const int width = spec.subjects > 99 ? 3 : 2;
    std::snprintf(buf, sizeof(buf), "S%0*zu", width, subject_index + 1);
    return buf;
}

RecordSpec cohort_record_spec(const CohortSpec& spec, std::size_t subject_index,
                              std::size_t record_index) {
    spec.validate();
    if (subject_index >= spec.subjects || record_index >= spec.records_per_subject)
        raise(ErrorKind::Config, "subject/record index out of range");

    RecordSpec rs;
    rs.subject_index = subject_index;
    rs.record_index = record_index;
    rs.subject_id = cohort_subject_id(spec, subject_index);
    rs.label = subject_index < spec.af_subjects ? Label::AF : Label::NSR;

    rs.probe.carrier_frequency_hz = spec.carrier_hz;
    rs.probe.sample_rate_hz = spec.sample_rate_hz;
    rs.probe.gain = spec.gain;
    rs.probe.duration_s = spec.duration_s;

    // Subject physiology: one draw per subject, stable across records.
    Rng subject_rng(mix_seed(spec.seed, 0x100 + subject_index));
    if (rs.label == Label::AF) {
        rs.beats = BeatModel::af_default(0);
        rs.beats.mean_rr_ms = subject_rng.uniform(550.0, 900.0);
        rs.beats.rr_sd_ms = 0.15 * rs.beats.mean_rr_ms;
    } else {
        rs.beats = BeatModel::nsr_default(0);
        rs.beats.mean_rr_ms = subject_rng.uniform(700.0, 1000.0);
        rs.beats.rr_sd_ms = subject_rng.uniform(15.0, 35.0);
        rs.beats.respiratory_mod_depth = subject_rng.uniform(0.02, 0.05);
        rs.beats.respiratory_rate_hz = subject_rng.uniform(0.2, 0.3);
    }

    rs.record_seed = mix_seed(spec.seed, (subject_index << 20) ^ record_index);
    rs.beats.seed = rs.record_seed;

    Rng record_rng(mix_seed(rs.record_seed, 7));
    rs.synth.modulation_depth_rad = record_rng.uniform(0.25, 0.35);

    rs.noise.scenario = spec.scenario;
    rs.noise.snr_db = spec.snr_db;
    return rs;
}

} // namespace pulseaf
