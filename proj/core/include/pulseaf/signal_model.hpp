#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pulseaf/audio.hpp"

namespace pulseaf {

// ---------------------------------------------------------------------------
// Synthetic probing-signal and wrist-channel models. Everything here is a
// pure function of (config, seed); the generated ChannelTruth is the
// ground-truth oracle the extraction stages are verified against.
// ---------------------------------------------------------------------------

struct ProbeConfig {
    double carrier_frequency_hz = 18000.0;
    double gain = 1.0; // in (0, 1]
    double sample_rate_hz = 48000.0;
    double duration_s = 30.0;

    void validate() const;
};

enum class Rhythm { NSR, AF };

struct BeatModel {
    Rhythm rhythm = Rhythm::NSR;
    double mean_rr_ms = 850.0;
    double rr_sd_ms = 25.0;
    // NSR only: sinusoidal respiratory modulation of the RR series.
    double respiratory_mod_depth = 0.03;
    double respiratory_rate_hz = 0.25;
    std::uint64_t seed = 0;

    void validate() const;

    static BeatModel nsr_default(std::uint64_t seed);
    static BeatModel af_default(std::uint64_t seed); // rr_sd = 15% of mean
};

enum class Scenario { Quiet, Conversation, Entertainment };

const char* to_string(Scenario scenario);
Scenario scenario_from_string(const std::string& text);

struct Interference {
    double freq_hz = 0.0;
    double level = 0.0; // peak amplitude, full-scale units
};

struct NoiseSpec {
    std::optional<double> snr_db;       // unset -> no broadband noise
    std::vector<Interference> interference;
    Scenario scenario = Scenario::Quiet;
};

// Exact injected channel state for one synthesized recording.
struct ChannelTruth {
    std::vector<double> amplitude_envelope; // A(t) at rate_hz
    std::vector<double> phase_response;     // theta_c(t) [rad] at rate_hz
    double rate_hz = 150.0;
    double static_offset_rad = 0.0;         // theta_p
    std::vector<double> peak_times_s;       // ground-truth systolic instants
    std::vector<double> rr_truth_ms;        // diffs of peak_times_s * 1000
};

// Optional knobs for synth_recording; defaults reproduce the standard model.
struct SynthOptions {
    double modulation_depth_rad = 0.3; // peak of the pulse-template train
    std::optional<double> static_offset_rad; // theta_p; drawn from seed if unset
    std::optional<double> start_offset_s;    // first beat onset; drawn if unset
    double amplitude = 1.0;                  // constant envelope A
};

// S(t) = gain * cos(2*pi*f*t), sampled.
AudioRecording synth_probe(const ProbeConfig& cfg);

// RR interval series [ms] whose cumulative sum covers duration_s.
// NSR: AR(1) deviations (coefficient 0.9) plus respiratory modulation.
// AF: serially independent Gaussian draws. Both clipped to [300, 2000] ms.
std::vector<double> synth_rr(const BeatModel& model, double duration_s);

// Carrier phase-modulated by an arbitrary phase series theta (given at
// theta_rate_hz, linearly interpolated if coarser than the audio rate):
//   s[n] = amplitude * gain * cos(2*pi*f*n/rate - theta(n) - theta_p)
AudioRecording modulate_carrier(const ProbeConfig& cfg,
                                std::span<const double> theta,
                                double theta_rate_hz, double theta_p,
                                double amplitude = 1.0);

// Full synthetic recording: a two-lobe per-beat pulse template (systolic
// lobe at 30% of RR, sigma 8% of RR; dicrotic lobe at 55% of RR, 40%
// amplitude) drives the carrier phase; noise added per NoiseSpec.
std::pair<AudioRecording, ChannelTruth> synth_recording(
    const ProbeConfig& cfg, const BeatModel& model, const NoiseSpec& noise,
    const SynthOptions& options = {});

// Persistence: CSV (time_s,theta_c_rad) and a JSON beat list.
void write_truth_csv(const std::filesystem::path& path, const ChannelTruth& truth);
void write_truth_json(const std::filesystem::path& path, const ChannelTruth& truth);
ChannelTruth read_truth(const std::filesystem::path& csv_path,
                        const std::filesystem::path& json_path);

} // namespace pulseaf
