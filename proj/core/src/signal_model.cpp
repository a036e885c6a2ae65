#include "pulseaf/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "carrier.hpp"
#include "pulseaf/dsp.hpp"
#include "pulseaf/errors.hpp"
#include "pulseaf/rng.hpp"
#include "pulseaf/util.hpp"

namespace pulseaf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCprRateHz = 150.0;
constexpr double kMinRrMs = 300.0;
constexpr double kMaxRrMs = 2000.0;

// Pulse template geometry (fractions of the local RR interval).
constexpr double kSystolicAt = 0.30;
constexpr double kSystolicSigma = 0.08;
constexpr double kDicroticAt = 0.55;
constexpr double kDicroticSigma = 0.12;
constexpr double kDicroticRel = 0.40;

// Synthetic ambient scenarios: band-limited noise below the carrier band.
struct ScenarioShape {
    double cutoff_hz;
    double snr_db; // scenario noise power relative to the clean signal
};

ScenarioShape scenario_shape(Scenario s) {
    switch (s) {
        case Scenario::Conversation: return {4000.0, 10.0};
        case Scenario::Entertainment: return {8000.0, 5.0};
        case Scenario::Quiet: break;
    }
    return {0.0, 0.0};
}

double mean_square(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return x.empty() ? 0.0 : acc / static_cast<double>(x.size());
}

} // namespace

void ProbeConfig::validate() const {
    if (!(carrier_frequency_hz > 0.0) ||
        !(carrier_frequency_hz < sample_rate_hz / 2.0))
        raise(ErrorKind::Config, "carrier frequency must lie in (0, rate/2)");
    if (!(gain > 0.0) || gain > 1.0)
        raise(ErrorKind::Config, "gain must be in (0, 1]");
    if (!(duration_s > 0.0))
        raise(ErrorKind::Config, "duration must be positive");
    if (!(sample_rate_hz > 0.0))
        raise(ErrorKind::Config, "sample rate must be positive");
}

void BeatModel::validate() const {
    if (mean_rr_ms < kMinRrMs || mean_rr_ms > kMaxRrMs)
        raise(ErrorKind::Config, "mean RR outside physiological range [300, 2000] ms");
    if (rr_sd_ms < 0.0) raise(ErrorKind::Config, "RR standard deviation must be >= 0");
    if (respiratory_mod_depth < 0.0)
        raise(ErrorKind::Config, "respiratory modulation depth must be >= 0");
    if (respiratory_rate_hz <= 0.0)
        raise(ErrorKind::Config, "respiratory rate must be positive");
}

BeatModel BeatModel::nsr_default(std::uint64_t seed) {
    BeatModel m;
    m.rhythm = Rhythm::NSR;
    m.mean_rr_ms = 850.0;
    m.rr_sd_ms = 25.0;
    m.respiratory_mod_depth = 0.03;
    m.seed = seed;
    return m;
}

BeatModel BeatModel::af_default(std::uint64_t seed) {
    BeatModel m;
    m.rhythm = Rhythm::AF;
    m.mean_rr_ms = 750.0;
    m.rr_sd_ms = 0.15 * m.mean_rr_ms;
    m.respiratory_mod_depth = 0.0;
    m.seed = seed;
    return m;
}

const char* to_string(Scenario scenario) {
    switch (scenario) {
        case Scenario::Quiet: return "quiet";
        case Scenario::Conversation: return "conversation";
        case Scenario::Entertainment: return "entertainment";
    }
    return "quiet";
}

Scenario scenario_from_string(const std::string& text) {
    if (text == "quiet") return Scenario::Quiet;
    if (text == "conversation") return Scenario::Conversation;
    if (text == "entertainment") return Scenario::Entertainment;
    raise(ErrorKind::Config, "unknown scenario: " + text);
}

AudioRecording synth_probe(const ProbeConfig& cfg) {
    cfg.validate();
    const std::size_t n =
        static_cast<std::size_t>(std::llround(cfg.duration_s * cfg.sample_rate_hz));
    detail::CarrierRefs carrier(cfg.carrier_frequency_hz, cfg.sample_rate_hz);
    AudioRecording rec;
    rec.sample_rate_hz = cfg.sample_rate_hz;
    rec.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) rec.samples[i] = cfg.gain * carrier.cos_at(i);
    return rec;
}

std::vector<double> synth_rr(const BeatModel& model, double duration_s) {
    model.validate();
    if (!(duration_s > 0.0)) raise(ErrorKind::Config, "duration must be positive");

    Rng rng(model.seed);
    std::vector<double> rr;
    double elapsed_ms = 0.0;
    const double duration_ms = duration_s * 1000.0;

    if (model.rhythm == Rhythm::AF) {
        while (elapsed_ms < duration_ms) {
            const double draw = model.mean_rr_ms + model.rr_sd_ms * rng.gaussian();
            const double v = std::clamp(draw, kMinRrMs, kMaxRrMs);
            rr.push_back(v);
            elapsed_ms += v;
        }
        return rr;
    }

    // NSR: AR(1) deviations with coefficient 0.9 (stationary variance
    // rr_sd^2) plus slow respiratory modulation.
    constexpr double kAr = 0.9;
    const double innovation_sd = model.rr_sd_ms * std::sqrt(1.0 - kAr * kAr);
    double deviation = model.rr_sd_ms * rng.gaussian();
    while (elapsed_ms < duration_ms) {
        const double resp = model.respiratory_mod_depth * model.mean_rr_ms *
                            std::sin(2.0 * kPi * model.respiratory_rate_hz *
                                     elapsed_ms / 1000.0);
        const double v = std::clamp(model.mean_rr_ms + deviation + resp,
                                    kMinRrMs, kMaxRrMs);
        rr.push_back(v);
        elapsed_ms += v;
        deviation = kAr * deviation + innovation_sd * rng.gaussian();
    }
    return rr;
}

AudioRecording modulate_carrier(const ProbeConfig& cfg,
                                std::span<const double> theta,
                                double theta_rate_hz, double theta_p,
                                double amplitude) {
    cfg.validate();
    const std::size_t n =
        static_cast<std::size_t>(std::llround(cfg.duration_s * cfg.sample_rate_hz));
    const double ratio = cfg.sample_rate_hz / theta_rate_hz;
    const auto step = static_cast<std::size_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(step)) > 1e-9 || step == 0)
        raise(ErrorKind::Config, "theta rate must divide the sample rate");

    detail::CarrierRefs carrier(cfg.carrier_frequency_hz, cfg.sample_rate_hz);
    AudioRecording rec;
    rec.sample_rate_hz = cfg.sample_rate_hz;
    rec.samples.resize(n);
    const double scale = amplitude * cfg.gain;

    if (step == 1) {
        if (theta.size() < n)
            raise(ErrorKind::Config, "theta series too short for the recording");
        for (std::size_t i = 0; i < n; ++i) {
            rec.samples[i] = scale * std::cos(carrier.phase_at(i) - theta[i] - theta_p);
        }
        return rec;
    }

    // Coarse theta grid: precompute cos/sin at the knots and interpolate.
    // At knot-aligned instants the injected phase equals theta exactly.
    const std::size_t knots = (n - 1) / step + 2;
    if (theta.size() < knots)
        raise(ErrorKind::Config, "theta series too short for the recording");
    std::vector<double> kc(knots), ks(knots);
    for (std::size_t k = 0; k < knots; ++k) {
        kc[k] = std::cos(theta[k] + theta_p);
        ks[k] = std::sin(theta[k] + theta_p);
    }
    const double inv_step = 1.0 / static_cast<double>(step);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = i / step;
        const double frac = static_cast<double>(i - k * step) * inv_step;
        const double ct = kc[k] + (kc[k + 1] - kc[k]) * frac;
        const double st = ks[k] + (ks[k + 1] - ks[k]) * frac;
        rec.samples[i] = scale * (carrier.cos_at(i) * ct + carrier.sin_at(i) * st);
    }
    return rec;
}

std::pair<AudioRecording, ChannelTruth> synth_recording(
    const ProbeConfig& cfg, const BeatModel& model, const NoiseSpec& noise,
    const SynthOptions& options) {
    cfg.validate();
    model.validate();
    if (options.modulation_depth_rad >= kPi)
        raise(ErrorKind::Config, "modulation depth >= pi is ambiguous");
    if (options.modulation_depth_rad <= 0.0)
        raise(ErrorKind::Config, "modulation depth must be positive");

    const long long irate = std::llround(cfg.sample_rate_hz);
    if (irate % static_cast<long long>(kCprRateHz) != 0)
        raise(ErrorKind::Config, "sample rate must be an integer multiple of 150 Hz");
    const std::size_t n =
        static_cast<std::size_t>(std::llround(cfg.duration_s * cfg.sample_rate_hz));

    Rng rng_layout(mix_seed(model.seed, 1));
    Rng rng_noise(mix_seed(model.seed, 2));

    const double start_s =
        options.start_offset_s ? *options.start_offset_s : rng_layout.uniform(0.2, 0.6);
    const double theta_p = options.static_offset_rad
                               ? *options.static_offset_rad
                               : rng_layout.uniform(-kPi, kPi);

    // Beat grid.
    const std::vector<double> rr_ms = synth_rr(model, cfg.duration_s);
    std::vector<double> onsets_s(rr_ms.size());
    {
        double t = start_s;
        for (std::size_t j = 0; j < rr_ms.size(); ++j) {
            onsets_s[j] = t;
            t += rr_ms[j] / 1000.0;
        }
    }

    // Phase-response grid. 1500 Hz when the audio rate allows it (the
    // template has no content anywhere near that Nyquist); otherwise one
    // knot per audio sample.
    std::size_t theta_step = 1;
    if (irate % 1500 == 0) theta_step = static_cast<std::size_t>(irate / 1500);
    const double theta_rate = cfg.sample_rate_hz / static_cast<double>(theta_step);
    const std::size_t knots = (n - 1) / theta_step + 2;

    std::vector<double> theta(knots, 0.0);
    const double depth = options.modulation_depth_rad;
    for (std::size_t j = 0; j < rr_ms.size(); ++j) {
        const double rr_s = rr_ms[j] / 1000.0;
        const double lobes[2][3] = {
            {onsets_s[j] + kSystolicAt * rr_s, kSystolicSigma * rr_s, 1.0},
            {onsets_s[j] + kDicroticAt * rr_s, kDicroticSigma * rr_s, kDicroticRel},
        };
        for (const auto& lobe : lobes) {
            const double center = lobe[0], sigma = lobe[1], amp = lobe[2];
            const double lo_t = center - 5.0 * sigma, hi_t = center + 5.0 * sigma;
            const auto lo = static_cast<long long>(std::floor(lo_t * theta_rate));
            const auto hi = static_cast<long long>(std::ceil(hi_t * theta_rate));
            for (long long k = std::max(0LL, lo);
                 k <= std::min(static_cast<long long>(knots) - 1, hi); ++k) {
                const double t = static_cast<double>(k) / theta_rate;
                const double d = (t - center) / sigma;
                theta[static_cast<std::size_t>(k)] +=
                    depth * amp * std::exp(-0.5 * d * d);
            }
        }
    }
    for (double v : theta) {
        if (std::abs(v) >= kPi)
            raise(ErrorKind::Config, "pulse template exceeds the +/-pi phase range");
    }

    AudioRecording rec =
        modulate_carrier(cfg, theta, theta_rate, theta_p, options.amplitude);

    // Noise, in fixed order: scenario shape, tonal interference, white floor.
    const double clean_power = mean_square(rec.samples);
    if (noise.scenario != Scenario::Quiet) {
        const ScenarioShape shape = scenario_shape(noise.scenario);
        if (shape.cutoff_hz < cfg.sample_rate_hz / 2.0) {
            std::vector<double> ambient(n);
            for (double& v : ambient) v = rng_noise.gaussian();
            const dsp::SosChain lp =
                dsp::butter_lowpass(4, shape.cutoff_hz, cfg.sample_rate_hz);
            ambient = dsp::sos_filter(lp, ambient);
            const double target = clean_power * std::pow(10.0, -shape.snr_db / 10.0);
            const double actual = mean_square(ambient);
            const double scale = actual > 0.0 ? std::sqrt(target / actual) : 0.0;
            for (std::size_t i = 0; i < n; ++i) rec.samples[i] += scale * ambient[i];
        }
    }
    for (const Interference& tone : noise.interference) {
        const double phase0 = rng_noise.uniform(0.0, 2.0 * kPi);
        const double w = 2.0 * kPi * tone.freq_hz / cfg.sample_rate_hz;
        for (std::size_t i = 0; i < n; ++i)
            rec.samples[i] += tone.level * std::sin(w * static_cast<double>(i) + phase0);
    }
    if (noise.snr_db) {
        const double sigma =
            std::sqrt(clean_power * std::pow(10.0, -*noise.snr_db / 10.0));
        for (std::size_t i = 0; i < n; ++i) rec.samples[i] += sigma * rng_noise.gaussian();
    }

    // Ground truth at the CPR rate; values are exact knot subsamples.
    const auto decim = static_cast<std::size_t>(irate / static_cast<long long>(kCprRateHz));
    const std::size_t truth_len = (n + decim - 1) / decim;
    ChannelTruth truth;
    truth.rate_hz = kCprRateHz;
    truth.static_offset_rad = theta_p;
    truth.amplitude_envelope.assign(truth_len, options.amplitude);
    truth.phase_response.resize(truth_len);
    for (std::size_t k = 0; k < truth_len; ++k) {
        const std::size_t sample_index = k * decim;
        truth.phase_response[k] = theta[sample_index / theta_step];
    }
    for (std::size_t j = 0; j < rr_ms.size(); ++j) {
        const double s_j = onsets_s[j] + kSystolicAt * rr_ms[j] / 1000.0;
        if (s_j < cfg.duration_s) truth.peak_times_s.push_back(s_j);
    }
    for (std::size_t j = 1; j < truth.peak_times_s.size(); ++j) {
        truth.rr_truth_ms.push_back(
            (truth.peak_times_s[j] - truth.peak_times_s[j - 1]) * 1000.0);
    }
    return {std::move(rec), std::move(truth)};
}

void write_truth_csv(const std::filesystem::path& path, const ChannelTruth& truth) {
    std::string out = "time_s,theta_c_rad\n";
    for (std::size_t k = 0; k < truth.phase_response.size(); ++k) {
        out += format_double(static_cast<double>(k) / truth.rate_hz);
        out += ',';
        out += format_double(truth.phase_response[k]);
        out += '\n';
    }
    write_file_atomic(path, out);
}

void write_truth_json(const std::filesystem::path& path, const ChannelTruth& truth) {
    nlohmann::json j;
    j["rate_hz"] = truth.rate_hz;
    j["static_offset_rad"] = truth.static_offset_rad;
    j["amplitude_const"] =
        truth.amplitude_envelope.empty() ? 1.0 : truth.amplitude_envelope.front();
    j["peak_times_s"] = truth.peak_times_s;
    j["rr_truth_ms"] = truth.rr_truth_ms;
    write_file_atomic(path, j.dump(2) + "\n");
}

ChannelTruth read_truth(const std::filesystem::path& csv_path,
                        const std::filesystem::path& json_path) {
    ChannelTruth truth;

    std::ifstream csv(csv_path);
    if (!csv) raise(ErrorKind::Io, "cannot open truth CSV: " + csv_path.string());
    std::string line;
    if (!std::getline(csv, line) || !line.starts_with("time_s,theta_c_rad"))
        raise(ErrorKind::Io, "bad truth CSV header: " + csv_path.string());
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 2)
            raise(ErrorKind::Io, "bad truth CSV row: " + csv_path.string());
        truth.phase_response.push_back(parse_double(fields[1]));
    }

    std::ifstream jf(json_path);
    if (!jf) raise(ErrorKind::Io, "cannot open truth JSON: " + json_path.string());
    nlohmann::json j;
    try {
        jf >> j;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorKind::Io, "malformed truth JSON: " + std::string(e.what()));
    }
    truth.rate_hz = j.value("rate_hz", 150.0);
    truth.static_offset_rad = j.at("static_offset_rad").get<double>();
    truth.peak_times_s = j.at("peak_times_s").get<std::vector<double>>();
    truth.rr_truth_ms = j.at("rr_truth_ms").get<std::vector<double>>();
    const double amp = j.value("amplitude_const", 1.0);
    truth.amplitude_envelope.assign(truth.phase_response.size(), amp);
    return truth;
}

} // namespace pulseaf
