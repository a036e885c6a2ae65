#include "pulseaf/cpr.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "carrier.hpp"
#include "pulseaf/dsp.hpp"
#include "pulseaf/errors.hpp"
#include "pulseaf/util.hpp"

namespace pulseaf {

namespace {

constexpr double kCprRateHz = 150.0;
constexpr int kBandpassPolePairs = 2;       // 4th-order band-pass
constexpr double kIqCutoffHz = 20.0;
constexpr double kIqStopHz = 75.0;          // Nyquist of the 150 Hz output
constexpr double kIqStopAttenDb = 60.0;
constexpr double kDetrendCutoffHz = 0.4;
constexpr int kDetrendOrder = 4;
constexpr double kTransientSkipS = 1.0;
constexpr double kMagnitudeFloor = 1e-9;

// The band-pass contract asks for <= 1 dB loss across the passband under
// forward-backward filtering. A Butterworth with design edges exactly at
// the passband edges is 6 dB down there (3 dB per pass), so the design
// edges are widened until the passband edges sit at 0.40 dB per pass
// (0.8 dB total; the band is not quite geometrically centered on the
// carrier, which costs a fraction of a dB on the low edge).
double bandpass_design_halfwidth(double passband_halfwidth_hz) {
    constexpr double kEdgeDropDb = 0.40;
    const double omega = std::pow(std::pow(10.0, kEdgeDropDb / 10.0) - 1.0,
                                  1.0 / (2.0 * kBandpassPolePairs));
    return passband_halfwidth_hz / omega;
}

std::size_t decimation_factor(double sample_rate_hz) {
    const long long irate = std::llround(sample_rate_hz);
    if (irate <= 0 || irate % static_cast<long long>(kCprRateHz) != 0)
        raise(ErrorKind::Config,
              "sample rate must be an integer multiple of 150 Hz");
    return static_cast<std::size_t>(irate / static_cast<long long>(kCprRateHz));
}

} // namespace

AudioRecording bandpass(const AudioRecording& rec, double carrier_hz,
                        double passband_halfwidth_hz) {
    const double fs = rec.sample_rate_hz;
    if (!(passband_halfwidth_hz > 0.0))
        raise(ErrorKind::Config, "passband halfwidth must be positive");
    const double h = bandpass_design_halfwidth(passband_halfwidth_hz);
    if (!(carrier_hz - passband_halfwidth_hz > 0.0) ||
        !(carrier_hz + passband_halfwidth_hz < fs / 2.0))
        raise(ErrorKind::Config, "carrier band does not fit below Nyquist");
    if (!(carrier_hz - h > 0.0) || !(carrier_hz + h < fs / 2.0))
        raise(ErrorKind::Config, "carrier too close to 0 or Nyquist for the band-pass");

    // Settling time of a resonator with ~2h bandwidth.
    const double settle_s = 1.0 / h;
    if (rec.duration_s() < 6.0 * settle_s)
        raise(ErrorKind::InsufficientData, "record shorter than 6x filter settling time");

    const dsp::SosChain sos =
        dsp::butter_bandpass(kBandpassPolePairs, carrier_hz - h, carrier_hz + h, fs);
    const auto pad = static_cast<std::size_t>(6.0 * settle_s * fs);

    AudioRecording out = rec;
    out.samples = dsp::sos_filtfilt(sos, rec.samples, pad);
    return out;
}

IqSeries iq_demodulate(const AudioRecording& rec, double carrier_hz) {
    const double fs = rec.sample_rate_hz;
    if (!(carrier_hz > 0.0) || !(carrier_hz < fs / 2.0))
        raise(ErrorKind::Config, "carrier frequency outside (0, rate/2)");
    const std::size_t factor = decimation_factor(fs);

    detail::CarrierRefs carrier(carrier_hz, fs);
    const std::size_t n = rec.samples.size();
    std::vector<double> mixed_i(n), mixed_q(n);
    for (std::size_t k = 0; k < n; ++k) {
        mixed_i[k] = rec.samples[k] * carrier.cos_at(k);
        mixed_q[k] = rec.samples[k] * carrier.sin_at(k);
    }

    const dsp::FirDecimator fir = dsp::design_fir_decimator(
        kIqCutoffHz, kIqStopHz, kIqStopAttenDb, fs, static_cast<int>(factor));

    IqSeries iq;
    iq.rate_hz = kCprRateHz;
    iq.i = dsp::fir_decimate(fir, mixed_i);
    iq.q = dsp::fir_decimate(fir, mixed_q);
    return iq;
}

std::vector<double> condition_phase(const std::vector<double>& phi, double rate_hz) {
    std::vector<double> out = phi;
    if (out.size() < 8) return out;

    // Mean/line removal first keeps the static offset out of the
    // high-pass edge response.
    dsp::remove_line(out);

    const dsp::SosChain hp =
        dsp::butter_highpass(kDetrendOrder, kDetrendCutoffHz, rate_hz);
    const auto pad =
        static_cast<std::size_t>(6.0 * rate_hz / kDetrendCutoffHz);
    out = dsp::sos_filtfilt(hp, out, pad);

    // Orientation: the demodulation sign is arbitrary. A pulse wave is
    // sharp upward lobes on a slow baseline, so its amplitude distribution
    // is right-skewed; an inverted one is left-skewed. (Peak-prominence
    // medians cannot tell the two apart: an inverted train's baseline tops
    // sit between valleys just as deep as the upright peaks are tall.)
    // Symmetric signals are left alone.
    double m2 = 0.0, m3 = 0.0;
    for (double v : out) {
        m2 += v * v;
        m3 += v * v * v;
    }
    m2 /= static_cast<double>(out.size());
    m3 /= static_cast<double>(out.size());
    if (m2 > 0.0) {
        const double skew = m3 / std::pow(m2, 1.5);
        if (skew < -0.05) {
            for (double& v : out) v = -v;
        }
    }
    return out;
}

CprSeries estimate_cpr(const IqSeries& iq) {
    if (iq.i.size() != iq.q.size())
        raise(ErrorKind::Config, "I and Q lengths differ");
    if (iq.i.empty()) raise(ErrorKind::Config, "empty I/Q series");

    std::size_t weak = 0;
    for (std::size_t k = 0; k < iq.i.size(); ++k) {
        if (std::abs(iq.i[k]) + std::abs(iq.q[k]) <= kMagnitudeFloor) ++weak;
    }
    if (static_cast<double>(weak) > 0.01 * static_cast<double>(iq.i.size()))
        raise(ErrorKind::NoCarrier, "carrier magnitude below numeric floor");

    std::vector<double> raw(iq.i.size());
    for (std::size_t k = 0; k < raw.size(); ++k)
        raw[k] = std::atan2(iq.q[k], iq.i[k]);

    CprSeries cpr;
    cpr.rate_hz = iq.rate_hz;
    cpr.transient_skip_s = kTransientSkipS;
    cpr.phi = condition_phase(dsp::unwrap(raw), iq.rate_hz);
    for (double v : cpr.phi) {
        if (!std::isfinite(v)) raise(ErrorKind::Internal, "non-finite phase sample");
    }
    return cpr;
}

CprSeries extract_cpr(const AudioRecording& rec, double carrier_hz,
                      double passband_halfwidth_hz) {
    if (rec.duration_s() < 5.0)
        raise(ErrorKind::InsufficientData, "recording shorter than 5 s");
    const AudioRecording filtered = bandpass(rec, carrier_hz, passband_halfwidth_hz);
    return estimate_cpr(iq_demodulate(filtered, carrier_hz));
}

void write_cpr_csv(const std::filesystem::path& path, const CprSeries& cpr) {
    std::string out = "time_s,phi_rad\n";
    for (std::size_t k = 0; k < cpr.phi.size(); ++k) {
        out += format_double(static_cast<double>(k) / cpr.rate_hz);
        out += ',';
        out += format_double(cpr.phi[k]);
        out += '\n';
    }
    write_file_atomic(path, out);
}

CprSeries read_cpr_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorKind::Io, "cannot open CPR CSV: " + path.string());
    std::string line;
    if (!std::getline(in, line) || !line.starts_with("time_s,phi_rad"))
        raise(ErrorKind::Io, "bad CPR CSV header: " + path.string());
    CprSeries cpr;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 2) raise(ErrorKind::Io, "bad CPR CSV row: " + path.string());
        cpr.phi.push_back(parse_double(fields[1]));
    }
    return cpr;
}

} // namespace pulseaf
