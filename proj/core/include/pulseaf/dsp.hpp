#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pulseaf::dsp {

// One second-order IIR section, direct form II transposed, a0 == 1.
struct Biquad {
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
};

using SosChain = std::vector<Biquad>;

// Butterworth designs via analog prototype + bilinear transform.
// `order` counts poles; a band-pass of `pole_pairs` prototype poles has
// 2*pole_pairs poles total (so pole_pairs=2 gives a 4th-order band-pass).
SosChain butter_lowpass(int order, double cutoff_hz, double sample_rate_hz);
SosChain butter_highpass(int order, double cutoff_hz, double sample_rate_hz);
SosChain butter_bandpass(int pole_pairs, double low_hz, double high_hz,
                         double sample_rate_hz);

// Single forward pass through the cascade, zero initial state.
std::vector<double> sos_filter(const SosChain& sos, std::span<const double> x);

// Forward-backward filtering (zero phase, squared magnitude response).
// The signal is extended on both ends by `pad` samples of odd reflection
// before filtering; pad is clipped to x.size() - 1.
std::vector<double> sos_filtfilt(const SosChain& sos, std::span<const double> x,
                                 std::size_t pad);

// Complex frequency response of the cascade at one frequency.
double sos_magnitude(const SosChain& sos, double freq_hz, double sample_rate_hz);

// Symmetric (zero-phase) windowed-sinc low-pass combined with integer
// decimation: only the kept output samples are computed. Edges are handled
// by odd reflection. Kaiser window sized for `stop_atten_db` at
// `stop_hz`, flat to `cutoff_hz`.
struct FirDecimator {
    std::vector<double> taps; // odd length, symmetric
    int factor = 1;
};

FirDecimator design_fir_decimator(double cutoff_hz, double stop_hz,
                                  double stop_atten_db, double sample_rate_hz,
                                  int factor);

std::vector<double> fir_decimate(const FirDecimator& fir,
                                 std::span<const double> x);

// Magnitude of the FIR's frequency response at one frequency.
double fir_magnitude(const FirDecimator& fir, double freq_hz,
                     double sample_rate_hz);

// Phase unwrapping: removes jumps larger than pi by adding multiples of 2*pi.
std::vector<double> unwrap(std::span<const double> phase);

// Least-squares line fit; returns intercept/slope over sample index.
struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
};
LineFit fit_line(std::span<const double> x);

// Subtracts the least-squares line in place.
void remove_line(std::vector<double>& x);

// Strict local maxima (both neighbors smaller).
std::vector<std::size_t> local_maxima(std::span<const double> x);

// Topographic prominence of each peak index (as from local_maxima):
// height above the higher of the two bounding valleys, where each valley
// is the minimum between the peak and the nearest higher sample (or edge).
std::vector<double> peak_prominences(std::span<const double> x,
                                     const std::vector<std::size_t>& peaks);

// Median of the values (by copy); 0 for empty input.
double median(std::vector<double> values);

} // namespace pulseaf::dsp
