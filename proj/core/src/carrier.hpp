#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace pulseaf::detail {

// Reference carrier cos/sin at sample indices. When f/fs is rational with
// a small denominator (18 kHz at 48 kHz is 3/8), the sequence is periodic
// and a lookup table replaces per-sample trig, which dominates synthesis
// and demodulation cost otherwise.
class CarrierRefs {
public:
    CarrierRefs(double carrier_hz, double sample_rate_hz) {
        const double ratio = carrier_hz / sample_rate_hz;
        for (std::size_t q = 1; q <= 1024; ++q) {
            const double cycles = ratio * static_cast<double>(q);
            if (std::abs(cycles - std::round(cycles)) < 1e-12) {
                period_ = q;
                break;
            }
        }
        if (period_ > 0) {
            cos_.resize(period_);
            sin_.resize(period_);
            for (std::size_t n = 0; n < period_; ++n) {
                const double phase = two_pi() * std::fmod(ratio * static_cast<double>(n), 1.0);
                cos_[n] = std::cos(phase);
                sin_[n] = std::sin(phase);
            }
        }
        ratio_ = ratio;
    }

    bool tabled() const { return period_ > 0; }

    double cos_at(std::size_t n) const {
        if (period_ > 0) return cos_[n % period_];
        return std::cos(phase_at(n));
    }

    double sin_at(std::size_t n) const {
        if (period_ > 0) return sin_[n % period_];
        return std::sin(phase_at(n));
    }

    double phase_at(std::size_t n) const {
        return two_pi() * std::fmod(ratio_ * static_cast<double>(n), 1.0);
    }

private:
    static constexpr double two_pi() { return 2.0 * std::numbers::pi; }

    std::size_t period_ = 0;
    double ratio_ = 0.0;
    std::vector<double> cos_;
    std::vector<double> sin_;
};

} // namespace pulseaf::detail
