#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pulseaf/audio.hpp"
#include "pulseaf/beats.hpp"

namespace pulseaf {

inline constexpr std::size_t kFeatureCount = 26;

// Canonical feature order. Serialization carries a fingerprint of this
// list so artifacts trained against a different order are rejected.
extern const std::array<const char*, kFeatureCount> kFeatureNames;

std::size_t feature_index(const std::string& name); // throws on unknown name
std::uint64_t feature_fingerprint();                // FNV-1a over the names

struct FeatureVector {
    std::array<double, kFeatureCount> values{};
    std::uint32_t valid_mask = 0; // bit i set = feature i is well-defined
    std::string subject_id;
    Label label = Label::Unlabeled;

    bool is_valid(std::size_t i) const { return (valid_mask >> i) & 1u; }
};

// --- Feature groups -------------------------------------------------------
// All standard deviations are population SDs. Undefined features are
// flagged invalid and set to 0 rather than rejecting the record.

// minHR, meanHR, medianHR, skRR, SDRR, CVRR, pNN50, RMSSD, SDRMSSD,
// SDratio, SDSD, CVSD. Requires >= 3 intervals.
struct RrFeatures {
    std::array<double, 12> values{};
    std::uint32_t valid = 0xfff; // bit per value, local order
};
RrFeatures rr_features(const RrSeries& rr);

// HF, HFn, LnHF, TP from the 4 Hz-resampled tachogram (Hann-windowed
// averaged periodogram). HF band 0.15-0.40 Hz, TP band 0.0033-0.40 Hz.
// Requires >= 8 intervals.
struct SpectralFeatures {
    double hf = 0.0, hfn = 0.0, lnhf = 0.0, tp = 0.0;
    std::uint32_t valid = 0xf;
};
SpectralFeatures spectral_features(const RrSeries& rr);

// SD1, SD2, SD1SD2, S (Poincare geometry).
struct PoincareFeatures {
    double sd1 = 0.0, sd2 = 0.0, sd1sd2 = 0.0, s = 0.0;
    std::uint32_t valid = 0xf;
};
PoincareFeatures poincare_features(const RrSeries& rr);

// Difference, SampEn, ShanEn, ApEn, MSE, TPR. Entropies (m=2,
// r=0.2*SD(rr)) need >= 10 intervals; the rest need >= 3.
struct ComplexityFeatures {
    double difference = 0.0, sampen = 0.0, shanen = 0.0, apen = 0.0,
           mse = 0.0, tpr = 0.0;
    std::uint32_t valid = 0x3f;
};
ComplexityFeatures complexity_features(const RrSeries& rr);

// Full 26-value vector in canonical order.
FeatureVector extract_features(const RrSeries& rr);

// --- Normalization --------------------------------------------------------

struct NormStats {
    std::array<double, kFeatureCount> mean{};
    std::array<double, kFeatureCount> scale{}; // population SD, floored at eps
};

// Scale floor: a training column with spread below this is treated as
// constant and normalizes to exactly 0 for any input value.
inline constexpr double kNormScaleFloor = 1e-12;

NormStats fit_norm(const std::vector<FeatureVector>& training);
FeatureVector apply_norm(const FeatureVector& v, const NormStats& stats);

// --- CSV ------------------------------------------------------------------
// Header: 26 canonical names, then subject_id,label,flags. Flags is the
// valid mask as lowercase hex.
void write_features_csv(const std::filesystem::path& path,
                        const std::vector<FeatureVector>& rows);
std::vector<FeatureVector> read_features_csv(const std::filesystem::path& path);

} // namespace pulseaf
