#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "pulseaf/features.hpp"

namespace pulseaf {

struct Hyperparams {
    double c = 1.0;
    int epochs = 200;
    std::uint64_t seed = 0;
};

// Linear max-margin model plus the normalization it was trained with.
struct ModelArtifact {
    std::array<double, kFeatureCount> weights{};
    double bias = 0.0;
    NormStats norm;
    std::uint64_t fingerprint = 0; // canonical feature-order hash
    Hyperparams hyperparams;
    int format_version = 1;
};

struct Prediction {
    Label label = Label::NSR;
    double score = 0.0; // signed distance sign; AF iff score > 0
};

// L2-regularized hinge loss (lambda = 1/(C*n)) minimized by deterministic
// epoch-based subgradient descent over a seed-shuffled order. Normalization
// is fitted on the training data and embedded in the artifact.
ModelArtifact train_linear(const std::vector<FeatureVector>& data, double c,
                           std::uint64_t seed);

// score = weights . normalized(v) + bias; AF iff score > 0 (ties -> NSR).
Prediction predict(const ModelArtifact& model, const FeatureVector& v);

// Majority vote among the k nearest training vectors by Euclidean distance
// in the z-scored space (statistics fitted on `train`). Distance ties at
// the k-th neighbor go to the lower insertion index.
// score = (AF votes - NSR votes) / k.
Prediction knn_baseline(const std::vector<FeatureVector>& train,
                        const FeatureVector& v, int k);

// Mean hinge loss of the model over a labeled set (normalized internally).
double mean_hinge_loss(const ModelArtifact& model,
                       const std::vector<FeatureVector>& data);

// JSON model file; rejects unknown format_version and fingerprint mismatch.
void save_model(const std::filesystem::path& path, const ModelArtifact& model);
ModelArtifact load_model(const std::filesystem::path& path);

} // namespace pulseaf
