#include "pulseaf/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "pulseaf/audio.hpp"
#include "pulseaf/errors.hpp"
#include "pulseaf/rng.hpp"

namespace pulseaf {

namespace {

double label_sign(Label label) { return label == Label::AF ? 1.0 : -1.0; }

// In-place Fisher-Yates; spelled out so the permutation is identical on
// every standard library.
void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.next_u64() % i);
        std::swap(idx[i - 1], idx[j]);
    }
}

} // namespace

ModelArtifact train_linear(const std::vector<FeatureVector>& data, double c,
                           std::uint64_t seed) {
    if (data.size() < 2) raise(ErrorKind::Config, "need at least 2 training vectors");
    if (!(c > 0.0)) raise(ErrorKind::Config, "C must be positive");
    bool has_af = false, has_nsr = false;
    for (const FeatureVector& v : data) {
        if (v.label == Label::AF) has_af = true;
        else if (v.label == Label::NSR) has_nsr = true;
        else raise(ErrorKind::Config, "unlabeled vector in training data");
        for (double value : v.values) {
            if (!std::isfinite(value))
                raise(ErrorKind::Config, "non-finite feature in training data");
        }
    }
    if (!has_af || !has_nsr)
        raise(ErrorKind::Config, "training data must contain both classes");

    ModelArtifact model;
    model.norm = fit_norm(data);
    model.fingerprint = feature_fingerprint();
    model.hyperparams = {c, 200, seed};

    std::vector<FeatureVector> z;
    z.reserve(data.size());
    for (const FeatureVector& v : data) z.push_back(apply_norm(v, model.norm));

    const auto n = static_cast<double>(data.size());
    const double lambda = 1.0 / (c * n);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    Rng rng(seed);
    std::size_t t = 0;
    for (int epoch = 0; epoch < model.hyperparams.epochs; ++epoch) {
        shuffle_indices(order, rng);
        for (std::size_t idx : order) {
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            const double shrink = 1.0 - eta * lambda; // = (t-1)/t
            const FeatureVector& x = z[idx];
            const double y = label_sign(x.label);
            double score = model.bias;
            for (std::size_t j = 0; j < kFeatureCount; ++j)
                score += model.weights[j] * x.values[j];
            if (y * score < 1.0) {
                for (std::size_t j = 0; j < kFeatureCount; ++j)
                    model.weights[j] = shrink * model.weights[j] + eta * y * x.values[j];
                model.bias += eta * y;
            } else {
                for (std::size_t j = 0; j < kFeatureCount; ++j)
                    model.weights[j] *= shrink;
            }
        }
    }
    for (double w : model.weights) {
        if (!std::isfinite(w)) raise(ErrorKind::Internal, "training diverged");
    }
    return model;
}

Prediction predict(const ModelArtifact& model, const FeatureVector& v) {
    if (model.fingerprint != feature_fingerprint())
        raise(ErrorKind::Incompatible, "model feature order does not match");
    const FeatureVector z = apply_norm(v, model.norm);
    double score = model.bias;
    for (std::size_t j = 0; j < kFeatureCount; ++j)
        score += model.weights[j] * z.values[j];
    return {score > 0.0 ? Label::AF : Label::NSR, score};
}

Prediction knn_baseline(const std::vector<FeatureVector>& train,
                        const FeatureVector& v, int k) {
    if (train.empty()) raise(ErrorKind::Config, "empty kNN training set");
    if (k < 1 || k % 2 == 0 || static_cast<std::size_t>(k) > train.size())
        raise(ErrorKind::Config, "k must be odd and <= training size");

    const NormStats stats = fit_norm(train);
    const FeatureVector zv = apply_norm(v, stats);

    std::vector<std::pair<double, std::size_t>> dist(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
        const FeatureVector zt = apply_norm(train[i], stats);
        double acc = 0.0;
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            const double d = zt.values[j] - zv.values[j];
            acc += d * d;
        }
        dist[i] = {acc, i};
    }
    std::sort(dist.begin(), dist.end()); // ties -> lower insertion index

    int af_votes = 0;
    for (int i = 0; i < k; ++i) {
        if (train[dist[static_cast<std::size_t>(i)].second].label == Label::AF)
            ++af_votes;
    }
    const int nsr_votes = k - af_votes;
    const double score = static_cast<double>(af_votes - nsr_votes) / k;
    return {score > 0.0 ? Label::AF : Label::NSR, score};
}

double mean_hinge_loss(const ModelArtifact& model,
                       const std::vector<FeatureVector>& data) {
    if (data.empty()) return 0.0;
    double acc = 0.0;
    for (const FeatureVector& v : data) {
        const FeatureVector z = apply_norm(v, model.norm);
        double score = model.bias;
        for (std::size_t j = 0; j < kFeatureCount; ++j)
            score += model.weights[j] * z.values[j];
        acc += std::max(0.0, 1.0 - label_sign(v.label) * score);
    }
    return acc / static_cast<double>(data.size());
}

void save_model(const std::filesystem::path& path, const ModelArtifact& model) {
    nlohmann::json j;
    j["format_version"] = model.format_version;
    char fp[24];
    std::snprintf(fp, sizeof(fp), "%016llx",
                  static_cast<unsigned long long>(model.fingerprint));
    j["feature_fingerprint"] = fp;
    j["weights"] = model.weights;
    j["bias"] = model.bias;
    j["norm"]["mean"] = model.norm.mean;
    j["norm"]["scale"] = model.norm.scale;
    j["hyperparams"]["C"] = model.hyperparams.c;
    j["hyperparams"]["epochs"] = model.hyperparams.epochs;
    j["hyperparams"]["seed"] = model.hyperparams.seed;
    write_file_atomic(path, j.dump(2) + "\n");
}

ModelArtifact load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorKind::Io, "cannot open model file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorKind::Io, "malformed model JSON: " + std::string(e.what()));
    }

    ModelArtifact model;
    model.format_version = j.at("format_version").get<int>();
    if (model.format_version != 1)
        raise(ErrorKind::Incompatible, "unknown model format_version");

    const std::string fp = j.at("feature_fingerprint").get<std::string>();
    model.fingerprint = std::strtoull(fp.c_str(), nullptr, 16);
    if (model.fingerprint != feature_fingerprint())
        raise(ErrorKind::Incompatible, "model was trained with a different feature order");

    const auto weights = j.at("weights").get<std::vector<double>>();
    const auto mean = j.at("norm").at("mean").get<std::vector<double>>();
    const auto scale = j.at("norm").at("scale").get<std::vector<double>>();
    if (weights.size() != kFeatureCount || mean.size() != kFeatureCount ||
        scale.size() != kFeatureCount)
        raise(ErrorKind::Incompatible, "model vector lengths do not match");
    std::copy(weights.begin(), weights.end(), model.weights.begin());
    std::copy(mean.begin(), mean.end(), model.norm.mean.begin());
    std::copy(scale.begin(), scale.end(), model.norm.scale.begin());

    model.bias = j.at("bias").get<double>();
    model.hyperparams.c = j.at("hyperparams").at("C").get<double>();
    model.hyperparams.epochs = j.at("hyperparams").at("epochs").get<int>();
    model.hyperparams.seed = j.at("hyperparams").at("seed").get<std::uint64_t>();
    return model;
}

} // namespace pulseaf
