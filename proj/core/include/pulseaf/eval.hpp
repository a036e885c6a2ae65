#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pulseaf/classifier.hpp"
#include "pulseaf/features.hpp"

namespace pulseaf {

// AF records are the positive class.
struct ConfusionMatrix {
    std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;

    std::uint64_t total() const { return tp + tn + fp + fn; }
    void add(Label truth, Label predicted);
    ConfusionMatrix& operator+=(const ConfusionMatrix& other);
};

struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    // Zero-denominator guards substitute 0 and clear the flag.
    bool precision_defined = true;
    bool recall_defined = true;
    bool f1_defined = true;
};

Metrics metrics(const ConfusionMatrix& c);

struct PrPoint {
    double recall = 0.0;
    double precision = 0.0;
};

struct PrCurve {
    std::vector<PrPoint> points; // one per distinct threshold, descending
    double ap = 0.0;             // step-interpolated average precision
};

// Thresholds swept over distinct scores descending;
// AP = sum (R_k - R_{k-1}) * P_k.
PrCurve pr_curve(const std::vector<std::pair<double, Label>>& scores);

struct SubjectResult {
    std::string subject_id;
    ConfusionMatrix confusion;
};

struct EvalReport {
    ConfusionMatrix confusion; // pooled over folds
    Metrics summary;
    PrCurve pr;
    std::vector<SubjectResult> per_subject;
    std::vector<std::string> skipped_subjects; // single-class training folds
    std::string mode = "loso";
};

// A trainer turns a labeled training set into a prediction function.
using Predictor = std::function<Prediction(const FeatureVector&)>;
using Trainer = std::function<Predictor(const std::vector<FeatureVector>&)>;

Trainer make_linear_trainer(double c, std::uint64_t seed);
Trainer make_knn_trainer(int k);

// Leave-one-subject-out cross-validation: one fold per subject, model and
// normalization fitted per fold on the remaining subjects only, counts
// accumulated across folds, decision scores pooled for the PR curve.
EvalReport loso_eval(const std::vector<FeatureVector>& dataset,
                     const Trainer& trainer);

// Scenario-transfer protocol: fit once on the training set, evaluate on a
// test set with disjoint subjects (enforced).
EvalReport transfer_eval(const std::vector<FeatureVector>& train,
                         const std::vector<FeatureVector>& test,
                         const Trainer& trainer);

void write_report_json(const std::filesystem::path& path, const EvalReport& report);
void write_pr_csv(const std::filesystem::path& path, const PrCurve& pr);

} // namespace pulseaf
