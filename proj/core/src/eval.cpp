#include "pulseaf/eval.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "pulseaf/audio.hpp"
#include "pulseaf/errors.hpp"
#include "pulseaf/util.hpp"

namespace pulseaf {

namespace {

// Subject ids in order of first appearance (deterministic fold order).
std::vector<std::string> subject_order(const std::vector<FeatureVector>& data) {
    std::vector<std::string> order;
    for (const FeatureVector& v : data) {
        if (v.subject_id.empty())
            raise(ErrorKind::Config, "record with empty subject id");
        if (std::find(order.begin(), order.end(), v.subject_id) == order.end())
            order.push_back(v.subject_id);
    }
    return order;
}

bool both_classes(const std::vector<FeatureVector>& data) {
    bool af = false, nsr = false;
    for (const FeatureVector& v : data) {
        af |= v.label == Label::AF;
        nsr |= v.label == Label::NSR;
    }
    return af && nsr;
}

} // namespace

void ConfusionMatrix::add(Label truth, Label predicted) {
    if (truth == Label::AF) {
        predicted == Label::AF ? ++tp : ++fn;
    } else {
        predicted == Label::AF ? ++fp : ++tn;
    }
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
    tp += other.tp;
    tn += other.tn;
    fp += other.fp;
    fn += other.fn;
    return *this;
}

Metrics metrics(const ConfusionMatrix& c) {
    if (c.total() == 0) raise(ErrorKind::Config, "empty confusion matrix");
    Metrics m;
    const auto tp = static_cast<double>(c.tp);
    const auto tn = static_cast<double>(c.tn);
    const auto fp = static_cast<double>(c.fp);
    const auto fn = static_cast<double>(c.fn);
    m.accuracy = (tn + tp) / (tn + tp + fn + fp);
    if (tp + fp > 0.0) {
        m.precision = tp / (tp + fp);
    } else {
        m.precision_defined = false;
    }
    if (tp + fn > 0.0) {
        m.recall = tp / (tp + fn);
    } else {
        m.recall_defined = false;
    }
    if (m.precision + m.recall > 0.0) {
        m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    } else {
        m.f1_defined = false;
    }
    return m;
}

PrCurve pr_curve(const std::vector<std::pair<double, Label>>& scores) {
    std::uint64_t positives = 0, negatives = 0;
    for (const auto& [score, label] : scores) {
        if (label == Label::AF) ++positives;
        else ++negatives;
    }
    if (positives == 0 || negatives == 0)
        raise(ErrorKind::Config, "PR curve needs both classes");

    std::vector<std::pair<double, Label>> sorted = scores;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    PrCurve curve;
    std::uint64_t tp = 0, fp = 0;
    double prev_recall = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        // Consume the whole tie group: one threshold per distinct score.
        const double threshold = sorted[i].first;
        while (i < sorted.size() && sorted[i].first == threshold) {
            if (sorted[i].second == Label::AF) ++tp;
            else ++fp;
            ++i;
        }
        const double recall = static_cast<double>(tp) / static_cast<double>(positives);
        const double precision =
            static_cast<double>(tp) / static_cast<double>(tp + fp);
        curve.points.push_back({recall, precision});
        curve.ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    return curve;
}

Trainer make_linear_trainer(double c, std::uint64_t seed) {
    return [c, seed](const std::vector<FeatureVector>& train) -> Predictor {
        ModelArtifact model = train_linear(train, c, seed);
        return [model = std::move(model)](const FeatureVector& v) {
            return predict(model, v);
        };
    };
}

Trainer make_knn_trainer(int k) {
    return [k](const std::vector<FeatureVector>& train) -> Predictor {
        return [train, k](const FeatureVector& v) {
            return knn_baseline(train, v, k);
        };
    };
}

EvalReport loso_eval(const std::vector<FeatureVector>& dataset,
                     const Trainer& trainer) {
    const std::vector<std::string> subjects = subject_order(dataset);
    if (subjects.size() < 2)
        raise(ErrorKind::Config, "leave-one-subject-out needs >= 2 subjects");
    if (!both_classes(dataset))
        raise(ErrorKind::Config, "dataset must contain both classes");

    EvalReport report;
    report.mode = "loso";
    std::vector<std::pair<double, Label>> pooled_scores;

    for (const std::string& subject : subjects) {
        std::vector<FeatureVector> train, test;
        for (const FeatureVector& v : dataset) {
            (v.subject_id == subject ? test : train).push_back(v);
        }
        if (!both_classes(train)) {
            report.skipped_subjects.push_back(subject);
            continue;
        }
        const Predictor model = trainer(train);
        SubjectResult fold;
        fold.subject_id = subject;
        for (const FeatureVector& v : test) {
            const Prediction p = model(v);
            fold.confusion.add(v.label, p.label);
            pooled_scores.emplace_back(p.score, v.label);
        }
        report.confusion += fold.confusion;
        report.per_subject.push_back(std::move(fold));
    }

    if (report.per_subject.empty())
        raise(ErrorKind::InsufficientData, "every fold had single-class training data");
    report.summary = metrics(report.confusion);

    bool af = false, nsr = false;
    for (const auto& [score, label] : pooled_scores) {
        af |= label == Label::AF;
        nsr |= label == Label::NSR;
    }
    if (af && nsr) report.pr = pr_curve(pooled_scores);
    return report;
}

EvalReport transfer_eval(const std::vector<FeatureVector>& train,
                         const std::vector<FeatureVector>& test,
                         const Trainer& trainer) {
    if (train.empty() || test.empty())
        raise(ErrorKind::Config, "transfer evaluation needs non-empty sets");
    std::set<std::string> train_subjects;
    for (const FeatureVector& v : train) train_subjects.insert(v.subject_id);
    for (const FeatureVector& v : test) {
        if (train_subjects.count(v.subject_id))
            raise(ErrorKind::Config,
                  "subject '" + v.subject_id + "' appears in both sets");
    }
    if (!both_classes(train))
        raise(ErrorKind::Config, "training set must contain both classes");

    const Predictor model = trainer(train);

    EvalReport report;
    report.mode = "transfer";
    std::vector<std::pair<double, Label>> pooled_scores;
    for (const std::string& subject : subject_order(test)) {
        SubjectResult fold;
        fold.subject_id = subject;
        for (const FeatureVector& v : test) {
            if (v.subject_id != subject) continue;
            const Prediction p = model(v);
            fold.confusion.add(v.label, p.label);
            pooled_scores.emplace_back(p.score, v.label);
        }
        report.confusion += fold.confusion;
        report.per_subject.push_back(std::move(fold));
    }
    report.summary = metrics(report.confusion);

    bool af = false, nsr = false;
    for (const auto& [score, label] : pooled_scores) {
        af |= label == Label::AF;
        nsr |= label == Label::NSR;
    }
    if (af && nsr) report.pr = pr_curve(pooled_scores);
    return report;
}

namespace {

nlohmann::json confusion_json(const ConfusionMatrix& c) {
    return {{"tp", c.tp}, {"tn", c.tn}, {"fp", c.fp}, {"fn", c.fn}};
}

} // namespace

void write_report_json(const std::filesystem::path& path, const EvalReport& report) {
    nlohmann::json j;
    j["mode"] = report.mode;
    j["confusion"] = confusion_json(report.confusion);
    j["accuracy"] = report.summary.accuracy;
    j["precision"] = report.summary.precision;
    j["recall"] = report.summary.recall;
    j["f1"] = report.summary.f1;
    j["precision_defined"] = report.summary.precision_defined;
    j["recall_defined"] = report.summary.recall_defined;
    j["f1_defined"] = report.summary.f1_defined;
    j["ap"] = report.pr.ap;
    nlohmann::json points = nlohmann::json::array();
    for (const PrPoint& p : report.pr.points)
        points.push_back({{"recall", p.recall}, {"precision", p.precision}});
    j["pr_points"] = std::move(points);
    nlohmann::json per_subject = nlohmann::json::array();
    for (const SubjectResult& s : report.per_subject) {
        nlohmann::json e = confusion_json(s.confusion);
        e["subject_id"] = s.subject_id;
        per_subject.push_back(std::move(e));
    }
    j["per_subject"] = std::move(per_subject);
    j["skipped_subjects"] = report.skipped_subjects;
    write_file_atomic(path, j.dump(2) + "\n");
}

void write_pr_csv(const std::filesystem::path& path, const PrCurve& pr) {
    std::string out = "recall,precision\n";
    for (const PrPoint& p : pr.points) {
        out += format_double(p.recall);
        out += ',';
        out += format_double(p.precision);
        out += '\n';
    }
    write_file_atomic(path, out);
}

} // namespace pulseaf
