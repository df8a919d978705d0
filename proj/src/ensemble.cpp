#include "sentistack/ensemble.hpp"

#include <fstream>

#include <json.hpp>

#include "sentistack/errors.hpp"

namespace sentistack {

void ScoreSet::validate() const {
    if (labels.size() != scores.size()) {
        throw AlignmentError("score set " + model_id + ": " + std::to_string(labels.size()) +
                             " labels for " + std::to_string(scores.size()) + " scores");
    }
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!(scores[i] >= 0.0 && scores[i] <= 1.0)) {
            throw DataError("score set " + model_id + ": score " +
                            std::to_string(scores[i]) + " at index " + std::to_string(i) +
                            " outside [0,1]");
        }
        if (labels[i] != 0 && labels[i] != 1) {
            throw DataError("score set " + model_id + ": label " +
                            std::to_string(labels[i]) + " at index " + std::to_string(i));
        }
    }
}

void ScoreSet::save(const std::filesystem::path& path) const {
    validate();
    nlohmann::json j = {{"model_id", model_id},
                        {"dataset", {{"name", dataset_name},
                                     {"split", dataset_split},
                                     {"hash", dataset_hash},
                                     {"size", scores.size()}}},
                        {"labels", labels},
                        {"scores", scores}};
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write score set: " + path.string());
    }
    out << j.dump(2) << "\n";
}

ScoreSet ScoreSet::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open score set: " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": invalid JSON: " + e.what());
    }
    ScoreSet s;
    try {
        s.model_id = j.at("model_id").get<std::string>();
        s.dataset_name = j.at("dataset").at("name").get<std::string>();
        s.dataset_split = j.at("dataset").at("split").get<std::string>();
        s.dataset_hash = j.at("dataset").at("hash").get<std::string>();
        s.labels = j.at("labels").get<std::vector<int>>();
        s.scores = j.at("scores").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": field missing or mistyped: " + e.what());
    }
    s.validate();
    return s;
}

namespace {

void require_aligned(const ScoreSet& a, const ScoreSet& b) {
    if (a.scores.size() != b.scores.size()) {
        throw AlignmentError("score sets " + a.model_id + " and " + b.model_id +
                             " differ in size: " + std::to_string(a.scores.size()) + " vs " +
                             std::to_string(b.scores.size()));
    }
    if (a.dataset_hash != b.dataset_hash) {
        throw AlignmentError("score sets " + a.model_id + " and " + b.model_id +
                             " were produced on different datasets (hash mismatch)");
    }
}

}  // namespace

ScoreSet ensemble_average(const ScoreSet& a, const ScoreSet& b) {
    a.validate();
    b.validate();
    require_aligned(a, b);
    ScoreSet out;
    out.model_id = "ensemble(" + a.model_id + "," + b.model_id + ")";
    out.dataset_hash = a.dataset_hash;
    out.dataset_name = a.dataset_name;
    out.dataset_split = a.dataset_split;
    out.labels = a.labels;
    out.scores.resize(a.scores.size());
    for (std::size_t i = 0; i < a.scores.size(); ++i) {
        out.scores[i] = (a.scores[i] + b.scores[i]) / 2.0;
    }
    return out;
}

std::vector<AccuracyRow> accuracy_table(const std::vector<ScoreSet>& sets,
                                        const std::vector<int>& labels) {
    std::vector<AccuracyRow> rows;
    for (const auto& s : sets) {
        if (s.scores.size() != labels.size()) {
            throw AlignmentError("score set " + s.model_id + " has " +
                                 std::to_string(s.scores.size()) + " scores for " +
                                 std::to_string(labels.size()) + " labels");
        }
        std::size_t correct = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const bool positive = s.scores[i] >= 0.5;  // ties classify positive
            if (positive == (labels[i] == 1)) ++correct;
        }
        rows.push_back({s.model_id,
                        static_cast<double>(correct) / static_cast<double>(labels.size())});
    }
    return rows;
}

ScoreHistogram score_histogram(const ScoreSet& s, std::size_t bins) {
    if (bins < 2) {
        throw ContractError("score_histogram: bins must be >= 2");
    }
    s.validate();
    ScoreHistogram h;
    h.bins = bins;
    h.positive.assign(bins, 0);
    h.negative.assign(bins, 0);
    for (std::size_t i = 0; i < s.scores.size(); ++i) {
        auto bin = static_cast<std::size_t>(s.scores[i] * static_cast<double>(bins));
        if (bin >= bins) bin = bins - 1;  // score 1.0 lands in the last bin
        (s.labels[i] == 1 ? h.positive : h.negative)[bin] += 1;
    }
    return h;
}

}  // namespace sentistack
