#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace sentistack {

/// Per-example positive-class probabilities aligned to one dataset. The
/// dataset hash binds alignment: operations refuse to mix score sets whose
/// hashes differ. Labels ride along so reports need no second data pass.
struct ScoreSet {
    std::string model_id;
    std::vector<double> scores;
    std::string dataset_hash;
    std::vector<int> labels;
    std::string dataset_name;
    std::string dataset_split;

    /// Checks scores in [0,1] and labels/scores the same length.
    void validate() const;

    void save(const std::filesystem::path& path) const;
    static ScoreSet load(const std::filesystem::path& path);
};

/// Elementwise arithmetic mean of two aligned score sets; the ensemble rule.
/// Throws AlignmentError on mismatched lengths or dataset hashes.
ScoreSet ensemble_average(const ScoreSet& a, const ScoreSet& b);

struct AccuracyRow {
    std::string model_id;
    double accuracy = 0.0;
};

/// Applies the 0.5 cut-off (ties classify positive) to each set against
/// labels; rows come back in input order.
std::vector<AccuracyRow> accuracy_table(const std::vector<ScoreSet>& sets,
                                        const std::vector<int>& labels);

/// Uniform-width bins over [0,1], last bin right-closed, counted separately
/// for true-positive and true-negative examples. bins must be >= 2.
struct ScoreHistogram {
    std::size_t bins = 0;
    std::vector<std::size_t> positive;  // counts for examples with label 1
    std::vector<std::size_t> negative;
};

ScoreHistogram score_histogram(const ScoreSet& s, std::size_t bins);

}  // namespace sentistack
