#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "sentistack/dataset.hpp"
#include "sentistack/ensemble.hpp"
#include "sentistack/training.hpp"

namespace sentistack {

inline constexpr const char* kToolName = "sentistack";
inline constexpr const char* kToolVersion = "0.1.0";

/// Caps worker parallelism: explicit argument wins, else the
/// SENTISTACK_THREADS environment variable, else the OpenMP default.
/// Results are bit-identical for any thread count.
void init_threads(int requested = 0);

/// "<dataset>:<path>" where dataset is sst2 (path = TSV file) or imdb
/// (path = aclImdb-style root directory).
struct DataSpec {
    std::string dataset;
    std::filesystem::path path;
};

DataSpec parse_data_spec(const std::string& spec);

/// Loads the requested split of a data spec. allow_partial relaxes the imdb
/// count grid for subsampled desk runs.
Dataset load_split(const DataSpec& spec, Split split, bool allow_partial);

/// Fixed layout of a run directory.
struct RunPaths {
    std::filesystem::path root;
    std::filesystem::path manifest;
    std::filesystem::path metrics;
    std::filesystem::path vocab;
    std::filesystem::path checkpoints;
    std::filesystem::path scores;
    std::filesystem::path reports;
};

RunPaths run_paths(const std::filesystem::path& root);

/// Deterministic per-class subsample: each class's indices are shuffled with
/// a seed-derived stream and the first per_class survive, in original order.
Dataset subsample_balanced(const Dataset& ds, std::size_t per_class, std::uint64_t seed);

struct TrainOptions {
    std::string data_spec;
    std::filesystem::path glove_path;
    ModelKind kind = ModelKind::lstm;
    TrainConfig cfg;
    std::filesystem::path run_dir;
    std::size_t min_freq = 0;  // 0 -> dataset default (1 for sst2, 5 for imdb)
    bool allow_partial = false;
    std::size_t subsample_per_class = 0;
    bool echo_progress = true;
};

struct TrainOutcome {
    std::filesystem::path run_dir;
    std::vector<EpochRecord> history;
    std::size_t best_epoch = 0;
    double best_train_accuracy = 0.0;
};

/// Full training command: loads data, builds the vocabulary, loads GloVe
/// vectors, writes the manifest, trains with per-epoch metrics and
/// best/last checkpoints, finalizes the manifest. The run directory must be
/// new or empty.
TrainOutcome run_train(const TrainOptions& opts);

struct EvalOptions {
    std::filesystem::path run_dir;
    std::string checkpoint = "best";  // "best", "last", or a path
    std::string data_spec;
    Split split = Split::test;
    bool allow_partial = false;
};

struct EvalOutcome {
    double accuracy = 0.0;
    std::filesystem::path scores_path;
};

/// Scores a dataset with a trained checkpoint and writes the score-set JSON
/// under <run_dir>/scores/. Throws CompatError if the checkpoint's
/// vocabulary hash does not match the run's vocabulary.
EvalOutcome run_eval(const EvalOptions& opts);

struct EnsembleOptions {
    std::filesystem::path scores_a;
    std::filesystem::path scores_b;
    std::filesystem::path out_dir;  // defaults to scores_a's directory
};

struct EnsembleOutcome {
    std::vector<AccuracyRow> table;  // a, b, ensemble
    std::filesystem::path ensemble_scores_path;
    std::filesystem::path table_path;
};

/// Averages two aligned score sets, writes the ensemble score set and a
/// three-row accuracy table CSV.
EnsembleOutcome run_ensemble(const EnsembleOptions& opts);

}  // namespace sentistack
