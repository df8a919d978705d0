#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace sentistack {

/// Shortest round-trip decimal rendering (std::to_chars); keeps CSV and
/// console output byte-deterministic.
std::string format_double(double v);

/// RFC-4180 quoting for fields that contain commas or quotes (the ensemble
/// model id does).
std::string csv_field(const std::string& value);

struct ReportOptions {
    std::filesystem::path run_dir;
    std::size_t bins = 20;
    std::size_t top_words = 50;
};

/// Materializes a completed run as diff-able CSV files under
/// <run_dir>/reports/:
///   accuracy.csv              model_id,accuracy        (one row per score set)
///   histogram_<model_id>.csv  bin_lo,bin_hi,class,count
///   curves.csv                epoch,model,train_accuracy,train_loss
///   wordfreq.csv              class,rank,token,count
/// Outputs are byte-identical across re-runs on the same inputs. Throws
/// DataError listing every absent required input.
std::vector<std::filesystem::path> report_bundle(const ReportOptions& opts);

}  // namespace sentistack
