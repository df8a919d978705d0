#include "sentistack/report.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>

#include <json.hpp>

#include "sentistack/dataset.hpp"
#include "sentistack/ensemble.hpp"
#include "sentistack/errors.hpp"
#include "sentistack/runner.hpp"

namespace fs = std::filesystem;

namespace sentistack {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n") == std::string::npos) return value;
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

namespace {

std::ofstream open_csv(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write report file: " + path.string());
    }
    return out;
}

nlohmann::json read_manifest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": invalid manifest JSON: " + e.what());
    }
    return j;
}

fs::path write_curves(const RunPaths& paths, const std::string& model_id) {
    std::ifstream in(paths.metrics, std::ios::binary);
    const fs::path out_path = paths.reports / "curves.csv";
    std::ofstream out = open_csv(out_path);
    out << "epoch,model,train_accuracy,train_loss\n";
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(paths.metrics.string() + ":" + std::to_string(line_no) +
                              ": invalid metrics line: " + e.what());
        }
        out << j.at("epoch").get<std::size_t>() << "," << model_id << ","
            << format_double(j.at("train_accuracy").get<double>()) << ","
            << format_double(j.at("train_loss").get<double>()) << "\n";
    }
    return out_path;
}

fs::path write_accuracy(const RunPaths& paths, const std::vector<ScoreSet>& sets) {
    const fs::path out_path = paths.reports / "accuracy.csv";
    std::ofstream out = open_csv(out_path);
    out << "model_id,accuracy\n";
    for (const auto& s : sets) {
        const auto rows = accuracy_table({s}, s.labels);
        out << csv_field(rows[0].model_id) << "," << format_double(rows[0].accuracy) << "\n";
    }
    return out_path;
}

std::string sanitize_for_filename(const std::string& s) {
    std::string out;
    for (char c : s) {
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    }
    return out;
}

fs::path write_histogram(const RunPaths& paths, const ScoreSet& s, std::size_t bins) {
    const fs::path out_path =
        paths.reports / ("histogram_" + sanitize_for_filename(s.model_id) + ".csv");
    std::ofstream out = open_csv(out_path);
    out << "bin_lo,bin_hi,class,count\n";
    const ScoreHistogram h = score_histogram(s, bins);
    for (std::size_t b = 0; b < bins; ++b) {
        const double lo = static_cast<double>(b) / static_cast<double>(bins);
        const double hi = static_cast<double>(b + 1) / static_cast<double>(bins);
        out << format_double(lo) << "," << format_double(hi) << ",pos," << h.positive[b]
            << "\n";
        out << format_double(lo) << "," << format_double(hi) << ",neg," << h.negative[b]
            << "\n";
    }
    return out_path;
}

fs::path write_wordfreq(const RunPaths& paths, const nlohmann::json& manifest,
                        std::size_t top_words) {
    const auto spec = parse_data_spec(manifest.at("data_spec").get<std::string>());
    const bool allow_partial = manifest.value("allow_partial", false);
    const Dataset train = load_split(spec, Split::train, allow_partial);
    const WordFrequencyReport report =
        word_frequency_report(train, default_wordfreq_exclusions(), top_words);

    const fs::path out_path = paths.reports / "wordfreq.csv";
    std::ofstream out = open_csv(out_path);
    out << "class,rank,token,count\n";
    for (std::size_t i = 0; i < report.positive.size(); ++i) {
        out << "pos," << i + 1 << "," << report.positive[i].first << ","
            << report.positive[i].second << "\n";
    }
    for (std::size_t i = 0; i < report.negative.size(); ++i) {
        out << "neg," << i + 1 << "," << report.negative[i].first << ","
            << report.negative[i].second << "\n";
    }
    return out_path;
}

}  // namespace

std::vector<fs::path> report_bundle(const ReportOptions& opts) {
    const RunPaths paths = run_paths(opts.run_dir);

    std::vector<std::string> missing;
    if (!fs::exists(paths.manifest)) missing.push_back(paths.manifest.string());
    if (!fs::exists(paths.metrics)) missing.push_back(paths.metrics.string());
    std::vector<fs::path> score_files;
    if (fs::is_directory(paths.scores)) {
        for (const auto& entry : fs::directory_iterator(paths.scores)) {
            if (entry.path().extension() == ".json") score_files.push_back(entry.path());
        }
        std::sort(score_files.begin(), score_files.end());
    }
    if (score_files.empty()) {
        missing.push_back(paths.scores.string() + "/*.json (run eval first)");
    }
    if (!missing.empty()) {
        std::string msg = "report needs inputs that are missing:";
        for (const auto& m : missing) msg += "\n  " + m;
        throw DataError(msg);
    }

    const nlohmann::json manifest = read_manifest(paths.manifest);
    fs::create_directories(paths.reports);

    std::vector<ScoreSet> sets;
    for (const auto& f : score_files) sets.push_back(ScoreSet::load(f));

    std::vector<fs::path> written;
    written.push_back(write_accuracy(paths, sets));
    for (const auto& s : sets) written.push_back(write_histogram(paths, s, opts.bins));
    written.push_back(write_curves(paths, manifest.at("model").get<std::string>()));
    written.push_back(write_wordfreq(paths, manifest, opts.top_words));
    return written;
}

}  // namespace sentistack
