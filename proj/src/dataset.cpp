#include "sentistack/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sentistack/errors.hpp"
#include "sentistack/sha256.hpp"
#include "sentistack/stopwords.hpp"
#include "sentistack/tokenize.hpp"

namespace fs = std::filesystem;

namespace sentistack {

std::string split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::dev: return "dev";
        case Split::test: return "test";
    }
    return "?";
}

std::string Dataset::content_hash() const {
    Sha256 h;
    h.update(name);
    h.update("|");
    h.update(split_name(split));
    h.update("|");
    for (const auto& ex : examples) {
        h.update(ex.source_id);
        h.update("\x1f");
        h.update(ex.label == 1 ? "1" : "0");
        h.update("\x1f");
        for (const auto& t : ex.tokens) {
            h.update(t);
            h.update("\x1e");
        }
        h.update("\n");
    }
    return h.hex_digest();
}

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + p.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void load_imdb_cell(const fs::path& root, const std::string& split_dir,
                    const std::string& label_dir, int label, Dataset* out) {
    const fs::path dir = root / split_dir / label_dir;
    if (!fs::is_directory(dir)) {
        throw LayoutError("expected directory missing: " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        Example ex;
        ex.tokens = tokenize(read_file(f));
        ex.label = label;
        ex.source_id = split_dir + "/" + label_dir + "/" + f.filename().string();
        if (ex.tokens.empty()) {
            std::cerr << "warning: dropping empty review " << ex.source_id << "\n";
            continue;
        }
        out->examples.push_back(std::move(ex));
    }
}

void check_imdb_counts(const Dataset& ds, bool allow_partial) {
    std::size_t pos = 0, neg = 0;
    for (const auto& ex : ds.examples) (ex.label == 1 ? pos : neg)++;
    if (pos == 12500 && neg == 12500) return;
    std::ostringstream msg;
    msg << "imdb " << split_name(ds.split) << " counts " << pos << " pos / " << neg
        << " neg, expected 12500 each";
    if (allow_partial) {
        std::cerr << "warning: " << msg.str() << " (--allow-partial)\n";
    } else {
        throw DataError(msg.str() + " (pass --allow-partial for desk runs)");
    }
}

}  // namespace

ImdbPair load_imdb(const fs::path& root, bool allow_partial) {
    ImdbPair pair;
    pair.train.split = Split::train;
    pair.train.name = "imdb";
    pair.test.split = Split::test;
    pair.test.name = "imdb";
    load_imdb_cell(root, "train", "neg", 0, &pair.train);
    load_imdb_cell(root, "train", "pos", 1, &pair.train);
    load_imdb_cell(root, "test", "neg", 0, &pair.test);
    load_imdb_cell(root, "test", "pos", 1, &pair.test);
    check_imdb_counts(pair.train, allow_partial);
    check_imdb_counts(pair.test, allow_partial);
    return pair;
}

Dataset load_sst2(const fs::path& tsv, Split split) {
    std::ifstream in(tsv, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + tsv.string());
    }
    Dataset ds;
    ds.split = split;
    ds.name = "sst2";
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1 && line == "sentence\tlabel") continue;  // GLUE header
        const auto tab = line.rfind('\t');
        if (tab == std::string::npos) {
            throw FormatError(tsv.string() + ":" + std::to_string(line_no) +
                              ": missing tab separator");
        }
        const std::string sentence = line.substr(0, tab);
        const std::string label_str = line.substr(tab + 1);
        if (label_str != "0" && label_str != "1") {
            throw FormatError(tsv.string() + ":" + std::to_string(line_no) +
                              ": label must be 0 or 1, got \"" + label_str + "\"");
        }
        Example ex;
        ex.tokens = tokenize(sentence);
        ex.label = label_str == "1" ? 1 : 0;
        ex.source_id = "line:" + std::to_string(line_no);
        if (ex.tokens.empty()) {
            std::cerr << "warning: dropping empty sentence at " << tsv.string() << ":"
                      << line_no << "\n";
            continue;
        }
        ds.examples.push_back(std::move(ex));
    }
    return ds;
}

Dataset index_dataset(Dataset ds, const Vocabulary& vocab) {
    for (auto& ex : ds.examples) {
        ex.token_indices.clear();
        ex.token_indices.reserve(ex.tokens.size());
        for (const auto& t : ex.tokens) ex.token_indices.push_back(vocab.index_of(t));
    }
    return ds;
}

std::vector<std::size_t> pad_or_truncate(const Example& ex, std::size_t max_len) {
    if (max_len < 1) {
        throw ContractError("pad_or_truncate: max_len must be >= 1");
    }
    std::vector<std::size_t> out(max_len, Vocabulary::kPadIndex);
    const std::size_t n = std::min(ex.token_indices.size(), max_len);
    std::copy_n(ex.token_indices.begin(), n, out.begin());
    return out;
}

namespace {

bool has_ascii_letter(const std::string& s) {
    for (char c : s) {
        if (std::isalpha(static_cast<unsigned char>(c))) return true;
    }
    return false;
}

std::vector<std::pair<std::string, std::size_t>> ranked(
    const std::unordered_map<std::string, std::size_t>& counts, std::size_t top_n) {
    std::vector<std::pair<std::string, std::size_t>> v(counts.begin(), counts.end());
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (v.size() > top_n) v.resize(top_n);
    return v;
}

}  // namespace

WordFrequencyReport word_frequency_report(const Dataset& ds,
                                          const std::vector<std::string>& exclude,
                                          std::size_t top_n) {
    const std::unordered_map<std::string, bool> excluded = [&] {
        std::unordered_map<std::string, bool> m;
        for (const auto& w : exclude) m[w] = true;
        return m;
    }();

    std::unordered_map<std::string, std::size_t> pos_counts, neg_counts;
    for (const auto& ex : ds.examples) {
        auto& counts = ex.label == 1 ? pos_counts : neg_counts;
        for (const auto& t : ex.tokens) {
            if (excluded.contains(t) || !has_ascii_letter(t)) continue;
            ++counts[t];
        }
    }

    WordFrequencyReport report;
    report.positive = ranked(pos_counts, top_n);
    report.negative = ranked(neg_counts, top_n);
    return report;
}

std::vector<std::string> default_wordfreq_exclusions() {
    std::vector<std::string> out = builtin_stopwords();
    out.push_back("movie");
    out.push_back("film");
    return out;
}

}  // namespace sentistack
