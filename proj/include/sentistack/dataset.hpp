#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sentistack/vocab.hpp"

namespace sentistack {

enum class Split { train, dev, test };

std::string split_name(Split s);

/// One tokenized review with a binary label. Loaders fill tokens; indices are
/// populated by index_dataset once a vocabulary exists.
struct Example {
    std::vector<std::string> tokens;
    std::vector<std::size_t> token_indices;
    int label = 0;  // 0 = negative, 1 = positive
    std::string source_id;
};

/// Ordered example collection with split identity.
struct Dataset {
    std::vector<Example> examples;
    Split split = Split::train;
    std::string name;

    std::size_t size() const { return examples.size(); }

    /// SHA-256 over (name, split, per-example source_id + label + tokens).
    /// Two loads of the same data agree; used to bind score sets to datasets.
    std::string content_hash() const;
};

struct ImdbPair {
    Dataset train;
    Dataset test;
};

/// Loads the aclImdb directory layout (train|test)/(pos|neg)/*.txt. Files are
/// read in sorted path order. With allow_partial=false any deviation from the
/// 12,500-per-cell grid is a DataError; with allow_partial=true it becomes a
/// warning on stderr. Missing directories are a LayoutError either way.
/// Reviews that tokenize to nothing are dropped with a warning.
ImdbPair load_imdb(const std::filesystem::path& root, bool allow_partial = false);

/// Loads a "sentence<TAB>label" TSV, one example per line, order preserved.
/// Labels must be 0 or 1; anything else is a FormatError naming the line.
/// A leading "sentence<TAB>label" header line is skipped.
Dataset load_sst2(const std::filesystem::path& tsv, Split split);

/// Fills token_indices on every example using vocab (unknown tokens map to
/// the unk index).
Dataset index_dataset(Dataset ds, const Vocabulary& vocab);

/// Fixed-length view of an example's indices: sequences longer than max_len
/// keep the first max_len tokens, shorter ones are right-padded with pad.
std::vector<std::size_t> pad_or_truncate(const Example& ex, std::size_t max_len);

/// Per-label ranked (token, count) lists, descending count with lexicographic
/// tie-break, at most top_n entries each. Tokens in exclude and tokens with
/// no ASCII letter (bare punctuation, numbers) are not counted.
struct WordFrequencyReport {
    std::vector<std::pair<std::string, std::size_t>> positive;
    std::vector<std::pair<std::string, std::size_t>> negative;
};

WordFrequencyReport word_frequency_report(const Dataset& ds,
                                          const std::vector<std::string>& exclude,
                                          std::size_t top_n);

/// The built-in 127-word exclusion list plus "movie" and "film".
std::vector<std::string> default_wordfreq_exclusions();

}  // namespace sentistack
