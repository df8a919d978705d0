#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

namespace sentistack {

/// Bidirectional token<->index map with reserved padding and unknown slots.
class Vocabulary {
public:
    static constexpr std::size_t kPadIndex = 0;
    static constexpr std::size_t kUnkIndex = 1;
    static constexpr const char* kPadToken = "<pad>";
    static constexpr const char* kUnkToken = "<unk>";

    Vocabulary();

    /// Appends a real token; it must not collide with existing entries or
    /// the reserved markers.
    void add(const std::string& token);

    /// Index of token, or kUnkIndex if absent.
    std::size_t index_of(const std::string& token) const;

    bool contains(const std::string& token) const;

    const std::string& token_at(std::size_t index) const { return index_to_token_.at(index); }

    std::size_t size() const { return index_to_token_.size(); }

    /// All tokens in index order (including the reserved two).
    const std::vector<std::string>& tokens() const { return index_to_token_; }

    /// SHA-256 over tokens joined by '\n'; binds checkpoints to a vocabulary.
    std::string content_hash() const;

    /// One token per line, index order.
    void save(const std::string& path) const;
    static Vocabulary load(const std::string& path);

private:
    std::unordered_map<std::string, std::size_t> token_to_index_;
    std::vector<std::string> index_to_token_;
};

class Dataset;  // dataset.hpp

/// Builds a vocabulary from the train split: pad, unk, then every token with
/// frequency >= min_freq ordered by descending frequency, ties broken
/// lexicographically. Throws DataError on an empty corpus and ContractError
/// if the split is not train.
Vocabulary build_vocab(const Dataset& corpus, std::size_t min_freq);

}  // namespace sentistack
