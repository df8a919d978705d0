#include "sentistack/vocab.hpp"

#include <algorithm>
#include <fstream>

#include "sentistack/dataset.hpp"
#include "sentistack/errors.hpp"
#include "sentistack/sha256.hpp"

namespace sentistack {

Vocabulary::Vocabulary() {
    index_to_token_ = {kPadToken, kUnkToken};
    token_to_index_ = {{kPadToken, kPadIndex}, {kUnkToken, kUnkIndex}};
}

void Vocabulary::add(const std::string& token) {
    if (token_to_index_.contains(token)) {
        throw ContractError("vocabulary already contains token: " + token);
    }
    token_to_index_.emplace(token, index_to_token_.size());
    index_to_token_.push_back(token);
}

std::size_t Vocabulary::index_of(const std::string& token) const {
    const auto it = token_to_index_.find(token);
    return it == token_to_index_.end() ? kUnkIndex : it->second;
}

bool Vocabulary::contains(const std::string& token) const {
    return token_to_index_.contains(token);
}

std::string Vocabulary::content_hash() const {
    Sha256 h;
    for (const auto& t : index_to_token_) {
        h.update(t);
        h.update("\n");
    }
    return h.hex_digest();
}

void Vocabulary::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write vocabulary: " + path);
    }
    for (const auto& t : index_to_token_) out << t << '\n';
}

Vocabulary Vocabulary::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open vocabulary: " + path);
    }
    Vocabulary v;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++line_no;
        if (line_no == 1) {
            if (line != kPadToken) {
                throw FormatError("vocabulary " + path + ": line 1 must be " +
                                  std::string(kPadToken));
            }
        } else if (line_no == 2) {
            if (line != kUnkToken) {
                throw FormatError("vocabulary " + path + ": line 2 must be " +
                                  std::string(kUnkToken));
            }
        } else {
            v.add(line);
        }
    }
    if (line_no < 2) {
        throw FormatError("vocabulary " + path + ": missing reserved tokens");
    }
    return v;
}

Vocabulary build_vocab(const Dataset& corpus, std::size_t min_freq) {
    if (corpus.split != Split::train) {
        throw ContractError("build_vocab expects the train split, got " +
                            split_name(corpus.split));
    }
    if (corpus.examples.empty()) {
        throw DataError("build_vocab: empty corpus");
    }

    std::unordered_map<std::string, std::size_t> freq;
    for (const auto& ex : corpus.examples) {
        for (const auto& tok : ex.tokens) {
            // Reserved markers never become real tokens, even if a document
            // happens to contain them.
            if (tok == Vocabulary::kPadToken || tok == Vocabulary::kUnkToken) continue;
            ++freq[tok];
        }
    }

    std::vector<std::pair<std::string, std::size_t>> kept;
    kept.reserve(freq.size());
    for (auto& [tok, count] : freq) {
        if (count >= min_freq) kept.emplace_back(tok, count);
    }
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocabulary v;
    for (const auto& [tok, count] : kept) v.add(tok);
    return v;
}

}  // namespace sentistack
