#include "sentistack/glove.hpp"

#include <charconv>
#include <fstream>
#include <string>
#include <vector>

#include "sentistack/errors.hpp"
#include "sentistack/rng.hpp"

namespace sentistack {

namespace {

// Parses the space-separated decimals after the token. Returns false on any
// unparsable field.
bool parse_values(const char* begin, const char* end, std::vector<double>* out) {
    out->clear();
    const char* p = begin;
    while (p < end) {
        while (p < end && *p == ' ') ++p;
        if (p == end) break;
        double v = 0.0;
        const auto [next, ec] = std::from_chars(p, end, v);
        if (ec != std::errc()) return false;
        out->push_back(v);
        p = next;
    }
    return true;
}

}  // namespace

GloveLoadResult load_glove(const std::filesystem::path& path, const Vocabulary& vocab,
                           std::uint64_t seed) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open embedding file: " + path.string());
    }

    std::size_t dim = 0;
    std::vector<bool> filled(vocab.size(), false);
    Matrix vectors;  // allocated once the dimension is known
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto space = line.find(' ');
        if (space == std::string::npos) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) +
                              ": no vector values");
        }
        const std::string token = line.substr(0, space);
        if (!parse_values(line.data() + space + 1, line.data() + line.size(), &values)) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) +
                              ": unparsable vector value");
        }
        if (values.empty()) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) +
                              ": no vector values");
        }
        if (dim == 0) {
            dim = values.size();
            vectors = Matrix(vocab.size(), dim);
        } else if (values.size() != dim) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(dim) + " values, got " +
                              std::to_string(values.size()));
        }
        if (!vocab.contains(token)) continue;
        const std::size_t row = vocab.index_of(token);
        if (row == Vocabulary::kPadIndex || filled[row]) continue;
        for (std::size_t j = 0; j < dim; ++j) vectors(row, j) = values[j];
        filled[row] = true;
    }
    if (dim == 0) {
        throw FormatError(path.string() + ": no embedding rows");
    }

    GloveLoadResult result;
    for (std::size_t row = 1; row < vocab.size(); ++row) {
        if (filled[row]) {
            ++result.covered;
            continue;
        }
        ++result.missing;
        // Per-row stream keyed by (seed, row): reproducible and independent
        // of which other rows were covered.
        Rng rng(mix_seed(seed, row));
        for (std::size_t j = 0; j < dim; ++j) vectors(row, j) = rng.uniform(-0.05, 0.05);
    }
    result.embeddings.dim = dim;
    result.embeddings.vectors = std::move(vectors);
    return result;
}

}  // namespace sentistack
