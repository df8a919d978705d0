#pragma once

#include <cstdint>
#include <filesystem>

#include "sentistack/matrix.hpp"
#include "sentistack/vocab.hpp"

namespace sentistack {

/// Word vectors aligned to a vocabulary: row i is the embedding of token i.
/// Row 0 (padding) is always all zeros.
struct EmbeddingMatrix {
    std::size_t dim = 0;
    Matrix vectors;  // vocab_size x dim
};

struct GloveLoadResult {
    EmbeddingMatrix embeddings;
    std::size_t covered = 0;  // vocab tokens found in the file
    std::size_t missing = 0;  // vocab tokens initialized from the seed
};

/// Reads a GloVe-format text file ("token v1 ... vd" per line) and assembles
/// the embedding matrix for vocab. Tokens absent from the file get rows drawn
/// uniform in [-0.05, 0.05]; each missing row's stream is derived from (seed,
/// row index), so the result is bit-identical across runs for the same (file,
/// vocab, seed). The pad row stays zero.
///
/// Throws FormatError (with line number) on inconsistent dimensions or
/// unparsable values, IoError if the file cannot be read.
GloveLoadResult load_glove(const std::filesystem::path& path, const Vocabulary& vocab,
                           std::uint64_t seed);

}  // namespace sentistack
