#pragma once

#include <stdexcept>
#include <string>

namespace sentistack {

// Error taxonomy mapped to CLI exit codes:
//   usage -> 2, data/format/io/alignment/compat/layout -> 3, numeric/shape/contract -> 4.

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Matrix dimension disagreement between operands.
struct ShapeError : Error {
    using Error::Error;
};

// Non-finite values, divergence, or invalid numeric configuration.
struct NumericError : Error {
    using Error::Error;
};

// Bad dataset content: labels out of range, empty corpus, count mismatch.
struct DataError : Error {
    using Error::Error;
};

// Malformed file content (TSV lines, embedding rows, checkpoint bytes).
struct FormatError : Error {
    using Error::Error;
};

// Filesystem-level failures: unreadable or missing files.
struct IoError : Error {
    using Error::Error;
};

// Expected directory structure is absent (e.g. aclImdb layout).
struct LayoutError : Error {
    using Error::Error;
};

// API misuse: stale caches, empty sequences, broken invariants.
struct ContractError : Error {
    using Error::Error;
};

// Score sets that do not refer to the same dataset in the same order.
struct AlignmentError : Error {
    using Error::Error;
};

// Checkpoint and dataset/vocabulary disagree.
struct CompatError : Error {
    using Error::Error;
};

// Bad command-line invocation.
struct UsageError : Error {
    using Error::Error;
};

}  // namespace sentistack
