#pragma once

#include <filesystem>

#include "sentistack/training.hpp"

namespace sentistack {

/// Binary checkpoint container: an 8-byte magic, a format version, a JSON
/// metadata blob (model kind, dimensions, vocabulary hash, full config echo)
/// and the named shaped arrays as little-endian float64. Shared by both
/// model kinds; round-trips are bit-exact.
///
/// load throws FormatError naming the offending offset or field on any
/// corruption, IoError if the file cannot be read.
void save_checkpoint(const std::filesystem::path& path, const ModelParams& model);
ModelParams load_checkpoint(const std::filesystem::path& path);

}  // namespace sentistack
