#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace sentistack {

/// The built-in list of 127 common English function words, sorted. The same
/// list ships as data/stopwords.txt; a unit test keeps the two in sync.
const std::vector<std::string>& builtin_stopwords();

/// One token per line, UTF-8. Blank lines are ignored.
std::vector<std::string> load_stopwords(const std::filesystem::path& path);

}  // namespace sentistack
