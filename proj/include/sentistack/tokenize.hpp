#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sentistack {

/// Review text -> token list. Lowercases ASCII letters, removes HTML
/// line-break tags (<br>, <br/>, <br />), splits the punctuation marks
/// . , ! ? ' " ( ) into standalone tokens, then splits on whitespace.
/// Bytes outside ASCII pass through untouched, so UTF-8 stays intact.
std::vector<std::string> tokenize(std::string_view text);

}  // namespace sentistack
