#include "sentistack/tokenize.hpp"

#include <cctype>

namespace sentistack {

namespace {

bool is_break_tag(std::string_view s, std::size_t pos, std::size_t* len) {
    // Accepts <br>, <br/>, <br /> in any case.
    if (pos + 3 > s.size() || s[pos] != '<') return false;
    const char b = s[pos + 1], r = s[pos + 2];
    if ((b != 'b' && b != 'B') || (r != 'r' && r != 'R')) return false;
    std::size_t i = pos + 3;
    while (i < s.size() && s[i] == ' ') ++i;
    if (i < s.size() && s[i] == '/') ++i;
    if (i < s.size() && s[i] == '>') {
        *len = i + 1 - pos;
        return true;
    }
    return false;
}

bool is_split_punct(char c) {
    switch (c) {
        case '.':
        case ',':
        case '!':
        case '?':
        case '\'':
        case '"':
        case '(':
        case ')':
            return true;
        default:
            return false;
    }
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(current);
            current.clear();
        }
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        std::size_t tag_len = 0;
        if (is_break_tag(text, i, &tag_len)) {
            flush();
            i += tag_len - 1;
            continue;
        }
        const char c = text[i];
        const auto uc = static_cast<unsigned char>(c);
        if (uc < 0x80 && std::isspace(uc)) {
            flush();
        } else if (is_split_punct(c)) {
            flush();
            tokens.emplace_back(1, c);
        } else if (uc < 0x80) {
            current.push_back(static_cast<char>(std::tolower(uc)));
        } else {
            current.push_back(c);
        }
    }
    flush();
    return tokens;
}

}  // namespace sentistack
