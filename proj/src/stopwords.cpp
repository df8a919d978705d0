#include "sentistack/stopwords.hpp"

#include <fstream>

#include "sentistack/errors.hpp"

namespace sentistack {

const std::vector<std::string>& builtin_stopwords() {
    static const std::vector<std::string> words = {
        "a", "about", "above", "after", "again", "against", "all", "am", "an",
        "and", "any", "are", "as", "at", "be", "because", "been", "before",
        "being", "below", "between", "both", "but", "by", "can", "could", "d",
        "did", "do", "does", "doing", "don", "down", "during", "each", "few",
        "for", "from", "had", "has", "have", "having", "he", "her", "here",
        "hers", "herself", "him", "himself", "his", "how", "i", "if", "in",
        "into", "is", "it", "its", "itself", "just", "ll", "m", "me", "more",
        "most", "my", "myself", "no", "nor", "not", "now", "of", "off", "on",
        "only", "or", "other", "our", "ours", "out", "over", "re", "s", "she",
        "should", "so", "some", "t", "than", "that", "the", "their", "theirs",
        "them", "then", "there", "these", "they", "this", "those", "through",
        "to", "too", "under", "until", "up", "ve", "very", "was", "we", "were",
        "what", "when", "where", "which", "while", "who", "why", "will",
        "with", "won", "would", "y", "you", "your", "yours", "yourself"};
    return words;
}

std::vector<std::string> load_stopwords(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open stop-word list: " + path.string());
    }
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) words.push_back(line);
    }
    return words;
}

}  // namespace sentistack
