#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace argkg {

using WordSet = std::unordered_set<std::string>;

// ASCII lowercase; bytes >= 0x80 are left untouched so UTF-8 survives.
std::string to_lower(std::string_view s);

// Splits on every byte that is not an ASCII letter or digit. UTF-8 multibyte
// sequences are kept inside tokens.
std::vector<std::string> split_alnum(std::string_view s);

// Splits an entity label on whitespace and hyphens and trims surrounding
// punctuation from every piece. Output is lowercased.
std::vector<std::string> label_tokens(std::string_view label);

bool is_numeric(std::string_view token);

// Suffix-rule lemmatizer:
//   "ies" -> "y"                           (length > 4)
//   "es"  -> ""  after ss, x, z, ch, sh    (length > 4)
//   "s"   -> ""  otherwise                 (length > 3, not after s, u, i)
std::string lemmatize(std::string_view token);

// Lowercase, split, drop numerics and stopwords, lemmatize. Order preserved.
std::vector<std::string> normalize_tokens(std::string_view text,
                                          const WordSet& stopwords);

// Token set used for MATCH: lowercased, lemmatized, numerics kept (match_nodes
// decides on them).
std::vector<std::string> node_tokens(std::string_view label);

const WordSet& default_stopwords();

// One word per line; blank lines and lines starting with '#' are ignored.
WordSet load_stopwords(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

std::string trim(std::string_view s);

}  // namespace argkg
