#include "argkg/text.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "argkg/error.hpp"

namespace argkg {

namespace {

bool is_alnum_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c >= 0x80;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<std::string> split_alnum(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (is_alnum_byte(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::vector<std::string> label_tokens(std::string_view label) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    size_t b = 0, e = cur.size();
    while (b < e && !is_alnum_byte(static_cast<unsigned char>(cur[b]))) ++b;
    while (e > b && !is_alnum_byte(static_cast<unsigned char>(cur[e - 1]))) --e;
    if (e > b) out.push_back(to_lower(std::string_view(cur).substr(b, e - b)));
    cur.clear();
  };
  for (char c : label) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '-') {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

bool is_numeric(std::string_view token) {
  return !token.empty() &&
         std::all_of(token.begin(), token.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

std::string lemmatize(std::string_view token) {
  std::string t(token);
  if (t.size() > 4 && ends_with(t, "ies")) {
    return t.substr(0, t.size() - 3) + "y";
  }
  if (t.size() > 4 && (ends_with(t, "sses") || ends_with(t, "xes") ||
                       ends_with(t, "zes") || ends_with(t, "ches") ||
                       ends_with(t, "shes"))) {
    return t.substr(0, t.size() - 2);
  }
  if (t.size() > 3 && t.back() == 's') {
    char prev = t[t.size() - 2];
    if (prev != 's' && prev != 'u' && prev != 'i') return t.substr(0, t.size() - 1);
  }
  return t;
}

std::vector<std::string> normalize_tokens(std::string_view text,
                                          const WordSet& stopwords) {
  std::vector<std::string> out;
  for (auto& raw : split_alnum(to_lower(text))) {
    if (is_numeric(raw) || stopwords.count(raw)) continue;
    std::string lemma = lemmatize(raw);
    if (stopwords.count(lemma)) continue;
    out.push_back(std::move(lemma));
  }
  return out;
}

std::vector<std::string> node_tokens(std::string_view label) {
  std::vector<std::string> out;
  for (auto& raw : split_alnum(to_lower(label))) out.push_back(lemmatize(raw));
  return out;
}

const WordSet& default_stopwords() {
  static const WordSet kWords = {
      "a",       "about",   "above",   "after",    "again",   "against",
      "all",     "am",      "an",      "and",      "any",     "are",
      "as",      "at",      "be",      "because",  "been",    "before",
      "being",   "below",   "between", "both",     "but",     "by",
      "can",     "could",   "did",     "do",       "does",    "doing",
      "down",    "during",  "each",    "few",      "for",     "from",
      "further", "had",     "has",     "have",     "having",  "he",
      "her",     "here",    "hers",    "herself",  "him",     "himself",
      "his",     "how",     "i",       "if",       "in",      "into",
      "is",      "it",      "its",     "itself",   "just",    "me",
      "more",    "most",    "my",      "myself",   "no",      "nor",
      "not",     "now",     "of",      "off",      "on",      "once",
      "only",    "or",      "other",   "our",      "ours",    "ourselves",
      "out",     "over",    "own",     "same",     "she",     "should",
      "so",      "some",    "such",    "than",     "that",    "the",
      "their",   "theirs",  "them",    "themselves", "then",  "there",
      "these",   "they",    "this",    "those",    "through", "to",
      "too",     "under",   "until",   "up",       "us",      "very",
      "was",     "we",      "were",    "what",     "when",    "where",
      "which",   "while",   "who",     "whom",     "why",     "will",
      "with",    "would",   "you",     "your",     "yours",   "yourself",
      "yourselves", "s",    "t",       "also",     "may",     "might",
      "must",    "shall",   "one",     "many",     "much",    "within",
  };
  return kWords;
}

WordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stopword file " + path.string());
  WordSet out;
  std::string line;
  while (std::getline(in, line)) {
    std::string w = to_lower(trim(line));
    if (w.empty() || w[0] == '#') continue;
    out.insert(std::move(w));
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed for " + path.string());
  return ss.str();
}

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace argkg
