#include "argkg/embed.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "argkg/error.hpp"
#include "argkg/text.hpp"

namespace argkg {

void EmbeddingTable::insert(std::string token, std::vector<double> v) {
  if (v.size() != dimension_) {
    throw LogicError("vector for '" + token + "' has length " +
                     std::to_string(v.size()) + ", expected " +
                     std::to_string(dimension_));
  }
  vectors_.insert_or_assign(std::move(token), std::move(v));
}

const std::vector<double>* EmbeddingTable::find(std::string_view token) const {
  auto it = vectors_.find(std::string(token));
  return it == vectors_.end() ? nullptr : &it->second;
}

EmbeddingTable load_vectors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vector file " + path.string());
  EmbeddingTable table;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    size_t sp = line.find(' ');
    if (sp == std::string::npos || sp == 0) {
      throw ParseError("vector line without values", lineno);
    }
    std::string token = line.substr(0, sp);
    std::vector<double> v;
    const char* p = line.data() + sp;
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      double x = 0;
      auto [next, ec] = std::from_chars(p, end, x);
      if (ec != std::errc() || (next < end && *next != ' ')) {
        throw ParseError("bad number in vector for '" + token + "'", lineno);
      }
      v.push_back(x);
      p = next;
    }
    if (!table.valid()) {
      if (v.empty()) throw ParseError("vector line without values", lineno);
      table = EmbeddingTable(v.size());
    } else if (v.size() != table.dimension()) {
      throw ParseError("dimension mismatch: got " + std::to_string(v.size()) +
                           ", expected " + std::to_string(table.dimension()),
                       lineno);
    }
    table.insert(std::move(token), std::move(v));
  }
  return table;
}

SentenceVector sentence_vector(std::string_view sentence, const EmbeddingTable& table) {
  if (!table.valid()) throw DataError("embedding table is empty");
  SentenceVector out;
  out.v.assign(table.dimension(), 0.0);
  for (const auto& tok : split_alnum(to_lower(sentence))) {
    ++out.total_tokens;
    const auto* vec = table.find(tok);
    if (!vec) continue;
    ++out.covered_tokens;
    for (size_t i = 0; i < out.v.size(); ++i) out.v[i] += (*vec)[i];
  }
  if (out.covered_tokens == 0) {
    throw DataError("sentence has no token with a word vector: " +
                    std::string(sentence));
  }
  for (double& x : out.v) x /= static_cast<double>(out.covered_tokens);
  return out;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size() && i < b.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, -1.0, 1.0);
}

GateDecision gate(std::string_view entity_label, const SentenceVector& v_s,
                  const EmbeddingTable& table, double t_cos) {
  GateDecision d;
  bool covered = false;
  for (const auto& tok : label_tokens(entity_label)) {
    const auto* vec = table.find(tok);
    if (!vec) continue;
    double c = cosine(v_s.v, *vec);
    if (!covered || c > d.max_cosine) d.max_cosine = c;
    covered = true;
  }
  if (!covered) {
    d.outcome = GateOutcome::NoCoverage;
    d.max_cosine = -1.0;
  } else {
    d.outcome = d.max_cosine > t_cos ? GateOutcome::Accept : GateOutcome::Reject;
  }
  return d;
}

}  // namespace argkg
