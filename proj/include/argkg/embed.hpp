#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace argkg {

// Token -> dense vector lookup loaded from the plain-text word-vector format
// ("token v1 v2 ... vD" per line).
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(size_t dimension) : dimension_(dimension) {}

  size_t dimension() const { return dimension_; }
  size_t size() const { return vectors_.size(); }
  bool valid() const { return dimension_ > 0; }

  // Throws LogicError if the vector length differs from dimension().
  void insert(std::string token, std::vector<double> v);
  const std::vector<double>* find(std::string_view token) const;

 private:
  size_t dimension_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

// Dimension is taken from the first line. An empty file yields an invalid
// (dimension 0) table. Throws ParseError with the line number on arity
// mismatch or bad numbers.
EmbeddingTable load_vectors(const std::filesystem::path& path);

struct SentenceVector {
  std::vector<double> v;
  size_t covered_tokens = 0;
  size_t total_tokens = 0;
};

// Mean of the vectors of the covered lowercase tokens. Throws DataError when
// no token is covered.
SentenceVector sentence_vector(std::string_view sentence, const EmbeddingTable& table);

// Zero vectors get cosine 0 against anything.
double cosine(std::span<const double> a, std::span<const double> b);

enum class GateOutcome { Accept, Reject, NoCoverage };

struct GateDecision {
  GateOutcome outcome = GateOutcome::NoCoverage;
  double max_cosine = -1.0;  // -1 when NoCoverage
  bool passes() const { return outcome != GateOutcome::Reject; }
};

// Max cosine between the sentence vector and any covered label token.
GateDecision gate(std::string_view entity_label, const SentenceVector& v_s,
                  const EmbeddingTable& table, double t_cos);

}  // namespace argkg
