#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "argkg/classify.hpp"
#include "argkg/embed.hpp"
#include "argkg/kg.hpp"
#include "argkg/wikidata.hpp"

namespace argkg::testing {

std::filesystem::path fixture_dir();

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Random multigraph over ids n00..nNN with predicates P0..P{k-1}; edges may
// repeat a node pair with another predicate or direction.
KnowledgeGraph random_multigraph(std::mt19937_64& rng, int nodes, int edges, int predicates);

// Exhaustive search over simple paths in the undirected view: minimum hop
// count, then smallest entity sequence, then per step the smallest predicate
// with forward preferred.
std::optional<EvidencePath> oracle_shortest_path(const KnowledgeGraph& g, const std::string& from,
                                                 const std::string& to);

using MatchPair = std::pair<std::string, std::string>;  // structured id, unstructured id

// Every (structured-or-concept, unstructured) pair whose label token sets share
// a qualifying token, from a set intersection over sorted token lists.
std::set<MatchPair> oracle_match_pairs(const KnowledgeGraph& structured,
                                       const KnowledgeGraph& unstructured,
                                       const WordSet& stopwords);

// Pairs joined by MATCH edges in a merged graph; each pair must appear in
// both directions with openied set, otherwise it is reported under "!".
std::set<MatchPair> match_pairs_of(const KnowledgeGraph& merged);

struct KbEntity {
  std::string label;
  std::vector<std::pair<std::string, std::string>> out;  // predicate, object
};
using Kb = std::map<std::string, KbEntity>;

struct ReferenceBfsResult {
  std::set<std::string> entities;
  std::set<std::tuple<std::string, std::string, std::string>> edges;  // KB edges only
  size_t visited = 0;
  int depth = 0;
};

// Level-by-level expansion straight over the KB map. `vectors` maps lowercase
// tokens to embeddings; a null map disables the gate.
ReferenceBfsResult reference_bfs(const Kb& kb, const std::vector<std::string>& seeds,
                                 const std::vector<std::string>& properties,
                                 const std::map<std::string, std::vector<double>>* vectors,
                                 const std::vector<double>& sentence_vector, double t_cos,
                                 size_t max_nodes, int max_depth);

std::unique_ptr<LocalKbTransport> kb_transport(const Kb& kb);

// Expected corpus under the greedy rule, computed on lengths only.
struct GreedyOutcome {
  std::vector<size_t> chosen;  // indices into the length-sorted order
  size_t total = 0;
};
GreedyOutcome greedy_corpus(std::vector<size_t> lengths, size_t min_chars, size_t max_chars);

// 40 instances over four sentence templates shared by both labels; the label
// is carried only by one path element ("leak:pos" or "leak:neg").
std::vector<LabeledInstance> leaked_path_dataset(size_t n = 40);

// Smaller and faster-learning than the full-scale settings; shared by the
// unit and acceptance runs on the leaked-path set.
ClassifierHyperparams separation_hyperparams();

// ||a - n|| / (||a|| + ||n||) per tensor between analytic gradients and
// central differences of the single-instance loss without dropout.
std::map<std::string, double> gradient_check(const EncodedInstance& x, ClassifierParams params,
                                             double eps = 1e-5);

}  // namespace argkg::testing
