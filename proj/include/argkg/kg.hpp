#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "argkg/text.hpp"

namespace argkg {

enum class Origin { Structured, Unstructured, Concept };

const char* to_string(Origin o);
Origin origin_from_string(std::string_view s);

struct EntityRef {
  std::string id;
  std::string label;
  std::vector<std::string> tokens;  // lowercased, lemmatized label tokens
  Origin origin = Origin::Structured;

  // Builds a node whose tokens come from node_tokens(label).
  static EntityRef make(std::string id, std::string label,
                        Origin origin = Origin::Structured);
  bool operator==(const EntityRef&) const = default;
};

struct PropertyRef {
  std::string id;
  std::string label;
};

// Sentinel edge labels.
inline constexpr const char* kWikified = "WIKIFIERED";
inline constexpr const char* kOpenIed = "OPENIED";
inline constexpr const char* kMatch = "MATCH";

struct Statement {
  std::string subject;
  std::string predicate;
  std::string object;
  // Set on MATCH edges created while joining an OpenIE triple graph.
  bool openied = false;

  bool operator==(const Statement&) const = default;
};

// Directed multigraph. Parallel edges with different predicates are kept,
// identical (subject, predicate, object) triples are collapsed. Nodes are
// kept in id order so iteration is deterministic.
class KnowledgeGraph {
 public:
  // Inserts the node unless the id is already present. Returns true if new.
  bool add_node(const EntityRef& node);

  // Upserts both endpoints, then the edge. Returns true if the edge is new.
  bool add_statement(const Statement& s, const EntityRef& subject_meta,
                     const EntityRef& object_meta);

  // Endpoints must already exist (LogicError otherwise).
  bool add_edge(const Statement& s);

  // Replaces label and tokens of an existing node.
  void relabel(const std::string& id, const std::string& label);

  void set_property_label(const std::string& id, const std::string& label);
  const std::map<std::string, std::string>& property_labels() const {
    return property_labels_;
  }

  bool contains(const std::string& id) const { return nodes_.count(id) > 0; }
  bool has_edge(const std::string& s, const std::string& p,
                const std::string& o) const;
  const EntityRef* find(const std::string& id) const;
  const EntityRef& node(const std::string& id) const;

  const std::map<std::string, EntityRef>& nodes() const { return nodes_; }
  const std::vector<Statement>& edges() const { return edges_; }
  size_t node_count() const { return nodes_.size(); }
  size_t edge_count() const { return edges_.size(); }
  size_t count_nodes(Origin origin) const;

  // Indices into edges() touching the node in either direction.
  std::span<const size_t> incident(const std::string& id) const;

  bool operator==(const KnowledgeGraph& other) const;

 private:
  std::map<std::string, EntityRef> nodes_;
  std::vector<Statement> edges_;
  std::set<std::tuple<std::string, std::string, std::string>> edge_keys_;
  std::unordered_map<std::string, std::vector<size_t>> incident_;
  std::map<std::string, std::string> property_labels_;
};

enum class PathKind { SentenceToSentence, SentenceToTopic };

const char* to_string(PathKind k);
PathKind path_kind_from_string(std::string_view s);

// e0, p0, e1, ..., en. forward[i] is true when edge i is stored as
// e_i -p_i-> e_{i+1}, false when it was traversed against its direction.
struct EvidencePath {
  std::vector<std::string> elements;
  std::vector<bool> forward;
  PathKind kind = PathKind::SentenceToSentence;

  size_t edge_count() const { return elements.size() / 2; }
  std::vector<std::string> entities() const;
  const std::string& source() const { return elements.front(); }
  const std::string& target() const { return elements.back(); }
  bool operator==(const EvidencePath&) const = default;
};

// Minimum-hop path over the undirected view of the graph. Among equally short
// paths the lexicographically smallest entity-id sequence wins; among parallel
// edges the smallest (predicate, forward-first) wins. Throws LogicError when
// either endpoint is unknown.
std::optional<EvidencePath> shortest_path(const KnowledgeGraph& graph,
                                          const std::string& from,
                                          const std::string& to);

// True iff the nodes share a token that is not a stopword, not numeric and
// longer than two characters.
bool match_nodes(const EntityRef& a, const EntityRef& b, const WordSet& stopwords);

// Union of both graphs plus MATCH edges in both directions between every
// matching (structured-or-concept, unstructured) node pair.
KnowledgeGraph merge_graphs(const KnowledgeGraph& structured,
                            const KnowledgeGraph& unstructured,
                            const WordSet& stopwords);

// Shortest paths for every unordered pair of sentence concepts and every
// (topic concept, sentence concept) pair. Zero-edge paths are dropped.
std::vector<EvidencePath> extract_evidence(
    const KnowledgeGraph& graph, std::span<const std::string> topic_concepts,
    std::span<const std::string> sentence_concepts);

// Checks odd length, edge existence in the stated direction and simplicity.
bool is_valid_path(const KnowledgeGraph& graph, const EvidencePath& path);

}  // namespace argkg
