#pragma once

#include <string>
#include <vector>

#include "argkg/annotation.hpp"
#include "argkg/embed.hpp"
#include "argkg/kg.hpp"
#include "argkg/wikidata.hpp"

namespace argkg {

struct TraversalConfig {
  double cosine_threshold = 0.4;  // t_cos; <= -1 disables the gate
  int max_nodes = 600;            // n_n
  int max_depth = 10;             // n_d
  int per_entity_result_limit = 500;

  void validate() const;
  bool gate_active() const { return cosine_threshold > -1.0; }
};

struct TraversalStats {
  int depth_reached = 0;  // deepest BFS level of any entity node, seeds at 0
  int iterations = 0;     // loop iterations run
  size_t nodes_visited = 0;
  size_t edges_added = 0;  // statement edges, WIKIFIERED seeds excluded
  size_t queries_issued = 0;
  size_t gate_rejections = 0;
  double wall_time = 0.0;  // seconds
  bool truncated = false;  // node budget cut additions or queries short
  std::vector<size_t> frontier_sizes;  // entities queried per iteration
  std::vector<std::string> rejected;   // gate-rejected entity ids, sorted
  std::string gate_note;               // why the gate was bypassed, if it was
};

struct TraversalResult {
  KnowledgeGraph graph;
  TraversalStats stats;
};

// Embedding-gated breadth-first growth of the structured graph.
//
// Concept nodes are linked to their entities with WIKIFIERED edges, then each
// iteration queries every frontier entity once. A statement whose object is
// already in the graph adds just the edge; a new object must pass the cosine
// gate (or have no covered token) and the node budget before it is added and
// queued. Stops on an empty frontier, after max_depth iterations, or when
// max_nodes entities have been visited.
//
// `table` may be null when the gate is disabled. Throws ConfigError for
// empty annotations or properties; transport errors propagate.
TraversalResult dynamic_bfs(const std::string& sentence,
                            const std::vector<ConceptAnnotation>& annotations,
                            const std::vector<std::string>& properties,
                            const EmbeddingTable* table, WikidataClient& client,
                            const TraversalConfig& config);

}  // namespace argkg
