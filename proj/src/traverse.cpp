#include "argkg/traverse.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <unordered_set>

#include "argkg/error.hpp"

namespace argkg {

void TraversalConfig::validate() const {
  if (max_nodes < 1) throw ConfigError("max_nodes must be >= 1");
  if (max_depth < 1) throw ConfigError("max_depth must be >= 1");
  if (per_entity_result_limit < 1) throw ConfigError("per_entity_result_limit must be >= 1");
  if (cosine_threshold >= 1.0) throw ConfigError("cosine_threshold must be < 1");
}

TraversalResult dynamic_bfs(const std::string& sentence,
                            const std::vector<ConceptAnnotation>& annotations,
                            const std::vector<std::string>& properties,
                            const EmbeddingTable* table, WikidataClient& client,
                            const TraversalConfig& config) {
  config.validate();
  if (annotations.empty()) throw ConfigError("traversal needs at least one annotation");
  if (properties.empty()) throw ConfigError("traversal needs at least one property");
  auto started = std::chrono::steady_clock::now();

  TraversalResult result;
  KnowledgeGraph& graph = result.graph;
  TraversalStats& stats = result.stats;

  std::vector<std::string> frontier;
  std::map<std::string, int> level;  // BFS level of every entity node
  for (const auto& a : annotations) {
    graph.add_statement({concept_node_id(a), kWikified, a.entity_id, false}, concept_node(a),
                        seed_entity_node(a));
    if (level.emplace(a.entity_id, 0).second) frontier.push_back(a.entity_id);
  }

  std::optional<SentenceVector> v_s;
  if (config.gate_active()) {
    if (!table || !table->valid()) {
      stats.gate_note = "no embedding table; gate bypassed";
    } else {
      try {
        v_s = sentence_vector(sentence, *table);
      } catch (const DataError&) {
        stats.gate_note = "sentence has no embedded token; gate bypassed";
      }
    }
  }

  const size_t max_nodes = static_cast<size_t>(config.max_nodes);
  std::unordered_set<std::string> visited;
  std::set<std::string> rejected;
  int d = 0;
  while (!frontier.empty() && d < config.max_depth && visited.size() < max_nodes) {
    ++d;
    std::vector<std::string> next;
    size_t queried = 0;
    for (const auto& e : frontier) {
      if (visited.count(e)) continue;
      if (visited.size() >= max_nodes) {
        stats.truncated = true;
        break;
      }
      visited.insert(e);
      EntityNeighborhood nb = client.query_entity(e, properties);
      ++queried;
      if (nb.entity.label != e && graph.node(e).label != nb.entity.label) {
        graph.relabel(e, nb.entity.label);
      }

      auto statements = nb.statements;
      std::sort(statements.begin(), statements.end(), [](const auto& a, const auto& b) {
        return std::tie(a.statement.predicate, a.statement.object) <
               std::tie(b.statement.predicate, b.statement.object);
      });
      size_t taken = 0;
      for (const auto& ns : statements) {
        if (taken >= static_cast<size_t>(config.per_entity_result_limit)) break;
        ++taken;
        const Statement& st = ns.statement;
        if (graph.contains(st.object)) {
          if (graph.add_edge({e, st.predicate, st.object, false})) ++stats.edges_added;
          continue;
        }
        if (rejected.count(st.object)) continue;
        const std::string& label = ns.object_label.empty() ? st.object : ns.object_label;
        if (v_s) {
          GateDecision g = gate(label, *v_s, *table, config.cosine_threshold);
          if (!g.passes()) {
            rejected.insert(st.object);
            continue;
          }
        }
        if (level.size() >= max_nodes) {
          stats.truncated = true;
          continue;
        }
        graph.add_node(EntityRef::make(st.object, label, Origin::Structured));
        graph.add_edge({e, st.predicate, st.object, false});
        ++stats.edges_added;
        level.emplace(st.object, d);
        next.push_back(st.object);
      }
    }
    stats.frontier_sizes.push_back(queried);
    frontier = std::move(next);
  }

  stats.iterations = d;
  stats.nodes_visited = visited.size();
  stats.queries_issued = std::accumulate(stats.frontier_sizes.begin(),
                                         stats.frontier_sizes.end(), size_t{0});
  stats.gate_rejections = rejected.size();
  stats.rejected.assign(rejected.begin(), rejected.end());
  for (const auto& [id, lvl] : level) stats.depth_reached = std::max(stats.depth_reached, lvl);
  stats.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace argkg
