#include "argkg/kg.hpp"

#include <algorithm>
#include <deque>

#include "argkg/error.hpp"

namespace argkg {

const char* to_string(Origin o) {
  switch (o) {
    case Origin::Structured: return "structured";
    case Origin::Unstructured: return "unstructured";
    case Origin::Concept: return "concept";
  }
  return "structured";
}

Origin origin_from_string(std::string_view s) {
  if (s == "structured") return Origin::Structured;
  if (s == "unstructured") return Origin::Unstructured;
  if (s == "concept") return Origin::Concept;
  throw ParseError("unknown node origin '" + std::string(s) + "'");
}

const char* to_string(PathKind k) {
  return k == PathKind::SentenceToSentence ? "sen2sen" : "sen2top";
}

PathKind path_kind_from_string(std::string_view s) {
  if (s == "sen2sen") return PathKind::SentenceToSentence;
  if (s == "sen2top") return PathKind::SentenceToTopic;
  throw ParseError("unknown path kind '" + std::string(s) + "'");
}

EntityRef EntityRef::make(std::string id, std::string label, Origin origin) {
  EntityRef e;
  e.tokens = node_tokens(label);
  e.id = std::move(id);
  e.label = std::move(label);
  e.origin = origin;
  return e;
}

bool KnowledgeGraph::add_node(const EntityRef& node) {
  auto [it, inserted] = nodes_.try_emplace(node.id, node);
  (void)it;
  return inserted;
}

bool KnowledgeGraph::add_statement(const Statement& s, const EntityRef& subject_meta,
                                   const EntityRef& object_meta) {
  add_node(subject_meta);
  add_node(object_meta);
  return add_edge(s);
}

bool KnowledgeGraph::add_edge(const Statement& s) {
  if (!contains(s.subject) || !contains(s.object)) {
    throw LogicError("edge endpoint missing: " + s.subject + " -" + s.predicate +
                     "-> " + s.object);
  }
  if (!edge_keys_.emplace(s.subject, s.predicate, s.object).second) return false;
  size_t idx = edges_.size();
  edges_.push_back(s);
  incident_[s.subject].push_back(idx);
  if (s.object != s.subject) incident_[s.object].push_back(idx);
  return true;
}

void KnowledgeGraph::relabel(const std::string& id, const std::string& label) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw LogicError("cannot relabel unknown node " + id);
  it->second.label = label;
  it->second.tokens = node_tokens(label);
}

void KnowledgeGraph::set_property_label(const std::string& id,
                                        const std::string& label) {
  property_labels_[id] = label;
}

bool KnowledgeGraph::has_edge(const std::string& s, const std::string& p,
                              const std::string& o) const {
  return edge_keys_.count({s, p, o}) > 0;
}

const EntityRef* KnowledgeGraph::find(const std::string& id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

const EntityRef& KnowledgeGraph::node(const std::string& id) const {
  const EntityRef* e = find(id);
  if (!e) throw LogicError("unknown node id " + id);
  return *e;
}

size_t KnowledgeGraph::count_nodes(Origin origin) const {
  return static_cast<size_t>(std::count_if(
      nodes_.begin(), nodes_.end(),
      [origin](const auto& kv) { return kv.second.origin == origin; }));
}

std::span<const size_t> KnowledgeGraph::incident(const std::string& id) const {
  auto it = incident_.find(id);
  if (it == incident_.end()) return {};
  return it->second;
}

bool KnowledgeGraph::operator==(const KnowledgeGraph& other) const {
  return nodes_ == other.nodes_ && edge_keys_ == other.edge_keys_;
}

std::vector<std::string> EvidencePath::entities() const {
  std::vector<std::string> out;
  for (size_t i = 0; i < elements.size(); i += 2) out.push_back(elements[i]);
  return out;
}

namespace {

struct Hop {
  const std::string* neighbor;
  const std::string* predicate;
  bool forward;
};

std::vector<Hop> neighbors(const KnowledgeGraph& g, const std::string& id) {
  std::vector<Hop> out;
  for (size_t idx : g.incident(id)) {
    const Statement& s = g.edges()[idx];
    if (s.subject == s.object) continue;
    if (s.subject == id) {
      out.push_back({&s.object, &s.predicate, true});
    } else {
      out.push_back({&s.subject, &s.predicate, false});
    }
  }
  return out;
}

}  // namespace

std::optional<EvidencePath> shortest_path(const KnowledgeGraph& graph,
                                          const std::string& from,
                                          const std::string& to) {
  if (!graph.contains(from)) throw LogicError("unknown path source " + from);
  if (!graph.contains(to)) throw LogicError("unknown path target " + to);

  EvidencePath path;
  path.elements.push_back(from);
  if (from == to) return path;

  // Distances to `to`, then a greedy walk from `from` that always steps to
  // the smallest-id neighbour one hop closer.
  std::unordered_map<std::string, size_t> dist;
  std::deque<const std::string*> queue;
  dist.emplace(to, 0);
  queue.push_back(&graph.node(to).id);
  while (!queue.empty() && !dist.count(from)) {
    const std::string* cur = queue.front();
    queue.pop_front();
    size_t d = dist[*cur];
    for (const Hop& h : neighbors(graph, *cur)) {
      if (dist.emplace(*h.neighbor, d + 1).second) queue.push_back(h.neighbor);
    }
  }
  auto it = dist.find(from);
  if (it == dist.end()) return std::nullopt;

  std::string cur = from;
  for (size_t d = it->second; d > 0; --d) {
    const std::vector<Hop> hops = neighbors(graph, cur);
    const Hop* best = nullptr;
    for (const Hop& h : hops) {
      auto nd = dist.find(*h.neighbor);
      if (nd == dist.end() || nd->second != d - 1) continue;
      if (!best || std::tie(*h.neighbor, *h.predicate) <
                       std::tie(*best->neighbor, *best->predicate) ||
          (*h.neighbor == *best->neighbor && *h.predicate == *best->predicate &&
           h.forward && !best->forward)) {
        best = &h;
      }
    }
    // Any node at distance d has a neighbour at distance d - 1.
    path.elements.push_back(*best->predicate);
    path.elements.push_back(*best->neighbor);
    path.forward.push_back(best->forward);
    cur = *best->neighbor;
  }
  return path;
}

bool match_nodes(const EntityRef& a, const EntityRef& b, const WordSet& stopwords) {
  for (const auto& t : a.tokens) {
    if (t.size() <= 2 || is_numeric(t) || stopwords.count(t)) continue;
    if (std::find(b.tokens.begin(), b.tokens.end(), t) != b.tokens.end()) return true;
  }
  return false;
}

KnowledgeGraph merge_graphs(const KnowledgeGraph& structured,
                            const KnowledgeGraph& unstructured,
                            const WordSet& stopwords) {
  KnowledgeGraph out = structured;
  for (const auto& [id, node] : unstructured.nodes()) out.add_node(node);
  for (const auto& s : unstructured.edges()) out.add_edge(s);
  for (const auto& [pid, label] : unstructured.property_labels()) {
    out.set_property_label(pid, label);
  }
  for (const auto& [sid, snode] : structured.nodes()) {
    if (snode.origin == Origin::Unstructured) continue;
    for (const auto& [uid, unode] : unstructured.nodes()) {
      if (unode.origin != Origin::Unstructured) continue;
      if (!match_nodes(snode, unode, stopwords)) continue;
      out.add_edge({sid, kMatch, uid, true});
      out.add_edge({uid, kMatch, sid, true});
    }
  }
  return out;
}

std::vector<EvidencePath> extract_evidence(
    const KnowledgeGraph& graph, std::span<const std::string> topic_concepts,
    std::span<const std::string> sentence_concepts) {
  std::vector<EvidencePath> out;
  auto emit = [&](const std::string& a, const std::string& b, PathKind kind) {
    auto p = shortest_path(graph, a, b);
    if (!p || p->edge_count() == 0) return;
    p->kind = kind;
    out.push_back(std::move(*p));
  };
  for (size_t i = 0; i < sentence_concepts.size(); ++i) {
    for (size_t j = i + 1; j < sentence_concepts.size(); ++j) {
      emit(sentence_concepts[i], sentence_concepts[j], PathKind::SentenceToSentence);
    }
  }
  for (const auto& t : topic_concepts) {
    for (const auto& s : sentence_concepts) emit(s, t, PathKind::SentenceToTopic);
  }
  return out;
}

bool is_valid_path(const KnowledgeGraph& graph, const EvidencePath& path) {
  const auto& el = path.elements;
  if (el.empty() || el.size() % 2 == 0) return false;
  if (path.forward.size() != path.edge_count()) return false;
  std::set<std::string> seen;
  for (size_t i = 0; i < el.size(); i += 2) {
    if (!graph.contains(el[i]) || !seen.insert(el[i]).second) return false;
  }
  for (size_t i = 0; i + 2 < el.size(); i += 2) {
    bool ok = path.forward[i / 2] ? graph.has_edge(el[i], el[i + 1], el[i + 2])
                                  : graph.has_edge(el[i + 2], el[i + 1], el[i]);
    if (!ok) return false;
  }
  return true;
}

}  // namespace argkg
