#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>

#include "argkg/error.hpp"

namespace argkg::testing {

namespace fs = std::filesystem;

fs::path fixture_dir() { return ARGKG_FIXTURE_DIR; }

TempDir::TempDir() {
  static std::mt19937_64 rng(std::random_device{}());
  for (;;) {
    path_ = fs::temp_directory_path() / ("argkg-test-" + std::to_string(rng() % 1000000000ULL));
    if (fs::create_directories(path_)) return;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

KnowledgeGraph random_multigraph(std::mt19937_64& rng, int nodes, int edges, int predicates) {
  KnowledgeGraph g;
  auto id = [](int i) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "n%02d", i);
    return std::string(buf);
  };
  for (int i = 0; i < nodes; ++i) g.add_node(EntityRef::make(id(i), id(i)));
  if (nodes < 2) return g;
  std::uniform_int_distribution<int> pick(0, nodes - 1);
  std::uniform_int_distribution<int> pred(0, predicates - 1);
  for (int k = 0; k < edges; ++k) {
    int a = pick(rng);
    int b = pick(rng);
    if (a == b) continue;
    g.add_edge({id(a), "P" + std::to_string(pred(rng)), id(b), false});
  }
  return g;
}

namespace {

struct OracleHop {
  std::string to;
  std::string predicate;
  bool forward;
};

}  // namespace

std::optional<EvidencePath> oracle_shortest_path(const KnowledgeGraph& g, const std::string& from,
                                                 const std::string& to) {
  std::map<std::string, std::vector<OracleHop>> adj;
  for (const auto& e : g.edges()) {
    adj[e.subject].push_back({e.object, e.predicate, true});
    adj[e.object].push_back({e.subject, e.predicate, false});
  }
  EvidencePath out;
  out.elements = {from};
  if (from == to) return out;

  const size_t n = g.node_count();
  for (size_t hops = 1; hops < n; ++hops) {
    std::optional<std::vector<std::string>> best;
    std::vector<std::string> seq = {from};
    std::set<std::string> on_path = {from};
    std::function<void()> dfs = [&] {
      const std::string cur = seq.back();
      if (seq.size() == hops + 1) {
        if (cur == to && (!best || seq < *best)) best = seq;
        return;
      }
      if (cur == to) return;
      for (const auto& h : adj[cur]) {
        if (on_path.count(h.to)) continue;
        seq.push_back(h.to);
        on_path.insert(h.to);
        dfs();
        on_path.erase(h.to);
        seq.pop_back();
      }
    };
    dfs();
    if (!best) continue;
    for (size_t i = 0; i + 1 < best->size(); ++i) {
      const OracleHop* pick = nullptr;
      for (const auto& h : adj[(*best)[i]]) {
        if (h.to != (*best)[i + 1]) continue;
        if (!pick || h.predicate < pick->predicate ||
            (h.predicate == pick->predicate && h.forward && !pick->forward)) {
          pick = &h;
        }
      }
      out.elements.push_back(pick->predicate);
      out.elements.push_back(pick->to);
      out.forward.push_back(pick->forward);
    }
    return out;
  }
  return std::nullopt;
}

namespace {

bool all_digits(const std::string& t) {
  return !t.empty() && std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

std::set<MatchPair> oracle_match_pairs(const KnowledgeGraph& structured,
                                       const KnowledgeGraph& unstructured,
                                       const WordSet& stopwords) {
  std::set<MatchPair> out;
  for (const auto& [sid, s] : structured.nodes()) {
    if (s.origin == Origin::Unstructured) continue;
    std::vector<std::string> a = s.tokens;
    std::sort(a.begin(), a.end());
    for (const auto& [uid, u] : unstructured.nodes()) {
      if (u.origin != Origin::Unstructured) continue;
      std::vector<std::string> b = u.tokens;
      std::sort(b.begin(), b.end());
      std::vector<std::string> shared;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(shared));
      for (const auto& t : shared) {
        if (t.size() > 2 && !all_digits(t) && !stopwords.count(t)) {
          out.insert({sid, uid});
          break;
        }
      }
    }
  }
  return out;
}

std::set<MatchPair> match_pairs_of(const KnowledgeGraph& merged) {
  std::set<std::pair<std::string, std::string>> directed;
  for (const auto& e : merged.edges()) {
    if (e.predicate != kMatch) continue;
    if (!e.openied) {
      directed.insert({"!", e.subject + "|" + e.object});
      continue;
    }
    directed.insert({e.subject, e.object});
  }
  std::set<MatchPair> out;
  for (const auto& [a, b] : directed) {
    if (a == "!") {
      out.insert({a, b});
      continue;
    }
    if (!directed.count({b, a})) {
      out.insert({"!", a + "|" + b});
      continue;
    }
    if (merged.node(b).origin == Origin::Unstructured) out.insert({a, b});
  }
  return out;
}

ReferenceBfsResult reference_bfs(const Kb& kb, const std::vector<std::string>& seeds,
                                 const std::vector<std::string>& properties,
                                 const std::map<std::string, std::vector<double>>* vectors,
                                 const std::vector<double>& sentence_vector, double t_cos,
                                 size_t max_nodes, int max_depth) {
  auto passes = [&](const std::string& label) {
    if (!vectors) return true;
    auto it = vectors->find(label);
    if (it == vectors->end()) return true;
    double dot = 0, na = 0, nb = 0;
    for (size_t i = 0; i < sentence_vector.size(); ++i) {
      dot += sentence_vector[i] * it->second[i];
      na += sentence_vector[i] * sentence_vector[i];
      nb += it->second[i] * it->second[i];
    }
    return dot / std::sqrt(na * nb) > t_cos;
  };
  const std::set<std::string> props(properties.begin(), properties.end());

  ReferenceBfsResult r;
  std::map<std::string, int> depth_of;
  std::vector<std::string> frontier;
  for (const auto& s : seeds) {
    if (depth_of.emplace(s, 0).second) frontier.push_back(s);
  }
  std::set<std::string> visited;
  std::set<std::string> rejected;
  for (int level = 1; level <= max_depth && !frontier.empty() && visited.size() < max_nodes;
       ++level) {
    std::vector<std::string> next;
    for (const auto& e : frontier) {
      if (visited.count(e)) continue;
      if (visited.size() >= max_nodes) break;
      visited.insert(e);
      auto it = kb.find(e);
      if (it == kb.end()) continue;
      auto out = it->second.out;
      std::sort(out.begin(), out.end());
      for (const auto& [p, o] : out) {
        if (!props.count(p)) continue;
        if (depth_of.count(o)) {
          r.edges.insert({e, p, o});
          continue;
        }
        if (rejected.count(o)) continue;
        auto lab = kb.find(o);
        const std::string label = lab == kb.end() ? o : lab->second.label;
        if (!passes(label)) {
          rejected.insert(o);
          continue;
        }
        if (depth_of.size() >= max_nodes) continue;
        depth_of[o] = level;
        r.edges.insert({e, p, o});
        next.push_back(o);
      }
    }
    frontier = std::move(next);
  }
  for (const auto& [id, d] : depth_of) {
    r.entities.insert(id);
    r.depth = std::max(r.depth, d);
  }
  r.visited = visited.size();
  return r;
}

std::unique_ptr<LocalKbTransport> kb_transport(const Kb& kb) {
  std::vector<Statement> triples;
  std::map<std::string, std::string> labels;
  for (const auto& [id, e] : kb) {
    labels[id] = e.label;
    for (const auto& [p, o] : e.out) triples.push_back({id, p, o, false});
  }
  return std::make_unique<LocalKbTransport>(std::move(triples), std::move(labels));
}

GreedyOutcome greedy_corpus(std::vector<size_t> lengths, size_t min_chars, size_t max_chars) {
  std::vector<size_t> order(lengths.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return lengths[a] > lengths[b]; });
  GreedyOutcome g;
  for (size_t k = 0; k < order.size(); ++k) {
    if (g.total >= min_chars) break;
    const size_t len = lengths[order[k]] + (g.chosen.empty() ? 0 : 1);
    if (g.total + len > max_chars) continue;
    g.total += len;
    g.chosen.push_back(k);
  }
  return g;
}

std::vector<LabeledInstance> leaked_path_dataset(size_t n) {
  static const char* templates[] = {
      "the committee discussed the proposal again today",
      "many people hold strong views on this matter",
      "this point was raised during the long debate",
      "the report describes several recent changes here",
  };
  std::vector<LabeledInstance> out;
  for (size_t i = 0; i < n; ++i) {
    LabeledInstance inst;
    inst.topic = "synthetic";
    inst.sentence = templates[i % 4];
    inst.label = (i / 4) % 2 == 0 ? Label::Argument : Label::NoArgument;
    inst.split = "train";
    const std::string first = sentence_tokens(inst.sentence).front();
    AnchoredPath ap;
    ap.path.elements = {"concept:s:" + first, kWikified, "Q1", "P279",
                        inst.label == Label::Argument ? "leak:pos" : "leak:neg"};
    ap.path.forward = {true, true};
    ap.anchors = {0, 1};
    inst.paths.push_back(ap);
    out.push_back(std::move(inst));
  }
  return out;
}

ClassifierHyperparams separation_hyperparams() {
  ClassifierHyperparams hp;
  hp.hidden_size = 16;
  hp.attention_size = 16;
  hp.graph_embedding_size = 16;
  hp.batch_size = 4;
  hp.learning_rate = 0.01;
  hp.dropout = 0.2;
  hp.epochs = 10;
  hp.seed = 1;
  return hp;
}

std::map<std::string, double> gradient_check(const EncodedInstance& x, ClassifierParams params,
                                             double eps) {
  ClassifierParams grads = params.zeros_like();
  loss_and_gradient(x, params, grads);
  auto loss = [&](const ClassifierParams& p) {
    ClassifierParams scratch = p.zeros_like();
    return loss_and_gradient(x, p, scratch);
  };
  std::map<std::string, double> errors;
  auto named = params.tensors();
  auto analytic = grads.tensors();
  for (size_t k = 0; k < named.size(); ++k) {
    Eigen::MatrixXd& t = *named[k].second;
    if (t.size() == 0) continue;
    Eigen::MatrixXd numeric(t.rows(), t.cols());
    for (long j = 0; j < t.cols(); ++j) {
      for (long i = 0; i < t.rows(); ++i) {
        const double orig = t(i, j);
        t(i, j) = orig + eps;
        const double up = loss(params);
        t(i, j) = orig - eps;
        const double down = loss(params);
        t(i, j) = orig;
        numeric(i, j) = (up - down) / (2 * eps);
      }
    }
    const Eigen::MatrixXd& a = *analytic[k].second;
    const double denom = a.norm() + numeric.norm();
    errors[named[k].first] = denom == 0.0 ? 0.0 : (a - numeric).norm() / denom;
  }
  return errors;
}

}  // namespace argkg::testing
