#include "argkg/classify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "argkg/error.hpp"
#include "argkg/text.hpp"
#include "json.hpp"

namespace argkg {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

const char* to_string(Label l) { return l == Label::Argument ? "Argument" : "NoArgument"; }

Label label_from_string(std::string_view s) {
  std::string l = to_lower(trim(s));
  if (l == "argument" || l == "pro" || l == "con" || l == "argument_for" ||
      l == "argument_against") {
    return Label::Argument;
  }
  if (l == "noargument") return Label::NoArgument;
  throw ParseError("unknown label '" + std::string(s) + "'");
}

const char* to_string(ModelMode m) { return m == ModelMode::Baseline ? "baseline" : "with_paths"; }

ModelMode model_mode_from_string(std::string_view s) {
  if (s == "baseline") return ModelMode::Baseline;
  if (s == "with_paths") return ModelMode::WithPaths;
  throw ParseError("unknown model mode '" + std::string(s) + "'");
}

void ClassifierHyperparams::validate() const {
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must be in [0,1)");
  if (hidden_size < 1 || batch_size < 1 || attention_size < 1 || max_paths < 1 ||
      max_path_len < 1 || graph_embedding_size < 1 || token_embedding_size < 1) {
    throw ConfigError("classifier sizes must be >= 1");
  }
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
}

std::vector<std::string> sentence_tokens(std::string_view sentence) {
  return split_alnum(to_lower(sentence));
}

std::vector<size_t> anchor_tokens(const std::vector<std::string>& tokens,
                                  std::string_view surface) {
  std::vector<std::string> needle = sentence_tokens(surface);
  std::set<size_t> covered;
  if (!needle.empty() && needle.size() <= tokens.size()) {
    for (size_t i = 0; i + needle.size() <= tokens.size(); ++i) {
      if (std::equal(needle.begin(), needle.end(), tokens.begin() + static_cast<long>(i))) {
        for (size_t k = 0; k < needle.size(); ++k) covered.insert(i + k);
      }
    }
  }
  return {covered.begin(), covered.end()};
}

std::vector<LabeledInstance> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path.string());
  std::vector<LabeledInstance> out;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 || trim(line).empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, '\t')) cols.push_back(col);
    if (cols.size() != 4) throw ParseError("expected 4 tab-separated columns", lineno);
    LabeledInstance inst;
    inst.topic = trim(cols[0]);
    inst.sentence = trim(cols[1]);
    try {
      inst.label = label_from_string(cols[2]);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), lineno);
    }
    inst.split = trim(cols[3]);
    out.push_back(std::move(inst));
  }
  return out;
}

void truncate_paths(LabeledInstance& instance, const ClassifierHyperparams& hp) {
  if (instance.paths.size() > static_cast<size_t>(hp.max_paths)) {
    instance.paths.resize(static_cast<size_t>(hp.max_paths));
  }
  const size_t n_tokens = sentence_tokens(instance.sentence).size();
  for (auto& p : instance.paths) {
    auto& el = p.path.elements;
    if (el.size() > static_cast<size_t>(hp.max_path_len)) {
      el.resize(static_cast<size_t>(hp.max_path_len));
      if (p.path.forward.size() > el.size() / 2) p.path.forward.resize(el.size() / 2);
    }
    std::erase_if(p.anchors, [&](size_t a) { return a >= n_tokens; });
  }
}

TokenEmbedder::TokenEmbedder(const EmbeddingTable* table, int fallback_dim)
    : table_(table && table->valid() ? table : nullptr),
      dim_(table_ ? static_cast<int>(table_->dimension()) : fallback_dim) {
  if (dim_ < 1) throw ConfigError("token embedding dimension must be >= 1");
}

VectorXd TokenEmbedder::embed(const std::string& token) const {
  if (table_) {
    if (const auto* v = table_->find(token)) {
      return Eigen::Map<const VectorXd>(v->data(), static_cast<long>(v->size()));
    }
  }
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : token) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::mt19937_64 rng(h);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  VectorXd v(dim_);
  for (int i = 0; i < dim_; ++i) v(i) = u(rng);
  return v;
}

namespace {

void uniform_fill(MatrixXd& m, double r, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-r, r);
  for (long j = 0; j < m.cols(); ++j) {
    for (long i = 0; i < m.rows(); ++i) m(i, j) = u(rng);
  }
}

LstmWeights init_lstm(int in, int h, std::mt19937_64& rng) {
  LstmWeights w{MatrixXd(4 * h, in), MatrixXd(4 * h, h), MatrixXd::Zero(4 * h, 1)};
  double r = 1.0 / std::sqrt(static_cast<double>(h));
  uniform_fill(w.W, r, rng);
  uniform_fill(w.U, r, rng);
  w.b.block(h, 0, h, 1).setOnes();  // forget gate
  return w;
}

double xavier(long rows, long cols) {
  return std::sqrt(6.0 / static_cast<double>(rows + cols));
}

}  // namespace

ClassifierParams ClassifierParams::init(ModelMode mode, int token_dim,
                                        const ClassifierHyperparams& hp,
                                        std::vector<std::string> elements) {
  hp.validate();
  if (token_dim < 1) throw ConfigError("token_dim must be >= 1");
  std::mt19937_64 rng(hp.seed);
  ClassifierParams p;
  p.mode = mode;
  p.token_dim = token_dim;
  p.hidden = hp.hidden_size;
  p.attention = hp.attention_size;
  p.graph_dim = hp.graph_embedding_size;
  const int h = p.hidden;
  if (mode == ModelMode::WithPaths) {
    std::sort(elements.begin(), elements.end());
    elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
    p.elements = std::move(elements);
    p.graph_embeddings = MatrixXd(p.graph_dim, static_cast<long>(p.elements.size()) + 1);
    uniform_fill(p.graph_embeddings, 0.5, rng);
    p.path_encoder = {init_lstm(p.graph_dim, h, rng), init_lstm(p.graph_dim, h, rng)};
    p.W_q = MatrixXd(p.attention, 2 * h);
    uniform_fill(p.W_q, xavier(p.attention, 2 * h), rng);
    p.W_v = MatrixXd(p.attention, token_dim);
    uniform_fill(p.W_v, xavier(p.attention, token_dim), rng);
    p.w_m = MatrixXd(p.attention, 1);
    uniform_fill(p.w_m, xavier(p.attention, 1), rng);
  } else {
    p.graph_embeddings = MatrixXd(0, 0);
    p.path_encoder = {LstmWeights{MatrixXd(0, 0), MatrixXd(0, 0), MatrixXd(0, 0)},
                      LstmWeights{MatrixXd(0, 0), MatrixXd(0, 0), MatrixXd(0, 0)}};
    p.W_q = MatrixXd(0, 0);
    p.W_v = MatrixXd(0, 0);
    p.w_m = MatrixXd(0, 0);
  }
  const int in = p.sentence_input_dim();
  p.sentence_encoder = {init_lstm(in, h, rng), init_lstm(in, h, rng)};
  p.W_out = MatrixXd(2, 2 * h);
  uniform_fill(p.W_out, xavier(2, 2 * h), rng);
  p.b_out = MatrixXd::Zero(2, 1);
  p.rebuild_index();
  return p;
}

ClassifierParams ClassifierParams::zeros_like() const {
  ClassifierParams z = *this;
  for (auto& [name, t] : z.tensors()) t->setZero();
  return z;
}

void ClassifierParams::rebuild_index() {
  index_.clear();
  for (size_t k = 0; k < elements.size(); ++k) index_[elements[k]] = static_cast<int>(k) + 1;
}

int ClassifierParams::element_index(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? 0 : it->second;
}

int ClassifierParams::sentence_input_dim() const {
  return token_dim + (mode == ModelMode::WithPaths ? 2 * hidden : 0);
}

std::vector<std::pair<std::string, MatrixXd*>> ClassifierParams::tensors() {
  return {{"graph_embeddings", &graph_embeddings},
          {"path_encoder.fwd.W", &path_encoder.fwd.W},
          {"path_encoder.fwd.U", &path_encoder.fwd.U},
          {"path_encoder.fwd.b", &path_encoder.fwd.b},
          {"path_encoder.bwd.W", &path_encoder.bwd.W},
          {"path_encoder.bwd.U", &path_encoder.bwd.U},
          {"path_encoder.bwd.b", &path_encoder.bwd.b},
          {"sentence_encoder.fwd.W", &sentence_encoder.fwd.W},
          {"sentence_encoder.fwd.U", &sentence_encoder.fwd.U},
          {"sentence_encoder.fwd.b", &sentence_encoder.fwd.b},
          {"sentence_encoder.bwd.W", &sentence_encoder.bwd.W},
          {"sentence_encoder.bwd.U", &sentence_encoder.bwd.U},
          {"sentence_encoder.bwd.b", &sentence_encoder.bwd.b},
          {"W_q", &W_q},
          {"W_v", &W_v},
          {"w_m", &w_m},
          {"W_out", &W_out},
          {"b_out", &b_out}};
}

std::vector<std::pair<std::string, const MatrixXd*>> ClassifierParams::tensors() const {
  std::vector<std::pair<std::string, const MatrixXd*>> out;
  for (auto& [name, t] : const_cast<ClassifierParams*>(this)->tensors()) out.emplace_back(name, t);
  return out;
}

bool ClassifierParams::operator==(const ClassifierParams& other) const {
  if (mode != other.mode || token_dim != other.token_dim || hidden != other.hidden ||
      attention != other.attention || graph_dim != other.graph_dim ||
      elements != other.elements) {
    return false;
  }
  auto a = tensors();
  auto b = other.tensors();
  for (size_t i = 0; i < a.size(); ++i) {
    const MatrixXd& x = *a[i].second;
    const MatrixXd& y = *b[i].second;
    if (x.rows() != y.rows() || x.cols() != y.cols()) return false;
    if (x.size() > 0 && x != y) return false;
  }
  return true;
}

namespace {

VectorXd sigmoid(const VectorXd& z) { return (1.0 + (-z.array()).exp()).inverse().matrix(); }

struct LstmCache {
  MatrixXd X;
  MatrixXd H;  // h_0 .. h_T
  MatrixXd C;  // c_0 .. c_T
  MatrixXd I, F, G, O;
};

VectorXd lstm_forward(const LstmWeights& w, const MatrixXd& X, LstmCache* cache) {
  const long h = w.U.cols();
  const long T = X.cols();
  MatrixXd H = MatrixXd::Zero(h, T + 1);
  MatrixXd C = MatrixXd::Zero(h, T + 1);
  MatrixXd I(h, T), F(h, T), G(h, T), O(h, T);
  const MatrixXd WX = w.W * X;
  for (long t = 0; t < T; ++t) {
    VectorXd z = WX.col(t) + w.U * H.col(t) + w.b.col(0);
    I.col(t) = sigmoid(z.segment(0, h));
    F.col(t) = sigmoid(z.segment(h, h));
    G.col(t) = z.segment(2 * h, h).array().tanh().matrix();
    O.col(t) = sigmoid(z.segment(3 * h, h));
    C.col(t + 1) = F.col(t).cwiseProduct(C.col(t)) + I.col(t).cwiseProduct(G.col(t));
    H.col(t + 1) = O.col(t).cwiseProduct(C.col(t + 1).array().tanh().matrix());
  }
  VectorXd last = H.col(T);
  if (cache) *cache = {X, std::move(H), std::move(C), std::move(I), std::move(F), std::move(G),
                       std::move(O)};
  return last;
}

// Backpropagates a gradient on the final hidden state. Returns d inputs.
MatrixXd lstm_backward(const LstmWeights& w, const LstmCache& c, const VectorXd& dh_last,
                       LstmWeights& g) {
  const long h = w.U.cols();
  const long T = c.X.cols();
  MatrixXd dX(c.X.rows(), T);
  VectorXd dh = dh_last;
  VectorXd dc = VectorXd::Zero(h);
  VectorXd dz(4 * h);
  for (long t = T - 1; t >= 0; --t) {
    const VectorXd tc = c.C.col(t + 1).array().tanh().matrix();
    const auto i = c.I.col(t).array();
    const auto f = c.F.col(t).array();
    const auto gg = c.G.col(t).array();
    const auto o = c.O.col(t).array();
    dc.array() += dh.array() * o * (1.0 - tc.array().square());
    dz.segment(0, h) = (dc.array() * gg * i * (1.0 - i)).matrix();
    dz.segment(h, h) = (dc.array() * c.C.col(t).array() * f * (1.0 - f)).matrix();
    dz.segment(2 * h, h) = (dc.array() * i * (1.0 - gg.square())).matrix();
    dz.segment(3 * h, h) = (dh.array() * tc.array() * o * (1.0 - o)).matrix();
    g.W.noalias() += dz * c.X.col(t).transpose();
    g.U.noalias() += dz * c.H.col(t).transpose();
    g.b.col(0) += dz;
    dX.col(t) = w.W.transpose() * dz;
    dh = w.U.transpose() * dz;
    dc = (dc.array() * f).matrix();
  }
  return dX;
}

struct BiCache {
  LstmCache f, b;
};

VectorXd bilstm_forward(const BiLstmWeights& w, const MatrixXd& X, BiCache* cache) {
  const long h = w.fwd.U.cols();
  VectorXd out(2 * h);
  out.head(h) = lstm_forward(w.fwd, X, cache ? &cache->f : nullptr);
  MatrixXd rev = X.rowwise().reverse();
  out.tail(h) = lstm_forward(w.bwd, rev, cache ? &cache->b : nullptr);
  return out;
}

MatrixXd bilstm_backward(const BiLstmWeights& w, const BiCache& c, const VectorXd& dout,
                         BiLstmWeights& g) {
  const long h = w.fwd.U.cols();
  MatrixXd dX = lstm_backward(w.fwd, c.f, dout.head(h), g.fwd);
  MatrixXd dRev = lstm_backward(w.bwd, c.b, dout.tail(h), g.bwd);
  dX += dRev.rowwise().reverse();
  return dX;
}

VectorXd softmax(const VectorXd& s) {
  VectorXd e = (s.array() - s.maxCoeff()).exp().matrix();
  return e / e.sum();
}

VectorXd dropout_mask(long n, double p, std::mt19937_64* rng) {
  VectorXd m = VectorXd::Ones(n);
  if (p <= 0.0 || !rng) return m;
  std::bernoulli_distribution keep(1.0 - p);
  for (long i = 0; i < n; ++i) m(i) = keep(*rng) ? 1.0 / (1.0 - p) : 0.0;
  return m;
}

struct ForwardCache {
  std::vector<MatrixXd> path_inputs;
  std::vector<BiCache> path_caches;
  std::vector<VectorXd> q;  // after dropout
  std::vector<VectorXd> q_mask;
  MatrixXd WqQ;                 // A x n_paths
  std::vector<VectorXd> alpha;  // per token
  std::vector<MatrixXd> M;      // per token, A x n_token_paths
  MatrixXd X;
  BiCache sentence;
  VectorXd s;  // after dropout
  VectorXd s_mask;
};

VectorXd run_forward(const EncodedInstance& x, const ClassifierParams& p, double dropout,
                     std::mt19937_64* rng, ForwardCache* cache) {
  const long T = x.tokens.cols();
  const long h2 = 2L * p.hidden;
  MatrixXd X(p.sentence_input_dim(), T);
  X.topRows(p.token_dim) = x.tokens;
  std::vector<VectorXd> q;
  if (p.mode == ModelMode::WithPaths) {
    X.bottomRows(h2).setZero();
    const size_t n = x.paths.size();
    if (cache) {
      cache->path_inputs.resize(n);
      cache->path_caches.resize(n);
      cache->q_mask.resize(n);
      cache->alpha.assign(static_cast<size_t>(T), VectorXd());
      cache->M.assign(static_cast<size_t>(T), MatrixXd());
    }
    MatrixXd Q(h2, static_cast<long>(n));
    for (size_t k = 0; k < n; ++k) {
      MatrixXd in(p.graph_dim, static_cast<long>(x.paths[k].size()));
      for (size_t l = 0; l < x.paths[k].size(); ++l) {
        in.col(static_cast<long>(l)) = p.graph_embeddings.col(x.paths[k][l]);
      }
      VectorXd qk = bilstm_forward(p.path_encoder, in, cache ? &cache->path_caches[k] : nullptr);
      VectorXd mask = dropout_mask(h2, dropout, rng);
      qk = qk.cwiseProduct(mask);
      Q.col(static_cast<long>(k)) = qk;
      q.push_back(qk);
      if (cache) {
        cache->path_inputs[k] = std::move(in);
        cache->q_mask[k] = std::move(mask);
      }
    }
    MatrixXd WqQ = n ? MatrixXd(p.W_q * Q) : MatrixXd(p.attention, 0);
    for (long t = 0; t < T; ++t) {
      const auto& ids = x.token_paths[static_cast<size_t>(t)];
      if (ids.empty()) continue;
      VectorXd wv = p.W_v * x.tokens.col(t);
      MatrixXd M(p.attention, static_cast<long>(ids.size()));
      for (size_t i = 0; i < ids.size(); ++i) {
        M.col(static_cast<long>(i)) = (WqQ.col(ids[i]) + wv).array().tanh().matrix();
      }
      VectorXd alpha = softmax(M.transpose() * p.w_m.col(0));
      VectorXd u = VectorXd::Zero(h2);
      for (size_t i = 0; i < ids.size(); ++i) u += alpha(static_cast<long>(i)) * q[ids[i]];
      X.col(t).tail(h2) = u;
      if (cache) {
        cache->alpha[static_cast<size_t>(t)] = std::move(alpha);
        cache->M[static_cast<size_t>(t)] = std::move(M);
      }
    }
    if (cache) {
      cache->q = q;
      cache->WqQ = std::move(WqQ);
    }
  }
  VectorXd s = bilstm_forward(p.sentence_encoder, X, cache ? &cache->sentence : nullptr);
  VectorXd s_mask = dropout_mask(h2, dropout, rng);
  s = s.cwiseProduct(s_mask);
  VectorXd logits = p.W_out * s + p.b_out.col(0);
  if (cache) {
    cache->X = std::move(X);
    cache->s = s;
    cache->s_mask = std::move(s_mask);
  }
  return logits;
}

}  // namespace

VectorXd bilstm_encode(const BiLstmWeights& w, const MatrixXd& inputs) {
  if (inputs.cols() == 0) throw LogicError("cannot encode an empty sequence");
  return bilstm_forward(w, inputs, nullptr);
}

VectorXd encode_path(const std::vector<std::string>& elements, const ClassifierParams& params) {
  if (params.mode != ModelMode::WithPaths) throw LogicError("baseline model has no path encoder");
  if (elements.empty()) throw LogicError("cannot encode an empty path");
  MatrixXd in(params.graph_dim, static_cast<long>(elements.size()));
  for (size_t l = 0; l < elements.size(); ++l) {
    in.col(static_cast<long>(l)) = params.graph_embeddings.col(params.element_index(elements[l]));
  }
  return bilstm_forward(params.path_encoder, in, nullptr);
}

Attention attend(const std::vector<VectorXd>& path_vectors, const VectorXd& v,
                 const ClassifierParams& params) {
  if (path_vectors.empty()) throw LogicError("attention needs at least one path");
  const long m = static_cast<long>(path_vectors.size());
  const VectorXd wv = params.W_v * v;
  VectorXd scores(m);
  for (long i = 0; i < m; ++i) {
    VectorXd mi = (params.W_q * path_vectors[static_cast<size_t>(i)] + wv).array().tanh().matrix();
    scores(i) = params.w_m.col(0).dot(mi);
  }
  Attention a;
  a.alpha = softmax(scores);
  a.u = VectorXd::Zero(path_vectors.front().size());
  for (long i = 0; i < m; ++i) a.u += a.alpha(i) * path_vectors[static_cast<size_t>(i)];
  return a;
}

EncodedInstance encode_instance(const LabeledInstance& instance, const ClassifierParams& params,
                                const TokenEmbedder& embedder) {
  if (embedder.dim() != params.token_dim) {
    throw LogicError("token embedder dimension does not match the model");
  }
  const auto tokens = sentence_tokens(instance.sentence);
  if (tokens.empty()) throw DataError("sentence has no token: " + instance.sentence);
  EncodedInstance x;
  x.label = instance.label;
  x.tokens.resize(params.token_dim, static_cast<long>(tokens.size()));
  for (size_t t = 0; t < tokens.size(); ++t) {
    x.tokens.col(static_cast<long>(t)) = embedder.embed(tokens[t]);
  }
  x.token_paths.resize(tokens.size());
  if (params.mode == ModelMode::WithPaths) {
    for (const auto& ap : instance.paths) {
      if (ap.path.elements.empty()) continue;
      std::vector<int> cols;
      for (const auto& e : ap.path.elements) cols.push_back(params.element_index(e));
      const int k = static_cast<int>(x.paths.size());
      bool anchored = false;
      for (size_t a : ap.anchors) {
        if (a < tokens.size()) {
          auto& tp = x.token_paths[a];
          if (tp.empty() || tp.back() != k) tp.push_back(k);
          anchored = true;
        }
      }
      if (anchored) x.paths.push_back(std::move(cols));
    }
  }
  return x;
}

VectorXd forward_logits(const EncodedInstance& x, const ClassifierParams& params) {
  return run_forward(x, params, 0.0, nullptr, nullptr);
}

VectorXd forward(const EncodedInstance& x, const ClassifierParams& params) {
  return softmax(forward_logits(x, params));
}

double loss_and_gradient(const EncodedInstance& x, const ClassifierParams& p,
                         ClassifierParams& g, double dropout, std::mt19937_64* rng,
                         double weight) {
  ForwardCache c;
  VectorXd logits = run_forward(x, p, dropout, rng, &c);
  VectorXd prob = softmax(logits);
  const int y = static_cast<int>(x.label);
  const double loss = -weight * std::log(std::max(prob(y), 1e-300));

  VectorXd dlogits = prob;
  dlogits(y) -= 1.0;
  dlogits *= weight;
  g.W_out.noalias() += dlogits * c.s.transpose();
  g.b_out.col(0) += dlogits;
  VectorXd ds = (p.W_out.transpose() * dlogits).cwiseProduct(c.s_mask);
  MatrixXd dX = bilstm_backward(p.sentence_encoder, c.sentence, ds, g.sentence_encoder);
  if (p.mode != ModelMode::WithPaths || x.paths.empty()) return loss;

  const long h2 = 2L * p.hidden;
  std::vector<VectorXd> dq(x.paths.size(), VectorXd::Zero(h2));
  for (size_t t = 0; t < x.token_paths.size(); ++t) {
    const auto& ids = x.token_paths[t];
    if (ids.empty()) continue;
    const VectorXd du = dX.col(static_cast<long>(t)).tail(h2);
    const VectorXd& alpha = c.alpha[t];
    const MatrixXd& M = c.M[t];
    VectorXd dalpha(static_cast<long>(ids.size()));
    for (size_t i = 0; i < ids.size(); ++i) {
      dq[ids[i]] += alpha(static_cast<long>(i)) * du;
      dalpha(static_cast<long>(i)) = c.q[ids[i]].dot(du);
    }
    VectorXd dscore = alpha.cwiseProduct((dalpha.array() - alpha.dot(dalpha)).matrix());
    g.w_m.col(0) += M * dscore;
    // d pre-activation of every m_i, one column per path
    MatrixXd dA = (p.w_m.col(0) * dscore.transpose()).cwiseProduct(
        (1.0 - M.array().square()).matrix());
    const VectorXd v = x.tokens.col(static_cast<long>(t));
    g.W_v.noalias() += dA.rowwise().sum() * v.transpose();
    for (size_t i = 0; i < ids.size(); ++i) {
      const VectorXd da = dA.col(static_cast<long>(i));
      g.W_q.noalias() += da * c.q[ids[i]].transpose();
      dq[ids[i]] += p.W_q.transpose() * da;
    }
  }
  for (size_t k = 0; k < x.paths.size(); ++k) {
    VectorXd dqk = dq[k].cwiseProduct(c.q_mask[k]);
    MatrixXd dIn = bilstm_backward(p.path_encoder, c.path_caches[k], dqk, g.path_encoder);
    for (size_t l = 0; l < x.paths[k].size(); ++l) {
      g.graph_embeddings.col(x.paths[k][l]) += dIn.col(static_cast<long>(l));
    }
  }
  return loss;
}

namespace {

std::vector<LabeledInstance> truncated_copy(const std::vector<LabeledInstance>& dataset,
                                            const ClassifierHyperparams& hp) {
  std::vector<LabeledInstance> out = dataset;
  for (auto& inst : out) truncate_paths(inst, hp);
  return out;
}

Label argmax(const VectorXd& logits) {
  return logits(1) > logits(0) ? Label::Argument : Label::NoArgument;
}

}  // namespace

TrainResult train(const std::vector<LabeledInstance>& dataset, const ClassifierHyperparams& hp,
                  ModelMode mode, const TokenEmbedder& embedder) {
  hp.validate();
  if (dataset.empty()) throw DataError("training set is empty");
  size_t n_arg = 0;
  for (const auto& inst : dataset) n_arg += inst.label == Label::Argument;
  if (n_arg == 0 || n_arg == dataset.size()) {
    throw DataError("training set must contain both labels");
  }
  auto data = truncated_copy(dataset, hp);
  std::vector<std::string> elements;
  if (mode == ModelMode::WithPaths) {
    for (const auto& inst : data) {
      for (const auto& ap : inst.paths) {
        elements.insert(elements.end(), ap.path.elements.begin(), ap.path.elements.end());
      }
    }
  }
  TrainResult r{ClassifierParams::init(mode, embedder.dim(), hp, std::move(elements)), {}};
  ClassifierParams& p = r.params;

  std::vector<EncodedInstance> encoded;
  encoded.reserve(data.size());
  for (const auto& inst : data) encoded.push_back(encode_instance(inst, p, embedder));

  std::array<double, 2> class_weight{1.0, 1.0};
  if (hp.class_weighting) {
    const double n = static_cast<double>(data.size());
    class_weight[1] = n / (2.0 * static_cast<double>(n_arg));
    class_weight[0] = n / (2.0 * static_cast<double>(data.size() - n_arg));
  }

  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  ClassifierParams m = p.zeros_like();
  ClassifierParams v = p.zeros_like();
  std::mt19937_64 rng(hp.seed ^ 0x9E3779B97F4A7C15ULL);
  std::vector<size_t> order(encoded.size());
  std::iota(order.begin(), order.end(), size_t{0});
  long step = 0;
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(hp.batch_size)) {
      const size_t end = std::min(order.size(), start + static_cast<size_t>(hp.batch_size));
      ClassifierParams g = p.zeros_like();
      for (size_t k = start; k < end; ++k) {
        const auto& x = encoded[order[k]];
        total += loss_and_gradient(x, p, g, hp.dropout, &rng,
                                   class_weight[static_cast<size_t>(x.label)]);
      }
      const double scale = 1.0 / static_cast<double>(end - start);
      ++step;
      const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      auto pt = p.tensors();
      auto gt = g.tensors();
      auto mt = m.tensors();
      auto vt = v.tensors();
      for (size_t i = 0; i < pt.size(); ++i) {
        if (pt[i].second->size() == 0) continue;
        MatrixXd grad = *gt[i].second * scale;
        *mt[i].second = beta1 * *mt[i].second + (1.0 - beta1) * grad;
        *vt[i].second = beta2 * *vt[i].second + (1.0 - beta2) * grad.cwiseProduct(grad);
        pt[i].second->array() -= hp.learning_rate * (mt[i].second->array() / c1) /
                                 ((vt[i].second->array() / c2).sqrt() + eps);
      }
    }
    r.log.epoch_loss.push_back(total / static_cast<double>(order.size()));
    size_t correct = 0;
    for (const auto& x : encoded) correct += argmax(forward_logits(x, p)) == x.label;
    r.log.epoch_accuracy.push_back(static_cast<double>(correct) /
                                   static_cast<double>(encoded.size()));
  }
  return r;
}

Evaluation metrics_from_confusion(const Confusion& c) {
  Evaluation e;
  e.confusion = c;
  const double total = static_cast<double>(c[0][0] + c[0][1] + c[1][0] + c[1][1]);
  e.accuracy = total > 0 ? static_cast<double>(c[0][0] + c[1][1]) / total : 0.0;
  auto f1 = [&](size_t k) {
    const double tp = static_cast<double>(c[k][k]);
    const double fp = static_cast<double>(c[1 - k][k]);
    const double fn = static_cast<double>(c[k][1 - k]);
    const double denom = 2 * tp + fp + fn;
    return denom > 0 ? 2 * tp / denom : 1.0;
  };
  e.binary_f1 = f1(1);
  e.macro_f1 = 0.5 * (f1(0) + f1(1));
  return e;
}

std::vector<Label> predict(const ClassifierParams& params,
                           const std::vector<LabeledInstance>& dataset,
                           const TokenEmbedder& embedder) {
  std::vector<Label> out;
  out.reserve(dataset.size());
  for (const auto& inst : dataset) {
    out.push_back(argmax(forward_logits(encode_instance(inst, params, embedder), params)));
  }
  return out;
}

Evaluation evaluate(const ClassifierParams& params, const std::vector<LabeledInstance>& dataset,
                    const TokenEmbedder& embedder) {
  if (dataset.empty()) throw DataError("evaluation set is empty");
  auto predicted = predict(params, dataset, embedder);
  Confusion c{};
  for (size_t i = 0; i < dataset.size(); ++i) {
    ++c[static_cast<size_t>(dataset[i].label)][static_cast<size_t>(predicted[i])];
  }
  return metrics_from_confusion(c);
}

void save_checkpoint(const ClassifierParams& params, const std::filesystem::path& path) {
  json j;
  j["format"] = "argkg-classifier";
  j["version"] = 1;
  j["mode"] = to_string(params.mode);
  j["token_dim"] = params.token_dim;
  j["hidden"] = params.hidden;
  j["attention"] = params.attention;
  j["graph_dim"] = params.graph_dim;
  j["elements"] = params.elements;
  json tensors = json::object();
  for (const auto& [name, t] : params.tensors()) {
    std::vector<double> data;
    data.reserve(static_cast<size_t>(t->size()));
    for (long i = 0; i < t->rows(); ++i) {
      for (long k = 0; k < t->cols(); ++k) data.push_back((*t)(i, k));
    }
    tensors[name] = {{"rows", t->rows()}, {"cols", t->cols()}, {"data", data}};
  }
  j["tensors"] = std::move(tensors);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out << j.dump() << '\n';
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

ClassifierParams load_checkpoint(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError("bad checkpoint " + path.string() + ": " + e.what());
  }
  ClassifierParams p;
  try {
    if (j.at("format") != "argkg-classifier") throw ParseError("not a classifier checkpoint");
    if (j.at("version").get<int>() != 1) throw ParseError("unsupported checkpoint version");
    p.mode = model_mode_from_string(j.at("mode").get<std::string>());
    p.token_dim = j.at("token_dim");
    p.hidden = j.at("hidden");
    p.attention = j.at("attention");
    p.graph_dim = j.at("graph_dim");
    p.elements = j.at("elements").get<std::vector<std::string>>();
    for (auto& [name, t] : p.tensors()) {
      const json& tj = j.at("tensors").at(name);
      const long rows = tj.at("rows");
      const long cols = tj.at("cols");
      const auto data = tj.at("data").get<std::vector<double>>();
      if (static_cast<long>(data.size()) != rows * cols) {
        throw ParseError("tensor " + name + " has wrong size");
      }
      t->resize(rows, cols);
      for (long i = 0; i < rows; ++i) {
        for (long k = 0; k < cols; ++k) (*t)(i, k) = data[static_cast<size_t>(i * cols + k)];
      }
    }
  } catch (const json::exception& e) {
    throw ParseError("bad checkpoint " + path.string() + ": " + e.what());
  }
  p.rebuild_index();
  return p;
}

}  // namespace argkg
