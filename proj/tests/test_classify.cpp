#include <cmath>
#include <fstream>

#include "argkg/classify.hpp"
#include "argkg/error.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace argkg;
using argkg::testing::TempDir;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

ClassifierHyperparams tiny(int hidden, int attention, int graph_dim) {
  ClassifierHyperparams hp;
  hp.hidden_size = hidden;
  hp.attention_size = attention;
  hp.graph_embedding_size = graph_dim;
  return hp;
}

void fill_pattern(MatrixXd& m, double scale, double offset) {
  for (long i = 0; i < m.rows(); ++i) {
    for (long j = 0; j < m.cols(); ++j) {
      m(i, j) = scale * std::sin(1.0 + offset + 0.7 * static_cast<double>(i) +
                                 1.3 * static_cast<double>(j));
    }
  }
}

double sig(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Scalar LSTM over the columns of `xs`, gate rows i, f, g, o.
std::vector<double> scalar_lstm(const LstmWeights& w, const std::vector<std::vector<double>>& xs) {
  const size_t h = static_cast<size_t>(w.U.cols());
  std::vector<double> hs(h, 0.0), cs(h, 0.0);
  for (const auto& x : xs) {
    std::vector<double> z(4 * h);
    for (size_t r = 0; r < 4 * h; ++r) {
      double acc = w.b(static_cast<long>(r), 0);
      for (size_t k = 0; k < x.size(); ++k) acc += w.W(static_cast<long>(r), static_cast<long>(k)) * x[k];
      for (size_t k = 0; k < h; ++k) acc += w.U(static_cast<long>(r), static_cast<long>(k)) * hs[k];
      z[r] = acc;
    }
    for (size_t k = 0; k < h; ++k) {
      const double i = sig(z[k]), f = sig(z[h + k]), g = std::tanh(z[2 * h + k]),
                   o = sig(z[3 * h + k]);
      cs[k] = f * cs[k] + i * g;
      hs[k] = o * std::tanh(cs[k]);
    }
  }
  return hs;
}

LabeledInstance instance(std::string sentence, Label label,
                         std::vector<std::vector<std::string>> paths = {}) {
  LabeledInstance inst;
  inst.topic = "t";
  inst.sentence = std::move(sentence);
  inst.label = label;
  inst.split = "train";
  for (auto& elements : paths) {
    AnchoredPath ap;
    ap.path.elements = std::move(elements);
    ap.path.forward.assign(ap.path.elements.size() / 2, true);
    ap.anchors = {0};
    inst.paths.push_back(std::move(ap));
  }
  return inst;
}

}  // namespace

TEST_CASE("labels") {
  CHECK(label_from_string("Pro") == Label::Argument);
  CHECK(label_from_string("con") == Label::Argument);
  CHECK(label_from_string("NoArgument") == Label::NoArgument);
  CHECK_THROWS_AS(label_from_string("maybe"), ParseError);
}

TEST_CASE("anchor_tokens") {
  auto toks = sentence_tokens("Donald Trump met Trump supporters.");
  CHECK(anchor_tokens(toks, "Trump") == std::vector<size_t>{1, 3});
  CHECK(anchor_tokens(toks, "Donald Trump") == std::vector<size_t>{0, 1});
  CHECK(anchor_tokens(toks, "Obama").empty());
}

TEST_CASE("load_dataset") {
  TempDir dir;
  std::ofstream(dir.path() / "d.tsv") << "topic\tsentence\tlabel\tsplit\n"
                                      << "gun control\tGuns kill.\tPro\ttrain\n"
                                      << "gun control\tbroken\n";
  try {
    load_dataset(dir.path() / "d.tsv");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  auto fixture = load_dataset(argkg::testing::fixture_dir() / "dataset.tsv");
  CHECK(fixture.size() == 20);
}

TEST_CASE("truncate_paths") {
  ClassifierHyperparams hp;
  hp.max_paths = 2;
  hp.max_path_len = 3;
  LabeledInstance inst = instance("a b", Label::Argument,
                                  {{"x", "p", "y", "q", "z"}, {"x", "p", "y"}, {"y", "p", "z"}});
  inst.paths[0].anchors = {0, 7};
  truncate_paths(inst, hp);
  REQUIRE(inst.paths.size() == 2);
  CHECK(inst.paths[0].path.elements == std::vector<std::string>{"x", "p", "y"});
  CHECK(inst.paths[0].anchors == std::vector<size_t>{0});
}

TEST_CASE("path encoder") {
  ClassifierHyperparams hp = tiny(2, 2, 2);
  ClassifierParams p = ClassifierParams::init(ModelMode::WithPaths, 3, hp, {"a", "b", "c"});
  fill_pattern(p.graph_embeddings, 0.8, 0.0);
  fill_pattern(p.path_encoder.fwd.W, 0.5, 1.0);
  fill_pattern(p.path_encoder.fwd.U, 0.4, 2.0);
  fill_pattern(p.path_encoder.fwd.b, 0.3, 3.0);
  fill_pattern(p.path_encoder.bwd.W, 0.5, 4.0);
  fill_pattern(p.path_encoder.bwd.U, 0.4, 5.0);
  fill_pattern(p.path_encoder.bwd.b, 0.3, 6.0);

  const std::vector<std::string> path = {"a", "b", "c"};
  VectorXd q = encode_path(path, p);
  REQUIRE(q.size() == 4);
  CHECK(encode_path(path, p) == q);

  std::vector<std::vector<double>> xs;
  for (const auto& e : path) {
    const long col = p.element_index(e);
    xs.push_back({p.graph_embeddings(0, col), p.graph_embeddings(1, col)});
  }
  auto fwd = scalar_lstm(p.path_encoder.fwd, xs);
  std::reverse(xs.begin(), xs.end());
  auto bwd = scalar_lstm(p.path_encoder.bwd, xs);
  CHECK(q(0) == doctest::Approx(fwd[0]).epsilon(1e-12));
  CHECK(q(1) == doctest::Approx(fwd[1]).epsilon(1e-12));
  CHECK(q(2) == doctest::Approx(bwd[0]).epsilon(1e-12));
  CHECK(q(3) == doctest::Approx(bwd[1]).epsilon(1e-12));

  CHECK(encode_path({"b"}, p).size() == 4);
}

TEST_CASE("attention") {
  ClassifierHyperparams hp = tiny(1, 2, 2);
  ClassifierParams p = ClassifierParams::init(ModelMode::WithPaths, 2, hp, {"a"});
  p.W_q << 1, 0, 0, 1;
  p.W_v << 0.5, 0, 0, 0.5;
  p.w_m << 1, -1;
  VectorXd v(2);
  v << 1, 1;
  VectorXd q1(2), q2(2);
  q1 << 1, 0;
  q2 << 0, 1;

  Attention single = attend({q1}, v, p);
  CHECK(single.alpha(0) == 1.0);
  CHECK(single.u == q1);

  Attention same = attend({q1, q1, q1}, v, p);
  for (long i = 0; i < 3; ++i) CHECK(same.alpha(i) == doctest::Approx(1.0 / 3));

  // m1 = tanh(q1 + 0.5 v) = (tanh 1.5, tanh 0.5), m2 = (tanh 0.5, tanh 1.5)
  const double s1 = std::tanh(1.5) - std::tanh(0.5);
  const double s2 = std::tanh(0.5) - std::tanh(1.5);
  const double a1 = std::exp(s1) / (std::exp(s1) + std::exp(s2));
  Attention two = attend({q1, q2}, v, p);
  CHECK(two.alpha(0) == doctest::Approx(a1).epsilon(1e-12));
  CHECK(two.alpha(1) == doctest::Approx(1 - a1).epsilon(1e-12));
  CHECK(two.u(0) == doctest::Approx(a1).epsilon(1e-12));
  CHECK(two.u(1) == doctest::Approx(1 - a1).epsilon(1e-12));
}

TEST_CASE("forward pass") {
  TokenEmbedder embedder(nullptr, 5);
  ClassifierHyperparams hp = tiny(4, 3, 4);
  ClassifierParams p = ClassifierParams::init(ModelMode::WithPaths, 5, hp, {"x", "P1", "y"});
  LabeledInstance with = instance("guns are dangerous", Label::Argument, {{"x", "P1", "y"}});
  EncodedInstance x = encode_instance(with, p, embedder);
  VectorXd prob = forward(x, p);
  CHECK(prob.sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(forward(encode_instance(with, p, embedder), p) == prob);

  SUBCASE("no paths equals a baseline with zero-padded input weights") {
    LabeledInstance bare = instance("guns are dangerous", Label::Argument);
    EncodedInstance xp = encode_instance(bare, p, embedder);
    ClassifierParams b = ClassifierParams::init(ModelMode::Baseline, 5, hp, {});
    for (auto dir : {&BiLstmWeights::fwd, &BiLstmWeights::bwd}) {
      (b.sentence_encoder.*dir).W = (p.sentence_encoder.*dir).W.leftCols(5);
      (b.sentence_encoder.*dir).U = (p.sentence_encoder.*dir).U;
      (b.sentence_encoder.*dir).b = (p.sentence_encoder.*dir).b;
    }
    b.W_out = p.W_out;
    b.b_out = p.b_out;
    EncodedInstance xb = encode_instance(bare, b, embedder);
    VectorXd lp = forward_logits(xp, p);
    VectorXd lb = forward_logits(xb, b);
    CHECK(lp(0) == doctest::Approx(lb(0)).epsilon(1e-12));
    CHECK(lp(1) == doctest::Approx(lb(1)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(encode_instance(instance("...", Label::Argument), p, embedder), DataError);
}

TEST_CASE("gradient check on a small model") {
  TokenEmbedder embedder(nullptr, 4);
  ClassifierHyperparams hp = tiny(3, 4, 3);
  hp.seed = 9;
  LabeledInstance inst = instance("one two three four five", Label::Argument,
                                  {{"x", "P1", "y"}, {"y", "P2", "z", "P3", "w"}});
  inst.paths[1].anchors = {2, 4};
  ClassifierParams p = ClassifierParams::init(ModelMode::WithPaths, 4, hp, {"x", "y", "z", "w", "P1", "P2", "P3"});
  EncodedInstance x = encode_instance(inst, p, embedder);
  for (const auto& [name, err] : argkg::testing::gradient_check(x, p)) {
    INFO(name);
    CHECK(err < 1e-5);
  }
  ClassifierParams b = ClassifierParams::init(ModelMode::Baseline, 4, hp, {});
  for (const auto& [name, err] : argkg::testing::gradient_check(encode_instance(inst, b, embedder), b)) {
    INFO(name);
    CHECK(err < 1e-5);
  }
}

TEST_CASE("training") {
  TokenEmbedder embedder(nullptr, 8);
  auto data = argkg::testing::leaked_path_dataset();
  ClassifierHyperparams hp = argkg::testing::separation_hyperparams();

  SUBCASE("zero epochs keep the initial parameters") {
    hp.epochs = 0;
    TrainResult r = train(data, hp, ModelMode::WithPaths, embedder);
    CHECK(r.log.epoch_loss.empty());
    ClassifierParams init = ClassifierParams::init(ModelMode::WithPaths, 8, hp, r.params.elements);
    CHECK(r.params == init);
  }
  SUBCASE("paths separate the leaked labels") {
    TrainResult r = train(data, hp, ModelMode::WithPaths, embedder);
    CHECK(*std::max_element(r.log.epoch_accuracy.begin(), r.log.epoch_accuracy.end()) >= 0.95);
    CHECK(r.log.epoch_loss.back() < r.log.epoch_loss.front());
    TrainResult b = train(data, hp, ModelMode::Baseline, embedder);
    CHECK(*std::max_element(b.log.epoch_accuracy.begin(), b.log.epoch_accuracy.end()) <= 0.65);
  }
  SUBCASE("single class") {
    for (auto& d : data) d.label = Label::Argument;
    CHECK_THROWS_AS(train(data, hp, ModelMode::WithPaths, embedder), DataError);
  }
}

TEST_CASE("metrics") {
  Evaluation perfect = metrics_from_confusion({{{5, 0}, {0, 7}}});
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.macro_f1 == 1.0);
  Evaluation e = metrics_from_confusion({{{3, 1}, {1, 3}}});
  CHECK(e.accuracy == doctest::Approx(0.75));
  CHECK(e.macro_f1 == doctest::Approx(0.75));
  CHECK(e.binary_f1 == doctest::Approx(0.75));
}

TEST_CASE("checkpoint round trip") {
  TempDir dir;
  ClassifierParams p =
      ClassifierParams::init(ModelMode::WithPaths, 5, tiny(3, 2, 4), {"b", "a", "P1"});
  save_checkpoint(p, dir.path() / "m.json");
  ClassifierParams q = load_checkpoint(dir.path() / "m.json");
  CHECK(q == p);
  CHECK(q.element_index("a") == p.element_index("a"));
  std::ofstream(dir.path() / "bad.json") << "{\"format\": \"other\"}";
  CHECK_THROWS(load_checkpoint(dir.path() / "bad.json"));
}
