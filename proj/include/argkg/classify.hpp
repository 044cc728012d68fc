#pragma once

#include <array>
#include <filesystem>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "argkg/embed.hpp"
#include "argkg/kg.hpp"

namespace argkg {

enum class Label { NoArgument = 0, Argument = 1 };

const char* to_string(Label l);
// Accepts NoArgument, Argument, Pro and Con (case-insensitive); Pro and Con
// map to Argument. Throws ParseError otherwise.
Label label_from_string(std::string_view s);

enum class ModelMode { Baseline, WithPaths };

const char* to_string(ModelMode m);
ModelMode model_mode_from_string(std::string_view s);

struct ClassifierHyperparams {
  double dropout = 0.7;
  int hidden_size = 64;
  int batch_size = 16;
  double learning_rate = 0.001;
  int epochs = 10;
  int attention_size = 50;
  int max_paths = 10;
  int max_path_len = 15;
  unsigned long long seed = 1;
  int graph_embedding_size = 50;
  int token_embedding_size = 50;  // only used without a token table
  bool class_weighting = false;

  void validate() const;
};

// A path plus the sentence token positions it is attached to.
struct AnchoredPath {
  EvidencePath path;
  std::vector<size_t> anchors;
  bool operator==(const AnchoredPath&) const = default;
};

struct LabeledInstance {
  std::string topic;
  std::string sentence;
  Label label = Label::NoArgument;
  std::string split;
  std::vector<AnchoredPath> paths;
};

// Lowercased alphanumeric tokens; the classifier's view of a sentence.
std::vector<std::string> sentence_tokens(std::string_view sentence);

// Start positions of every occurrence of the surface token sequence, expanded
// to all covered token indices.
std::vector<size_t> anchor_tokens(const std::vector<std::string>& tokens,
                                  std::string_view surface);

// topic<TAB>sentence<TAB>label<TAB>split with a header line. Throws IoError or
// ParseError (with line number).
std::vector<LabeledInstance> load_dataset(const std::filesystem::path& path);

// Keeps the first max_paths paths and the first max_path_len elements of
// each; anchors outside the sentence are dropped.
void truncate_paths(LabeledInstance& instance, const ClassifierHyperparams& hp);

// Frozen token vectors. Tokens missing from the table (or every token when
// there is none) get a fixed pseudo-random vector derived from the token.
class TokenEmbedder {
 public:
  explicit TokenEmbedder(const EmbeddingTable* table = nullptr, int fallback_dim = 50);
  int dim() const { return dim_; }
  Eigen::VectorXd embed(const std::string& token) const;

 private:
  const EmbeddingTable* table_;
  int dim_;
};

struct LstmWeights {
  Eigen::MatrixXd W;  // 4H x input, gate order i, f, g, o
  Eigen::MatrixXd U;  // 4H x H
  Eigen::MatrixXd b;  // 4H x 1
};

struct BiLstmWeights {
  LstmWeights fwd;
  LstmWeights bwd;
};

struct ClassifierParams {
  ModelMode mode = ModelMode::WithPaths;
  int token_dim = 0;
  int hidden = 0;
  int attention = 0;
  int graph_dim = 0;

  // Column 0 is UNK; column k + 1 belongs to elements[k].
  std::vector<std::string> elements;
  Eigen::MatrixXd graph_embeddings;
  BiLstmWeights path_encoder;
  BiLstmWeights sentence_encoder;
  Eigen::MatrixXd W_q;  // A x 2H
  Eigen::MatrixXd W_v;  // A x token_dim
  Eigen::MatrixXd w_m;  // A x 1
  Eigen::MatrixXd W_out;  // 2 x 2H
  Eigen::MatrixXd b_out;  // 2 x 1

  // Random initialisation from hp.seed. `elements` are sorted and
  // deduplicated.
  static ClassifierParams init(ModelMode mode, int token_dim, const ClassifierHyperparams& hp,
                               std::vector<std::string> elements);

  // Same shapes and element vocabulary, all zero.
  ClassifierParams zeros_like() const;

  int element_index(const std::string& id) const;  // 0 for unknown ids
  int sentence_input_dim() const;

  std::vector<std::pair<std::string, Eigen::MatrixXd*>> tensors();
  std::vector<std::pair<std::string, const Eigen::MatrixXd*>> tensors() const;

  bool operator==(const ClassifierParams& other) const;

 private:
  std::unordered_map<std::string, int> index_;
  void rebuild_index();
  friend ClassifierParams load_checkpoint(const std::filesystem::path& path);
};

// Last hidden states of both directions, [forward; backward], size 2H.
Eigen::VectorXd bilstm_encode(const BiLstmWeights& w, const Eigen::MatrixXd& inputs);

// Path vector q from the shared path encoder.
Eigen::VectorXd encode_path(const std::vector<std::string>& elements,
                            const ClassifierParams& params);

struct Attention {
  Eigen::VectorXd alpha;
  Eigen::VectorXd u;
};

Attention attend(const std::vector<Eigen::VectorXd>& path_vectors, const Eigen::VectorXd& v,
                 const ClassifierParams& params);

// Instance resolved against a parameter set: token vectors as columns, path
// elements as embedding columns and, per token, the indices of its paths.
struct EncodedInstance {
  Eigen::MatrixXd tokens;
  std::vector<std::vector<int>> paths;
  std::vector<std::vector<int>> token_paths;
  Label label = Label::NoArgument;
};

// Throws DataError if the sentence has no token.
EncodedInstance encode_instance(const LabeledInstance& instance, const ClassifierParams& params,
                                const TokenEmbedder& embedder);

Eigen::VectorXd forward_logits(const EncodedInstance& x, const ClassifierParams& params);
Eigen::VectorXd forward(const EncodedInstance& x, const ClassifierParams& params);

// Cross-entropy of one instance times `weight`; gradients are added to
// `grads`. With dropout > 0 and an rng, inverted dropout is applied to every
// path vector and to the sentence encoding.
double loss_and_gradient(const EncodedInstance& x, const ClassifierParams& params,
                         ClassifierParams& grads, double dropout = 0.0,
                         std::mt19937_64* rng = nullptr, double weight = 1.0);

struct TrainingLog {
  std::vector<double> epoch_loss;      // mean per-instance loss
  std::vector<double> epoch_accuracy;  // on the training set after the epoch
};

struct TrainResult {
  ClassifierParams params;
  TrainingLog log;
};

// Minibatch Adam on mean cross-entropy. Throws DataError on an empty or
// single-class dataset.
TrainResult train(const std::vector<LabeledInstance>& dataset, const ClassifierHyperparams& hp,
                  ModelMode mode, const TokenEmbedder& embedder);

using Confusion = std::array<std::array<size_t, 2>, 2>;  // [true][predicted]

struct Evaluation {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double binary_f1 = 0.0;  // Argument as the positive class
  Confusion confusion{};
};

Evaluation metrics_from_confusion(const Confusion& confusion);

std::vector<Label> predict(const ClassifierParams& params,
                           const std::vector<LabeledInstance>& dataset,
                           const TokenEmbedder& embedder);

// Throws DataError on an empty dataset.
Evaluation evaluate(const ClassifierParams& params, const std::vector<LabeledInstance>& dataset,
                    const TokenEmbedder& embedder);

// JSON with a format tag, version, shapes and row-major data.
void save_checkpoint(const ClassifierParams& params, const std::filesystem::path& path);
ClassifierParams load_checkpoint(const std::filesystem::path& path);

}  // namespace argkg
