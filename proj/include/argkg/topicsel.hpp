#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "argkg/kg.hpp"
#include "argkg/text.hpp"

namespace argkg {

struct SelectionConfig {
  double tfidf_threshold = 2.5;   // t_t
  long count_threshold = 1000;    // t_c
  int num_topics = 5;             // n_t
  int num_properties = 50;        // n_p
  int lda_iterations = 200;
  int words_per_topic = 10;
  uint64_t seed = 1;
  double alpha = 0.0;             // <= 0 means 50 / num_topics
  double beta = 0.01;

  // Throws ConfigError when a size is below one.
  void validate() const;
  double effective_alpha() const { return alpha > 0 ? alpha : 50.0 / num_topics; }
};

struct PropertyDescription {
  std::string id;
  std::string label;
  std::string description;
  long count = 0;  // usage frequency in the knowledge base
};

// TSV: property_id, usage_count, label, description. No header.
std::vector<PropertyDescription> load_property_descriptions(
    const std::filesystem::path& path);

struct Document {
  std::string entity_id;
  std::string text;
};

struct ArticleSet {
  std::vector<Document> documents;
  size_t missing = 0;  // entities without an article file
};

// Reads <article_dir>/<entity_id>.txt for every entity, skipping missing
// files. Duplicate entity ids are read once.
ArticleSet load_articles(std::span<const EntityRef> entities,
                         const std::filesystem::path& article_dir);

using TokenizedCorpus = std::vector<std::vector<std::string>>;

TokenizedCorpus preprocess(std::span<const Document> documents, const WordSet& stopwords);

struct TopicModel {
  std::vector<std::vector<double>> topic_word;  // n_t x V
  std::vector<std::vector<double>> doc_topic;   // D x n_t
  std::vector<std::string> vocabulary;

  // Word ids of one topic sorted by probability, ties by word.
  std::vector<size_t> ranked_words(size_t topic) const;
};

// Collapsed Gibbs sampler state for LDA with symmetric priors.
class LdaSampler {
 public:
  LdaSampler(const TokenizedCorpus& corpus, int num_topics, double alpha, double beta,
             uint64_t seed);

  void sweep();
  TopicModel model() const;

  size_t token_count() const { return assignments_.size(); }
  // Sum of the per-topic counters; equals token_count() after every sweep.
  size_t topic_count_total() const;
  // Sum of the doc-topic counters.
  size_t doc_topic_count_total() const;

 private:
  int num_topics_;
  double alpha_;
  double beta_;
  std::vector<std::string> vocabulary_;
  std::vector<uint32_t> doc_of_;
  std::vector<uint32_t> word_of_;
  std::vector<uint32_t> assignments_;
  std::vector<std::vector<uint32_t>> doc_topic_;   // D x K
  std::vector<std::vector<uint32_t>> topic_word_;  // K x V
  std::vector<uint32_t> topic_total_;
  std::vector<uint32_t> doc_total_;
  std::mt19937_64 rng_;
  std::vector<double> scratch_;
};

// Throws DataError on an empty corpus or vocabulary.
TopicModel train_lda(const TokenizedCorpus& corpus, const SelectionConfig& config);

// Union of each topic's top-k words minus stopwords, first occurrence order.
std::vector<std::string> top_topic_words(const TopicModel& model, int words_per_topic,
                                         const WordSet& stopwords);

struct TfidfMatrix {
  std::vector<std::string> words;
  std::vector<std::vector<double>> m;  // words x documents
  std::vector<double> cumulative;      // row sums
};

// tf = raw count, idf = ln(N / df), and a word with df = 0 scores 0.
// Documents are the preprocessed "label description" texts.
TfidfMatrix build_tfidf(std::span<const std::string> words,
                        std::span<const PropertyDescription> descriptions,
                        const WordSet& stopwords);

// Words with cumulative score >= t_t, by score descending then word.
std::vector<std::string> rank_by_tfidf(std::span<const std::string> words,
                                       std::span<const PropertyDescription> descriptions,
                                       double t_t,
                                       const WordSet& stopwords = default_stopwords());

// Properties whose text contains at least one ranked word and whose count
// exceeds t_c, ordered by total occurrences of ranked words (then usage count,
// then id), first n_p.
std::vector<std::string> select_frequent(std::span<const std::string> ranked_words,
                                         std::span<const PropertyDescription> descriptions,
                                         long count_threshold, int num_properties,
                                         const WordSet& stopwords);

struct PropertySelection {
  std::vector<std::string> properties;
  std::vector<std::string> topic_words;
  std::vector<std::string> ranked_words;
  size_t documents = 0;
  size_t missing_articles = 0;
};

PropertySelection select_properties_detailed(
    std::span<const EntityRef> entities, std::span<const PropertyDescription> descriptions,
    const SelectionConfig& config, const std::filesystem::path& article_dir,
    const WordSet& stopwords);

std::vector<std::string> select_properties(
    std::span<const EntityRef> entities, std::span<const PropertyDescription> descriptions,
    const SelectionConfig& config, const std::filesystem::path& article_dir,
    const WordSet& stopwords);

}  // namespace argkg
