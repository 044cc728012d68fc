#include "argkg/topicsel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "argkg/error.hpp"

namespace argkg {

void SelectionConfig::validate() const {
  if (num_topics < 1) throw ConfigError("num_topics must be >= 1");
  if (num_properties < 1) throw ConfigError("num_properties must be >= 1");
  if (lda_iterations < 1) throw ConfigError("lda_iterations must be >= 1");
  if (words_per_topic < 1) throw ConfigError("words_per_topic must be >= 1");
  if (beta <= 0) throw ConfigError("beta must be > 0");
}

std::vector<PropertyDescription> load_property_descriptions(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open property descriptions " + path.string());
  std::vector<PropertyDescription> out;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> cols;
    size_t start = 0;
    for (int i = 0; i < 3; ++i) {
      size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        throw ParseError("property description needs 4 tab-separated columns", lineno);
      }
      cols.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    cols.push_back(line.substr(start));
    PropertyDescription d;
    d.id = trim(cols[0]);
    std::string count_text = trim(cols[1]);
    auto [end, ec] = std::from_chars(count_text.data(),
                                     count_text.data() + count_text.size(), d.count);
    if (ec != std::errc() || end != count_text.data() + count_text.size()) {
      throw ParseError("bad usage count '" + cols[1] + "'", lineno);
    }
    if (d.count < 0) throw ParseError("negative usage count", lineno);
    d.label = cols[2];
    d.description = cols[3];
    out.push_back(std::move(d));
  }
  return out;
}

ArticleSet load_articles(std::span<const EntityRef> entities,
                         const std::filesystem::path& article_dir) {
  ArticleSet out;
  std::set<std::string> seen;
  for (const auto& e : entities) {
    if (!seen.insert(e.id).second) continue;
    auto path = article_dir / (e.id + ".txt");
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
      ++out.missing;
      continue;
    }
    out.documents.push_back({e.id, read_file(path)});
  }
  return out;
}

TokenizedCorpus preprocess(std::span<const Document> documents, const WordSet& stopwords) {
  TokenizedCorpus out;
  out.reserve(documents.size());
  for (const auto& d : documents) out.push_back(normalize_tokens(d.text, stopwords));
  return out;
}

std::vector<size_t> TopicModel::ranked_words(size_t topic) const {
  std::vector<size_t> idx(vocabulary.size());
  std::iota(idx.begin(), idx.end(), 0);
  const auto& row = topic_word.at(topic);
  std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    if (row[a] != row[b]) return row[a] > row[b];
    return vocabulary[a] < vocabulary[b];
  });
  return idx;
}

LdaSampler::LdaSampler(const TokenizedCorpus& corpus, int num_topics, double alpha,
                       double beta, uint64_t seed)
    : num_topics_(num_topics), alpha_(alpha), beta_(beta), rng_(seed) {
  // Vocabulary in sorted order keeps word ids independent of document order.
  std::set<std::string> words;
  for (const auto& doc : corpus) words.insert(doc.begin(), doc.end());
  vocabulary_.assign(words.begin(), words.end());
  std::unordered_map<std::string, uint32_t> index;
  for (uint32_t i = 0; i < vocabulary_.size(); ++i) index[vocabulary_[i]] = i;

  const size_t K = static_cast<size_t>(num_topics_);
  doc_topic_.assign(corpus.size(), std::vector<uint32_t>(K, 0));
  topic_word_.assign(K, std::vector<uint32_t>(vocabulary_.size(), 0));
  topic_total_.assign(K, 0);
  doc_total_.assign(corpus.size(), 0);
  scratch_.resize(K);

  std::uniform_int_distribution<uint32_t> pick(0, static_cast<uint32_t>(K - 1));
  for (uint32_t d = 0; d < corpus.size(); ++d) {
    for (const auto& w : corpus[d]) {
      uint32_t wid = index[w];
      uint32_t z = pick(rng_);
      doc_of_.push_back(d);
      word_of_.push_back(wid);
      assignments_.push_back(z);
      ++doc_topic_[d][z];
      ++topic_word_[z][wid];
      ++topic_total_[z];
      ++doc_total_[d];
    }
  }
}

void LdaSampler::sweep() {
  const size_t K = static_cast<size_t>(num_topics_);
  const double vbeta = beta_ * static_cast<double>(vocabulary_.size());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (size_t i = 0; i < assignments_.size(); ++i) {
    uint32_t d = doc_of_[i], w = word_of_[i], z = assignments_[i];
    --doc_topic_[d][z];
    --topic_word_[z][w];
    --topic_total_[z];
    double total = 0;
    for (size_t k = 0; k < K; ++k) {
      total += (doc_topic_[d][k] + alpha_) * (topic_word_[k][w] + beta_) /
               (topic_total_[k] + vbeta);
      scratch_[k] = total;
    }
    double u = unit(rng_) * total;
    uint32_t nz = static_cast<uint32_t>(
        std::upper_bound(scratch_.begin(), scratch_.end(), u) - scratch_.begin());
    if (nz >= K) nz = static_cast<uint32_t>(K - 1);
    assignments_[i] = nz;
    ++doc_topic_[d][nz];
    ++topic_word_[nz][w];
    ++topic_total_[nz];
  }
}

size_t LdaSampler::topic_count_total() const {
  return std::accumulate(topic_total_.begin(), topic_total_.end(), size_t{0});
}

size_t LdaSampler::doc_topic_count_total() const {
  size_t n = 0;
  for (const auto& row : doc_topic_) n += std::accumulate(row.begin(), row.end(), size_t{0});
  return n;
}

TopicModel LdaSampler::model() const {
  const size_t K = static_cast<size_t>(num_topics_);
  const size_t V = vocabulary_.size();
  TopicModel m;
  m.vocabulary = vocabulary_;
  m.topic_word.assign(K, std::vector<double>(V, 0.0));
  for (size_t k = 0; k < K; ++k) {
    double denom = topic_total_[k] + beta_ * static_cast<double>(V);
    for (size_t w = 0; w < V; ++w) m.topic_word[k][w] = (topic_word_[k][w] + beta_) / denom;
  }
  m.doc_topic.assign(doc_topic_.size(), std::vector<double>(K, 0.0));
  for (size_t d = 0; d < doc_topic_.size(); ++d) {
    double denom = doc_total_[d] + alpha_ * static_cast<double>(K);
    for (size_t k = 0; k < K; ++k) m.doc_topic[d][k] = (doc_topic_[d][k] + alpha_) / denom;
  }
  return m;
}

TopicModel train_lda(const TokenizedCorpus& corpus, const SelectionConfig& config) {
  config.validate();
  if (corpus.empty()) throw DataError("LDA corpus is empty");
  bool any = std::any_of(corpus.begin(), corpus.end(),
                         [](const auto& d) { return !d.empty(); });
  if (!any) throw DataError("LDA corpus has an empty vocabulary");
  LdaSampler sampler(corpus, config.num_topics, config.effective_alpha(), config.beta,
                     config.seed);
  for (int i = 0; i < config.lda_iterations; ++i) sampler.sweep();
  return sampler.model();
}

std::vector<std::string> top_topic_words(const TopicModel& model, int words_per_topic,
                                         const WordSet& stopwords) {
  if (words_per_topic < 1) throw ConfigError("words_per_topic must be >= 1");
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (size_t k = 0; k < model.topic_word.size(); ++k) {
    auto ranked = model.ranked_words(k);
    size_t n = std::min(ranked.size(), static_cast<size_t>(words_per_topic));
    for (size_t i = 0; i < n; ++i) {
      const auto& w = model.vocabulary[ranked[i]];
      if (stopwords.count(w) || !seen.insert(w).second) continue;
      out.push_back(w);
    }
  }
  return out;
}

namespace {

std::vector<std::vector<std::string>> description_tokens(
    std::span<const PropertyDescription> descriptions, const WordSet& stopwords) {
  std::vector<std::vector<std::string>> out;
  out.reserve(descriptions.size());
  for (const auto& d : descriptions) {
    out.push_back(normalize_tokens(d.label + " " + d.description, stopwords));
  }
  return out;
}

}  // namespace

TfidfMatrix build_tfidf(std::span<const std::string> words,
                        std::span<const PropertyDescription> descriptions,
                        const WordSet& stopwords) {
  auto docs = description_tokens(descriptions, stopwords);
  const double n_docs = static_cast<double>(docs.size());
  TfidfMatrix t;
  t.words.assign(words.begin(), words.end());
  t.m.assign(words.size(), std::vector<double>(docs.size(), 0.0));
  t.cumulative.assign(words.size(), 0.0);
  for (size_t i = 0; i < words.size(); ++i) {
    std::vector<double> tf(docs.size(), 0.0);
    size_t df = 0;
    for (size_t j = 0; j < docs.size(); ++j) {
      tf[j] = static_cast<double>(std::count(docs[j].begin(), docs[j].end(), words[i]));
      if (tf[j] > 0) ++df;
    }
    if (df == 0) continue;
    double idf = std::log(n_docs / static_cast<double>(df));
    for (size_t j = 0; j < docs.size(); ++j) {
      t.m[i][j] = tf[j] * idf;
      t.cumulative[i] += t.m[i][j];
    }
  }
  return t;
}

std::vector<std::string> rank_by_tfidf(std::span<const std::string> words,
                                       std::span<const PropertyDescription> descriptions,
                                       double t_t, const WordSet& stopwords) {
  if (descriptions.empty()) throw DataError("no property descriptions to rank against");
  TfidfMatrix t = build_tfidf(words, descriptions, stopwords);
  std::vector<size_t> keep;
  for (size_t i = 0; i < t.words.size(); ++i) {
    if (t.cumulative[i] >= t_t) keep.push_back(i);
  }
  std::sort(keep.begin(), keep.end(), [&](size_t a, size_t b) {
    if (t.cumulative[a] != t.cumulative[b]) return t.cumulative[a] > t.cumulative[b];
    return t.words[a] < t.words[b];
  });
  std::vector<std::string> out;
  for (size_t i : keep) out.push_back(t.words[i]);
  return out;
}

std::vector<std::string> select_frequent(std::span<const std::string> ranked_words,
                                         std::span<const PropertyDescription> descriptions,
                                         long count_threshold, int num_properties,
                                         const WordSet& stopwords) {
  auto docs = description_tokens(descriptions, stopwords);
  struct Candidate {
    size_t index;
    size_t occurrences;
  };
  std::vector<Candidate> qualified;
  std::set<std::string> taken;
  for (size_t j = 0; j < descriptions.size(); ++j) {
    const auto& p = descriptions[j];
    if (p.count <= count_threshold || taken.count(p.id)) continue;
    size_t occ = 0;
    for (const auto& w : ranked_words) {
      occ += static_cast<size_t>(std::count(docs[j].begin(), docs[j].end(), w));
    }
    if (occ == 0) continue;
    taken.insert(p.id);
    qualified.push_back({j, occ});
  }
  std::sort(qualified.begin(), qualified.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.occurrences != b.occurrences) return a.occurrences > b.occurrences;
    const auto& pa = descriptions[a.index];
    const auto& pb = descriptions[b.index];
    if (pa.count != pb.count) return pa.count > pb.count;
    return pa.id < pb.id;
  });
  std::vector<std::string> out;
  for (const auto& c : qualified) {
    if (out.size() >= static_cast<size_t>(num_properties)) break;
    out.push_back(descriptions[c.index].id);
  }
  return out;
}

PropertySelection select_properties_detailed(
    std::span<const EntityRef> entities, std::span<const PropertyDescription> descriptions,
    const SelectionConfig& config, const std::filesystem::path& article_dir,
    const WordSet& stopwords) {
  config.validate();
  PropertySelection sel;
  ArticleSet articles = load_articles(entities, article_dir);
  sel.documents = articles.documents.size();
  sel.missing_articles = articles.missing;
  TopicModel model = train_lda(preprocess(articles.documents, stopwords), config);
  sel.topic_words = top_topic_words(model, config.words_per_topic, stopwords);
  sel.ranked_words =
      rank_by_tfidf(sel.topic_words, descriptions, config.tfidf_threshold, stopwords);
  sel.properties = select_frequent(sel.ranked_words, descriptions, config.count_threshold,
                                   config.num_properties, stopwords);
  return sel;
}

std::vector<std::string> select_properties(
    std::span<const EntityRef> entities, std::span<const PropertyDescription> descriptions,
    const SelectionConfig& config, const std::filesystem::path& article_dir,
    const WordSet& stopwords) {
  return select_properties_detailed(entities, descriptions, config, article_dir, stopwords)
      .properties;
}

}  // namespace argkg
