#include "argkg/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "argkg/error.hpp"
#include "argkg/text.hpp"

namespace argkg {

using nlohmann::json;
namespace fs = std::filesystem;

const char* to_string(Variant v) {
  switch (v) {
    case Variant::Baseline: return "Baseline";
    case Variant::WD: return "WD";
    case Variant::WD_LDA: return "WD_LDA";
    case Variant::WD_LDA_GV: return "WD_LDA_GV";
    case Variant::WD_LDA_GV_OIE: return "WD_LDA_GV_OIE";
  }
  return "?";
}

Variant variant_from_string(std::string_view s) {
  std::string k;
  for (char c : s) {
    if (c == '+') {
      if (!k.empty()) k.push_back('_');
    } else {
      k.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
  }
  if (k == "BASELINE") return Variant::Baseline;
  if (k == "WD") return Variant::WD;
  if (k == "WD_LDA") return Variant::WD_LDA;
  if (k == "WD_LDA_GV") return Variant::WD_LDA_GV;
  if (k == "WD_LDA_GV_OIE") return Variant::WD_LDA_GV_OIE;
  throw ConfigError("unknown variant '" + std::string(s) + "'");
}

bool uses_graph(Variant v) { return v != Variant::Baseline; }
bool uses_lda(Variant v) { return v >= Variant::WD_LDA; }
bool uses_gate(Variant v) { return v >= Variant::WD_LDA_GV; }
bool uses_enrichment(Variant v) { return v == Variant::WD_LDA_GV_OIE; }

void PipelineConfig::validate() const {
  if (k_s < 1 || k_t < 1) throw ConfigError("k_s and k_t must be >= 1");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (data.dataset.empty()) throw ConfigError("data.dataset is required");
  selection.validate();
  traversal.validate();
  enrich.validate();
  classifier.validate();
}

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

void read_path(const json& j, const char* key, const fs::path& base, fs::path& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = resolve(base, j.at(key).get<std::string>());
}

}  // namespace

PipelineConfig pipeline_config_from_json(const json& j, const fs::path& base) {
  PipelineConfig c;
  try {
    if (j.contains("variant")) c.variant = variant_from_string(j.at("variant").get<std::string>());
    read(j, "k_s", c.k_s);
    read(j, "k_t", c.k_t);
    read(j, "seeds", c.seeds);
    read(j, "train_split", c.train_split);
    read(j, "test_split", c.test_split);
    read(j, "timing", c.timing);
    read(j, "jobs", c.jobs);
    read(j, "emit_graphs", c.emit_graphs);
    if (j.contains("data")) {
      const json& d = j.at("data");
      read_path(d, "dataset", base, c.data.dataset);
      read_path(d, "annotations", base, c.data.annotations);
      read_path(d, "entity_labels", base, c.data.entity_labels);
      read_path(d, "vectors", base, c.data.vectors);
      read_path(d, "articles", base, c.data.articles);
      read_path(d, "property_descriptions", base, c.data.property_descriptions);
      read_path(d, "documents", base, c.data.documents);
      read_path(d, "triples", base, c.data.triples);
      read_path(d, "stopwords", base, c.data.stopwords);
      read_path(d, "output", base, c.data.output);
    } else {
      c.data.output = base / "out";
    }
    if (j.contains("wikidata")) {
      const json& w = j.at("wikidata");
      read(w, "endpoint", c.wikidata.endpoint);
      read(w, "timeout_seconds", c.wikidata.timeout_seconds);
      read(w, "min_delay_ms", c.wikidata.min_delay_ms);
      read(w, "user_agent", c.wikidata.user_agent);
      read_path(w, "cache_dir", base, c.wikidata.cache_dir);
      if (w.contains("mode")) c.wikidata.mode = client_mode_from_string(w.at("mode").get<std::string>());
      read(w, "max_retries", c.wikidata.max_retries);
      read(w, "result_limit", c.wikidata.result_limit);
    }
    if (j.contains("selection")) {
      const json& s = j.at("selection");
      read(s, "tfidf_threshold", c.selection.tfidf_threshold);
      read(s, "count_threshold", c.selection.count_threshold);
      read(s, "num_topics", c.selection.num_topics);
      read(s, "num_properties", c.selection.num_properties);
      read(s, "lda_iterations", c.selection.lda_iterations);
      read(s, "words_per_topic", c.selection.words_per_topic);
      read(s, "seed", c.selection.seed);
      read(s, "alpha", c.selection.alpha);
      read(s, "beta", c.selection.beta);
    }
    if (j.contains("traversal")) {
      const json& t = j.at("traversal");
      read(t, "cosine_threshold", c.traversal.cosine_threshold);
      read(t, "max_nodes", c.traversal.max_nodes);
      read(t, "max_depth", c.traversal.max_depth);
      read(t, "per_entity_result_limit", c.traversal.per_entity_result_limit);
    }
    if (j.contains("enrich")) {
      const json& e = j.at("enrich");
      read(e, "max_urls", c.enrich.max_urls);
      read(e, "max_annotations", c.enrich.max_annotations);
      read(e, "max_chars", c.enrich.max_chars);
      read(e, "min_chars", c.enrich.min_chars);
      read(e, "min_words_per_sentence", c.enrich.min_words_per_sentence);
    }
    if (j.contains("classifier")) {
      const json& h = j.at("classifier");
      read(h, "dropout", c.classifier.dropout);
      read(h, "hidden_size", c.classifier.hidden_size);
      read(h, "batch_size", c.classifier.batch_size);
      read(h, "learning_rate", c.classifier.learning_rate);
      read(h, "epochs", c.classifier.epochs);
      read(h, "attention_size", c.classifier.attention_size);
      read(h, "max_paths", c.classifier.max_paths);
      read(h, "max_path_len", c.classifier.max_path_len);
      read(h, "graph_embedding_size", c.classifier.graph_embedding_size);
      read(h, "token_embedding_size", c.classifier.token_embedding_size);
      read(h, "class_weighting", c.classifier.class_weighting);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
  c.validate();
  return c;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse config " + path.string() + ": " + e.what());
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return pipeline_config_from_json(j, fs::absolute(path).parent_path());
}

namespace {

void keep_top(std::vector<ConceptAnnotation>& v, int k) {
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    if (a.rank_score != b.rank_score) return a.rank_score > b.rank_score;
    return a.entity_id < b.entity_id;
  });
  if (v.size() > static_cast<size_t>(k)) v.resize(static_cast<size_t>(k));
}

std::vector<ConceptAnnotation> parse_concepts(const json& doc, const char* key,
                                              ConceptSource source) {
  std::vector<ConceptAnnotation> out;
  if (!doc.contains(key)) return out;
  const json& list = doc.at(key);
  if (!list.is_array()) throw ParseError(std::string(key) + " must be an array");
  for (const json& item : list) {
    ConceptAnnotation a;
    try {
      a.surface = item.at("surface").get<std::string>();
      a.entity_id = item.at("entity_id").get<std::string>();
      a.rank_score = item.value("rank_score", 0.0);
      a.entity_label = item.value("entity_label", "");
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad concept in ") + key + ": " + e.what());
    }
    if (a.entity_id.empty()) throw ParseError(std::string("empty entity_id in ") + key);
    a.source = source;
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace

std::vector<ConceptAnnotation> select_annotations(const json& doc, int k_s, int k_t) {
  if (!doc.is_object()) throw ParseError("annotation document must be an object");
  auto topic = parse_concepts(doc, "topic_concepts", ConceptSource::Topic);
  auto sentence = parse_concepts(doc, "sentence_concepts", ConceptSource::Sentence);
  keep_top(topic, k_t);
  keep_top(sentence, k_s);
  topic.insert(topic.end(), sentence.begin(), sentence.end());
  return topic;
}

std::vector<ConceptAnnotation> load_annotations(const fs::path& file, int k_s, int k_t) {
  json doc;
  try {
    doc = json::parse(read_file(file));
  } catch (const json::exception& e) {
    throw ParseError("bad annotation file " + file.string() + ": " + e.what());
  }
  return select_annotations(doc, k_s, k_t);
}

std::map<InstanceKey, std::vector<ConceptAnnotation>> load_annotation_set(const fs::path& file,
                                                                          int k_s, int k_t) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open annotations " + file.string());
  std::map<InstanceKey, std::vector<ConceptAnnotation>> out;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      json doc = json::parse(line);
      InstanceKey key{trim(doc.at("topic").get<std::string>()),
                      trim(doc.at("sentence").get<std::string>())};
      out[key] = select_annotations(doc, k_s, k_t);
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad annotation line: ") + e.what(), lineno);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return out;
}

LabelLinker::LabelLinker(const fs::path& labels_tsv) {
  std::ifstream in(labels_tsv);
  if (!in) throw IoError("cannot open entity labels " + labels_tsv.string());
  std::map<std::string, std::string> labels;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("expected id<TAB>label", lineno);
    labels[trim(line.substr(0, tab))] = trim(line.substr(tab + 1));
  }
  *this = LabelLinker(labels);
}

LabelLinker::LabelLinker(const std::map<std::string, std::string>& labels) : label_of_(labels) {
  for (const auto& [id, label] : labels) {
    auto tokens = sentence_tokens(label);
    if (tokens.empty()) continue;
    max_len_ = std::max(max_len_, tokens.size());
    by_tokens_.emplace(std::move(tokens), id);
  }
}

std::vector<ConceptAnnotation> LabelLinker::link(std::string_view text,
                                                 ConceptSource source) const {
  const auto tokens = sentence_tokens(text);
  const WordSet& stop = default_stopwords();
  std::vector<ConceptAnnotation> out;
  size_t i = 0;
  while (i < tokens.size()) {
    bool matched = false;
    for (size_t len = std::min(max_len_, tokens.size() - i); len >= 1; --len) {
      std::vector<std::string> key(tokens.begin() + static_cast<long>(i),
                                   tokens.begin() + static_cast<long>(i + len));
      if (len == 1 && (stop.count(key[0]) || is_numeric(key[0]))) continue;
      auto it = by_tokens_.find(key);
      if (it == by_tokens_.end()) continue;
      ConceptAnnotation a;
      for (const auto& t : key) a.surface += (a.surface.empty() ? "" : " ") + t;
      a.entity_id = it->second;
      a.rank_score = static_cast<double>(len);
      a.source = source;
      a.entity_label = label_of_.at(it->second);
      out.push_back(std::move(a));
      i += len;
      matched = true;
      break;
    }
    if (!matched) ++i;
  }
  return out;
}

std::string topic_slug(std::string_view topic) {
  std::string out;
  for (const auto& t : split_alnum(to_lower(topic))) out += (out.empty() ? "" : "_") + t;
  return out;
}

AggregateStats compute_stats(const std::vector<SentenceRow>& rows) {
  AggregateStats s;
  double path_len_sum = 0.0;
  for (const auto& r : rows) {
    if (r.skipped) continue;
    ++s.rows;
    s.frac_sen2sen += r.sen2sen > 0;
    s.frac_sen2top += r.sen2top > 0;
    s.avg_sen2sen += static_cast<double>(r.sen2sen);
    s.avg_sen2top += static_cast<double>(r.sen2top);
    s.avg_hops += r.depth;
    s.avg_runtime += r.runtime;
    const size_t n_paths = r.sen2sen + r.sen2top;
    if (n_paths > 0) {
      ++s.rows_with_path;
      path_len_sum += static_cast<double>(r.path_edges) / static_cast<double>(n_paths);
    }
  }
  if (s.rows == 0) throw DataError("no processed rows to aggregate");
  const double n = static_cast<double>(s.rows);
  s.frac_sen2sen /= n;
  s.frac_sen2top /= n;
  s.avg_sen2sen /= n;
  s.avg_sen2top /= n;
  s.avg_hops /= n;
  s.avg_runtime /= n;
  s.avg_path_len = s.rows_with_path ? path_len_sum / static_cast<double>(s.rows_with_path) : 0.0;
  return s;
}

MeanSd mean_sd(const std::vector<double>& values) {
  MeanSd r;
  if (values.empty()) return r;
  r.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return r;
}

Pipeline::Pipeline(PipelineConfig config) : Pipeline(std::move(config), nullptr) {}

Pipeline::Pipeline(PipelineConfig config, std::unique_ptr<Transport> transport)
    : config_(std::move(config)) {
  config_.validate();
  instances_ = load_dataset(config_.data.dataset);
  const auto& d = config_.data;
  auto require = [](const fs::path& p, const char* what) {
    if (!p.empty() && !fs::exists(p)) {
      throw ConfigError(std::string(what) + " not found: " + p.string());
    }
  };
  require(d.annotations, "annotations");
  require(d.entity_labels, "entity labels");
  require(d.vectors, "vectors");
  require(d.stopwords, "stopwords");
  if (!d.annotations.empty()) annotations_ = load_annotation_set(d.annotations, config_.k_s, config_.k_t);
  if (!d.entity_labels.empty()) linker_.emplace(d.entity_labels);
  if (!d.vectors.empty()) vectors_ = load_vectors(d.vectors);
  stopwords_ = d.stopwords.empty() ? default_stopwords() : load_stopwords(d.stopwords);
  if (uses_lda(config_.variant)) {
    if (d.property_descriptions.empty() || d.articles.empty()) {
      throw ConfigError("variant " + std::string(to_string(config_.variant)) +
                        " needs data.property_descriptions and data.articles");
    }
    require(d.property_descriptions, "property descriptions");
    require(d.articles, "articles");
    descriptions_ = load_property_descriptions(d.property_descriptions);
  }
  if (uses_gate(config_.variant) && !vectors_.valid()) {
    notes_.push_back("no word vectors; the cosine gate accepts every entity");
  }
  client_ = std::make_unique<WikidataClient>(config_.wikidata, std::move(transport));
}

std::vector<ConceptAnnotation> Pipeline::annotations_for(size_t index) const {
  const auto& inst = instances_.at(index);
  auto it = annotations_.find({inst.topic, inst.sentence});
  if (it != annotations_.end()) return it->second;
  if (!linker_) return {};
  auto topic = linker_->link(inst.topic, ConceptSource::Topic);
  auto sentence = linker_->link(inst.sentence, ConceptSource::Sentence);
  keep_top(topic, config_.k_t);
  keep_top(sentence, config_.k_s);
  topic.insert(topic.end(), sentence.begin(), sentence.end());
  return topic;
}

const TopicResources& Pipeline::topic_resources(const std::string& topic) {
  auto found = topics_.find(topic);
  if (found != topics_.end()) return found->second;
  TopicResources r;
  const Variant v = config_.variant;
  try {
    if (uses_lda(v)) {
      std::map<std::string, EntityRef> entities;
      for (size_t i = 0; i < instances_.size(); ++i) {
        if (instances_[i].topic != topic) continue;
        for (const auto& a : annotations_for(i)) {
          entities.emplace(a.entity_id, seed_entity_node(a));
        }
      }
      std::vector<EntityRef> list;
      for (auto& [id, e] : entities) list.push_back(e);
      r.selection = select_properties_detailed(list, descriptions_, config_.selection,
                                               config_.data.articles, stopwords_);
      r.properties = r.selection.properties;
      if (r.properties.empty()) {
        notes_.push_back("topic '" + topic + "': property selection empty, using P279 and P31");
      }
    }
    if (r.properties.empty()) r.properties = {"P279", "P31"};
    if (uses_enrichment(v)) {
      const std::string slug = topic_slug(topic);
      fs::path docs = config_.data.documents.empty() ? fs::path()
                                                     : config_.data.documents / (slug + ".jsonl");
      fs::path tsv = config_.data.triples.empty() ? fs::path()
                                                  : config_.data.triples / (slug + ".tsv");
      Corpus corpus;
      if (!docs.empty() && fs::exists(docs)) {
        auto top = top_documents(load_ranked_documents(docs), config_.enrich.max_urls);
        auto sentences = collect_sentences(top, config_.enrich);
        r.enrich_stats.documents = top.size();
        r.enrich_stats.sentences = sentences.size();
        corpus = build_corpus(std::move(sentences), config_.enrich);
        r.enrich_stats.corpus_chars = corpus.text.size();
        r.enrich_stats.underfilled = corpus.underfilled;
      }
      TripleIngest ingest;
      if (!tsv.empty() && fs::exists(tsv)) {
        ingest = ingest_triples(tsv, config_.enrich);
      } else if (!corpus.sentences.empty()) {
        ingest = ingest_triples_fallback(corpus, config_.enrich);
      } else {
        notes_.push_back("topic '" + topic + "': no documents or triples, enrichment skipped");
      }
      r.triples = std::move(ingest.triples);
      r.enrich_stats.triples = r.triples.size();
      r.enrich_stats.malformed = ingest.malformed;
      r.enrich_stats.fallback = ingest.fallback;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    r.error = e.what();
    notes_.push_back("topic '" + topic + "': " + r.error);
  }
  return topics_.emplace(topic, std::move(r)).first->second;
}

void Pipeline::prepare_topics() {
  if (!uses_graph(config_.variant)) return;
  for (const auto& inst : instances_) topic_resources(inst.topic);
}

SentenceResult Pipeline::process(size_t index) {
  const LabeledInstance& inst = instances_.at(index);
  SentenceResult r;
  SentenceRow& row = r.row;
  row.index = index;
  row.topic = inst.topic;
  row.sentence = inst.sentence;
  row.label = inst.label;
  row.split = inst.split;
  if (!uses_graph(config_.variant)) return r;

  auto annotations = annotations_for(index);
  const bool has_sentence_concept =
      std::any_of(annotations.begin(), annotations.end(),
                  [](const ConceptAnnotation& a) { return a.source == ConceptSource::Sentence; });
  if (!has_sentence_concept) {
    row.skipped = true;
    row.reason = "no sentence concept annotations";
    return r;
  }
  auto topic_it = topics_.find(inst.topic);
  if (topic_it == topics_.end()) throw LogicError("topic resources not prepared: " + inst.topic);
  const TopicResources& topic = topic_it->second;
  if (!topic.error.empty()) {
    row.skipped = true;
    row.reason = "topic unavailable: " + topic.error;
    return r;
  }
  try {
    auto started = std::chrono::steady_clock::now();
    TraversalConfig tc = config_.traversal;
    if (!uses_gate(config_.variant)) tc.cosine_threshold = -1.0;
    TraversalResult tr = dynamic_bfs(inst.sentence, annotations, topic.properties, vectors(),
                                     *client_, tc);
    r.graph = std::move(tr.graph);
    if (uses_enrichment(config_.variant) && !topic.triples.empty()) {
      r.graph = enrich(r.graph, topic.triples, stopwords_).graph;
    }
    const auto topic_ids = concept_ids(annotations, ConceptSource::Topic);
    const auto sentence_ids = concept_ids(annotations, ConceptSource::Sentence);
    auto paths = extract_evidence(r.graph, topic_ids, sentence_ids);
    row.runtime =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    const auto tokens = sentence_tokens(inst.sentence);
    const std::set<std::string> sentence_set(sentence_ids.begin(), sentence_ids.end());
    for (auto& p : paths) {
      AnchoredPath ap{std::move(p), {}};
      std::set<size_t> anchors;
      for (const auto* end : {&ap.path.source(), &ap.path.target()}) {
        if (!sentence_set.count(*end)) continue;
        for (size_t a : anchor_tokens(tokens, r.graph.node(*end).label)) anchors.insert(a);
      }
      ap.anchors.assign(anchors.begin(), anchors.end());
      if (ap.path.kind == PathKind::SentenceToSentence) {
        ++row.sen2sen;
      } else {
        ++row.sen2top;
      }
      row.path_edges += ap.path.edge_count();
      r.paths.push_back(std::move(ap));
    }
    row.depth = tr.stats.depth_reached;
    row.nodes = r.graph.node_count();
    row.edges = r.graph.edge_count();
    row.properties = topic.properties.size();
    row.gate_rejections = tr.stats.gate_rejections;
    row.truncated = tr.stats.truncated;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    r = SentenceResult{};
    r.row = {index, inst.topic, inst.sentence, inst.label, inst.split, true, e.what()};
  }
  return r;
}

std::vector<SentenceResult> Pipeline::process_all() {
  prepare_topics();
  std::vector<SentenceResult> results(instances_.size());
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= results.size()) return;
      try {
        results[i] = process(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = results.size();
      }
    }
  };
  const size_t n = std::min(static_cast<size_t>(config_.jobs), std::max<size_t>(results.size(), 1));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::vector<LabeledInstance> labeled_instances(const std::vector<SentenceResult>& results) {
  std::vector<LabeledInstance> out;
  for (const auto& r : results) {
    if (r.row.skipped) continue;
    out.push_back({r.row.topic, r.row.sentence, r.row.label, r.row.split, r.paths});
  }
  return out;
}

void Pipeline::classify(const std::vector<SentenceResult>& results, RunReport& report) const {
  std::vector<LabeledInstance> train_set, test_set;
  for (auto& inst : labeled_instances(results)) {
    if (inst.split == config_.train_split) {
      train_set.push_back(std::move(inst));
    } else if (inst.split == config_.test_split) {
      test_set.push_back(std::move(inst));
    }
  }
  report.train_size = train_set.size();
  report.test_size = test_set.size();
  if (train_set.empty() || test_set.empty()) {
    report.notes.push_back("classifier skipped: empty train or test split");
    return;
  }
  const ModelMode mode =
      config_.variant == Variant::Baseline ? ModelMode::Baseline : ModelMode::WithPaths;
  TokenEmbedder embedder(vectors(), config_.classifier.token_embedding_size);
  std::vector<double> acc, f1, bf1;
  try {
    for (auto seed : config_.seeds) {
      ClassifierHyperparams hp = config_.classifier;
      hp.seed = seed;
      TrainResult tr = train(train_set, hp, mode, embedder);
      SeedResult s{seed, evaluate(tr.params, test_set, embedder), tr.log.epoch_loss};
      acc.push_back(s.evaluation.accuracy);
      f1.push_back(s.evaluation.macro_f1);
      bf1.push_back(s.evaluation.binary_f1);
      report.seeds.push_back(std::move(s));
    }
  } catch (const DataError& e) {
    report.notes.push_back(std::string("classifier skipped: ") + e.what());
    report.seeds.clear();
    return;
  }
  report.accuracy = mean_sd(acc);
  report.macro_f1 = mean_sd(f1);
  report.binary_f1 = mean_sd(bf1);
}

RunReport Pipeline::run() {
  auto results = process_all();
  RunReport report;
  report.variant = config_.variant;
  report.timing = config_.timing;
  for (const auto& r : results) report.rows.push_back(r.row);
  if (uses_graph(config_.variant)) {
    try {
      report.stats = compute_stats(report.rows);
    } catch (const DataError& e) {
      report.notes.push_back(e.what());
    }
  }
  report.notes.insert(report.notes.begin(), notes_.begin(), notes_.end());
  report.notes.push_back("split: train='" + config_.train_split + "' test='" +
                         config_.test_split + "'");
  classify(results, report);

  const fs::path out = config_.data.output / to_string(config_.variant);
  fs::create_directories(out / "paths");
  for (const auto& r : results) {
    char name[32];
    std::snprintf(name, sizeof name, "%06zu", r.row.index);
    json pj = {{"index", r.row.index},
               {"topic", r.row.topic},
               {"sentence", r.row.sentence},
               {"paths", paths_to_json(r.paths)}};
    write_text(out / "paths" / (std::string(name) + ".json"), pj.dump(1) + "\n");
    if (config_.emit_graphs && uses_graph(config_.variant) && !r.row.skipped) {
      fs::create_directories(out / "graphs");
      write_text(out / "graphs" / (std::string(name) + ".json"), graph_to_json(r.graph).dump(1) + "\n");
      write_text(out / "graphs" / (std::string(name) + ".dot"), graph_to_dot(r.graph));
    }
  }
  write_text(out / "report.tsv", reports_to_tsv({report}));
  write_text(out / "report.json", report_to_json(report).dump(1) + "\n");
  return report;
}

json graph_to_json(const KnowledgeGraph& g) {
  json nodes = json::array();
  for (const auto& [id, n] : g.nodes()) {
    nodes.push_back({{"id", id}, {"label", n.label}, {"origin", to_string(n.origin)}});
  }
  json edges = json::array();
  for (const auto& e : g.edges()) {
    edges.push_back({{"subject", e.subject},
                     {"predicate", e.predicate},
                     {"object", e.object},
                     {"openied", e.openied}});
  }
  return {{"nodes", nodes}, {"edges", edges}, {"property_labels", g.property_labels()}};
}

KnowledgeGraph graph_from_json(const json& j) {
  KnowledgeGraph g;
  try {
    for (const auto& n : j.at("nodes")) {
      g.add_node(EntityRef::make(n.at("id").get<std::string>(), n.at("label").get<std::string>(),
                                 origin_from_string(n.at("origin").get<std::string>())));
    }
    for (const auto& e : j.at("edges")) {
      g.add_edge({e.at("subject").get<std::string>(), e.at("predicate").get<std::string>(),
                  e.at("object").get<std::string>(), e.value("openied", false)});
    }
    if (j.contains("property_labels")) {
      for (const auto& [id, label] : j.at("property_labels").items()) {
        g.set_property_label(id, label.get<std::string>());
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad graph document: ") + e.what());
  } catch (const LogicError& e) {
    throw ParseError(std::string("bad graph document: ") + e.what());
  }
  return g;
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string graph_to_dot(const KnowledgeGraph& g) {
  std::ostringstream out;
  out << "digraph kg {\n";
  for (const auto& [id, n] : g.nodes()) {
    const char* shape = n.origin == Origin::Concept ? "box"
                        : n.origin == Origin::Unstructured ? "ellipse, style=dashed"
                                                            : "ellipse";
    out << "  \"" << dot_escape(id) << "\" [label=\"" << dot_escape(n.label) << "\", shape="
        << shape << "];\n";
  }
  const auto& labels = g.property_labels();
  for (const auto& e : g.edges()) {
    auto it = labels.find(e.predicate);
    const std::string& label = it == labels.end() ? e.predicate : it->second;
    out << "  \"" << dot_escape(e.subject) << "\" -> \"" << dot_escape(e.object)
        << "\" [label=\"" << dot_escape(label) << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

json paths_to_json(const std::vector<AnchoredPath>& paths) {
  json out = json::array();
  for (const auto& p : paths) {
    out.push_back({{"kind", to_string(p.path.kind)},
                   {"elements", p.path.elements},
                   {"forward", p.path.forward},
                   {"anchors", p.anchors}});
  }
  return out;
}

std::vector<AnchoredPath> paths_from_json(const json& j) {
  std::vector<AnchoredPath> out;
  try {
    for (const auto& p : j) {
      AnchoredPath ap;
      ap.path.kind = path_kind_from_string(p.at("kind").get<std::string>());
      ap.path.elements = p.at("elements").get<std::vector<std::string>>();
      ap.path.forward = p.at("forward").get<std::vector<bool>>();
      ap.anchors = p.at("anchors").get<std::vector<size_t>>();
      out.push_back(std::move(ap));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad path cache: ") + e.what());
  }
  return out;
}

json row_to_json(const SentenceRow& r, bool timing) {
  json j = {{"index", r.index},
            {"topic", r.topic},
            {"sentence", r.sentence},
            {"label", to_string(r.label)},
            {"split", r.split},
            {"skipped", r.skipped},
            {"reason", r.reason},
            {"sen2sen", r.sen2sen},
            {"sen2top", r.sen2top},
            {"path_edges", r.path_edges},
            {"depth", r.depth},
            {"nodes", r.nodes},
            {"edges", r.edges},
            {"properties", r.properties},
            {"gate_rejections", r.gate_rejections},
            {"truncated", r.truncated}};
  j["runtime"] = timing ? json(r.runtime) : json(nullptr);
  return j;
}

namespace {

json mean_sd_json(const MeanSd& m) { return {{"mean", m.mean}, {"sd", m.sd}}; }

MeanSd mean_sd_from(const json& j) {
  return {j.at("mean").get<double>(), j.at("sd").get<double>()};
}

}  // namespace

json report_to_json(const RunReport& r) {
  json j;
  j["variant"] = to_string(r.variant);
  j["timing"] = r.timing;
  if (r.stats) {
    const auto& s = *r.stats;
    j["stats"] = {{"frac_sen2sen", s.frac_sen2sen},
                  {"frac_sen2top", s.frac_sen2top},
                  {"avg_sen2sen", s.avg_sen2sen},
                  {"avg_sen2top", s.avg_sen2top},
                  {"avg_hops", s.avg_hops},
                  {"avg_path_len", s.avg_path_len},
                  {"rows", s.rows},
                  {"rows_with_path", s.rows_with_path}};
    j["stats"]["avg_runtime"] = r.timing ? json(s.avg_runtime) : json(nullptr);
  } else {
    j["stats"] = nullptr;
  }
  j["accuracy"] = mean_sd_json(r.accuracy);
  j["macro_f1"] = mean_sd_json(r.macro_f1);
  j["binary_f1"] = mean_sd_json(r.binary_f1);
  j["train_size"] = r.train_size;
  j["test_size"] = r.test_size;
  json seeds = json::array();
  for (const auto& s : r.seeds) {
    const auto& e = s.evaluation;
    seeds.push_back({{"seed", s.seed},
                     {"accuracy", e.accuracy},
                     {"macro_f1", e.macro_f1},
                     {"binary_f1", e.binary_f1},
                     {"confusion", e.confusion},
                     {"epoch_loss", s.epoch_loss}});
  }
  j["seeds"] = seeds;
  json rows = json::array();
  json skipped = json::array();
  for (const auto& row : r.rows) {
    rows.push_back(row_to_json(row, r.timing));
    if (row.skipped) skipped.push_back({{"index", row.index}, {"reason", row.reason}});
  }
  j["rows"] = rows;
  j["skipped"] = skipped;
  j["notes"] = r.notes;
  return j;
}

RunReport report_from_json(const json& j) {
  RunReport r;
  try {
    r.variant = variant_from_string(j.at("variant").get<std::string>());
    r.timing = j.at("timing").get<bool>();
    if (!j.at("stats").is_null()) {
      const json& s = j.at("stats");
      AggregateStats a;
      a.frac_sen2sen = s.at("frac_sen2sen");
      a.frac_sen2top = s.at("frac_sen2top");
      a.avg_sen2sen = s.at("avg_sen2sen");
      a.avg_sen2top = s.at("avg_sen2top");
      a.avg_hops = s.at("avg_hops");
      a.avg_path_len = s.at("avg_path_len");
      a.avg_runtime = s.at("avg_runtime").is_null() ? 0.0 : s.at("avg_runtime").get<double>();
      a.rows = s.at("rows");
      a.rows_with_path = s.at("rows_with_path");
      r.stats = a;
    }
    r.accuracy = mean_sd_from(j.at("accuracy"));
    r.macro_f1 = mean_sd_from(j.at("macro_f1"));
    r.binary_f1 = mean_sd_from(j.at("binary_f1"));
    r.train_size = j.at("train_size");
    r.test_size = j.at("test_size");
    for (const auto& s : j.at("seeds")) {
      SeedResult sr;
      sr.seed = s.at("seed");
      sr.evaluation.confusion = s.at("confusion").get<Confusion>();
      sr.evaluation = metrics_from_confusion(sr.evaluation.confusion);
      sr.epoch_loss = s.at("epoch_loss").get<std::vector<double>>();
      r.seeds.push_back(std::move(sr));
    }
    for (const auto& row : j.at("rows")) {
      SentenceRow s;
      s.index = row.at("index");
      s.topic = row.at("topic");
      s.sentence = row.at("sentence");
      s.label = label_from_string(row.at("label").get<std::string>());
      s.split = row.at("split");
      s.skipped = row.at("skipped");
      s.reason = row.at("reason");
      s.sen2sen = row.at("sen2sen");
      s.sen2top = row.at("sen2top");
      s.path_edges = row.at("path_edges");
      s.depth = row.at("depth");
      s.nodes = row.at("nodes");
      s.edges = row.at("edges");
      s.properties = row.at("properties");
      s.gate_rejections = row.at("gate_rejections");
      s.truncated = row.at("truncated");
      s.runtime = row.at("runtime").is_null() ? 0.0 : row.at("runtime").get<double>();
      r.rows.push_back(std::move(s));
    }
    r.notes = j.at("notes").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad report: ") + e.what());
  }
  return r;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::string reports_to_tsv(const std::vector<RunReport>& reports) {
  std::ostringstream out;
  out << "variant\tsents_sen2sen\tsents_sen2top\tavg_num_sen2sen\tavg_num_sen2top\tavg_hops"
         "\tavg_path_len\tavg_runtime\tacc_mean\tacc_sd\tf1_mean\tf1_sd\tf1_binary_mean"
         "\tf1_binary_sd\tsentences\tskipped\tseeds\n";
  for (const auto& r : reports) {
    size_t skipped = 0;
    for (const auto& row : r.rows) skipped += row.skipped;
    out << to_string(r.variant);
    if (r.stats) {
      const auto& s = *r.stats;
      out << '\t' << fmt(s.frac_sen2sen) << '\t' << fmt(s.frac_sen2top) << '\t'
          << fmt(s.avg_sen2sen) << '\t' << fmt(s.avg_sen2top) << '\t' << fmt(s.avg_hops) << '\t'
          << fmt(s.avg_path_len) << '\t' << (r.timing ? fmt(s.avg_runtime) : "NA");
    } else {
      out << "\t-\t-\t-\t-\t-\t-\t-";
    }
    if (r.seeds.empty()) {
      out << "\t-\t-\t-\t-\t-\t-";
    } else {
      out << '\t' << fmt(r.accuracy.mean) << '\t' << fmt(r.accuracy.sd) << '\t'
          << fmt(r.macro_f1.mean) << '\t' << fmt(r.macro_f1.sd) << '\t'
          << fmt(r.binary_f1.mean) << '\t' << fmt(r.binary_f1.sd);
    }
    out << '\t' << r.rows.size() << '\t' << skipped << '\t' << r.seeds.size() << '\n';
  }
  return out.str();
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace argkg
