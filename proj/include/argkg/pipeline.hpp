#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "argkg/annotation.hpp"
#include "argkg/classify.hpp"
#include "argkg/embed.hpp"
#include "argkg/enrich.hpp"
#include "argkg/kg.hpp"
#include "argkg/topicsel.hpp"
#include "argkg/traverse.hpp"
#include "argkg/wikidata.hpp"
#include "json.hpp"

namespace argkg {

enum class Variant { Baseline, WD, WD_LDA, WD_LDA_GV, WD_LDA_GV_OIE };

const char* to_string(Variant v);
// Accepts the enum spelling and the ladder spelling ("+WD+LDA").
Variant variant_from_string(std::string_view s);

bool uses_graph(Variant v);
bool uses_lda(Variant v);
bool uses_gate(Variant v);
bool uses_enrichment(Variant v);

struct DataPaths {
  std::filesystem::path dataset;      // topic, sentence, label, split TSV
  std::filesystem::path annotations;  // JSON lines, one per instance
  std::filesystem::path entity_labels;  // id<TAB>label, for the fallback linker
  std::filesystem::path vectors;
  std::filesystem::path articles;     // <entity id>.txt
  std::filesystem::path property_descriptions;
  std::filesystem::path documents;    // <topic slug>.jsonl
  std::filesystem::path triples;      // <topic slug>.tsv
  std::filesystem::path stopwords;
  std::filesystem::path output = "out";
};

struct PipelineConfig {
  Variant variant = Variant::WD_LDA_GV_OIE;
  int k_s = 5;
  int k_t = 2;
  std::vector<unsigned long long> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::string train_split = "train";
  std::string test_split = "test";
  bool timing = true;  // false writes NA for every wall-clock column
  int jobs = 1;
  bool emit_graphs = false;
  DataPaths data;
  SparqlEndpointConfig wikidata;
  SelectionConfig selection;
  TraversalConfig traversal;
  EnrichConfig enrich;
  ClassifierHyperparams classifier;

  void validate() const;
};

// Reads the JSON config. Relative paths are resolved against the file's
// directory; missing keys keep their defaults. Throws ConfigError.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
PipelineConfig pipeline_config_from_json(const nlohmann::json& j,
                                         const std::filesystem::path& base_dir);

// Top k_t topic and k_s sentence concepts, by rank_score descending then
// entity id. Throws ParseError on malformed input.
std::vector<ConceptAnnotation> select_annotations(const nlohmann::json& doc, int k_s, int k_t);
std::vector<ConceptAnnotation> load_annotations(const std::filesystem::path& file, int k_s,
                                                int k_t);

using InstanceKey = std::pair<std::string, std::string>;  // topic, sentence

// JSON lines carrying "topic" and "sentence" next to the concept lists.
std::map<InstanceKey, std::vector<ConceptAnnotation>> load_annotation_set(
    const std::filesystem::path& file, int k_s, int k_t);

// Exact lowercase label match over token n-grams, longest first, without
// overlaps. rank_score is the match length in tokens.
class LabelLinker {
 public:
  explicit LabelLinker(const std::filesystem::path& labels_tsv);
  explicit LabelLinker(const std::map<std::string, std::string>& labels);
  std::vector<ConceptAnnotation> link(std::string_view text, ConceptSource source) const;

 private:
  std::map<std::vector<std::string>, std::string> by_tokens_;
  std::map<std::string, std::string> label_of_;
  size_t max_len_ = 0;
};

// "Nuclear energy" -> "nuclear_energy".
std::string topic_slug(std::string_view topic);

struct SentenceRow {
  size_t index = 0;
  std::string topic;
  std::string sentence;
  Label label = Label::NoArgument;
  std::string split;
  bool skipped = false;
  std::string reason;
  size_t sen2sen = 0;
  size_t sen2top = 0;
  size_t path_edges = 0;  // summed over all paths
  int depth = 0;
  double runtime = 0.0;  // seconds, graph stages only
  size_t nodes = 0;
  size_t edges = 0;
  size_t properties = 0;
  size_t gate_rejections = 0;
  bool truncated = false;
};

struct AggregateStats {
  double frac_sen2sen = 0.0;
  double frac_sen2top = 0.0;
  double avg_sen2sen = 0.0;
  double avg_sen2top = 0.0;
  double avg_hops = 0.0;
  double avg_path_len = 0.0;  // mean of per-row mean edge counts, rows with paths
  double avg_runtime = 0.0;
  size_t rows = 0;
  size_t rows_with_path = 0;
};

// Skipped rows are ignored. Throws DataError when no row remains.
AggregateStats compute_stats(const std::vector<SentenceRow>& rows);

struct SeedResult {
  unsigned long long seed = 0;
  Evaluation evaluation;
  std::vector<double> epoch_loss;
};

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation, 0 for a single value
};

MeanSd mean_sd(const std::vector<double>& values);

struct RunReport {
  Variant variant = Variant::Baseline;
  std::vector<SentenceRow> rows;
  std::optional<AggregateStats> stats;
  std::vector<SeedResult> seeds;
  MeanSd accuracy;
  MeanSd macro_f1;
  MeanSd binary_f1;
  size_t train_size = 0;
  size_t test_size = 0;
  bool timing = true;
  std::vector<std::string> notes;
};

struct SentenceResult {
  SentenceRow row;
  KnowledgeGraph graph;
  std::vector<AnchoredPath> paths;
};

struct TopicResources {
  std::vector<std::string> properties;
  PropertySelection selection;
  std::vector<TripleAnnotation> triples;
  EnrichStats enrich_stats;
  std::string error;  // non-empty when the topic could not be prepared
};

class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config);
  Pipeline(PipelineConfig config, std::unique_ptr<Transport> transport);

  const PipelineConfig& config() const { return config_; }
  const std::vector<LabeledInstance>& instances() const { return instances_; }
  const EmbeddingTable* vectors() const { return vectors_.valid() ? &vectors_ : nullptr; }
  const WordSet& stopwords() const { return stopwords_; }
  WikidataClient& client() { return *client_; }

  // Annotations used for an instance: the annotation file first, the
  // fallback linker second. Empty when neither knows the instance.
  std::vector<ConceptAnnotation> annotations_for(size_t index) const;

  // Property selection and triple ingestion for one topic, computed once.
  const TopicResources& topic_resources(const std::string& topic);

  // Graph stages for one instance. Per-instance data errors become a skipped
  // row; configuration errors propagate.
  SentenceResult process(size_t index);

  // All instances, `jobs` workers, results in dataset order.
  std::vector<SentenceResult> process_all();

  // Train and evaluate once per seed on the processed instances.
  void classify(const std::vector<SentenceResult>& results, RunReport& report) const;

  // Processes every instance, classifies, and writes report.tsv,
  // report.json and paths/ (plus graphs/ when asked) under
  // <output>/<variant>/.
  RunReport run();

 private:
  void prepare_topics();

  PipelineConfig config_;
  std::vector<LabeledInstance> instances_;
  std::map<InstanceKey, std::vector<ConceptAnnotation>> annotations_;
  std::optional<LabelLinker> linker_;
  EmbeddingTable vectors_;
  WordSet stopwords_;
  std::vector<PropertyDescription> descriptions_;
  std::unique_ptr<WikidataClient> client_;
  std::map<std::string, TopicResources> topics_;
  std::vector<std::string> notes_;
};

// Instances of the rows that were not skipped, with their paths attached.
std::vector<LabeledInstance> labeled_instances(const std::vector<SentenceResult>& results);

nlohmann::json graph_to_json(const KnowledgeGraph& g);
KnowledgeGraph graph_from_json(const nlohmann::json& j);
std::string graph_to_dot(const KnowledgeGraph& g);

nlohmann::json paths_to_json(const std::vector<AnchoredPath>& paths);
std::vector<AnchoredPath> paths_from_json(const nlohmann::json& j);

nlohmann::json row_to_json(const SentenceRow& row, bool timing);
nlohmann::json report_to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& j);

// Header plus one line per report, columns as in the results table.
std::string reports_to_tsv(const std::vector<RunReport>& reports);

void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace argkg
