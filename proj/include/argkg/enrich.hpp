#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "argkg/kg.hpp"
#include "argkg/text.hpp"

namespace argkg {

struct EnrichConfig {
  int max_urls = 3;            // n_u
  int max_annotations = 600;   // n_a
  size_t max_chars = 99999;    // n_cmax
  size_t min_chars = 70000;    // n_cmin
  int min_words_per_sentence = 3;

  void validate() const;
};

struct RankedDocument {
  int rank = 1;
  std::string url;
  std::string text;
};

// JSON lines, one {rank, url, text} object per line. Throws ParseError on bad
// lines and DataError on duplicate or non-positive ranks.
std::vector<RankedDocument> load_ranked_documents(const std::filesystem::path& path);

// The max_urls best-ranked documents, in rank order.
std::vector<RankedDocument> top_documents(std::vector<RankedDocument> documents, int max_urls);

// Rule-based splitter: '.', '?' and '!' followed by whitespace end a sentence
// unless the preceding word is a known abbreviation or a single letter;
// blank lines always end one.
std::vector<std::string> split_sentences(const std::string& text);

// Sentences of all documents with at least min_words_per_sentence
// whitespace-separated words, exact duplicates removed.
std::vector<std::string> collect_sentences(const std::vector<RankedDocument>& documents,
                                           const EnrichConfig& config);

struct Corpus {
  std::string text;                    // chosen sentences joined by '\n'
  std::vector<std::string> sentences;  // in the order they were appended
  bool underfilled = false;            // text.size() < min_chars
  size_t skipped = 0;                  // sentences that would overflow max_chars
};

// Longest sentences first (ties lexicographic); each is appended unless it
// would push the text beyond max_chars; stops once min_chars is reached.
// The '\n' separators count toward the length.
Corpus build_corpus(std::vector<std::string> sentences, const EnrichConfig& config);

struct TripleAnnotation {
  double confidence = 1.0;
  std::string subject;
  std::string predicate;
  std::string object;
  bool operator==(const TripleAnnotation&) const = default;
};

struct TripleIngest {
  std::vector<TripleAnnotation> triples;
  size_t malformed = 0;   // skipped input lines
  size_t duplicates = 0;  // repeats of an earlier (subject, predicate, object)
  size_t truncated = 0;   // unique triples beyond max_annotations
  bool fallback = false;  // produced by the naive extractor
};

// Tab-separated "confidence subject predicate object" lines. Malformed lines
// are counted and skipped; duplicates are dropped keeping the first; the
// result is cut to max_annotations.
TripleIngest parse_triples_tsv(const std::string& content, const EnrichConfig& config);
TripleIngest ingest_triples(const std::filesystem::path& tsv, const EnrichConfig& config);

// Low-fidelity stand-in for an OpenIE system: every corpus line is split at
// its first verb from a closed list (forms of be/have/do, modals and a few
// frequent verbs) into subject, verb and object; lines without a verb or
// with an empty side are ignored. Confidence is 0.5.
TripleIngest ingest_triples_fallback(const Corpus& corpus, const EnrichConfig& config);

// Node id used for an OpenIE argument phrase.
std::string unstructured_node_id(const std::string& phrase);

// Subjects and objects become Unstructured nodes, predicates edge labels.
KnowledgeGraph build_triple_graph(const std::vector<TripleAnnotation>& triples);

struct EnrichStats {
  size_t documents = 0;
  size_t sentences = 0;
  size_t corpus_chars = 0;
  bool underfilled = false;
  size_t triples = 0;
  size_t malformed = 0;
  bool fallback = false;
  size_t unstructured_nodes = 0;
  size_t match_edges = 0;
};

struct EnrichResult {
  KnowledgeGraph graph;
  EnrichStats stats;
};

// Joins a triple graph onto the structured graph with MATCH edges.
EnrichResult enrich(const KnowledgeGraph& graph, const std::vector<TripleAnnotation>& triples,
                    const WordSet& stopwords);

// Full enrichment from ranked documents. Triples come from `triples_tsv` when
// given, otherwise from the fallback extractor run on the built corpus.
EnrichResult enrich(const KnowledgeGraph& graph, const std::vector<RankedDocument>& documents,
                    const EnrichConfig& config, const WordSet& stopwords,
                    const std::optional<std::filesystem::path>& triples_tsv = std::nullopt);

}  // namespace argkg
