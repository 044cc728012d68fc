#include "argkg/enrich.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "argkg/error.hpp"
#include "json.hpp"

namespace argkg {

using nlohmann::json;

void EnrichConfig::validate() const {
  if (max_urls < 1) throw ConfigError("max_urls must be >= 1");
  if (max_annotations < 0) throw ConfigError("max_annotations must be >= 0");
  if (min_chars > max_chars) throw ConfigError("min_chars must not exceed max_chars");
  if (min_words_per_sentence < 3) throw ConfigError("min_words_per_sentence must be >= 3");
}

std::vector<RankedDocument> load_ranked_documents(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ranked documents " + path.string());
  std::vector<RankedDocument> out;
  std::set<int> ranks;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    RankedDocument d;
    try {
      json j = json::parse(line);
      d.rank = j.at("rank").get<int>();
      d.url = j.value("url", "");
      d.text = j.at("text").get<std::string>();
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad ranked document: ") + e.what(), lineno);
    }
    if (d.rank < 1) throw DataError("document rank must be >= 1 (line " + std::to_string(lineno) + ")");
    if (!ranks.insert(d.rank).second) {
      throw DataError("duplicate document rank " + std::to_string(d.rank));
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<RankedDocument> top_documents(std::vector<RankedDocument> documents, int max_urls) {
  std::stable_sort(documents.begin(), documents.end(),
                   [](const auto& a, const auto& b) { return a.rank < b.rank; });
  if (max_urls >= 0 && documents.size() > static_cast<size_t>(max_urls)) {
    documents.resize(static_cast<size_t>(max_urls));
  }
  return documents;
}

namespace {

const std::set<std::string>& abbreviations() {
  static const std::set<std::string> kAbbrev = {
      "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs", "etc", "e.g", "i.e",
      "inc", "ltd", "co", "corp", "no", "fig", "approx", "u.s", "u.k", "jan", "feb",
      "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec", "gen",
      "gov", "sen", "rep", "mt", "dept", "est", "al"};
  return kAbbrev;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

size_t word_count(const std::string& s) {
  std::istringstream ss(s);
  size_t n = 0;
  std::string w;
  while (ss >> w) ++n;
  return n;
}

// Lowercased with runs of whitespace collapsed to one space.
std::string canonical_phrase(const std::string& s) {
  std::string out;
  for (char c : to_lower(trim(s))) {
    if (is_space(c)) {
      if (!out.empty() && out.back() != ' ') out.push_back(' ');
    } else {
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    // Collapse internal whitespace so line-wrapped sentences compare equal.
    std::string norm;
    for (char c : trim(cur)) {
      if (is_space(c)) {
        if (!norm.empty() && norm.back() != ' ') norm.push_back(' ');
      } else {
        norm.push_back(c);
      }
    }
    if (!norm.empty()) out.push_back(std::move(norm));
    cur.clear();
  };
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\n' && i + 1 < text.size() && text[i + 1] == '\n') {
      flush();
      continue;
    }
    cur.push_back(c);
    if (c != '.' && c != '?' && c != '!') continue;
    // Absorb closing punctuation such as quotes or repeated marks.
    while (i + 1 < text.size() && std::string_view(".?!\"')").find(text[i + 1]) != std::string_view::npos) {
      cur.push_back(text[++i]);
    }
    if (i + 1 < text.size() && !is_space(text[i + 1])) continue;
    if (c == '.') {
      size_t end = cur.size() - 1;
      while (end > 0 && std::string_view(".\"')").find(cur[end]) != std::string_view::npos) --end;
      size_t start = end;
      while (start > 0 && !is_space(cur[start - 1])) --start;
      std::string word = to_lower(std::string_view(cur).substr(start, end - start + 1));
      if (abbreviations().count(word) ||
          (word.size() == 1 && std::isalpha(static_cast<unsigned char>(word[0])))) {
        continue;
      }
    }
    flush();
  }
  flush();
  return out;
}

std::vector<std::string> collect_sentences(const std::vector<RankedDocument>& documents,
                                           const EnrichConfig& config) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& d : documents) {
    for (auto& s : split_sentences(d.text)) {
      if (word_count(s) < static_cast<size_t>(config.min_words_per_sentence)) continue;
      if (seen.insert(s).second) out.push_back(std::move(s));
    }
  }
  return out;
}

Corpus build_corpus(std::vector<std::string> sentences, const EnrichConfig& config) {
  std::stable_sort(sentences.begin(), sentences.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
  });
  Corpus c;
  for (auto& s : sentences) {
    if (c.text.size() >= config.min_chars && !c.sentences.empty()) break;
    size_t extra = s.size() + (c.text.empty() ? 0 : 1);
    if (c.text.size() + extra > config.max_chars) {
      ++c.skipped;
      continue;
    }
    if (!c.text.empty()) c.text.push_back('\n');
    c.text += s;
    c.sentences.push_back(std::move(s));
  }
  c.underfilled = c.text.size() < config.min_chars;
  return c;
}

namespace {

void finish_ingest(std::vector<TripleAnnotation> raw, const EnrichConfig& config,
                   TripleIngest& out) {
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (auto& t : raw) {
    auto key = std::make_tuple(canonical_phrase(t.subject), canonical_phrase(t.predicate),
                               canonical_phrase(t.object));
    if (!seen.insert(key).second) {
      ++out.duplicates;
      continue;
    }
    if (out.triples.size() >= static_cast<size_t>(config.max_annotations)) {
      ++out.truncated;
      continue;
    }
    out.triples.push_back(std::move(t));
  }
}

}  // namespace

TripleIngest parse_triples_tsv(const std::string& content, const EnrichConfig& config) {
  TripleIngest out;
  std::vector<TripleAnnotation> raw;
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> cols;
    size_t start = 0;
    while (true) {
      size_t tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cols.size() != 4) {
      ++out.malformed;
      continue;
    }
    TripleAnnotation t;
    std::string conf = trim(cols[0]);
    auto [end, ec] = std::from_chars(conf.data(), conf.data() + conf.size(), t.confidence);
    t.subject = trim(cols[1]);
    t.predicate = trim(cols[2]);
    t.object = trim(cols[3]);
    if (ec != std::errc() || end != conf.data() + conf.size() || t.confidence < 0 ||
        t.confidence > 1 || t.subject.empty() || t.predicate.empty() || t.object.empty()) {
      ++out.malformed;
      continue;
    }
    raw.push_back(std::move(t));
  }
  finish_ingest(std::move(raw), config, out);
  return out;
}

TripleIngest ingest_triples(const std::filesystem::path& tsv, const EnrichConfig& config) {
  return parse_triples_tsv(read_file(tsv), config);
}

TripleIngest ingest_triples_fallback(const Corpus& corpus, const EnrichConfig& config) {
  static const std::set<std::string> kVerbs = {
      "is", "are", "was", "were", "be", "been", "has", "have", "had", "do", "does",
      "did", "can", "could", "will", "would", "should", "may", "might", "must",
      "shall", "makes", "make", "made", "gives", "give", "gave", "uses", "use", "used",
      "needs", "need", "needed", "causes", "cause", "caused", "reduces", "reduce",
      "reduced", "increases", "increase", "increased", "kills", "kill", "killed",
      "protects", "protect", "protected", "supports", "support", "supported",
      "requires", "require", "required", "allows", "allow", "allowed", "prevents",
      "prevent", "prevented", "produces", "produce", "produced", "provides", "provide",
      "provided", "owns", "own", "owned", "means", "mean", "meant"};
  TripleIngest out;
  out.fallback = true;
  std::vector<TripleAnnotation> raw;
  for (const auto& sentence : corpus.sentences) {
    std::vector<std::string> words;
    std::istringstream ss(sentence);
    std::string w;
    while (ss >> w) words.push_back(w);
    for (size_t i = 1; i + 1 < words.size(); ++i) {
      std::string bare = to_lower(words[i]);
      while (!bare.empty() && std::ispunct(static_cast<unsigned char>(bare.back()))) bare.pop_back();
      if (!kVerbs.count(bare)) continue;
      auto join = [&](size_t b, size_t e) {
        std::string s;
        for (size_t k = b; k < e; ++k) {
          if (!s.empty()) s.push_back(' ');
          s += words[k];
        }
        while (!s.empty() && std::ispunct(static_cast<unsigned char>(s.back()))) s.pop_back();
        while (!s.empty() && std::ispunct(static_cast<unsigned char>(s.front()))) s.erase(0, 1);
        return trim(s);
      };
      TripleAnnotation t{0.5, join(0, i), bare, join(i + 1, words.size())};
      if (!t.subject.empty() && !t.object.empty()) raw.push_back(std::move(t));
      break;
    }
  }
  finish_ingest(std::move(raw), config, out);
  return out;
}

std::string unstructured_node_id(const std::string& phrase) {
  return "oie:" + canonical_phrase(phrase);
}

KnowledgeGraph build_triple_graph(const std::vector<TripleAnnotation>& triples) {
  KnowledgeGraph g;
  for (const auto& t : triples) {
    auto subject = EntityRef::make(unstructured_node_id(t.subject), trim(t.subject),
                                   Origin::Unstructured);
    auto object = EntityRef::make(unstructured_node_id(t.object), trim(t.object),
                                  Origin::Unstructured);
    std::string predicate = canonical_phrase(t.predicate);
    g.add_statement({subject.id, predicate, object.id, false}, subject, object);
    g.set_property_label(predicate, trim(t.predicate));
  }
  return g;
}

EnrichResult enrich(const KnowledgeGraph& graph, const std::vector<TripleAnnotation>& triples,
                    const WordSet& stopwords) {
  EnrichResult r;
  r.stats.triples = triples.size();
  if (triples.empty()) {
    r.graph = graph;
    return r;
  }
  KnowledgeGraph unstructured = build_triple_graph(triples);
  r.graph = merge_graphs(graph, unstructured, stopwords);
  r.stats.unstructured_nodes = unstructured.node_count();
  r.stats.match_edges = r.graph.edge_count() - graph.edge_count() - unstructured.edge_count();
  return r;
}

EnrichResult enrich(const KnowledgeGraph& graph, const std::vector<RankedDocument>& documents,
                    const EnrichConfig& config, const WordSet& stopwords,
                    const std::optional<std::filesystem::path>& triples_tsv) {
  config.validate();
  auto top = top_documents(documents, config.max_urls);
  auto sentences = collect_sentences(top, config);
  Corpus corpus = build_corpus(sentences, config);
  TripleIngest ingest = triples_tsv ? ingest_triples(*triples_tsv, config)
                                    : ingest_triples_fallback(corpus, config);
  EnrichResult r = enrich(graph, ingest.triples, stopwords);
  r.stats.documents = top.size();
  r.stats.sentences = sentences.size();
  r.stats.corpus_chars = corpus.text.size();
  r.stats.underfilled = corpus.underfilled;
  r.stats.malformed = ingest.malformed;
  r.stats.fallback = ingest.fallback;
  return r;
}

}  // namespace argkg
