#include <fstream>

#include "argkg/error.hpp"
#include "argkg/enrich.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace argkg;
using argkg::testing::TempDir;

namespace {

EnrichConfig small_config(size_t min_chars, size_t max_chars, int max_annotations = 600) {
  EnrichConfig c;
  c.min_chars = min_chars;
  c.max_chars = max_chars;
  c.max_annotations = max_annotations;
  return c;
}

}  // namespace

TEST_CASE("split_sentences") {
  CHECK(split_sentences("Yes. No no no.") == std::vector<std::string>{"Yes.", "No no no."});
  CHECK(split_sentences("Dr. Smith arrived. He left!") ==
        std::vector<std::string>{"Dr. Smith arrived.", "He left!"});
  CHECK(split_sentences("A heading\n\nThen   some text") ==
        std::vector<std::string>{"A heading", "Then some text"});
  CHECK(split_sentences("He said \"stop.\" Then he went.") ==
        std::vector<std::string>{"He said \"stop.\"", "Then he went."});
}

TEST_CASE("collect_sentences keeps sentences of three words or more") {
  EnrichConfig c;
  CHECK(collect_sentences({{1, "u", "Yes. No no no."}}, c) ==
        std::vector<std::string>{"No no no."});
  CHECK(collect_sentences({}, c).empty());
  const std::string paragraph =
      "Nuclear plants produce steady power. Really? Waste storage remains an open problem. "
      "Indeed. Several countries are phasing out reactors.";
  CHECK(collect_sentences({{1, "u", paragraph}}, c).size() == 3);
  CHECK(collect_sentences({{1, "u", paragraph}, {2, "v", paragraph}}, c).size() == 3);
}

TEST_CASE("ranked documents") {
  TempDir dir;
  std::ofstream(dir.path() / "d.jsonl")
      << R"({"rank": 2, "url": "b", "text": "two"})" << "\n"
      << R"({"rank": 1, "url": "a", "text": "one"})" << "\n"
      << R"({"rank": 3, "url": "c", "text": "three"})" << "\n";
  auto top = top_documents(load_ranked_documents(dir.path() / "d.jsonl"), 2);
  REQUIRE(top.size() == 2);
  CHECK(top[0].url == "a");
  CHECK(top[1].url == "b");

  std::ofstream(dir.path() / "dup.jsonl") << R"({"rank": 1, "url": "a", "text": "x"})" << "\n"
                                          << R"({"rank": 1, "url": "b", "text": "y"})" << "\n";
  CHECK_THROWS_AS(load_ranked_documents(dir.path() / "dup.jsonl"), DataError);
  std::ofstream(dir.path() / "bad.jsonl") << "{\"rank\": 1,\n";
  CHECK_THROWS_AS(load_ranked_documents(dir.path() / "bad.jsonl"), ParseError);
}

TEST_CASE("build_corpus greedy rule") {
  const std::vector<std::string> s = {std::string(9, 'b'), std::string(12, 'a'),
                                      std::string(8, 'c')};
  Corpus c = build_corpus(s, small_config(10, 20));
  CHECK(c.sentences == std::vector<std::string>{std::string(12, 'a')});
  CHECK_FALSE(c.underfilled);

  Corpus all = build_corpus(s, small_config(100, 200));
  CHECK(all.sentences.size() == 3);
  CHECK(all.text.size() == 12 + 9 + 8 + 2);
  CHECK(all.underfilled);

  Corpus none = build_corpus({std::string(30, 'x')}, small_config(10, 20));
  CHECK(none.text.empty());
  CHECK(none.underfilled);
  CHECK(none.skipped == 1);
}

TEST_CASE("build_corpus matches the greedy oracle on random lengths") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<size_t> n(0, 12), len(1, 40), lim(1, 120);
    std::vector<std::string> sentences;
    std::vector<size_t> lengths;
    for (size_t k = n(rng); k > 0; --k) {
      lengths.push_back(len(rng));
      sentences.emplace_back(lengths.back(), static_cast<char>('a' + sentences.size()));
    }
    size_t a = lim(rng), b = lim(rng);
    auto cfg = small_config(std::min(a, b), std::max(a, b));
    Corpus c = build_corpus(sentences, cfg);
    auto want = argkg::testing::greedy_corpus(lengths, cfg.min_chars, cfg.max_chars);
    CHECK(c.text.size() == want.total);
    CHECK(c.sentences.size() == want.chosen.size());
  }
}

TEST_CASE("parse_triples_tsv") {
  EnrichConfig c;
  auto one = parse_triples_tsv("1.0\tMembers of politics\tin general have\tpower\n", c);
  REQUIRE(one.triples.size() == 1);
  CHECK(one.triples[0] == TripleAnnotation{1.0, "Members of politics", "in general have", "power"});

  auto dup = parse_triples_tsv(
      "0.9\tguns\tcause\tharm\n0.8\tGuns\tcause \tharm\nbroken line\n2.0\ta\tb\tc\n", c);
  CHECK(dup.triples.size() == 1);
  CHECK(dup.duplicates == 1);
  CHECK(dup.malformed == 2);

  std::string five;
  for (int i = 0; i < 5; ++i) five += "1.0\ts" + std::to_string(i) + "\tp\to\n";
  auto capped = parse_triples_tsv(five, small_config(1, 10, 2));
  REQUIRE(capped.triples.size() == 2);
  CHECK(capped.triples[0].subject == "s0");
  CHECK(capped.triples[1].subject == "s1");
  CHECK(capped.truncated == 3);
}

TEST_CASE("fallback extractor") {
  Corpus c;
  c.sentences = {"Members of politics have power", "no verb here at all"};
  auto t = ingest_triples_fallback(c, EnrichConfig{});
  CHECK(t.fallback);
  REQUIRE(t.triples.size() == 1);
  CHECK(t.triples[0].subject == "Members of politics");
  CHECK(t.triples[0].predicate == "have");
  CHECK(t.triples[0].object == "power");
}

TEST_CASE("enrich joins triples with MATCH edges") {
  KnowledgeGraph g;
  g.add_statement({"Q22686", "P101", "Q7163", false}, EntityRef::make("Q22686", "Donald Trump"),
                  EntityRef::make("Q7163", "politics"));
  g.add_statement({"Q22686", "P106", "Q9", false}, EntityRef::make("Q22686", "Donald Trump"),
                  EntityRef::make("Q9", "power plant operator"));
  g.add_node(EntityRef::make("concept:s:power", "power", Origin::Concept));

  CHECK(enrich(g, {}, default_stopwords()).graph == g);

  std::vector<TripleAnnotation> triples = {
      {1.0, "Members of politics", "in general have", "power"},
      {0.9, "Nuclear plants", "generate", "electricity"},
      {0.8, "Trump", "met", "operators"},
  };
  EnrichResult r = enrich(g, triples, default_stopwords());
  KnowledgeGraph tg = build_triple_graph(triples);
  CHECK(argkg::testing::match_pairs_of(r.graph) ==
        argkg::testing::oracle_match_pairs(g, tg, default_stopwords()));
  CHECK(r.stats.match_edges == 2 * argkg::testing::oracle_match_pairs(g, tg, default_stopwords()).size());
  CHECK(r.graph.has_edge(unstructured_node_id("Members of politics"), "in general have",
                         unstructured_node_id("power")));
  CHECK(r.graph.has_edge("Q7163", kMatch, unstructured_node_id("Members of politics")));

  auto p = shortest_path(r.graph, "Q22686", "concept:s:power");
  REQUIRE(p);
  CHECK(std::find(p->elements.begin(), p->elements.end(), kMatch) != p->elements.end());
}
