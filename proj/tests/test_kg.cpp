#include <random>

#include "argkg/annotation.hpp"
#include "argkg/error.hpp"
#include "argkg/kg.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace argkg;

namespace {

Statement st(std::string s, std::string p, std::string o) {
  return {std::move(s), std::move(p), std::move(o), false};
}

EntityRef ent(const std::string& id, const std::string& label) { return EntityRef::make(id, label); }

// Concept nodes, WIKIFIERED links and the knowledge-base chain of the
// "offices ... times" example.
KnowledgeGraph fig1_graph() {
  KnowledgeGraph g;
  ConceptAnnotation offices{"offices", "Q12823105", 0.7, ConceptSource::Sentence, "Office"};
  ConceptAnnotation times{"times", "Q11471", 0.8, ConceptSource::Sentence, "Time"};
  for (const auto& a : {offices, times}) {
    g.add_statement({concept_node_id(a), kWikified, a.entity_id, false}, concept_node(a),
                    seed_entity_node(a));
  }
  g.add_statement(st("Q12823105", "P279", "Q180516"), ent("Q12823105", "Office"),
                  ent("Q180516", "room"));
  g.add_statement(st("Q180516", "P279", "Q17334923"), ent("Q180516", "room"),
                  ent("Q17334923", "location"));
  g.add_statement(st("Q17334923", "P361", "Q107"), ent("Q17334923", "location"),
                  ent("Q107", "space"));
  g.add_statement(st("Q107", "P361", "Q133327"), ent("Q107", "space"),
                  ent("Q133327", "spacetime"));
  g.add_statement(st("Q133327", "P527", "Q11471"), ent("Q133327", "spacetime"),
                  ent("Q11471", "Time"));
  return g;
}

}  // namespace

TEST_CASE("add_statement builds nodes and edges") {
  KnowledgeGraph g;
  g.add_statement(st("Q42", "P69", "Q691283"), ent("Q42", "Douglas Adams"),
                  ent("Q691283", "St John's College"));
  CHECK(g.node_count() == 2);
  CHECK(g.edge_count() == 1);
  CHECK(g.node("Q42").label == "Douglas Adams");

  KnowledgeGraph twice = g;
  CHECK_FALSE(twice.add_statement(st("Q42", "P69", "Q691283"), ent("Q42", "Douglas Adams"),
                                  ent("Q691283", "St John's College")));
  CHECK(twice == g);
}

TEST_CASE("parallel edges with different predicates are kept") {
  KnowledgeGraph g;
  g.add_statement(st("A", "P1", "B"), ent("A", "a"), ent("B", "b"));
  g.add_statement(st("A", "P2", "B"), ent("A", "a"), ent("B", "b"));
  CHECK(g.node_count() == 2);
  CHECK(g.edge_count() == 2);
  CHECK(g.incident("A").size() == 2);
}

TEST_CASE("add_edge requires both endpoints") {
  KnowledgeGraph g;
  g.add_node(ent("A", "a"));
  CHECK_THROWS_AS(g.add_edge(st("A", "P1", "B")), LogicError);
}

TEST_CASE("shortest_path identity and unknown nodes") {
  KnowledgeGraph g = fig1_graph();
  auto p = shortest_path(g, "Q107", "Q107");
  REQUIRE(p);
  CHECK(p->elements == std::vector<std::string>{"Q107"});
  CHECK(p->edge_count() == 0);
  CHECK_THROWS_AS(shortest_path(g, "Q107", "Qnope"), LogicError);
}

TEST_CASE("shortest_path returns the offices to times chain") {
  KnowledgeGraph g = fig1_graph();
  auto p = shortest_path(g, "concept:s:offices", "concept:s:times");
  REQUIRE(p);
  CHECK(p->entities() == std::vector<std::string>{"concept:s:offices", "Q12823105", "Q180516",
                                                  "Q17334923", "Q107", "Q133327", "Q11471",
                                                  "concept:s:times"});
  CHECK(p->elements[1] == kWikified);
  CHECK(p->elements[3] == "P279");
  CHECK(p->elements[11] == "P527");
  CHECK(p->forward == std::vector<bool>{true, true, true, true, true, true, false});
  CHECK(is_valid_path(g, *p));
}

TEST_CASE("shortest_path hop counts agree with the exhaustive oracle") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    KnowledgeGraph g = argkg::testing::random_multigraph(rng, 12, 14, 3);
    for (const auto& [a, na] : g.nodes()) {
      for (const auto& [b, nb] : g.nodes()) {
        auto got = shortest_path(g, a, b);
        auto want = argkg::testing::oracle_shortest_path(g, a, b);
        REQUIRE(got.has_value() == want.has_value());
        if (got) CHECK(got->edge_count() == want->edge_count());
      }
    }
  }
}

TEST_CASE("match_nodes") {
  const WordSet& sw = default_stopwords();
  CHECK(match_nodes(EntityRef::make("u", "Members of politics", Origin::Unstructured),
                    ent("Q7163", "politics"), sw));
  CHECK(match_nodes(ent("a", "reactor"), ent("b", "reactor"), sw));
  CHECK_FALSE(match_nodes(ent("a", "house of cards"), ent("b", "of mice"), sw));
  CHECK_FALSE(match_nodes(ent("a", "route 42"), ent("b", "42 street"), sw));
  CHECK_FALSE(match_nodes(ent("a", "ox cart"), ent("b", "ox"), sw));
}

TEST_CASE("merge_graphs with an empty side adds no MATCH edge") {
  KnowledgeGraph g = fig1_graph();
  KnowledgeGraph empty;
  CHECK(merge_graphs(g, empty, default_stopwords()) == g);

  KnowledgeGraph u;
  u.add_statement(st("oie:members of politics", "in general have", "oie:power"),
                  EntityRef::make("oie:members of politics", "Members of politics",
                                  Origin::Unstructured),
                  EntityRef::make("oie:power", "power", Origin::Unstructured));
  KnowledgeGraph merged = merge_graphs(empty, u, default_stopwords());
  CHECK(merged.node_count() == u.node_count());
  CHECK(merged.edge_count() == u.edge_count());
}

TEST_CASE("merge_graphs MATCH edges agree with the all-pairs oracle") {
  static const char* vocab[] = {"power", "energy", "nuclear", "of", "the", "42",
                                "ox",    "plant",  "gun",     "law", "safety", "in"};
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> word(0, 11);
  std::uniform_int_distribution<int> len(1, 3);
  auto label = [&] {
    std::string s;
    for (int k = len(rng); k > 0; --k) s += std::string(s.empty() ? "" : " ") + vocab[word(rng)];
    return s;
  };
  for (int trial = 0; trial < 30; ++trial) {
    KnowledgeGraph a;
    KnowledgeGraph b;
    for (int i = 0; i < 5; ++i) {
      a.add_node(EntityRef::make("Q" + std::to_string(i), label(),
                                 i == 0 ? Origin::Concept : Origin::Structured));
      b.add_node(EntityRef::make("oie:" + std::to_string(i), label(), Origin::Unstructured));
    }
    a.add_edge(st("Q0", "P1", "Q1"));
    b.add_edge(st("oie:0", "has", "oie:1"));
    KnowledgeGraph merged = merge_graphs(a, b, default_stopwords());
    CHECK(argkg::testing::match_pairs_of(merged) ==
          argkg::testing::oracle_match_pairs(a, b, default_stopwords()));
  }
}

TEST_CASE("extract_evidence") {
  SUBCASE("disconnected") {
    KnowledgeGraph g;
    g.add_node(EntityRef::make("concept:t:x", "x", Origin::Concept));
    g.add_node(EntityRef::make("concept:s:y", "y", Origin::Concept));
    std::vector<std::string> t = {"concept:t:x"}, s = {"concept:s:y"};
    CHECK(extract_evidence(g, t, s).empty());
  }
  SUBCASE("offices and times") {
    KnowledgeGraph g = fig1_graph();
    std::vector<std::string> t, s = {"concept:s:times", "concept:s:offices"};
    auto paths = extract_evidence(g, t, s);
    REQUIRE(paths.size() == 1);
    CHECK(paths[0].kind == PathKind::SentenceToSentence);
  }
  SUBCASE("triangle") {
    KnowledgeGraph g;
    g.add_statement(st("a", "P1", "b"), ent("a", "a"), ent("b", "b"));
    g.add_statement(st("b", "P1", "c"), ent("b", "b"), ent("c", "c"));
    g.add_statement(st("c", "P1", "a"), ent("c", "c"), ent("a", "a"));
    std::vector<std::string> t, s = {"a", "b", "c"};
    auto paths = extract_evidence(g, t, s);
    REQUIRE(paths.size() == 3);
    for (const auto& p : paths) CHECK(p.edge_count() == 1);
  }
}
