#include <cmath>
#include <fstream>

#include "argkg/error.hpp"
#include "argkg/topicsel.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace argkg;
using argkg::testing::TempDir;

namespace {

std::vector<EntityRef> entities(std::initializer_list<const char*> ids) {
  std::vector<EntityRef> out;
  for (const char* id : ids) out.push_back(EntityRef::make(id, id));
  return out;
}

PropertyDescription prop(std::string id, long count, std::string label, std::string desc) {
  return {std::move(id), std::move(label), std::move(desc), count};
}

}  // namespace

TEST_CASE("load_articles") {
  TempDir dir;
  for (const char* id : {"Q1", "Q2", "Q3"}) {
    std::ofstream(dir.path() / (std::string(id) + ".txt")) << "text of " << id;
  }
  CHECK(load_articles(entities({"Q1", "Q2", "Q3"}), dir.path()).documents.size() == 3);
  auto partial = load_articles(entities({"Q1", "Q2", "Q9"}), dir.path());
  CHECK(partial.documents.size() == 2);
  CHECK(partial.missing == 1);
  TempDir empty;
  CHECK(load_articles(entities({"Q1"}), empty.path()).documents.empty());
  CHECK_THROWS_AS(train_lda({}, SelectionConfig{}), DataError);
}

TEST_CASE("LDA with a single topic") {
  TokenizedCorpus corpus = {{"reactor", "waste", "reactor"}, {"gun", "law"}};
  SelectionConfig c;
  c.num_topics = 1;
  c.lda_iterations = 20;
  TopicModel m = train_lda(corpus, c);
  for (const auto& row : m.doc_topic) {
    REQUIRE(row.size() == 1);
    CHECK(row[0] == doctest::Approx(1.0));
  }
}

TEST_CASE("LDA is deterministic for a fixed seed and keeps its counters consistent") {
  TokenizedCorpus corpus = {{"a1", "a2", "b1", "a1"}, {"b1", "b2", "b2", "a2"}, {"c1", "a1"}};
  SelectionConfig c;
  c.num_topics = 3;
  c.lda_iterations = 50;
  CHECK(train_lda(corpus, c).topic_word == train_lda(corpus, c).topic_word);

  LdaSampler s(corpus, 3, 0.5, 0.01, 3);
  for (int i = 0; i < 10; ++i) {
    s.sweep();
    CHECK(s.topic_count_total() == s.token_count());
    CHECK(s.doc_topic_count_total() == s.token_count());
  }
}

TEST_CASE("LDA separates two documents over disjoint vocabularies") {
  const std::vector<std::string> block_a = {"reactor", "uranium", "turbine", "coolant", "fission"};
  const std::vector<std::string> block_b = {"rifle", "holster", "trigger", "ammunition", "pistol"};
  TokenizedCorpus corpus(2);
  for (int rep = 0; rep < 20; ++rep) {
    for (size_t i = 0; i < 5; ++i) {
      corpus[0].push_back(block_a[i]);
      corpus[1].push_back(block_b[i]);
    }
  }
  SelectionConfig c;
  c.num_topics = 2;
  c.lda_iterations = 200;
  TopicModel m = train_lda(corpus, c);
  std::set<std::set<std::string>> tops;
  for (size_t k = 0; k < 2; ++k) {
    auto ranked = m.ranked_words(k);
    std::set<std::string> top;
    for (size_t i = 0; i < 5; ++i) top.insert(m.vocabulary[ranked[i]]);
    tops.insert(top);
  }
  CHECK(tops == std::set<std::set<std::string>>{
                    std::set<std::string>(block_a.begin(), block_a.end()),
                    std::set<std::string>(block_b.begin(), block_b.end())});
}

TEST_CASE("top_topic_words") {
  TopicModel m;
  m.vocabulary = {"the", "reactor", "waste", "law", "gun"};
  m.topic_word = {{0.5, 0.3, 0.1, 0.05, 0.05}};
  const WordSet& sw = default_stopwords();
  CHECK(top_topic_words(m, 2, WordSet{}) == std::vector<std::string>{"the", "reactor"});
  CHECK(top_topic_words(m, 2, sw) == std::vector<std::string>{"reactor"});
  m.topic_word.push_back({0.0, 0.4, 0.0, 0.3, 0.3});
  CHECK(top_topic_words(m, 2, sw) == std::vector<std::string>{"reactor", "gun"});
}

TEST_CASE("TF-IDF scores") {
  std::vector<PropertyDescription> d = {
      prop("P1", 5000, "uranium", "uranium mined from ore"),
      prop("P2", 5000, "country", "sovereign state of this item energy"),
      prop("P3", 5000, "operator", "person or organization operating the equipment energy"),
  };
  std::vector<std::string> words = {"uranium", "energy", "absent"};
  TfidfMatrix m = build_tfidf(words, d, default_stopwords());
  CHECK(m.cumulative[0] == doctest::Approx(2 * std::log(3.0)));
  CHECK(m.cumulative[1] == doctest::Approx(2 * std::log(1.5)));
  CHECK(m.cumulative[2] == 0.0);
  CHECK(rank_by_tfidf(words, d, 2.0) == std::vector<std::string>{"uranium"});
  CHECK(rank_by_tfidf(words, d, 2.5).empty());

  std::vector<PropertyDescription> everywhere = {prop("P1", 1, "energy", "x"),
                                                 prop("P2", 1, "energy", "y")};
  std::vector<std::string> energy = {"energy"};
  CHECK(build_tfidf(energy, everywhere, default_stopwords()).cumulative[0] == 0.0);
}

TEST_CASE("select_frequent") {
  const WordSet& sw = default_stopwords();
  std::vector<PropertyDescription> d = {
      prop("P10", 9000, "located in", "region where the reactor is located"),
      prop("P11", 500, "reactor type", "type of reactor"),
      prop("P12", 8000, "fuel", "fuel used by the reactor, reactor fuel cycle"),
      prop("P13", 7000, "operator", "organization operating the equipment"),
      prop("P14", 2000, "has part", "part of this reactor"),
      prop("P15", 3000, "fuel source", "fuel supplier"),
      prop("P16", 9500, "country", "sovereign state"),
      prop("P17", 100, "mass", "mass of the object"),
  };
  std::vector<std::string> ranked = {"reactor", "fuel"};
  CHECK(select_frequent({}, d, 1000, 50, sw).empty());
  CHECK(select_frequent(ranked, d, 1000, 50, sw) ==
        std::vector<std::string>{"P12", "P15", "P10", "P14"});
  CHECK(select_frequent(ranked, d, 1000, 2, sw) == std::vector<std::string>{"P12", "P15"});

  std::vector<PropertyDescription> one = {prop("P1", 5000, "fuel", "fuel")};
  CHECK(select_frequent(ranked, one, 1000, 50, sw) == std::vector<std::string>{"P1"});
}

TEST_CASE("select_properties on the fixture articles") {
  const auto dir = argkg::testing::fixture_dir();
  auto descriptions = load_property_descriptions(dir / "properties.tsv");
  SelectionConfig c;
  auto ents = entities({"Q9000100", "Q9000101", "Q9000102", "Q9000103"});
  auto sel = select_properties_detailed(ents, descriptions, c, dir / "articles", default_stopwords());
  CHECK(sel.documents == 4);
  CHECK_FALSE(sel.properties.empty());
  CHECK(sel.properties.size() <= static_cast<size_t>(c.num_properties));
  for (const auto& id : sel.properties) {
    auto it = std::find_if(descriptions.begin(), descriptions.end(),
                           [&](const PropertyDescription& p) { return p.id == id; });
    REQUIRE(it != descriptions.end());
    CHECK(it->count > c.count_threshold);
  }
}
