#pragma once

#include <string>
#include <vector>

#include "argkg/kg.hpp"

namespace argkg {

enum class ConceptSource { Topic, Sentence };

// A token span of the topic or sentence linked to a knowledge-base entity.
struct ConceptAnnotation {
  std::string surface;
  std::string entity_id;
  double rank_score = 0.0;
  ConceptSource source = ConceptSource::Sentence;
  std::string entity_label;  // optional; the linker's title for the entity

  bool operator==(const ConceptAnnotation&) const = default;
};

// Graph id of the concept node standing for the annotated span.
std::string concept_node_id(const ConceptAnnotation& a);

EntityRef concept_node(const ConceptAnnotation& a);

// Seed node for the linked entity. Label is the linker title if present,
// otherwise the surface form.
EntityRef seed_entity_node(const ConceptAnnotation& a);

// Concept node ids of one source, first-occurrence order, deduplicated.
std::vector<std::string> concept_ids(const std::vector<ConceptAnnotation>& annotations,
                                     ConceptSource source);

}  // namespace argkg
