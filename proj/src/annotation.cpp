#include "argkg/annotation.hpp"

#include <set>

namespace argkg {

std::string concept_node_id(const ConceptAnnotation& a) {
  return std::string(a.source == ConceptSource::Topic ? "concept:t:" : "concept:s:") +
         to_lower(a.surface);
}

EntityRef concept_node(const ConceptAnnotation& a) {
  return EntityRef::make(concept_node_id(a), a.surface, Origin::Concept);
}

EntityRef seed_entity_node(const ConceptAnnotation& a) {
  return EntityRef::make(a.entity_id, a.entity_label.empty() ? a.surface : a.entity_label,
                         Origin::Structured);
}

std::vector<std::string> concept_ids(const std::vector<ConceptAnnotation>& annotations,
                                     ConceptSource source) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& a : annotations) {
    if (a.source != source) continue;
    auto id = concept_node_id(a);
    if (seen.insert(id).second) out.push_back(std::move(id));
  }
  return out;
}

}  // namespace argkg
