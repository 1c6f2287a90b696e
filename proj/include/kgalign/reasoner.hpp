#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "kgalign/ontology.hpp"

namespace kgalign {

/// Structural closure of an ontology: transitive subclass hierarchy with cycles collapsed,
/// equivalence classes, siblings and inherited property attachments.
///
/// Subclass cycles collapse onto their lexicographically smallest member; ancestor lists
/// name collapsed nodes by that canonical member. Every entity of `base` has an entry in
/// each map (possibly empty).
struct InferredOntology {
  Ontology base;
  /// Nearest-first by minimum edge distance, ties by IRI. Never contains the key or any
  /// member of the key's own cycle.
  std::map<Iri, std::vector<Iri>> ancestors;
  std::map<Iri, Iri> equivalence_class;
  std::map<Iri, std::set<Iri>> siblings;
  /// Properties whose rdfs:domain includes the class or any of its ancestors.
  std::map<Iri, std::set<Iri>> attached_properties;
  /// Canonical member of the subclass cycle each entity belongs to (itself if acyclic).
  std::map<Iri, Iri> cycle_representative;

  std::size_t collapsed_cycles = 0;
  std::vector<std::string> warnings;

  /// Parents at distance one in the collapsed hierarchy.
  std::vector<Iri> direct_ancestors(const Iri& iri) const;
};

InferredOntology compute_closure(Ontology onto);

}  // namespace kgalign
