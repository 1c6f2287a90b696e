#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kgalign/ontology.hpp"
#include "kgalign/reasoner.hpp"

namespace kgalign {

enum class TemplateSet {
  Contextual,  // kind-specific sentence templates
  LabelOnly,   // the bare label
};

/// Optional per-entity descriptions keyed by (IRI, language tag), e.g. encyclopedia abstracts.
using ExternalDescriptions = std::map<std::pair<Iri, std::string>, std::string>;

/// Reads tab-separated `IRI <TAB> language <TAB> text` lines. Blank lines and lines starting
/// with '#' are skipped. Throws ConfigError on a short line.
ExternalDescriptions load_external_descriptions(std::istream& in);

struct VerbalizerConfig {
  TemplateSet templates = TemplateSet::Contextual;
  /// Add sibling labels for labels shorter than `short_label_threshold` code points.
  bool disambiguate = true;
  std::size_t short_label_threshold = 8;
  std::size_t max_properties = 8;
  std::size_t max_siblings = 4;
  bool include_comments = true;
  /// When false, only asserted structure is used: direct parents, directly declared
  /// properties and no siblings.
  bool use_inferred_context = true;
  std::set<EntityKind> kinds{EntityKind::Class, EntityKind::ObjectProperty,
                             EntityKind::DataProperty};
  LabelPolicy labels;
  ExternalDescriptions external;
};

struct VerbalizationSlots {
  std::string label;
  std::optional<std::string> parent_label;
  std::vector<std::string> property_labels;
  std::vector<std::string> domain_labels;
  std::vector<std::string> range_labels;
  std::optional<std::string> comment;
  std::vector<std::string> sibling_labels;

  friend bool operator==(const VerbalizationSlots&, const VerbalizationSlots&) = default;
};

struct Verbalization {
  Iri entity;
  std::string language;  // tag of the chosen label, "" when derived from the IRI
  std::string text;
  VerbalizationSlots slots_used;

  friend bool operator==(const Verbalization&, const Verbalization&) = default;
};

/// Throws UnknownEntity when `entity` is not in `inferred.base`.
Verbalization verbalize(const Iri& entity, const InferredOntology& inferred,
                        const std::vector<std::string>& preference,
                        const VerbalizerConfig& config = {});

/// One verbalization per entity whose kind is in `config.kinds`, ordered by IRI.
std::vector<Verbalization> verbalize_all(const InferredOntology& inferred,
                                         const std::vector<std::string>& preference,
                                         const VerbalizerConfig& config = {});

}  // namespace kgalign
