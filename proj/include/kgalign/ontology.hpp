#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kgalign {

/// Absolute IRI. Comparison is exact string equality / lexicographic order.
class Iri {
 public:
  Iri() = default;
  /// Throws std::invalid_argument when `value` is empty or has no scheme separator.
  explicit Iri(std::string value);

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  /// Fragment after the last '#', else the last path segment, else the part after ':'.
  std::string_view local_name() const noexcept;

  friend bool operator==(const Iri&, const Iri&) = default;
  friend auto operator<=>(const Iri&, const Iri&) = default;

 private:
  std::string value_;
};

namespace vocab {
inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kOwl = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";

inline const std::string kType = std::string(kRdf) + "type";
inline const std::string kLabel = std::string(kRdfs) + "label";
inline const std::string kComment = std::string(kRdfs) + "comment";
inline const std::string kSubClassOf = std::string(kRdfs) + "subClassOf";
inline const std::string kDomain = std::string(kRdfs) + "domain";
inline const std::string kRange = std::string(kRdfs) + "range";
inline const std::string kRdfsClass = std::string(kRdfs) + "Class";
inline const std::string kEquivalentClass = std::string(kOwl) + "equivalentClass";
inline const std::string kOwlClass = std::string(kOwl) + "Class";
inline const std::string kObjectProperty = std::string(kOwl) + "ObjectProperty";
inline const std::string kDatatypeProperty = std::string(kOwl) + "DatatypeProperty";
inline const std::string kNamedIndividual = std::string(kOwl) + "NamedIndividual";
inline const std::string kOntology = std::string(kOwl) + "Ontology";

/// Namespace under which blank nodes are skolemized.
inline constexpr std::string_view kSkolem = "urn:x-kgalign:bnode:";

bool is_builtin(std::string_view iri);
}  // namespace vocab

enum class EntityKind { Class, ObjectProperty, DataProperty, Individual, Unknown };

std::string_view to_string(EntityKind kind);

/// language tag -> values. Tags are lowercase primary subtags, "und" for untagged.
using LangStrings = std::map<std::string, std::vector<std::string>>;

struct Entity {
  Iri iri;
  EntityKind kind = EntityKind::Unknown;
  LangStrings labels;
  LangStrings comments;

  friend bool operator==(const Entity&, const Entity&) = default;
};

using IriPair = std::pair<Iri, Iri>;

/// What the parser skipped. Not part of Ontology equality.
struct ParseStats {
  std::size_t triples = 0;
  std::size_t ignored_triples = 0;
  std::map<std::string, std::size_t> ignored_predicates;
  /// Structural edges dropped because one end was a blank node (anonymous class expressions).
  std::size_t anonymous_edges = 0;
};

struct Ontology {
  std::optional<Iri> ontology_iri;
  std::map<Iri, Entity> entities;
  std::set<IriPair> subclass_edges;     // (child, parent), no self-loops
  std::set<IriPair> equivalence_edges;  // unordered, stored with first < second
  std::map<Iri, std::set<Iri>> property_domains;
  std::map<Iri, std::set<Iri>> property_ranges;
  /// rdf:type assertions whose object is a non-builtin class (individual membership).
  std::map<Iri, std::set<Iri>> instance_types;
  ParseStats stats;

  const Entity* find(const Iri& iri) const;

  /// Set equality on entities and edge sets.
  bool same_content(const Ontology& other) const;

  /// True when every IRI used by any edge set resolves in `entities`.
  bool edges_resolve() const;
};

struct LabelPolicy {
  bool fallback_to_any = true;
};

/// A chosen label together with the tag it came from ("" for the IRI fallback).
struct ChosenLabels {
  std::string language;
  std::vector<std::string> values;
};

/// Preferred languages, then "und", then any language by tag order, then the IRI local name.
ChosenLabels choose_labels(const Entity& entity, const std::vector<std::string>& preference,
                           const LabelPolicy& policy = {});

std::vector<std::string> get_labels(const Entity& entity,
                                    const std::vector<std::string>& preference,
                                    const LabelPolicy& policy = {});

/// Comments in the first preferred language that has any (no cross-language fallback).
std::optional<std::string> preferred_comment(const Entity& entity,
                                             const std::vector<std::string>& preference);

/// "EducationalInstitution" -> "Educational Institution", "awards_degree" -> "awards degree".
std::string split_local_name(std::string_view local);

/// Lowercased primary subtag: "en-US" -> "en", "" -> "und".
std::string normalize_language_tag(std::string_view tag);

}  // namespace kgalign

template <>
struct std::hash<kgalign::Iri> {
  std::size_t operator()(const kgalign::Iri& iri) const noexcept {
    return std::hash<std::string>{}(iri.str());
  }
};
