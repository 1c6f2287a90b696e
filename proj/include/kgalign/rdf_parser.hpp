#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "kgalign/ontology.hpp"

namespace kgalign {

enum class RdfFormat { NTriples, Turtle };

/// Parses N-Triples, or the Turtle subset: @prefix/@base (and SPARQL-style PREFIX/BASE),
/// prefixed names, `a`, language-tagged and typed literals, numeric/boolean literals,
/// predicate-object (`;`) and object (`,`) lists, labelled blank nodes.
///
/// Collections, `[...]` blank-node property lists and quoted triples raise
/// UnsupportedFeature. Syntax errors raise MalformedSyntax with a 1-based line/column.
Ontology parse_ontology(std::string_view text, RdfFormat format);
Ontology parse_ontology(std::istream& in, RdfFormat format);
Ontology parse_ontology_file(const std::string& path, RdfFormat format);

/// Guess the format from the file extension (.nt -> NTriples, everything else Turtle).
RdfFormat format_from_path(std::string_view path);

/// Canonical N-Triples for an ontology, lines sorted. Parsing the result yields an equal ontology.
std::string write_ntriples(const Ontology& onto);

}  // namespace kgalign
