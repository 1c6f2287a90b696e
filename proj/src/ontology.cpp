#include "kgalign/ontology.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace kgalign {

Iri::Iri(std::string value) : value_(std::move(value)) {
  if (value_.empty()) throw std::invalid_argument("IRI must not be empty");
  if (value_.find(':') == std::string::npos)
    throw std::invalid_argument("IRI <" + value_ + "> has no scheme");
}

std::string_view Iri::local_name() const noexcept {
  std::string_view v = value_;
  for (char sep : {'#', '/', ':'}) {
    auto pos = v.rfind(sep);
    if (pos != std::string_view::npos && pos + 1 < v.size()) return v.substr(pos + 1);
  }
  return v;
}

bool vocab::is_builtin(std::string_view iri) {
  for (auto ns : {kRdf, kRdfs, kOwl, kXsd})
    if (iri.starts_with(ns)) return true;
  return false;
}

std::string_view to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::Class: return "Class";
    case EntityKind::ObjectProperty: return "ObjectProperty";
    case EntityKind::DataProperty: return "DataProperty";
    case EntityKind::Individual: return "Individual";
    case EntityKind::Unknown: return "Unknown";
  }
  return "Unknown";
}

const Entity* Ontology::find(const Iri& iri) const {
  auto it = entities.find(iri);
  return it == entities.end() ? nullptr : &it->second;
}

bool Ontology::same_content(const Ontology& other) const {
  return ontology_iri == other.ontology_iri && entities == other.entities &&
         subclass_edges == other.subclass_edges &&
         equivalence_edges == other.equivalence_edges &&
         property_domains == other.property_domains &&
         property_ranges == other.property_ranges && instance_types == other.instance_types;
}

bool Ontology::edges_resolve() const {
  auto has = [&](const Iri& iri) { return entities.contains(iri); };
  for (const auto& [a, b] : subclass_edges)
    if (!has(a) || !has(b)) return false;
  for (const auto& [a, b] : equivalence_edges)
    if (!has(a) || !has(b)) return false;
  for (const auto* m : {&property_domains, &property_ranges, &instance_types})
    for (const auto& [k, vs] : *m) {
      if (!has(k)) return false;
      for (const auto& v : vs)
        if (!has(v)) return false;
    }
  return true;
}

std::string normalize_language_tag(std::string_view tag) {
  if (tag.empty()) return "und";
  auto dash = tag.find('-');
  std::string primary(tag.substr(0, dash));
  std::transform(primary.begin(), primary.end(), primary.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return primary.empty() ? "und" : primary;
}

std::string split_local_name(std::string_view local) {
  std::string out;
  auto is_upper = [](char c) { return c >= 'A' && c <= 'Z'; };
  auto is_lower = [](char c) { return c >= 'a' && c <= 'z'; };
  for (std::size_t i = 0; i < local.size(); ++i) {
    char c = local[i];
    if (c == '_') {
      if (!out.empty() && out.back() != ' ') out.push_back(' ');
      continue;
    }
    if (is_upper(c) && i > 0 && !out.empty() && out.back() != ' ') {
      char prev = local[i - 1];
      bool next_lower = i + 1 < local.size() && is_lower(local[i + 1]);
      // "fooBar" and the "S" in "HTTPServer"
      if (is_lower(prev) || (prev >= '0' && prev <= '9') || (is_upper(prev) && next_lower))
        out.push_back(' ');
    }
    out.push_back(c);
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

ChosenLabels choose_labels(const Entity& entity, const std::vector<std::string>& preference,
                           const LabelPolicy& policy) {
  auto lookup = [&](const std::string& tag) -> const std::vector<std::string>* {
    auto it = entity.labels.find(tag);
    return it != entity.labels.end() && !it->second.empty() ? &it->second : nullptr;
  };
  for (const auto& tag : preference)
    if (auto* v = lookup(tag)) return {tag, *v};
  if (auto* v = lookup("und")) return {"und", *v};
  if (policy.fallback_to_any) {
    for (const auto& [tag, values] : entity.labels)  // std::map: sorted by tag
      if (!values.empty()) return {tag, values};
  }
  std::string fallback = split_local_name(entity.iri.local_name());
  if (fallback.empty()) fallback = std::string(entity.iri.local_name());
  return {"", {fallback}};
}

std::vector<std::string> get_labels(const Entity& entity,
                                    const std::vector<std::string>& preference,
                                    const LabelPolicy& policy) {
  return choose_labels(entity, preference, policy).values;
}

std::optional<std::string> preferred_comment(const Entity& entity,
                                             const std::vector<std::string>& preference) {
  for (const auto& tag : preference) {
    auto it = entity.comments.find(tag);
    if (it != entity.comments.end() && !it->second.empty()) return it->second.front();
  }
  auto it = entity.comments.find("und");
  if (it != entity.comments.end() && !it->second.empty()) return it->second.front();
  return std::nullopt;
}

}  // namespace kgalign
