#include "kgalign/verbalizer.hpp"

#include <istream>

#include "kgalign/errors.hpp"
#include "utf8.hpp"

namespace kgalign {
namespace {

std::string join(const std::vector<std::string>& items, std::string_view conj) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += (i + 1 == items.size()) ? " " + std::string(conj) + " " : ", ";
    out += items[i];
  }
  return out;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

class Renderer {
 public:
  Renderer(const InferredOntology& inf, const std::vector<std::string>& pref,
           const VerbalizerConfig& cfg)
      : inf_(inf), pref_(pref), cfg_(cfg) {}

  Verbalization render(const Entity& e) const {
    Verbalization v;
    v.entity = e.iri;
    auto chosen = choose_labels(e, pref_, cfg_.labels);
    v.language = chosen.language;
    v.slots_used.label = chosen.values.front();

    if (cfg_.templates == TemplateSet::LabelOnly) {
      v.text = v.slots_used.label;
      return v;
    }
    switch (e.kind) {
      case EntityKind::ObjectProperty:
      case EntityKind::DataProperty: render_property(e, v); break;
      case EntityKind::Individual: render_individual(e, v); break;
      case EntityKind::Class:
      case EntityKind::Unknown: render_class(e, v); break;
    }
    append_trailing(e, v);
    return v;
  }

 private:
  const InferredOntology& inf_;
  const std::vector<std::string>& pref_;
  const VerbalizerConfig& cfg_;

  std::string label_of(const Iri& iri) const {
    if (const Entity* e = inf_.base.find(iri)) return choose_labels(*e, pref_, cfg_.labels).values.front();
    return split_local_name(iri.local_name());
  }

  std::vector<std::string> labels_of(const std::set<Iri>& iris, std::size_t limit) const {
    std::vector<std::string> out;
    for (const auto& iri : iris) {
      if (out.size() >= limit) break;
      out.push_back(label_of(iri));
    }
    return out;
  }

  std::optional<Iri> parent_of(const Iri& iri) const {
    if (cfg_.use_inferred_context) {
      auto it = inf_.ancestors.find(iri);
      if (it != inf_.ancestors.end() && !it->second.empty()) return it->second.front();
      return std::nullopt;
    }
    for (const auto& [child, parent] : inf_.base.subclass_edges)  // sorted: smallest parent first
      if (child == iri) return parent;
    return std::nullopt;
  }

  std::set<Iri> properties_of(const Iri& iri) const {
    if (cfg_.use_inferred_context) {
      auto it = inf_.attached_properties.find(iri);
      return it == inf_.attached_properties.end() ? std::set<Iri>{} : it->second;
    }
    std::set<Iri> out;
    for (const auto& [prop, domains] : inf_.base.property_domains)
      if (domains.contains(iri)) out.insert(prop);
    return out;
  }

  void render_class(const Entity& e, Verbalization& v) const {
    auto& s = v.slots_used;
    if (auto parent = parent_of(e.iri)) s.parent_label = label_of(*parent);
    s.property_labels = labels_of(properties_of(e.iri), cfg_.max_properties);

    std::string text = "A " + s.label;
    if (s.parent_label) text += " is a " + *s.parent_label;
    if (!s.property_labels.empty()) text += " which has " + join(s.property_labels, "and");
    text += ".";

    if (cfg_.disambiguate && cfg_.use_inferred_context &&
        utf8::length(s.label) < cfg_.short_label_threshold) {
      auto it = inf_.siblings.find(e.iri);
      if (it != inf_.siblings.end() && !it->second.empty()) {
        s.sibling_labels = labels_of(it->second, cfg_.max_siblings);
        text += " Related to " + join(s.sibling_labels, "and") + ".";
      }
    }
    v.text = std::move(text);
  }

  void render_property(const Entity& e, Verbalization& v) const {
    auto& s = v.slots_used;
    auto lookup = [](const std::map<Iri, std::set<Iri>>& m, const Iri& k) {
      auto it = m.find(k);
      return it == m.end() ? std::set<Iri>{} : it->second;
    };
    s.domain_labels = labels_of(lookup(inf_.base.property_domains, e.iri), cfg_.max_properties);
    s.range_labels = labels_of(lookup(inf_.base.property_ranges, e.iri), cfg_.max_properties);

    std::string text = s.label;
    if (e.kind == EntityKind::ObjectProperty) {
      text += " is a relation";
      if (!s.domain_labels.empty()) text += " from " + join(s.domain_labels, "or");
      if (!s.range_labels.empty()) text += " to " + join(s.range_labels, "or");
    } else {
      text += " is an attribute";
      if (!s.domain_labels.empty()) text += " of " + join(s.domain_labels, "or");
      if (!s.range_labels.empty()) text += " with values of type " + join(s.range_labels, "or");
    }
    v.text = text + ".";
  }

  void render_individual(const Entity& e, Verbalization& v) const {
    auto& s = v.slots_used;
    std::vector<std::string> types;
    if (auto it = inf_.base.instance_types.find(e.iri); it != inf_.base.instance_types.end())
      types = labels_of(it->second, cfg_.max_properties);
    std::string text = s.label;
    if (!types.empty()) {
      s.parent_label = types.front();
      text += " is an instance of " + join(types, "and");
    }
    v.text = text + ".";
  }

  void append_trailing(const Entity& e, Verbalization& v) const {
    if (cfg_.include_comments) {
      if (auto c = preferred_comment(e, pref_)) {
        std::string comment = trim(*c);
        if (!comment.empty()) {
          v.slots_used.comment = comment;
          v.text += " " + comment;
        }
      }
    }
    if (!cfg_.external.empty()) {
      std::vector<std::string> tags = pref_;
      tags.push_back("und");
      for (const auto& tag : tags) {
        auto it = cfg_.external.find({e.iri, tag});
        if (it != cfg_.external.end()) {
          std::string extra = trim(it->second);
          if (!extra.empty()) v.text += " " + extra;
          break;
        }
      }
    }
  }
};

}  // namespace

ExternalDescriptions load_external_descriptions(std::istream& in) {
  ExternalDescriptions out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      throw ConfigError("external descriptions line " + std::to_string(lineno) +
                        ": expected IRI<TAB>language<TAB>text");
    try {
      Iri iri(line.substr(0, t1));
      out[{iri, normalize_language_tag(line.substr(t1 + 1, t2 - t1 - 1))}] = line.substr(t2 + 1);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("external descriptions line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

Verbalization verbalize(const Iri& entity, const InferredOntology& inferred,
                        const std::vector<std::string>& preference,
                        const VerbalizerConfig& config) {
  const Entity* e = inferred.base.find(entity);
  if (!e) throw UnknownEntity(entity.str());
  return Renderer(inferred, preference, config).render(*e);
}

std::vector<Verbalization> verbalize_all(const InferredOntology& inferred,
                                         const std::vector<std::string>& preference,
                                         const VerbalizerConfig& config) {
  Renderer renderer(inferred, preference, config);
  std::vector<Verbalization> out;
  for (const auto& [iri, e] : inferred.base.entities)
    if (config.kinds.contains(e.kind)) out.push_back(renderer.render(e));
  return out;
}

}  // namespace kgalign
