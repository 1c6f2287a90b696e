#include "kgalign/evaluation.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "kgalign/errors.hpp"

namespace kgalign {
namespace {

namespace pt = boost::property_tree;

std::string_view local_part(std::string_view name) {
  auto colon = name.rfind(':');
  return colon == std::string_view::npos ? name : name.substr(colon + 1);
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

const pt::ptree* child_named(const pt::ptree& node, std::string_view local) {
  for (const auto& [name, child] : node)
    if (local_part(name) == local) return &child;
  return nullptr;
}

// entity1/entity2 carry the IRI in rdf:resource, or as text content.
std::string entity_iri(const pt::ptree& entity) {
  if (auto* attrs = child_named(entity, "<xmlattr>"))
    for (const auto& [name, value] : *attrs)
      if (local_part(name) == "resource" || local_part(name) == "about") return trim(value.data());
  return trim(entity.data());
}

class GoldBuilder {
 public:
  GoldAlignment gold;

  void add(const std::string& a, const std::string& b, const std::string& where) {
    try {
      IriPair pair{Iri(a), Iri(b)};
      if (!gold.pairs.insert(pair).second)
        gold.warnings.push_back("duplicate pair " + a + " = " + b + " (" + where + ")");
    } catch (const std::invalid_argument& e) {
      throw MalformedAlignment(where + ": " + e.what());
    }
  }
};

void collect_cells(const pt::ptree& node, GoldBuilder& builder, std::size_t& cell_no) {
  for (const auto& [name, child] : node) {
    if (name == "<xmlattr>" || name == "<xmlcomment>") continue;
    if (local_part(name) != "Cell") {
      collect_cells(child, builder, cell_no);
      continue;
    }
    ++cell_no;
    const std::string where = "Cell #" + std::to_string(cell_no);
    const pt::ptree* e1 = child_named(child, "entity1");
    const pt::ptree* e2 = child_named(child, "entity2");
    if (!e1 || !e2) throw MalformedAlignment(where + " lacks entity1 or entity2");
    std::string relation = "=";
    if (const pt::ptree* rel = child_named(child, "relation")) relation = trim(rel->data());
    std::string a = entity_iri(*e1), b = entity_iri(*e2);
    if (a.empty() || b.empty()) throw MalformedAlignment(where + " has an empty entity");
    if (relation != "=") {
      builder.gold.warnings.push_back(where + " skipped: relation '" + relation + "'");
      continue;
    }
    builder.add(a, b, where);
  }
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

GoldAlignment load_gold(std::istream& in, GoldFormat format) {
  GoldBuilder builder;
  if (format == GoldFormat::Tsv) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (trim(line).empty() || line.front() == '#') continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos)
        throw MalformedAlignment("line " + std::to_string(lineno) + ": expected two tab-separated IRIs");
      auto tab2 = line.find('\t', tab + 1);
      std::string a = trim(line.substr(0, tab));
      std::string b = trim(line.substr(tab + 1, tab2 == std::string::npos ? std::string::npos : tab2 - tab - 1));
      if (tab2 != std::string::npos) {
        std::string relation = trim(line.substr(tab2 + 1));
        if (!relation.empty() && relation != "=") {
          builder.gold.warnings.push_back("line " + std::to_string(lineno) +
                                          " skipped: relation '" + relation + "'");
          continue;
        }
      }
      builder.add(a, b, "line " + std::to_string(lineno));
    }
    return std::move(builder.gold);
  }

  pt::ptree tree;
  try {
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw MalformedAlignment(std::string("XML: ") + e.what());
  }
  std::size_t cells = 0;
  collect_cells(tree, builder, cells);
  return std::move(builder.gold);
}

GoldAlignment load_gold_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open gold file '" + path + "'");
  bool tsv = path.ends_with(".tsv") || path.ends_with(".txt");
  return load_gold(in, tsv ? GoldFormat::Tsv : GoldFormat::AlignmentXml);
}

void write_alignment_xml(std::ostream& out, const AlignmentSet& alignment,
                         const std::optional<Iri>& onto1, const std::optional<Iri>& onto2) {
  out << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n"
         "<rdf:RDF xmlns=\"http://knowledgeweb.semanticweb.org/heterogeneity/alignment\"\n"
         "         xmlns:rdf=\"http://www.w3.org/1999/02/22-rdf-syntax-ns#\"\n"
         "         xmlns:xsd=\"http://www.w3.org/2001/XMLSchema#\">\n"
         "<Alignment>\n"
         "  <xml>yes</xml>\n"
         "  <level>0</level>\n"
         "  <type>11</type>\n";
  auto onto = [&](const char* tag, const std::optional<Iri>& iri) {
    out << "  <" << tag << ">";
    if (iri) out << "\n    <Ontology rdf:about=\"" << xml_escape(iri->str()) << "\"/>\n  ";
    out << "</" << tag << ">\n";
  };
  onto("onto1", onto1);
  onto("onto2", onto2);
  char measure[32];
  for (const auto& c : alignment.cells) {
    std::snprintf(measure, sizeof measure, "%.4f", c.confidence);
    out << "  <map>\n"
           "    <Cell>\n"
           "      <entity1 rdf:resource=\"" << xml_escape(c.source.str()) << "\"/>\n"
           "      <entity2 rdf:resource=\"" << xml_escape(c.target.str()) << "\"/>\n"
           "      <measure rdf:datatype=\"xsd:float\">" << measure << "</measure>\n"
           "      <relation>" << xml_escape(c.relation) << "</relation>\n"
           "    </Cell>\n"
           "  </map>\n";
  }
  out << "</Alignment>\n</rdf:RDF>\n";
}

double f1_score(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

Metrics score(const AlignmentSet& predicted, const GoldAlignment& gold) {
  if (gold.pairs.empty()) throw EmptyGold();
  std::set<IriPair> pred;
  for (const auto& c : predicted.cells) pred.emplace(c.source, c.target);
  Metrics m;
  for (const auto& p : pred)
    if (gold.pairs.contains(p)) ++m.true_pos;
  m.false_pos = pred.size() - m.true_pos;
  m.false_neg = gold.pairs.size() - m.true_pos;
  m.precision = pred.empty() ? 0.0 : static_cast<double>(m.true_pos) / static_cast<double>(pred.size());
  m.recall = static_cast<double>(m.true_pos) / static_cast<double>(gold.pairs.size());
  m.f1 = f1_score(m.precision, m.recall);
  return m;
}

RankedMetrics score_ranked(const SimilarityMatrix& m, const GoldAlignment& gold) {
  if (gold.pairs.empty()) throw EmptyGold();
  std::map<Iri, std::size_t> row_of, col_of;
  for (std::size_t i = 0; i < m.rows(); ++i) row_of.emplace(m.source_keys[i], i);
  for (std::size_t j = 0; j < m.cols(); ++j) col_of.emplace(m.target_keys[j], j);

  RankedMetrics r;
  double reciprocal_sum = 0.0;
  std::size_t top1 = 0;
  for (const auto& [s, t] : gold.pairs) {
    auto ri = row_of.find(s);
    if (ri == row_of.end()) throw MissingEntity(s.str());
    auto cj = col_of.find(t);
    if (cj == col_of.end()) continue;
    const std::size_t i = ri->second, j = cj->second;
    const double target = m.at(i, j);
    std::size_t rank = 1;
    for (std::size_t k = 0; k < m.cols(); ++k) {
      double v = m.at(i, k);
      if (v > target || (v == target && m.target_keys[k] < t)) ++rank;
    }
    reciprocal_sum += 1.0 / static_cast<double>(rank);
    if (rank == 1) ++top1;
  }
  const double n = static_cast<double>(gold.pairs.size());
  r.ranked_pairs = gold.pairs.size();
  r.mrr = reciprocal_sum / n;
  r.precision_at_1 = static_cast<double>(top1) / n;
  return r;
}

}  // namespace kgalign
