#include "kgalign/rdf_parser.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <variant>
#include <vector>

#include "kgalign/errors.hpp"
#include "utf8.hpp"

namespace kgalign {
namespace {

struct Term {
  enum class Type { Iri, Blank, Literal } type = Type::Iri;
  std::string value;     // IRI, skolem IRI or lexical form
  std::string language;  // literals only, normalized
};

struct Triple {
  Term subject;
  std::string predicate;
  Term object;
};

// Compact forms like <rdfs:label> are accepted inside angle brackets for the built-in vocabularies.
std::string expand_builtin(std::string iri) {
  static const std::pair<std::string_view, std::string_view> kPrefixes[] = {
      {"rdf:", vocab::kRdf}, {"rdfs:", vocab::kRdfs}, {"owl:", vocab::kOwl}, {"xsd:", vocab::kXsd}};
  for (auto [p, ns] : kPrefixes)
    if (iri.starts_with(p)) return std::string(ns) + iri.substr(p.size());
  return iri;
}

class Parser {
 public:
  Parser(std::string_view text, RdfFormat format) : text_(text), turtle_(format == RdfFormat::Turtle) {
    if (text_.starts_with("\xEF\xBB\xBF")) advance(3);
    prefixes_["rdf"] = vocab::kRdf;
    prefixes_["rdfs"] = vocab::kRdfs;
    prefixes_["owl"] = vocab::kOwl;
    prefixes_["xsd"] = vocab::kXsd;
  }

  template <class Sink>
  void run(Sink&& sink) {
    while (true) {
      skip_ws();
      if (eof()) break;
      if (turtle_ && directive()) continue;
      Term subject = parse_subject();
      if (turtle_) {
        predicate_object_list(subject, sink);
      } else {
        skip_ws();
        std::string pred = parse_iri_term("predicate");
        skip_ws();
        Term object = parse_object();
        sink(Triple{subject, std::move(pred), std::move(object)});
      }
      skip_ws();
      expect('.', "expected '.' at end of triple");
    }
  }

 private:
  std::string_view text_;
  bool turtle_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  std::map<std::string, std::string> prefixes_;
  std::string base_;

  bool eof() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i, ++pos_) {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else if ((static_cast<unsigned char>(text_[pos_]) & 0xC0) != 0x80) {
        ++col_;
      }
    }
  }
  [[noreturn]] void fail(const std::string& detail) const {
    throw MalformedSyntax(line_, col_, detail);
  }
  void expect(char c, const char* detail) {
    if (peek() != c) fail(detail);
    advance();
  }

  void skip_ws() {
    while (!eof()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#') {
        while (!eof() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  bool keyword(std::string_view kw, bool case_insensitive) {
    if (text_.size() - pos_ < kw.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i) {
      char a = text_[pos_ + i], b = kw[i];
      if (case_insensitive ? (std::toupper(static_cast<unsigned char>(a)) != b) : a != b)
        return false;
    }
    char after = peek(kw.size());
    if (!(after == ' ' || after == '\t' || after == '\n' || after == '\r' || after == '<'))
      return false;
    advance(kw.size());
    return true;
  }

  bool directive() {
    bool at = peek() == '@';
    if (at ? keyword("@prefix", false) : keyword("PREFIX", true)) {
      skip_ws();
      std::string name;
      while (!eof() && peek() != ':') {
        if (peek() == ' ' || peek() == '\n' || peek() == '<') fail("malformed prefix name");
        name.push_back(peek());
        advance();
      }
      expect(':', "expected ':' after prefix name");
      skip_ws();
      prefixes_[name] = parse_iriref();
      if (at) {
        skip_ws();
        expect('.', "expected '.' after @prefix");
      }
      return true;
    }
    if (at ? keyword("@base", false) : keyword("BASE", true)) {
      skip_ws();
      base_ = parse_iriref();
      if (at) {
        skip_ws();
        expect('.', "expected '.' after @base");
      }
      return true;
    }
    if (at) fail("unknown directive");
    return false;
  }

  void reject_unsupported() {
    char c = peek();
    if (c == '(') throw UnsupportedFeature("collections at line " + std::to_string(line_));
    if (c == '[')
      throw UnsupportedFeature("blank-node property lists at line " + std::to_string(line_));
    if (c == '<' && peek(1) == '<')
      throw UnsupportedFeature("quoted triples at line " + std::to_string(line_));
  }

  Term parse_subject() {
    reject_unsupported();
    if (peek() == '_' && peek(1) == ':') return blank();
    Term t;
    t.value = parse_iri_term("subject");
    return t;
  }

  template <class Sink>
  void predicate_object_list(const Term& subject, Sink& sink) {
    while (true) {
      skip_ws();
      std::string pred;
      if (peek() == 'a' && (peek(1) == ' ' || peek(1) == '\t' || peek(1) == '\n' ||
                            peek(1) == '\r' || peek(1) == '<' || peek(1) == '"')) {
        advance();
        pred = vocab::kType;
      } else {
        pred = parse_iri_term("predicate");
      }
      while (true) {
        skip_ws();
        sink(Triple{subject, pred, parse_object()});
        skip_ws();
        if (peek() != ',') break;
        advance();
      }
      if (peek() != ';') return;
      while (peek() == ';') {
        advance();
        skip_ws();
      }
      if (peek() == '.' || peek() == ']') return;
    }
  }

  Term parse_object() {
    reject_unsupported();
    char c = peek();
    if (c == '_' && peek(1) == ':') return blank();
    if (c == '"' || (turtle_ && c == '\'')) return literal();
    if (turtle_ && (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
                    (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))))
      return numeric();
    if (turtle_) {
      for (std::string_view kw : {"true", "false"})
        if (boolean_keyword(kw)) {
          Term t;
          t.type = Term::Type::Literal;
          t.value = std::string(kw);
          t.language = "und";
          return t;
        }
    }
    Term t;
    t.value = parse_iri_term("object");
    return t;
  }

  bool boolean_keyword(std::string_view kw) {
    if (text_.substr(pos_, kw.size()) != kw) return false;
    char after = peek(kw.size());
    if (std::isalnum(static_cast<unsigned char>(after)) || after == ':' || after == '_') return false;
    advance(kw.size());
    return true;
  }

  Term numeric() {
    Term t;
    t.type = Term::Type::Literal;
    t.language = "und";
    std::size_t start = pos_;
    if (peek() == '+' || peek() == '-') advance();
    bool digits = false;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      advance();
      digits = true;
    }
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      advance();
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        advance();
        digits = true;
      }
    }
    if (digits && (peek() == 'e' || peek() == 'E')) {
      advance();
      if (peek() == '+' || peek() == '-') advance();
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("malformed exponent");
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
    }
    if (!digits) fail("malformed numeric literal");
    t.value = std::string(text_.substr(start, pos_ - start));
    return t;
  }

  Term blank() {
    advance(2);  // "_:"
    std::string label;
    while (!eof()) {
      char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
          (static_cast<unsigned char>(c) & 0x80) ||
          (c == '.' && pos_ + 1 < text_.size() && !is_delim(peek(1)))) {
        label.push_back(c);
        advance();
      } else {
        break;
      }
    }
    if (label.empty()) fail("empty blank node label");
    Term t;
    t.type = Term::Type::Blank;
    t.value = std::string(vocab::kSkolem) + label;
    return t;
  }

  static bool is_delim(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == ';' || c == ',' ||
           c == '#' || c == '\0' || c == '<' || c == '"' || c == ')' || c == ']' || c == '(' ||
           c == '[';
  }

  std::string parse_iri_term(const char* role) {
    reject_unsupported();
    if (peek() == '<') return resolve(expand_builtin(parse_iriref()));
    if (!turtle_) fail(std::string("expected IRI as ") + role);
    return prefixed_name(role);
  }

  std::string prefixed_name(const char* role) {
    std::string prefix;
    while (!eof() && peek() != ':') {
      char c = peek();
      if (is_delim(c) || c == '.') fail(std::string("expected IRI or prefixed name as ") + role);
      prefix.push_back(c);
      advance();
    }
    if (eof()) fail(std::string("expected prefixed name as ") + role);
    advance();  // ':'
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) fail("undefined prefix '" + prefix + ":'");
    std::string local;
    while (!eof()) {
      char c = peek();
      if (c == '\\') {
        advance();
        if (eof()) fail("dangling escape in local name");
        local.push_back(peek());
        advance();
        continue;
      }
      if (c == '.') {
        if (is_delim(peek(1)) || peek(1) == '.') break;
        local.push_back(c);
        advance();
        continue;
      }
      if (is_delim(c)) break;
      local.push_back(c);
      advance();
    }
    return it->second + local;
  }

  std::string parse_iriref() {
    if (peek() != '<') fail("expected '<'");
    advance();
    std::string out;
    while (true) {
      if (eof()) fail("unterminated IRI");
      char c = peek();
      if (c == '>') {
        advance();
        break;
      }
      if (c == '\n' || c == ' ' || c == '"' || c == '{' || c == '}' || c == '|' || c == '^' ||
          c == '`')
        fail(std::string("illegal character '") + c + "' in IRI");
      if (c == '\\') {
        advance();
        char e = peek();
        if (e != 'u' && e != 'U') fail("illegal escape in IRI");
        advance();
        out += read_hex_escape(e == 'u' ? 4 : 8);
        continue;
      }
      out.push_back(c);
      advance();
    }
    return out;
  }

  std::string resolve(std::string iri) {
    if (iri.find(':') != std::string::npos) return iri;
    if (base_.empty()) fail("relative IRI <" + iri + "> without @base");
    if (iri.empty()) return base_;
    if (iri.front() == '#') return base_.substr(0, base_.find('#')) + iri;
    auto slash = base_.rfind('/');
    return (slash == std::string::npos ? base_ : base_.substr(0, slash + 1)) + iri;
  }

  std::string read_hex_escape(int digits) {
    std::uint32_t cp = 0;
    for (int i = 0; i < digits; ++i) {
      char h = peek();
      int v;
      if (h >= '0' && h <= '9') v = h - '0';
      else if (h >= 'a' && h <= 'f') v = h - 'a' + 10;
      else if (h >= 'A' && h <= 'F') v = h - 'A' + 10;
      else fail("malformed unicode escape");
      cp = cp * 16 + static_cast<std::uint32_t>(v);
      advance();
    }
    std::string out;
    utf8::append(out, cp);
    return out;
  }

  Term literal() {
    char q = peek();
    bool long_form = turtle_ && peek(1) == q && peek(2) == q;
    advance(long_form ? 3 : 1);
    std::string value;
    while (true) {
      if (eof()) fail("unterminated string literal");
      char c = peek();
      if (long_form) {
        if (c == q && peek(1) == q && peek(2) == q) {
          advance(3);
          break;
        }
      } else if (c == q) {
        advance();
        break;
      } else if (c == '\n' || c == '\r') {
        fail("newline in string literal");
      }
      if (c == '\\') {
        advance();
        char e = peek();
        advance();
        switch (e) {
          case 't': value.push_back('\t'); break;
          case 'b': value.push_back('\b'); break;
          case 'n': value.push_back('\n'); break;
          case 'r': value.push_back('\r'); break;
          case 'f': value.push_back('\f'); break;
          case '"': value.push_back('"'); break;
          case '\'': value.push_back('\''); break;
          case '\\': value.push_back('\\'); break;
          case 'u': value += read_hex_escape(4); break;
          case 'U': value += read_hex_escape(8); break;
          default: fail("illegal escape in string literal");
        }
        continue;
      }
      value.push_back(c);
      advance();
    }
    Term t;
    t.type = Term::Type::Literal;
    t.value = std::move(value);
    t.language = "und";
    if (peek() == '@') {
      advance();
      std::string tag;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-') {
        tag.push_back(peek());
        advance();
      }
      if (tag.empty()) fail("empty language tag");
      t.language = normalize_language_tag(tag);
    } else if (peek() == '^' && peek(1) == '^') {
      advance(2);
      parse_iri_term("datatype");  // the lexical form is kept regardless of datatype
    }
    return t;
  }
};

class Builder {
 public:
  Ontology onto;

  void add(const Triple& t) {
    ++onto.stats.triples;
    const std::string& p = t.predicate;
    bool blank_involved = t.subject.type == Term::Type::Blank || t.object.type == Term::Type::Blank;

    if (p == vocab::kLabel || p == vocab::kComment) {
      if (t.object.type != Term::Type::Literal) return ignore(p);
      Entity& e = ensure(t.subject.value);
      (p == vocab::kLabel ? e.labels : e.comments)[t.object.language].push_back(t.object.value);
      return;
    }
    if (p == vocab::kType) {
      if (t.object.type == Term::Type::Literal) return ignore(p);
      if (blank_involved) {
        ++onto.stats.anonymous_edges;
        return;
      }
      const std::string& o = t.object.value;
      if (o == vocab::kOntology) {
        if (!onto.ontology_iri) onto.ontology_iri = Iri(t.subject.value);
        else onto.ontology_iri = std::min(*onto.ontology_iri, Iri(t.subject.value));
        return;
      }
      std::optional<EntityKind> kind;
      if (o == vocab::kOwlClass || o == vocab::kRdfsClass) kind = EntityKind::Class;
      else if (o == vocab::kObjectProperty) kind = EntityKind::ObjectProperty;
      else if (o == vocab::kDatatypeProperty) kind = EntityKind::DataProperty;
      else if (o == vocab::kNamedIndividual) kind = EntityKind::Individual;
      else if (!vocab::is_builtin(o)) {
        kind = EntityKind::Individual;
        ensure(o);
        onto.instance_types[Iri(t.subject.value)].insert(Iri(o));
      }
      if (!kind) return ignore(p + " " + o);
      merge_kind(ensure(t.subject.value), *kind);
      return;
    }
    bool structural = p == vocab::kSubClassOf || p == vocab::kEquivalentClass ||
                      p == vocab::kDomain || p == vocab::kRange;
    if (!structural) return ignore(p);
    if (t.object.type == Term::Type::Literal) return ignore(p);
    if (blank_involved) {
      ++onto.stats.anonymous_edges;
      return;
    }
    Iri s(t.subject.value), o(t.object.value);
    const bool hierarchy = p == vocab::kSubClassOf || p == vocab::kEquivalentClass;
    if (hierarchy && s == o) return;  // trivially true, carries no entity information
    ensure(t.subject.value);
    ensure(t.object.value);
    if (p == vocab::kSubClassOf) {
      onto.subclass_edges.emplace(s, o);
    } else if (p == vocab::kEquivalentClass) {
      onto.equivalence_edges.insert(s < o ? IriPair{s, o} : IriPair{o, s});
    } else if (p == vocab::kDomain) {
      onto.property_domains[s].insert(o);
    } else {
      onto.property_ranges[s].insert(o);
    }
  }

  void finish() {
    for (auto& [iri, e] : onto.entities) {
      for (auto* m : {&e.labels, &e.comments})
        for (auto& [tag, values] : *m) {
          std::sort(values.begin(), values.end());
          values.erase(std::unique(values.begin(), values.end()), values.end());
        }
    }
  }

 private:
  static int rank(EntityKind k) {
    switch (k) {
      case EntityKind::Class: return 4;
      case EntityKind::ObjectProperty: return 3;
      case EntityKind::DataProperty: return 2;
      case EntityKind::Individual: return 1;
      case EntityKind::Unknown: return 0;
    }
    return 0;
  }
  static void merge_kind(Entity& e, EntityKind k) {
    if (rank(k) > rank(e.kind)) e.kind = k;
  }
  Entity& ensure(const std::string& iri) {
    Iri key(iri);
    auto [it, inserted] = onto.entities.try_emplace(key);
    if (inserted) it->second.iri = key;
    return it->second;
  }
  void ignore(const std::string& what) {
    ++onto.stats.ignored_triples;
    ++onto.stats.ignored_predicates[what];
  }
};

std::string escape_literal(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

Ontology parse_ontology(std::string_view text, RdfFormat format) {
  Builder builder;
  Parser parser(text, format);
  parser.run([&](const Triple& t) {
    try {
      builder.add(t);
    } catch (const std::invalid_argument& e) {
      throw MalformedSyntax(0, 0, e.what());
    }
  });
  builder.finish();
  return std::move(builder.onto);
}

Ontology parse_ontology(std::istream& in, RdfFormat format) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_ontology(buf.str(), format);
}

Ontology parse_ontology_file(const std::string& path, RdfFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open ontology file '" + path + "'");
  try {
    return parse_ontology(in, format);
  } catch (const MalformedSyntax& e) {
    throw MalformedSyntax(e.line(), e.column(), path + ": " + e.detail());
  }
}

RdfFormat format_from_path(std::string_view path) {
  return path.ends_with(".nt") ? RdfFormat::NTriples : RdfFormat::Turtle;
}

std::string write_ntriples(const Ontology& onto) {
  std::vector<std::string> lines;
  auto iri = [](const std::string& v) { return "<" + v + ">"; };
  auto emit = [&](const std::string& s, const std::string& p, const std::string& o) {
    lines.push_back(s + " " + p + " " + o + " .");
  };
  const std::string type = iri(vocab::kType);
  if (onto.ontology_iri) emit(iri(onto.ontology_iri->str()), type, iri(vocab::kOntology));
  for (const auto& [key, e] : onto.entities) {
    const std::string s = iri(key.str());
    switch (e.kind) {
      case EntityKind::Class: emit(s, type, iri(vocab::kOwlClass)); break;
      case EntityKind::ObjectProperty: emit(s, type, iri(vocab::kObjectProperty)); break;
      case EntityKind::DataProperty: emit(s, type, iri(vocab::kDatatypeProperty)); break;
      case EntityKind::Individual: emit(s, type, iri(vocab::kNamedIndividual)); break;
      case EntityKind::Unknown: break;
    }
    for (const auto& [pred, m] : {std::pair{&vocab::kLabel, &e.labels},
                                  std::pair{&vocab::kComment, &e.comments}})
      for (const auto& [tag, values] : *m)
        for (const auto& v : values)
          emit(s, iri(*pred), "\"" + escape_literal(v) + "\"" + (tag == "und" ? "" : "@" + tag));
  }
  for (const auto& [a, b] : onto.subclass_edges)
    emit(iri(a.str()), iri(vocab::kSubClassOf), iri(b.str()));
  for (const auto& [a, b] : onto.equivalence_edges)
    emit(iri(a.str()), iri(vocab::kEquivalentClass), iri(b.str()));
  for (const auto& [p, m] : {std::pair{&vocab::kDomain, &onto.property_domains},
                             std::pair{&vocab::kRange, &onto.property_ranges},
                             std::pair{&vocab::kType, &onto.instance_types}})
    for (const auto& [k, vs] : *m)
      for (const auto& v : vs) emit(iri(k.str()), iri(*p), iri(v.str()));
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

}  // namespace kgalign
