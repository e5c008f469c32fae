#include "pathid/io.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "pathid/errors.hpp"

namespace pathid {

namespace {

struct Line {
  int number = 0;
  std::string text;
};

// A top-level "key: value" line and the indented lines following it.
struct Entry {
  std::string key;
  std::string value;
  int line = 0;
  std::vector<Line> block;
};

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

class Document {
 public:
  Document(const std::string& text, std::string file, const std::string& header)
      : file_(std::move(file)) {
    std::istringstream in(text);
    std::string raw;
    int number = 0;
    bool seen_header = header.empty();
    while (std::getline(in, raw)) {
      ++number;
      std::string body = raw.substr(0, raw.find('#'));
      std::string t = trim(body);
      if (t.empty()) continue;
      if (!seen_header) {
        if (t != header) fail(number, "expected header '" + header + "'");
        seen_header = true;
        continue;
      }
      bool indented = body[0] == ' ' || body[0] == '\t';
      if (indented) {
        if (entries_.empty()) fail(number, "indented line outside a block");
        entries_.back().block.push_back({number, t});
        continue;
      }
      auto colon = t.find(':');
      if (colon == std::string::npos) fail(number, "expected 'key: value'");
      entries_.push_back({trim(t.substr(0, colon)), trim(t.substr(colon + 1)), number, {}});
    }
    if (!seen_header) fail(number, "missing header '" + header + "'");
  }

  const std::vector<Entry>& entries() const { return entries_; }
  const std::string& file() const { return file_; }

  [[noreturn]] void fail(int line, const std::string& message) const {
    throw ParseError(file_, line, message);
  }

 private:
  std::string file_;
  std::vector<Entry> entries_;
};

int parse_int(const Document& doc, int line, const std::string& s) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    doc.fail(line, "expected an integer, got '" + s + "'");
  }
}

Rational parse_probability(const Document& doc, int line, const std::string& s) {
  try {
    return parse_rational(s);
  } catch (const std::exception&) {
    doc.fail(line, "expected a rational number, got '" + s + "'");
  }
}

// Collects vars / latent / edges entries and builds the graph.
class GraphSection {
 public:
  bool accept(const Document& doc, const Entry& e) {
    if (e.key == "vars") {
      if (vars_line_) doc.fail(e.line, "duplicate 'vars'");
      vars_line_ = e.line;
      for (const auto& tok : tokens(e.value)) {
        auto colon = tok.find(':');
        Vertex v{tok.substr(0, colon), 2};
        if (colon != std::string::npos) v.cardinality = parse_int(doc, e.line, tok.substr(colon + 1));
        vertices_.push_back(v);
      }
      return true;
    }
    if (e.key == "latent") {
      latent_ = tokens(e.value);
      latent_line_ = e.line;
      return true;
    }
    if (e.key == "edges") {
      if (!e.value.empty()) doc.fail(e.line, "edges are listed on indented lines");
      for (const auto& l : e.block) {
        auto t = tokens(l.text);
        if (t.size() != 3 || (t[1] != "->" && t[1] != "<->")) {
          doc.fail(l.number, "expected 'X -> Y' or 'X <-> Y'");
        }
        (t[1] == "->" ? directed_ : bidirected_).emplace_back(t[0], t[2]);
        edge_lines_.push_back(l.number);
      }
      return true;
    }
    return false;
  }

  HiddenDag build(const Document& doc) const {
    if (!vars_line_) doc.fail(0, "missing 'vars'");
    std::set<std::string> names;
    for (const auto& v : vertices_) names.insert(v.name);
    std::size_t k = 0;
    for (const auto* list : {&directed_, &bidirected_}) {
      for (const auto& [a, b] : *list) {
        for (const auto& n : {a, b}) {
          if (!names.count(n)) doc.fail(edge_lines_.at(k), "unknown vertex '" + n + "'");
        }
        ++k;
      }
    }
    for (const auto& n : latent_) {
      if (!names.count(n)) doc.fail(latent_line_, "unknown latent vertex '" + n + "'");
    }
    try {
      return HiddenDag(Admg(vertices_, directed_, bidirected_), latent_);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& err) {
      doc.fail(vars_line_, err.what());
    }
  }

 private:
  std::vector<Vertex> vertices_;
  NameList latent_;
  std::vector<Edge> directed_;
  std::vector<Edge> bidirected_;
  std::vector<int> edge_lines_;
  int vars_line_ = 0;
  int latent_line_ = 0;
};

void write_graph(std::ostringstream& out, const HiddenDag& d) {
  const Admg& g = d.base;
  out << "vars:";
  for (const auto& v : g.vertices()) {
    out << ' ' << v.name;
    if (v.cardinality != 2) out << ':' << v.cardinality;
  }
  out << '\n';
  if (!d.hidden.empty()) {
    out << "latent:";
    for (const auto& n : d.hidden_names()) out << ' ' << n;
    out << '\n';
  }
  auto directed = g.directed_edges();
  auto bidirected = g.bidirected_edges();
  if (!directed.empty() || !bidirected.empty()) {
    out << "edges:\n";
    for (auto [a, b] : directed) out << "  " << g.name(a) << " -> " << g.name(b) << '\n';
    for (auto [a, b] : bidirected) out << "  " << g.name(a) << " <-> " << g.name(b) << '\n';
  }
}

std::string join(const NameList& names, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? sep : "") + names[i];
  return out;
}

ValueLabel parse_value_label(const Document& doc, int line, const std::string& s) {
  auto colon = s.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    doc.fail(line, "expected 'label:state', got '" + s + "'");
  }
  return {s.substr(0, colon), parse_int(doc, line, s.substr(colon + 1))};
}

std::string show(const ValueLabel& v) { return v.label + ":" + std::to_string(v.state); }

Path parse_path(const Document& doc, const Entry& e) {
  auto t = tokens(e.value);
  Path p;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i % 2 == 1) {
      if (t[i] != "->") doc.fail(e.line, "paths are written 'A -> M -> Y'");
    } else {
      p.push_back(t[i]);
    }
  }
  if (p.size() < 2 || t.size() % 2 == 0) doc.fail(e.line, "a path needs at least one edge");
  return p;
}

std::string format_name(Format f) {
  switch (f) {
    case Format::Text:
      return "text";
    case Format::Latex:
      return "latex";
    case Format::Structured:
      return "structured";
  }
  return "text";
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

HiddenDag parse_graph(const std::string& text, const std::string& file) {
  Document doc(text, file, "");
  GraphSection section;
  for (const auto& e : doc.entries()) {
    if (!section.accept(doc, e)) doc.fail(e.line, "unknown key '" + e.key + "'");
  }
  return section.build(doc);
}

std::string serialize_graph(const HiddenDag& g) {
  std::ostringstream out;
  write_graph(out, g);
  return out.str();
}

std::string to_string(QueryKind kind) {
  switch (kind) {
    case QueryKind::Interventional:
      return "interventional";
    case QueryKind::PathSpecific:
      return "path_specific";
    case QueryKind::ConditionalPathSpecific:
      return "conditional_path_specific";
    case QueryKind::Separable:
      return "separable";
    case QueryKind::Bounds:
      return "bounds";
  }
  return "path_specific";
}

PseQuery QueryFile::pse() const {
  PseQuery q;
  q.outcome = outcome;
  q.treatments = treatments;
  q.paths = paths;
  q.given = given;
  return q;
}

QueryFile parse_query(const std::string& text, const std::string& file) {
  Document doc(text, file, "pathid-query 1");
  QueryFile q;
  bool have_kind = false;
  for (const auto& e : doc.entries()) {
    if (!e.block.empty()) doc.fail(e.block.front().number, "unexpected indented line");
    if (e.key == "kind") {
      const std::vector<QueryKind> kinds{QueryKind::Interventional, QueryKind::PathSpecific,
                                         QueryKind::ConditionalPathSpecific, QueryKind::Separable,
                                         QueryKind::Bounds};
      bool found = false;
      for (auto k : kinds) {
        if (to_string(k) == e.value) {
          q.kind = k;
          found = true;
        }
      }
      if (!found) doc.fail(e.line, "unknown query kind '" + e.value + "'");
      have_kind = true;
    } else if (e.key == "outcome") {
      q.outcome = tokens(e.value);
    } else if (e.key == "treatment") {
      auto t = tokens(e.value);
      if (t.empty()) doc.fail(e.line, "treatment needs a vertex");
      std::optional<ValueLabel> active, baseline;
      for (std::size_t i = 1; i < t.size(); ++i) {
        auto eq = t[i].find('=');
        if (eq == std::string::npos) doc.fail(e.line, "expected active=... or baseline=...");
        auto key = t[i].substr(0, eq);
        auto value = parse_value_label(doc, e.line, t[i].substr(eq + 1));
        if (key == "active") {
          active = value;
        } else if (key == "baseline") {
          baseline = value;
        } else {
          doc.fail(e.line, "unknown treatment field '" + key + "'");
        }
      }
      if (!active) doc.fail(e.line, "treatment needs an active value");
      q.treatments.push_back({t[0], TreatmentValues{*active, baseline.value_or(*active)}});
    } else if (e.key == "path") {
      q.paths.push_back(parse_path(doc, e));
    } else if (e.key == "given") {
      q.given = tokens(e.value);
    } else if (e.key == "mediator") {
      q.mediator = e.value;
    } else if (e.key == "component") {
      auto t = tokens(e.value);
      if (t.size() != 4 || t[1] != "->") doc.fail(e.line, "expected 'component: A -> N label:state'");
      q.components.push_back({t[0], t[2], parse_value_label(doc, e.line, t[3])});
    } else if (e.key == "format") {
      if (e.value == "text") {
        q.format = Format::Text;
      } else if (e.value == "latex") {
        q.format = Format::Latex;
      } else if (e.value == "structured") {
        q.format = Format::Structured;
      } else {
        doc.fail(e.line, "unknown format '" + e.value + "'");
      }
    } else {
      doc.fail(e.line, "unknown key '" + e.key + "'");
    }
  }
  if (!have_kind) doc.fail(0, "missing 'kind'");
  if (q.outcome.empty()) doc.fail(0, "missing 'outcome'");
  return q;
}

std::string serialize_query(const QueryFile& q) {
  std::ostringstream out;
  out << "pathid-query 1\n";
  out << "kind: " << to_string(q.kind) << '\n';
  out << "outcome: " << join(q.outcome, " ") << '\n';
  for (const auto& [name, values] : q.treatments) {
    out << "treatment: " << name << " active=" << show(values.active);
    if (q.kind != QueryKind::Interventional) out << " baseline=" << show(values.baseline);
    out << '\n';
  }
  for (const auto& p : q.paths) out << "path: " << join(p, " -> ") << '\n';
  if (!q.given.empty()) out << "given: " << join(q.given, " ") << '\n';
  if (!q.mediator.empty()) out << "mediator: " << q.mediator << '\n';
  for (const auto& c : q.components) {
    out << "component: " << c.treatment << " -> " << c.vertex << ' ' << show(c.value) << '\n';
  }
  out << "format: " << format_name(q.format) << '\n';
  return out.str();
}

DiscreteNpsem parse_model(const std::string& text, const std::string& file) {
  Document doc(text, file, "pathid-model 1");
  GraphSection section;
  NoiseMode mode = NoiseMode::Independent;
  std::map<std::string, std::pair<int, std::vector<Rational>>> noise;
  std::map<std::string, const Entry*> mechanism_entries;
  std::vector<Rational> joint;
  int joint_line = 0;
  for (const auto& e : doc.entries()) {
    if (section.accept(doc, e)) continue;
    if (e.key == "mode") {
      if (e.value == "independent") {
        mode = NoiseMode::Independent;
      } else if (e.value == "joint") {
        mode = NoiseMode::Joint;
      } else {
        doc.fail(e.line, "mode is 'independent' or 'joint'");
      }
    } else if (e.key.rfind("noise ", 0) == 0) {
      std::vector<Rational> pmf;
      for (const auto& t : tokens(e.value)) pmf.push_back(parse_probability(doc, e.line, t));
      noise[trim(e.key.substr(6))] = {e.line, std::move(pmf)};
    } else if (e.key.rfind("mechanism ", 0) == 0) {
      mechanism_entries[trim(e.key.substr(10))] = &e;
    } else if (e.key == "joint") {
      joint_line = e.line;
      for (const auto& t : tokens(e.value)) joint.push_back(parse_probability(doc, e.line, t));
      for (const auto& l : e.block) {
        for (const auto& t : tokens(l.text)) joint.push_back(parse_probability(doc, l.number, t));
      }
    } else {
      doc.fail(e.line, "unknown key '" + e.key + "'");
    }
  }
  HiddenDag d = section.build(doc);
  const Admg& g = d.base;
  for (const auto& [name, entry] : mechanism_entries) {
    if (!g.contains(name)) doc.fail(entry->line, "mechanism for unknown vertex '" + name + "'");
  }
  for (const auto& [name, entry] : noise) {
    if (!g.contains(name)) doc.fail(entry.first, "noise for unknown vertex '" + name + "'");
  }

  std::vector<Mechanism> mechanisms;
  for (int v = 0; v < g.size(); ++v) {
    auto it = mechanism_entries.find(g.name(v));
    if (it == mechanism_entries.end()) doc.fail(0, "missing mechanism for '" + g.name(v) + "'");
    const Entry& e = *it->second;
    std::vector<int> parent_cards;
    for (int p : g.parents(v)) parent_cards.push_back(g.cardinality(p));
    int rows = 1;
    for (int c : parent_cards) rows *= c;
    std::vector<std::vector<int>> table(rows);
    int noise_states = -1;
    for (const auto& l : e.block) {
      auto colon = l.text.find(':');
      if (colon == std::string::npos) doc.fail(l.number, "expected 'parent states : outputs'");
      auto left = tokens(l.text.substr(0, colon));
      auto right = tokens(l.text.substr(colon + 1));
      if (left.size() != parent_cards.size()) {
        doc.fail(l.number, "expected " + std::to_string(parent_cards.size()) + " parent states");
      }
      int row = 0;
      for (std::size_t i = 0; i < left.size(); ++i) {
        int s = parse_int(doc, l.number, left[i]);
        if (s < 0 || s >= parent_cards[i]) doc.fail(l.number, "parent state out of range");
        row = row * parent_cards[i] + s;
      }
      if (!table[row].empty()) doc.fail(l.number, "duplicate row");
      if (right.empty()) doc.fail(l.number, "row has no outputs");
      if (noise_states >= 0 && static_cast<int>(right.size()) != noise_states) {
        doc.fail(l.number, "rows must have the same number of outputs");
      }
      noise_states = static_cast<int>(right.size());
      for (const auto& t : right) table[row].push_back(parse_int(doc, l.number, t));
    }
    Mechanism mech;
    mech.noise_states = noise_states;
    for (int r = 0; r < rows; ++r) {
      if (table[r].empty()) doc.fail(e.line, "mechanism of '" + g.name(v) + "' misses a row");
      mech.table.insert(mech.table.end(), table[r].begin(), table[r].end());
    }
    if (mode == NoiseMode::Independent) {
      auto n = noise.find(g.name(v));
      if (n == noise.end()) doc.fail(e.line, "missing noise for '" + g.name(v) + "'");
      mech.pmf = n->second.second;
    }
    mechanisms.push_back(std::move(mech));
  }
  try {
    return DiscreteNpsem(std::move(d), std::move(mechanisms), mode, std::move(joint));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& err) {
    doc.fail(joint_line, err.what());
  }
}

std::string serialize_model(const DiscreteNpsem& m) {
  std::ostringstream out;
  out << "pathid-model 1\n";
  out << "mode: " << (m.mode() == NoiseMode::Independent ? "independent" : "joint") << '\n';
  write_graph(out, m.graph());
  const Admg& g = m.dag();
  for (int v = 0; v < g.size(); ++v) {
    const Mechanism& mech = m.mechanism(v);
    if (m.mode() == NoiseMode::Independent) {
      out << "noise " << g.name(v) << ':';
      for (const auto& p : mech.pmf) out << ' ' << to_string(p);
      out << '\n';
    }
    out << "mechanism " << g.name(v) << ":\n";
    std::vector<int> cards;
    for (int p : g.parents(v)) cards.push_back(g.cardinality(p));
    const int rows = static_cast<int>(mech.table.size()) / mech.noise_states;
    for (int r = 0; r < rows; ++r) {
      std::vector<int> states(cards.size());
      int rest = r;
      for (std::size_t i = cards.size(); i-- > 0;) {
        states[i] = rest % cards[i];
        rest /= cards[i];
      }
      out << ' ';
      for (int s : states) out << ' ' << s;
      out << " :";
      for (int k = 0; k < mech.noise_states; ++k) {
        out << ' ' << mech.table[static_cast<std::size_t>(r) * mech.noise_states + k];
      }
      out << '\n';
    }
  }
  if (m.mode() == NoiseMode::Joint) {
    out << "joint:\n";
    const auto& pmf = m.joint_pmf();
    for (std::size_t i = 0; i < pmf.size(); i += 8) {
      out << ' ';
      for (std::size_t k = i; k < std::min(pmf.size(), i + 8); ++k) out << ' ' << to_string(pmf[k]);
      out << '\n';
    }
  }
  return out.str();
}

JointTable parse_table(const std::string& text, const std::string& file) {
  Document doc(text, file, "pathid-table 1");
  std::vector<Variable> vars;
  const Entry* rows = nullptr;
  for (const auto& e : doc.entries()) {
    if (e.key == "vars") {
      for (const auto& tok : tokens(e.value)) {
        auto colon = tok.find(':');
        Variable v{tok.substr(0, colon), 2};
        if (colon != std::string::npos) v.cardinality = parse_int(doc, e.line, tok.substr(colon + 1));
        if (v.cardinality < 1) doc.fail(e.line, "variable '" + v.name + "' has no states");
        vars.push_back(v);
      }
    } else if (e.key == "rows") {
      rows = &e;
    } else {
      doc.fail(e.line, "unknown key '" + e.key + "'");
    }
  }
  if (vars.empty()) doc.fail(0, "missing 'vars'");
  JointTable t(vars);
  std::vector<bool> seen(t.size(), false);
  if (rows) {
    for (const auto& l : rows->block) {
      auto tok = tokens(l.text);
      if (tok.size() != vars.size() + 1) doc.fail(l.number, "expected states then a probability");
      std::vector<int> states;
      for (std::size_t i = 0; i < vars.size(); ++i) {
        int s = parse_int(doc, l.number, tok[i]);
        if (s < 0 || s >= vars[i].cardinality) doc.fail(l.number, "state out of range");
        states.push_back(s);
      }
      auto idx = t.flat_index(states);
      if (seen[idx]) doc.fail(l.number, "duplicate row");
      seen[idx] = true;
      t.at(idx) = parse_probability(doc, l.number, tok.back());
    }
  }
  if (!is_distribution(t)) doc.fail(rows ? rows->line : 0, "rows must be nonnegative and sum to 1");
  return t;
}

std::string serialize_table(const JointTable& t) {
  std::ostringstream out;
  out << "pathid-table 1\nvars:";
  for (const auto& v : t.variables()) {
    out << ' ' << v.name;
    if (v.cardinality != 2) out << ':' << v.cardinality;
  }
  out << "\nrows:\n";
  for (std::size_t f = 0; f < t.size(); ++f) {
    if (t.at(f) == 0) continue;
    out << ' ';
    for (int s : t.states_of(f)) out << ' ' << s;
    out << ' ' << to_string(t.at(f)) << '\n';
  }
  return out.str();
}

}  // namespace pathid
