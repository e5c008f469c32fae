#include "pathid/estimand.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

#include "pathid/errors.hpp"

namespace pathid {

Estimand Estimand::prob(std::vector<Binding> targets, std::vector<Binding> given) {
  return Estimand(std::make_shared<const Node>(Node{CondProb{std::move(targets), std::move(given)}}));
}

Estimand Estimand::product(std::vector<Estimand> factors) {
  return Estimand(std::make_shared<const Node>(Node{Product{std::move(factors)}}));
}

Estimand Estimand::sum(NameList vars, Estimand body) {
  return Estimand(std::make_shared<const Node>(Node{Sum{std::move(vars), std::move(body)}}));
}

Estimand Estimand::quotient(Estimand numerator, Estimand denominator) {
  return Estimand(
      std::make_shared<const Node>(Node{Quotient{std::move(numerator), std::move(denominator)}}));
}

Estimand Estimand::marginal(NameList keep, Estimand body) {
  return Estimand(std::make_shared<const Node>(Node{Marginal{std::move(keep), std::move(body)}}));
}

bool Estimand::is_one() const {
  const auto* p = as<Product>();
  return p && p->factors.empty();
}

bool operator==(const Estimand& a, const Estimand& b) {
  return a.node_ == b.node_ || a.node_->kind == b.node_->kind;
}

namespace {

void collect_free(const Estimand& e, std::vector<std::string>& bound, std::set<std::string>& out) {
  auto is_bound = [&](const std::string& n) {
    return std::find(bound.begin(), bound.end(), n) != bound.end();
  };
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CondProb>) {
          for (const auto* list : {&n.targets, &n.given}) {
            for (const auto& b : *list) {
              if (b.value.is_var() && !is_bound(b.value.name)) out.insert(b.value.name);
            }
          }
        } else if constexpr (std::is_same_v<T, Product>) {
          for (const auto& f : n.factors) collect_free(f, bound, out);
        } else if constexpr (std::is_same_v<T, Sum>) {
          bound.insert(bound.end(), n.vars.begin(), n.vars.end());
          collect_free(n.body, bound, out);
          bound.resize(bound.size() - n.vars.size());
        } else if constexpr (std::is_same_v<T, Quotient>) {
          collect_free(n.numerator, bound, out);
          collect_free(n.denominator, bound, out);
        } else {
          std::set<std::string> inner;
          std::vector<std::string> none;
          collect_free(n.body, none, inner);
          for (const auto& v : inner) {
            if (std::find(n.keep.begin(), n.keep.end(), v) != n.keep.end() && !is_bound(v)) {
              out.insert(v);
            }
          }
        }
      },
      e.node().kind);
}

bool mentions(const Estimand& e, const std::string& var) { return free_variables(e).count(var) > 0; }

}  // namespace

std::set<std::string> free_variables(const Estimand& e) {
  std::vector<std::string> bound;
  std::set<std::string> out;
  collect_free(e, bound, out);
  return out;
}

Estimand substitute(const Estimand& e, const std::map<std::string, Value>& values) {
  if (values.empty()) return e;
  return std::visit(
      [&](const auto& n) -> Estimand {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CondProb>) {
          auto replace = [&](std::vector<Binding> list) {
            for (auto& b : list) {
              if (!b.value.is_var()) continue;
              auto it = values.find(b.value.name);
              if (it != values.end()) b.value = it->second;
            }
            return list;
          };
          return Estimand::prob(replace(n.targets), replace(n.given));
        } else if constexpr (std::is_same_v<T, Product>) {
          std::vector<Estimand> fs;
          for (const auto& f : n.factors) fs.push_back(substitute(f, values));
          return Estimand::product(std::move(fs));
        } else if constexpr (std::is_same_v<T, Sum>) {
          auto inner = values;
          for (const auto& v : n.vars) inner.erase(v);
          return Estimand::sum(n.vars, substitute(n.body, inner));
        } else if constexpr (std::is_same_v<T, Quotient>) {
          return Estimand::quotient(substitute(n.numerator, values),
                                    substitute(n.denominator, values));
        } else {
          // Variables summed out by the marginal are not free.
          auto inner = values;
          auto fv = free_variables(n.body);
          for (const auto& v : fv) {
            if (std::find(n.keep.begin(), n.keep.end(), v) == n.keep.end()) inner.erase(v);
          }
          return Estimand::marginal(n.keep, substitute(n.body, inner));
        }
      },
      e.node().kind);
}

// ---------------------------------------------------------------------------
// Simplification

namespace {

std::string value_key(const Value& v) {
  return v.is_var() ? "$" + v.name : v.name + ":" + std::to_string(v.state);
}

std::set<std::pair<std::string, std::string>> binding_set(const std::vector<Binding>& list) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& b : list) out.emplace(b.vertex, value_key(b.value));
  return out;
}

std::vector<Estimand> factors_of(const Estimand& e) {
  if (const auto* p = e.as<Product>()) return p->factors;
  return {e};
}

Estimand make_product(std::vector<Estimand> fs) {
  std::vector<Estimand> flat;
  for (auto& f : fs) {
    if (const auto* p = f.as<Product>()) {
      flat.insert(flat.end(), p->factors.begin(), p->factors.end());
    } else {
      flat.push_back(std::move(f));
    }
  }
  if (flat.size() == 1) return flat.front();
  return Estimand::product(std::move(flat));
}

int count_var(const CondProb& p, const std::string& var) {
  int n = 0;
  for (const auto* list : {&p.targets, &p.given}) {
    for (const auto& b : *list) n += (b.value.is_var() && b.value.name == var) ? 1 : 0;
  }
  return n;
}

// p(X | W, C) * p(W | C) -> p(X, W | C)
bool chain_merge(std::vector<Estimand>& fs) {
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const auto* upper = fs[i].as<CondProb>();
    if (!upper) continue;
    auto upper_given = binding_set(upper->given);
    for (std::size_t j = 0; j < fs.size(); ++j) {
      if (i == j) continue;
      const auto* lower = fs[j].as<CondProb>();
      if (!lower || lower->targets.empty()) continue;
      auto lower_all = binding_set(lower->targets);
      auto lower_given = binding_set(lower->given);
      bool disjoint = true;
      for (const auto& t : lower_all) disjoint = disjoint && !lower_given.count(t);
      lower_all.insert(lower_given.begin(), lower_given.end());
      if (!disjoint || lower_all != upper_given) continue;
      std::set<std::string> upper_vertices;
      for (const auto& b : upper->targets) upper_vertices.insert(b.vertex);
      bool clash = false;
      for (const auto& b : lower->targets) clash = clash || upper_vertices.count(b.vertex);
      if (clash) continue;
      auto targets = upper->targets;
      targets.insert(targets.end(), lower->targets.begin(), lower->targets.end());
      fs[i] = Estimand::prob(std::move(targets), lower->given);
      fs.erase(fs.begin() + static_cast<std::ptrdiff_t>(j));
      return true;
    }
  }
  return false;
}

Estimand simplify_once(const Estimand& e);

Estimand simplify_sum(NameList vars, Estimand body) {
  body = simplify_once(body);
  auto fv = free_variables(body);
  std::erase_if(vars, [&](const std::string& v) { return !fv.count(v); });
  if (vars.empty()) return body;
  if (const auto* inner = body.as<Sum>()) {
    vars.insert(vars.end(), inner->vars.begin(), inner->vars.end());
    body = inner->body;
  }
  auto fs = factors_of(body);

  // Sum out a variable that occurs once, as its own target, in a single factor.
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = vars.begin(); it != vars.end(); ++it) {
      std::vector<std::size_t> holders;
      for (std::size_t k = 0; k < fs.size(); ++k) {
        if (mentions(fs[k], *it)) holders.push_back(k);
      }
      if (holders.empty()) {
        vars.erase(it);
        changed = true;
        break;
      }
      if (holders.size() != 1) continue;
      const auto* p = fs[holders[0]].as<CondProb>();
      if (!p || count_var(*p, *it) != 1) continue;
      auto pos = std::find_if(p->targets.begin(), p->targets.end(), [&](const Binding& b) {
        return b.vertex == *it && b.value == Value::var(*it);
      });
      if (pos == p->targets.end()) continue;
      auto targets = p->targets;
      targets.erase(targets.begin() + (pos - p->targets.begin()));
      fs[holders[0]] = targets.empty() ? Estimand::one() : Estimand::prob(targets, p->given);
      vars.erase(it);
      changed = true;
      break;
    }
  }

  std::vector<Estimand> outside;
  std::vector<Estimand> inside;
  for (auto& f : fs) {
    if (f.is_one()) continue;
    auto f_free = free_variables(f);
    bool depends = std::any_of(vars.begin(), vars.end(),
                               [&](const std::string& v) { return f_free.count(v) > 0; });
    (depends ? inside : outside).push_back(f);
  }
  if (!vars.empty() && !inside.empty()) {
    outside.push_back(Estimand::sum(vars, make_product(std::move(inside))));
  }
  return make_product(std::move(outside));
}

Estimand simplify_quotient(const Estimand& num_in, const Estimand& den_in) {
  Estimand num = simplify_once(num_in);
  Estimand den = simplify_once(den_in);
  if (den.is_one()) return num;
  if (num == den) return Estimand::one();
  auto nf = factors_of(num);
  auto df = factors_of(den);
  for (auto d = df.begin(); d != df.end();) {
    auto match = std::find(nf.begin(), nf.end(), *d);
    if (match != nf.end()) {
      nf.erase(match);
      d = df.erase(d);
    } else {
      ++d;
    }
  }
  // p(T, W | C) / p(W | C) -> p(T | W, C)
  if (nf.size() == 1 && df.size() == 1) {
    const auto* n = nf[0].as<CondProb>();
    const auto* d = df[0].as<CondProb>();
    if (n && d && binding_set(n->given) == binding_set(d->given)) {
      auto nt = binding_set(n->targets);
      auto dt = binding_set(d->targets);
      bool subset = std::includes(nt.begin(), nt.end(), dt.begin(), dt.end());
      if (subset && dt.size() < nt.size() && !dt.empty()) {
        std::vector<Binding> targets;
        for (const auto& b : n->targets) {
          if (!dt.count({b.vertex, value_key(b.value)})) targets.push_back(b);
        }
        auto given = d->targets;
        given.insert(given.end(), n->given.begin(), n->given.end());
        return Estimand::prob(std::move(targets), std::move(given));
      }
    }
  }
  Estimand new_num = make_product(std::move(nf));
  Estimand new_den = make_product(std::move(df));
  if (new_den.is_one()) return new_num;
  return Estimand::quotient(new_num, new_den);
}

Estimand simplify_once(const Estimand& e) {
  return std::visit(
      [&](const auto& n) -> Estimand {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CondProb>) {
          if (n.targets.empty()) return Estimand::one();
          return e;
        } else if constexpr (std::is_same_v<T, Product>) {
          std::vector<Estimand> fs;
          for (const auto& f : n.factors) {
            Estimand s = simplify_once(f);
            if (const auto* p = s.as<Product>()) {
              fs.insert(fs.end(), p->factors.begin(), p->factors.end());
            } else {
              fs.push_back(s);
            }
          }
          return make_product(std::move(fs));
        } else if constexpr (std::is_same_v<T, Sum>) {
          return simplify_sum(n.vars, n.body);
        } else if constexpr (std::is_same_v<T, Quotient>) {
          return simplify_quotient(n.numerator, n.denominator);
        } else {
          NameList vars;
          for (const auto& v : free_variables(n.body)) {
            if (std::find(n.keep.begin(), n.keep.end(), v) == n.keep.end()) vars.push_back(v);
          }
          return simplify_sum(vars, n.body);
        }
      },
      e.node().kind);
}

}  // namespace

Estimand merge_chains(const Estimand& e) {
  return std::visit(
      [&](const auto& n) -> Estimand {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CondProb>) {
          return e;
        } else if constexpr (std::is_same_v<T, Product>) {
          std::vector<Estimand> fs;
          for (const auto& f : n.factors) {
            Estimand m = merge_chains(f);
            if (const auto* p = m.as<Product>()) {
              fs.insert(fs.end(), p->factors.begin(), p->factors.end());
            } else {
              fs.push_back(m);
            }
          }
          while (chain_merge(fs)) {
          }
          return make_product(std::move(fs));
        } else if constexpr (std::is_same_v<T, Sum>) {
          return Estimand::sum(n.vars, merge_chains(n.body));
        } else if constexpr (std::is_same_v<T, Quotient>) {
          return Estimand::quotient(merge_chains(n.numerator), merge_chains(n.denominator));
        } else {
          return Estimand::marginal(n.keep, merge_chains(n.body));
        }
      },
      e.node().kind);
}

Estimand simplify(const Estimand& e) {
  Estimand current = e;
  for (int i = 0; i < 64; ++i) {
    Estimand next = simplify_once(current);
    if (next == current) return next;
    current = next;
  }
  return current;
}

// ---------------------------------------------------------------------------
// Canonical ordering

namespace {

struct Canon {
  std::map<std::string, int> rank;

  int rank_of(const std::string& v) const {
    auto it = rank.find(v);
    return it == rank.end() ? -1 : it->second;
  }

  int key(const Estimand& e) const {
    return std::visit(
        [&](const auto& n) -> int {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, CondProb>) {
            int best = -1;
            for (const auto& b : n.targets) best = std::max(best, rank_of(b.vertex));
            return best;
          } else if constexpr (std::is_same_v<T, Product>) {
            int best = -1;
            for (const auto& f : n.factors) best = std::max(best, key(f));
            return best;
          } else if constexpr (std::is_same_v<T, Quotient>) {
            return std::max(key(n.numerator), key(n.denominator));
          } else {
            return key(n.body);
          }
        },
        e.node().kind);
  }

  void order_bindings(std::vector<Binding>& list) const {
    std::stable_sort(list.begin(), list.end(), [&](const Binding& a, const Binding& b) {
      return rank_of(a.vertex) > rank_of(b.vertex);
    });
  }

  void order_names(NameList& list) const {
    std::stable_sort(list.begin(), list.end(), [&](const std::string& a, const std::string& b) {
      return rank_of(a) > rank_of(b);
    });
  }

  Estimand apply(const Estimand& e) const {
    return std::visit(
        [&](const auto& n) -> Estimand {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, CondProb>) {
            auto t = n.targets;
            auto g = n.given;
            order_bindings(t);
            order_bindings(g);
            return Estimand::prob(std::move(t), std::move(g));
          } else if constexpr (std::is_same_v<T, Product>) {
            std::vector<Estimand> fs;
            for (const auto& f : n.factors) fs.push_back(apply(f));
            std::stable_sort(fs.begin(), fs.end(),
                             [&](const Estimand& a, const Estimand& b) { return key(a) > key(b); });
            return Estimand::product(std::move(fs));
          } else if constexpr (std::is_same_v<T, Sum>) {
            auto vars = n.vars;
            order_names(vars);
            return Estimand::sum(std::move(vars), apply(n.body));
          } else if constexpr (std::is_same_v<T, Quotient>) {
            return Estimand::quotient(apply(n.numerator), apply(n.denominator));
          } else {
            auto keep = n.keep;
            order_names(keep);
            return Estimand::marginal(std::move(keep), apply(n.body));
          }
        },
        e.node().kind);
  }
};

}  // namespace

Estimand canonicalize(const Estimand& e, const NameList& topological) {
  Canon c;
  for (std::size_t i = 0; i < topological.size(); ++i) c.rank[topological[i]] = static_cast<int>(i);
  return c.apply(e);
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

void collect_labels(const Estimand& e, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CondProb>) {
          for (const auto* list : {&n.targets, &n.given}) {
            for (const auto& b : *list) {
              if (!b.value.is_var()) out.insert(b.value.name);
              out.insert(b.vertex);
            }
          }
        } else if constexpr (std::is_same_v<T, Product>) {
          for (const auto& f : n.factors) collect_labels(f, out);
        } else if constexpr (std::is_same_v<T, Quotient>) {
          collect_labels(n.numerator, out);
          collect_labels(n.denominator, out);
        } else {
          collect_labels(n.body, out);
        }
      },
      e.node().kind);
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

class Printer {
 public:
  Printer(const Estimand& root, Format format) : format_(format) {
    collect_labels(root, reserved_);
    for (const auto& v : free_variables(root)) reserved_.insert(v);
  }

  std::string print(const Estimand& e) {
    return std::visit([&](const auto& n) { return print_node(n); }, e.node().kind);
  }

 private:
  bool latex() const { return format_ == Format::Latex; }

  std::string label(const std::string& s) const {
    if (!latex()) return s;
    std::string out;
    for (char c : s) out += (c == '*') ? std::string("^{*}") : std::string(1, c);
    return out;
  }

  std::string display(const std::string& var) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->first == var) return it->second;
    }
    return var;
  }

  bool bound(const std::string& var) const {
    return std::any_of(scope_.begin(), scope_.end(), [&](const auto& s) { return s.first == var; });
  }

  std::string binding(const Binding& b) const {
    const std::string eq = latex() ? "{=}" : "=";
    if (!b.value.is_var()) return b.vertex + eq + label(b.value.name);
    if (bound(b.value.name)) return b.vertex + eq + label(display(b.value.name));
    if (b.value.name == b.vertex) return b.vertex;
    return b.vertex + eq + b.value.name;
  }

  std::string print_node(const CondProb& p) {
    std::string out = "p(";
    const std::string sep = latex() ? ", " : ",";
    for (std::size_t i = 0; i < p.targets.size(); ++i) out += (i ? sep : "") + binding(p.targets[i]);
    if (!p.given.empty()) {
      out += latex() ? " \\mid " : "|";
      for (std::size_t i = 0; i < p.given.size(); ++i) out += (i ? sep : "") + binding(p.given[i]);
    }
    return out + ")";
  }

  std::string wrap(const std::string& s) const {
    return latex() ? "\\left(" + s + "\\right)" : "(" + s + ")";
  }

  std::string print_node(const Product& p) {
    if (p.factors.empty()) return "1";
    std::string out;
    for (std::size_t i = 0; i < p.factors.size(); ++i) {
      if (i) out += latex() ? " \\, " : "·";
      const auto& f = p.factors[i];
      std::string s = print(f);
      out += (f.as<Sum>() || f.as<Quotient>() || f.as<Marginal>()) ? wrap(s) : s;
    }
    return out;
  }

  std::string print_node(const Sum& s) {
    NameList names;
    for (const auto& v : s.vars) {
      std::string name = lower(v);
      auto taken = [&](const std::string& n) {
        if (reserved_.count(n)) return true;
        for (const auto& [var, disp] : scope_) {
          if (disp == n) return true;
        }
        return std::find(names.begin(), names.end(), n) != names.end();
      };
      while (taken(name)) name += "*";
      names.push_back(name);
    }
    std::string head;
    if (latex()) {
      head = "\\sum_{";
      for (std::size_t i = 0; i < names.size(); ++i) head += (i ? "," : "") + label(names[i]);
      head += "} ";
    } else {
      head = "Σ_";
      std::string list;
      for (std::size_t i = 0; i < names.size(); ++i) list += (i ? "," : "") + names[i];
      head += names.size() == 1 ? list : "{" + list + "}";
      head += " ";
    }
    for (std::size_t i = 0; i < s.vars.size(); ++i) scope_.emplace_back(s.vars[i], names[i]);
    std::string body = print(s.body);
    scope_.resize(scope_.size() - s.vars.size());
    return head + body;
  }

  std::string print_node(const Quotient& q) {
    std::string num = print(q.numerator);
    std::string den = print(q.denominator);
    if (latex()) return "\\frac{" + num + "}{" + den + "}";
    auto side = [&](const Estimand& e, const std::string& s) {
      return e.as<CondProb>() ? s : "(" + s + ")";
    };
    return side(q.numerator, num) + "/" + side(q.denominator, den);
  }

  std::string print_node(const Marginal& m) {
    std::string keep;
    for (std::size_t i = 0; i < m.keep.size(); ++i) keep += (i ? "," : "") + m.keep[i];
    return (latex() ? "\\mathrm{marg}_{" + keep + "}" : "marg_{" + keep + "} ") + wrap(print(m.body));
  }

  Format format_;
  std::set<std::string> reserved_;
  std::vector<std::pair<std::string, std::string>> scope_;
};

std::string structured_binding(const Binding& b) {
  if (b.value.is_var()) return b.vertex + "=$" + b.value.name;
  return b.vertex + "=" + b.value.name + ":" + std::to_string(b.value.state);
}

void structured(const Estimand& e, int depth, std::ostringstream& out) {
  out << std::string(static_cast<std::size_t>(depth) * 2, ' ');
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CondProb>) {
          out << "p";
          for (const auto& b : n.targets) out << " " << structured_binding(b);
          if (!n.given.empty()) {
            out << " |";
            for (const auto& b : n.given) out << " " << structured_binding(b);
          }
          out << "\n";
        } else if constexpr (std::is_same_v<T, Product>) {
          out << "prod\n";
          for (const auto& f : n.factors) structured(f, depth + 1, out);
        } else if constexpr (std::is_same_v<T, Sum>) {
          out << "sum";
          for (const auto& v : n.vars) out << " " << v;
          out << "\n";
          structured(n.body, depth + 1, out);
        } else if constexpr (std::is_same_v<T, Quotient>) {
          out << "quot\n";
          structured(n.numerator, depth + 1, out);
          structured(n.denominator, depth + 1, out);
        } else {
          out << "marg";
          for (const auto& v : n.keep) out << " " << v;
          out << "\n";
          structured(n.body, depth + 1, out);
        }
      },
      e.node().kind);
}

}  // namespace

std::string render(const Estimand& e, Format format) {
  if (format == Format::Structured) {
    std::ostringstream out;
    out << "pathid-estimand 1\n";
    structured(e, 0, out);
    return out.str();
  }
  Printer printer(e, format);
  return printer.print(e);
}

// ---------------------------------------------------------------------------
// Structured parser

namespace {

struct Line {
  int number;
  int depth;
  std::vector<std::string> tokens;
};

Binding parse_binding(const std::string& token, int line) {
  auto eq = token.find('=');
  if (eq == std::string::npos || eq == 0) throw ParseError("<estimand>", line, "bad binding '" + token + "'");
  std::string vertex = token.substr(0, eq);
  std::string value = token.substr(eq + 1);
  if (!value.empty() && value[0] == '$') return Binding{vertex, Value::var(value.substr(1))};
  auto colon = value.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw ParseError("<estimand>", line, "bad value '" + value + "'");
  }
  try {
    std::size_t used = 0;
    int state = std::stoi(value.substr(colon + 1), &used);
    if (used != value.size() - colon - 1) throw std::invalid_argument("trailing");
    return Binding{vertex, Value::constant(value.substr(0, colon), state)};
  } catch (const std::exception&) {
    throw ParseError("<estimand>", line, "bad state in '" + value + "'");
  }
}

class StructuredParser {
 public:
  explicit StructuredParser(std::vector<Line> lines) : lines_(std::move(lines)) {}

  Estimand parse_root() {
    if (lines_.empty()) throw ParseError("<estimand>", 1, "empty estimand");
    Estimand e = parse(0);
    if (pos_ != lines_.size()) throw ParseError("<estimand>", lines_[pos_].number, "trailing content");
    return e;
  }

 private:
  Estimand parse(int depth) {
    if (pos_ >= lines_.size()) throw ParseError("<estimand>", 0, "unexpected end of estimand");
    const Line& line = lines_[pos_++];
    if (line.depth != depth) throw ParseError("<estimand>", line.number, "bad indentation");
    const auto& kw = line.tokens[0];
    NameList rest(line.tokens.begin() + 1, line.tokens.end());
    if (kw == "p") {
      std::vector<Binding> targets;
      std::vector<Binding> given;
      bool after_bar = false;
      for (const auto& t : rest) {
        if (t == "|") {
          after_bar = true;
          continue;
        }
        (after_bar ? given : targets).push_back(parse_binding(t, line.number));
      }
      return Estimand::prob(std::move(targets), std::move(given));
    }
    if (kw == "prod") {
      std::vector<Estimand> fs;
      while (pos_ < lines_.size() && lines_[pos_].depth == depth + 1) fs.push_back(parse(depth + 1));
      return Estimand::product(std::move(fs));
    }
    if (kw == "sum") return Estimand::sum(rest, parse(depth + 1));
    if (kw == "marg") return Estimand::marginal(rest, parse(depth + 1));
    if (kw == "quot") {
      Estimand num = parse(depth + 1);
      Estimand den = parse(depth + 1);
      return Estimand::quotient(num, den);
    }
    throw ParseError("<estimand>", line.number, "unknown node '" + kw + "'");
  }

  std::vector<Line> lines_;
  std::size_t pos_ = 0;
};

}  // namespace

Estimand parse_structured(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  bool header = false;
  std::vector<Line> lines;
  while (std::getline(in, raw)) {
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.find_first_not_of(' ') == std::string::npos) continue;
    if (!header) {
      if (raw != "pathid-estimand 1") throw ParseError("<estimand>", number, "missing header");
      header = true;
      continue;
    }
    auto indent = raw.find_first_not_of(' ');
    if (indent % 2) throw ParseError("<estimand>", number, "odd indentation");
    std::istringstream words(raw.substr(indent));
    Line line{number, static_cast<int>(indent / 2), {}};
    std::string w;
    while (words >> w) line.tokens.push_back(w);
    lines.push_back(std::move(line));
  }
  if (!header) throw ParseError("<estimand>", number, "missing header");
  return StructuredParser(std::move(lines)).parse_root();
}

}  // namespace pathid
