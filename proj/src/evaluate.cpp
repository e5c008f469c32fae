#include <algorithm>
#include <unordered_map>

#include "pathid/errors.hpp"
#include "pathid/estimand.hpp"

namespace pathid {

namespace {

// Estimand compiled against one table: variables become environment slots,
// vertices become table columns.
template <class Scalar>
class Compiled {
 public:
  Compiled(const Estimand& e, const Table<Scalar>& t, const NameList& free_order)
      : table_(t) {
    for (const auto& v : free_order) {
      int col = t.index_of(v);
      scope_.emplace_back(v, slot_count_);
      slot_cards_.push_back(t.variables()[col].cardinality);
      ++slot_count_;
    }
    root_ = compile(e);
  }

  int slots() const { return slot_count_; }

  Scalar run(std::vector<int>& env) { return eval(root_, env); }

 private:
  enum class Kind { Prob, Product, Sum, Quotient };

  struct Ref {
    int column;
    int slot;   // -1 for a constant
    int state;  // constant state
  };

  struct CNode {
    Kind kind;
    std::vector<Ref> targets;
    std::vector<Ref> given;
    std::vector<int> children;
    std::vector<int> sum_slots;
    std::vector<int> sum_cards;
  };

  int lookup(const std::string& var) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->first == var) return it->second;
    }
    throw MissingVariable(var);
  }

  Ref make_ref(const Binding& b) {
    int col = table_.index_of(b.vertex);
    int card = table_.variables()[col].cardinality;
    if (b.value.is_var()) {
      int slot = lookup(b.value.name);
      if (slot_cards_[slot] != card) {
        throw Error("variable '" + b.value.name + "' ranges over a different state space than '" +
                    b.vertex + "'");
      }
      return Ref{col, slot, 0};
    }
    if (b.value.state < 0 || b.value.state >= card) {
      throw OutOfRange("state " + std::to_string(b.value.state) + " of '" + b.vertex +
                       "' is out of range");
    }
    return Ref{col, -1, b.value.state};
  }

  int compile(const Estimand& e) {
    return std::visit(
        [&](const auto& n) -> int {
          using T = std::decay_t<decltype(n)>;
          CNode node;
          if constexpr (std::is_same_v<T, CondProb>) {
            node.kind = Kind::Prob;
            for (const auto& b : n.targets) node.targets.push_back(make_ref(b));
            for (const auto& b : n.given) node.given.push_back(make_ref(b));
          } else if constexpr (std::is_same_v<T, Product>) {
            node.kind = Kind::Product;
            for (const auto& f : n.factors) node.children.push_back(compile(f));
          } else if constexpr (std::is_same_v<T, Sum>) {
            return compile_sum(n.vars, n.body);
          } else if constexpr (std::is_same_v<T, Quotient>) {
            node.kind = Kind::Quotient;
            node.children.push_back(compile(n.numerator));
            node.children.push_back(compile(n.denominator));
          } else {
            NameList vars;
            auto fv = free_variables(n.body);
            for (const auto& v : fv) {
              if (std::find(n.keep.begin(), n.keep.end(), v) == n.keep.end()) vars.push_back(v);
            }
            return compile_sum(vars, n.body);
          }
          nodes_.push_back(std::move(node));
          return static_cast<int>(nodes_.size()) - 1;
        },
        e.node().kind);
  }

  int compile_sum(const NameList& vars, const Estimand& body) {
    CNode node;
    node.kind = Kind::Sum;
    for (const auto& v : vars) {
      int col = table_.index_of(v);
      node.sum_slots.push_back(slot_count_);
      node.sum_cards.push_back(table_.variables()[col].cardinality);
      slot_cards_.push_back(table_.variables()[col].cardinality);
      scope_.emplace_back(v, slot_count_++);
    }
    node.children.push_back(compile(body));
    scope_.resize(scope_.size() - vars.size());
    nodes_.push_back(std::move(node));
    return static_cast<int>(nodes_.size()) - 1;
  }

  // Probability of an event given as (column, state) pairs; nullopt marks
  // an impossible event (one column asked to take two states).
  Scalar event_probability(std::vector<std::pair<int, int>>& event) {
    std::sort(event.begin(), event.end());
    std::uint64_t mask = 0;
    std::size_t w = 0;
    for (std::size_t r = 0; r < event.size(); ++r) {
      if (w > 0 && event[w - 1].first == event[r].first) {
        if (event[w - 1].second != event[r].second) return Scalar(0);
        continue;
      }
      event[w++] = event[r];
      mask |= std::uint64_t{1} << event[r].first;
    }
    event.resize(w);
    const auto& marg = marginal(mask);
    std::size_t idx = 0;
    for (const auto& [col, state] : event) {
      idx = idx * static_cast<std::size_t>(table_.variables()[col].cardinality) +
            static_cast<std::size_t>(state);
    }
    return marg[idx];
  }

  const std::vector<Scalar>& marginal(std::uint64_t mask) {
    auto it = cache_.find(mask);
    if (it != cache_.end()) return it->second;
    std::vector<int> cols;
    std::size_t size = 1;
    for (int c = 0; c < static_cast<int>(table_.variables().size()); ++c) {
      if ((mask >> c) & 1U) {
        cols.push_back(c);
        size *= static_cast<std::size_t>(table_.variables()[c].cardinality);
      }
    }
    std::vector<Scalar> out(size, Scalar(0));
    for (std::size_t f = 0; f < table_.size(); ++f) {
      auto states = table_.states_of(f);
      std::size_t idx = 0;
      for (int c : cols) {
        idx = idx * static_cast<std::size_t>(table_.variables()[c].cardinality) +
              static_cast<std::size_t>(states[c]);
      }
      out[idx] += table_.at(f);
    }
    return cache_.emplace(mask, std::move(out)).first->second;
  }

  Scalar eval(int id, std::vector<int>& env) {
    const CNode& n = nodes_[id];
    switch (n.kind) {
      case Kind::Prob: {
        std::vector<std::pair<int, int>> given;
        for (const auto& r : n.given) given.emplace_back(r.column, r.slot < 0 ? r.state : env[r.slot]);
        std::vector<std::pair<int, int>> joint = given;
        for (const auto& r : n.targets) {
          joint.emplace_back(r.column, r.slot < 0 ? r.state : env[r.slot]);
        }
        Scalar num = event_probability(joint);
        if (n.given.empty()) return num;
        Scalar den = event_probability(given);
        if (den == 0) throw ZeroConditioning();
        return num / den;
      }
      case Kind::Product: {
        Scalar acc(1);
        bool pending = false;
        for (int c : n.children) {
          try {
            Scalar v = eval(c, env);
            if (v == 0) return Scalar(0);
            acc *= v;
          } catch (const ZeroConditioning&) {
            pending = true;
          }
        }
        if (pending) throw ZeroConditioning();
        return acc;
      }
      case Kind::Sum: {
        Scalar acc(0);
        const std::size_t k = n.sum_slots.size();
        for (std::size_t i = 0; i < k; ++i) env[n.sum_slots[i]] = 0;
        while (true) {
          acc += eval(n.children[0], env);
          std::size_t i = k;
          while (i > 0) {
            --i;
            if (++env[n.sum_slots[i]] < n.sum_cards[i]) break;
            env[n.sum_slots[i]] = 0;
            if (i == 0) return acc;
          }
          if (k == 0) return acc;
        }
      }
      case Kind::Quotient: {
        Scalar num = eval(n.children[0], env);
        Scalar den = eval(n.children[1], env);
        if (den == 0) throw ZeroConditioning();
        return num / den;
      }
    }
    return Scalar(0);
  }

  const Table<Scalar>& table_;
  std::vector<CNode> nodes_;
  std::vector<std::pair<std::string, int>> scope_;
  std::vector<int> slot_cards_;
  int slot_count_ = 0;
  int root_ = 0;
  std::unordered_map<std::uint64_t, std::vector<Scalar>> cache_;
};

}  // namespace

template <class Scalar>
Scalar evaluate(const Estimand& e, const Table<Scalar>& t, const std::map<std::string, int>& free_values) {
  NameList order;
  for (const auto& [name, state] : free_values) order.push_back(name);
  Compiled<Scalar> c(e, t, order);
  std::vector<int> env(static_cast<std::size_t>(c.slots()), 0);
  int i = 0;
  for (const auto& [name, state] : free_values) env[i++] = state;
  return c.run(env);
}

template <class Scalar>
Table<Scalar> evaluate_table(const Estimand& e, const Table<Scalar>& t, const NameList& free_order) {
  Compiled<Scalar> c(e, t, free_order);
  std::vector<Variable> vars;
  for (const auto& v : free_order) vars.push_back(t.variables()[t.index_of(v)]);
  Table<Scalar> out(vars);
  std::vector<int> env(static_cast<std::size_t>(c.slots()), 0);
  for (std::size_t f = 0; f < out.size(); ++f) {
    auto states = out.states_of(f);
    std::copy(states.begin(), states.end(), env.begin());
    out.at(f) = c.run(env);
  }
  return out;
}

template Rational evaluate<Rational>(const Estimand&, const Table<Rational>&,
                                     const std::map<std::string, int>&);
template double evaluate<double>(const Estimand&, const Table<double>&,
                                 const std::map<std::string, int>&);
template Table<Rational> evaluate_table<Rational>(const Estimand&, const Table<Rational>&,
                                                  const NameList&);
template Table<double> evaluate_table<double>(const Estimand&, const Table<double>&, const NameList&);

}  // namespace pathid
