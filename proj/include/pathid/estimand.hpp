#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "pathid/graph.hpp"
#include "pathid/table.hpp"

namespace pathid {

// What a vertex is set to inside a probability term: either a variable
// (bound by an enclosing Sum, or free) or a labeled constant state.
struct Value {
  enum class Kind { Var, Const };
  Kind kind = Kind::Var;
  std::string name;  // variable name for Var, label for Const
  int state = 0;     // Const only

  static Value var(std::string name) { return Value{Kind::Var, std::move(name), 0}; }
  static Value constant(std::string label, int state) {
    return Value{Kind::Const, std::move(label), state};
  }
  bool is_var() const { return kind == Kind::Var; }
  friend bool operator==(const Value&, const Value&) = default;
};

struct Binding {
  std::string vertex;
  Value value;
  friend bool operator==(const Binding&, const Binding&) = default;
};

// Shorthand for the common "vertex ranges over its own variable" binding.
inline Binding free_binding(const std::string& vertex) { return Binding{vertex, Value::var(vertex)}; }

struct Node;

// Immutable expression handle with structural equality.
class Estimand {
 public:
  static Estimand prob(std::vector<Binding> targets, std::vector<Binding> given = {});
  static Estimand product(std::vector<Estimand> factors);
  static Estimand one() { return product({}); }
  static Estimand sum(NameList vars, Estimand body);
  static Estimand quotient(Estimand numerator, Estimand denominator);
  static Estimand marginal(NameList keep, Estimand body);

  const Node& node() const { return *node_; }
  template <class T>
  const T* as() const;
  bool is_one() const;

  friend bool operator==(const Estimand& a, const Estimand& b);

 private:
  explicit Estimand(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct CondProb {
  std::vector<Binding> targets;
  std::vector<Binding> given;
  friend bool operator==(const CondProb&, const CondProb&) = default;
};

struct Product {
  std::vector<Estimand> factors;
  friend bool operator==(const Product&, const Product&) = default;
};

struct Sum {
  NameList vars;  // bound variables, each ranging over the vertex of the same name
  Estimand body;
  friend bool operator==(const Sum&, const Sum&) = default;
};

struct Quotient {
  Estimand numerator;
  Estimand denominator;
  friend bool operator==(const Quotient&, const Quotient&) = default;
};

// Sums out every free variable of body not listed in keep.
struct Marginal {
  NameList keep;
  Estimand body;
  friend bool operator==(const Marginal&, const Marginal&) = default;
};

struct Node {
  std::variant<CondProb, Product, Sum, Quotient, Marginal> kind;
};

template <class T>
const T* Estimand::as() const {
  return std::get_if<T>(&node_->kind);
}

std::set<std::string> free_variables(const Estimand& e);

// Replaces free occurrences of variables by the given values.
Estimand substitute(const Estimand& e, const std::map<std::string, Value>& values);

Estimand simplify(const Estimand& e);

// Joins p(X|W,C)·p(W|C) into p(X,W|C) inside every product.
Estimand merge_chains(const Estimand& e);

// Orders bindings, sum variables and product factors latest-first with
// respect to the given topological order.
Estimand canonicalize(const Estimand& e, const NameList& topological);

enum class Format { Text, Latex, Structured };

std::string render(const Estimand& e, Format format);
Estimand parse_structured(const std::string& text);

template <class Scalar>
Scalar evaluate(const Estimand& e, const Table<Scalar>& t,
                const std::map<std::string, int>& free_values = {});

// Table over the listed free variables (not normalized for conditionals).
template <class Scalar>
Table<Scalar> evaluate_table(const Estimand& e, const Table<Scalar>& t, const NameList& free_order);

}  // namespace pathid
