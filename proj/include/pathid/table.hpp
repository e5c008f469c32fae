#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pathid/errors.hpp"
#include "pathid/rational.hpp"

namespace pathid {

struct Variable {
  std::string name;
  int cardinality = 2;
  friend bool operator==(const Variable&, const Variable&) = default;
};

// Dense table over finite variables, first variable most significant.
template <class Scalar>
class Table {
 public:
  Table() : values_(1, Scalar(0)) {}
  explicit Table(std::vector<Variable> variables) : variables_(std::move(variables)) {
    values_.assign(compute_size(), Scalar(0));
  }
  Table(std::vector<Variable> variables, std::vector<Scalar> values)
      : variables_(std::move(variables)), values_(std::move(values)) {
    if (values_.size() != compute_size()) throw Error("table size does not match its variables");
  }

  const std::vector<Variable>& variables() const { return variables_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<Scalar>& values() const { return values_; }

  std::optional<int> find(std::string_view name) const {
    for (std::size_t i = 0; i < variables_.size(); ++i) {
      if (variables_[i].name == name) return static_cast<int>(i);
    }
    return std::nullopt;
  }
  int index_of(std::string_view name) const {
    auto i = find(name);
    if (!i) throw MissingVariable(std::string(name));
    return *i;
  }

  std::size_t flat_index(const std::vector<int>& states) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < variables_.size(); ++i) {
      idx = idx * variables_[i].cardinality + states[i];
    }
    return idx;
  }
  std::vector<int> states_of(std::size_t flat) const {
    std::vector<int> states(variables_.size());
    for (std::size_t i = variables_.size(); i-- > 0;) {
      states[i] = static_cast<int>(flat % variables_[i].cardinality);
      flat /= variables_[i].cardinality;
    }
    return states;
  }

  Scalar& at(std::size_t flat) { return values_[flat]; }
  const Scalar& at(std::size_t flat) const { return values_[flat]; }
  Scalar& operator()(const std::vector<int>& states) { return values_[flat_index(states)]; }
  const Scalar& operator()(const std::vector<int>& states) const {
    return values_[flat_index(states)];
  }

  Scalar total() const {
    Scalar sum(0);
    for (const auto& v : values_) sum += v;
    return sum;
  }

  // Marginal over `keep`, in the given order.
  Table marginal(const std::vector<std::string>& keep) const {
    std::vector<Variable> vars;
    std::vector<int> cols;
    for (const auto& k : keep) {
      cols.push_back(index_of(k));
      vars.push_back(variables_[cols.back()]);
    }
    Table out(vars);
    std::vector<int> sub(cols.size());
    for (std::size_t f = 0; f < values_.size(); ++f) {
      auto states = states_of(f);
      for (std::size_t i = 0; i < cols.size(); ++i) sub[i] = states[cols[i]];
      out(sub) += values_[f];
    }
    return out;
  }

  friend bool operator==(const Table&, const Table&) = default;

 private:
  std::size_t compute_size() const {
    std::size_t n = 1;
    for (const auto& v : variables_) {
      if (v.cardinality < 1) throw Error("variable '" + v.name + "' has no states");
      n *= static_cast<std::size_t>(v.cardinality);
    }
    return n;
  }

  std::vector<Variable> variables_;
  std::vector<Scalar> values_;
};

using JointTable = Table<Rational>;

Table<double> to_double(const JointTable& t);

// Nonnegative entries summing to one (exactly).
bool is_distribution(const JointTable& t);

// Conditional of `target` given `given` states; throws ZeroConditioning.
Rational conditional(const JointTable& t, const std::vector<std::pair<std::string, int>>& target,
                     const std::vector<std::pair<std::string, int>>& given);

}  // namespace pathid
