#include "pathid/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "pathid/errors.hpp"
#include "pathid/fixtures.hpp"
#include "pathid/harness.hpp"
#include "pathid/mediation.hpp"
#include "pathid/swig.hpp"

namespace pathid {

ExpandedGraph separable_expansion(const HiddenDag& g, const std::vector<SeparableComponent>& components) {
  const Admg& base = g.base;
  ExpandedGraph ex;
  ex.graph = base;
  ex.hidden = g.hidden;
  for (const auto& c : components) {
    int t = base.index(c.treatment);
    int v = base.index(c.vertex);
    if (!base.has_directed(t, v)) {
      throw InvalidQuery("component '" + c.vertex + "' is not a child of '" + c.treatment + "'");
    }
    if (ex.origin.count(c.vertex)) throw InvalidQuery("component '" + c.vertex + "' listed twice");
    ex.origin[c.vertex] = Component{c.treatment, base.names(base.children(v))};
  }
  return ex;
}

IdResult identify_query(const HiddenDag& g, const QueryFile& q) {
  switch (q.kind) {
    case QueryKind::Interventional: {
      Intervention x;
      for (const auto& [name, values] : q.treatments) x[name] = values.active;
      for (const auto& name : q.outcome) g.base.index(name);
      return id(latent_project(g), x, q.outcome);
    }
    case QueryKind::PathSpecific:
    case QueryKind::ConditionalPathSpecific:
      if (q.kind == QueryKind::PathSpecific && !q.given.empty()) {
        throw InvalidQuery("a path_specific query has no 'given'; use conditional_path_specific");
      }
      return id_path_specific(g, q.pse());
    case QueryKind::Separable: {
      std::map<std::string, ValueLabel> values;
      for (const auto& c : q.components) values[c.vertex] = c.value;
      return separable_query(separable_expansion(g, q.components), values, q.outcome);
    }
    case QueryKind::Bounds:
      throw InvalidQuery("bounds queries are answered by the 'bounds' command");
  }
  throw InvalidQuery("unsupported query kind");
}

NameList answer_variables(const QueryFile& q) {
  NameList vars = q.outcome;
  if (q.kind == QueryKind::ConditionalPathSpecific) vars.insert(vars.end(), q.given.begin(), q.given.end());
  return vars;
}

JointTable oracle_answer(const DiscreteNpsem& m, const QueryFile& q, bool cross_world_opt_in) {
  switch (q.kind) {
    case QueryKind::Interventional: {
      std::map<std::string, int> x;
      for (const auto& [name, values] : q.treatments) x[name] = values.active.state;
      return intervene(m, x, q.outcome);
    }
    case QueryKind::PathSpecific:
      return pse_counterfactual(m, q.pse(), PseOptions{cross_world_opt_in}).marginal(q.outcome);
    case QueryKind::ConditionalPathSpecific: {
      // Given variables are last, so they index the strata by the low digits.
      JointTable joint =
          pse_counterfactual(m, q.pse(), PseOptions{cross_world_opt_in}).marginal(answer_variables(q));
      JointTable strata = joint.marginal(q.given);
      for (std::size_t f = 0; f < joint.size(); ++f) {
        const Rational& mass = strata.at(f % strata.size());
        if (mass != 0) joint.at(f) /= mass;
      }
      return joint;
    }
    case QueryKind::Separable: {
      std::map<std::string, int> x;
      for (const auto& c : q.components) x[c.vertex] = c.value.state;
      return intervene(m, x, q.outcome);
    }
    case QueryKind::Bounds:
      break;
  }
  throw InvalidQuery("bounds queries are answered by the 'bounds' command");
}

namespace {

std::string decimal(double v) {
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

std::string show(const Rational& r) { return to_string(r) + " (" + decimal(r.get_d()) + ")"; }

void print_certificate(const NonIdentified& n, std::ostream& out) {
  out << "not identified: " << n.describe() << '\n';
}

std::string state_label(const std::vector<Variable>& vars, const std::vector<int>& states) {
  std::string s;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    s += (i ? "," : "") + vars[i].name + "=" + std::to_string(states[i]);
  }
  return s;
}

Rational mean_of_single(const JointTable& t) {
  Rational total = 0;
  for (std::size_t f = 0; f < t.size(); ++f) total += t.states_of(f)[0] * t.at(f);
  return total;
}

struct EvalOptions {
  std::string model_file;
  std::string query_file;
  bool oracle_only = false;
  bool use_double = false;
  double tolerance = 1e-9;
  bool cross_world = false;
};

int cmd_eval(const EvalOptions& o, std::ostream& out) {
  DiscreteNpsem m = parse_model(read_file(o.model_file), o.model_file);
  QueryFile q = parse_query(read_file(o.query_file), o.query_file);
  JointTable oracle = oracle_answer(m, q, o.cross_world);
  const auto& vars = oracle.variables();

  if (o.oracle_only) {
    out << "oracle:\n";
    for (std::size_t f = 0; f < oracle.size(); ++f) {
      out << "  " << state_label(vars, oracle.states_of(f)) << "  " << show(oracle.at(f)) << '\n';
    }
    bool single = q.outcome.size() == 1 && q.treatments.size() == 1 &&
                  (q.kind == QueryKind::PathSpecific || q.kind == QueryKind::Interventional);
    if (single && q.kind == QueryKind::PathSpecific) {
      const auto& [treatment, values] = q.treatments.front();
      Rational mean = mean_of_single(oracle);
      Rational base = mean_of_single(intervene(m, {{treatment, values.baseline.state}}, q.outcome));
      out << "mean: " << show(mean) << '\n';
      out << "baseline mean: " << show(base) << '\n';
      out << "effect: " << show(mean - base) << '\n';
      if (!q.mediator.empty()) {
        JointTable law = observed_law(m);
        Rational mf = mediation_formula(law, values.active.state, values.baseline.state,
                                        {treatment, q.mediator, q.outcome.front()});
        out << "mediation formula: " << show(mf) << '\n';
        out << "effect minus mediation formula: " << show(mean - base - mf) << '\n';
      }
    }
    return kIdentified;
  }

  IdResult r = identify_query(m.graph(), q);
  if (!r.identified()) {
    print_certificate(r.certificate(), out);
    return kNotIdentified;
  }
  out << "estimand: " << render(r.estimand(), Format::Text) << '\n';
  JointTable law = observed_law(m);
  NameList free = answer_variables(q);

  bool match = true;
  out << "values (estimand, oracle, difference):\n";
  if (o.use_double) {
    Table<double> est = evaluate_table(r.estimand(), to_double(law), free);
    double worst = 0;
    for (std::size_t f = 0; f < est.size(); ++f) {
      double diff = est.at(f) - oracle.at(f).get_d();
      worst = std::max(worst, std::abs(diff));
      out << "  " << state_label(vars, est.states_of(f)) << "  " << decimal(est.at(f)) << "  "
          << decimal(oracle.at(f).get_d()) << "  " << decimal(diff) << '\n';
    }
    match = worst <= o.tolerance;
    out << "max abs difference: " << decimal(worst) << '\n';
  } else {
    JointTable est = evaluate_table(r.estimand(), law, free);
    for (std::size_t f = 0; f < est.size(); ++f) {
      Rational diff = est.at(f) - oracle.at(f);
      if (diff != 0) match = false;
      out << "  " << state_label(vars, est.states_of(f)) << "  " << to_string(est.at(f)) << "  "
          << to_string(oracle.at(f)) << "  " << to_string(diff) << '\n';
    }
  }
  out << (match ? "result: match\n" : "result: MISMATCH\n");
  return match ? kIdentified : kMismatch;
}

int cmd_identify(const std::string& graph_file, const std::string& query_file,
                 const std::string& format_flag, std::ostream& out) {
  HiddenDag g = parse_graph(read_file(graph_file), graph_file);
  QueryFile q = parse_query(read_file(query_file), query_file);
  Format format = q.format;
  if (format_flag == "text") format = Format::Text;
  if (format_flag == "latex") format = Format::Latex;
  if (format_flag == "structured") format = Format::Structured;
  IdResult r = identify_query(g, q);
  if (!r.identified()) {
    print_certificate(r.certificate(), out);
    return kNotIdentified;
  }
  std::string text = render(r.estimand(), format);
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
  return kIdentified;
}

int cmd_bounds(const std::string& table_file, int active, int baseline, const MediationVars& vars,
               std::ostream& out) {
  JointTable t = parse_table(read_file(table_file), table_file);
  PdeBounds b = pde_bounds(t, active, baseline, vars);
  out << "l0: " << show(b.l0) << '\n';
  out << "u0: " << show(b.u0) << '\n';
  out << "l1: " << show(b.l1) << '\n';
  out << "u1: " << show(b.u1) << '\n';
  out << "lower: " << show(b.lower) << '\n';
  out << "upper: " << show(b.upper) << '\n';
  return kIdentified;
}

int cmd_swig(const std::string& graph_file, const std::vector<std::string>& assignments,
             std::ostream& out) {
  HiddenDag g = parse_graph(read_file(graph_file), graph_file);
  std::map<std::string, std::string> x;
  for (const auto& a : assignments) {
    auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == a.size()) {
      throw InvalidQuery("interventions are written VERTEX=label");
    }
    x[a.substr(0, eq)] = a.substr(eq + 1);
  }
  out << render_swig(construct_swig(latent_project(g), x));
  return kIdentified;
}

int cmd_export(const std::string& what, const std::string& name, const std::string& epsilon,
               std::uint64_t seed, std::ostream& out) {
  if (what == "graph") {
    out << serialize_graph(fixture_graph(name));
  } else if (what == "model" && name == "river_blindness") {
    auto params = RiverBlindnessParams::generic();
    if (!epsilon.empty()) params = perturb(params, parse_rational(epsilon));
    out << serialize_model(river_blindness(params));
  } else if (what == "model") {
    std::mt19937_64 rng(seed);
    out << serialize_model(random_npsem(fixture_graph(name), rng));
  } else if (what == "law") {
    out << serialize_table(observed_law(parse_model(read_file(name), name)));
  } else if (what == "list") {
    for (const auto& f : fixture_graphs()) out << f.name << "  " << f.description << '\n';
  } else {
    throw InvalidQuery("export takes graph, model, law or list");
  }
  return kIdentified;
}

int cmd_reproduce(const HarnessConfig& config, const std::string& report, const std::string& results,
                  std::ostream& out) {
  auto checks = run_acceptance(config, &out);
  if (!report.empty()) std::ofstream(report) << markdown_report(checks);
  if (!results.empty()) std::ofstream(results) << json_report(checks);
  bool ok = std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  return ok ? kIdentified : kMismatch;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Identification and oracle checks for path-specific causal effects", "pathid"};
  app.require_subcommand(1);

  std::string graph_file, query_file, model_file, table_file, format_flag;
  auto* identify_cmd = app.add_subcommand("identify", "identify a query on a graph");
  identify_cmd->add_option("graph", graph_file, "graph file")->required();
  identify_cmd->add_option("query", query_file, "query file")->required();
  identify_cmd->add_option("--format", format_flag, "text, latex or structured")
      ->check(CLI::IsMember({"text", "latex", "structured"}));

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "compare an estimand with the model's oracle");
  eval_cmd->add_option("model", eval.model_file, "model file")->required();
  eval_cmd->add_option("query", eval.query_file, "query file")->required();
  eval_cmd->add_flag("--oracle-only", eval.oracle_only, "skip identification");
  eval_cmd->add_flag("--float", eval.use_double, "evaluate in floating point");
  eval_cmd->add_option("--tolerance", eval.tolerance, "floating-point tolerance");
  eval_cmd->add_flag("--cross-world", eval.cross_world,
                     "allow cross-world evaluation on joint-mode models");

  int active = 1, baseline = 0;
  MediationVars vars;
  auto* bounds_cmd = app.add_subcommand("bounds", "sharp bounds on the pure direct effect");
  bounds_cmd->add_option("table", table_file, "joint table file")->required();
  bounds_cmd->add_option("--active", active, "active treatment state");
  bounds_cmd->add_option("--baseline", baseline, "baseline treatment state");
  bounds_cmd->add_option("--treatment", vars.treatment);
  bounds_cmd->add_option("--mediator", vars.mediator);
  bounds_cmd->add_option("--outcome", vars.outcome);

  std::vector<std::string> assignments;
  auto* swig_cmd = app.add_subcommand("swig", "print the single world intervention graph");
  swig_cmd->add_option("graph", graph_file, "graph file")->required();
  swig_cmd->add_option("--intervene", assignments, "VERTEX=label")->required();

  std::string what, name, epsilon;
  std::uint64_t seed = 1;
  auto* export_cmd = app.add_subcommand("export", "print built-in fixtures in file form");
  export_cmd->add_option("what", what, "graph, model, law or list")->required();
  export_cmd->add_option("name", name, "fixture name, or a model file for 'law'");
  export_cmd->add_option("--epsilon", epsilon, "River Blindness perturbation");
  export_cmd->add_option("--seed", seed, "seed for random models");

  HarnessConfig config;
  std::string report, results;
  auto* reproduce_cmd = app.add_subcommand("reproduce", "run every acceptance check");
  reproduce_cmd->add_option("--data", config.data_dir, "data directory");
  reproduce_cmd->add_option("--report", report, "markdown report path");
  reproduce_cmd->add_option("--results", results, "JSON results path");
  reproduce_cmd->add_option("--seed", config.seed, "random seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (*identify_cmd) return cmd_identify(graph_file, query_file, format_flag, out);
    if (*eval_cmd) return cmd_eval(eval, out);
    if (*bounds_cmd) return cmd_bounds(table_file, active, baseline, vars, out);
    if (*swig_cmd) return cmd_swig(graph_file, assignments, out);
    if (*export_cmd) return cmd_export(what, name, epsilon, seed, out);
    if (*reproduce_cmd) return cmd_reproduce(config, report, results, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace pathid
