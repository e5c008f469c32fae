#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pathid/identify.hpp"
#include "pathid/io.hpp"
#include "pathid/npsem.hpp"

namespace pathid {

// Exit codes of the command-line tool.
enum ExitCode : int {
  kIdentified = 0,
  kInputError = 1,
  kNotIdentified = 2,
  kMismatch = 3,
};

// Expanded graph whose component vertices are named by a separable query.
ExpandedGraph separable_expansion(const HiddenDag& g, const std::vector<SeparableComponent>& components);

// Identification for any non-bounds query kind.
IdResult identify_query(const HiddenDag& g, const QueryFile& q);

// Free variables of the answer to q, in table order.
NameList answer_variables(const QueryFile& q);

// Oracle law of the answer variables; conditional queries are normalized
// within each conditioning stratum (empty strata stay zero).
JointTable oracle_answer(const DiscreteNpsem& m, const QueryFile& q, bool cross_world_opt_in = false);

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pathid
