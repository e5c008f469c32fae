#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pathid/cli.hpp"
#include "pathid/fixtures.hpp"

using namespace pathid;
namespace fs = std::filesystem;

namespace {

class Workspace {
 public:
  Workspace() : dir_(fs::temp_directory_path() / ("pathid_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(dir_);
  }
  ~Workspace() { fs::remove_all(dir_); }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  std::string write(const std::string& name, const std::string& text) const {
    fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

 private:
  fs::path dir_;
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

const char* kPdeQuery =
    "pathid-query 1\nkind: path_specific\noutcome: Y\ntreatment: A active=a:1 baseline=a':0\npath: A -> Y\n";

}  // namespace

TEST_CASE("identify exit codes") {
  Workspace ws;
  std::string triangle = ws.write("t.graph", serialize_graph(fixture_graph("amyno_a")));
  std::string confounded = ws.write("c.graph", serialize_graph(fixture_graph("amyl_b")));
  std::string query = ws.write("q.query", kPdeQuery);

  Run ok = run({"identify", triangle, query});
  CHECK(ok.code == kIdentified);
  CHECK(ok.out == "Σ_m p(Y|M=m,A=a)·p(M=m|A=a')\n");

  Run no = run({"identify", confounded, query});
  CHECK(no.code == kNotIdentified);
  CHECK(no.out.rfind("not identified: recanting district", 0) == 0);

  CHECK(run({"identify", ws.write("bad.graph", "vars: A\nedges:\n  A -> A\n"), query}).code == kInputError);
  CHECK(run({"identify", triangle, ws.write("bad.query", "nonsense\n")}).code == kInputError);
  CHECK(run({"identify", triangle}).code == kInputError);
  CHECK(run({"frobnicate"}).code == kInputError);
  Run missing = run({"identify", "/nonexistent/graph", query});
  CHECK(missing.code == kInputError);
  CHECK(missing.err.find("cannot open") != std::string::npos);

  Run structured = run({"identify", triangle, query, "--format", "structured"});
  CHECK(structured.out.rfind("pathid-estimand 1\n", 0) == 0);
}

TEST_CASE("eval compares estimand and oracle") {
  Workspace ws;
  std::mt19937_64 rng(50);
  std::string model = ws.write("m.model", serialize_model(random_npsem(fixture_graph("amyno_a"), rng)));
  std::string query = ws.write("q.query", kPdeQuery);
  Run exact = run({"eval", model, query});
  CHECK(exact.code == kIdentified);
  CHECK(exact.out.find("result: match") != std::string::npos);
  CHECK(run({"eval", model, query, "--float"}).code == kIdentified);
  CHECK(run({"eval", model, query, "--oracle-only"}).code == kIdentified);

  std::string river = ws.write("r.model", serialize_model(river_blindness(RiverBlindnessParams::generic())));
  CHECK(run({"eval", river, query}).code == kNotIdentified);
  CHECK(run({"eval", river, query, "--oracle-only"}).code == kIdentified);
}

TEST_CASE("bounds, swig and export") {
  Workspace ws;
  std::string table = ws.write("t.table", serialize_table(observed_law(river_blindness(RiverBlindnessParams::generic()))));
  Run b = run({"bounds", table});
  CHECK(b.code == kIdentified);
  CHECK(b.out.find("lower: ") != std::string::npos);
  CHECK(run({"bounds", table, "--mediator", "Q"}).code == kInputError);

  std::string graph = ws.write("g.graph", serialize_graph(fixture_graph("amyl_a")));
  Run s = run({"swig", graph, "--intervene", "A=a"});
  CHECK(s.code == kIdentified);
  CHECK(s.out.find("a -> Y(a)") != std::string::npos);
  CHECK(run({"swig", graph, "--intervene", "A"}).code == kInputError);

  CHECK(run({"export", "graph", "amyno_a"}).out == serialize_graph(fixture_graph("amyno_a")));
  CHECK(run({"export", "graph", "missing"}).code == kInputError);
  Run a = run({"export", "model", "amyno_a", "--seed", "3"});
  CHECK(a.out == run({"export", "model", "amyno_a", "--seed", "3"}).out);
}
