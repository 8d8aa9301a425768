#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "canonlab/cli.hpp"

using namespace canonlab;
using nlohmann::json;

namespace {

std::filesystem::path dir() {
  const auto d = std::filesystem::temp_directory_path() / "canonlab_cli_test";
  std::filesystem::create_directories(d);
  return d;
}

std::string put(const std::string& name, const std::string& body) {
  const auto path = dir() / name;
  std::ofstream(path) << body;
  return path.string();
}

struct Result {
  int code;
  json report;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  Result r{code, nullptr, err.str()};
  if (!out.str().empty()) r.report = json::parse(out.str());
  return r;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(CANONLAB_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("lp-cb report and files") {
  const auto space = put("space.json", R"({"base_weights": [1], "fiber_cells": 2})");
  const auto elem = put("elem.json", R"({"rows": [[4, -2]]})");
  const auto out = (dir() / "base.json").string(), curve = (dir() / "curve.csv").string();
  const auto r = run({"lp-cb", "--space", space, "--element", elem, "--out", out, "--curve", curve});
  REQUIRE(r.code == 0);
  CHECK(r.report["command"][0] == "lp-cb");
  CHECK(r.report["inputs_digest"].get<std::string>().size() == 16);
  CHECK(r.report["checks"]["reconstructs_sorted_fibers"] == true);
  CHECK(r.report.contains("wall_time_s"));
  CHECK(std::filesystem::exists(out));
  std::ifstream c(curve);
  std::string header;
  std::getline(c, header);
  CHECK(header == "t,atom_0");
  // same inputs, same digest
  const auto again = run({"lp-cb", "--space", space, "--element", elem, "--out", out, "--curve", curve});
  CHECK(again.report["inputs_digest"] == r.report["inputs_digest"]);
}

TEST_CASE("typeq exit codes") {
  const auto space = put("space2.json", R"({"base_weights": [1], "fiber_cells": 2})");
  const auto a = put("a.json", R"({"rows": [[1, 2]]})");
  const auto b = put("b.json", R"({"rows": [[2, 1]]})");
  const auto c = put("c.json", R"({"rows": [[2, 2]]})");
  CHECK(run({"typeq", "--space", space, "--a", a, "--b", b}).code == kExitOk);
  const auto un = run({"typeq", "--space", space, "--a", a, "--b", c});
  CHECK(un.code == kExitUnequal);
  CHECK(un.report["outputs"]["equal"] == false);
  const auto bad = put("bad.json", R"({"rows": [[1]]})");
  const auto inv = run({"typeq", "--space", space, "--a", a, "--b", bad});
  CHECK(inv.code == kExitInvalid);
  CHECK(inv.err.find("/rows/0") != std::string::npos);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"typeq", "--bogus"}).code == kExitUsage);
}

TEST_CASE("other subcommands") {
  const auto fn = put("fn.json", R"({"lower": null, "upper": null, "breakpoints": [0], "slopes": [0, 1], "anchor": [0, 0]})");
  const auto lg = run({"legendre", "--fn", fn, "--x", "1", "--t", "1"});
  CHECK(lg.code == 0);
  CHECK(lg.report["checks"]["biconjugate_equals_input"] == true);
  const auto ev = run({"krivine", "eval", "--term", "x0 \\/ x1", "--point", "1,2"});
  CHECK(ev.report["outputs"]["value"] == 2.0);
  CHECK(run({"krivine", "eval", "--term", "x0 +", "--point", "1"}).code == kExitInvalid);
  const auto sup = run({"krivine", "sup", "--term", "abs(x0)", "--arity", "1"});
  CHECK(sup.report["outputs"]["sup_norm"] == 1.0);
  const auto ap = run({"krivine", "approx", "--fn", "euclid", "--eps", "0.05", "--grid", "2000"});
  CHECK(ap.report["checks"]["reached_eps"] == true);
  const auto bd = run({"ultra", "--prime", "2", "ball-dist", "0", "1/4", "4", "1/4"});
  CHECK(bd.report["outputs"]["distance"] == "0");
  CHECK(bd.report["outputs"]["equal_balls"] == true);
  const auto tri = run({"ultra", "--prime", "3", "check-triangles", "--samples", "20"});
  CHECK(tri.report["outputs"]["violations"] == 0);
  CHECK(run({"ultra", "--prime", "4", "ball-dist", "0", "0", "1", "0"}).code == kExitInvalid);
  const auto p1 = run({"demo", "p1", "--eps", "1/16"});
  CHECK(p1.report["outputs"]["norms"][0].get<double>() == doctest::Approx(1.0));
  CHECK(p1.report["outputs"]["norms"][1].get<double>() == doctest::Approx(1.0));
  const auto rm = run({"demo", "remark"});
  CHECK(rm.report["outputs"]["witness_integrals"][0].get<double>() == doctest::Approx(1.0));
  const auto rvs = put("rvs.json", R"({"weights": [0.5, 0.5], "blocks": [[0, 1]]})");
  const auto rve = put("rve.json", R"({"elements": [[0, 1]]})");
  const auto rv = run({"rv-cb", "--space", rvs, "--elements", rve, "--k-max", "2"});
  CHECK(rv.code == 0);
  const auto ev2 = put("ev.json", R"({"weights": [0.5, 0.5], "blocks": [[0], [1]], "events": [[1, 0], [1, 1]]})");
  CHECK(run({"apr-cb", "--events", ev2}).code == 0);
  const auto vs = put("vs.json", R"({"vectors": [[1, 2, 3]]})");
  const auto sub = put("sub.json", R"({"basis": [[1, 0, 0]]})");
  const auto hs = run({"hs-cb", "--vectors", vs, "--subspace", sub});
  CHECK(hs.report["outputs"]["gram"][0][0] == 14.0);
}

TEST_CASE("binary exit codes") {
  const auto space = put("space3.json", R"({"base_weights": [1], "fiber_cells": 2})");
  const auto a = put("a3.json", R"({"rows": [[1, 2]]})");
  const auto c = put("c3.json", R"({"rows": [[2, 2]]})");
  CHECK(run_binary("") == 1);
  CHECK(run_binary("--help") == 0);
  CHECK(run_binary("typeq --space " + space + " --a " + a + " --b " + a) == 0);
  CHECK(run_binary("typeq --space " + space + " --a " + a + " --b " + c) == 3);
  CHECK(run_binary("typeq --space /nonexistent.json --a " + a + " --b " + c) == 2);
  CHECK(run_binary("--seed 4 ultra check-triangles --samples 10") == 0);
}
