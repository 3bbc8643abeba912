#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "matukuma/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "matukuma");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = matukuma::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string config(const char* name) { return std::string(MATUKUMA_CONFIG_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const char* name) {
  const fs::path p = fs::path("cli_test_out") / name;
  fs::remove_all(p);
  return p;
}

json error_of(const Result& r) { return json::parse(r.err); }

}  // namespace

TEST_CASE("classify: closed-form case is rapid") {
  const fs::path dir = scratch("phi");
  const Result r = run({"classify", "--config", config("phi_classify.json"), "--out", dir.string()});
  REQUIRE(r.code == 0);
  const json j = json::parse(slurp(dir / "classify.json"));
  REQUIRE(j["results"].size() == 3);
  for (const auto& x : j["results"]) CHECK(x["classification"]["label"] == "rapid_decay");
  CHECK(j["schema"] == "1");
  const std::string csv = slurp(dir / "trajectory_0.csv");
  CHECK(csv.rfind("r,u,du,w,dw\n", 0) == 0);
  CHECK(r.out.find("rapid_decay") != std::string::npos);
}

TEST_CASE("classify: example_iii is slow, subcritical pure power crosses") {
  const fs::path d1 = scratch("e3");
  REQUIRE(run({"classify", "--config", config("example_iii_classify.json"), "--out", d1.string()}).code == 0);
  CHECK(json::parse(slurp(d1 / "classify.json"))["results"][0]["classification"]["label"] == "slow_decay");
  const fs::path d2 = scratch("e1");
  REQUIRE(run({"classify", "--config", config("example_i_crossing.json"), "--out", d2.string()}).code == 0);
  for (const auto& x : json::parse(slurp(d2 / "classify.json"))["results"])
    CHECK(x["classification"]["label"] == "crossing");
}

TEST_CASE("config errors exit with 2") {
  const fs::path dir = scratch("bad");
  fs::create_directories(dir);
  std::ofstream(dir / "broken.json") << "{\"schema\": \"1\", \"problem\": ";
  Result r = run({"classify", "--config", (dir / "broken.json").string(), "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(error_of(r)["error"] == "config_parse");

  std::ofstream(dir / "noschema.json") << R"({"problem": {"n": 3, "l": -0.5, "weight": {"family": "pure_power"}}})";
  r = run({"classify", "--config", (dir / "noschema.json").string(), "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(error_of(r)["error"] == "config_schema");

  std::ofstream(dir / "v2.json") << R"({"schema": "2"})";
  CHECK(run({"classify", "--config", (dir / "v2.json").string()}).code == 2);

  r = run({"classify", "--config", (dir / "missing.json").string()});
  CHECK(r.code == 2);
  CHECK(error_of(r)["error"] == "config_io");

  r = run({"classify", "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(error_of(r)["error"] == "config_missing");

  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"classify", "--jobs", "0"}).code == 2);
  CHECK(run({"classify", "--config", config("phi_classify.json"), "--tol-scale", "-1", "--out", dir.string()}).code == 2);
}

TEST_CASE("scan rejects a short grid") {
  const fs::path dir = scratch("short");
  fs::create_directories(dir);
  std::ofstream(dir / "one.json") << R"({"schema": "1", "alphas": [1.0],
    "problem": {"n": 3, "l": -0.5, "weight": {"family": "pure_power"}}})";
  const Result r = run({"scan", "--config", (dir / "one.json").string(), "--out", dir.string()});
  CHECK(r.code == 3);
  CHECK(error_of(r)["clause"] == "grid");
}

TEST_CASE("scan: example_iii and determinism") {
  const fs::path a = scratch("scan_a"), b = scratch("scan_b");
  REQUIRE(run({"scan", "--config", config("example_iii_scan.json"), "--out", a.string(), "--jobs", "1"}).code == 0);
  REQUIRE(run({"scan", "--config", config("example_iii_scan.json"), "--out", b.string(), "--jobs", "4"}).code == 0);
  const std::string ja = slurp(a / "structure.json"), jb = slurp(b / "structure.json");
  CHECK(ja == jb);
  CHECK(slurp(a / "structure.csv") == slurp(b / "structure.csv"));
  const std::string pattern = json::parse(ja)["structure"]["pattern"];
  CHECK(pattern.front() == 'C');
  CHECK(pattern.back() == 'C');
  CHECK(pattern.find('S') != std::string::npos);
  CHECK(slurp(a / "structure.csv").rfind("alpha,label,decay_exponent,crossing_radius\n", 0) == 0);
}

TEST_CASE("construct: shipped bump and invalid bump") {
  const fs::path dir = scratch("t5");
  Result r = run({"construct", "--config", config("theorem5.json"), "--out", dir.string(), "--jobs", "4"});
  REQUIRE(r.code == 0);
  const json j = json::parse(slurp(dir / "construct.json"));
  CHECK(j["theorem5"]["pass"] == true);
  CHECK(j["theorem5"]["rapid_count"].get<int>() >= 2);

  r = run({"construct", "--config", config("invalid_bump.json"), "--out", scratch("inv").string()});
  CHECK(r.code == 3);
  CHECK(error_of(r)["clause"] == "2.1b");
}

TEST_CASE("scan on the constructed weight") {
  const fs::path dir = scratch("t5scan");
  REQUIRE(run({"scan", "--config", config("theorem5.json"), "--out", dir.string(), "--jobs", "4"}).code == 0);
  const json j = json::parse(slurp(dir / "structure.json"));
  CHECK(j["structure"]["rapid_alphas"].size() >= 2);
}

TEST_CASE("hypotheses") {
  const fs::path dir = scratch("hyp");
  REQUIRE(run({"hypotheses", "--config", config("product_power_hypotheses.json"), "--out", dir.string()}).code == 0);
  const json j = json::parse(slurp(dir / "hypotheses.json"));
  for (int i = 0; i < 5; ++i) {
    const std::string id = j["hypotheses"]["items"][i]["id"];
    if (id == "f1" || id == "f2" || id == "f2'" || id == "f3" || id == "f4")
      CHECK_MESSAGE(j["hypotheses"]["items"][i]["status"] == "holds", id);
  }
  const fs::path d2 = scratch("small");
  REQUIRE(run({"hypotheses", "--config", config("quarter_small_alpha.json"), "--out", d2.string()}).code == 0);
  const json s = json::parse(slurp(d2 / "hypotheses.json"));
  CHECK(s["small_alpha"]["theorem"] == 1);
  CHECK(s["small_alpha"]["all_noncrossing"] == true);
}

TEST_CASE("pohozaev and oracle") {
  const fs::path dir = scratch("poh");
  Result r = run({"pohozaev", "--config", config("example_iii_pohozaev.json"), "--out", dir.string()});
  REQUIRE(r.code == 0);
  const json j = json::parse(slurp(dir / "pohozaev.json"));
  REQUIRE(j["results"][0]["reports"].size() == 6);
  for (const auto& rep : j["results"][0]["reports"])
    CHECK(std::abs(rep["residual"].get<double>()) <= 1e-6 * rep["scale"].get<double>());

  const fs::path d2 = scratch("growth");
  REQUIRE(run({"pohozaev", "--config", config("quarter_growth.json"), "--out", d2.string()}).code == 0);
  CHECK(json::parse(slurp(d2 / "pohozaev.json"))["lemma_4_1_growth"]["strictly_increasing"] == true);

  const fs::path d3 = scratch("oracle");
  r = run({"oracle", "--out", d3.string()});
  REQUIRE(r.code == 0);
  const json o = json::parse(slurp(d3 / "oracle.json"));
  CHECK(o["pass"] == true);
  for (const auto& x : o["results"]) CHECK(x["max_rel_error"].get<double>() <= 1e-6);
}

TEST_CASE("tolerance scale is applied") {
  const fs::path dir = scratch("tol");
  REQUIRE(run({"classify", "--config", config("phi_classify.json"), "--out", dir.string(), "--tol-scale", "10"}).code == 0);
  const json j = json::parse(slurp(dir / "classify.json"));
  CHECK(j["tolerances"]["ode_rel"].get<double>() == doctest::Approx(1e-9));
}

TEST_CASE("help exits cleanly") {
  const Result r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("classify") != std::string::npos);
}
