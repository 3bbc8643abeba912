#include "matukuma/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "matukuma/serialize.hpp"

namespace matukuma::cli {
namespace {

namespace fs = std::filesystem;
using io::json;

struct Options {
  std::string config;
  std::string out = "out";
  double tol_scale = 1.0;
  int jobs = 1;
};

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json load_config(const Options& o, bool required) {
  if (o.config.empty()) {
    if (required) throw ConfigError("config_missing", "--config is required for this command");
    return json{{"schema", "1"}};
  }
  std::ifstream in(o.config);
  if (!in) throw ConfigError("config_io", "cannot read config file '" + o.config + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  json j = io::parse(ss.str());
  if (!j.is_object()) throw ConfigError("config_type", "config must be a JSON object");
  auto it = j.find("schema");
  if (it == j.end()) throw ConfigError("config_schema", "config lacks \"schema\"");
  if (!it->is_string() || it->get<std::string>() != "1")
    throw ConfigError("config_schema", "unsupported schema; expected \"1\"");
  return j;
}

Tolerances tolerances(const json& cfg, const Options& o) {
  Tolerances t = cfg.contains("tolerances") ? io::tolerances_from_json(cfg["tolerances"]) : Tolerances{};
  if (!(o.tol_scale > 0.0)) throw ConfigError("config_value", "--tol-scale must be positive");
  return t.scaled(o.tol_scale);
}

ProblemSpec problem(const json& cfg) {
  if (!cfg.contains("problem")) throw ConfigError("config_missing", "missing key 'problem'");
  return io::problem_from_json(cfg["problem"]);
}

std::vector<double> number_list(const json& cfg, const char* key, std::vector<double> fallback) {
  if (!cfg.contains(key)) return fallback;
  const json& a = cfg[key];
  if (!a.is_array()) throw ConfigError("config_type", std::string("'") + key + "' must be an array of numbers");
  std::vector<double> v;
  for (const json& x : a) {
    if (!x.is_number()) throw ConfigError("config_type", std::string("'") + key + "' must be an array of numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

double number(const json& cfg, const char* key, double fallback) {
  if (!cfg.contains(key)) return fallback;
  if (!cfg[key].is_number()) throw ConfigError("config_type", std::string("'") + key + "' must be a number");
  return cfg[key].get<double>();
}

std::vector<double> positive_alphas(const json& cfg, std::vector<double> fallback) {
  std::vector<double> a = cfg.contains("alpha") ? std::vector<double>{number(cfg, "alpha", 1.0)}
                                                : number_list(cfg, "alphas", std::move(fallback));
  if (a.empty()) throw ConfigError("config_value", "no alpha values given");
  for (double x : a)
    if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError("config_value", "alpha values must be positive");
  return a;
}

/// Grid from "alphas", or from "grid": {"lo", "hi", "points", "jitter"} with
/// log-uniform jitter of interior points drawn from "seed".
std::vector<double> alpha_grid(const json& cfg) {
  if (cfg.contains("alphas")) return number_list(cfg, "alphas", {});
  if (!cfg.contains("grid")) throw ConfigError("config_missing", "missing key 'grid' (or 'alphas')");
  const json& g = cfg["grid"];
  if (!g.is_object()) throw ConfigError("config_type", "'grid' must be an object");
  const double lo = number(g, "lo", 0.0), hi = number(g, "hi", 0.0);
  const double pts = number(g, "points", 0.0);
  if (!(lo > 0.0) || !(hi > lo) || pts < 2 || pts != std::floor(pts))
    throw ConfigError("config_value", "'grid' needs 0 < lo < hi and an integer points >= 2");
  std::vector<double> a = log_grid(lo, hi, static_cast<int>(pts));
  const double jitter = number(g, "jitter", 0.0);
  if (jitter < 0.0 || jitter >= 1.0) throw ConfigError("config_value", "'jitter' must lie in [0, 1)");
  if (jitter > 0.0) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(number(cfg, "seed", 0.0)));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double step = std::log(hi / lo) / (a.size() - 1);
    for (std::size_t i = 1; i + 1 < a.size(); ++i) a[i] *= std::exp(0.5 * jitter * step * u(rng));
  }
  return a;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("output_io", "cannot write '" + path.string() + "'");
  f << text;
}

fs::path out_dir(const Options& o) {
  std::error_code ec;
  fs::create_directories(o.out, ec);
  if (ec) throw ConfigError("output_io", "cannot create output directory '" + o.out + "'");
  return fs::path(o.out);
}

json header(const char* command, const json& cfg) {
  return {{"schema", "1"}, {"command", command}, {"config", cfg}};
}

int cmd_classify(const Options& o, std::ostream& out) {
  const json cfg = load_config(o, true);
  const ProblemSpec spec = problem(cfg);
  const Tolerances tol = tolerances(cfg, o);
  const std::vector<double> alphas = positive_alphas(cfg, {1.0});
  const bool csv = !cfg.contains("write_trajectories") || cfg["write_trajectories"].get<bool>();
  const fs::path dir = out_dir(o);

  json rep = header("classify", cfg);
  rep["problem"] = io::to_json(spec);
  rep["tolerances"] = io::to_json(tol);
  rep["results"] = json::array();
  out << "alpha,label,decay_exponent,crossing_radius\n";
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const Shot s = shoot(spec, alphas[i], tol);
    json r{{"alpha", alphas[i]},
           {"classification", io::to_json(s.classification)},
           {"events", io::events_json(s.trajectory)},
           {"companion_divergence", s.companion_divergence}};
    if (csv) {
      const std::string name = "trajectory_" + std::to_string(i) + ".csv";
      std::ostringstream os;
      write_csv(s.trajectory, os);
      write_text(dir / name, os.str());
      r["trajectory_csv"] = name;
    }
    rep["results"].push_back(r);
    const auto& c = s.classification;
    out << g17(alphas[i]) << ',' << to_string(c.label) << ',' << g17(c.fitted_decay_exponent) << ','
        << (c.crossing_radius ? g17(*c.crossing_radius) : "") << '\n';
  }
  write_text(dir / "classify.json", io::dump(rep) + "\n");
  return Ok;
}

SweepOptions sweep_options(const json& cfg, const Options& o) {
  SweepOptions so;
  so.jobs = std::max(1, o.jobs);
  if (cfg.contains("bisection")) {
    const json& b = cfg["bisection"];
    so.rel_bracket = number(b, "rel_bracket", so.rel_bracket);
    so.max_iterations = static_cast<int>(number(b, "max_iterations", so.max_iterations));
  }
  return so;
}

void print_structure(const StructureReport& r, std::ostream& out) {
  out << "pattern " << r.pattern << "\n";
  out << "lo,hi,left,right,iterations\n";
  for (const Boundary& b : r.boundaries)
    out << g17(b.lo) << ',' << g17(b.hi) << ',' << to_string(b.left) << ',' << to_string(b.right) << ','
        << b.iterations << '\n';
  for (double a : r.rapid_alphas) out << "rapid candidate " << g17(a) << '\n';
}

int cmd_scan(const Options& o, std::ostream& out) {
  const json cfg = load_config(o, true);
  const ProblemSpec spec = problem(cfg);
  const Tolerances tol = tolerances(cfg, o);
  const std::vector<double> grid = alpha_grid(cfg);
  const StructureReport r = sweep(spec, grid, tol, sweep_options(cfg, o));
  const fs::path dir = out_dir(o);
  json rep = header("scan", cfg);
  rep["problem"] = io::to_json(spec);
  rep["tolerances"] = io::to_json(tol);
  rep["structure"] = io::to_json(r);
  write_text(dir / "structure.json", io::dump(rep) + "\n");
  std::ostringstream csv;
  write_structure_csv(r, csv);
  write_text(dir / "structure.csv", csv.str());
  print_structure(r, out);
  return Ok;
}

int cmd_pohozaev(const Options& o, std::ostream& out) {
  const json cfg = load_config(o, true);
  const ProblemSpec spec = problem(cfg);
  const Tolerances tol = tolerances(cfg, o);
  const std::vector<double> alphas = positive_alphas(cfg, {1.0});
  const std::vector<double> radii = number_list(cfg, "radii", {1.0, 10.0, 100.0});
  if (radii.empty()) throw ConfigError("config_value", "'radii' is empty");
  const double rmax = *std::max_element(radii.begin(), radii.end());
  const double horizon = number(cfg, "horizon", rmax);
  if (!(horizon >= rmax)) throw ConfigError("config_value", "'horizon' must be at least the largest radius");
  const fs::path dir = out_dir(o);

  json rep = header("pohozaev", cfg);
  rep["problem"] = io::to_json(spec);
  rep["tolerances"] = io::to_json(tol);
  rep["results"] = json::array();
  out << "alpha,identity,R,lhs,rhs,residual,scale\n";
  for (double a : alphas) {
    const Trajectory tr = integrate(spec, a, tol, horizon);
    json r{{"alpha", a}, {"events", io::events_json(tr)}, {"reports", json::array()}};
    for (double R : radii) {
      if (R > tr.horizon()) {
        r["reports"].push_back({{"R", R}, {"skipped", "beyond the end of the trajectory"}});
        continue;
      }
      for (const PohozaevReport& p : {identity_3_3(tr, R, tol.quad_rel), identity_4_1(tr, R, tol.quad_rel)}) {
        r["reports"].push_back(io::to_json(p));
        out << g17(a) << ',' << to_string(p.which) << ',' << g17(R) << ',' << g17(p.lhs) << ',' << g17(p.rhs) << ','
            << g17(p.residual) << ',' << g17(p.scale) << '\n';
      }
    }
    if (cfg.contains("probe") && cfg["probe"].is_boolean() && cfg["probe"].get<bool>())
      r["limit_sequence"] = io::to_json(limit_sequence_probe(tr));
    rep["results"].push_back(r);
  }
  if (cfg.contains("growth_alphas")) {
    const GrowthReport g = lemma_4_1_growth(spec, positive_alphas(json{{"alphas", cfg["growth_alphas"]}}, {}), tol);
    rep["lemma_4_1_growth"] = io::to_json(g);
    out << "growth gate " << (g.gate ? "open" : "closed") << " (" << g.gate_reason << "), strictly increasing "
        << (g.strictly_increasing ? "yes" : "no") << '\n';
  }
  write_text(dir / "pohozaev.json", io::dump(rep) + "\n");
  return Ok;
}

int cmd_hypotheses(const Options& o, std::ostream& out) {
  const json cfg = load_config(o, true);
  const ProblemSpec spec = problem(cfg);
  const Tolerances tol = tolerances(cfg, o);
  const HypothesisReport h = check_hypotheses(spec.weight(), spec);
  const fs::path dir = out_dir(o);
  json rep = header("hypotheses", cfg);
  rep["problem"] = io::to_json(spec);
  rep["hypotheses"] = io::to_json(h);
  out << "id,status,witness,note\n";
  for (const auto& it : h.items)
    out << it.id << ',' << to_string(it.status) << ',' << g17(it.witness) << ",\"" << it.note << "\"\n";
  if (cfg.contains("small_alpha") && cfg["small_alpha"].is_boolean() && cfg["small_alpha"].get<bool>()) {
    const SmallAlphaReport s =
        theorem1_2_smallalpha_check(spec, tol, positive_alphas(json{{"alphas", cfg.value("fallback_alphas", json::array({1e-3, 1e-1, 1.0, 10.0}))}}, {}));
    rep["small_alpha"] = io::to_json(s);
    out << "small-alpha check: theorem " << s.theorem << " (" << s.gate << ")";
    if (s.alpha0) out << ", alpha0 " << g17(*s.alpha0);
    out << ", samples " << (s.all_noncrossing ? "all non-crossing" : s.all_crossing ? "all crossing" : "mixed") << '\n';
  }
  write_text(dir / "hypotheses.json", io::dump(rep) + "\n");
  return Ok;
}

int cmd_construct(const Options& o, std::ostream& out) {
  const json cfg = load_config(o, true);
  if (!cfg.contains("problem")) throw ConfigError("config_missing", "missing key 'problem'");
  const json& pj = cfg["problem"];
  if (!pj.is_object() || !pj.contains("weight")) throw ConfigError("config_missing", "missing key 'weight'");
  const json& wj = pj["weight"];
  if (!wj.is_object() || wj.value("family", "") != "constructed")
    throw ConfigError("config_value", "construct needs a weight of family \"constructed\"");
  const BumpFunction k = io::bump_from_json(wj);
  json base = pj;
  base["weight"] = json{{"family", "pure_power"}};
  const ProblemSpec spec = io::problem_from_json(base);
  const Tolerances tol = tolerances(cfg, o);

  Theorem5Config t5;
  if (!wj.contains("epsilon")) throw ConfigError("config_missing", "missing key 'epsilon'");
  t5.epsilon = number(wj, "epsilon", t5.epsilon);
  if (cfg.contains("theorem5")) {
    const json& c = cfg["theorem5"];
    t5.alpha_star = number(c, "alpha_star", t5.alpha_star);
    t5.r_star = number(c, "r_star", t5.r_star);
    t5.delta = number(c, "delta", t5.delta);
    t5.lo_factor = number(c, "lo_factor", t5.lo_factor);
    t5.hi_factor = number(c, "hi_factor", t5.hi_factor);
    t5.points = static_cast<int>(number(c, "points", t5.points));
  }
  const Theorem5Report r = theorem5_pipeline(k, spec, t5, tol, sweep_options(cfg, o));
  const fs::path dir = out_dir(o);
  json rep = header("construct", cfg);
  rep["problem"] = io::to_json(spec.with_weight(build_constructed_f(k, t5.epsilon, spec)));
  rep["theorem5"] = io::to_json(r);
  write_text(dir / "construct.json", io::dump(rep) + "\n");
  std::ostringstream csv;
  write_structure_csv(r.structure, csv);
  write_text(dir / "structure.csv", csv.str());
  for (const auto& line : r.log) out << line << '\n';
  print_structure(r.structure, out);
  out << (r.pass ? "structure: pass" : "structure: fail") << '\n';
  return Ok;
}

int cmd_oracle(const Options& o, std::ostream& out) {
  const json cfg = load_config(o, false);
  const Tolerances tol = tolerances(cfg, o);
  const std::vector<double> alphas = positive_alphas(cfg, {0.5, 1.0, 2.0});
  const double r_max = number(cfg, "r_max", 1e3);
  const double limit = number(cfg, "max_rel_error_limit", 1e-6);
  if (!(r_max > 1e-6)) throw ConfigError("config_value", "'r_max' must exceed 1e-6");
  const std::vector<OracleResult> res = run_oracles(tol, alphas, r_max);
  const fs::path dir = out_dir(o);
  json rep = header("oracle", cfg);
  rep["tolerances"] = io::to_json(tol);
  rep["results"] = json::array();
  bool ok = true;
  out << "oracle,alpha,max_rel_error,seconds\n";
  for (const auto& r : res) {
    rep["results"].push_back(io::to_json(r));
    ok = ok && r.max_rel_error <= limit;
    out << r.name << ',' << g17(r.alpha) << ',' << g17(r.max_rel_error) << ',' << g17(r.seconds) << '\n';
  }
  rep["pass"] = ok;
  write_text(dir / "oracle.json", io::dump(rep) + "\n");
  if (!ok) throw NumericError("oracle error above " + g17(limit));
  return Ok;
}

void report(std::ostream& err, const std::string& code, const std::string& message, const std::string& clause = "") {
  json j{{"error", code}, {"message", message}};
  if (!clause.empty()) j["clause"] = clause;
  err << io::dump(j, -1) << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shooting-method solver and structure analyzer for radial semilinear equations", "matukuma"};
  app.require_subcommand(1);
  Options o;
  using Handler = int (*)(const Options&, std::ostream&);
  const std::vector<std::tuple<const char*, const char*, Handler>> commands{
      {"classify", "integrate and classify each alpha", cmd_classify},
      {"scan", "sweep alpha and refine label boundaries", cmd_scan},
      {"pohozaev", "evaluate both Pohozaev identities", cmd_pohozaev},
      {"hypotheses", "check hypotheses (f1)-(f9) for the weight", cmd_hypotheses},
      {"construct", "build the constructed weight and reconstruct its structure", cmd_construct},
      {"oracle", "compare with the closed-form solutions", cmd_oracle}};
  Handler chosen = nullptr;
  for (const auto& [name, desc, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", o.config, "JSON config file");
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    sub->add_option("--tol-scale", o.tol_scale, "multiplies every tolerance")->capture_default_str();
    sub->add_option("--jobs", o.jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    sub->callback([&chosen, fn = fn] { chosen = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return Ok;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return Ok;
    }
    report(err, "usage", e.what());
    return ConfigFailure;
  }

  try {
    return chosen(o, out);
  } catch (const ConfigError& e) {
    report(err, e.code(), e.what());
    return ConfigFailure;
  } catch (const ValidationError& e) {
    report(err, "validation", e.what(), e.clause());
    return ValidationFailure;
  } catch (const DomainError& e) {
    report(err, "domain", e.what());
    return ValidationFailure;
  } catch (const NumericError& e) {
    report(err, "numeric_failure", e.what());
    return NumericFailure;
  } catch (const nlohmann::json::exception& e) {
    report(err, "config_type", e.what());
    return ConfigFailure;
  } catch (const std::exception& e) {
    report(err, "numeric_failure", e.what());
    return NumericFailure;
  }
}

}  // namespace matukuma::cli
