#include "matukuma/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <variant>

namespace matukuma::io {
namespace {

void write(std::string& out, const json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ',';
          out += nl;
        }
        first = false;
        out += pad;
        out += json(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        write(out, it.value(), indent, depth + 1);
      }
      out += nl;
      out += close;
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      out += nl;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) {
          out += ',';
          out += nl;
        }
        out += pad;
        write(out, j[i], indent, depth + 1);
      }
      out += nl;
      out += close;
      out += ']';
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

const json& require(const json& j, const char* key) {
  if (!j.is_object()) throw ConfigError("config_type", "expected an object around key '" + std::string(key) + "'");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError("config_missing", "missing key '" + std::string(key) + "'");
  return *it;
}

double num(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number()) throw ConfigError("config_type", "key '" + std::string(key) + "' must be a number");
  return v.get<double>();
}

double num_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? num(j, key) : fallback;
}

int integer(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number_integer()) throw ConfigError("config_type", "key '" + std::string(key) + "' must be an integer");
  return v.get<int>();
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string dump(const json& j, int indent) {
  std::string out;
  write(out, j, indent, 0);
  return out;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config_parse", e.what());
  }
}

json to_json(const BumpFunction& k) {
  json j{{"knots", {k.a(), k.b(), k.c()}}, {"gamma", k.gamma()}};
  if (k.shape()) {
    j["shape"] = {{"amplitude", k.shape()->amplitude}, {"slope_a", k.shape()->slope_a}, {"slope_b", k.shape()->slope_b}};
  } else {
    json pieces = json::array();
    for (const auto& p : k.pieces())
      pieces.push_back({{"x0", p.x0}, {"x1", p.x1}, {"coeffs", {p.coeffs[0], p.coeffs[1], p.coeffs[2], p.coeffs[3]}}});
    j["pieces"] = pieces;
  }
  return j;
}

BumpFunction bump_from_json(const json& j) {
  const json& knots = require(j, "knots");
  if (!knots.is_array() || knots.size() != 3 || !knots[0].is_number() || !knots[1].is_number() ||
      !knots[2].is_number())
    throw ConfigError("config_type", "'knots' must be an array of three numbers [a, b, c]");
  const double a = knots[0].get<double>(), b = knots[1].get<double>(), c = knots[2].get<double>();
  const double gamma = num(j, "gamma");
  if (j.contains("pieces")) {
    const json& arr = j["pieces"];
    if (!arr.is_array()) throw ConfigError("config_type", "'pieces' must be an array");
    std::vector<BumpFunction::Piece> pieces;
    for (const json& p : arr) {
      BumpFunction::Piece piece;
      piece.x0 = num(p, "x0");
      piece.x1 = num(p, "x1");
      const json& co = require(p, "coeffs");
      if (!co.is_array() || co.size() != 4) throw ConfigError("config_type", "'coeffs' must hold 4 numbers");
      for (int i = 0; i < 4; ++i) {
        if (!co[i].is_number()) throw ConfigError("config_type", "'coeffs' must hold 4 numbers");
        piece.coeffs[i] = co[i].get<double>();
      }
      pieces.push_back(piece);
    }
    return BumpFunction(a, b, c, gamma, std::move(pieces));
  }
  BumpFunction::Shape shape;
  if (j.contains("shape")) {
    const json& s = j["shape"];
    shape.amplitude = num_or(s, "amplitude", shape.amplitude);
    shape.slope_a = num_or(s, "slope_a", shape.slope_a);
    shape.slope_b = num_or(s, "slope_b", shape.slope_b);
  }
  return BumpFunction::hermite(a, b, c, gamma, shape);
}

json to_json(const WeightFunction& w) {
  json j = std::visit(
      [](const auto& fam) -> json {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, PurePower>) {
          return {{"family", "pure_power"}, {"l", fam.l}};
        } else if constexpr (std::is_same_v<T, ExampleIII>) {
          return {{"family", "example_iii"}, {"n", fam.n}, {"l", fam.l}, {"p", fam.p}};
        } else if constexpr (std::is_same_v<T, ProductPower>) {
          return {{"family", "product_power"}, {"c1", fam.c1}, {"c2", fam.c2},      {"c3", fam.c3},
                  {"c4", fam.c4},              {"gamma", fam.gamma}, {"nu", fam.nu}};
        } else if constexpr (std::is_same_v<T, ShiftedPower>) {
          return {{"family", "shifted_power"}, {"A", fam.A}, {"B", fam.B}, {"mu", fam.mu}, {"nu", fam.nu}};
        } else {
          json b = to_json(fam.k);
          b["family"] = "constructed";
          b["epsilon"] = fam.epsilon;
          return b;
        }
      },
      w.family());
  j["scale"] = w.scale();
  if (!w.has_analytic_derivative()) j["analytic_derivative"] = false;
  return j;
}

WeightFunction weight_from_json(const json& j, int n, double l, double p_star) {
  const json& fam = require(j, "family");
  if (!fam.is_string()) throw ConfigError("config_type", "'family' must be a string");
  const std::string name = fam.get<std::string>();
  const double scale = num_or(j, "scale", 1.0);
  if (!(scale > 0.0)) throw ConfigError("config_value", "'scale' must be positive");
  bool analytic = true;
  if (j.contains("analytic_derivative")) {
    if (!j["analytic_derivative"].is_boolean())
      throw ConfigError("config_type", "'analytic_derivative' must be a boolean");
    analytic = j["analytic_derivative"].get<bool>();
  }
  WeightFunction::Family f = PurePower{l};
  if (name == "pure_power") {
    f = PurePower{num_or(j, "l", l)};
  } else if (name == "example_iii") {
    f = make_example_iii(j.contains("n") ? integer(j, "n") : n, num_or(j, "l", l), num(j, "p")).family();
  } else if (name == "product_power") {
    f = ProductPower{num(j, "c1"), num(j, "c2"), num(j, "c3"), num(j, "c4"), num(j, "gamma"), num(j, "nu")};
  } else if (name == "shifted_power") {
    f = ShiftedPower{num(j, "A"), num(j, "B"), num(j, "mu"), num(j, "nu")};
  } else if (name == "constructed") {
    const BumpFunction k = bump_from_json(j);
    const ProblemSpec base(n, l, l, p_star, WeightFunction(PurePower{l}));
    f = build_constructed_f(k, num(j, "epsilon"), base).family();
  } else {
    throw ConfigError("config_value", "unknown weight family '" + name + "'");
  }
  return WeightFunction(std::move(f), scale, analytic);
}

json to_json(const ProblemSpec& spec) {
  return {{"n", spec.n()}, {"l", spec.l()}, {"sigma", spec.sigma()}, {"p", spec.p()}, {"weight", to_json(spec.weight())}};
}

ProblemSpec problem_from_json(const json& j) {
  const int n = integer(j, "n");
  const double l = num(j, "l");
  const double sigma = num_or(j, "sigma", 0.0);
  double p_star = 0.0;
  try {
    p_star = critical_exponent(n, l);
  } catch (const DomainError& e) {
    throw ConfigError("config_value", e.what());
  }
  const double p = num_or(j, "p", p_star);
  const WeightFunction w = weight_from_json(require(j, "weight"), n, l, p_star);
  try {
    return ProblemSpec(n, l, sigma, p, w);
  } catch (const DomainError& e) {
    throw ConfigError("config_value", e.what());
  }
}

json to_json(const Tolerances& t) {
  return {{"ode_rel", t.ode_rel},   {"ode_abs", t.ode_abs},       {"quad_rel", t.quad_rel},
          {"root_abs", t.root_abs}, {"class_horizon", t.class_horizon}, {"class_margin", t.class_margin}};
}

Tolerances tolerances_from_json(const json& j, const Tolerances& base) {
  if (!j.is_object()) throw ConfigError("config_type", "'tolerances' must be an object");
  Tolerances t = base;
  t.ode_rel = num_or(j, "ode_rel", t.ode_rel);
  t.ode_abs = num_or(j, "ode_abs", t.ode_abs);
  t.quad_rel = num_or(j, "quad_rel", t.quad_rel);
  t.root_abs = num_or(j, "root_abs", t.root_abs);
  t.class_horizon = num_or(j, "class_horizon", t.class_horizon);
  t.class_margin = num_or(j, "class_margin", t.class_margin);
  try {
    t.validate();
  } catch (const ValidationError& e) {
    throw ConfigError("config_value", e.what());
  }
  return t;
}

json to_json(const Classification& c) {
  return {{"label", std::string(to_string(c.label))},
          {"crossing_radius", opt(c.crossing_radius)},
          {"fitted_decay_exponent", c.fitted_decay_exponent},
          {"D_limit", c.D_limit},
          {"D_trend", c.D_trend},
          {"w_limit", c.w_limit},
          {"w_trend", c.w_trend},
          {"confidence", c.confidence},
          {"window_end", c.window_end},
          {"reason", c.reason}};
}

json events_json(const Trajectory& traj) {
  json ks = json::array();
  for (const auto& [k, r] : traj.r_alpha_k()) ks.push_back({{"k", k}, {"r", r}});
  return {{"alpha", traj.alpha()},
          {"termination", to_string(traj.termination())},
          {"horizon", traj.horizon()},
          {"r_start", traj.r_start()},
          {"steps", traj.steps()},
          {"crossing_radius", opt(traj.crossing_radius())},
          {"r_alpha_k", ks}};
}

json to_json(const HypothesisReport& r) {
  json items = json::array();
  for (const auto& h : r.items)
    items.push_back({{"id", h.id}, {"status", std::string(to_string(h.status))}, {"witness", h.witness}, {"note", h.note}});
  return {{"items", items},
          {"fitted_l", opt(r.fitted_l)},
          {"fitted_sigma", opt(r.fitted_sigma)},
          {"delta1", opt(r.delta1)},
          {"delta1_prime", opt(r.delta1_prime)},
          {"beta", opt(r.beta)},
          {"r2", opt(r.r2)},
          {"gamma", opt(r.gamma)},
          {"r3", opt(r.r3)},
          {"H_inf", opt(r.H_inf)},
          {"H_tail_bound", opt(r.H_tail_bound)}};
}

json to_json(const PohozaevReport& r) {
  return {{"which", std::string(to_string(r.which))},
          {"R", r.R},
          {"lhs", r.lhs},
          {"rhs", r.rhs},
          {"residual", r.residual},
          {"scale", r.scale},
          {"weighted_integral", r.weighted_integral}};
}

json to_json(const std::vector<ProbePoint>& probe) {
  json a = json::array();
  for (const auto& q : probe) a.push_back({{"R", q.R}, {"w", q.w}, {"Rdw", q.Rdw}, {"R2d2w", q.R2d2w}});
  return a;
}

json to_json(const GrowthReport& r) {
  json e = json::array();
  for (const auto& g : r.entries) e.push_back({{"alpha", g.alpha}, {"r_alpha", g.r_alpha}, {"integral", g.integral}});
  return {{"gate", r.gate}, {"gate_reason", r.gate_reason}, {"entries", e}, {"strictly_increasing", r.strictly_increasing}};
}

json to_json(const StructureReport& r) {
  json grid = json::array();
  for (const auto& g : r.grid) grid.push_back({{"alpha", g.alpha}, {"classification", to_json(g.classification)}});
  json bounds = json::array();
  for (const auto& b : r.boundaries)
    bounds.push_back({{"lo", b.lo},
                      {"hi", b.hi},
                      {"alpha", b.alpha()},
                      {"width", b.width()},
                      {"left", std::string(to_string(b.left))},
                      {"right", std::string(to_string(b.right))},
                      {"iterations", b.iterations}});
  return {{"pattern", r.pattern}, {"grid", grid}, {"boundaries", bounds}, {"rapid_alphas", r.rapid_alphas}};
}

json to_json(const Theorem5Report& r) {
  return {{"pass", r.pass},
          {"structure", to_json(r.structure)},
          {"hypotheses", to_json(r.hypotheses)},
          {"condition_2_1d", {{"holds", r.condition.holds}, {"value", r.condition.value}}},
          {"alpha_star_label", std::string(to_string(r.alpha_star_label))},
          {"crossing_low", r.crossing_low},
          {"crossing_high", r.crossing_high},
          {"rapid_count", r.rapid_count},
          {"log", r.log}};
}

json to_json(const SmallAlphaReport& r) {
  json samples = json::array();
  for (const auto& s : r.samples) samples.push_back({{"alpha", s.alpha}, {"classification", to_json(s.classification)}});
  return {{"theorem", r.theorem},
          {"gate", r.gate},
          {"r0", r.r0},
          {"r1", r.r1},
          {"delta1", r.delta1},
          {"beta", r.beta},
          {"delta2", r.delta2},
          {"k", r.k},
          {"r_required", r.r_required},
          {"alpha0", opt(r.alpha0)},
          {"r_alpha_at_alpha0", opt(r.r_alpha_at_alpha0)},
          {"samples", samples},
          {"all_noncrossing", r.all_noncrossing},
          {"all_crossing", r.all_crossing}};
}

json to_json(const OracleResult& r) {
  return {{"name", r.name}, {"alpha", r.alpha}, {"r_max", r.r_max}, {"max_rel_error", r.max_rel_error}, {"seconds", r.seconds}};
}

json to_json(const ScalingFit& f) {
  return {{"slope_small", f.slope_small}, {"r2_small", f.r2_small},   {"slope_large", f.slope_large},
          {"r2_large", f.r2_large},       {"slope_all", f.slope_all}, {"r2_all", f.r2_all},
          {"intercept_all", f.intercept_all}, {"alphas", f.alphas},   {"radii", f.radii}};
}

json to_json(const AprioriBound& b) {
  return {{"C_base", b.C_base}, {"C_extended", b.C_extended}, {"variation", b.variation}, {"pass", b.pass}};
}

}  // namespace matukuma::io
