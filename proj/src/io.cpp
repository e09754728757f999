#include "qgeo/io.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qgeo/errors.hpp"

namespace qgeo {

namespace {

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// removes a trailing comment that is not inside a string
std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

Json parse_toml_value(const std::string& raw);

Json parse_toml_array(const std::string& raw) {
  Json arr = Json::array();
  std::string body = strip(raw.substr(1, raw.size() - 2));
  if (body.empty()) return arr;
  int depth = 0;
  bool in_str = false;
  std::string cur;
  for (char ch : body) {
    if (ch == '"') in_str = !in_str;
    if (!in_str) {
      if (ch == '[') ++depth;
      if (ch == ']') --depth;
      if (ch == ',' && depth == 0) {
        arr.push_back(parse_toml_value(strip(cur)));
        cur.clear();
        continue;
      }
    }
    cur += ch;
  }
  if (!strip(cur).empty()) arr.push_back(parse_toml_value(strip(cur)));
  return arr;
}

Json parse_toml_value(const std::string& raw) {
  if (raw.empty()) throw ConfigError("toml: empty value");
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"')
      throw ConfigError("toml: unterminated string: " + raw);
    return raw.substr(1, raw.size() - 2);
  }
  if (raw.front() == '[') {
    if (raw.back() != ']') throw ConfigError("toml: unterminated array: " + raw);
    return parse_toml_array(raw);
  }
  if (raw == "true") return true;
  if (raw == "false") return false;
  try {
    std::size_t pos = 0;
    if (raw.find_first_of(".eE") == std::string::npos &&
        raw.find("inf") == std::string::npos && raw.find("nan") == std::string::npos) {
      const long long v = std::stoll(raw, &pos);
      if (pos == raw.size()) return v;
    }
    const double d = std::stod(raw, &pos);
    if (pos == raw.size()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError("toml: cannot parse value: " + raw);
}

Json* descend(Json& root, const std::string& dotted) {
  Json* cur = &root;
  std::stringstream ss(dotted);
  std::string part;
  while (std::getline(ss, part, '.')) {
    part = strip(part);
    if (part.empty()) throw ConfigError("toml: empty key component in " + dotted);
    cur = &(*cur)[part];
  }
  return cur;
}

}  // namespace

Json toml_to_json(const std::string& text) {
  Json root = Json::object();
  Json* section = &root;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("toml: bad table header at line " + std::to_string(lineno));
      section = descend(root, strip(line.substr(1, line.size() - 2)));
      if (!section->is_object() && !section->is_null())
        throw ConfigError("toml: table redefines a value at line " + std::to_string(lineno));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("toml: expected key = value at line " + std::to_string(lineno));
    const std::string key = strip(line.substr(0, eq));
    const std::string val = strip(line.substr(eq + 1));
    *descend(*section, key) = parse_toml_value(val);
  }
  return root;
}

Json load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();
  const bool looks_json =
      path.ends_with(".json") ||
      (!path.ends_with(".toml") && strip(text).starts_with("{"));
  try {
    if (looks_json) return Json::parse(text);
    return toml_to_json(text);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

Json to_json(const MomentState& s) {
  Json j;
  j["mean_x"] = {s.mean_x[0], s.mean_x[1], s.mean_x[2], s.mean_x[3]};
  j["mean_p"] = {s.mean_p[0], s.mean_p[1], s.mean_p[2], s.mean_p[3]};
  j["delta"] = s.delta;
  j["hbar"] = s.hbar;
  return j;
}

MomentState moment_state_from_json(const Json& j) {
  MomentState s;
  try {
    if (j.contains("mean_x"))
      for (int i = 0; i < 4; ++i) s.mean_x[i] = j.at("mean_x").at(i).get<double>();
    if (j.contains("mean_p"))
      for (int i = 0; i < 4; ++i) s.mean_p[i] = j.at("mean_p").at(i).get<double>();
    const auto& d = j.at("delta");
    if (d.size() != 10) throw ConfigError("MomentState: delta must have 10 entries");
    for (int i = 0; i < 10; ++i) s.delta[i] = d.at(i).get<double>();
    s.hbar = j.value("hbar", 1.0);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("MomentState json: ") + e.what());
  }
  return s;
}

Json to_json(const CanonicalChart& c) {
  return Json{{"s_x", c.s_x},     {"p_s_x", c.p_s_x},     {"s_y", c.s_y},
              {"p_s_y", c.p_s_y}, {"alpha", c.alpha},     {"p_alpha", c.p_alpha},
              {"beta", c.beta},   {"p_beta", c.p_beta},   {"C1", c.C1},
              {"C2", c.C2},       {"hbar", c.hbar}};
}

CanonicalChart chart_from_json(const Json& j) {
  CanonicalChart c;
  try {
    c.s_x = j.at("s_x").get<double>();
    c.p_s_x = j.value("p_s_x", 0.0);
    c.s_y = j.at("s_y").get<double>();
    c.p_s_y = j.value("p_s_y", 0.0);
    c.alpha = j.value("alpha", 0.0);
    c.p_alpha = j.value("p_alpha", 0.0);
    c.beta = j.value("beta", M_PI / 2);
    c.p_beta = j.value("p_beta", 0.0);
    c.C1 = j.at("C1").get<double>();
    c.C2 = j.value("C2", 0.0);
    c.hbar = j.value("hbar", 1.0);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("chart json: ") + e.what());
  }
  return c;
}

Json to_json(const InfoReport& r) {
  return Json{{"nu_plus", r.nu_plus}, {"nu_minus", r.nu_minus},
              {"entropy", r.entropy}, {"purity", r.purity},
              {"C1", r.C1},           {"C2", r.C2},
              {"det_sigma", r.det_sigma}};
}

Json to_json(const PhysicalityReport& r) {
  return Json{{"min_rs_eigenvalue", r.min_rs_eigenvalue},
              {"det_sigma", r.det_sigma},
              {"U_x", r.u_x},
              {"U_y", r.u_y},
              {"variances_nonnegative", r.variances_nonnegative},
              {"sigma_psd", r.sigma_psd},
              {"rs_positive", r.rs_positive},
              {"single_mode_ok", r.single_mode_ok},
              {"pass", r.pass}};
}

std::shared_ptr<const MetricField> metric_from_config(const Json& j) {
  const std::string name = j.value("name", j.value("metric", std::string()));
  const double c = j.value("c", 1.0);
  const Json params = j.value("params", Json::object());
  if (name == "minkowski") return make_minkowski(c);
  if (name == "weak_field") {
    if (params.contains("GM"))
      return make_weak_field(point_mass_potential(params.at("GM").get<double>()), c);
    if (params.contains("phi0"))
      return make_weak_field(uniform_potential(params.at("phi0").get<double>()), c);
    throw ConfigError("weak_field metric needs params.GM or params.phi0");
  }
  if (name == "schwarzschild")
    return make_schwarzschild_isotropic(params.value("GM", 1.0), c);
  if (name == "vortical_test")
    return make_vortical_test(params.value("eps", 0.01), params.value("kappa", 1.0), c);
  throw ConfigError("unknown metric: '" + name + "'");
}

ScenarioConfig parse_scenario(const Json& j) {
  ScenarioConfig cfg;
  try {
    cfg.metric = j.at("metric");
    metric_from_config(cfg.metric);  // validate eagerly

    const Json& st = j.at("state");
    const std::string kind = st.at("kind").get<std::string>();
    if (st.contains("mean_x"))
      for (int i = 0; i < 4; ++i) cfg.mean_x[i] = st.at("mean_x").at(i).get<double>();
    if (st.contains("mean_p"))
      for (int i = 0; i < 4; ++i) cfg.mean_p[i] = st.at("mean_p").at(i).get<double>();
    if (kind == "chart") {
      if (st.contains("delta"))
        throw ConfigError("state: exactly one of chart-form or moment-form allowed");
      cfg.state_is_chart = true;
      cfg.chart = chart_from_json(st);
    } else if (kind == "moments") {
      cfg.state_is_chart = false;
      const auto& d = st.at("delta");
      for (int i = 0; i < 10; ++i) cfg.delta[i] = d.at(i).get<double>();
    } else {
      throw ConfigError("state.kind must be 'chart' or 'moments'");
    }
    if (j.contains("state_b")) cfg.chart_b = chart_from_json(j.at("state_b"));

    const Json& pt = j.at("particle");
    cfg.m = pt.at("m").get<double>();
    cfg.hbar = pt.value("hbar", 1.0);
    if (cfg.m <= 0 || cfg.hbar <= 0) throw ConfigError("particle: m, hbar must be positive");

    const Json& run = j.at("run");
    cfg.tau_end = run.at("tau_end").get<double>();
    cfg.rtol = run.value("rtol", 1e-10);
    cfg.atol = run.value("atol", 1e-12);
    cfg.h_max = run.value("h_max", 0.0);
    cfg.sample_every = run.value("sample_every", 10);
    cfg.constraint_tol_rel = run.value("constraint_tol", 1e-6);
    cfg.classical_mode = run.value("classical_mode", false);
    cfg.seed = run.value("seed", 0ull);
    if (cfg.rtol <= 0 || cfg.atol <= 0 || cfg.constraint_tol_rel <= 0)
      throw ConfigError("run: tolerances must be positive");
    if (run.contains("stop")) {
      const Json& sp = run.at("stop");
      cfg.stop_kind = sp.at("kind").get<std::string>();
      if (cfg.stop_kind != "areal_radius" && cfg.stop_kind != "isotropic_radius" &&
          cfg.stop_kind != "coordinate_time")
        throw ConfigError(
            "run.stop.kind must be areal_radius, isotropic_radius or coordinate_time");
      cfg.stop_value = sp.at("value").get<double>();
    }

    if (j.contains("output")) {
      cfg.out_csv = j.at("output").value("csv", std::string());
      cfg.out_summary = j.at("output").value("summary", std::string());
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("scenario config: ") + e.what());
  }
  return cfg;
}

Json scenario_to_json(const ScenarioConfig& cfg) {
  Json j;
  j["metric"] = cfg.metric;
  Json st;
  st["kind"] = cfg.state_is_chart ? "chart" : "moments";
  st["mean_x"] = {cfg.mean_x[0], cfg.mean_x[1], cfg.mean_x[2], cfg.mean_x[3]};
  st["mean_p"] = {cfg.mean_p[0], cfg.mean_p[1], cfg.mean_p[2], cfg.mean_p[3]};
  if (cfg.state_is_chart) {
    Json cj = to_json(cfg.chart);
    cj.erase("hbar");
    st.update(cj);
  } else {
    st["delta"] = cfg.delta;
  }
  j["state"] = st;
  if (cfg.chart_b) {
    Json cb = to_json(*cfg.chart_b);
    cb.erase("hbar");
    j["state_b"] = cb;
  }
  j["particle"] = Json{{"m", cfg.m}, {"hbar", cfg.hbar}};
  Json run{{"tau_end", cfg.tau_end},       {"rtol", cfg.rtol},
           {"atol", cfg.atol},             {"sample_every", cfg.sample_every},
           {"constraint_tol", cfg.constraint_tol_rel},
           {"classical_mode", cfg.classical_mode}, {"seed", cfg.seed}};
  if (cfg.h_max > 0) run["h_max"] = cfg.h_max;
  if (!cfg.stop_kind.empty())
    run["stop"] = Json{{"kind", cfg.stop_kind}, {"value", cfg.stop_value}};
  j["run"] = run;
  if (!cfg.out_csv.empty() || !cfg.out_summary.empty())
    j["output"] = Json{{"csv", cfg.out_csv}, {"summary", cfg.out_summary}};
  return j;
}

StopCondition resolved_stop(const ScenarioConfig& cfg) {
  StopCondition stop;
  if (cfg.stop_kind.empty()) return stop;
  stop.value = cfg.stop_value;
  if (cfg.stop_kind == "coordinate_time") {
    stop.kind = StopCondition::Kind::CoordinateTime;
  } else if (cfg.stop_kind == "isotropic_radius") {
    stop.kind = StopCondition::Kind::IsotropicRadius;
  } else {  // areal_radius: convert through the schwarzschild field
    stop.kind = StopCondition::Kind::IsotropicRadius;
    const Json params = cfg.metric.value("params", Json::object());
    stop.value = schwarzschild_isotropic_radius(params.value("GM", 1.0),
                                                cfg.metric.value("c", 1.0),
                                                cfg.stop_value);
  }
  return stop;
}

ExtendedState initial_state(const ScenarioConfig& cfg, const CanonicalChart& chart) {
  if (!cfg.classical_mode) check_chart_invariants(chart);
  ExtendedState s;
  s.metric = metric_from_config(cfg.metric);
  s.m = cfg.m;
  s.hbar = cfg.hbar;
  s.classical_mode = cfg.classical_mode;
  s.x = cfg.mean_x;
  s.q = Vec4(chart.s_x, chart.s_y, chart.alpha, chart.beta);
  s.p = Vec10::Zero();
  s.p.segment<4>(0) = cfg.mean_p;
  s.p[PSX] = chart.p_s_x;
  s.p[PSY] = chart.p_s_y;
  s.p[PALPHA] = chart.p_alpha;
  s.p[PBETA] = chart.p_beta;
  s.p[C1] = chart.C1;
  s.p[C2] = chart.C2;
  solve_mass_shell(s);
  return s;
}

ExtendedState initial_state(const ScenarioConfig& cfg) {
  if (cfg.state_is_chart) {
    CanonicalChart ch = cfg.chart;
    ch.hbar = cfg.hbar;
    return initial_state(cfg, ch);
  }
  const ChartResult cr = moments_to_chart(cfg.delta, cfg.hbar);
  return initial_state(cfg, cr.chart);
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trajectory_csv_string(const TrajectoryRecord& rec) {
  std::ostringstream out;
  out << "tau,t,x,y,z,s_x,s_y,alpha,beta,p_t,p_x,p_y,p_z,p_s_x,p_s_y,p_alpha,"
         "p_beta,C1,C2,H_Q,U_x,U_y,entropy,purity\n";
  for (const auto& s : rec.samples) {
    out << format_g17(s.tau);
    for (int i = 0; i < 4; ++i) out << ',' << format_g17(s.x[i]);
    for (int i = 0; i < 4; ++i) out << ',' << format_g17(s.q[i]);
    for (int i = 0; i < 8; ++i) out << ',' << format_g17(s.p[i]);
    out << ',' << format_g17(s.C1_v) << ',' << format_g17(s.C2_v);
    out << ',' << format_g17(s.H_Q) << ',' << format_g17(s.u_x) << ','
        << format_g17(s.u_y) << ',' << format_g17(s.entropy) << ','
        << format_g17(s.purity) << '\n';
  }
  return out.str();
}

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open output file: " + path);
  f << trajectory_csv_string(rec);
}

Json run_summary(const TrajectoryRecord& rec, double tau_q) {
  const auto& fs = rec.final_state;
  Json j;
  j["final_state"] = Json{
      {"tau", fs.tau},
      {"x", {fs.x[0], fs.x[1], fs.x[2], fs.x[3]}},
      {"q", {fs.q[0], fs.q[1], fs.q[2], fs.q[3]}},
      {"p", std::vector<double>(fs.p.data(), fs.p.data() + 10)},
  };
  j["max_abs_H"] = rec.max_abs_H;
  j["max_abs_H_rel"] = rec.m_c2 > 0 ? rec.max_abs_H / rec.m_c2 : 0.0;
  if (std::isfinite(rec.min_u_floor_margin)) {
    j["min_u_floor_margin"] = rec.min_u_floor_margin;
    j["min_rs_eigenvalue"] = rec.min_rs_eigenvalue;
  } else {  // classical mode: quantum monitors not evaluated
    j["min_u_floor_margin"] = nullptr;
    j["min_rs_eigenvalue"] = nullptr;
  }
  j["steps_accepted"] = rec.steps_accepted;
  j["steps_rejected"] = rec.steps_rejected;
  j["stopped_by_condition"] = rec.stopped_by_condition;
  j["samples"] = rec.samples.size();
  j["tau_Q"] = tau_q;
  return j;
}

std::string resolve_output_path(const std::string& path) {
  if (path.empty()) return path;
  const char* dir = std::getenv("QGEO_OUTPUT_DIR");
  if (!dir || path.front() == '/') return path;
  return (std::filesystem::path(dir) / path).string();
}

}  // namespace qgeo
