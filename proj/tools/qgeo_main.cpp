// qgeo: quasiclassical geodesics of a two-mode quantum test particle.
//
// Subcommands: map-forward, map-inverse, info, tensors, simulate, dispersion,
// validate, plot-data. Exit codes: 0 ok, 1 validation failure, 2 config
// error, 3 numerical-domain error. Errors go to stderr as JSON.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>

#include "qgeo/dispersion.hpp"
#include "qgeo/dynamics.hpp"
#include "qgeo/errors.hpp"
#include "qgeo/finsler.hpp"
#include "qgeo/info.hpp"
#include "qgeo/io.hpp"
#include "qgeo/validate.hpp"

namespace {

using qgeo::Json;

Json read_json_input(const std::string& path) {
  if (path.empty() || path == "-") {
    Json j;
    try {
      std::cin >> j;
    } catch (const Json::exception& e) {
      throw qgeo::ConfigError(std::string("stdin json: ") + e.what());
    }
    return j;
  }
  return qgeo::load_config_file(path);
}

void emit(const Json& j, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(qgeo::resolve_output_path(out_path));
  if (!f) throw qgeo::ConfigError("cannot open output file: " + out_path);
  f << j.dump(2) << "\n";
}

struct SimulationArtifacts {
  qgeo::TrajectoryRecord record;
  Json summary;
};

SimulationArtifacts run_single(const qgeo::ScenarioConfig& cfg,
                               const qgeo::CanonicalChart& chart) {
  qgeo::ExtendedState st = qgeo::initial_state(cfg, chart);
  qgeo::IntegrateOptions opt;
  opt.integ.rtol = cfg.rtol;
  opt.integ.atol = cfg.atol;
  opt.integ.h_max = cfg.h_max;
  opt.sample_every = cfg.sample_every;
  opt.guards.constraint_tol_rel = cfg.constraint_tol_rel;
  opt.stop = resolved_stop(cfg);
  opt.monitors = !cfg.classical_mode;
  SimulationArtifacts a;
  a.record = qgeo::integrate(st, cfg.tau_end, opt);
  a.summary = qgeo::run_summary(a.record, qgeo::proper_time_functional(a.record));
  return a;
}

int cmd_simulate(const std::string& config_path) {
  const qgeo::ScenarioConfig cfg = qgeo::parse_scenario(qgeo::load_config_file(config_path));
  qgeo::CanonicalChart chart_a = cfg.chart;
  chart_a.hbar = cfg.hbar;
  if (!cfg.state_is_chart)
    chart_a = qgeo::moments_to_chart(cfg.delta, cfg.hbar).chart;

  if (cfg.chart_b) {
    // clock-pair comparison: two trajectories, merged deterministically (a, b)
    qgeo::CanonicalChart chart_b = *cfg.chart_b;
    chart_b.hbar = cfg.hbar;
    auto fut = std::async(std::launch::async, run_single, cfg, chart_b);
    SimulationArtifacts a = run_single(cfg, chart_a);
    SimulationArtifacts b = fut.get();
    Json summary;
    summary["clock_a"] = a.summary;
    summary["clock_b"] = b.summary;
    summary["tau_difference"] =
        a.record.final_state.tau - b.record.final_state.tau;
    if (!cfg.out_csv.empty()) {
      const std::string base = qgeo::resolve_output_path(cfg.out_csv);
      qgeo::write_trajectory_csv(base + ".a.csv", a.record);
      qgeo::write_trajectory_csv(base + ".b.csv", b.record);
    }
    emit(summary, cfg.out_summary);
    return 0;
  }

  SimulationArtifacts a = run_single(cfg, chart_a);
  if (!cfg.out_csv.empty())
    qgeo::write_trajectory_csv(qgeo::resolve_output_path(cfg.out_csv), a.record);
  emit(a.summary, cfg.out_summary);
  return 0;
}

int cmd_plot_data(const std::string& config_path, const std::string& out) {
  const qgeo::ScenarioConfig cfg = qgeo::parse_scenario(qgeo::load_config_file(config_path));
  qgeo::CanonicalChart chart = cfg.chart;
  chart.hbar = cfg.hbar;
  if (!cfg.state_is_chart) chart = qgeo::moments_to_chart(cfg.delta, cfg.hbar).chart;
  SimulationArtifacts a = run_single(cfg, chart);
  std::ostringstream os;
  os << "tau,H_Q,C1,C2,U_x,U_y,entropy,purity\n";
  for (const auto& s : a.record.samples) {
    os << qgeo::format_g17(s.tau) << ',' << qgeo::format_g17(s.H_Q) << ','
       << qgeo::format_g17(s.C1_v) << ',' << qgeo::format_g17(s.C2_v) << ','
       << qgeo::format_g17(s.u_x) << ',' << qgeo::format_g17(s.u_y) << ','
       << qgeo::format_g17(s.entropy) << ',' << qgeo::format_g17(s.purity) << '\n';
  }
  if (out.empty() || out == "-") {
    std::cout << os.str();
  } else {
    std::ofstream f(qgeo::resolve_output_path(out));
    if (!f) throw qgeo::ConfigError("cannot open output file: " + out);
    f << os.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quasiclassical geodesics of a two-mode quantum test particle"};
  app.require_subcommand(1);

  std::string in_path, out_path, config_path;
  int only_criterion = 0;
  std::uint64_t seed = 20240915;
  std::string scenario_dir;

  auto* fwd = app.add_subcommand("map-forward", "canonical chart -> moment state");
  fwd->add_option("input", in_path, "chart JSON (file or '-')");
  fwd->add_option("-o,--output", out_path, "output path (default stdout)");

  bool verify_roundtrip = false;
  auto* inv = app.add_subcommand("map-inverse", "moment state -> canonical chart");
  inv->add_option("input", in_path, "MomentState JSON (file or '-')");
  inv->add_option("-o,--output", out_path, "output path (default stdout)");
  inv->add_flag("--verify", verify_roundtrip, "re-run the forward map and report the residual");

  auto* info = app.add_subcommand("info", "symplectic eigenvalues, entropy, purity");
  info->add_option("input", in_path, "MomentState JSON (file or '-')");
  info->add_option("-o,--output", out_path, "output path (default stdout)");

  auto* tens = app.add_subcommand("tensors", "quartic/quadratic tensors and H_Q at a point");
  tens->add_option("input", in_path, "input JSON (file or '-')");
  tens->add_option("-o,--output", out_path, "output path (default stdout)");

  auto* sim = app.add_subcommand("simulate", "integrate a scenario configuration");
  sim->add_option("config", config_path, "scenario config (.toml or .json)")->required();

  auto* plot = app.add_subcommand("plot-data", "emit tau-vs-monitor CSV for a scenario");
  plot->add_option("config", config_path, "scenario config (.toml or .json)")->required();
  plot->add_option("-o,--output", out_path, "output CSV (default stdout)");

  double disp_mass = qgeo::constants::cesium133_mass_MeV;
  double disp_temperature = 300.0;
  double disp_xi2 = 1e9;
  double disp_momentum = 0.0;
  double disp_trace = 0.0;
  std::string disp_units = "MeV";
  auto* disp = app.add_subcommand("dispersion", "weak-field dispersion report");
  disp->add_option("--mass", disp_mass, "rest mass (MeV/c^2 in MeV units)");
  disp->add_option("--temperature", disp_temperature, "temperature in K (MeV units)");
  disp->add_option("--xi2", disp_xi2, "dimensionless xi_2 bound");
  disp->add_option("--momentum", disp_momentum, "|p| for the expansion terms");
  disp->add_option("--sigma-trace", disp_trace, "delta^{ij} Delta(p_i p_j)");
  disp->add_option("--units", disp_units, "natural | MeV")
      ->check(CLI::IsMember({"natural", "MeV"}));
  disp->add_option("-o,--output", out_path, "output path (default stdout)");

  auto* val = app.add_subcommand("validate", "run the invariant suite and print a table");
  val->add_option("--criterion", only_criterion, "run only this criterion id");
  val->add_option("--seed", seed, "random seed");
  val->add_option("--scenario-dir", scenario_dir, "directory with shipped scenarios");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fwd->parsed()) {
      const qgeo::CanonicalChart ch = qgeo::chart_from_json(read_json_input(in_path));
      qgeo::MomentState st;
      st.delta = qgeo::chart_to_moments(ch);
      st.hbar = ch.hbar;
      Json j = qgeo::to_json(st);
      j["physicality"] = qgeo::to_json(qgeo::check_physicality(st));
      emit(j, out_path);
      return 0;
    }
    if (inv->parsed()) {
      const qgeo::MomentState st = qgeo::moment_state_from_json(read_json_input(in_path));
      const qgeo::ChartResult cr = qgeo::moments_to_chart(st.delta, st.hbar);
      Json j = qgeo::to_json(cr.chart);
      j["alpha_gauge_undefined"] = cr.alpha_gauge_undefined;
      if (verify_roundtrip) {
        const qgeo::MomentVector d2 = qgeo::chart_to_moments(cr.chart);
        double worst = 0.0;
        for (int i = 0; i < 10; ++i)
          worst = std::max(worst, std::abs(d2[i] - st.delta[i]) /
                                      std::max(1.0, std::abs(st.delta[i])));
        j["roundtrip_residual"] = worst;
        std::cerr << "roundtrip residual: " << worst << "\n";
      }
      emit(j, out_path);
      return 0;
    }
    if (info->parsed()) {
      const qgeo::MomentState st = qgeo::moment_state_from_json(read_json_input(in_path));
      Json j = qgeo::to_json(qgeo::info_report(st));
      j["physicality"] = qgeo::to_json(qgeo::check_physicality(st));
      emit(j, out_path);
      return 0;
    }
    if (tens->parsed()) {
      const Json j = read_json_input(in_path);
      const auto metric = qgeo::metric_from_config(j.at("metric"));
      qgeo::Vec4 x = qgeo::Vec4::Zero();
      if (j.contains("event"))
        for (int i = 0; i < 4; ++i) x[i] = j.at("event").at(i).get<double>();
      const qgeo::CanonicalChart ch = qgeo::chart_from_json(j.at("chart"));
      qgeo::Vec10 pbar;
      pbar << 0, 0, 0, 0, ch.p_s_x, ch.p_s_y, ch.p_alpha, ch.p_beta, ch.C1, ch.C2;
      if (j.contains("extended_momentum")) {
        const auto& pj = j.at("extended_momentum");
        for (int i = 0; i < 10 && i < static_cast<int>(pj.size()); ++i)
          pbar[i] = pj.at(i).get<double>();
      }
      const double m = j.value("mass", 1.0);
      const qgeo::QuantumShape q{ch.s_x, ch.s_y, ch.alpha, ch.beta};
      const qgeo::FinslerTensors ft =
          qgeo::fundamental_tensor(metric->eval(x), q, pbar, m, metric->c());
      auto dense = [](const qgeo::Mat10& mat) {
        Json rows = Json::array();
        for (int i = 0; i < 10; ++i) {
          Json row = Json::array();
          for (int k = 0; k < 10; ++k) row.push_back(mat(i, k));
          rows.push_back(row);
        }
        return rows;
      };
      Json out{{"H_Q", ft.H_Q},
               {"A", ft.A_scalar},
               {"sqrt_A", ft.sqrt_A},
               {"B_scalar", ft.B_scalar},
               {"B", dense(ft.B)},
               {"g_Q", dense(ft.g_Q)},
               {"quartic_degenerate", ft.quartic_degenerate}};
      emit(out, out_path);
      return 0;
    }
    if (sim->parsed()) return cmd_simulate(config_path);
    if (plot->parsed()) return cmd_plot_data(config_path, out_path);
    if (disp->parsed()) {
      const bool mev = disp_units == "MeV";
      qgeo::DispersionInput in;
      in.m = disp_mass;
      in.c = 1.0;
      in.M_P = mev ? qgeo::constants::planck_mass_MeV : 1.0;
      in.xi2_max = disp_xi2;
      in.p_vec = qgeo::Vec3(disp_momentum, 0, 0);
      in.sigma_p_trace = disp_trace;
      const double kbt = mev ? qgeo::constants::boltzmann_MeV_per_K * disp_temperature
                             : disp_temperature;
      const auto exp = qgeo::nonrel_expansion(in);
      Json out{
          {"units", disp_units},
          {"mass", in.m},
          {"effective_mass", qgeo::effective_mass(in.m, in.sigma_p_trace, in.c)},
          {"expansion",
           Json{{"E0", exp.E0}, {"E2", exp.E2}, {"E2q", exp.E2q}, {"E4", exp.E4},
                {"sum", exp.sum}, {"exact", exp.exact},
                {"warning", exp.expansion_warning}}},
          {"xi2_bound_on_trace", qgeo::xi2_fluctuation_bound(in.m, in.M_P, in.xi2_max, in.c)},
          {"thermal_spread", qgeo::thermal_spread(in.m, kbt)},
      };
      emit(out, out_path);
      return 0;
    }
    if (val->parsed()) {
      qgeo::ValidateOptions vo;
      vo.seed = seed;
      vo.scenario_dir = scenario_dir;
      vo.only = only_criterion;
      const auto results = qgeo::run_validation(vo);
      bool all = true;
      for (const auto& r : results) {
        std::printf("%-4s C%-2d %-58s [%6.2fs] %s\n", r.pass ? "PASS" : "FAIL",
                    r.id, r.name.c_str(), r.seconds, r.detail.c_str());
        all = all && r.pass;
      }
      return all ? 0 : 1;
    }
  } catch (const qgeo::ConfigError& e) {
    std::cerr << Json{{"error", {{"type", "config"}, {"message", e.what()}}}}.dump() << "\n";
    return 2;
  } catch (const qgeo::NumericalError& e) {
    std::cerr << Json{{"error", {{"type", "numerical"}, {"message", e.what()}}}}.dump() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << Json{{"error", {{"type", "internal"}, {"message", e.what()}}}}.dump() << "\n";
    return 3;
  }
  return 2;
}
