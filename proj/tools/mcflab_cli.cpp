// mcflab command line: flow, arrival, rescale, spectrum, verify, pipeline, sweep.
// Exit status: 0 success, 1 a check failed (fail or violation), 2 usage or input error.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcflab/convex_flow.hpp"
#include "mcflab/io.hpp"
#include "mcflab/levelset_arrival.hpp"
#include "mcflab/pipeline.hpp"
#include "mcflab/rescale_graph.hpp"
#include "mcflab/sphere_spectral.hpp"

namespace {

using namespace mcflab;

constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

// Flags that mirror ExperimentConfig. Unset flags keep the preset or file value.
struct ConfigFlags {
  std::string preset;
  std::string config_file;
  std::optional<std::string> name, shape, gauge, output_dir, checks;
  std::optional<std::uint64_t> seed;
  std::optional<double> radius, axis_a, axis_b, amplitude, shift, cfl, area_floor, snapshot_ds;
  std::optional<double> gauge_dT, gauge_dx0, gauge_dy0, window_begin, window_end;
  std::optional<int> modes, support_nodes, graph_nodes, arrival_nodes, r;

  void attach(CLI::App* app, bool with_output) {
    app->add_option("--preset", preset, "circle | ball | ellipse | perturbed-circle");
    app->add_option("--config", config_file, "INI config file")->check(CLI::ExistingFile);
    app->add_option("--name", name);
    app->add_option("--shape", shape, "circle | ball | ellipse | perturbed-circle");
    app->add_option("--seed", seed);
    app->add_option("--radius", radius);
    app->add_option("--axis-a", axis_a);
    app->add_option("--axis-b", axis_b);
    app->add_option("--amplitude", amplitude);
    app->add_option("--modes", modes);
    app->add_option("--shift", shift);
    app->add_option("--support-nodes", support_nodes);
    app->add_option("--graph-nodes", graph_nodes);
    app->add_option("--arrival-nodes", arrival_nodes);
    app->add_option("--cfl", cfl);
    app->add_option("--area-floor", area_floor);
    app->add_option("--snapshot-ds", snapshot_ds);
    app->add_option("--gauge", gauge, "exact | estimated");
    app->add_option("--dT", gauge_dT, "offset added to the gauge extinction time");
    app->add_option("--dx0", gauge_dx0);
    app->add_option("--dy0", gauge_dy0);
    app->add_option("--r", r, "Sobolev index of the checks");
    app->add_option("--window-begin", window_begin);
    app->add_option("--window-end", window_end);
    app->add_option("--checks", checks, "comma separated check names");
    if (with_output) app->add_option("--out", output_dir, "output directory");
  }

  ExperimentConfig build() const {
    ExperimentConfig c;
    if (!config_file.empty()) c = parse_ini(io::read_text_file(config_file));
    else if (!preset.empty()) c = preset_config(preset);
    auto apply = [](auto& dst, const auto& src) {
      if (src) dst = *src;
    };
    apply(c.name, name);
    apply(c.shape, shape);
    apply(c.gauge, gauge);
    apply(c.output_dir, output_dir);
    apply(c.seed, seed);
    apply(c.radius, radius);
    apply(c.axis_a, axis_a);
    apply(c.axis_b, axis_b);
    apply(c.amplitude, amplitude);
    apply(c.shift, shift);
    apply(c.cfl, cfl);
    apply(c.area_floor, area_floor);
    apply(c.snapshot_ds, snapshot_ds);
    apply(c.gauge_dT, gauge_dT);
    apply(c.gauge_dx0, gauge_dx0);
    apply(c.gauge_dy0, gauge_dy0);
    apply(c.window_begin, window_begin);
    apply(c.window_end, window_end);
    apply(c.modes, modes);
    apply(c.support_nodes, support_nodes);
    apply(c.graph_nodes, graph_nodes);
    apply(c.arrival_nodes, arrival_nodes);
    apply(c.r, r);
    if (checks) {
      ExperimentConfig tmp;
      tmp = parse_ini("[run]\nchecks = " + *checks + "\n");
      c.checks = tmp.checks;
    }
    validate(c);
    return c;
  }
};

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") std::cout << content;
  else io::write_text_file(path, content);
}

FlowTrajectory flow_for(const ExperimentConfig& c, SupportFunction& initial) {
  initial = initial_shape(c);
  FlowControls controls;
  controls.cfl = c.cfl;
  controls.area_floor = c.area_floor;
  controls.snapshot_ds = c.snapshot_ds;
  return run_to_extinction(initial, controls);
}

int finish(const std::vector<VerificationReport>& reports) {
  for (const auto& r : reports) {
    if (is_failure(r.verdict)) return kExitCheckFailed;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curvature flow arrival-time and rescaled-flow laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mcflab 0.1.0");

  // flow
  ConfigFlags flow_flags;
  std::string flow_out;
  auto* flow_cmd = app.add_subcommand("flow", "Run the support-function flow and write trajectory JSONL");
  flow_flags.attach(flow_cmd, false);
  flow_cmd->add_option("-o,--output", flow_out, "trajectory file (default stdout)");

  // arrival
  std::string domain = "disk";
  int nodes = 256;
  double ar_radius = 1.0, ar_a = 1.2, ar_b = 1.0 / 1.2, half_width = 0.0;
  std::string field_out, header_out, residual_out;
  int residual_order = 0;
  auto* arrival_cmd = app.add_subcommand("arrival", "Solve for the arrival time on a grid");
  arrival_cmd->add_option("--domain", domain, "disk | ellipse | box")
      ->check(CLI::IsMember({"disk", "ellipse", "box"}));
  arrival_cmd->add_option("--nodes", nodes, "nodes per side")->check(CLI::Range(80, 4096));
  arrival_cmd->add_option("--radius", ar_radius, "disk radius");
  arrival_cmd->add_option("--axis-a", ar_a, "ellipse semi-axis or box half-width along x");
  arrival_cmd->add_option("--axis-b", ar_b, "ellipse semi-axis or box half-width along y");
  arrival_cmd->add_option("--half-width", half_width, "grid half-width (default 1.1 x extent)");
  arrival_cmd->add_option("-o,--output", field_out, "CSV x,y,t (default stdout)");
  arrival_cmd->add_option("--header", header_out, "JSON grid header file");
  arrival_cmd->add_option("--residual-order", residual_order, "also fit the expansion residual of order N");
  arrival_cmd->add_option("--residual-out", residual_out, "residual CSV file");

  // rescale
  ConfigFlags rescale_flags;
  std::string rescale_out;
  auto* rescale_cmd = app.add_subcommand("rescale", "Flow, rescale and write the graph trajectory JSONL");
  rescale_flags.attach(rescale_cmd, false);
  rescale_cmd->add_option("-o,--output", rescale_out, "graph file (default stdout)");

  // spectrum
  int spec_n = 1, spec_lmax = 10;
  std::string coeff_file;
  int norm_r = -1;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Eigenvalue table of -Laplacian - 1, or norms of a coefficient file");
  spectrum_cmd->add_option("--n", spec_n, "sphere dimension")->check(CLI::PositiveNumber);
  spectrum_cmd->add_option("--lmax", spec_lmax, "largest mode")->check(CLI::NonNegativeNumber);
  spectrum_cmd->add_option("--coeffs", coeff_file, "coefficient JSON to take norms of")->check(CLI::ExistingFile);
  spectrum_cmd->add_option("--norm", norm_r, "Sobolev index for --coeffs");

  // verify
  ConfigFlags verify_flags;
  std::string check;
  auto* verify_cmd = app.add_subcommand("verify", "Run one check through the pipeline and print its reports");
  verify_cmd->add_option("check", check, "certificate | key_inequality | sup_bound | duhamel | quadratic_bound | arrival")
      ->required()
      ->check(CLI::IsMember({"certificate", "key_inequality", "sup_bound", "duhamel", "quadratic_bound", "arrival"}));
  verify_flags.attach(verify_cmd, false);

  // pipeline
  ConfigFlags pipeline_flags;
  bool print_config = false;
  auto* pipeline_cmd = app.add_subcommand("pipeline", "Run the full pipeline and write the artifact bundle");
  pipeline_flags.attach(pipeline_cmd, true);
  pipeline_cmd->add_flag("--print-config", print_config, "print the canonical config and exit");

  // sweep
  ConfigFlags sweep_flags;
  std::string seeds;
  std::vector<std::string> sweep_configs;
  std::vector<std::string> extra_presets;
  int jobs = 1;
  std::string sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run many configs and print a summary table");
  sweep_flags.attach(sweep_cmd, false);
  sweep_cmd->add_option("--seeds", seeds, "seed range first:last applied to the base config");
  sweep_cmd->add_option("--configs", sweep_configs, "INI files, one run each")->check(CLI::ExistingFile);
  sweep_cmd->add_option("--add-preset", extra_presets, "extra preset rows (e.g. ball)");
  sweep_cmd->add_option("--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("-o,--output", sweep_out, "summary CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*flow_cmd) {
      const auto c = flow_flags.build();
      SupportFunction initial;
      const auto traj = flow_for(c, initial);
      io::TrajectoryHeader header;
      header.shape = c.shape;
      header.params = {{"radius", c.radius}, {"axis_a", c.axis_a}, {"axis_b", c.axis_b},
                       {"amplitude", c.amplitude}, {"modes", static_cast<double>(c.modes)},
                       {"shift", c.shift}};
      header.dtau_policy = "rk4, dtau = " + io::format_double(c.cfl) + " * stability bound";
      header.seed = c.seed;
      emit(flow_out, io::trajectory_jsonl(traj, header));
      std::fprintf(stderr, "T_hat = %.17g, x0_hat = (%.17g, %.17g), steps = %lld\n", traj.T_hat,
                   traj.x0_hat[0], traj.x0_hat[1], static_cast<long long>(traj.steps));
      return 0;
    }
    if (*arrival_cmd) {
      const double extent = domain == "disk" ? ar_radius : std::max(ar_a, ar_b) * (domain == "box" ? std::sqrt(2.0) : 1.0);
      const auto grid = square_grid(nodes, {0.0, 0.0}, half_width > 0.0 ? half_width : 1.1 * extent);
      const LevelSetGrid level = domain == "disk"      ? disk_domain(grid, ar_radius)
                                 : domain == "ellipse" ? ellipse_domain(grid, ar_a, ar_b)
                                                       : box_domain(grid, ar_a, ar_b);
      const auto field = solve_arrival(level);
      emit(field_out, io::arrival_csv(field));
      if (!header_out.empty()) io::write_text_file(header_out, io::arrival_header_json(grid));
      std::fprintf(stderr, "T_hat = %.10g, x0_hat = (%.3g, %.3g), truncated = %s\n", field.T_hat,
                   field.x0_hat[0], field.x0_hat[1], field.truncated ? "yes" : "no");
      if (domain == "disk") {
        std::fprintf(stderr, "max |t - t_ball| outside 4 dx collar = %.3e\n",
                     ball_error(field, ar_radius, {0.0, 0.0}, 4.0 * grid.dx));
      }
      if (residual_order > 0) {
        const auto rep = asymptotic_residual(field, field.T_hat, field.x0_hat, residual_order);
        if (!residual_out.empty()) io::write_text_file(residual_out, io::residual_csv(rep));
        std::fprintf(stderr, "residual exponent fit = %.4g over %zu resolved pairs\n",
                     rep.fitted_exponent, rep.exponents.size());
      }
      return 0;
    }
    if (*rescale_cmd) {
      const auto c = rescale_flags.build();
      SupportFunction initial;
      const auto traj = flow_for(c, initial);
      const auto graph = build_graph_trajectory(traj, SphereGrid::circle(c.graph_nodes),
                                                choose_gauge(c, initial, traj));
      emit(rescale_out, io::graph_jsonl(graph));
      if (!graph.omitted_s.empty()) {
        std::fprintf(stderr, "%zu snapshots were not graphs and were omitted\n", graph.omitted_s.size());
      }
      return 0;
    }
    if (*spectrum_cmd) {
      if (!coeff_file.empty()) {
        const auto coeffs = io::parse_coeffs_json(io::read_text_file(coeff_file));
        std::cout << "r,norm\n";
        const int lo = norm_r >= 0 ? norm_r : 0;
        const int hi = norm_r >= 0 ? norm_r : 6;
        for (int r = lo; r <= hi; ++r) std::cout << r << ',' << io::format_double(sobolev_norm(coeffs, r)) << '\n';
        return 0;
      }
      std::cout << io::spectrum_csv(mode_spectrum(spec_n, spec_lmax));
      return 0;
    }
    if (*verify_cmd) {
      auto c = verify_flags.build();
      c.checks = {check};
      c.output_dir.clear();
      const auto result = run_pipeline(c);
      for (const auto& r : result.reports) std::cout << io::report_json(r);
      return finish(result.reports);
    }
    if (*pipeline_cmd) {
      const auto c = pipeline_flags.build();
      if (print_config) {
        std::cout << to_ini(c);
        return 0;
      }
      const auto result = run_pipeline(c);
      std::cout << io::summary_csv(result.reports);
      if (!c.output_dir.empty()) std::fprintf(stderr, "bundle written to %s\n", c.output_dir.c_str());
      return finish(result.reports);
    }
    if (*sweep_cmd) {
      std::vector<ExperimentConfig> configs;
      if (!seeds.empty()) {
        const auto colon = seeds.find(':');
        if (colon == std::string::npos) throw Error(ErrorCode::invalid_input, "--seeds expects first:last");
        const auto first = std::stoull(seeds.substr(0, colon));
        const auto last = std::stoull(seeds.substr(colon + 1));
        if (last < first) throw Error(ErrorCode::invalid_input, "--seeds range is empty");
        const auto base = sweep_flags.build();
        const auto more = seed_range(base, first, static_cast<int>(last - first + 1));
        configs.insert(configs.end(), more.begin(), more.end());
      }
      for (const auto& f : sweep_configs) configs.push_back(parse_ini(io::read_text_file(f)));
      for (const auto& p : extra_presets) configs.push_back(preset_config(p));
      const auto rows = sweep(configs, jobs);
      emit(sweep_out, sweep_csv(rows));
      for (const auto& row : rows) {
        if (row.verdict == "violation" || row.verdict == "fail") return kExitCheckFailed;
      }
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", to_string(e.code()), e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return 0;
}
