#include "mcflab/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <functional>
#include <future>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "mcflab/io.hpp"
#include "mcflab/sphere_spectral.hpp"

namespace mcflab {

namespace pt = boost::property_tree;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::set<std::string> kKnownChecks{"arrival", "certificate", "duhamel", "key_inequality",
                                         "quadratic_bound", "sup_bound"};
const std::set<std::string> kKnownShapes{"ball", "circle", "ellipse", "perturbed-circle"};

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw Error(ErrorCode::invalid_input, "config key '" + key + "': cannot parse '" + text + "'");
  }
  return value;
}

// One config field: section, key, and how to read and write it.
struct Field {
  std::string section;
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

template <typename T>
Field number_field(std::string section, std::string key, T ExperimentConfig::*member) {
  const std::string full = section + "." + key;
  return {section, key,
          [member](const ExperimentConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return io::format_double(c.*member);
            else return std::to_string(c.*member);
          },
          [member, full](ExperimentConfig& c, const std::string& v) { c.*member = parse_number<T>(full, v); }};
}

Field string_field(std::string section, std::string key, std::string ExperimentConfig::*member) {
  return {section, key, [member](const ExperimentConfig& c) { return c.*member; },
          [member](ExperimentConfig& c, const std::string& v) { c.*member = v; }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      string_field("run", "name", &ExperimentConfig::name),
      number_field("run", "seed", &ExperimentConfig::seed),
      string_field("run", "output_dir", &ExperimentConfig::output_dir),
      {"run", "checks", [](const ExperimentConfig& c) { return join(c.checks); },
       [](ExperimentConfig& c, const std::string& v) { c.checks = split(v); }},
      string_field("shape", "preset", &ExperimentConfig::shape),
      number_field("shape", "radius", &ExperimentConfig::radius),
      number_field("shape", "axis_a", &ExperimentConfig::axis_a),
      number_field("shape", "axis_b", &ExperimentConfig::axis_b),
      number_field("shape", "amplitude", &ExperimentConfig::amplitude),
      number_field("shape", "modes", &ExperimentConfig::modes),
      number_field("shape", "shift", &ExperimentConfig::shift),
      number_field("grid", "support_nodes", &ExperimentConfig::support_nodes),
      number_field("grid", "graph_nodes", &ExperimentConfig::graph_nodes),
      number_field("grid", "arrival_nodes", &ExperimentConfig::arrival_nodes),
      number_field("flow", "cfl", &ExperimentConfig::cfl),
      number_field("flow", "area_floor", &ExperimentConfig::area_floor),
      number_field("flow", "snapshot_ds", &ExperimentConfig::snapshot_ds),
      string_field("gauge", "policy", &ExperimentConfig::gauge),
      number_field("gauge", "dT", &ExperimentConfig::gauge_dT),
      number_field("gauge", "dx0", &ExperimentConfig::gauge_dx0),
      number_field("gauge", "dy0", &ExperimentConfig::gauge_dy0),
      number_field("checks", "r", &ExperimentConfig::r),
      number_field("checks", "window_begin", &ExperimentConfig::window_begin),
      number_field("checks", "window_end", &ExperimentConfig::window_end),
      number_field("checks", "arrival_tolerance", &ExperimentConfig::arrival_tolerance),
  };
  return table;
}

template <typename F>
auto in_stage(const std::string& stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), "stage '" + stage + "': " + e.what());
  }
}

bool centrally_symmetric(const std::string& shape) { return shape != "perturbed-circle"; }

VerificationReport arrival_report(const ExperimentConfig& c, const FlowTrajectory& flow,
                                  std::optional<ArrivalField>& field) {
  VerificationReport rep;
  rep.check = "arrival";
  rep.tolerance = 0.0;
  rep.params = {{"nodes", static_cast<double>(c.arrival_nodes)}};
  if (c.shape == "perturbed-circle") {
    rep.verdict = Verdict::inconclusive;
    rep.note = "no signed distance builder for perturbed shapes";
    return rep;
  }
  const bool round = c.shape != "ellipse";
  const double extent = round ? c.radius : std::max(c.axis_a, c.axis_b);
  const auto grid = square_grid(c.arrival_nodes, {0.0, 0.0}, 1.1 * extent);
  field = solve_arrival(round ? disk_domain(grid, c.radius) : ellipse_domain(grid, c.axis_a, c.axis_b));
  rep.inputs_digest = sha256_hex(field->values);
  if (round) {
    const double err = ball_error(*field, c.radius, {0.0, 0.0}, 4.0 * grid.dx);
    rep.params.emplace_back("tolerance", c.arrival_tolerance);
    rep.metrics = {{"linf_error", err}, {"T_hat", field->T_hat}};
    rep.margins = {c.arrival_tolerance - err};
  } else {
    const double gap = std::abs(field->T_hat - flow.T_hat);
    rep.params.emplace_back("tolerance", 5e-3);
    rep.metrics = {{"T_hat", field->T_hat}, {"flow_T_hat", flow.T_hat}, {"gap", gap}};
    rep.margins = {5e-3 - gap};
  }
  rep.verdict = verdict_from_margins(rep.margins, 0.0);
  return rep;
}

}  // namespace

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  c.shape = name;
  if (name == "circle") {
    c.radius = 1.0;
  } else if (name == "ball") {
    c.radius = std::numbers::sqrt2;  // extinction at T = 1
    c.checks = {"arrival", "certificate"};
  } else if (name == "ellipse") {
    c.checks = {"certificate", "duhamel", "key_inequality", "sup_bound"};
  } else if (name == "perturbed-circle") {
    c.checks = {"certificate"};
  } else {
    throw Error(ErrorCode::invalid_input, "unknown preset '" + name + "'");
  }
  return c;
}

std::string to_ini(const ExperimentConfig& config) {
  pt::ptree tree;
  for (const auto& f : fields()) tree.put(pt::ptree::path_type(f.section + "/" + f.key, '/'), f.get(config));
  std::ostringstream os;
  pt::write_ini(os, tree);
  return os.str();
}

ExperimentConfig parse_ini(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::invalid_input, std::string("config: ") + e.what());
  }
  ExperimentConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw Error(ErrorCode::invalid_input, "config key '" + section + "' must sit in a section");
    }
    for (const auto& [key, value] : body) {
      const auto it = std::find_if(fields().begin(), fields().end(), [&](const Field& f) {
        return f.section == section && f.key == key;
      });
      if (it == fields().end()) {
        throw Error(ErrorCode::invalid_input, "unknown config key '" + section + "." + key + "'");
      }
      it->set(c, value.data());
    }
  }
  return c;
}

void validate(const ExperimentConfig& c) {
  auto bad = [](const std::string& field, const std::string& why) {
    throw Error(ErrorCode::invalid_input, "config field '" + field + "' " + why);
  };
  if (!kKnownShapes.contains(c.shape)) bad("shape.preset", "must be circle, ball, ellipse or perturbed-circle");
  if (!(c.radius > 0.0)) bad("shape.radius", "must be positive");
  if (!(c.axis_a > 0.0 && c.axis_b > 0.0)) bad("shape.axis_a/axis_b", "must be positive");
  if (c.modes < 2) bad("shape.modes", "must be >= 2");
  if (c.support_nodes < 16) bad("grid.support_nodes", "must be >= 16");
  if (c.graph_nodes < 16) bad("grid.graph_nodes", "must be >= 16");
  if (c.arrival_nodes < 80) bad("grid.arrival_nodes", "must be >= 80");
  if (!(c.cfl > 0.0 && c.cfl <= 1.0)) bad("flow.cfl", "must lie in (0, 1]");
  if (!(c.area_floor > 0.0 && c.area_floor < 1.0)) bad("flow.area_floor", "must lie in (0, 1)");
  if (!(c.snapshot_ds > 0.0)) bad("flow.snapshot_ds", "must be positive");
  if (c.gauge != "exact" && c.gauge != "estimated") bad("gauge.policy", "must be exact or estimated");
  if (c.r < 2) bad("checks.r", "must be >= 2");
  if (!(c.window_end > c.window_begin)) bad("checks.window_end", "must exceed window_begin");
  for (const auto& check : c.checks) {
    if (!kKnownChecks.contains(check)) bad("run.checks", "has unknown check '" + check + "'");
  }
}

SupportFunction initial_shape(const ExperimentConfig& c) {
  if (c.shape == "circle" || c.shape == "ball") return circle_support(c.support_nodes, c.radius);
  if (c.shape == "ellipse") return ellipse_support(c.support_nodes, c.axis_a, c.axis_b);
  PerturbationSpec spec;
  spec.seed = c.seed;
  spec.amplitude = c.amplitude;
  spec.modes = c.modes;
  spec.shift = c.shift;
  return perturbed_circle_support(c.support_nodes, spec);
}

Gauge choose_gauge(const ExperimentConfig& c, const SupportFunction& initial,
                   const FlowTrajectory& flow) {
  Gauge g = estimated_gauge(flow);
  if (c.gauge == "exact") {
    // Enclosed area falls at rate 2 pi, so T = A(0) / (2 pi) for every convex curve.
    g.T = enclosed_area(initial) / (2.0 * std::numbers::pi);
    if (centrally_symmetric(c.shape)) g.x0 = {0.0, 0.0};
  }
  g.T += c.gauge_dT;
  g.x0[0] += c.gauge_dx0;
  g.x0[1] += c.gauge_dy0;
  return g;
}

const VerificationReport* PipelineResult::report(const std::string& check) const {
  for (const auto& r : reports) {
    if (r.check == check) return &r;
  }
  return nullptr;
}

bool PipelineResult::failed() const {
  return std::any_of(reports.begin(), reports.end(), [](const auto& r) { return is_failure(r.verdict); });
}

PipelineResult run_pipeline(const ExperimentConfig& config) {
  in_stage("config", [&] { validate(config); });
  PipelineResult out;
  out.config = config;
  const auto has = [&](const std::string& check) {
    return std::find(config.checks.begin(), config.checks.end(), check) != config.checks.end();
  };

  const SupportFunction initial = in_stage("shape", [&] { return initial_shape(config); });
  FlowControls controls;
  controls.cfl = config.cfl;
  controls.area_floor = config.area_floor;
  controls.snapshot_ds = config.snapshot_ds;
  out.flow = in_stage("flow", [&] { return run_to_extinction(initial, controls); });
  const Gauge gauge = choose_gauge(config, initial, out.flow);
  const SphereGrid grid = SphereGrid::circle(config.graph_nodes);
  out.graph = in_stage("rescale", [&] { return build_graph_trajectory(out.flow, grid, gauge); });
  const ModeSpectrum spectrum = mode_spectrum(1, grid.dealiased_capacity());

  in_stage("checks", [&] {
    const FitWindow window{config.window_begin, config.window_end};
    std::optional<double> rate;
    try {
      const auto fit = decay_fit(out.graph, config.r, window, 1e-12);
      if (fit.reliable) rate = fit.rate;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::invalid_input) throw;
    }

    if (has("certificate")) {
      CertificateOptions opts;
      opts.r = config.r;
      opts.window = window;
      out.reports.push_back(unique_continuation_certificate(out.graph, spectrum, opts));
      out.reports.back().check = "certificate";
    }
    std::optional<double> c_hat;
    if (has("quadratic_bound") || has("sup_bound")) {
      const auto samples = random_graph_samples(config.seed, 100, grid, grid.dealiased_capacity() / 2,
                                                config.r, 0.1);
      auto q = check_quadratic_bound(samples, config.r);
      c_hat = q.c_hat;
      if (has("quadratic_bound")) out.reports.push_back(std::move(q.report));
    }
    if (has("key_inequality")) {
      for (int k = 1; k <= 6; ++k) {
        KeyInequalityOptions opts;
        opts.k = k;
        opts.r = config.r;
        opts.s0 = config.window_begin;
        opts.horizon = config.window_end - config.window_begin;
        opts.decay_rate = rate.value_or(0.0);
        opts.c_hat = c_hat.value_or(0.0);
        auto rep = verify_key_inequality(out.graph, opts);
        if (!rate) rep.note = "no reliable decay rate; " + rep.note;
        rep.check = "key_inequality_k" + std::to_string(k);
        out.reports.push_back(std::move(rep));
      }
    }
    if (has("sup_bound")) {
      SupBoundOptions opts;
      opts.r = config.r;
      opts.c_hat = c_hat.value_or(1.0);
      opts.decay_rate = rate.value_or(1.0);
      out.reports.push_back(verify_sup_bound(out.graph, opts).report);
    }
    if (has("duhamel")) {
      DuhamelOptions opts;
      opts.r = config.r;
      opts.s = config.window_begin;
      opts.s1 = config.window_begin + 1.0;
      out.reports.push_back(verify_duhamel(out.graph, opts));
    }
    if (has("arrival")) out.reports.push_back(arrival_report(config, out.flow, out.arrival));
  });
  std::sort(out.reports.begin(), out.reports.end(),
            [](const auto& a, const auto& b) { return a.check < b.check; });

  io::TrajectoryHeader header;
  header.shape = config.shape;
  header.params = {{"radius", config.radius}, {"axis_a", config.axis_a},   {"axis_b", config.axis_b},
                   {"amplitude", config.amplitude}, {"modes", static_cast<double>(config.modes)},
                   {"shift", config.shift},       {"support_nodes", static_cast<double>(config.support_nodes)}};
  header.dtau_policy = "rk4, dtau = " + io::format_double(config.cfl) +
                       " * stability bound, landing on s = k * " + io::format_double(config.snapshot_ds);
  header.seed = config.seed;

  auto add = [&](std::string name, std::string content) {
    const std::string digest = sha256_hex(content);
    out.files.push_back({std::move(name), std::move(content), digest});
  };
  add("config.ini", to_ini(config));
  add("trajectory.jsonl", io::trajectory_jsonl(out.flow, header));
  add("graph.jsonl", io::graph_jsonl(out.graph));
  add("spectrum.csv", io::spectrum_csv(spectrum));
  for (const auto& r : out.reports) add("report_" + r.check + ".json", io::report_json(r));
  add("summary.csv", io::summary_csv(out.reports));
  if (out.arrival) {
    add("arrival_header.json", io::arrival_header_json(out.arrival->grid));
    add("arrival.csv", io::arrival_csv(*out.arrival));
  }
  std::sort(out.files.begin(), out.files.end(), [](const auto& a, const auto& b) { return a.name < b.name; });

  nlohmann::ordered_json manifest;
  manifest["name"] = config.name;
  manifest["seed"] = config.seed;
  manifest["config_sha256"] = sha256_hex(to_ini(config));
  nlohmann::ordered_json files = nlohmann::ordered_json::object();
  for (const auto& f : out.files) files[f.name] = f.sha256;
  manifest["files"] = files;
  out.manifest = manifest.dump(2) + "\n";

  if (!config.output_dir.empty()) {
    in_stage("write", [&] {
      const std::filesystem::path dir(config.output_dir);
      for (const auto& f : out.files) io::write_text_file(dir / f.name, f.content);
      io::write_text_file(dir / "manifest.json", out.manifest);
    });
  }
  return out;
}

std::vector<std::string> verify_manifest(const std::string& output_dir) {
  const std::filesystem::path dir(output_dir);
  std::vector<std::string> bad;
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(io::read_text_file(dir / "manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::io, std::string("malformed manifest: ") + e.what());
  }
  for (const auto& [name, digest] : manifest.at("files").items()) {
    const auto path = dir / name;
    if (!std::filesystem::exists(path) || sha256_hex(io::read_text_file(path)) != digest.get<std::string>()) {
      bad.push_back(name);
    }
  }
  return bad;
}

std::vector<ExperimentConfig> seed_range(const ExperimentConfig& base, std::uint64_t first, int count) {
  std::vector<ExperimentConfig> out;
  for (int i = 0; i < count; ++i) {
    ExperimentConfig c = base;
    c.seed = first + static_cast<std::uint64_t>(i);
    c.name = base.name + "-" + std::to_string(c.seed);
    c.output_dir.clear();
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<SweepRow> sweep(std::span<const ExperimentConfig> configs, int jobs) {
  auto run_one = [](ExperimentConfig c) {
    SweepRow row;
    row.name = c.name;
    row.shape = c.shape;
    row.seed = c.seed;
    row.rate = kNaN;
    row.min_margin = kNaN;
    c.output_dir.clear();
    try {
      const auto result = run_pipeline(c);
      const auto* cert = result.report("certificate");
      if (cert) {
        row.verdict = to_string(cert->verdict);
        for (const auto& [k, v] : cert->metrics) {
          if (k == "rate_r") row.rate = v;
        }
      } else {
        row.verdict = result.failed() ? "fail" : "pass";
      }
      for (const auto& r : result.reports) {
        if (r.margins.empty()) continue;
        row.min_margin = std::isnan(row.min_margin) ? r.min_margin() : std::min(row.min_margin, r.min_margin());
      }
    } catch (const std::exception& e) {
      row.verdict = "error";
      row.error = e.what();
    }
    return row;
  };
  std::vector<SweepRow> rows(configs.size());
  const std::size_t width = static_cast<std::size_t>(std::max(1, jobs));
  for (std::size_t begin = 0; begin < configs.size(); begin += width) {
    const std::size_t end = std::min(configs.size(), begin + width);
    if (width == 1) {
      rows[begin] = run_one(configs[begin]);
      continue;
    }
    std::vector<std::future<SweepRow>> pending;
    for (std::size_t i = begin; i < end; ++i) pending.push_back(std::async(std::launch::async, run_one, configs[i]));
    for (std::size_t i = begin; i < end; ++i) rows[i] = pending[i - begin].get();
  }
  return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out = "name,shape,seed,rate,verdict,min_margin,error\n";
  for (const auto& r : rows) {
    std::string err = r.error;
    for (auto& ch : err) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    out += r.name + ',' + r.shape + ',' + std::to_string(r.seed) + ',' +
           (std::isnan(r.rate) ? std::string() : io::format_double(r.rate)) + ',' + r.verdict + ',' +
           (std::isnan(r.min_margin) ? std::string() : io::format_double(r.min_margin)) + ',' + err + '\n';
  }
  return out;
}

}  // namespace mcflab
