#include "mcflab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mcflab::io {

using nlohmann::ordered_json;

namespace {

ordered_json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

ordered_json named(const NamedValues& values) {
  ordered_json out = ordered_json::object();
  for (const auto& [k, v] : values) out[k] = number(v);
  return out;
}

ordered_json coeffs_array(const SpectralCoeffs& coeffs) {
  ordered_json blocks = ordered_json::array();
  for (int l = 0; l <= coeffs.l_max(); ++l) {
    blocks.push_back({l, coeffs[l].cos_part, coeffs[l].sin_part});
  }
  return blocks;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string coeffs_json(const SpectralCoeffs& coeffs) {
  ordered_json j;
  j["n"] = coeffs.dimension();
  j["l_max"] = coeffs.l_max();
  j["blocks"] = coeffs_array(coeffs);
  return j.dump() + "\n";
}

SpectralCoeffs parse_coeffs_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const int n = j.at("n").get<int>();
    const int l_max = j.at("l_max").get<int>();
    if (l_max < 0) throw Error(ErrorCode::io, "l_max must be >= 0");
    SpectralCoeffs out(n, l_max);
    for (const auto& b : j.at("blocks")) {
      const int l = b.at(0).get<int>();
      if (l < 0 || l > l_max) throw Error(ErrorCode::io, "block index out of range");
      out[l].cos_part = b.at(1).get<double>();
      out[l].sin_part = b.at(2).get<double>();
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::io, std::string("malformed coefficient file: ") + e.what());
  }
}

std::string spectrum_csv(const ModeSpectrum& spectrum) {
  std::ostringstream os;
  os << "l,nu,lambda\n";
  for (const auto& e : spectrum.entries) {
    os << e.l << ',' << format_double(e.nu.value()) << ',' << format_double(e.lambda.value()) << '\n';
  }
  return os.str();
}

std::string trajectory_jsonl(const FlowTrajectory& traj, const TrajectoryHeader& header) {
  std::string out;
  ordered_json h;
  h["shape"] = header.shape;
  h["params"] = named(header.params);
  h["dtau_policy"] = header.dtau_policy;
  h["seed"] = header.seed;
  h["T_hat"] = traj.T_hat;
  h["x0_hat"] = {traj.x0_hat[0], traj.x0_hat[1]};
  h["steps"] = traj.steps;
  out += h.dump() + "\n";
  for (const auto& snap : traj.snapshots) {
    ordered_json r;
    r["tau"] = snap.shape.tau;
    r["m"] = snap.shape.nodes();
    r["h"] = snap.shape.h;
    r["area"] = snap.area;
    r["length"] = snap.length;
    r["time_to_go"] = snap.time_to_go;
    out += r.dump() + "\n";
  }
  return out;
}

std::string graph_jsonl(const GraphTrajectory& traj, int r_max) {
  std::string out;
  for (const auto& snap : traj.snapshots) {
    ordered_json r;
    r["s"] = snap.s;
    r["l_max"] = snap.coeffs.l_max();
    r["coeffs"] = coeffs_array(snap.coeffs);
    r["sup_norm"] = sup_norm(snap.u);
    ordered_json norms = ordered_json::object();
    for (int k = 0; k <= r_max; ++k) norms[std::to_string(k)] = sobolev_norm(snap.coeffs, k);
    r["h_norms"] = norms;
    out += r.dump() + "\n";
  }
  return out;
}

std::string report_json(const VerificationReport& report) {
  ordered_json j;
  j["check"] = report.check;
  j["params"] = named(report.params);
  j["inputs_digest"] = report.inputs_digest;
  j["tolerance"] = report.tolerance;
  ordered_json margins = ordered_json::array();
  for (double m : report.margins) margins.push_back(number(m));
  j["margins"] = margins;
  j["verdict"] = to_string(report.verdict);
  j["note"] = report.note;
  j["metrics"] = named(report.metrics);
  return j.dump(2) + "\n";
}

std::string summary_csv(std::span<const VerificationReport> reports) {
  std::ostringstream os;
  os << "check,verdict,min_margin,tolerance,note\n";
  for (const auto& r : reports) {
    std::string note = r.note;
    for (auto& c : note) {
      if (c == ',' || c == '\n') c = ';';
    }
    os << r.check << ',' << to_string(r.verdict) << ','
       << (r.margins.empty() ? std::string() : format_double(r.min_margin())) << ','
       << format_double(r.tolerance) << ',' << note << '\n';
  }
  return os.str();
}

std::string arrival_header_json(const CartesianGrid& grid) {
  ordered_json j;
  j["nx"] = grid.nx;
  j["ny"] = grid.ny;
  j["dx"] = grid.dx;
  j["origin"] = {grid.origin[0], grid.origin[1]};
  return j.dump() + "\n";
}

std::string arrival_csv(const ArrivalField& field) {
  std::string out = "x,y,t\n";
  const auto& g = field.grid;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double t = field.at(i, j);
      if (!std::isfinite(t)) continue;
      const Vec2 p = g.node(i, j);
      out += format_double(p[0]) + ',' + format_double(p[1]) + ',' + format_double(t) + '\n';
    }
  }
  return out;
}

std::string residual_csv(const ResidualReport& report) {
  std::string out = "annulus_radius,exponent\n";
  for (const auto& e : report.exponents) {
    out += format_double(e.annulus_radius) + ',' + format_double(e.exponent) + '\n';
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::io, "cannot open " + path.string() + " for writing");
  f << content;
  if (!f) throw Error(ErrorCode::io, "failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::io, "cannot open " + path.string());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace mcflab::io
