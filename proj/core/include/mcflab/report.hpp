#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mcflab {

enum class Verdict { pass, fail, inconclusive, rigid, quantized, violation };

const char* to_string(Verdict v);
/// fail and violation are the verdicts that make a run exit nonzero.
bool is_failure(Verdict v);

using NamedValues = std::vector<std::pair<std::string, double>>;

/// Outcome of one estimate check. Margins are slacks (bound minus measured
/// value); the verdict is pass only if every margin is >= -tolerance.
struct VerificationReport {
  std::string check;
  NamedValues params;
  std::string inputs_digest;
  std::vector<double> margins;
  double tolerance = 0.0;
  Verdict verdict = Verdict::inconclusive;
  std::string note;
  NamedValues metrics;

  double min_margin() const;
  /// Looks up a metric by name; throws if missing.
  double metric(const std::string& name) const;
};

/// pass when every margin is >= -tolerance, fail otherwise. Empty margins
/// give inconclusive.
Verdict verdict_from_margins(std::span<const double> margins, double tolerance);

/// Hex SHA-256 of raw bytes, used for input digests and manifests.
std::string sha256_hex(std::string_view bytes);
std::string sha256_hex(std::span<const double> values);

}  // namespace mcflab
