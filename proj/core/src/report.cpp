#include "mcflab/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "mcflab/common.hpp"

namespace mcflab {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
    case Verdict::rigid: return "rigid";
    case Verdict::quantized: return "quantized";
    case Verdict::violation: return "violation";
  }
  return "unknown";
}

bool is_failure(Verdict v) { return v == Verdict::fail || v == Verdict::violation; }

double VerificationReport::min_margin() const {
  if (margins.empty()) return std::numeric_limits<double>::quiet_NaN();
  return *std::min_element(margins.begin(), margins.end());
}

double VerificationReport::metric(const std::string& name) const {
  for (const auto& [key, value] : metrics) {
    if (key == name) return value;
  }
  throw Error(ErrorCode::invalid_input, "report " + check + " has no metric " + name);
}

Verdict verdict_from_margins(std::span<const double> margins, double tolerance) {
  if (margins.empty()) return Verdict::inconclusive;
  for (double m : margins) {
    if (!(m >= -tolerance)) return Verdict::fail;
  }
  return Verdict::pass;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::io, "SHA-256 digest failed");
  }
  std::string out;
  out.reserve(2 * length);
  char buf[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    out += buf;
  }
  return out;
}

std::string sha256_hex(std::span<const double> values) {
  return sha256_hex(std::string_view(reinterpret_cast<const char*>(values.data()),
                                     values.size() * sizeof(double)));
}

}  // namespace mcflab
