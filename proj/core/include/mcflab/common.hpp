#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mcflab {

using Vec2 = std::array<double, 2>;

inline double norm(const Vec2& v) { return std::hypot(v[0], v[1]); }

enum class ErrorCode {
  invalid_input,
  aliasing,
  convexity_loss,
  step_rejected,
  step_underflow,
  domain,
  graph_condition,
  not_star_shaped,
  unsupported,
  io,
};

const char* to_string(ErrorCode code);

// All library failures surface as mcflab::Error; the code lets callers
// (the CLI in particular) map failures onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mcflab
