#pragma once

#include "fracporo/types.hpp"

#include <string>

namespace fracporo {

/// Q0: no contact terms. Q: normal compliance and regularized friction.
enum class Mode { kQ0, kQ };

const char* to_string(Mode mode);
/// Accepts "Q0" or "Q"; throws ValidationError otherwise.
Mode parse_mode(const std::string& text);

/// Coefficients over free dofs: displacement U, velocity X = dU/dt, pressure P.
/// The fracture pressure is the trace of P on the fracture dofs.
struct State {
  double t = 0.0;
  Vector U;
  Vector X;
  Vector P;
};

}  // namespace fracporo
