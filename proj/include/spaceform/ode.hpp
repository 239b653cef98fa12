#pragma once

#include <functional>

#include "spaceform/linalg.hpp"

namespace spaceform {

struct IntegratorOptions {
  double rtol = 1e-9;
  double atol = 1e-11;
  double initial_step = 0.0;  // 0: pick from the span
  int max_steps = 200000;
};

struct IntegrationStats {
  int accepted = 0;
  int rejected = 0;
};

/// Dormand-Prince 5(4) adaptive integration of y' = f(t, y) from t0 to t1.
///
/// If `f` throws DomainError the step is shrunk; `on_step(y)` is called after
/// each accepted step and may throw to abort. Throws PathExitsDomain with the
/// last good state (via `point_of`) when the step size collapses.
CVec integrate_rk45(const std::function<CVec(double, const CVec&)>& f, double t0, double t1,
                    CVec y0, const IntegratorOptions& opts,
                    const std::function<void(const CVec&)>& on_step = {},
                    const std::function<CVec(const CVec&)>& point_of = {},
                    IntegrationStats* stats = nullptr);

}  // namespace spaceform
