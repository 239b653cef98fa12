#include "spaceform/ode.hpp"

#include <cmath>

#include "spaceform/errors.hpp"

namespace spaceform {

namespace {

// Dormand-Prince coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

CVec integrate_rk45(const std::function<CVec(double, const CVec&)>& f, double t0, double t1,
                    CVec y, const IntegratorOptions& opts,
                    const std::function<void(const CVec&)>& on_step,
                    const std::function<CVec(const CVec&)>& point_of, IntegrationStats* stats) {
  const double span = t1 - t0;
  if (span == 0.0) return y;
  const double dir = span > 0 ? 1.0 : -1.0;
  double h = opts.initial_step > 0 ? opts.initial_step * dir : span / 8.0;
  const double h_min = 1e-12 * std::abs(span);
  double t = t0;

  auto exit_error = [&](const std::string& why) {
    return PathExitsDomain("integration aborted: " + why, point_of ? point_of(y) : y);
  };

  CVec k1 = f(t, y);
  int steps = 0;
  while (dir * (t1 - t) > 0) {
    if (++steps > opts.max_steps) throw NoConvergence("ODE integration exceeded the step limit");
    if (dir * (t + h - t1) > 0) h = t1 - t;
    CVec y_new, k7;
    double err = 0.0;
    bool evaluated = true;
    try {
      const CVec k2 = f(t + c2 * h, y + h * (a21 * k1));
      const CVec k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
      const CVec k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      const CVec k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const CVec k6 =
          f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      k7 = f(t + h, y_new);
      const CVec e = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        err = std::max(err, std::abs(e[i]) / sc);
      }
    } catch (const DomainError&) {
      evaluated = false;
    }
    if (!evaluated || !std::isfinite(err)) {
      if (stats) ++stats->rejected;
      h *= 0.25;
      if (std::abs(h) < h_min) throw exit_error("trajectory leaves the admissible domain");
      continue;
    }
    if (err <= 1.0) {
      t += h;
      y = std::move(y_new);
      k1 = std::move(k7);
      if (stats) ++stats->accepted;
      if (on_step) on_step(y);
      const double fac = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      h *= std::min(5.0, std::max(0.2, fac));
    } else {
      if (stats) ++stats->rejected;
      h *= std::max(0.1, 0.9 * std::pow(err, -0.25));
      if (std::abs(h) < h_min) throw NoConvergence("ODE step size underflow");
    }
  }
  return y;
}

}  // namespace spaceform
