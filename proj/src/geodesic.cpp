#include "spaceform/geodesic.hpp"

#include <cmath>

#include "spaceform/errors.hpp"

namespace spaceform {

namespace {

// M = H^{-1} sum_j w_j dH_j, so that Gamma(u, w) = M u.
CMat connection_matrix(const MetricField& field, const CVec& z, const CVec& w) {
  const MetricData d = field.derivatives(z, 1);
  CMat S = CMat::Zero(z.size(), z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) S += w[j] * d.dH[static_cast<std::size_t>(j)];
  return d.H.llt().solve(S);
}

CVec geodesic_state(const CVec& z, const CVec& zdot, const CMat* T) {
  const Eigen::Index n = z.size();
  CVec y(2 * n + (T ? n * n : 0));
  y.head(n) = z;
  y.segment(n, n) = zdot;
  if (T) y.tail(n * n) = Eigen::Map<const CVec>(T->data(), n * n);
  return y;
}

GeodesicTransport run_geodesic(const MetricField& field, const CVec& p, const CVec& v, double t,
                               bool with_transport, const IntegratorOptions& opts) {
  const Eigen::Index n = p.size();
  if (v.size() != n) throw InvalidInput("velocity dimension does not match the base point");
  field.check_point(p);
  const CMat I = CMat::Identity(n, n);
  CVec y0 = geodesic_state(p, v, with_transport ? &I : nullptr);
  auto rhs = [&](double, const CVec& y) {
    const CVec z = y.head(n);
    const CVec zdot = y.segment(n, n);
    const CMat M = connection_matrix(field, z, zdot);
    CVec dy(y.size());
    dy.head(n) = zdot;
    dy.segment(n, n) = -M * zdot;
    if (with_transport) {
      const Eigen::Map<const CMat> T(y.data() + 2 * n, n, n);
      const CMat dT = -M * T;
      dy.tail(n * n) = Eigen::Map<const CVec>(dT.data(), n * n);
    }
    return dy;
  };
  auto on_step = [&](const CVec& y) {
    if (!field.domain().admissible(y.head(n)))
      throw PathExitsDomain("geodesic leaves the admissible domain", y.head(n));
  };
  auto point_of = [n](const CVec& y) -> CVec { return y.head(n); };
  const CVec y = integrate_rk45(rhs, 0.0, t, std::move(y0), opts, on_step, point_of);
  GeodesicTransport out;
  out.end.z = y.head(n);
  out.end.zdot = y.segment(n, n);
  if (with_transport) out.T = Eigen::Map<const CMat>(y.data() + 2 * n, n, n);
  return out;
}

}  // namespace

GeodesicState geodesic(const MetricField& field, const CVec& p, const CVec& v, double t,
                       const IntegratorOptions& opts) {
  return run_geodesic(field, p, v, t, false, opts).end;
}

GeodesicTransport geodesic_transport(const MetricField& field, const CVec& p, const CVec& v,
                                     double t, const IntegratorOptions& opts) {
  return run_geodesic(field, p, v, t, true, opts);
}

CVec exp_map(const MetricField& field, const CVec& p, const CVec& v,
             const IntegratorOptions& opts) {
  return geodesic(field, p, v, 1.0, opts).z;
}

CMat transport_matrix(const MetricField& field, const std::vector<CVec>& path,
                      const IntegratorOptions& opts) {
  if (path.empty()) throw InvalidInput("empty path");
  const Eigen::Index n = path.front().size();
  CMat total = CMat::Identity(n, n);
  for (std::size_t s = 0; s + 1 < path.size(); ++s) {
    const CVec a = path[s];
    const CVec w = path[s + 1] - a;
    if (w.norm() == 0.0) continue;
    field.check_point(a);
    auto rhs = [&](double t, const CVec& y) {
      const CVec z = a + t * w;
      const CMat M = connection_matrix(field, z, w);
      const Eigen::Map<const CMat> T(y.data(), n, n);
      const CMat dT = -M * T;
      return CVec(Eigen::Map<const CVec>(dT.data(), n * n));
    };
    auto on_step = [&](const CVec&) {};
    const CVec y0 = Eigen::Map<const CVec>(total.data(), n * n);
    const CVec y = integrate_rk45(rhs, 0.0, 1.0, y0, opts, on_step,
                                  [&](const CVec&) -> CVec { return a; });
    total = Eigen::Map<const CMat>(y.data(), n, n);
  }
  return total;
}

CVec parallel_transport(const MetricField& field, const std::vector<CVec>& path, const CVec& v,
                        const IntegratorOptions& opts) {
  return transport_matrix(field, path, opts) * v;
}

ShootingResult shoot(const MetricField& field, const CVec& p, const CVec& q,
                     const ShootingOptions& opts) {
  const Eigen::Index n = p.size();
  const double tol = opts.abs_tol + opts.rel_tol * (q - p).norm();
  const double accept = std::max(1e3 * tol, 1e-9);
  auto residual = [&](const CVec& v) -> RVec { return to_real(exp_map(field, p, v, opts.integrator) - q); };

  // Second-order start from exp_p(v) = p + v - Gamma(v, v)/2 + O(|v|^3), with the
  // matching Jacobian I - Gamma(v, .). A finite-difference Jacobian replaces it
  // as soon as the iteration stops contracting.
  const MetricData d0 = field.derivatives(p, 1);
  const auto llt = d0.H.llt();
  const CVec chord = q - p;
  CMat S = CMat::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) S += chord[j] * d0.dH[static_cast<std::size_t>(j)];
  ShootingResult out;
  out.v = chord + 0.5 * llt.solve(S * chord);
  CMat G(n, n);
  for (Eigen::Index j = 0; j < n; ++j) G.col(j) = d0.dH[static_cast<std::size_t>(j)] * out.v;
  const CMat Jc = CMat::Identity(n, n) - llt.solve(G);
  RMat J(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const cplx c = Jc(i, j);
      J(2 * i, 2 * j) = c.real();
      J(2 * i, 2 * j + 1) = -c.imag();
      J(2 * i + 1, 2 * j) = c.imag();
      J(2 * i + 1, 2 * j + 1) = c.real();
    }
  RVec r;
  try {
    r = residual(out.v);
  } catch (const PathExitsDomain&) {
    out.v = chord;
    r = residual(out.v);
  }
  out.residual = r.norm();
  bool fresh = false;
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opts.max_iterations && out.residual > tol; ++it) {
    out.iterations = it + 1;
    // Reuse the Jacobian while the last step contracted strongly.
    if (J.size() == 0 || (it > 0 && out.residual > 0.1 * previous)) {
      const RVec x = to_real(out.v);
      const double h = opts.fd_step * std::max(1.0, x.norm());
      J.resize(2 * n, 2 * n);
      for (Eigen::Index k = 0; k < 2 * n; ++k) {
        RVec xk = x;
        xk[k] += h;
        J.col(k) = (residual(to_complex(xk)) - r) / h;
      }
      fresh = true;
    } else {
      fresh = false;
    }
    const RVec delta = J.partialPivLu().solve(-r);
    double step = 1.0;
    bool improved = false;
    for (int halving = 0; halving < 12; ++halving, step *= 0.5) {
      const CVec trial = out.v + step * to_complex(delta);
      RVec rt;
      try {
        rt = residual(trial);
      } catch (const PathExitsDomain&) {
        continue;
      }
      if (rt.norm() < out.residual) {
        previous = out.residual;
        out.v = trial;
        r = rt;
        out.residual = rt.norm();
        improved = true;
        break;
      }
    }
    if (!improved) {
      if (!fresh) {
        J.resize(0, 0);
        continue;
      }
      break;
    }
  }
  if (out.residual > tol && out.residual > accept)
    throw NoConvergence("geodesic shooting did not converge (residual " +
                        std::to_string(out.residual) + ")");
  return out;
}

}  // namespace spaceform
