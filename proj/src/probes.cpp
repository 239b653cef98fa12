#include "spaceform/probes.hpp"

#include <cmath>

#include "spaceform/errors.hpp"
#include "spaceform/kahler.hpp"

namespace spaceform {

RVec f_minus_one(int n, const RVec& x) {
  if (x.size() != n) throw InvalidInput("point has wrong dimension");
  const double r = x.norm();
  if (r == 0.0) throw DomainError("f_{-1} is not defined at the puncture x = 0");
  if (r >= 1.0) throw DomainError("f_{-1} is defined on the unit ball only");
  RVec y = 0.5 * x;
  y[0] += 0.25 * r;
  return y;
}

RealMap f_minus_one_map(int n) {
  RealMap m;
  m.n = n;
  m.name = "f-minus-one";
  m.f = [n](const RVec& x) { return f_minus_one(n, x); };
  m.jacobian = [n](const RVec& x) {
    const double r = x.norm();
    if (r == 0.0) throw DomainError("f_{-1} is not differentiable at the puncture");
    RMat J = 0.5 * RMat::Identity(n, n);
    J.row(0) += 0.25 * (x / r).transpose();
    return J;
  };
  return m;
}

RealMap identity_map(int n) {
  RealMap m;
  m.n = n;
  m.name = "identity";
  m.f = [](const RVec& x) { return x; };
  m.jacobian = [n](const RVec&) { return RMat(RMat::Identity(n, n)); };
  return m;
}

RealMap polynomial_map(int n) {
  RealMap m;
  m.n = n;
  m.name = "polynomial";
  m.f = [n](const RVec& x) {
    RVec y = 0.5 * x;
    y[0] += 0.2 * x[0] * x[0] - 0.1 * x[n - 1] * x[0];
    y[n - 1] += 0.3 * x[0] * x[n - 1];
    return y;
  };
  m.jacobian = [n](const RVec& x) {
    RMat J = 0.5 * RMat::Identity(n, n);
    J(0, 0) += 0.4 * x[0] - 0.1 * x[n - 1];
    J(0, n - 1) += -0.1 * x[0];
    J(n - 1, 0) += 0.3 * x[n - 1];
    J(n - 1, n - 1) += 0.3 * x[0];
    return J;
  };
  return m;
}

std::vector<RVec> punctured_grid(int n, int per_axis, double radius) {
  std::vector<RVec> out;
  std::size_t total = 1;
  for (int d = 0; d < n; ++d) total *= static_cast<std::size_t>(per_axis);
  for (std::size_t idx = 0; idx < total; ++idx) {
    RVec x(n);
    std::size_t rem = idx;
    for (int d = 0; d < n; ++d) {
      const int j = static_cast<int>(rem % static_cast<std::size_t>(per_axis));
      rem /= static_cast<std::size_t>(per_axis);
      x[d] = radius * (-1.0 + 2.0 * (j + 0.5) / per_axis);
    }
    const double r = x.norm();
    if (r > 0.0 && r < radius) out.push_back(std::move(x));
  }
  return out;
}

JacobianMinimum jacobian_minimum(const RealMap& map, const std::vector<RVec>& grid,
                                 ExecPolicy policy) {
  std::vector<double> det(grid.size());
  for_each_index(policy, grid.size(),
                 [&](std::size_t i) { det[i] = map.jacobian(grid[i]).determinant(); });
  JacobianMinimum out;
  out.points = grid.size();
  out.min_det = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (det[i] < out.min_det) {
      out.min_det = det[i];
      out.location = grid[i];
    }
  return out;
}

DerivativeJump derivative_jump(const RealMap& map, const RVec& plus, const RVec& minus,
                               const std::vector<double>& radii) {
  if (radii.empty()) throw InvalidInput("derivative_jump needs at least one radius");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] < radii[i - 1])) throw InvalidInput("radii must decrease monotonically");
  DerivativeJump out;
  out.radii = radii;
  const RVec up = plus.normalized(), um = minus.normalized();
  for (double r : radii) {
    out.limit_plus = map.jacobian(r * up);
    out.limit_minus = map.jacobian(r * um);
    out.jumps.push_back((out.limit_plus - out.limit_minus).cwiseAbs().maxCoeff());
  }
  out.jump_matrix = out.limit_plus - out.limit_minus;
  out.jump = out.jumps.back();
  return out;
}

RMat real_model_metric(double c, const RVec& y) {
  const double denom = 1.0 + c * y.squaredNorm();
  if (!(denom > 0.0)) throw DomainError("point outside the real model ball");
  return (4.0 / (denom * denom)) * RMat::Identity(y.size(), y.size());
}

RMat real_pullback_metric(const RealMap& map, double c, const RVec& x) {
  const RMat J = map.jacobian(x);
  return J.transpose() * real_model_metric(c, map.f(x)) * J;
}

namespace {

// Gamma[l](j, k) = Gamma^l_{jk} from central differences of g.
std::vector<RMat> christoffel(const RealMetric& g, const RVec& x, double h) {
  const Eigen::Index n = x.size();
  std::vector<RMat> dg(static_cast<std::size_t>(n));
  for (Eigen::Index a = 0; a < n; ++a) {
    RVec xp = x, xm = x;
    xp[a] += h;
    xm[a] -= h;
    dg[static_cast<std::size_t>(a)] = (g(xp) - g(xm)) / (2.0 * h);
  }
  const RMat ginv = g(x).inverse();
  std::vector<RMat> gamma(static_cast<std::size_t>(n), RMat::Zero(n, n));
  for (Eigen::Index l = 0; l < n; ++l)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k) {
        double s = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
          s += ginv(l, p) * (dg[static_cast<std::size_t>(j)](p, k) +
                             dg[static_cast<std::size_t>(k)](p, j) -
                             dg[static_cast<std::size_t>(p)](j, k));
        gamma[static_cast<std::size_t>(l)](j, k) = 0.5 * s;
      }
  return gamma;
}

}  // namespace

namespace {

double sectional_curvature_at_step(const RealMetric& g, const RVec& x, const RVec& u,
                                   const RVec& v, double step) {
  const Eigen::Index n = x.size();
  const auto G = christoffel(g, x, step);
  std::vector<std::vector<RMat>> dG(static_cast<std::size_t>(n));  // dG[i][l](j,k) = d_i Gamma^l_jk
  for (Eigen::Index i = 0; i < n; ++i) {
    RVec xp = x, xm = x;
    xp[i] += step;
    xm[i] -= step;
    const auto Gp = christoffel(g, xp, step);
    const auto Gm = christoffel(g, xm, step);
    for (Eigen::Index l = 0; l < n; ++l)
      dG[static_cast<std::size_t>(i)].push_back((Gp[static_cast<std::size_t>(l)] -
                                                 Gm[static_cast<std::size_t>(l)]) /
                                                (2.0 * step));
  }
  auto gam = [&](Eigen::Index l, Eigen::Index j, Eigen::Index k) {
    return G[static_cast<std::size_t>(l)](j, k);
  };
  // R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z, K = g(R(u,v)v, u) / |u ^ v|^2.
  const RMat gx = g(x);
  RVec Ruvv = RVec::Zero(n);
  for (Eigen::Index l = 0; l < n; ++l)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k) {
          double R = dG[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)](j, k) -
                     dG[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)](i, k);
          for (Eigen::Index mm = 0; mm < n; ++mm)
            R += gam(l, i, mm) * gam(mm, j, k) - gam(l, j, mm) * gam(mm, i, k);
          Ruvv[l] += R * u[i] * v[j] * v[k];
        }
  const double num = u.dot(gx * Ruvv);
  const double den = u.dot(gx * u) * v.dot(gx * v) - std::pow(u.dot(gx * v), 2);
  if (!(den > 0.0)) throw InvalidInput("plane vectors are linearly dependent");
  return num / den;
}

}  // namespace

double real_sectional_curvature(const RealMetric& g, const RVec& x, const RVec& u, const RVec& v,
                                double step) {
  // One Richardson step on the h^2 error term; near x = 0 the pulled-back
  // metric varies on the scale |x| and plain central differences lose digits.
  const double coarse = sectional_curvature_at_step(g, x, u, v, step);
  const double fine = sectional_curvature_at_step(g, x, u, v, 0.5 * step);
  return (4.0 * fine - coarse) / 3.0;
}

ConeProfile cone_profile(const std::string& entry, const CatalogParams& params,
                         const std::vector<double>& distances, const CVec& tail,
                         ExecPolicy policy) {
  if (entry != "cone-flat" && entry != "cone-log")
    throw InvalidInput("cone profiles need a cone catalog entry");
  const MetricField field = catalog(entry, params);
  const int n = field.dim();
  ConeProfile out;
  out.entry = entry;
  out.beta = params.beta.empty() ? std::vector<double>(static_cast<std::size_t>(n), 1.0)
                                 : params.beta;
  out.expected_hsc = entry == "cone-flat" ? 0.0 : params.c.value_or(-4.0);
  out.expected_rate = 2.0 * (out.beta[0] - 1.0);
  CVec rest = tail;
  if (rest.size() == 0) rest = CVec::Constant(n - 1, cplx(0.3, 0.0));
  if (rest.size() != n - 1) throw InvalidInput("tail must fix the remaining n - 1 coordinates");

  out.rows.resize(distances.size());
  std::vector<double> deviation(distances.size(), 0.0);
  for_each_index(policy, distances.size(), [&](std::size_t i) {
    CVec z(n);
    z[0] = distances[i];
    z.tail(n - 1) = rest;
    field.check_point(z);
    const CurvatureComponents R = curvature_at(field, z);
    const CMat H = field.metric_at(z);
    // Coordinate axes plus two mixed directions.
    std::vector<CVec> dirs;
    for (int k = 0; k < n; ++k) dirs.push_back(CVec::Unit(n, k));
    dirs.push_back(CVec::Ones(n));
    CVec mixed = CVec::Ones(n);
    mixed[n - 1] = I_unit;
    dirs.push_back(mixed);
    double worst = 0.0;
    for (const auto& d : dirs) worst = std::max(worst, std::abs(hsc(R, H, RealTangent(d)) - out.expected_hsc));
    ConeProfileRow& row = out.rows[i];
    row.point = z;
    row.hsc = hsc(R, H, RealTangent(dirs[static_cast<std::size_t>(n)]));
    row.det_g = H.determinant().real();
    row.distance = field.domain().distance_to_punctures(z);
    deviation[i] = worst;
  });
  for (double d : deviation) out.max_hsc_deviation = std::max(out.max_hsc_deviation, d);

  // Least-squares slope of log g_{1 1bar} against log |z1|.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(out.rows.size());
  for (const auto& row : out.rows) {
    const double lx = std::log(std::abs(row.point[0]));
    const double ly = std::log(field.metric_at(row.point)(0, 0).real());
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = k * sxx - sx * sx;
  out.rate_exponent = den != 0.0 ? (k * sxy - sx * sy) / den : 0.0;
  return out;
}

void write_profile_csv(std::ostream& os, const ConeProfile& profile) {
  const std::size_t n = profile.rows.empty() ? 0 : static_cast<std::size_t>(profile.rows[0].point.size());
  for (std::size_t i = 0; i < n; ++i) os << "re_z" << i + 1 << ",im_z" << i + 1 << ",";
  os << "hsc,det_j,distance_to_divisor\n";
  os.precision(17);
  for (const auto& row : profile.rows) {
    for (std::size_t i = 0; i < n; ++i)
      os << row.point[static_cast<Eigen::Index>(i)].real() << ','
         << row.point[static_cast<Eigen::Index>(i)].imag() << ',';
    os << row.hsc << ',' << row.det_g << ',' << row.distance << '\n';
  }
}

}  // namespace spaceform
