#include "spaceform/models.hpp"

#include <cmath>

#include "spaceform/errors.hpp"

namespace spaceform {

namespace {

// Affine coordinates are kept below this modulus before switching charts.
constexpr double kChartBound = 10.0;

bool curved(const ModelSpace& m) { return m.sign() != CurvatureSign::zero; }

CMat signature_form(int n) {
  CMat J = CMat::Identity(n + 1, n + 1);
  J(n, n) = -1.0;
  return J;
}

// <a, b> = b^H J a for the ball, b^H a for projective space.
cplx form(const ModelSpace& m, const CVec& a, const CVec& b) {
  cplx s = b.dot(a);
  if (m.sign() == CurvatureSign::negative) {
    const Eigen::Index n = a.size() - 1;
    s -= 2.0 * std::conj(b[n]) * a[n];
  }
  return s;
}

int chart_of(const ModelSpace& m, const ModelPoint& p) {
  return m.sign() == CurvatureSign::positive && p.chart >= 0 ? p.chart : m.dim();
}

CVec insert_at(const CVec& v, int k, cplx value) {
  CVec out(v.size() + 1);
  for (Eigen::Index i = 0, j = 0; i < out.size(); ++i) out[i] = (i == k) ? value : v[j++];
  return out;
}

CVec remove_at(const CVec& v, int k) {
  CVec out(v.size() - 1);
  for (Eigen::Index i = 0, j = 0; i < v.size(); ++i)
    if (i != k) out[j++] = v[i];
  return out;
}

// Homogeneous lift (unnormalized).
CVec homogeneous(const ModelSpace& m, const ModelPoint& p) {
  return insert_at(p.coords, chart_of(m, p), 1.0);
}

struct Lift {
  CVec P;      // normalized representative: <P,P> = +1 (c>0) or -1 (c<0)
  double s;    // normalization factor: P = Z / s
  int chart;
};

Lift normalized_lift(const ModelSpace& m, const ModelPoint& p) {
  const CVec Z = homogeneous(m, p);
  const double q = form(m, Z, Z).real();
  if (m.sign() == CurvatureSign::negative && !(q < 0.0))
    throw DomainError("point outside the model ball");
  const double s = std::sqrt(std::abs(q));
  return {Z / s, s, chart_of(m, p)};
}

// Horizontal lift of an affine tangent vector at p.
CVec horizontal(const ModelSpace& m, const Lift& L, const CVec& v) {
  const CVec X = insert_at(v, L.chart, 0.0) / L.s;
  const double pp = form(m, L.P, L.P).real();
  return X - (form(m, X, L.P) / pp) * L.P;
}

// Affine tangent in chart k of the curve Q + tV.
CVec chart_tangent(const CVec& Q, const CVec& V, int k) {
  const cplx qk = Q[k];
  CVec full = (V * qk - Q * V[k]) / (qk * qk);
  return remove_at(full, k);
}

int best_chart(const CVec& Z) {
  Eigen::Index k = 0;
  Z.cwiseAbs().maxCoeff(&k);
  return static_cast<int>(k);
}

ModelPoint from_homogeneous(const ModelSpace& m, const CVec& Z, int preferred) {
  const int n = m.dim();
  if (m.sign() == CurvatureSign::negative) {
    if (std::abs(Z[n]) < 1e-300) throw DomainError("point at infinity for the ball model");
    ModelPoint p{remove_at(Z, n) / Z[n], n};
    if (p.coords.squaredNorm() >= 1.0) throw DomainError("point outside the model ball");
    return p;
  }
  int k = preferred >= 0 ? preferred : n;
  if (std::abs(Z[k]) * kChartBound < Z.cwiseAbs().maxCoeff()) k = best_chart(Z);
  return ModelPoint{remove_at(Z, k) / Z[k], k};
}

// Geodesic data from P in horizontal direction V: returns Q = T P and the
// transvection matrix T (acting on homogeneous vectors).
struct Transvection {
  CVec Q;
  CMat T;
};

Transvection transvect(const ModelSpace& m, const CVec& P, const CVec& V) {
  const Eigen::Index N = P.size();
  const double theta = std::sqrt(std::max(0.0, form(m, V, V).real()));
  CMat T = CMat::Identity(N, N);
  if (theta < 1e-300) return {P, T};
  const CVec U = V / theta;
  double c, s, s_back;
  if (m.sign() == CurvatureSign::negative) {
    c = std::cosh(theta);
    s = std::sinh(theta);
    s_back = s;  // T U = sinh P + cosh U
  } else {
    c = std::cos(theta);
    s = std::sin(theta);
    s_back = -s;  // T U = -sin P + cos U
  }
  // T = I + (c-1)(P <.,P>/<P,P> + U <.,U>) + s U <.,P>/<P,P> + s_back P <.,U>
  const double pp = form(m, P, P).real();
  CMat J = (m.sign() == CurvatureSign::negative) ? signature_form(static_cast<int>(N - 1))
                                                   : CMat::Identity(N, N);
  const Eigen::RowVectorXcd fP = (P.adjoint() * J) / pp;  // x -> <x,P>/<P,P>
  const Eigen::RowVectorXcd fU = U.adjoint() * J;         // x -> <x,U>
  T += (c - 1.0) * (P * fP + U * fU) + s * (U * fP) + s_back * (P * fU);
  return {c * P + s * U, T};
}

}  // namespace

ModelSpace::ModelSpace(double c, int n) : c_(c), n_(n) {
  if (n < 1) throw InvalidInput("model dimension must be >= 1");
  if (!std::isfinite(c)) throw InvalidInput("model curvature must be finite");
  if (c < 0) {
    sign_ = CurvatureSign::negative;
    scale_ = 4.0 / -c;
  } else if (c > 0) {
    sign_ = CurvatureSign::positive;
    scale_ = 4.0 / c;
  } else {
    sign_ = CurvatureSign::zero;
    scale_ = 1.0;
  }
}

ModelPoint ModelPoint::standard(const ModelSpace& m, CVec z) {
  if (z.size() != m.dim()) throw InvalidInput("model point has wrong dimension");
  return ModelPoint{std::move(z), m.sign() == CurvatureSign::positive ? m.dim() : -1};
}

ModelIsometry ModelIsometry::identity(const ModelSpace& m) {
  ModelIsometry s;
  s.sign = m.sign();
  if (curved(m)) {
    s.M = CMat::Identity(m.dim() + 1, m.dim() + 1);
  } else {
    s.U = CMat::Identity(m.dim(), m.dim());
    s.b = CVec::Zero(m.dim());
  }
  return s;
}

double ModelIsometry::group_residual() const {
  switch (sign) {
    case CurvatureSign::zero:
      return (U.adjoint() * U - CMat::Identity(U.rows(), U.cols())).cwiseAbs().maxCoeff();
    case CurvatureSign::positive:
      return (M.adjoint() * M - CMat::Identity(M.rows(), M.cols())).cwiseAbs().maxCoeff();
    case CurvatureSign::negative: {
      const CMat J = signature_form(static_cast<int>(M.rows() - 1));
      return (M.adjoint() * J * M - J).cwiseAbs().maxCoeff();
    }
  }
  return 0.0;
}

void check_domain(const ModelSpace& m, const ModelPoint& p) {
  if (p.coords.size() != m.dim()) throw InvalidInput("model point has wrong dimension");
  if (!p.coords.allFinite()) throw DomainError("non-finite model point");
  if (m.sign() == CurvatureSign::negative && p.coords.squaredNorm() >= 1.0)
    throw DomainError("point outside the model ball (|z| >= 1)");
}

CMat model_metric_at(const ModelSpace& m, const ModelPoint& p) {
  check_domain(m, p);
  const int n = m.dim();
  const CVec& z = p.coords;
  const double r2 = z.squaredNorm();
  const CMat zz = z * z.adjoint();  // (i,j) = z_i conj(z_j)
  switch (m.sign()) {
    case CurvatureSign::zero: return CMat::Identity(n, n);
    case CurvatureSign::negative: {
      const double d = 1.0 - r2;
      return m.scale() * (CMat::Identity(n, n) / d + zz / (d * d));
    }
    case CurvatureSign::positive: {
      const double d = 1.0 + r2;
      return m.scale() * (CMat::Identity(n, n) / d - zz / (d * d));
    }
  }
  return {};
}

ModelPoint model_exp(const ModelSpace& m, const ModelPoint& p, const CVec& v) {
  check_domain(m, p);
  if (!curved(m)) return ModelPoint{p.coords + v, p.chart};
  const Lift L = normalized_lift(m, p);
  const Transvection t = transvect(m, L.P, horizontal(m, L, v));
  return from_homogeneous(m, t.Q, L.chart);
}

namespace {

// Horizontal log at P toward Q (normalized). Returns V with exp_P(V) = [Q].
CVec horizontal_log(const ModelSpace& m, const CVec& P, CVec Q) {
  const cplx pq = form(m, Q, P);
  const double a = std::abs(pq);
  if (m.sign() == CurvatureSign::positive && a < 1e-12)
    throw NoConvergence("model_log: target is on the cut locus (antipodal) of the base point");
  Q *= std::conj(pq) / a;  // now <Q,P> = a (real, positive)
  double theta, ratio;
  CVec W;
  if (m.sign() == CurvatureSign::negative) {
    // <Q,P> = -cosh(theta); phase so that <Q,P> is real negative.
    Q = -Q;
    const double ch = std::max(1.0, a);
    theta = std::acosh(ch);
    W = Q - ch * P;
    ratio = theta > 1e-12 ? theta / std::sinh(theta) : 1.0;
  } else {
    const double cs = std::min(1.0, a);
    theta = std::acos(cs);
    W = Q - cs * P;
    ratio = theta > 1e-12 ? theta / std::sin(theta) : 1.0;
  }
  return ratio * W;
}

}  // namespace

CVec model_log(const ModelSpace& m, const ModelPoint& p, const ModelPoint& q) {
  check_domain(m, p);
  check_domain(m, q);
  if (!curved(m)) {
    if (chart_of(m, p) != chart_of(m, q)) throw InvalidInput("flat points in different charts");
    return q.coords - p.coords;
  }
  const Lift Lp = normalized_lift(m, p);
  const Lift Lq = normalized_lift(m, q);
  const CVec V = horizontal_log(m, Lp.P, Lq.P);
  return chart_tangent(Lp.P, V, Lp.chart);
}

CMat model_transport_matrix(const ModelSpace& m, const ModelPoint& p, const ModelPoint& q) {
  const int n = m.dim();
  if (!curved(m)) return CMat::Identity(n, n);
  const Lift Lp = normalized_lift(m, p);
  const Lift Lq = normalized_lift(m, q);
  const Transvection t = transvect(m, Lp.P, horizontal_log(m, Lp.P, Lq.P));
  CMat out(n, n);
  for (int j = 0; j < n; ++j) {
    CVec e = CVec::Zero(n);
    e[j] = 1.0;
    out.col(j) = chart_tangent(t.Q, t.T * horizontal(m, Lp, e), Lq.chart);
  }
  return out;
}

CVec model_parallel_transport(const ModelSpace& m, const ModelPoint& p, const ModelPoint& q,
                              const CVec& v) {
  return model_transport_matrix(m, p, q) * v;
}

ModelIsometry isometry_from_frame_data(const ModelSpace& m, const ModelPoint& p,
                                       const ModelPoint& q, const CMat& A, double tol) {
  const int n = m.dim();
  const CMat Hp = model_metric_at(m, p);
  const CMat Hq = model_metric_at(m, q);
  if (A.rows() != n || A.cols() != n) throw InvalidFrame("frame has wrong shape");
  const double dev = (A.adjoint() * Hq * A - Hp).cwiseAbs().maxCoeff();
  if (!(dev <= tol * std::max(1.0, Hp.cwiseAbs().maxCoeff())))
    throw InvalidFrame("frame is not a complex-linear isometry (deviation " + std::to_string(dev) +
                       ")");
  ModelIsometry s;
  s.sign = m.sign();
  if (!curved(m)) {
    s.U = A;
    s.b = q.coords - A * p.coords;
    return s;
  }
  const Lift Lp = normalized_lift(m, p);
  const Lift Lq = normalized_lift(m, q);
  CMat src(n + 1, n + 1), dst(n + 1, n + 1);
  for (int j = 0; j < n; ++j) {
    CVec e = CVec::Zero(n);
    e[j] = 1.0;
    src.col(j) = horizontal(m, Lp, e);
    dst.col(j) = horizontal(m, Lq, A * e);
  }
  src.col(n) = Lp.P;
  dst.col(n) = Lq.P;
  s.M = dst * src.inverse();
  return s;
}

ModelIsometry transvection(const ModelSpace& m, const ModelPoint& p) {
  const int n = m.dim();
  ModelPoint o = ModelPoint::standard(m, CVec::Zero(n));
  if (!curved(m)) return isometry_from_frame_data(m, o, p, CMat::Identity(n, n));
  const Lift Lo = normalized_lift(m, o);
  const CVec V = horizontal_log(m, Lo.P, normalized_lift(m, p).P);
  ModelIsometry s;
  s.sign = m.sign();
  s.M = transvect(m, Lo.P, V).T;
  return s;
}

ModelPoint apply_isometry(const ModelSpace& m, const ModelIsometry& s, const ModelPoint& z) {
  check_domain(m, z);
  if (!curved(m)) return ModelPoint{s.U * z.coords + s.b, z.chart};
  return from_homogeneous(m, s.M * homogeneous(m, z), chart_of(m, z));
}

CVec apply_isometry_affine(const ModelSpace& m, const ModelIsometry& s, const CVec& z,
                           double threshold) {
  if (!curved(m)) return s.U * z + s.b;
  const int n = m.dim();
  const CVec Z = s.M * insert_at(z, n, 1.0);
  if (std::abs(Z[n]) < threshold * std::max(1.0, Z.cwiseAbs().maxCoeff())) {
    if (m.sign() == CurvatureSign::positive)
      throw ChartSwitch("image lies on the hyperplane at infinity of the standard chart");
    throw DomainError("fractional-linear denominator vanished");
  }
  return remove_at(Z, n) / Z[n];
}

CMat isometry_differential(const ModelSpace& m, const ModelIsometry& s, const ModelPoint& z) {
  const int n = m.dim();
  if (!curved(m)) return s.U;
  const CVec Z = homogeneous(m, z);
  const CVec Q = s.M * Z;
  const ModelPoint out = from_homogeneous(m, Q, chart_of(m, z));
  const int kin = chart_of(m, z);
  CMat D(n, n);
  for (int j = 0; j < n; ++j) {
    CVec e = CVec::Zero(n);
    e[j] = 1.0;
    D.col(j) = chart_tangent(Q, s.M * insert_at(e, kin, 0.0), chart_of(m, out));
  }
  return D;
}

ModelIsometry compose(const ModelIsometry& a, const ModelIsometry& b) {
  if (a.sign != b.sign) throw InvalidInput("composing isometries of different models");
  ModelIsometry s;
  s.sign = a.sign;
  if (a.sign == CurvatureSign::zero) {
    s.U = a.U * b.U;
    s.b = a.U * b.b + a.b;
  } else {
    s.M = a.M * b.M;
  }
  return s;
}

ModelIsometry inverse(const ModelIsometry& a) {
  ModelIsometry s;
  s.sign = a.sign;
  switch (a.sign) {
    case CurvatureSign::zero:
      s.U = a.U.adjoint();
      s.b = -(s.U * a.b);
      break;
    case CurvatureSign::positive: s.M = a.M.adjoint(); break;
    case CurvatureSign::negative: {
      const CMat J = signature_form(static_cast<int>(a.M.rows() - 1));
      s.M = J * a.M.adjoint() * J;
      break;
    }
  }
  return s;
}

std::pair<ModelPoint, CVec> to_chart(const ModelSpace& m, const ModelPoint& p, const CVec& v,
                                     int chart) {
  if (m.sign() != CurvatureSign::positive || chart_of(m, p) == chart) return {p, v};
  const CVec Z = homogeneous(m, p);
  if (std::abs(Z[chart]) < 1e-14) throw ChartSwitch("point lies at infinity of the target chart");
  const CVec V = insert_at(v, chart_of(m, p), 0.0);
  return {ModelPoint{remove_at(Z, chart) / Z[chart], chart}, chart_tangent(Z, V, chart)};
}

int chart_index(const ModelSpace& m, const ModelPoint& p) { return chart_of(m, p); }

std::pair<ModelPoint, CMat> frame_to_chart(const ModelSpace& m, const ModelPoint& p,
                                           const CMat& A, int chart) {
  if (m.sign() != CurvatureSign::positive || chart_of(m, p) == chart) return {p, A};
  CMat out(A.rows(), A.cols());
  ModelPoint q = p;
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    auto [qj, vj] = to_chart(m, p, A.col(j), chart);
    q = qj;
    out.col(j) = vj;
  }
  if (A.cols() == 0) q = to_chart(m, p, CVec::Zero(m.dim()), chart).first;
  return {q, out};
}

CVec standard_coords(const ModelSpace& m, const ModelPoint& p) {
  if (m.sign() != CurvatureSign::positive || chart_of(m, p) == m.dim()) return p.coords;
  return to_chart(m, p, CVec::Zero(m.dim()), m.dim()).first.coords;
}

double model_point_distance(const ModelSpace& m, const ModelPoint& a, const ModelPoint& b) {
  if (m.sign() != CurvatureSign::positive || chart_of(m, a) == chart_of(m, b))
    return (a.coords - b.coords).norm();
  return (a.coords - to_chart(m, b, CVec::Zero(m.dim()), chart_of(m, a)).first.coords).norm();
}

IsometryComparison isometries_equal(const ModelSpace& m, const ModelIsometry& a,
                                    const ModelIsometry& b, const std::vector<ModelPoint>& samples,
                                    double tol) {
  IsometryComparison out;
  for (const auto& z : samples) {
    const ModelPoint pa = apply_isometry(m, a, z);
    const ModelPoint pb = apply_isometry(m, b, z);
    out.max_deviation = std::max(out.max_deviation, model_point_distance(m, pa, pb));
  }
  out.equal = out.max_deviation <= tol;
  return out;
}

}  // namespace spaceform
