#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "spaceform/linalg.hpp"

namespace spaceform {

/// Monomial tables for truncated Taylor polynomials in `nvars` formal
/// variables up to total degree `order`. Shared and immutable; obtain via get().
class JetSpace {
 public:
  using Exponent = std::vector<std::uint8_t>;

  static const JetSpace& get(int nvars, int order);

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  std::size_t size() const { return exponents_.size(); }

  const Exponent& exponent(std::size_t idx) const { return exponents_[idx]; }
  int degree(std::size_t idx) const { return degree_[idx]; }
  /// Product of factorials of the exponent entries: derivative = coefficient * weight.
  double weight(std::size_t idx) const { return weight_[idx]; }
  /// Index of a monomial, or -1 if above the truncation order.
  long index_of(const Exponent& e) const;
  /// Index of the monomial with the given variables (repeats allowed).
  long index_of_vars(std::initializer_list<int> vars) const;

  struct Triple {
    std::uint32_t a, b, out;
  };
  const std::vector<Triple>& products() const { return products_; }
  /// Index permutation swapping each (dz_j, dzbar_j) pair; used for conjugation.
  const std::vector<std::uint32_t>& conj_perm() const { return conj_perm_; }

 private:
  JetSpace(int nvars, int order);

  int nvars_;
  int order_;
  std::vector<Exponent> exponents_;
  std::vector<int> degree_;
  std::vector<double> weight_;
  std::vector<Triple> products_;
  std::vector<std::uint32_t> conj_perm_;
  std::vector<long> lookup_;  // dense table over base-(order+1) encodings
  long encode(const Exponent& e) const;
};

/// Truncated Taylor polynomial with complex coefficients. For the Wirtinger
/// jets used by the metric engine variable 2j is dz_j and 2j+1 is dzbar_j.
class Jet {
 public:
  Jet() = default;
  Jet(const JetSpace& space, cplx constant);

  static Jet variable(const JetSpace& space, int var, cplx value);

  const JetSpace& space() const { return *space_; }
  cplx value() const { return c_[0]; }
  cplx coeff(std::size_t idx) const { return c_[idx]; }
  std::span<const cplx> coeffs() const { return c_; }
  /// Partial derivative identified by monomial index.
  cplx derivative(std::size_t idx) const { return c_[idx] * space_->weight(idx); }

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(cplx s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) { return a *= -1.0; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator*(Jet a, cplx s) { return a *= s; }
  friend Jet operator*(cplx s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, cplx s) {
    a.c_[0] += s;
    return a;
  }

  /// Sum_k coeffs[k] (x - x0)^k with x0 = value(); coeffs.size() must exceed order.
  Jet compose(std::span<const cplx> coeffs) const;
  /// Conjugation under z_j <-> zbar_j (valid only for Wirtinger jets).
  Jet conj() const;

 private:
  const JetSpace* space_ = nullptr;
  std::vector<cplx> c_;
};

Jet reciprocal(const Jet& a);
Jet jet_log(const Jet& a);
Jet jet_exp(const Jet& a);
/// a^p for real p; for non-integer p the constant term must be real positive.
Jet jet_pow(const Jet& a, double p);
Jet jet_ipow(const Jet& a, int p);

}  // namespace spaceform
