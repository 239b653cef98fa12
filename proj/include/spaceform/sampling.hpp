#pragma once

#include <cstdint>
#include <vector>

#include "spaceform/metric_field.hpp"

namespace spaceform {

/// Points uniform in the shell inner <= |z| <= outer of C^n (by volume),
/// keeping only admissible ones. Deterministic in `seed`.
std::vector<CVec> shell_samples(const Domain& domain, int n, int count, double inner,
                                double outer, std::uint64_t seed);

/// Uniform random unit vector of C^n in the Euclidean norm.
CVec random_direction(int n, std::uint64_t seed);

}  // namespace spaceform
