#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spaceform/metric_field.hpp"

namespace spaceform {

/// Parameters shared by the built-in metric constructors. Entries ignore what
/// they do not use.
struct CatalogParams {
  int n = 2;
  std::optional<double> c;    // bergman: -4, fubini-study: 4, cone-log: -4 by default
  std::vector<double> beta;   // cone entries; defaults to all ones
  double radius = 1.0;
  std::vector<Puncture> punctures;  // appended to the entry's own punctures
};

/// Names accepted by catalog(): flat, bergman, fubini-study, cone-flat, cone-log.
const std::vector<std::string>& catalog_names();

/// Built-in potential for a catalog entry, as DSL text.
std::string catalog_potential(const std::string& name, const CatalogParams& params);

/// Throws UnknownEntry for an unknown name and InvalidInput for bad parameters.
/// Cone entries puncture the divisors {z_j = 0} wherever beta_j != 1.
MetricField catalog(const std::string& name, const CatalogParams& params = {});

}  // namespace spaceform
