#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace spaceform {

/// Selects the OpenMP kernel or the serial reference loop.
enum class ExecPolicy { serial, parallel };

/// Runs body(i) for i in [0, count). The exception from the lowest failing
/// index is rethrown after the loop, so both policies report the same error.
template <class Body>
void for_each_index(ExecPolicy policy, std::size_t count, Body&& body) {
  if (policy == ExecPolicy::serial) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr first;
  std::size_t first_index = count;
  std::mutex mu;
  const long n = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (static_cast<std::size_t>(i) < first_index) {
        first_index = static_cast<std::size_t>(i);
        first = std::current_exception();
      }
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace spaceform
