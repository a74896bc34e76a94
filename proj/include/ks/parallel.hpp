#pragma once

#include <cstddef>
#include <exception>
#include <type_traits>
#include <vector>

namespace ks {

// Serial is the reference path; Parallel distributes indices over OpenMP
// threads. Both produce the same vector: slot i always holds f(i).
enum class Exec { Serial, Parallel };

// Evaluates f(0..n-1). If any call throws, the exception from the lowest
// failing index is rethrown after all indices finish, so which error
// surfaces does not depend on scheduling.
template <class F>
auto indexed_map(std::size_t n, F&& f, Exec exec = Exec::Parallel)
    -> std::vector<std::invoke_result_t<F&, std::size_t>> {
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<R> out(n);
  std::vector<std::exception_ptr> errors(n);
  const auto body = [&](std::size_t i) {
    try {
      out[i] = f(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (exec == Exec::Parallel) {
    const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) body(i);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace ks
