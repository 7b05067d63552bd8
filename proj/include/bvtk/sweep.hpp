#pragma once

#include <cstddef>
#include <exception>
#include <string>
#include <vector>

namespace bvtk {

/// How independent probes are evaluated. Both give bit-identical results:
/// every probe writes its own slot and reductions run serially afterwards.
enum class Execution { serial, parallel };

std::string to_string(Execution e);
Execution parse_execution(const std::string& s);

/// Calls body(i) for i in [0, n). With Execution::parallel the calls are
/// spread over OpenMP threads. If any call throws, the exception of the
/// lowest failing index is rethrown after all calls finish.
template <class Body>
void sweep(Execution exec, std::size_t n, Body&& body) {
  if (exec == Execution::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Threads OpenMP would use for a parallel sweep.
int sweep_threads();

}  // namespace bvtk
