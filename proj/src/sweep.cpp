#include "bvtk/sweep.hpp"

#include <omp.h>

#include "bvtk/error.hpp"

namespace bvtk {

std::string to_string(Execution e) { return e == Execution::serial ? "serial" : "parallel"; }

Execution parse_execution(const std::string& s) {
  if (s == "serial") return Execution::serial;
  if (s == "parallel") return Execution::parallel;
  throw ParameterError("execution must be 'serial' or 'parallel', got '" + s + "'");
}

int sweep_threads() { return omp_get_max_threads(); }

}  // namespace bvtk
