#include "pvi/model.hpp"

namespace pvi {

std::string to_string(ConvergenceTest test) {
  switch (test) {
    case ConvergenceTest::value_span:
      return "value-span";
    case ConvergenceTest::change_span:
      return "change-span";
    case ConvergenceTest::periodic_span:
      return "periodic-span";
  }
  return "?";
}

ConvergenceTest convergence_test_from_string(const std::string& name) {
  if (name == "value-span") return ConvergenceTest::value_span;
  if (name == "change-span") return ConvergenceTest::change_span;
  if (name == "periodic-span") return ConvergenceTest::periodic_span;
  throw ConfigError("unknown convergence test: " + name);
}

}  // namespace pvi
