#include "optpart/errors.hpp"

namespace optpart {

namespace {
std::string degenerate_message(int part, std::size_t support, int iteration) {
  std::string msg = "part " + std::to_string(part) + " vanished (norm below threshold";
  msg += ", last support " + std::to_string(support) + " nodes)";
  if (iteration >= 0) msg += " at iteration " + std::to_string(iteration);
  return msg;
}
}  // namespace

DegeneratePart::DegeneratePart(int part, std::size_t last_support, int iteration)
    : std::runtime_error(degenerate_message(part, last_support, iteration)),
      part_(part),
      last_support_(last_support),
      iteration_(iteration) {}

}  // namespace optpart
