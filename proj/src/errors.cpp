#include "chaoslab/errors.hpp"

#include <fmt/format.h>

namespace chaoslab {
namespace {

std::string divergence_message(std::size_t step, std::size_t particle, const std::string& context) {
    std::string msg = "divergence: non-finite state";
    if (step != DivergenceError::unknown) msg += fmt::format(" at step {}", step);
    if (particle != DivergenceError::unknown) msg += fmt::format(", particle {}", particle);
    if (!context.empty()) msg += fmt::format(" ({})", context);
    return msg;
}

} // namespace

DivergenceError::DivergenceError(std::size_t step, std::size_t particle, std::string context)
    : std::runtime_error(divergence_message(step, particle, context)),
      step_(step),
      particle_(particle),
      context_(std::move(context)) {}

DivergenceError DivergenceError::with_context(const std::string& label) const {
    return DivergenceError(step_, particle_, context_.empty() ? label : label + "; " + context_);
}

} // namespace chaoslab
