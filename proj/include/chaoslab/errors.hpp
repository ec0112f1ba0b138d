#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace chaoslab {

/// Rejected user input: bad configuration, invalid model parameters,
/// measures that violate an operation's preconditions.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Programmer fault, e.g. a dimension mismatch between a kernel and a measure.
class SpecificationError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A time step produced a non-finite state.
class DivergenceError : public std::runtime_error {
public:
    static constexpr std::size_t unknown = std::numeric_limits<std::size_t>::max();

    DivergenceError(std::size_t step, std::size_t particle, std::string context = {});

    std::size_t step() const noexcept { return step_; }
    std::size_t particle() const noexcept { return particle_; }
    const std::string& context() const noexcept { return context_; }

    /// Copy with an extra label (e.g. "N=64 replica=3") prepended to the context.
    DivergenceError with_context(const std::string& label) const;

private:
    std::size_t step_;
    std::size_t particle_;
    std::string context_;
};

} // namespace chaoslab
