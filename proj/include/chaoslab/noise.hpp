#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace chaoslab {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32-10 block function (Salmon et al., SC'11). Stateless: the same
/// (counter, key) always yields the same 128 bits.
PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key);

/// Key namespaces. Particle systems and their coupled nonlinear copies share
/// `brownian` and `initial`; reference flows draw from their own streams so
/// their keys never collide with a coupled run.
enum class Stream : std::uint8_t {
    brownian = 0,
    initial = 1,
    reference_brownian = 2,
    reference_initial = 3,
    subsample = 4,
    target = 5,
};

/// Addressable Brownian increments keyed by
/// (seed, stream, replica, particle, step, coordinate).
///
/// Counter layout: [step, particle, replica, stream<<24 | lane<<23 | block],
/// key = the two halves of the seed. Normals come in Box-Muller pairs, so
/// coordinates 2b and 2b+1 share one Philox block.
class NoiseGrid {
public:
    NoiseGrid(std::uint64_t seed, double dt);

    std::uint64_t seed() const noexcept { return seed_; }
    double dt() const noexcept { return dt_; }

    /// Standard normal sample for one key.
    double normal(Stream stream, std::uint32_t replica, std::uint32_t particle, std::uint32_t step,
                  std::uint32_t coord) const;

    /// Uniform sample in [0, 1) for one key; independent of `normal` at the same key.
    double uniform(Stream stream, std::uint32_t replica, std::uint32_t particle, std::uint32_t step,
                   std::uint32_t slot) const;

    /// N(0, dt) Brownian increment.
    double increment(Stream stream, std::uint32_t replica, std::uint32_t particle, std::uint32_t step,
                     std::uint32_t coord) const;

    /// Fills `out` with the increments for coordinates 0..out.size()-1.
    void increments(Stream stream, std::uint32_t replica, std::uint32_t particle, std::uint32_t step,
                    std::span<double> out) const;

    /// Fills `out` with standard normals for coordinates 0..out.size()-1.
    void normals(Stream stream, std::uint32_t replica, std::uint32_t particle, std::uint32_t step,
                 std::span<double> out) const;

private:
    PhiloxCounter block(Stream stream, std::uint32_t replica, std::uint32_t particle, std::uint32_t step,
                        std::uint32_t lane, std::uint32_t index) const;

    std::uint64_t seed_;
    double dt_;
    double sqrt_dt_;
};

} // namespace chaoslab
