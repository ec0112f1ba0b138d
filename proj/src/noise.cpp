#include "chaoslab/noise.hpp"

#include <cmath>
#include <numbers>

#include "chaoslab/errors.hpp"

namespace chaoslab {
namespace {

constexpr std::uint32_t kMultiplier0 = 0xD2511F53;
constexpr std::uint32_t kMultiplier1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;
constexpr std::uint32_t kMaxBlock = (1u << 23) - 1;

PhiloxCounter philox_round(const PhiloxCounter& c, const PhiloxKey& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMultiplier0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMultiplier1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

// 53-bit uniform in [0, 1).
double to_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

} // namespace

PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key) {
    counter = philox_round(counter, key);
    for (int r = 1; r < 10; ++r) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
        counter = philox_round(counter, key);
    }
    return counter;
}

NoiseGrid::NoiseGrid(std::uint64_t seed, double dt) : seed_(seed), dt_(dt), sqrt_dt_(std::sqrt(dt)) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("NoiseGrid: dt must be positive and finite");
}

PhiloxCounter NoiseGrid::block(Stream stream, std::uint32_t replica, std::uint32_t particle, std::uint32_t step,
                               std::uint32_t lane, std::uint32_t index) const {
    if (index > kMaxBlock) throw SpecificationError("NoiseGrid: coordinate index out of range");
    const PhiloxCounter counter{step, particle, replica,
                                (static_cast<std::uint32_t>(stream) << 24) | (lane << 23) | index};
    const PhiloxKey key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
    return philox4x32(counter, key);
}

double NoiseGrid::normal(Stream stream, std::uint32_t replica, std::uint32_t particle, std::uint32_t step,
                         std::uint32_t coord) const {
    const auto bits = block(stream, replica, particle, step, 0, coord / 2);
    const double u1 = 1.0 - to_unit(bits[0], bits[1]); // (0, 1]
    const double u2 = to_unit(bits[2], bits[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return (coord % 2 == 0) ? radius * std::cos(angle) : radius * std::sin(angle);
}

double NoiseGrid::uniform(Stream stream, std::uint32_t replica, std::uint32_t particle, std::uint32_t step,
                          std::uint32_t slot) const {
    const auto bits = block(stream, replica, particle, step, 1, slot / 2);
    return (slot % 2 == 0) ? to_unit(bits[0], bits[1]) : to_unit(bits[2], bits[3]);
}

double NoiseGrid::increment(Stream stream, std::uint32_t replica, std::uint32_t particle, std::uint32_t step,
                            std::uint32_t coord) const {
    return sqrt_dt_ * normal(stream, replica, particle, step, coord);
}

void NoiseGrid::normals(Stream stream, std::uint32_t replica, std::uint32_t particle, std::uint32_t step,
                        std::span<double> out) const {
    const auto n = static_cast<std::uint32_t>(out.size());
    for (std::uint32_t c = 0; c < n; c += 2) {
        const auto bits = block(stream, replica, particle, step, 0, c / 2);
        const double u1 = 1.0 - to_unit(bits[0], bits[1]);
        const double u2 = to_unit(bits[2], bits[3]);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        out[c] = radius * std::cos(angle);
        if (c + 1 < n) out[c + 1] = radius * std::sin(angle);
    }
}

void NoiseGrid::increments(Stream stream, std::uint32_t replica, std::uint32_t particle, std::uint32_t step,
                           std::span<double> out) const {
    normals(stream, replica, particle, step, out);
    for (double& v : out) v *= sqrt_dt_;
}

} // namespace chaoslab
