#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "chaoslab/linalg.hpp"
#include "chaoslab/measure.hpp"
#include "chaoslab/noise.hpp"

namespace chaoslab {

using PointFunction = std::function<double(std::span<const double>)>;
using VectorField = std::function<void(std::span<const double> x, std::span<double> out)>;
using PairField =
    std::function<void(std::span<const double> x, std::span<const double> y, std::span<double> out)>;

// ---------------------------------------------------------------------------
// Potentials and maps
// ---------------------------------------------------------------------------

/// Shapes with a closed-form mean-field reduction. Anything else is `generic`
/// and falls back to the direct pairwise sum.
enum class PotentialShape { zero, quadratic, abs_cubic, generic };

/// Value + gradient oracle pair.
struct Potential {
    std::string name;
    std::size_t dim = 0;
    PointFunction value;
    VectorField gradient;
    std::optional<double> gradient_lipschitz; // nullopt: only locally Lipschitz
    bool convex = false;
    PotentialShape shape = PotentialShape::generic;
    double strength = 0.0;

    static Potential zero(std::size_t dim);
    /// strength * |z|^2 / 2
    static Potential quadratic(std::size_t dim, double strength = 1.0);
    /// strength * |z|^3
    static Potential abs_cubic(std::size_t dim, double strength = 1.0);
    static Potential custom(std::string name, std::size_t dim, PointFunction value, VectorField gradient,
                            std::optional<double> gradient_lipschitz, bool convex = false);
};

/// Compares `gradient` with central differences (step 1e-6 * (1 + |z|)) at 100
/// pseudo-random points of [-3, 3]^d. Throws ValidationError naming the
/// potential and the worst point on mismatch.
void validate_gradient(const Potential& potential);

/// Sampled check of W(z) == W(-z).
bool is_even(const Potential& potential);

/// Vector-valued map with an optional global Lipschitz constant (friction A,
/// confinement B in the kinetic model).
struct LipschitzMap {
    std::string name;
    std::size_t dim = 0;
    VectorField eval;
    std::optional<double> lipschitz;

    /// z -> coefficient * z
    static LipschitzMap linear(std::size_t dim, double coefficient);
};

// ---------------------------------------------------------------------------
// Drift kernel
// ---------------------------------------------------------------------------

/// b(X, Y) = f(X); the mean-field drift does not depend on the measure.
struct LawIndependent {
    VectorField self;
};

/// b(X, Y) = f(X) + C Y.
struct AffineInteraction {
    VectorField self;
    Matrix coupling;
};

/// d = 1: b(x, y) = f(x) + c * sgn(x - y) |x - y|^k, k in {1, 2, 3}.
struct PowerInteraction1d {
    VectorField self;
    double coefficient = 0.0;
    int exponent = 1;
};

struct GenericInteraction {};

using InteractionStructure = std::variant<GenericInteraction, LawIndependent, AffineInteraction, PowerInteraction1d>;

/// Pairwise drift kernel b(X, Y) of the mean-field equation.
///
/// `structure` must describe the same function as `eval`; it only selects how
/// the weighted average over a measure is computed.
struct DriftKernel {
    std::size_t dim = 0;
    PairField eval;
    std::optional<double> lipschitz_bound; // nullopt: "unbounded"
    double taming_exponent = 0.0;          // 0: no taming
    InteractionStructure structure = GenericInteraction{};

    void operator()(std::span<const double> x, std::span<const double> y, std::span<double> out) const {
        eval(x, y, out);
    }
    std::vector<double> operator()(std::span<const double> x, std::span<const double> y) const;

    bool law_independent() const { return std::holds_alternative<LawIndependent>(structure); }
};

/// sum_j w_j b(X, Y_j) in the measure's storage order. This is the defining
/// formula; simulations use FieldEvaluator, which must agree with it.
void mean_field_drift(const DriftKernel& kernel, std::span<const double> x, const EmpiricalMeasure& measure,
                      std::span<double> out);
std::vector<double> mean_field_drift(const DriftKernel& kernel, std::span<const double> x,
                                     const EmpiricalMeasure& measure);

// ---------------------------------------------------------------------------
// Diffusion, initial law, observables
// ---------------------------------------------------------------------------

/// sigma and a = sigma sigma^T / 2, computed once at construction.
class DiffusionSpec {
public:
    DiffusionSpec() = default;
    explicit DiffusionSpec(Matrix sigma);

    /// sigma = scale * I.
    static DiffusionSpec isotropic(std::size_t dim, double scale);
    /// Zero on the position block, sqrt(2) I on the velocity block of (x, v) in R^{2 d'}.
    static DiffusionSpec kinetic(std::size_t half_dim);

    std::size_t dim() const noexcept { return sigma_.rows; }
    const Matrix& sigma() const noexcept { return sigma_; }
    const Matrix& a() const noexcept { return a_; }

private:
    Matrix sigma_;
    Matrix a_;
};

/// Initial law f_0, restricted to families with closed-form second moments.
class InitialLaw {
public:
    struct PointMass {
        std::vector<double> location;
    };
    struct Gaussian {
        std::vector<double> mean;
        Matrix covariance;
        Matrix cholesky; // lower triangular
    };
    struct UniformBox {
        std::vector<double> low;
        std::vector<double> high;
    };
    struct Mixture {
        std::vector<double> weights;
        std::vector<InitialLaw> components;
    };
    using Kind = std::variant<PointMass, Gaussian, UniformBox, Mixture>;

    static InitialLaw point_mass(std::vector<double> location);
    static InitialLaw gaussian(std::vector<double> mean, Matrix covariance);
    static InitialLaw isotropic_gaussian(std::size_t dim, double mean, double variance);
    static InitialLaw uniform_box(std::vector<double> low, std::vector<double> high);
    /// Components may not themselves be mixtures.
    static InitialLaw mixture(std::vector<double> weights, std::vector<InitialLaw> components);

    std::size_t dim() const noexcept { return dim_; }
    double second_moment() const noexcept { return second_moment_; }
    const Kind& kind() const noexcept { return *kind_; }
    std::string describe() const;

    /// Draw for one particle. Uses normals at step 0 and uniform slots
    /// 0..d of the given stream, so the draw is a pure function of the key.
    void sample(const NoiseGrid& noise, Stream stream, std::uint32_t replica, std::uint32_t particle,
                std::span<double> out) const;

private:
    InitialLaw() = default;

    std::shared_ptr<const Kind> kind_;
    std::size_t dim_ = 0;
    double second_moment_ = 0.0;
};

/// Test function phi with a certified Lipschitz constant.
struct Observable {
    std::string name;
    std::size_t dim = 0;
    PointFunction eval;
    double lipschitz_constant = 1.0;

    static Observable coordinate(std::size_t dim, std::size_t index);
    /// clamp(x_index, -bound, bound)
    static Observable clipped_coordinate(std::size_t dim, std::size_t index, double bound);
    static Observable constant(std::size_t dim, double value);

    /// phi / L, so that the result is 1-Lipschitz.
    Observable rescaled_to_unit() const;
};

/// Largest sampled difference quotient |phi(x) - phi(y)| / |x - y| over
/// `samples` random pairs in [-box, box]^d.
double sampled_lipschitz_quotient(const Observable& phi, std::size_t samples = 1000, double box = 5.0);

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

struct ModelTraits {
    bool granular = false;
    bool kinetic = false;
    bool convex = false; // granular only: V and W both declared convex
};

struct ModelSpec {
    std::string name;
    DriftKernel drift;
    DiffusionSpec diffusion;
    InitialLaw initial_law;
    ModelTraits traits;

    std::size_t dim() const noexcept { return drift.dim; }
};

/// Assembles a model and checks that all dimensions agree.
ModelSpec make_model(std::string name, DriftKernel drift, DiffusionSpec diffusion, InitialLaw initial,
                     ModelTraits traits = {});

/// Space-homogeneous granular media: b(v, w) = grad V(v) + grad W(v - w),
/// sigma = sqrt(2) I. W must be even. Kernels that are not globally
/// Lipschitz get taming_exponent = 1.
ModelSpec granular_media_model(const Potential& confinement, const Potential& interaction, std::size_t dim,
                               std::optional<InitialLaw> initial = std::nullopt);

/// Vlasov-Fokker-Planck on (x, v) in R^{2 d'}:
/// b((x, v), (y, w)) = (-v, A(v) + B(x) + grad U(x - y)), noise on v only.
ModelSpec vlasov_fokker_planck_model(const Potential& interaction, const LipschitzMap& friction,
                                     const LipschitzMap& confinement, std::size_t half_dim,
                                     std::optional<InitialLaw> initial = std::nullopt);

/// b(X, Y) = rate X, sigma = sqrt(2) I: an Ornstein-Uhlenbeck process with a
/// closed-form law.
ModelSpec linear_test_model(double rate, std::size_t dim, std::optional<InitialLaw> initial = std::nullopt);

/// b = 0 with sigma = scale I.
ModelSpec zero_drift_model(std::size_t dim, double sigma_scale, std::optional<InitialLaw> initial = std::nullopt);

/// Mean and per-coordinate variance of the linear test model at time t,
/// started from N(m0, v0 I).
double linear_model_mean(double rate, double m0, double t);
double linear_model_variance(double rate, double v0, double t);

} // namespace chaoslab
