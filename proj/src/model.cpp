#include "chaoslab/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "chaoslab/errors.hpp"

namespace chaoslab {
namespace {

constexpr std::uint64_t kCheckSeed = 0x6b2f'1d3a'90c4'e517ULL;

std::vector<double> random_point(std::mt19937_64& rng, std::size_t dim, double box) {
    std::uniform_real_distribution<double> u(-box, box);
    std::vector<double> p(dim);
    for (double& v : p) v = u(rng);
    return p;
}

} // namespace

// ---------------------------------------------------------------------------
// Potentials

Potential Potential::zero(std::size_t dim) {
    Potential p;
    p.name = "zero";
    p.dim = dim;
    p.value = [](std::span<const double>) { return 0.0; };
    p.gradient = [](std::span<const double>, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); };
    p.gradient_lipschitz = 0.0;
    p.convex = true;
    p.shape = PotentialShape::zero;
    return p;
}

Potential Potential::quadratic(std::size_t dim, double strength) {
    if (!(strength >= 0.0)) throw ValidationError("quadratic potential: strength must be nonnegative");
    Potential p;
    p.name = fmt::format("quadratic({})", strength);
    p.dim = dim;
    p.value = [strength](std::span<const double> z) { return 0.5 * strength * squared_norm(z); };
    p.gradient = [strength](std::span<const double> z, std::span<double> out) {
        for (std::size_t c = 0; c < z.size(); ++c) out[c] = strength * z[c];
    };
    p.gradient_lipschitz = strength;
    p.convex = true;
    p.shape = PotentialShape::quadratic;
    p.strength = strength;
    return p;
}

Potential Potential::abs_cubic(std::size_t dim, double strength) {
    if (!(strength >= 0.0)) throw ValidationError("cubic potential: strength must be nonnegative");
    Potential p;
    p.name = fmt::format("abs_cubic({})", strength);
    p.dim = dim;
    p.value = [strength](std::span<const double> z) {
        const double r = norm(z);
        return strength * r * r * r;
    };
    // grad |z|^3 = 3 |z| z
    p.gradient = [strength](std::span<const double> z, std::span<double> out) {
        const double r = norm(z);
        for (std::size_t c = 0; c < z.size(); ++c) out[c] = 3.0 * strength * r * z[c];
    };
    p.gradient_lipschitz = strength == 0.0 ? std::optional<double>(0.0) : std::nullopt;
    p.convex = true;
    p.shape = PotentialShape::abs_cubic;
    p.strength = strength;
    return p;
}

Potential Potential::custom(std::string name, std::size_t dim, PointFunction value, VectorField gradient,
                            std::optional<double> gradient_lipschitz, bool convex) {
    Potential p;
    p.name = std::move(name);
    p.dim = dim;
    p.value = std::move(value);
    p.gradient = std::move(gradient);
    p.gradient_lipschitz = gradient_lipschitz;
    p.convex = convex;
    p.shape = PotentialShape::generic;
    return p;
}

void validate_gradient(const Potential& potential) {
    if (potential.dim == 0) throw ValidationError(fmt::format("potential {}: dimension must be positive", potential.name));
    if (!potential.value || !potential.gradient)
        throw ValidationError(fmt::format("potential {}: value and gradient oracles are required", potential.name));
    std::mt19937_64 rng(kCheckSeed);
    std::vector<double> grad(potential.dim);
    for (int trial = 0; trial < 100; ++trial) {
        auto z = random_point(rng, potential.dim, 3.0);
        potential.gradient(z, grad);
        const double h = 1e-6 * (1.0 + norm(z));
        for (std::size_t c = 0; c < potential.dim; ++c) {
            auto zp = z;
            auto zm = z;
            zp[c] += h;
            zm[c] -= h;
            const double fd = (potential.value(zp) - potential.value(zm)) / (2.0 * h);
            if (!(std::abs(fd - grad[c]) <= 1e-5 * (1.0 + std::abs(grad[c])))) {
                throw ValidationError(fmt::format(
                    "potential {}: gradient component {} disagrees with central difference at z[{}]={} ({} vs {})",
                    potential.name, c, c, z[c], grad[c], fd));
            }
        }
    }
}

bool is_even(const Potential& potential) {
    std::mt19937_64 rng(kCheckSeed ^ 0x1);
    for (int trial = 0; trial < 100; ++trial) {
        auto z = random_point(rng, potential.dim, 3.0);
        auto minus = z;
        for (double& v : minus) v = -v;
        const double a = potential.value(z);
        const double b = potential.value(minus);
        if (!(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)))) return false;
    }
    return true;
}

LipschitzMap LipschitzMap::linear(std::size_t dim, double coefficient) {
    LipschitzMap m;
    m.name = fmt::format("linear({})", coefficient);
    m.dim = dim;
    m.eval = [coefficient](std::span<const double> z, std::span<double> out) {
        for (std::size_t c = 0; c < z.size(); ++c) out[c] = coefficient * z[c];
    };
    m.lipschitz = std::abs(coefficient);
    return m;
}

// ---------------------------------------------------------------------------
// Drift

std::vector<double> DriftKernel::operator()(std::span<const double> x, std::span<const double> y) const {
    std::vector<double> out(dim);
    eval(x, y, out);
    return out;
}

void mean_field_drift(const DriftKernel& kernel, std::span<const double> x, const EmpiricalMeasure& measure,
                      std::span<double> out) {
    if (measure.empty()) throw SpecificationError("mean_field_drift: empty measure");
    if (x.size() != kernel.dim || measure.dim() != kernel.dim || out.size() != kernel.dim)
        throw SpecificationError(fmt::format("mean_field_drift: dimension mismatch (kernel {}, point {}, measure {})",
                                             kernel.dim, x.size(), measure.dim()));
    std::vector<double> term(kernel.dim);
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t j = 0; j < measure.size(); ++j) {
        kernel.eval(x, measure.point(j), term);
        const double w = measure.weight(j);
        for (std::size_t c = 0; c < kernel.dim; ++c) out[c] += w * term[c];
    }
}

std::vector<double> mean_field_drift(const DriftKernel& kernel, std::span<const double> x,
                                     const EmpiricalMeasure& measure) {
    std::vector<double> out(kernel.dim);
    mean_field_drift(kernel, x, measure, out);
    return out;
}

// ---------------------------------------------------------------------------
// Diffusion

DiffusionSpec::DiffusionSpec(Matrix sigma) : sigma_(std::move(sigma)) {
    if (sigma_.rows == 0 || sigma_.rows != sigma_.cols)
        throw ValidationError("DiffusionSpec: sigma must be a nonempty square matrix");
    for (double v : sigma_.values)
        if (!std::isfinite(v)) throw ValidationError("DiffusionSpec: sigma must be finite");
    const std::size_t d = sigma_.rows;
    a_ = Matrix(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < d; ++k) s += sigma_(i, k) * sigma_(j, k);
            a_(i, j) = 0.5 * s;
        }
    }
}

DiffusionSpec DiffusionSpec::isotropic(std::size_t dim, double scale) {
    return DiffusionSpec(Matrix::identity(dim, scale));
}

DiffusionSpec DiffusionSpec::kinetic(std::size_t half_dim) {
    std::vector<double> diag(2 * half_dim, 0.0);
    for (std::size_t c = half_dim; c < 2 * half_dim; ++c) diag[c] = std::sqrt(2.0);
    return DiffusionSpec(Matrix::diagonal(diag));
}

// ---------------------------------------------------------------------------
// Initial law

InitialLaw InitialLaw::point_mass(std::vector<double> location) {
    if (location.empty()) throw ValidationError("point mass: dimension must be positive");
    for (double v : location)
        if (!std::isfinite(v)) throw ValidationError("point mass: location must be finite");
    InitialLaw law;
    law.dim_ = location.size();
    law.second_moment_ = squared_norm(location);
    law.kind_ = std::make_shared<const Kind>(PointMass{std::move(location)});
    return law;
}

InitialLaw InitialLaw::gaussian(std::vector<double> mean, Matrix covariance) {
    const std::size_t d = mean.size();
    if (d == 0) throw ValidationError("gaussian: dimension must be positive");
    if (covariance.rows != d || covariance.cols != d) throw ValidationError("gaussian: covariance shape mismatch");
    Eigen::MatrixXd cov(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            if (!std::isfinite(covariance(i, j))) throw ValidationError("gaussian: covariance must be finite");
            if (covariance(i, j) != covariance(j, i)) throw ValidationError("gaussian: covariance must be symmetric");
            cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = covariance(i, j);
        }
    }
    // Pivoted LDL^T handles semidefinite covariances: Sigma = P^T L D L^T P.
    Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
    if (ldlt.info() != Eigen::Success) throw ValidationError("gaussian: covariance factorization failed");
    const Eigen::VectorXd diag = ldlt.vectorD();
    if (diag.minCoeff() < -1e-12 * std::max(1.0, diag.cwiseAbs().maxCoeff()))
        throw ValidationError("gaussian: covariance must be positive semidefinite");
    Eigen::MatrixXd lower = ldlt.matrixL();
    lower = lower * diag.cwiseMax(0.0).cwiseSqrt().asDiagonal();
    const Eigen::MatrixXd factor = ldlt.transpositionsP().transpose() * lower;

    Matrix chol(d, d);
    double trace = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        trace += covariance(i, i);
        for (std::size_t j = 0; j < d; ++j)
            chol(i, j) = factor(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    InitialLaw law;
    law.dim_ = d;
    law.second_moment_ = squared_norm(mean) + trace;
    law.kind_ = std::make_shared<const Kind>(Gaussian{std::move(mean), std::move(covariance), std::move(chol)});
    return law;
}

InitialLaw InitialLaw::isotropic_gaussian(std::size_t dim, double mean, double variance) {
    if (!(variance >= 0.0)) throw ValidationError("gaussian: variance must be nonnegative");
    return gaussian(std::vector<double>(dim, mean), Matrix::identity(dim, variance));
}

InitialLaw InitialLaw::uniform_box(std::vector<double> low, std::vector<double> high) {
    if (low.empty() || low.size() != high.size()) throw ValidationError("uniform box: bounds shape mismatch");
    double m2 = 0.0;
    for (std::size_t c = 0; c < low.size(); ++c) {
        if (!std::isfinite(low[c]) || !std::isfinite(high[c]) || !(low[c] <= high[c]))
            throw ValidationError("uniform box: need finite low <= high");
        m2 += (low[c] * low[c] + low[c] * high[c] + high[c] * high[c]) / 3.0;
    }
    InitialLaw law;
    law.dim_ = low.size();
    law.second_moment_ = m2;
    law.kind_ = std::make_shared<const Kind>(UniformBox{std::move(low), std::move(high)});
    return law;
}

InitialLaw InitialLaw::mixture(std::vector<double> weights, std::vector<InitialLaw> components) {
    if (components.empty() || weights.size() != components.size())
        throw ValidationError("mixture: need one weight per component");
    const std::size_t d = components.front().dim();
    double total = 0.0;
    double m2 = 0.0;
    for (std::size_t k = 0; k < components.size(); ++k) {
        if (components[k].dim() != d) throw ValidationError("mixture: component dimensions differ");
        if (std::holds_alternative<Mixture>(components[k].kind()))
            throw ValidationError("mixture: nested mixtures are not supported");
        if (!(weights[k] >= 0.0)) throw ValidationError("mixture: weights must be nonnegative");
        total += weights[k];
        m2 += weights[k] * components[k].second_moment();
    }
    if (std::abs(total - 1.0) > 1e-12) throw ValidationError("mixture: weights must sum to 1");
    InitialLaw law;
    law.dim_ = d;
    law.second_moment_ = m2;
    law.kind_ = std::make_shared<const Kind>(Mixture{std::move(weights), std::move(components)});
    return law;
}

std::string InitialLaw::describe() const {
    return std::visit(
        [](const auto& k) -> std::string {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                return fmt::format("point_mass({})", fmt::join(k.location, ","));
            } else if constexpr (std::is_same_v<T, Gaussian>) {
                return fmt::format("gaussian(mean=[{}], cov=[{}])", fmt::join(k.mean, ","),
                                   fmt::join(k.covariance.values, ","));
            } else if constexpr (std::is_same_v<T, UniformBox>) {
                return fmt::format("uniform([{}], [{}])", fmt::join(k.low, ","), fmt::join(k.high, ","));
            } else {
                std::vector<std::string> parts;
                for (std::size_t i = 0; i < k.components.size(); ++i)
                    parts.push_back(fmt::format("{}*{}", k.weights[i], k.components[i].describe()));
                return fmt::format("mixture({})", fmt::join(parts, " + "));
            }
        },
        *kind_);
}

void InitialLaw::sample(const NoiseGrid& noise, Stream stream, std::uint32_t replica, std::uint32_t particle,
                        std::span<double> out) const {
    if (out.size() != dim_) throw SpecificationError("InitialLaw::sample: dimension mismatch");
    const Kind* kind = kind_.get();
    if (const auto* mix = std::get_if<Mixture>(kind)) {
        const double u = noise.uniform(stream, replica, particle, 0, 0);
        double acc = 0.0;
        std::size_t pick = mix->components.size() - 1;
        for (std::size_t k = 0; k < mix->weights.size(); ++k) {
            acc += mix->weights[k];
            if (u < acc) {
                pick = k;
                break;
            }
        }
        kind = mix->components[pick].kind_.get();
    }
    if (const auto* pm = std::get_if<PointMass>(kind)) {
        std::copy(pm->location.begin(), pm->location.end(), out.begin());
    } else if (const auto* g = std::get_if<Gaussian>(kind)) {
        std::vector<double> z(dim_);
        noise.normals(stream, replica, particle, 0, z);
        g->cholesky.apply(z, out);
        for (std::size_t c = 0; c < dim_; ++c) out[c] += g->mean[c];
    } else if (const auto* box = std::get_if<UniformBox>(kind)) {
        for (std::size_t c = 0; c < dim_; ++c) {
            const double u = noise.uniform(stream, replica, particle, 0, static_cast<std::uint32_t>(c + 1));
            out[c] = box->low[c] + (box->high[c] - box->low[c]) * u;
        }
    }
}

// ---------------------------------------------------------------------------
// Observables

Observable Observable::coordinate(std::size_t dim, std::size_t index) {
    if (index >= dim) throw ValidationError("coordinate observable: index out of range");
    return {fmt::format("x[{}]", index), dim, [index](std::span<const double> x) { return x[index]; }, 1.0};
}

Observable Observable::clipped_coordinate(std::size_t dim, std::size_t index, double bound) {
    if (index >= dim) throw ValidationError("clipped observable: index out of range");
    if (!(bound > 0.0)) throw ValidationError("clipped observable: bound must be positive");
    return {fmt::format("clamp(x[{}],{})", index, bound), dim,
            [index, bound](std::span<const double> x) { return std::clamp(x[index], -bound, bound); }, 1.0};
}

Observable Observable::constant(std::size_t dim, double value) {
    return {fmt::format("const({})", value), dim, [value](std::span<const double>) { return value; }, 1.0};
}

Observable Observable::rescaled_to_unit() const {
    if (!(lipschitz_constant > 0.0)) throw ValidationError("observable: Lipschitz constant must be positive");
    if (lipschitz_constant <= 1.0) return *this;
    Observable out = *this;
    const double scale = lipschitz_constant;
    out.name = fmt::format("{}/{}", name, scale);
    out.eval = [f = eval, scale](std::span<const double> x) { return f(x) / scale; };
    out.lipschitz_constant = 1.0;
    return out;
}

double sampled_lipschitz_quotient(const Observable& phi, std::size_t samples, double box) {
    std::mt19937_64 rng(kCheckSeed ^ 0x2);
    double worst = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const auto x = random_point(rng, phi.dim, box);
        const auto y = random_point(rng, phi.dim, box);
        const double dist = distance(x, y);
        if (dist > 0.0) worst = std::max(worst, std::abs(phi.eval(x) - phi.eval(y)) / dist);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Models

ModelSpec make_model(std::string name, DriftKernel drift, DiffusionSpec diffusion, InitialLaw initial,
                     ModelTraits traits) {
    if (drift.dim == 0 || drift.dim != diffusion.dim() || drift.dim != initial.dim())
        throw SpecificationError(fmt::format("model {}: dimensions differ (drift {}, diffusion {}, initial law {})",
                                             name, drift.dim, diffusion.dim(), initial.dim()));
    if (!drift.eval) throw SpecificationError(fmt::format("model {}: drift kernel has no evaluator", name));
    return ModelSpec{std::move(name), std::move(drift), std::move(diffusion), std::move(initial), traits};
}

ModelSpec granular_media_model(const Potential& confinement, const Potential& interaction, std::size_t dim,
                               std::optional<InitialLaw> initial) {
    if (confinement.dim != dim || interaction.dim != dim)
        throw ValidationError("granular model: potential dimensions must equal the state dimension");
    validate_gradient(confinement);
    validate_gradient(interaction);
    if (!is_even(interaction))
        throw ValidationError(fmt::format("granular model: interaction {} is not even", interaction.name));

    DriftKernel k;
    k.dim = dim;
    k.eval = [gv = confinement.gradient, gw = interaction.gradient, dim](std::span<const double> v,
                                                                         std::span<const double> w,
                                                                         std::span<double> out) {
        double z[8];
        double gz[8];
        std::vector<double> zbuf;
        std::vector<double> gbuf;
        std::span<double> zs;
        std::span<double> gs;
        if (dim <= 8) {
            zs = {z, dim};
            gs = {gz, dim};
        } else {
            zbuf.resize(dim);
            gbuf.resize(dim);
            zs = zbuf;
            gs = gbuf;
        }
        for (std::size_t c = 0; c < dim; ++c) zs[c] = v[c] - w[c];
        gv(v, out);
        gw(zs, gs);
        for (std::size_t c = 0; c < dim; ++c) out[c] += gs[c];
    };
    if (confinement.gradient_lipschitz && interaction.gradient_lipschitz)
        k.lipschitz_bound = *confinement.gradient_lipschitz + *interaction.gradient_lipschitz;
    k.taming_exponent = k.lipschitz_bound ? 0.0 : 1.0;

    switch (interaction.shape) {
    case PotentialShape::zero:
        k.structure = LawIndependent{confinement.gradient};
        break;
    case PotentialShape::quadratic: {
        const double kappa = interaction.strength;
        k.structure = AffineInteraction{[gv = confinement.gradient, kappa](std::span<const double> v,
                                                                           std::span<double> out) {
                                            gv(v, out);
                                            for (std::size_t c = 0; c < v.size(); ++c) out[c] += kappa * v[c];
                                        },
                                        Matrix::identity(dim, -kappa)};
        break;
    }
    case PotentialShape::abs_cubic:
        if (dim == 1) k.structure = PowerInteraction1d{confinement.gradient, 3.0 * interaction.strength, 2};
        break;
    case PotentialShape::generic:
        break;
    }

    ModelTraits traits;
    traits.granular = true;
    traits.convex = confinement.convex && interaction.convex;
    return make_model(fmt::format("granular(V={}, W={}, d={})", confinement.name, interaction.name, dim),
                      std::move(k), DiffusionSpec::isotropic(dim, std::sqrt(2.0)),
                      initial.value_or(InitialLaw::isotropic_gaussian(dim, 0.0, 1.0)), traits);
}

ModelSpec vlasov_fokker_planck_model(const Potential& interaction, const LipschitzMap& friction,
                                     const LipschitzMap& confinement, std::size_t half_dim,
                                     std::optional<InitialLaw> initial) {
    if (half_dim == 0) throw ValidationError("kinetic model: d' must be positive");
    if (interaction.dim != half_dim || friction.dim != half_dim || confinement.dim != half_dim)
        throw ValidationError("kinetic model: U, A and B must act on R^{d'}");
    if (!friction.eval || !confinement.eval) throw ValidationError("kinetic model: A and B need evaluators");
    validate_gradient(interaction);
    const std::size_t n = half_dim;

    // (x, v) -> (-v, A(v) + B(x) + extra), with extra supplied by the caller.
    auto kinetic_part = [a = friction.eval, b = confinement.eval, n](std::span<const double> state,
                                                                     std::span<double> out) {
        const auto x = state.subspan(0, n);
        const auto v = state.subspan(n, n);
        std::vector<double> tmp(n);
        a(v, out.subspan(n, n));
        b(x, tmp);
        for (std::size_t c = 0; c < n; ++c) {
            out[c] = -v[c];
            out[n + c] += tmp[c];
        }
    };

    DriftKernel k;
    k.dim = 2 * n;
    k.eval = [kinetic_part, gu = interaction.gradient, n](std::span<const double> state, std::span<const double> other,
                                                          std::span<double> out) {
        kinetic_part(state, out);
        std::vector<double> z(n);
        std::vector<double> g(n);
        for (std::size_t c = 0; c < n; ++c) z[c] = state[c] - other[c];
        gu(z, g);
        for (std::size_t c = 0; c < n; ++c) out[n + c] += g[c];
    };
    if (friction.lipschitz && confinement.lipschitz && interaction.gradient_lipschitz)
        k.lipschitz_bound = 1.0 + *friction.lipschitz + *confinement.lipschitz + *interaction.gradient_lipschitz;
    k.taming_exponent = k.lipschitz_bound ? 0.0 : 1.0;

    if (interaction.shape == PotentialShape::zero) {
        k.structure = LawIndependent{kinetic_part};
    } else if (interaction.shape == PotentialShape::quadratic) {
        const double kappa = interaction.strength;
        Matrix coupling(2 * n, 2 * n);
        for (std::size_t c = 0; c < n; ++c) coupling(n + c, c) = -kappa;
        k.structure = AffineInteraction{[kinetic_part, kappa, n](std::span<const double> state, std::span<double> out) {
                                            kinetic_part(state, out);
                                            for (std::size_t c = 0; c < n; ++c) out[n + c] += kappa * state[c];
                                        },
                                        std::move(coupling)};
    }

    ModelTraits traits;
    traits.kinetic = true;
    return make_model(fmt::format("vlasov_fokker_planck(U={}, A={}, B={}, d'={})", interaction.name, friction.name,
                                  confinement.name, n),
                      std::move(k), DiffusionSpec::kinetic(n),
                      initial.value_or(InitialLaw::isotropic_gaussian(2 * n, 0.0, 1.0)), traits);
}

ModelSpec linear_test_model(double rate, std::size_t dim, std::optional<InitialLaw> initial) {
    if (!(rate > 0.0)) throw ValidationError("linear test model: rate must be positive");
    auto self = [rate](std::span<const double> x, std::span<double> out) {
        for (std::size_t c = 0; c < x.size(); ++c) out[c] = rate * x[c];
    };
    DriftKernel k;
    k.dim = dim;
    k.eval = [self](std::span<const double> x, std::span<const double>, std::span<double> out) { self(x, out); };
    k.lipschitz_bound = rate;
    k.structure = LawIndependent{self};
    return make_model(fmt::format("linear(rate={}, d={})", rate, dim), std::move(k),
                      DiffusionSpec::isotropic(dim, std::sqrt(2.0)),
                      initial.value_or(InitialLaw::isotropic_gaussian(dim, 0.0, 1.0)));
}

ModelSpec zero_drift_model(std::size_t dim, double sigma_scale, std::optional<InitialLaw> initial) {
    auto self = [](std::span<const double>, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); };
    DriftKernel k;
    k.dim = dim;
    k.eval = [self](std::span<const double> x, std::span<const double>, std::span<double> out) { self(x, out); };
    k.lipschitz_bound = 0.0;
    k.structure = LawIndependent{self};
    return make_model(fmt::format("zero(sigma={}, d={})", sigma_scale, dim), std::move(k),
                      DiffusionSpec::isotropic(dim, sigma_scale),
                      initial.value_or(InitialLaw::isotropic_gaussian(dim, 0.0, 1.0)));
}

double linear_model_mean(double rate, double m0, double t) { return m0 * std::exp(-rate * t); }

double linear_model_variance(double rate, double v0, double t) {
    const double stationary = 1.0 / rate;
    return stationary + (v0 - stationary) * std::exp(-2.0 * rate * t);
}

} // namespace chaoslab
