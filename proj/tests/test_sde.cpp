#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "chaoslab/errors.hpp"
#include "chaoslab/sde.hpp"
#include "chaoslab/stats.hpp"
#include "support.hpp"

using namespace chaoslab;

namespace {

SimConfig make_config(std::size_t n, double dt, double t_final, std::uint64_t seed = 1) {
    SimConfig c;
    c.n_particles = n;
    c.dt = dt;
    c.t_final = t_final;
    c.seed = seed;
    return c;
}

ModelSpec quadratic_granular(std::optional<InitialLaw> initial = std::nullopt) {
    return granular_media_model(Potential::quadratic(1), Potential::quadratic(1), 1, std::move(initial));
}

double mean_of(const EmpiricalMeasure& m) { return m.mean()[0]; }

} // namespace

TEST_SUITE("sde") {

TEST_CASE("config validation lists every problem") {
    SimConfig c = make_config(0, 0.3, 1.0);
    c.snapshot_stride = 0;
    try {
        c.validate();
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("t_final / dt") != std::string::npos);
        CHECK(msg.find("exceeds 0.1") != std::string::npos);
        CHECK(msg.find("n_particles") != std::string::npos);
        CHECK(msg.find("snapshot_stride") != std::string::npos);
    }
    c = make_config(1, 0.25, 1.0);
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c.allow_large_dt = true;
    CHECK_NOTHROW(c.validate());
    CHECK(c.steps() == 4);
    CHECK(make_config(1, 0.01, 1.0).steps() == 100);
}

TEST_CASE("euler step examples") {
    const auto iso = DiffusionSpec::isotropic(1, std::sqrt(2.0));
    std::vector<double> out(1);
    euler_step(std::vector<double>{0.0}, std::vector<double>{0.0}, iso, std::vector<double>{0.0}, 0.01, 0.0, out);
    CHECK(out[0] == 0.0);
    euler_step(std::vector<double>{1.0}, std::vector<double>{1.0}, DiffusionSpec::isotropic(1, 7.0),
               std::vector<double>{0.0}, 0.5, 0.0, out);
    CHECK(out[0] == 0.5);
    euler_step(std::vector<double>{0.0}, std::vector<double>{0.0}, iso, std::vector<double>{0.3}, 0.01, 0.0, out);
    CHECK(out[0] == 0.3 * std::sqrt(2.0));

    // Tamed: drift / (1 + dt |drift|) = 10 / 2 at dt = 0.1.
    euler_step(std::vector<double>{0.0}, std::vector<double>{10.0}, iso, std::vector<double>{0.0}, 0.1, 1.0, out);
    CHECK(out[0] == doctest::Approx(-0.5).epsilon(1e-15));

    CHECK_THROWS_AS(euler_step(std::vector<double>{0.0}, std::vector<double>{INFINITY}, iso, std::vector<double>{0.0},
                               0.01, 0.0, out),
                    DivergenceError);
}

TEST_CASE("no drift and no noise keeps every particle fixed") {
    const auto model = zero_drift_model(2, 0.0);
    const auto run = simulate_particle_system(model, make_config(16, 0.01, 0.5), NoiseGrid(3, 0.01));
    REQUIRE(run.states.size() == 51);
    for (const auto& s : run.states) CHECK(s == run.states.front());
}

TEST_CASE("a single particle feels only b(X, X)") {
    const auto model = granular_media_model(Potential::quadratic(1, 0.5), Potential::abs_cubic(1), 1);
    const auto config = make_config(1, 0.01, 0.3);
    const NoiseGrid noise(17, config.dt);
    const auto run = simulate_particle_system(model, config, noise);

    std::vector<double> x(1);
    model.initial_law.sample(noise, Stream::initial, 0, 0, x);
    for (std::size_t k = 0; k < config.steps(); ++k) {
        const auto b = model.drift(x, x);
        std::vector<double> dw(1), next(1);
        noise.increments(Stream::brownian, 0, 0, static_cast<std::uint32_t>(k), dw);
        euler_step(x, b, model.diffusion, dw, config.dt, 0.0, next);
        x = next;
        CHECK(run.states[k + 1][0] == doctest::Approx(x[0]).epsilon(1e-13));
    }
}

TEST_CASE("linear model mean after the Euler recursion") {
    const double m0 = 1.0;
    const auto model = linear_test_model(1.0, 1, InitialLaw::isotropic_gaussian(1, m0, 1.0));
    auto config = make_config(512, 0.01, 1.0);
    const NoiseGrid noise(5, config.dt);
    std::vector<double> means;
    for (std::uint32_t r = 0; r < 40; ++r) {
        config.replica_id = r;
        config.snapshot_stride = 100;
        means.push_back(mean_of(simulate_particle_system(model, config, noise).measure(1)));
    }
    const auto est = estimate_mean(means);
    CHECK(std::abs(est.mean - m0 * std::pow(1.0 - config.dt, 100)) < 3.0 * est.std_error);
}

TEST_CASE("Jacobi step is exchangeable") {
    const std::vector<ModelSpec> models{
        quadratic_granular(),
        granular_media_model(Potential::quadratic(1), Potential::abs_cubic(1), 1),
        granular_media_model(Potential::quadratic(2), Potential::abs_cubic(2), 2),
        vlasov_fokker_planck_model(Potential::quadratic(1), LipschitzMap::linear(1, 1), LipschitzMap::linear(1, 1), 1),
    };
    testing::Gen gen(4);
    for (const auto& model : models) {
        const std::size_t n = 8;
        const std::size_t d = model.dim();
        auto states = gen.points(n, d);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), gen.rng);
        auto permuted = states;
        for (std::size_t i = 0; i < n; ++i)
            std::copy_n(states.begin() + perm[i] * d, d, permuted.begin() + i * d);
        for (int step = 0; step < 10; ++step) {
            const auto dw = gen.points(n, d, 0.1);
            auto dw_perm = dw;
            for (std::size_t i = 0; i < n; ++i) std::copy_n(dw.begin() + perm[i] * d, d, dw_perm.begin() + i * d);
            std::vector<double> next(n * d), next_perm(n * d);
            particle_system_step(model, states, dw, 0.01, 0.0, next);
            particle_system_step(model, permuted, dw_perm, 0.01, 0.0, next_perm);
            states = next;
            permuted = next_perm;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t c = 0; c < d; ++c) REQUIRE(permuted[i * d + c] == states[perm[i] * d + c]);
        }
    }
}

TEST_CASE("kinetic positions move by exactly v dt") {
    const auto model =
        vlasov_fokker_planck_model(Potential::quadratic(1), LipschitzMap::linear(1, 1.0), LipschitzMap::linear(1, 1.0), 1);
    const auto config = make_config(32, 0.01, 0.2);
    std::vector<double> previous;
    std::size_t checked = 0;
    simulate_particle_system(model, config, NoiseGrid(8, config.dt), [&](std::size_t step, std::span<const double> s) {
        if (step > 0)
            for (std::size_t i = 0; i < config.n_particles; ++i) {
                REQUIRE(s[2 * i] == previous[2 * i] + previous[2 * i + 1] * config.dt);
                ++checked;
            }
        previous.assign(s.begin(), s.end());
    });
    CHECK(checked == 20 * 32);
}

TEST_CASE("worker count never changes a bit") {
    const auto model = granular_media_model(Potential::quadratic(1), Potential::abs_cubic(1), 1);
    auto config = make_config(100, 0.01, 0.3);
    config.taming = true;
    const NoiseGrid noise(11, config.dt);
    const auto serial = simulate_particle_system(model, config, noise);
    const auto flow1 = build_reference_flow(model, 400, config, 2, noise);
    const auto coupled1 = simulate_coupled(model, config, flow1, noise);
    config.workers = 3;
    const auto threaded = simulate_particle_system(model, config, noise);
    const auto flow3 = build_reference_flow(model, 400, config, 2, noise);
    const auto coupled3 = simulate_coupled(model, config, flow3, noise);
    CHECK(serial.states == threaded.states);
    for (std::size_t k = 0; k <= flow1.steps; ++k)
        REQUIRE(std::equal(flow1.snapshot(k).points().begin(), flow1.snapshot(k).points().end(),
                           flow3.snapshot(k).points().begin()));
    CHECK(coupled1.mean_square_gap == coupled3.mean_square_gap);
    CHECK(coupled1.nonlinear.states == coupled3.nonlinear.states);
}

TEST_CASE("coupling null tests are bit-exact") {
    for (const auto& model : {zero_drift_model(2, 1.0), linear_test_model(1.0, 2), linear_test_model(3.0, 1)}) {
        auto config = make_config(40, 0.01, 0.5);
        const NoiseGrid noise(2, config.dt);
        const auto flow = build_reference_flow(model, 64, config, 1, noise);
        for (std::uint32_t r = 0; r < 3; ++r) {
            config.replica_id = r;
            const auto run = simulate_coupled(model, config, flow, noise);
            for (double g : run.mean_square_gap) REQUIRE(g == 0.0);
            CHECK(run.particle.states == run.nonlinear.states);
        }
    }
}

TEST_CASE("coupled pairs start together and share increments") {
    const auto model = quadratic_granular();
    const auto config = make_config(16, 0.01, 0.1);
    const NoiseGrid noise(6, config.dt);
    const auto flow = build_reference_flow(model, 256, config, 1, noise);
    const auto run = simulate_coupled(model, config, flow, noise);
    CHECK(run.particle.states.front() == run.nonlinear.states.front());
    CHECK(run.mean_square_gap.front() == 0.0);
    CHECK(run.mean_square_gap.back() > 0.0);
    // The reference ensemble draws its own initial points.
    CHECK(flow.snapshot(0).point(0)[0] != run.particle.states.front()[0]);

    auto other = config;
    other.dt = 0.02;
    CHECK_THROWS_AS(simulate_coupled(model, other, flow, noise), ValidationError);
    other = config;
    other.t_final = 0.2;
    CHECK_THROWS_AS(simulate_coupled(model, other, flow, noise), ValidationError);
}

TEST_CASE("reference flow examples") {
    SUBCASE("law-independent drift: all iterates identical") {
        const auto model = zero_drift_model(1, 1.0);
        const auto config = make_config(1, 0.01, 0.5);
        const NoiseGrid noise(1, config.dt);
        const auto one = build_reference_flow(model, 300, config, 1, noise);
        const auto three = build_reference_flow(model, 300, config, 3, noise);
        CHECK(three.iterate_distances == std::vector<double>{0.0, 0.0, 0.0});
        for (std::size_t k = 0; k <= one.steps; ++k)
            REQUIRE(std::equal(one.snapshot(k).points().begin(), one.snapshot(k).points().end(),
                               three.snapshot(k).points().begin()));
        CHECK(three.warnings.empty());
    }
    SUBCASE("linear model snapshots follow the Euler moments") {
        const double m0 = 2.0, v0 = 0.5, dt = 0.01;
        const auto model = linear_test_model(1.0, 1, InitialLaw::isotropic_gaussian(1, m0, v0));
        const auto flow = build_reference_flow(model, 4096, make_config(1, dt, 1.0), 1, NoiseGrid(4, dt));
        for (std::size_t k : {0, 25, 50, 100}) {
            const auto& s = flow.snapshot(k);
            REQUIRE(s.size() == 4096);
            for (std::size_t i = 0; i < s.size(); ++i) REQUIRE(s.weight(i) == 1.0 / 4096);
            const double decay = std::pow(1.0 - dt, static_cast<double>(k));
            // Euler variance: v_{k+1} = (1 - dt)^2 v_k + 2 dt.
            double var = v0;
            for (std::size_t j = 0; j < k; ++j) var = (1 - dt) * (1 - dt) * var + 2 * dt;
            const double mean = mean_of(s);
            double sq = 0.0;
            for (std::size_t i = 0; i < s.size(); ++i) sq += (s.point(i)[0] - mean) * (s.point(i)[0] - mean);
            CHECK(std::abs(mean - m0 * decay) < 4.0 * std::sqrt(var / 4096));
            CHECK(std::abs(sq / 4095 - var) < 4.0 * var * std::sqrt(2.0 / 4095));
        }
    }
    SUBCASE("quadratic granular mean decays like exp(-t)") {
        const double m0 = 2.0, dt = 0.01;
        const auto model = quadratic_granular(InitialLaw::isotropic_gaussian(1, m0, 1.0));
        const auto flow = build_reference_flow(model, 4096, make_config(1, dt, 1.0), 3, NoiseGrid(9, dt));
        double previous = INFINITY;
        for (std::size_t k = 0; k <= 100; k += 10) {
            // The interaction sums to zero, so the ensemble mean follows m <- (1 - dt) m plus averaged noise.
            const double sd = std::sqrt(1.0 / 4096 + 2.0 * dt * static_cast<double>(k) / 4096);
            const double mean = mean_of(flow.snapshot(k));
            CHECK(std::abs(mean - m0 * std::pow(1.0 - dt, static_cast<double>(k))) < 4.0 * sd);
            CHECK(mean < previous + 4.0 * sd);
            previous = mean;
        }
        CHECK(std::abs(m0 * std::exp(-1.0) - m0 * std::pow(1.0 - dt, 100.0)) < 0.004);
        // Successive iterates contract (here they coincide: the particle system is the fixed point).
        REQUIRE(flow.iterate_distances.size() == 3);
        CHECK(flow.iterate_distances[2] <= 0.5 * flow.iterate_distances[0] + 1e-12);
        CHECK(flow.warnings.empty());
    }
}

TEST_CASE("coupling gap shrinks like 1/N") {
    const auto model = quadratic_granular();
    auto config = make_config(256, 0.01, 1.0);
    const NoiseGrid noise(31, config.dt);
    const auto flow = build_reference_flow(model, 4096, config, 1, noise);
    std::vector<double> small, large;
    for (std::uint32_t r = 0; r < 200; ++r) {
        config.replica_id = r;
        config.n_particles = 64;
        small.push_back(simulate_coupled(model, config, flow, noise).mean_square_gap.back());
        config.replica_id = 1000 + r;
        config.n_particles = 256;
        large.push_back(simulate_coupled(model, config, flow, noise).mean_square_gap.back());
    }
    const double ratio = estimate_mean(small).mean / estimate_mean(large).mean;
    CHECK(ratio > 2.0);
    CHECK(ratio < 8.0);
}

TEST_CASE("divergence is reported with step and particle") {
    const auto model =
        granular_media_model(Potential::quadratic(1), Potential::abs_cubic(1), 1, InitialLaw::uniform_box({-300.0}, {300.0}));
    auto config = make_config(4, 0.1, 2.0);
    try {
        simulate_particle_system(model, config, NoiseGrid(1, config.dt));
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.step() != DivergenceError::unknown);
        CHECK(e.particle() < 4);
        CHECK(std::string(e.what()).find("step") != std::string::npos);
    }
    config.taming = true;
    CHECK_NOTHROW(simulate_particle_system(model, config, NoiseGrid(1, config.dt)));
}

TEST_CASE("snapshot stride keeps the last step") {
    auto config = make_config(3, 0.01, 0.1);
    config.snapshot_stride = 4;
    const auto run = simulate_particle_system(linear_test_model(1.0, 1), config, NoiseGrid(1, config.dt));
    CHECK(run.recorded_steps == std::vector<std::size_t>{0, 4, 8, 10});
    CHECK(run.time(3) == doctest::Approx(0.1));
}

}
