#include <doctest.h>

#include <string>

#include "chaoslab/config.hpp"
#include "support.hpp"

using namespace chaoslab;

namespace {

std::vector<std::string> problems_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.problems();
    }
    return {};
}

bool any_contains(const std::vector<std::string>& problems, const std::string& needle) {
    for (const auto& p : problems)
        if (p.find(needle) != std::string::npos) return true;
    return false;
}

} // namespace

TEST_SUITE("config") {

TEST_CASE("minimal config resolves every default") {
    const auto c = parse_config("[sim]\nn_particles = 64\n");
    CHECK(c.model.family == "granular");
    CHECK(c.sim.dt == 0.01);
    CHECK(c.sim.t_final == 1.0);
    CHECK(c.sim.replicas == 100);
    CHECK(c.sim.n_grid == std::vector<std::size_t>{8, 16, 32, 64});
    CHECK(c.reference.m == 16 * 64);
    CHECK(c.experiment.kind == "chaos_rate");
    CHECK(c.experiment.target == "closed_form");
    CHECK(c.experiment.burn_in_particles == 256);
    CHECK(c.output.directory == "out");
}

TEST_CASE("deviation kinds default the r grid") {
    const auto c = parse_config("[experiment]\nkind = observable_deviation\n");
    REQUIRE(c.experiment.r_grid.size() == 11);
    CHECK(c.experiment.r_grid.front() == 0.0);
    CHECK(c.experiment.r_grid.back() == doctest::Approx(0.5));
    CHECK(c.reference.m == 16 * 64);
}

TEST_CASE("non-quadratic models fall back to a burn-in target") {
    const auto c = parse_config("[model]\nconfinement = cubic\n[experiment]\nkind = equilibrium\n");
    CHECK(c.experiment.target == "burn_in");
}

TEST_CASE("step count error names both keys") {
    const auto p = problems_of("[sim]\ndt = 0.03\nt_final = 1\n");
    REQUIRE(p.size() == 1);
    CHECK(p[0].find("sim.t_final") != std::string::npos);
    CHECK(p[0].find("sim.dt") != std::string::npos);
}

TEST_CASE("misspelled keys get a suggestion") {
    const auto p = problems_of("[sim]\nn_partcles = 64\n");
    REQUIRE(p.size() == 1);
    CHECK(p[0].find("line 2, column 1") != std::string::npos);
    CHECK(p[0].find("did you mean \"n_particles\"?") != std::string::npos);
    const auto q = problems_of("[sim]\nfamily = linear\n");
    REQUIRE(q.size() == 1);
    CHECK(q[0].find("it belongs in [model]") != std::string::npos);
    CHECK(suggest_key("zzzzzz", {"dt", "seed"}).empty());
}

TEST_CASE("syntax errors carry line and column") {
    const auto p = problems_of("[sim]\n\n  dt = abc\n");
    REQUIRE(p.size() == 1);
    CHECK(p[0].find("line 3, column 8") != std::string::npos);
    CHECK(any_contains(problems_of("[sim\n"), "line 1"));
    CHECK(any_contains(problems_of("[sims]\n"), "did you mean [sim]?"));
    CHECK(any_contains(problems_of("dt = 0.1\n"), "before any section header"));
    CHECK(any_contains(problems_of("[sim]\ndt = 0.1\ndt = 0.2\n"), "duplicate key sim.dt"));
    CHECK(any_contains(problems_of("[sim]\ntaming = yes\n"), "expected true or false"));
}

TEST_CASE("every violation is listed") {
    const auto p = problems_of("[sim]\nreplicas = 0\nn_particles = 0\ndt = -1\n[model]\nfamily = nope\n");
    CHECK(p.size() >= 4);
    CHECK(any_contains(p, "sim.replicas"));
    CHECK(any_contains(p, "sim.n_particles"));
    CHECK(any_contains(p, "sim.dt"));
    CHECK(any_contains(p, "model.family"));
}

TEST_CASE("large steps need an explicit override") {
    CHECK(any_contains(problems_of("[sim]\ndt = 0.2\nt_final = 1\n"), "allow_large_dt"));
    CHECK(problems_of("[sim]\ndt = 0.2\nt_final = 1\nallow_large_dt = true\n").empty());
}

TEST_CASE("comments, quotes and lists") {
    const auto c = parse_config("# header\n[sim]\nn_grid = [16, 32] # trailing\n[output]\ndirectory = \"a #b \\\"c\\\"\"\n");
    CHECK(c.sim.n_grid == std::vector<std::size_t>{16, 32});
    CHECK(c.output.directory == "a #b \"c\"");
    CHECK(parse_config("[sim]\nn_grid = 16, 32\n").sim.n_grid == c.sim.n_grid);
}

TEST_CASE("serialization round trips") {
    testing::Gen gen(11);
    for (int trial = 0; trial < 50; ++trial) {
        RunConfig c;
        c.model.family = trial % 2 ? "linear" : "granular";
        c.model.rate = gen.uniform(0.1, 3.0);
        c.model.initial_mean = gen.normal();
        c.model.initial_variance = gen.uniform(0.1, 2.0);
        c.sim.dt = 0.01;
        c.sim.t_final = 0.01 * static_cast<double>(gen.integer(1, 300));
        c.sim.seed = static_cast<std::uint64_t>(gen.integer(0, 1 << 30));
        c.sim.n_particles = static_cast<std::size_t>(gen.integer(1, 500));
        c.sim.replicas = static_cast<std::size_t>(gen.integer(1, 500));
        c.experiment.kind = trial % 3 ? "observable_deviation" : "chaos_rate";
        c.experiment.r_grid = {gen.uniform(0, 1), gen.uniform(0, 1)};
        c.output.directory = trial % 4 ? "out dir" : "x\"y\\z";
        resolve_defaults(c);
        REQUIRE(validation_problems(c).empty());
        const auto text = serialize_config(c);
        const auto back = parse_config(text);
        CHECK(back == c);
        CHECK(serialize_config(back) == text);
    }
}

TEST_CASE("built models follow the model block") {
    RunConfig c;
    c.model.family = "vlasov_fokker_planck";
    c.model.dim = 2;
    c.model.interaction = "quadratic";
    const auto model = build_model(c.model);
    CHECK(model.dim() == 4);
    CHECK(model.traits.kinetic);
    c.model.family = "linear";
    CHECK(build_model(c.model).drift.law_independent());
    const auto sim = build_sim_config(c, 32, 3);
    CHECK(sim.n_particles == 32);
    CHECK(sim.workers == 3);
    CHECK(sim.dt == c.sim.dt);
}

}
