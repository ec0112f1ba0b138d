#include "chaoslab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace chaoslab {
namespace {

struct ValueError {
    std::size_t offset = 0;
    std::string message;
};

using Parsed = std::optional<ValueError>;

bool is_bare_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == '/' || c == '+';
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::size_t leading_blanks(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    return first == std::string_view::npos ? s.size() : first;
}

Parsed parse_value(std::string_view text, double& out) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) return ValueError{0, fmt::format("expected a real number, got '{}'", text)};
    if (!std::isfinite(v)) return ValueError{0, fmt::format("'{}' is not finite", text)};
    out = v;
    return std::nullopt;
}

Parsed parse_value(std::string_view text, std::size_t& out) {
    std::size_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec == std::errc::result_out_of_range) return ValueError{0, fmt::format("'{}' is out of range", text)};
    if (ec != std::errc() || ptr != end)
        return ValueError{0, fmt::format("expected a nonnegative integer, got '{}'", text)};
    out = v;
    return std::nullopt;
}

Parsed parse_value(std::string_view text, bool& out) {
    if (text == "true") out = true;
    else if (text == "false") out = false;
    else return ValueError{0, fmt::format("expected true or false, got '{}'", text)};
    return std::nullopt;
}

Parsed parse_value(std::string_view text, std::string& out) {
    if (!text.empty() && text.front() == '"') {
        std::string s;
        for (std::size_t i = 1; i < text.size(); ++i) {
            const char c = text[i];
            if (c == '\\') {
                if (i + 1 >= text.size()) return ValueError{i, "dangling escape"};
                const char e = text[++i];
                if (e != '"' && e != '\\') return ValueError{i - 1, fmt::format("unknown escape '\\{}'", e)};
                s.push_back(e);
            } else if (c == '"') {
                if (i + 1 != text.size()) return ValueError{i + 1, "unexpected text after closing quote"};
                out = std::move(s);
                return std::nullopt;
            } else {
                s.push_back(c);
            }
        }
        return ValueError{0, "unterminated string"};
    }
    for (std::size_t i = 0; i < text.size(); ++i)
        if (!is_bare_char(text[i]))
            return ValueError{i, fmt::format("unexpected character '{}' (quote strings containing it)", text[i])};
    out = std::string(text);
    return std::nullopt;
}

template <class T>
Parsed parse_value(std::string_view text, std::vector<T>& out) {
    std::size_t base = 0;
    if (!text.empty() && text.front() == '[') {
        if (text.back() != ']') return ValueError{text.size(), "missing closing ']'"};
        base = 1;
        text = text.substr(1, text.size() - 2);
    }
    std::vector<T> items;
    if (!trim(text).empty()) {
        std::size_t start = 0;
        while (true) {
            const auto comma = text.find(',', start);
            const auto raw = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
            const auto item = trim(raw);
            const std::size_t at = base + start + leading_blanks(raw);
            if (item.empty()) return ValueError{at, "empty list item"};
            T v{};
            if (auto err = parse_value(item, v)) {
                err->offset += at;
                return err;
            }
            items.push_back(v);
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
    }
    out = std::move(items);
    return std::nullopt;
}

std::string format_value(double v) { return fmt::format("{}", v); }
std::string format_value(std::size_t v) { return fmt::format("{}", v); }
std::string format_value(bool v) { return v ? "true" : "false"; }

std::string format_value(const std::string& v) {
    if (!v.empty() && std::all_of(v.begin(), v.end(), is_bare_char)) return v;
    std::string out = "\"";
    for (char c : v) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

template <class T>
std::string format_value(const std::vector<T>& v) {
    std::vector<std::string> items;
    for (const auto& x : v) items.push_back(format_value(x));
    return fmt::format("[{}]", fmt::join(items, ", "));
}

struct Field {
    std::string section;
    std::string key;
    std::function<Parsed(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <class Block, class T>
Field field(std::string section, std::string key, Block RunConfig::*block, T Block::*member) {
    return Field{std::move(section), std::move(key),
                 [block, member](RunConfig& c, std::string_view text) { return parse_value(text, (c.*block).*member); },
                 [block, member](const RunConfig& c) { return format_value((c.*block).*member); }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = [] {
        using R = RunConfig;
        std::vector<Field> f;
        f.push_back(field("model", "family", &R::model, &ModelBlock::family));
        f.push_back(field("model", "dim", &R::model, &ModelBlock::dim));
        f.push_back(field("model", "confinement", &R::model, &ModelBlock::confinement));
        f.push_back(field("model", "confinement_strength", &R::model, &ModelBlock::confinement_strength));
        f.push_back(field("model", "interaction", &R::model, &ModelBlock::interaction));
        f.push_back(field("model", "interaction_strength", &R::model, &ModelBlock::interaction_strength));
        f.push_back(field("model", "rate", &R::model, &ModelBlock::rate));
        f.push_back(field("model", "noise_scale", &R::model, &ModelBlock::noise_scale));
        f.push_back(field("model", "friction", &R::model, &ModelBlock::friction));
        f.push_back(field("model", "position_confinement", &R::model, &ModelBlock::position_confinement));
        f.push_back(field("model", "initial", &R::model, &ModelBlock::initial));
        f.push_back(field("model", "initial_mean", &R::model, &ModelBlock::initial_mean));
        f.push_back(field("model", "initial_variance", &R::model, &ModelBlock::initial_variance));
        f.push_back(field("model", "initial_low", &R::model, &ModelBlock::initial_low));
        f.push_back(field("model", "initial_high", &R::model, &ModelBlock::initial_high));
        f.push_back(field("sim", "dt", &R::sim, &SimBlock::dt));
        f.push_back(field("sim", "t_final", &R::sim, &SimBlock::t_final));
        f.push_back(field("sim", "n_particles", &R::sim, &SimBlock::n_particles));
        f.push_back(field("sim", "n_grid", &R::sim, &SimBlock::n_grid));
        f.push_back(field("sim", "seed", &R::sim, &SimBlock::seed));
        f.push_back(field("sim", "replicas", &R::sim, &SimBlock::replicas));
        f.push_back(field("sim", "taming", &R::sim, &SimBlock::taming));
        f.push_back(field("sim", "allow_large_dt", &R::sim, &SimBlock::allow_large_dt));
        f.push_back(field("reference", "m", &R::reference, &ReferenceBlock::m));
        f.push_back(field("reference", "picard_iters", &R::reference, &ReferenceBlock::picard_iters));
        f.push_back(field("experiment", "kind", &R::experiment, &ExperimentBlock::kind));
        f.push_back(field("experiment", "r_grid", &R::experiment, &ExperimentBlock::r_grid));
        f.push_back(field("experiment", "observable", &R::experiment, &ExperimentBlock::observable));
        f.push_back(field("experiment", "observable_index", &R::experiment, &ExperimentBlock::observable_index));
        f.push_back(field("experiment", "observable_bound", &R::experiment, &ExperimentBlock::observable_bound));
        f.push_back(field("experiment", "sup_over_time", &R::experiment, &ExperimentBlock::sup_over_time));
        f.push_back(field("experiment", "target", &R::experiment, &ExperimentBlock::target));
        f.push_back(field("experiment", "burn_in_time", &R::experiment, &ExperimentBlock::burn_in_time));
        f.push_back(field("experiment", "burn_in_particles", &R::experiment, &ExperimentBlock::burn_in_particles));
        f.push_back(field("experiment", "record_every", &R::experiment, &ExperimentBlock::record_every));
        f.push_back(field("experiment", "gap_times", &R::experiment, &ExperimentBlock::gap_times));
        f.push_back(field("experiment", "gap_replicas", &R::experiment, &ExperimentBlock::gap_replicas));
        f.push_back(field("output", "directory", &R::output, &OutputBlock::directory));
        f.push_back(field("output", "snapshot_stride", &R::output, &OutputBlock::snapshot_stride));
        f.push_back(field("output", "plot", &R::output, &OutputBlock::plot));
        return f;
    }();
    return table;
}

const std::vector<std::string>& sections() {
    static const std::vector<std::string> names{"model", "sim", "reference", "experiment", "output"};
    return names;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

bool one_of(const std::string& value, std::initializer_list<std::string_view> options) {
    return std::find(options.begin(), options.end(), value) != options.end();
}

bool is_step_multiple(double t, double dt) {
    const double ratio = t / dt;
    const double rounded = std::round(ratio);
    return std::abs(ratio - rounded) <= 1e-9 * std::max(1.0, ratio);
}

bool has_closed_form_target(const ModelBlock& m) {
    return m.family == "granular" && m.confinement == "quadratic" && m.confinement_strength > 0.0 &&
           (m.interaction == "none" || m.interaction == "quadratic");
}

std::size_t state_dim(const ModelBlock& m) { return m.family == "vlasov_fokker_planck" ? 2 * m.dim : m.dim; }

Potential make_potential(const std::string& shape, std::size_t dim, double strength) {
    if (shape == "quadratic") return Potential::quadratic(dim, strength);
    if (shape == "cubic") return Potential::abs_cubic(dim, strength);
    return Potential::zero(dim);
}

InitialLaw make_initial(const ModelBlock& m) {
    const std::size_t d = state_dim(m);
    if (m.initial == "point") return InitialLaw::point_mass(std::vector<double>(d, m.initial_mean));
    if (m.initial == "uniform")
        return InitialLaw::uniform_box(std::vector<double>(d, m.initial_low), std::vector<double>(d, m.initial_high));
    return InitialLaw::isotropic_gaussian(d, m.initial_mean, m.initial_variance);
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : ValidationError(fmt::format("{}", fmt::join(problems, "\n"))), problems_(std::move(problems)) {}

std::string suggest_key(std::string_view key, const std::vector<std::string>& known) {
    std::string best;
    std::size_t best_distance = 3;
    for (const auto& k : known) {
        const std::size_t d = edit_distance(key, k);
        if (d < best_distance) {
            best_distance = d;
            best = k;
        }
    }
    return best;
}

RunConfig parse_config(std::string_view text) {
    RunConfig config;
    std::vector<std::string> errors;
    std::vector<std::string> seen;
    std::string section;
    bool section_valid = false;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '\\' && quoted) ++i;
            else if (line[i] == '"') quoted = !quoted;
            else if (line[i] == '#' && !quoted) {
                line = line.substr(0, i);
                break;
            }
        }
        const std::size_t indent = leading_blanks(line);
        const auto body = trim(line);
        if (body.empty()) continue;
        const auto where = [&](std::size_t column) { return fmt::format("line {}, column {}", line_no, column + 1); };

        if (body.front() == '[') {
            if (body.back() != ']') {
                errors.push_back(fmt::format("{}: expected ']' to close the section header", where(indent + body.size())));
                section_valid = false;
                continue;
            }
            const auto name = trim(body.substr(1, body.size() - 2));
            const std::size_t at = indent + 1 + leading_blanks(body.substr(1));
            section = std::string(name);
            section_valid = std::find(sections().begin(), sections().end(), section) != sections().end();
            if (!section_valid) {
                const auto hint = suggest_key(section, sections());
                errors.push_back(fmt::format("{}: unknown section [{}]{}", where(at), section,
                                             hint.empty() ? "" : fmt::format(" (did you mean [{}]?)", hint)));
            }
            continue;
        }

        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            errors.push_back(fmt::format("{}: expected 'key = value'", where(indent)));
            continue;
        }
        const auto key = trim(body.substr(0, eq));
        const auto raw_value = body.substr(eq + 1);
        const auto value = trim(raw_value);
        const std::size_t value_at = indent + eq + 1 + leading_blanks(raw_value);
        if (key.empty()) {
            errors.push_back(fmt::format("{}: missing key before '='", where(indent)));
            continue;
        }
        if (section.empty()) {
            errors.push_back(fmt::format("{}: key '{}' appears before any section header", where(indent), key));
            continue;
        }
        if (!section_valid) continue;

        const auto& table = fields();
        const auto it = std::find_if(table.begin(), table.end(),
                                     [&](const Field& f) { return f.section == section && f.key == key; });
        if (it == table.end()) {
            std::vector<std::string> here;
            std::string elsewhere;
            for (const auto& f : table) {
                if (f.section == section) here.push_back(f.key);
                else if (f.key == key) elsewhere = f.section;
            }
            std::string hint;
            if (!elsewhere.empty()) hint = fmt::format(" (it belongs in [{}])", elsewhere);
            else if (auto s = suggest_key(key, here); !s.empty()) hint = fmt::format(" (did you mean \"{}\"?)", s);
            errors.push_back(fmt::format("{}: unknown key \"{}\" in [{}]{}", where(indent), key, section, hint));
            continue;
        }
        const std::string qualified = section + "." + std::string(key);
        if (std::find(seen.begin(), seen.end(), qualified) != seen.end()) {
            errors.push_back(fmt::format("{}: duplicate key {}", where(indent), qualified));
            continue;
        }
        seen.push_back(qualified);
        if (value.empty()) {
            errors.push_back(fmt::format("{}: missing value for {}", where(value_at), qualified));
            continue;
        }
        if (auto err = it->set(config, value))
            errors.push_back(fmt::format("{}: {}: {}", where(value_at + err->offset), qualified, err->message));
    }
    if (!errors.empty()) throw ConfigError(std::move(errors));

    resolve_defaults(config);
    auto problems = validation_problems(config);
    if (!problems.empty()) throw ConfigError(std::move(problems));
    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open config file {}", path));
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& config) {
    std::string out;
    std::string current;
    for (const auto& f : fields()) {
        if (f.section != current) {
            if (!current.empty()) out += "\n";
            out += fmt::format("[{}]\n", f.section);
            current = f.section;
        }
        out += fmt::format("{} = {}\n", f.key, f.get(config));
    }
    return out;
}

std::string serialize_model(const ModelBlock& model) {
    RunConfig c;
    c.model = model;
    std::string out = "[model]\n";
    for (const auto& f : fields())
        if (f.section == "model") out += fmt::format("{} = {}\n", f.key, f.get(c));
    return out;
}

void resolve_defaults(RunConfig& config) {
    auto& sim = config.sim;
    auto& ex = config.experiment;
    if (ex.kind == "chaos_rate" && sim.n_grid.empty()) {
        for (std::size_t div : {8, 4, 2, 1}) {
            const std::size_t n = sim.n_particles / div;
            if (n >= 1 && (sim.n_grid.empty() || sim.n_grid.back() != n)) sim.n_grid.push_back(n);
        }
    }
    if ((ex.kind == "observable_deviation" || ex.kind == "measure_deviation") && ex.r_grid.empty())
        for (int k = 0; k <= 10; ++k) ex.r_grid.push_back(0.05 * k);

    std::size_t largest = sim.n_particles;
    if (ex.kind == "chaos_rate" && !sim.n_grid.empty())
        largest = *std::max_element(sim.n_grid.begin(), sim.n_grid.end());
    if (config.reference.m == 0) config.reference.m = 16 * largest;
    if (ex.burn_in_particles == 0) ex.burn_in_particles = 4 * sim.n_particles;
    if (ex.target == "auto") ex.target = has_closed_form_target(config.model) ? "closed_form" : "burn_in";
}

std::vector<std::string> validation_problems(const RunConfig& config) {
    std::vector<std::string> p;
    const auto& m = config.model;
    const auto& sim = config.sim;
    const auto& ex = config.experiment;

    if (!one_of(m.family, {"granular", "vlasov_fokker_planck", "linear", "zero"}))
        p.push_back(fmt::format("model.family: unknown family '{}' (granular, vlasov_fokker_planck, linear, zero)",
                                m.family));
    if (m.dim == 0) p.push_back("model.dim must be at least 1");
    if (!one_of(m.confinement, {"none", "quadratic", "cubic"}))
        p.push_back(fmt::format("model.confinement: unknown potential '{}' (none, quadratic, cubic)", m.confinement));
    if (!one_of(m.interaction, {"none", "quadratic", "cubic"}))
        p.push_back(fmt::format("model.interaction: unknown potential '{}' (none, quadratic, cubic)", m.interaction));
    if (m.confinement_strength < 0.0) p.push_back("model.confinement_strength must be nonnegative");
    if (m.interaction_strength < 0.0) p.push_back("model.interaction_strength must be nonnegative");
    if (m.family == "linear" && !(m.rate > 0.0)) p.push_back("model.rate must be positive");
    if (m.noise_scale < 0.0) p.push_back("model.noise_scale must be nonnegative");
    if (!one_of(m.initial, {"point", "gaussian", "uniform"}))
        p.push_back(fmt::format("model.initial: unknown law '{}' (point, gaussian, uniform)", m.initial));
    if (m.initial == "gaussian" && !(m.initial_variance > 0.0)) p.push_back("model.initial_variance must be positive");
    if (m.initial == "uniform" && !(m.initial_low < m.initial_high))
        p.push_back("model.initial_low must be below model.initial_high");

    if (!(sim.dt > 0.0)) p.push_back("sim.dt must be positive");
    if (!(sim.t_final > 0.0)) p.push_back("sim.t_final must be positive");
    if (sim.dt > 0.0 && sim.t_final > 0.0) {
        if (!is_step_multiple(sim.t_final, sim.dt) || std::round(sim.t_final / sim.dt) < 1.0)
            p.push_back(fmt::format("sim.t_final / sim.dt = {} / {} is not a whole number of steps", sim.t_final,
                                    sim.dt));
        if (sim.dt > 0.1 && !sim.allow_large_dt)
            p.push_back(fmt::format("sim.dt = {} exceeds 0.1 (set sim.allow_large_dt = true to override)", sim.dt));
    }
    if (sim.n_particles == 0) p.push_back("sim.n_particles must be at least 1");
    if (sim.replicas == 0) p.push_back("sim.replicas must be at least 1");
    if (ex.kind == "chaos_rate") {
        if (sim.n_grid.empty()) p.push_back("sim.n_grid must list at least one N");
        for (std::size_t n : sim.n_grid)
            if (n == 0) p.push_back("sim.n_grid entries must be at least 1");
    }

    const std::size_t largest = ex.kind == "chaos_rate" && !sim.n_grid.empty()
                                    ? *std::max_element(sim.n_grid.begin(), sim.n_grid.end())
                                    : sim.n_particles;
    if (config.reference.m == 0) p.push_back("reference.m must be at least 1");
    if (ex.kind == "measure_deviation" && config.reference.m < largest)
        p.push_back(fmt::format("reference.m = {} is smaller than sim.n_particles = {}", config.reference.m, largest));

    if (!one_of(ex.kind, {"chaos_rate", "observable_deviation", "measure_deviation", "equilibrium", "trajectory"}))
        p.push_back(fmt::format(
            "experiment.kind: unknown kind '{}' (chaos_rate, observable_deviation, measure_deviation, equilibrium, "
            "trajectory)",
            ex.kind));
    for (double r : ex.r_grid)
        if (r < 0.0) p.push_back("experiment.r_grid entries must be nonnegative");
    if ((ex.kind == "observable_deviation" || ex.kind == "measure_deviation") && ex.r_grid.empty())
        p.push_back("experiment.r_grid must not be empty");
    if (!one_of(ex.observable, {"coordinate", "clipped"}))
        p.push_back(fmt::format("experiment.observable: unknown observable '{}' (coordinate, clipped)", ex.observable));
    if (m.dim > 0 && ex.observable_index >= state_dim(m))
        p.push_back(fmt::format("experiment.observable_index = {} is outside the state dimension {}",
                                ex.observable_index, state_dim(m)));
    if (!(ex.observable_bound > 0.0)) p.push_back("experiment.observable_bound must be positive");
    if (!one_of(ex.target, {"auto", "closed_form", "burn_in"}))
        p.push_back(fmt::format("experiment.target: unknown target '{}' (auto, closed_form, burn_in)", ex.target));
    if (ex.record_every == 0) p.push_back("experiment.record_every must be at least 1");
    if (ex.gap_replicas == 0) p.push_back("experiment.gap_replicas must be at least 1");
    if (ex.kind == "equilibrium") {
        if (m.family != "granular") p.push_back("experiment.kind = equilibrium needs model.family = granular");
        if (ex.target == "closed_form" && !has_closed_form_target(m))
            p.push_back("experiment.target = closed_form needs a quadratic confinement with positive strength and "
                        "no or quadratic interaction");
        if (ex.target == "burn_in") {
            if (!(ex.burn_in_time > 0.0) || (sim.dt > 0.0 && !is_step_multiple(ex.burn_in_time, sim.dt)))
                p.push_back("experiment.burn_in_time must be a positive whole number of sim.dt steps");
            if (ex.burn_in_particles < sim.n_particles)
                p.push_back("experiment.burn_in_particles must be at least sim.n_particles");
        }
        for (double t : ex.gap_times) {
            if (t < 0.0 || t > sim.t_final * (1.0 + 1e-12) || (sim.dt > 0.0 && !is_step_multiple(t, sim.dt)))
                p.push_back(fmt::format("experiment.gap_times entry {} must be a step time in [0, sim.t_final]", t));
        }
    }
    if (config.output.directory.empty()) p.push_back("output.directory must not be empty");
    if (config.output.snapshot_stride == 0) p.push_back("output.snapshot_stride must be at least 1");
    return p;
}

ModelSpec build_model(const ModelBlock& m) {
    const auto initial = make_initial(m);
    if (m.family == "granular")
        return granular_media_model(make_potential(m.confinement, m.dim, m.confinement_strength),
                                    make_potential(m.interaction, m.dim, m.interaction_strength), m.dim, initial);
    if (m.family == "vlasov_fokker_planck")
        return vlasov_fokker_planck_model(make_potential(m.interaction, m.dim, m.interaction_strength),
                                          LipschitzMap::linear(m.dim, m.friction),
                                          LipschitzMap::linear(m.dim, m.position_confinement), m.dim, initial);
    if (m.family == "linear") return linear_test_model(m.rate, m.dim, initial);
    if (m.family == "zero") return zero_drift_model(m.dim, m.noise_scale, initial);
    throw ValidationError(fmt::format("unknown model family '{}'", m.family));
}

SimConfig build_sim_config(const RunConfig& config, std::size_t n_particles, std::size_t workers) {
    SimConfig c;
    c.dt = config.sim.dt;
    c.t_final = config.sim.t_final;
    c.n_particles = n_particles;
    c.seed = config.sim.seed;
    c.taming = config.sim.taming;
    c.allow_large_dt = config.sim.allow_large_dt;
    c.snapshot_stride = config.output.snapshot_stride;
    c.workers = std::max<std::size_t>(1, workers);
    return c;
}

} // namespace chaoslab
