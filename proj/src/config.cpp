#include "rdpredict/config.hpp"

#include "rdpredict/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <regex>
#include <set>

namespace rdpredict {

namespace {

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

// Walks one JSON object; every key must be read, leftovers are rejected.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError(path_, "expected an object");
    }

    bool has(const std::string& key) const { return node_.contains(key); }
    std::string key_path(const std::string& key) const { return join(path_, key); }

    const json& require(const std::string& key) {
        if (!node_.contains(key)) throw ConfigError(key_path(key), "missing required key");
        seen_.insert(key);
        return node_.at(key);
    }

    const json* find(const std::string& key) {
        if (!node_.contains(key)) return nullptr;
        seen_.insert(key);
        return &node_.at(key);
    }

    double number(const std::string& key, double fallback) {
        const json* v = find(key);
        return v ? as_number(*v, key_path(key)) : fallback;
    }

    std::size_t count(const std::string& key, std::size_t fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_number_integer() || v->get<long long>() < 0) {
            throw ConfigError(key_path(key), "expected a non-negative integer");
        }
        return v->get<std::size_t>();
    }

    bool flag(const std::string& key, bool fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_boolean()) throw ConfigError(key_path(key), "expected true or false");
        return v->get<bool>();
    }

    std::string text(const std::string& key, const std::string& fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_string()) throw ConfigError(key_path(key), "expected a string");
        return v->get<std::string>();
    }

    void finish() const {
        for (auto it = node_.begin(); it != node_.end(); ++it) {
            if (!seen_.count(it.key())) throw ConfigError(key_path(it.key()), "unknown key");
        }
    }

    static double as_number(const json& v, const std::string& path) {
        if (!v.is_number()) throw ConfigError(path, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(path, "expected a finite number");
        return x;
    }

    static std::vector<double> as_numbers(const json& v, const std::string& path) {
        if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
        }
        return out;
    }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

Coefficient parse_coefficient(const json& v, const std::string& path) {
    if (v.is_number()) return Coefficient(Section::as_number(v, path));
    if (!v.is_object()) throw ConfigError(path, "expected a number or {\"kind\": ...}");
    Section s(v, path);
    const std::string kind = s.text("kind", "");
    Coefficient out;
    if (kind == "constant") {
        out = Coefficient(Section::as_number(s.require("value"), s.key_path("value")));
    } else if (kind == "polynomial") {
        auto c = Section::as_numbers(s.require("coeffs"), s.key_path("coeffs"));
        if (c.empty()) throw ConfigError(s.key_path("coeffs"), "needs at least one coefficient");
        out = Coefficient::polynomial(std::move(c));
    } else {
        throw ConfigError(s.key_path("kind"), "expected \"constant\" or \"polynomial\"");
    }
    s.finish();
    return out;
}

json coefficient_to_json(const Coefficient& c) {
    if (c.is_constant()) return c.coefficients().front();
    return json{{"kind", "polynomial"}, {"coeffs", c.coefficients()}};
}

SturmLiouvilleProblem parse_problem(const json& v) {
    Section s(v, "problem");
    SturmLiouvilleProblem pb;
    pb.rho = parse_coefficient(s.require("rho"), "problem.rho");
    pb.p = parse_coefficient(s.require("p"), "problem.p");
    pb.q = parse_coefficient(s.require("q"), "problem.q");
    pb.theta1 = parse_angle(s.require("theta1"), "problem.theta1");
    pb.theta2 = parse_angle(s.require("theta2"), "problem.theta2");
    s.finish();
    try {
        pb.validate(make_simpson_grid(201));
    } catch (const InvalidArgument& e) {
        throw ConfigError("problem", e.what());
    }
    return pb;
}

DesignSpec parse_design(const json& v) {
    Section s(v, "design");
    DesignSpec d;
    d.margin = s.number("margin", d.margin);
    d.D0 = s.number("D0", d.D0);
    if (!(d.D0 > 0.0)) throw ConfigError("design.D0", "must be positive");
    const json& poles = s.require("poles");
    if (poles.is_string()) {
        if (poles.get<std::string>() != "plant") throw ConfigError("design.poles", "expected an array or \"plant\"");
    } else {
        d.poles = Section::as_numbers(poles, "design.poles");
        if (d.poles->empty()) throw ConfigError("design.poles", "needs at least one pole");
        for (double p : *d.poles) {
            if (!(p < 0.0)) throw ConfigError("design.poles", "poles must be negative");
        }
    }
    d.t0 = s.number("t0", d.t0);
    if (!(d.t0 > 0.0)) throw ConfigError("design.t0", "must be positive");
    d.sigma_search = s.flag("sigma_search", d.sigma_search);
    if (const json* sg = s.find("sigma")) {
        d.sigma = Section::as_number(*sg, "design.sigma");
        if (!(*d.sigma > 0.0)) throw ConfigError("design.sigma", "must be positive");
    }
    d.envelope_samples = s.count("envelope_samples", d.envelope_samples);
    if (d.envelope_samples < 100) throw ConfigError("design.envelope_samples", "must be at least 100");
    s.finish();
    return d;
}

DelaySpec parse_delay(const json& v) {
    Section s(v, "delay");
    DelaySpec d;
    try {
        d.kind = delay_kind_from_string(s.text("kind", std::string(to_string(d.kind))));
    } catch (const InvalidArgument& e) {
        throw ConfigError("delay.kind", e.what());
    }
    d.amplitude = s.number("amplitude", d.kind == DelayKind::paper_example ? 0.23 : 0.0);
    d.omega = s.number("omega", d.omega);
    d.phase = s.number("phase", d.phase);
    d.path = s.text("path", "");
    if (d.kind == DelayKind::custom_sampled && d.path.empty()) {
        throw ConfigError("delay.path", "custom_sampled needs a table path");
    }
    if (const json* dc = s.find("delta_claimed")) {
        d.delta_claimed = Section::as_number(*dc, "delay.delta_claimed");
        if (*d.delta_claimed < 0.0) throw ConfigError("delay.delta_claimed", "must be non-negative");
    }
    s.finish();
    return d;
}

InitialCondition parse_initial(const json& v) {
    Section s(v, "sim.initial");
    InitialCondition y0;
    try {
        y0.kind = initial_kind_from_string(s.text("kind", "paper_example"));
    } catch (const InvalidArgument& e) {
        throw ConfigError("sim.initial.kind", e.what());
    }
    switch (y0.kind) {
        case InitialKind::polynomial:
            y0.coeffs = Section::as_numbers(s.require("coeffs"), "sim.initial.coeffs");
            if (y0.coeffs.empty()) throw ConfigError("sim.initial.coeffs", "needs at least one coefficient");
            break;
        case InitialKind::eigenfunction:
        case InitialKind::sine:
            y0.index = s.count("index", 1);
            if (y0.index == 0) throw ConfigError("sim.initial.index", "indices start at 1");
            break;
        case InitialKind::sampled:
            y0.samples = Section::as_numbers(s.require("values"), "sim.initial.values");
            break;
        case InitialKind::paper_example: break;
    }
    s.finish();
    return y0;
}

SimSpec parse_sim(const json& v) {
    Section s(v, "sim");
    SimSpec sim;
    sim.t_end = s.number("t_end", sim.t_end);
    if (!(sim.t_end > 0.0)) throw ConfigError("sim.t_end", "must be positive");
    sim.dt = s.number("dt", sim.dt);
    if (!(sim.dt > 0.0)) throw ConfigError("sim.dt", "must be positive");
    try {
        sim.rule = quadrature_rule_from_string(s.text("rule", "left"));
    } catch (const InvalidArgument& e) {
        throw ConfigError("sim.rule", e.what());
    }
    sim.open_loop = s.flag("open_loop", sim.open_loop);
    sim.output_every = s.count("output_every", sim.output_every);
    if (sim.output_every == 0) throw ConfigError("sim.output_every", "must be at least 1");
    if (const json* y0 = s.find("initial")) sim.y0 = parse_initial(*y0);
    s.finish();
    return sim;
}

json initial_to_json(const InitialCondition& y0) {
    json j{{"kind", std::string(to_string(y0.kind))}};
    switch (y0.kind) {
        case InitialKind::polynomial: j["coeffs"] = y0.coeffs; break;
        case InitialKind::eigenfunction:
        case InitialKind::sine: j["index"] = y0.index; break;
        case InitialKind::sampled: j["values"] = y0.samples; break;
        case InitialKind::paper_example: break;
    }
    return j;
}

}  // namespace

double parse_angle(const json& value, const std::string& key) {
    if (value.is_number()) return Section::as_number(value, key);
    if (!value.is_string()) throw ConfigError(key, "expected a number or an expression like \"pi/3\"");
    static const std::regex form(R"(\s*(-)?\s*(?:([0-9]*\.?[0-9]+)\s*\*\s*)?pi\s*(?:/\s*([0-9]*\.?[0-9]+))?\s*)");
    std::smatch m;
    const std::string text = value.get<std::string>();
    if (!std::regex_match(text, m, form)) {
        throw ConfigError(key, "cannot read angle '" + text + "'");
    }
    double x = std::numbers::pi;
    if (m[2].matched) x *= std::stod(m[2].str());
    if (m[3].matched) {
        const double d = std::stod(m[3].str());
        if (d == 0.0) throw ConfigError(key, "division by zero in '" + text + "'");
        x /= d;
    }
    return m[1].matched ? -x : x;
}

std::vector<double> default_sweep_deltas() {
    std::vector<double> out;
    for (int i = 0; i <= 12; ++i) out.push_back(0.05 * i);
    return out;
}

Config parse_config(const json& doc) {
    Section root(doc, "");
    Config c;
    c.problem = parse_problem(root.require("problem"));
    if (const json* b = root.find("basis")) {
        Section s(*b, "basis");
        c.modes = s.count("modes", c.modes);
        if (c.modes == 0) throw ConfigError("basis.modes", "must be at least 1");
        c.grid_nodes = s.count("grid_nodes", c.grid_nodes);
        if (c.grid_nodes < 3 || c.grid_nodes % 2 == 0) {
            throw ConfigError("basis.grid_nodes", "must be odd and at least 3");
        }
        c.eig_tol = s.number("tol", c.eig_tol);
        if (!(c.eig_tol > 0.0)) throw ConfigError("basis.tol", "must be positive");
        s.finish();
    }
    if (const json* d = root.find("design")) c.design = parse_design(*d);
    if (const json* d = root.find("delay")) c.delay = parse_delay(*d);
    if (const json* s = root.find("sim")) c.sim = parse_sim(*s);
    c.sweep_deltas = default_sweep_deltas();
    if (const json* sw = root.find("sweep")) {
        Section s(*sw, "sweep");
        if (const json* d = s.find("deltas")) {
            c.sweep_deltas = Section::as_numbers(*d, "sweep.deltas");
            for (double x : c.sweep_deltas) {
                if (x < 0.0) throw ConfigError("sweep.deltas", "deltas must be non-negative");
            }
        }
        s.finish();
    }
    root.finish();
    return c;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", path.string() + ": " + e.what());
    }
    Config c = parse_config(doc);
    if (!c.delay.path.empty()) {
        std::filesystem::path table(c.delay.path);
        if (table.is_relative()) c.delay.path = (path.parent_path() / table).lexically_normal().string();
    }
    return c;
}

json to_json(const Config& c) {
    json j;
    j["problem"] = {{"rho", coefficient_to_json(c.problem.rho)},
                    {"p", coefficient_to_json(c.problem.p)},
                    {"q", coefficient_to_json(c.problem.q)},
                    {"theta1", c.problem.theta1},
                    {"theta2", c.problem.theta2}};
    j["basis"] = {{"modes", c.modes}, {"grid_nodes", c.grid_nodes}, {"tol", c.eig_tol}};
    if (c.design) {
        const DesignSpec& d = *c.design;
        json dj{{"margin", d.margin}, {"D0", d.D0}, {"t0", d.t0}, {"sigma_search", d.sigma_search},
                {"envelope_samples", d.envelope_samples}};
        if (d.poles) dj["poles"] = *d.poles; else dj["poles"] = "plant";
        if (d.sigma) dj["sigma"] = *d.sigma;
        j["design"] = dj;
    }
    json dl{{"kind", std::string(to_string(c.delay.kind))},
            {"amplitude", c.delay.amplitude},
            {"omega", c.delay.omega},
            {"phase", c.delay.phase}};
    if (!c.delay.path.empty()) dl["path"] = c.delay.path;
    if (c.delay.delta_claimed) dl["delta_claimed"] = *c.delay.delta_claimed;
    j["delay"] = dl;
    j["sim"] = {{"t_end", c.sim.t_end},
                {"dt", c.sim.dt},
                {"rule", std::string(to_string(c.sim.rule))},
                {"open_loop", c.sim.open_loop},
                {"output_every", c.sim.output_every},
                {"initial", initial_to_json(c.sim.y0)}};
    j["sweep"] = {{"deltas", c.sweep_deltas}};
    return j;
}

std::string config_hash(const Config& config) {
    const std::string text = to_json(config).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

DelayField make_delay(const Config& c) {
    const double D0 = c.design ? c.design->D0 : 1.0;
    DelayField field = DelayField::constant(D0);
    switch (c.delay.kind) {
        case DelayKind::constant: break;
        case DelayKind::uniform_sinusoid:
            field = DelayField::uniform_sinusoid(D0, c.delay.amplitude, c.delay.omega, c.delay.phase);
            break;
        case DelayKind::paper_example: field = DelayField::paper_example(D0, c.delay.amplitude); break;
        case DelayKind::custom_sampled:
            try {
                field = DelayField::custom_sampled(D0, load_sampled_delay(c.delay.path));
            } catch (const InvalidArgument& e) {
                throw ConfigError("delay.path", e.what());
            }
            break;
    }
    if (c.delay.delta_claimed) field.set_delta_claimed(*c.delay.delta_claimed);
    return field;
}

ControllerDesign make_controller(const Config& c, const SpectralBasis& basis) {
    if (!c.design) throw ConfigError("design", "missing required section");
    const DesignSpec& d = *c.design;
    const Truncation tr = select_truncation(basis.eigenvalues, d.margin);
    if (!d.poles) return make_zero_gain_design(basis.eigenvalues, d.margin, d.D0, d.t0);
    std::vector<double> poles = *d.poles;
    if (poles.size() == 1 && tr.N > 1) poles.assign(tr.N, poles.front());
    if (poles.size() != tr.N) {
        throw ConfigError("design.poles", "expected " + std::to_string(tr.N) + " poles (one per retained mode), got " +
                                              std::to_string(poles.size()));
    }
    return make_design(basis.eigenvalues, d.margin, d.D0, poles, d.t0);
}

SimulationConfig make_simulation_config(const Config& c, const SpectralBasis& basis) {
    SimulationConfig s;
    s.problem = c.problem;
    s.n_sim_modes = c.modes;
    s.grid_nodes = c.grid_nodes;
    s.eig_tol = c.eig_tol;
    s.design = make_controller(c, basis);
    s.delay = make_delay(c);
    s.y0 = c.sim.y0;
    s.t_end = c.sim.t_end;
    s.dt = c.sim.dt;
    s.rule = c.sim.rule;
    s.open_loop = c.sim.open_loop;
    s.output_every = c.sim.output_every;
    return s;
}

}  // namespace rdpredict
