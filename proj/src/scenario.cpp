#include "oscchain/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <nlohmann/json.hpp>

#include "oscchain/coarse.hpp"
#include "oscchain/csv.hpp"
#include "oscchain/densities.hpp"
#include "oscchain/gaussian.hpp"

namespace oscchain {

using nlohmann::json;

std::vector<double> GridSpec::materialize() const {
    if (!points.empty()) return points;
    std::vector<double> out(count);
    if (count == 0) return out;
    if (count == 1) {
        out[0] = start;
        return out;
    }
    for (std::size_t i = 0; i < count; ++i) {
        double f = static_cast<double>(i) / static_cast<double>(count - 1);
        out[i] = log_scale ? start * std::pow(stop / start, f) : start + f * (stop - start);
    }
    return out;
}

namespace {

double get_num(const json& j, const std::string& path, const char* key, double fallback,
               bool required = false) {
    if (!j.contains(key)) {
        if (required) throw ConfigError(path + "." + key, "missing required field");
        return fallback;
    }
    if (!j[key].is_number()) throw ConfigError(path + "." + key, "must be a number");
    return j[key].get<double>();
}

std::string get_str(const json& j, const std::string& path, const char* key,
                    const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_string()) throw ConfigError(path + "." + key, "must be a string");
    return j[key].get<std::string>();
}

std::vector<double> get_num_or_array(const json& j, const std::string& path, const char* key,
                                     double fallback) {
    if (!j.contains(key)) return {fallback};
    if (j[key].is_number()) return {j[key].get<double>()};
    if (j[key].is_array()) {
        std::vector<double> out;
        for (const auto& v : j[key]) {
            if (!v.is_number()) throw ConfigError(path + "." + key, "array entries must be numbers");
            out.push_back(v.get<double>());
        }
        if (out.empty()) throw ConfigError(path + "." + key, "array may not be empty");
        return out;
    }
    throw ConfigError(path + "." + key, "must be a number or an array of numbers");
}

GridSpec parse_grid(const json& j, const std::string& path) {
    GridSpec g;
    if (j.contains("points")) {
        if (!j["points"].is_array()) throw ConfigError(path + ".points", "must be an array");
        for (const auto& v : j["points"]) g.points.push_back(v.get<double>());
        for (std::size_t i = 1; i < g.points.size(); ++i)
            if (!(g.points[i] > g.points[i - 1]))
                throw ConfigError(path + ".points", "must be strictly increasing");
        return g;
    }
    g.start = get_num(j, path, "start", 0.0, true);
    g.stop = get_num(j, path, "stop", 0.0, true);
    double cnt = get_num(j, path, "count", 0.0, true);
    if (cnt < 1.0 || cnt != std::floor(cnt)) throw ConfigError(path + ".count", "must be a positive integer");
    g.count = static_cast<std::size_t>(cnt);
    g.log_scale = get_str(j, path, "scale", "linear") == "log";
    if (g.count > 1 && !(g.stop > g.start)) throw ConfigError(path + ".stop", "must exceed start");
    if (g.log_scale && !(g.start > 0.0)) throw ConfigError(path + ".start", "log scale requires start > 0");
    return g;
}

DisplacementProfile parse_displacement(const json& j, const std::string& path) {
    DisplacementProfile p;
    std::string shape = get_str(j, path, "shape", "none");
    if (shape == "none") {
        p.shape = DisplacementProfile::Shape::None;
    } else if (shape == "sine") {
        p.shape = DisplacementProfile::Shape::Sine;
        p.amplitude = get_num(j, path, "amplitude", 0.0, true);
        p.wavelength = get_num(j, path, "wavelength", 0.0, true);
        if (!(p.wavelength > 0.0)) throw ConfigError(path + ".wavelength", "must be > 0");
    } else if (shape == "gauss_kink") {
        p.shape = DisplacementProfile::Shape::GaussKink;
        p.amplitude = get_num(j, path, "amplitude", 0.0, true);
        p.width = get_num(j, path, "width", 0.0, true);
        p.center = get_num(j, path, "center", 0.0, true);
        if (!(p.width > 0.0)) throw ConfigError(path + ".width", "must be > 0");
    } else {
        throw ConfigError(path + ".shape", "unknown shape '" + shape + "'");
    }
    return p;
}

}  // namespace

ScenarioConfig parse_config(const json& j) {
    ScenarioConfig c;
    if (!j.is_object()) throw ConfigError("config", "top level must be a JSON object");

    if (!j.contains("chain") || !j["chain"].is_object())
        throw ConfigError("chain", "missing chain object");
    const json& jc = j["chain"];
    double particles = get_num(jc, "chain", "particles", 0.0);
    if (particles < 0.0 || particles != std::floor(particles))
        throw ConfigError("chain.particles", "must be a non-negative integer (0 = infinite)");
    c.chain.n_particles = static_cast<long>(particles);
    c.chain.mass = get_num(jc, "chain", "mass", 1.0);
    c.chain.coupling = get_num(jc, "chain", "coupling", 1.0);
    c.chain.binding = get_num(jc, "chain", "binding", 0.0);
    c.chain.spacing = get_num(jc, "chain", "spacing", 0.0);
    c.chain.hbar = get_num(jc, "chain", "hbar", 1.0);
    try {
        c.chain.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("chain", e.what());
    }

    if (j.contains("state")) {
        const json& js = j["state"];
        c.state.type = get_str(js, "state", "type", "product");
        if (c.state.type != "product" && c.state.type != "coherent")
            throw ConfigError("state.type", "must be 'product' or 'coherent'");
        c.state.dq2 = get_num_or_array(js, "state", "dq2", 0.5);
        c.state.dp2 = get_num_or_array(js, "state", "dp2", 0.5);
        c.state.sqp = get_num_or_array(js, "state", "sqp", 0.0);
        c.state.drift_velocity = get_num(js, "state", "drift_velocity", 0.0);
        c.state.window_lo = static_cast<long>(get_num(js, "state", "window_lo", 0.0));
        c.state.window_size = static_cast<long>(get_num(js, "state", "window_size", 0.0));
        c.state.excluded_mode_cluster =
            static_cast<int>(get_num(js, "state", "excluded_mode_cluster", 3.0));
        if (js.contains("displacement"))
            c.state.displacement = parse_displacement(js["displacement"], "state.displacement");
        if (js.contains("amplitudes")) {
            for (const auto& v : js["amplitudes"]) {
                if (!v.is_array() || v.size() != 2)
                    throw ConfigError("state.amplitudes", "entries must be [re, im] pairs");
                c.state.amplitudes.emplace_back(v[0].get<double>(), v[1].get<double>());
            }
        }
    }

    if (!j.contains("analysis") || !j["analysis"].is_string())
        throw ConfigError("analysis", "missing analysis selection");
    c.analysis = j["analysis"].get<std::string>();
    static const char* known[] = {"modes", "evolve", "subsection", "densities",
                                  "hydro", "equilibrium", "compare"};
    bool ok = false;
    for (const char* k : known) ok = ok || c.analysis == k;
    if (!ok) throw ConfigError("analysis", "unknown analysis '" + c.analysis + "'");

    if (j.contains("time_grid")) c.time_grid = parse_grid(j["time_grid"], "time_grid");
    if (j.contains("k_grid")) c.k_grid = parse_grid(j["k_grid"], "k_grid");
    if (j.contains("space_grid")) c.space_grid = parse_grid(j["space_grid"], "space_grid");

    if (j.contains("subsection")) {
        const json& js = j["subsection"];
        c.subsection.block = static_cast<int>(get_num(js, "subsection", "block", 5.0));
        if (c.subsection.block < 1) throw ConfigError("subsection.block", "must be >= 1");
        c.subsection.observable = get_str(js, "subsection", "observable", "momentum");
        c.subsection.method = get_str(js, "subsection", "method", "auto");
    }
    if (j.contains("hydro")) {
        const json& jh = j["hydro"];
        c.hydro.solver = get_str(jh, "hydro", "solver", "wave");
        c.hydro.dt = get_num(jh, "hydro", "dt", 0.0);
        c.hydro.boundary = get_str(jh, "hydro", "boundary", "periodic");
        c.hydro.wave_kappa = get_num(jh, "hydro", "wave_kappa", 0.0);
        c.hydro.wave_amplitude = get_num(jh, "hydro", "wave_amplitude", 0.0);
        c.hydro.wave_speed = get_num(jh, "hydro", "wave_speed", 1.0);
        c.hydro.theta0 = get_num(jh, "hydro", "theta0", 1.0);
        c.hydro.perturbation = get_num(jh, "hydro", "perturbation", 0.0);
        c.hydro.perturbation_width = get_num(jh, "hydro", "perturbation_width", 1.0);
    }
    if (j.contains("compare")) {
        const json& jx = j["compare"];
        c.compare.profile = get_str(jx, "compare", "profile", "sine");
        c.compare.amplitude = get_num(jx, "compare", "amplitude", 0.01);
        c.compare.wavelength = get_num(jx, "compare", "wavelength", 50.0);
        c.compare.width = get_num(jx, "compare", "width", 8.0);
        c.compare.center = get_num(jx, "compare", "center", 0.0);
        c.compare.smear_width = get_num(jx, "compare", "smear_width", 5.0);
        c.compare.grid_dx = get_num(jx, "compare", "grid_dx", 0.5);
    }
    if (j.contains("equilibrium"))
        c.equilibrium_tolerance = get_num(j["equilibrium"], "equilibrium", "tolerance", 0.05);
    if (j.contains("decoherence"))
        c.decoherence_epsilon = get_num(j["decoherence"], "decoherence", "epsilon", 1e-3);
    c.seed = static_cast<std::uint64_t>(get_num(j, "config", "seed", 1.0));
    return c;
}

json to_json(const ScenarioConfig& c) {
    json j;
    j["chain"] = {{"particles", c.chain.n_particles}, {"mass", c.chain.mass},
                  {"coupling", c.chain.coupling},     {"binding", c.chain.binding},
                  {"spacing", c.chain.spacing},       {"hbar", c.chain.hbar}};
    json js;
    js["type"] = c.state.type;
    js["dq2"] = c.state.dq2.size() == 1 ? json(c.state.dq2[0]) : json(c.state.dq2);
    js["dp2"] = c.state.dp2.size() == 1 ? json(c.state.dp2[0]) : json(c.state.dp2);
    js["sqp"] = c.state.sqp.size() == 1 ? json(c.state.sqp[0]) : json(c.state.sqp);
    js["drift_velocity"] = c.state.drift_velocity;
    js["window_lo"] = c.state.window_lo;
    js["window_size"] = c.state.window_size;
    js["excluded_mode_cluster"] = c.state.excluded_mode_cluster;
    switch (c.state.displacement.shape) {
        case DisplacementProfile::Shape::None:
            js["displacement"] = {{"shape", "none"}};
            break;
        case DisplacementProfile::Shape::Sine:
            js["displacement"] = {{"shape", "sine"},
                                  {"amplitude", c.state.displacement.amplitude},
                                  {"wavelength", c.state.displacement.wavelength}};
            break;
        case DisplacementProfile::Shape::GaussKink:
            js["displacement"] = {{"shape", "gauss_kink"},
                                  {"amplitude", c.state.displacement.amplitude},
                                  {"width", c.state.displacement.width},
                                  {"center", c.state.displacement.center}};
            break;
    }
    if (!c.state.amplitudes.empty()) {
        json arr = json::array();
        for (const auto& z : c.state.amplitudes) arr.push_back({z.real(), z.imag()});
        js["amplitudes"] = arr;
    }
    j["state"] = js;
    j["analysis"] = c.analysis;
    auto grid_json = [](const GridSpec& g) {
        if (!g.points.empty()) return json{{"points", g.points}};
        return json{{"start", g.start},
                    {"stop", g.stop},
                    {"count", g.count},
                    {"scale", g.log_scale ? "log" : "linear"}};
    };
    if (!c.time_grid.points.empty() || c.time_grid.count > 0) j["time_grid"] = grid_json(c.time_grid);
    if (!c.k_grid.points.empty() || c.k_grid.count > 0) j["k_grid"] = grid_json(c.k_grid);
    if (!c.space_grid.points.empty() || c.space_grid.count > 0) j["space_grid"] = grid_json(c.space_grid);
    j["subsection"] = {{"block", c.subsection.block},
                       {"observable", c.subsection.observable},
                       {"method", c.subsection.method}};
    j["hydro"] = {{"solver", c.hydro.solver},
                  {"dt", c.hydro.dt},
                  {"boundary", c.hydro.boundary},
                  {"wave_kappa", c.hydro.wave_kappa},
                  {"wave_amplitude", c.hydro.wave_amplitude},
                  {"wave_speed", c.hydro.wave_speed},
                  {"theta0", c.hydro.theta0},
                  {"perturbation", c.hydro.perturbation},
                  {"perturbation_width", c.hydro.perturbation_width}};
    j["compare"] = {{"profile", c.compare.profile},
                    {"amplitude", c.compare.amplitude},
                    {"wavelength", c.compare.wavelength},
                    {"width", c.compare.width},
                    {"center", c.compare.center},
                    {"smear_width", c.compare.smear_width},
                    {"grid_dx", c.compare.grid_dx}};
    j["equilibrium"] = {{"tolerance", c.equilibrium_tolerance}};
    j["decoherence"] = {{"epsilon", c.decoherence_epsilon}};
    j["seed"] = c.seed;
    return j;
}

std::uint64_t config_hash(const json& j) {
    std::string dump = j.dump();  // nlohmann objects iterate in sorted key order
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : dump) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<double> expand_per_site(const std::vector<double>& v, std::size_t n,
                                    const std::string& field) {
    if (v.size() == 1) return std::vector<double>(n, v[0]);
    if (v.size() != n) throw ConfigError(field, "array must have one entry per site");
    return v;
}

// initial state from the spec (product or coherent)
GaussianChainState build_state(const ScenarioConfig& c) {
    const ChainParams& par = c.chain;
    if (c.state.type == "coherent") {
        if (par.infinite()) throw ConfigError("state.type", "coherent states need a finite chain");
        std::vector<std::complex<double>> amps = c.state.amplitudes;
        amps.resize(static_cast<std::size_t>(par.n_particles), {0.0, 0.0});
        return GaussianChainState::normal_mode_coherent_state(par, amps,
                                                              c.state.excluded_mode_cluster);
    }
    long n = par.infinite() ? (c.state.window_size > 0 ? c.state.window_size : 64)
                            : par.n_particles;
    long lo = par.infinite() ? c.state.window_lo : 0;
    std::size_t ns = static_cast<std::size_t>(n);
    std::vector<double> qbar(ns), pbar(ns, par.mass * c.state.drift_velocity);
    for (long i = 0; i < n; ++i) {
        long site = lo + i;
        double xj = par.site_origin(site);
        double dq = 0.0;
        const DisplacementProfile& pr = c.state.displacement;
        switch (pr.shape) {
            case DisplacementProfile::Shape::None: break;
            case DisplacementProfile::Shape::Sine:
                dq = pr.amplitude * (par.spacing > 0 ? par.spacing : 1.0) *
                     std::sin(2.0 * std::numbers::pi * xj / pr.wavelength);
                break;
            case DisplacementProfile::Shape::GaussKink: {
                double s = pr.width;
                double xc = pr.center * (par.spacing > 0 ? par.spacing : 1.0);
                double z = (xj - xc) / (s * std::sqrt(2.0));
                dq = -pr.amplitude * (par.spacing > 0 ? par.spacing : 1.0) * s *
                     std::sqrt(0.5 * std::numbers::pi) * (1.0 + std::erf(z));
                break;
            }
        }
        qbar[static_cast<std::size_t>(i)] = xj + dq;
    }
    try {
        return GaussianChainState::product_state(
            par, qbar, pbar, expand_per_site(c.state.dq2, ns, "state.dq2"),
            expand_per_site(c.state.dp2, ns, "state.dp2"),
            expand_per_site(c.state.sqp, ns, "state.sqp"), lo);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("state", e.what());
    }
}

PropagatorKind default_kind(const ChainParams& par) {
    if (!par.infinite()) return PropagatorKind::FiniteDft;
    return par.binding > 0.0 ? PropagatorKind::InfiniteBound : PropagatorKind::InfiniteSimple;
}

void emit_and_track(const csv::Table& t, const std::filesystem::path& dir,
                    const std::string& name, RunManifest& man) {
    csv::emit(t, dir / name);
    man.files.push_back(name);
}

void run_modes(const ScenarioConfig& c, const std::filesystem::path& dir, RunManifest& man) {
    NormalModeSpectrum spec = normal_mode_frequencies(c.chain);
    csv::Table t;
    t.header = {"alpha", "omega_alpha", "zero_mode"};
    t.columns.resize(3);
    for (std::size_t i = 0; i < spec.frequencies.size(); ++i) {
        long alpha = static_cast<long>(i) + 1;
        t.columns[0].push_back(static_cast<double>(alpha));
        t.columns[1].push_back(spec.frequencies[i]);
        bool zero = std::find(spec.zero_modes.begin(), spec.zero_modes.end(), alpha) !=
                    spec.zero_modes.end();
        t.columns[2].push_back(zero ? 1.0 : 0.0);
    }
    emit_and_track(t, dir, "modes.csv", man);
}

void run_evolve(const ScenarioConfig& c, const std::filesystem::path& dir, RunManifest& man) {
    GaussianChainState st = build_state(c);
    std::vector<double> times = c.time_grid.materialize();
    if (times.empty()) throw ConfigError("time_grid", "evolve needs a time grid");
    Propagator prop = make_propagator(c.chain, default_kind(c.chain), times);
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        GaussianChainState ev = evolve_state(st, prop, ti);
        csv::Table t;
        t.header = {"site", "qbar", "pbar", "dq2", "dp2", "sqp"};
        t.columns.resize(6);
        for (long n = ev.site_begin(); n < ev.site_end(); ++n) {
            t.columns[0].push_back(static_cast<double>(n));
            t.columns[1].push_back(ev.mean_q(n));
            t.columns[2].push_back(ev.mean_p(n));
            t.columns[3].push_back(ev.sigma_qq(n, n));
            t.columns[4].push_back(ev.sigma_pp(n, n));
            t.columns[5].push_back(ev.sigma_qp(n, n));
        }
        char name[64];
        std::snprintf(name, sizeof name, "state_%04zu.csv", ti);
        emit_and_track(t, dir, name, man);
    }
}

void run_subsection(const ScenarioConfig& c, const std::filesystem::path& dir, RunManifest& man) {
    std::vector<double> times = c.time_grid.materialize();
    if (times.empty()) throw ConfigError("time_grid", "subsection needs a time grid");
    PeakingReport rep;
    bool closed = c.subsection.method == "closed_form" ||
                  (c.subsection.method == "auto" && c.chain.infinite() &&
                   c.state.type == "product" && c.subsection.observable == "momentum");
    if (c.subsection.observable == "momentum") {
        if (closed) {
            rep = subsection_momentum_stats(c.chain, default_kind(c.chain), c.state.dq2[0],
                                            c.state.dp2[0], c.state.drift_velocity,
                                            c.subsection.block, times);
        } else {
            GaussianChainState st = build_state(c);
            Propagator prop = make_propagator(c.chain, default_kind(c.chain), times);
            rep = subsection_momentum_stats(st, prop, c.subsection.block);
        }
    } else if (c.subsection.observable == "energy") {
        GaussianChainState st = build_state(c);
        Propagator prop = make_propagator(c.chain, default_kind(c.chain), times);
        rep = subsection_energy_stats(st, prop, c.subsection.block);
    } else {
        throw ConfigError("subsection.observable", "must be 'momentum' or 'energy'");
    }
    csv::Table t;
    t.header = {"t", "variance", "squared_mean", "ratio"};
    t.columns = {rep.times, rep.variance, rep.squared_mean, rep.ratio};
    if (!rep.extra.empty()) {
        t.header.push_back(rep.extra_label);
        t.columns.push_back(rep.extra);
    }
    emit_and_track(t, dir, "subsection.csv", man);
}

void run_densities(const ScenarioConfig& c, const std::filesystem::path& dir, RunManifest& man) {
    GaussianChainState st = build_state(c);
    std::vector<double> ks = c.k_grid.materialize();
    if (ks.empty()) ks = default_k_grid(st, 33);

    auto stats_table = [&](const DensityStats& ds) {
        csv::Table t;
        t.header = {"k", "re_mean", "im_mean", "variance", "ratio"};
        t.columns.resize(5);
        for (std::size_t i = 0; i < ds.k.size(); ++i) {
            t.columns[0].push_back(ds.k[i]);
            t.columns[1].push_back(ds.mean[i].real());
            t.columns[2].push_back(ds.mean[i].imag());
            t.columns[3].push_back(ds.variance[i]);
            t.columns[4].push_back(ds.ratio[i]);
        }
        return t;
    };
    emit_and_track(stats_table(number_density_stats(st, ks)), dir, "number_density.csv", man);
    emit_and_track(stats_table(momentum_density_stats(st, ks)), dir, "momentum_density.csv", man);
    auto tau = stress_mean(st, ks);
    csv::Table tt;
    tt.header = {"k", "re_mean", "im_mean"};
    tt.columns.resize(3);
    for (std::size_t i = 0; i < ks.size(); ++i) {
        tt.columns[0].push_back(ks[i]);
        tt.columns[1].push_back(tau[i].real());
        tt.columns[2].push_back(tau[i].imag());
    }
    emit_and_track(tt, dir, "stress_mean.csv", man);

    std::vector<double> times = c.time_grid.materialize();
    if (times.size() > 1) {
        Propagator prop = make_propagator(c.chain, default_kind(c.chain), times);
        std::vector<GaussianChainState> traj;
        traj.reserve(times.size());
        for (std::size_t ti = 0; ti < times.size(); ++ti) traj.push_back(evolve_state(st, prop, ti));
        DecoherenceScan scan = decoherence_scan(traj, ks, c.decoherence_epsilon);
        csv::Table ts;
        ts.header = {"k", "max_ratio"};
        ts.columns = {scan.k, scan.max_ratio};
        emit_and_track(ts, dir, "decoherence_scan.csv", man);
        csv::Table tc;
        tc.header = {"t", "corr_length"};
        tc.columns = {scan.times, scan.corr_length};
        emit_and_track(tc, dir, "corr_length.csv", man);
        man.summary["k_crit"] = scan.k_crit;
    }
}

void run_equilibrium(const ScenarioConfig& c, const std::filesystem::path& dir, RunManifest& man) {
    GaussianChainState st = build_state(c);
    std::vector<double> times = c.time_grid.materialize();
    if (times.empty()) throw ConfigError("time_grid", "equilibrium needs a time grid");
    Propagator prop = make_propagator(c.chain, default_kind(c.chain), times);
    std::vector<GaussianChainState> traj;
    for (std::size_t ti = 0; ti < times.size(); ++ti) traj.push_back(evolve_state(st, prop, ti));
    auto metrics = local_equilibrium_metric(traj);
    csv::Table t;
    t.header = {"t", "sqp_rel", "dp2_flatness", "dist_eq"};
    t.columns.resize(4);
    for (const auto& m : metrics) {
        t.columns[0].push_back(m.time);
        t.columns[1].push_back(m.sqp_rel);
        t.columns[2].push_back(m.dp2_flatness);
        t.columns[3].push_back(m.dist_eq);
    }
    emit_and_track(t, dir, "equilibrium_metric.csv", man);
    man.summary["convergence_time"] = convergence_time(metrics, c.equilibrium_tolerance);
    if (c.chain.binding > 0.0) {
        EquilibriumLimits lim = equilibrium_limits(c.chain, c.state.dq2[0], c.state.dp2[0]);
        csv::Table tl;
        tl.header = {"sqq_inf", "spp_inf", "kT"};
        tl.columns = {{lim.sqq_inf}, {lim.spp_inf}, {lim.kT}};
        emit_and_track(tl, dir, "equilibrium_limits.csv", man);
    }
}

void run_hydro(const ScenarioConfig& c, const std::filesystem::path& dir, RunManifest& man) {
    std::vector<double> times = c.time_grid.materialize();
    if (times.empty()) throw ConfigError("time_grid", "hydro needs a time grid");
    std::vector<double> xs = c.space_grid.materialize();
    if (xs.size() < 4) throw ConfigError("space_grid", "hydro needs a space grid (count >= 4)");
    double dx = xs[1] - xs[0];
    Boundary bc = c.hydro.boundary == "reflecting" ? Boundary::Reflecting : Boundary::Periodic;

    if (c.hydro.solver == "wave") {
        double cspeed = c.hydro.wave_speed;
        double dt = c.hydro.dt > 0.0 ? c.hydro.dt : 0.5 * dx / cspeed;
        // snap dt so outputs are integer multiples
        if (times.size() > 1) {
            double base = times[1] - times[0];
            std::size_t sub = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(base / dt)));
            dt = base / static_cast<double>(sub);
        }
        std::vector<double> n1(xs.size()), rate(xs.size(), 0.0);
        for (std::size_t i = 0; i < xs.size(); ++i)
            n1[i] = c.hydro.wave_amplitude * std::cos(c.hydro.wave_kappa * xs[i]);
        WaveResult wr;
        try {
            wr = wave_solve(n1, rate, cspeed, dx, dt, times, bc);
        } catch (const std::invalid_argument& e) {
            throw NumericalError(e.what());
        }
        for (std::size_t ti = 0; ti < times.size(); ++ti) {
            csv::Table t;
            t.header = {"x", "n1"};
            t.columns = {xs, wr.n1[ti]};
            char name[64];
            std::snprintf(name, sizeof name, "wave_%04zu.csv", ti);
            emit_and_track(t, dir, name, man);
        }
        return;
    }
    if (c.hydro.solver != "euler") throw ConfigError("hydro.solver", "must be 'wave' or 'euler'");

    EulerFields init;
    init.x = xs;
    init.f.resize(xs.size());
    init.v.assign(xs.size(), 0.0);
    init.theta.assign(xs.size(), c.hydro.theta0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double base = std::exp(-0.5 * c.chain.binding * xs[i] * xs[i] / c.hydro.theta0);
        double bump = 1.0 + c.hydro.perturbation *
                                std::exp(-0.5 * xs[i] * xs[i] /
                                         (c.hydro.perturbation_width * c.hydro.perturbation_width));
        init.f[i] = base * bump;
    }
    double dt = c.hydro.dt > 0.0 ? c.hydro.dt
                                 : 0.25 * dx / std::sqrt(c.hydro.theta0 / c.chain.mass + 1.0);
    if (times.size() > 1) {
        double base = times[1] - times[0];
        std::size_t sub = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(base / dt)));
        dt = base / static_cast<double>(sub);
    }
    EulerResult er = euler_solve(init, c.chain.mass, c.chain.binding, dt, times,
                                 bc == Boundary::Periodic ? Boundary::Periodic
                                                          : Boundary::Reflecting);
    if (er.halted) {
        csv::Table t;
        t.header = {"x", "f", "v", "theta"};
        t.columns = {er.halt_state.x, er.halt_state.f, er.halt_state.v, er.halt_state.theta};
        emit_and_track(t, dir, "euler_halt_dump.csv", man);
        write_manifest(man, dir);
        throw NumericalError("euler solver halted at t = " + std::to_string(er.halt_time) +
                             ": " + er.halt_reason);
    }
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        csv::Table t;
        t.header = {"x", "f", "v", "theta"};
        t.columns = {er.states[ti].x, er.states[ti].f, er.states[ti].v, er.states[ti].theta};
        char name[64];
        std::snprintf(name, sizeof name, "euler_%04zu.csv", ti);
        emit_and_track(t, dir, name, man);
    }
}

void run_compare(const ScenarioConfig& c, const std::filesystem::path& dir, RunManifest& man) {
    std::vector<double> times = c.time_grid.materialize();
    if (times.empty()) throw ConfigError("time_grid", "compare needs a time grid");
    MicroHydroScenario sc;
    sc.chain = c.chain;
    sc.dq2 = c.state.dq2[0];
    sc.dp2 = c.state.dp2[0];
    sc.smear_width = c.compare.smear_width;
    sc.grid_dx = c.compare.grid_dx;
    if (c.compare.profile == "sine") {
        sc.profile.shape = DisplacementProfile::Shape::Sine;
        sc.profile.amplitude = c.compare.amplitude;
        sc.profile.wavelength = c.compare.wavelength;
    } else if (c.compare.profile == "pulse") {
        sc.profile.shape = DisplacementProfile::Shape::GaussKink;
        sc.profile.amplitude = c.compare.amplitude;
        sc.profile.width = c.compare.width;
        sc.profile.center = c.compare.center;
    } else {
        throw ConfigError("compare.profile", "must be 'sine' or 'pulse'");
    }
    CompareResult res = compare_micro_hydro(sc, times);
    csv::Table tn;
    tn.header = {"t", "l2_rel", "linf_rel"};
    tn.columns = {res.times, res.l2_rel, res.linf_rel};
    emit_and_track(tn, dir, "compare_norms.csv", man);
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        csv::Table t;
        t.header = {"x", "n1_micro", "n1_pde", "n", "v", "theta"};
        t.columns = {res.grid,
                     res.micro[ti].n1,
                     res.pde_n1[ti],
                     res.micro[ti].n,
                     res.micro[ti].v,
                     res.micro[ti].theta};
        char name[64];
        std::snprintf(name, sizeof name, "fields_%04zu.csv", ti);
        emit_and_track(t, dir, name, man);
    }
    man.summary["model_speed"] = res.model_speed;
    man.summary["measured_speed"] = res.measured_speed;
    man.summary["precondition_warning"] = res.precondition_warning ? 1.0 : 0.0;
}

}  // namespace

RunManifest run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir,
                         bool quiet) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::ios_base::failure("cannot create output directory " + out_dir.string());

    RunManifest man;
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(config_hash(to_json(config))));
    man.config_hash = hash;
    man.analysis = config.analysis;

    if (!quiet) std::cerr << "running analysis '" << config.analysis << "'\n";
    auto t0 = Clock::now();
    if (config.analysis == "modes") run_modes(config, out_dir, man);
    else if (config.analysis == "evolve") run_evolve(config, out_dir, man);
    else if (config.analysis == "subsection") run_subsection(config, out_dir, man);
    else if (config.analysis == "densities") run_densities(config, out_dir, man);
    else if (config.analysis == "equilibrium") run_equilibrium(config, out_dir, man);
    else if (config.analysis == "hydro") run_hydro(config, out_dir, man);
    else if (config.analysis == "compare") run_compare(config, out_dir, man);
    else throw ConfigError("analysis", "unknown analysis '" + config.analysis + "'");
    man.wall_ms[config.analysis] = ms_since(t0);

    write_manifest(man, out_dir);
    if (!quiet) std::cerr << "wrote " << man.files.size() << " file(s) to " << out_dir.string() << "\n";
    return man;
}

void write_manifest(const RunManifest& man, const std::filesystem::path& out_dir) {
    json j;
    j["config_hash"] = man.config_hash;
    j["analysis"] = man.analysis;
    j["files"] = man.files;
    j["wall_ms"] = man.wall_ms;
    j["summary"] = man.summary;
    std::ofstream os(out_dir / "manifest.json", std::ios::binary);
    if (!os) throw std::ios_base::failure("cannot write manifest.json");
    os << j.dump(2) << "\n";
}

}  // namespace oscchain
