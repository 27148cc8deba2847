#include "hopf/cli.hpp"

#include "hopf/attractor.hpp"
#include "hopf/errors.hpp"
#include "hopf/flow.hpp"
#include "hopf/lyapunov.hpp"
#include "hopf/model.hpp"
#include "hopf/noise.hpp"
#include "hopf/parallel.hpp"
#include "hopf/sweep.hpp"
#include "hopf/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace hopf::cli {

namespace {

using nlohmann::json;

struct Field {
    const char* key;
    std::function<void(RunConfig&, const json&)> set;
    std::function<json(const RunConfig&)> get;
};

template <typename T>
void check_type(const char* key, const json& v) {
    bool ok;
    if constexpr (std::is_same_v<T, bool>) ok = v.is_boolean();
    else if constexpr (std::is_same_v<T, std::string>) ok = v.is_string();
    else if constexpr (std::is_same_v<T, std::vector<double>>) ok = v.is_array();
    else if constexpr (std::is_unsigned_v<T>) ok = v.is_number_unsigned();
    else if constexpr (std::is_integral_v<T>) ok = v.is_number_integer();
    else ok = v.is_number();
    if (!ok) throw std::invalid_argument(std::string("config: wrong type for '") + key + "'");
}

template <typename T>
Field field(const char* key, T RunConfig::*m) {
    return {key,
            [key, m](RunConfig& c, const json& v) {
                check_type<T>(key, v);
                try {
                    c.*m = v.get<T>();
                } catch (const json::exception& e) {
                    throw std::invalid_argument(std::string("config: bad value for '") + key + "': " + e.what());
                }
            },
            [m](const RunConfig& c) { return json(c.*m); }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> f = {
        field("command", &RunConfig::command),   field("alpha", &RunConfig::alpha),
        field("beta", &RunConfig::beta),         field("a", &RunConfig::a),
        field("b", &RunConfig::b),               field("sigma", &RunConfig::sigma),
        field("dt", &RunConfig::dt),             field("T", &RunConfig::T),
        field("burn_in", &RunConfig::burn_in),   field("renorm_every", &RunConfig::renorm_every),
        field("seed", &RunConfig::seed),         field("n", &RunConfig::n),
        field("bins", &RunConfig::bins),         field("checkpoints", &RunConfig::checkpoints),
        field("grid", &RunConfig::grid),         field("seeds", &RunConfig::seeds),
        field("refine_T", &RunConfig::refine_T), field("x0", &RunConfig::x0),
        field("y0", &RunConfig::y0),             field("pullback", &RunConfig::pullback),
        field("tangent", &RunConfig::tangent),   field("certify", &RunConfig::certify),
        field("threads", &RunConfig::threads),   field("out", &RunConfig::out),
    };
    return f;
}

json as_json(const RunConfig& cfg) {
    json j = json::object();
    for (const Field& f : fields()) j[f.key] = f.get(cfg);
    return j;
}

std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Params params_of(const RunConfig& c) { return Params(c.alpha, c.beta, c.a, c.b, c.sigma); }

unsigned threads_of(const RunConfig& c) { return c.threads == 0 ? default_threads() : c.threads; }

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

void validate(const RunConfig& c) {
    require(c.dt > 0.0 && std::isfinite(c.dt), "dt must be positive");
    require(c.T >= 0.0 && std::isfinite(c.T), "T must be non-negative");
    require(c.burn_in >= 0.0, "burn_in must be non-negative");
    require(c.renorm_every >= 1, "renorm_every must be at least 1");
    require(c.bins >= 1, "bins must be at least 1");
    require(c.seeds >= 1, "seeds must be at least 1");
    require(c.refine_T >= 0.0, "refine_T must be non-negative");
    require(c.pullback >= 0.0, "pullback must be non-negative");
    params_of(c);
}

// "b_min:b_max:steps,alpha_min:alpha_max:steps"
void parse_grid(const std::string& s, GridSpec& g) {
    auto axis = [&](const std::string& part, double& lo, double& hi, int& steps) {
        std::istringstream is(part);
        char c1 = 0, c2 = 0;
        if (!(is >> lo >> c1 >> hi >> c2 >> steps) || c1 != ':' || c2 != ':' || !is.eof())
            throw std::invalid_argument("grid: expected b_min:b_max:steps,alpha_min:alpha_max:steps, got '" + s + "'");
    };
    const auto comma = s.find(',');
    if (comma == std::string::npos)
        throw std::invalid_argument("grid: expected b_min:b_max:steps,alpha_min:alpha_max:steps, got '" + s + "'");
    axis(s.substr(0, comma), g.b_min, g.b_max, g.b_steps);
    axis(s.substr(comma + 1), g.alpha_min, g.alpha_max, g.alpha_steps);
}

class Outputs {
public:
    explicit Outputs(const RunConfig& cfg) : dir_(cfg.out), hash_(config_hash(cfg)) {
        if (dir_.empty()) return;
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw std::invalid_argument("cannot create output directory '" + dir_.string() + "'");
        std::ofstream f = open("config.json");
        f << json::parse(to_json(cfg)).dump(2) << '\n';
    }

    template <typename Writer>
    void csv(const std::string& name, Writer&& write) const {
        if (dir_.empty()) return;
        std::ofstream f = open(name);
        f << "# config_hash=" << hash_ << '\n';
        write(f);
        if (!f) throw std::invalid_argument("failed writing '" + (dir_ / name).string() + "'");
    }

private:
    std::ofstream open(const std::string& name) const {
        std::ofstream f(dir_ / name, std::ios::binary);
        if (!f) throw std::invalid_argument("cannot open '" + (dir_ / name).string() + "'");
        return f;
    }

    std::filesystem::path dir_;
    std::string hash_;
};

int cmd_density(const RunConfig& c, std::ostream& out) {
    const Params p = params_of(c);
    require(c.n >= 2, "density: n must be at least 2");
    Outputs o(c);
    const double s_max = std::max(p.alpha() / p.a(), 0.0) + 12.0 * p.sigma() / std::sqrt(p.a());
    o.csv("density.csv", [&](std::ostream& f) {
        f.precision(17);
        f << "s,density,cdf\n";
        for (std::uint64_t i = 0; i < c.n; ++i) {
            const double s = s_max * static_cast<double>(i) / static_cast<double>(c.n - 1);
            f << s << ',' << radial_density(p, s) << ',' << radial_cdf(p, s) << '\n';
        }
    });
    out << "E[s] = " << fmt17(expected_squared_radius(p)) << '\n';
    if (c.T > 0.0) {
        const RadialHistogram h = empirical_radial_density(p, c.seed, c.T, c.bins, DensityOptions{c.dt, c.burn_in});
        o.csv("histogram.csv", [&](std::ostream& f) { write_histogram_csv(f, h); });
        out << "histogram L1 = " << fmt17(h.l1) << '\n';
    }
    return 0;
}

int cmd_bounds(const RunConfig& c, std::ostream& out) {
    const Params p = params_of(c);
    Outputs o(c);
    const double K = normalization_K(p), K_lit = normalization_K_literature(p), Es = expected_squared_radius(p),
                 ls = lambda_sum_closed_form(p), kap = kappa(p), ub = lyapunov_upper_bound(p);
    out << "K = " << fmt17(K) << '\n'
        << "K_literature = " << fmt17(K_lit) << '\n'
        << "E[s] = " << fmt17(Es) << '\n'
        << "lambda_sum = " << fmt17(ls) << '\n'
        << "kappa = " << fmt17(kap) << '\n'
        << "upper_bound = " << fmt17(ub) << '\n'
        << "small_shear = " << (std::abs(p.b()) <= kap ? "yes" : "no") << '\n';
    o.csv("bounds.csv", [&](std::ostream& f) {
        f.precision(17);
        f << "K,K_literature,E_s,lambda_sum,kappa,upper_bound\n"
          << K << ',' << K_lit << ',' << Es << ',' << ls << ',' << kap << ',' << ub << '\n';
    });
    return 0;
}

int cmd_simulate(const RunConfig& c, std::ostream& out) {
    const Params p = params_of(c);
    require(c.T > 0.0, "simulate: T must be positive");
    Outputs o(c);
    const WienerPath w = sample_path(c.seed, 0.0, c.T, c.dt);
    const Trajectory traj = integrate_sde(p, w, State(c.x0, c.y0));
    o.csv("trajectory.csv", [&](std::ostream& f) { write_trajectory_csv(f, traj); });
    if (c.tangent) {
        const TangentFlow tf = integrate_variational(p, traj);
        o.csv("tangent.csv", [&](std::ostream& f) { write_tangent_csv(f, tf); });
    }
    const auto last = traj.size() - 1;
    out << "steps = " << last << '\n'
        << "final = " << fmt17(traj.states(0, last)) << ' ' << fmt17(traj.states(1, last)) << '\n';
    return 0;
}

int cmd_lyapunov(const RunConfig& c, std::ostream& out) {
    const Params p = params_of(c);
    Outputs o(c);
    LyapunovOptions opts;
    opts.dt = c.dt;
    opts.burn_in = c.burn_in;
    opts.renorm_every = c.renorm_every;

    LyapunovEstimate top;
    bool determined = true;
    if (c.certify) {
        const CertifiedEstimate ce = top_lyapunov_certified(p, c.seed, c.T, opts, std::max(c.T, 1e5));
        top = ce.estimate;
        determined = ce.determined;
    } else {
        top = top_lyapunov(p, c.seed, c.T, opts);
    }
    const LyapunovEstimate sum = lambda_sum_estimate(p, c.seed, c.T, opts);
    o.csv("top.csv", [&](std::ostream& f) { write_estimate_csv(f, top); });
    o.csv("sum.csv", [&](std::ostream& f) { write_estimate_csv(f, sum); });
    out << "lambda_top = " << fmt17(top.value) << " +- " << fmt17(top.ci_halfwidth) << " (T = " << top.horizon
        << ")\n"
        << "lambda_sum = " << fmt17(sum.value) << " +- " << fmt17(sum.ci_halfwidth) << '\n'
        << "lambda_sum closed form = " << fmt17(lambda_sum_closed_form(p)) << '\n'
        << "upper_bound = " << fmt17(lyapunov_upper_bound(p)) << '\n';
    if (c.certify && !determined) {
        out << "sign undetermined at T = " << top.horizon << '\n';
        return 2;
    }
    return 0;
}

int cmd_ftle(const RunConfig& c, std::ostream& out) {
    const Params p = params_of(c);
    Outputs o(c);
    FtleOptions opts;
    opts.dt = c.dt;
    opts.renorm_every = c.renorm_every;
    opts.pullback = c.pullback;
    opts.threads = threads_of(c);
    const FtleDistribution d = ftle_distribution(p, c.n, c.T, c.seed, opts);
    o.csv("ftle.csv", [&](std::ostream& f) { write_ftle_csv(f, d); });
    std::size_t positive = 0;
    double max_sup = -INFINITY;
    for (const FtleSample& s : d.samples) {
        positive += s.sup_value > 0.0;
        max_sup = std::max(max_sup, s.sup_value);
    }
    out << "samples = " << d.samples.size() << '\n'
        << "failures = " << d.failures << '\n'
        << "max ftle_sup = " << fmt17(max_sup) << '\n'
        << "fraction ftle_sup > 0 = "
        << fmt17(d.samples.empty() ? 0.0 : static_cast<double>(positive) / static_cast<double>(d.samples.size()))
        << '\n';
    return d.failures > 0 ? 2 : 0;
}

int cmd_pullback(const RunConfig& c, std::ostream& out) {
    const Params p = params_of(c);
    Outputs o(c);
    PullbackOptions opts;
    opts.dt = c.dt;
    opts.threads = threads_of(c);
    const PullbackResult r = pullback_cloud(p, c.seed, c.T, c.n, c.checkpoints, opts);
    o.csv("diameters.csv", [&](std::ostream& f) { write_diameter_csv(f, r); });
    o.csv("cloud_initial.csv", [&](std::ostream& f) { write_cloud_csv(f, r.initial); });
    for (std::size_t k = 0; k < r.clouds.size(); ++k) {
        std::ostringstream name;
        name << "cloud_T" << r.checkpoints[k] << ".csv";
        o.csv(name.str(), [&](std::ostream& f) { write_cloud_csv(f, r.clouds[k]); });
    }
    for (std::size_t k = 0; k < r.checkpoints.size(); ++k)
        out << "T = " << r.checkpoints[k] << "  diameter = " << fmt17(r.diameters[k]) << '\n';
    out << (r.failed ? "failed: " + std::to_string(r.blown_up) + " points blew up"
                     : r.synchronised ? std::string("synchronised") : std::string("not synchronised"))
        << '\n';
    return r.failed ? 2 : 0;
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
    GridSpec g;
    parse_grid(c.grid, g);
    g.beta = c.beta;
    g.a = c.a;
    g.sigma = c.sigma;
    g.T = c.T;
    g.seeds = c.seeds;
    g.seed0 = c.seed;
    g.refine_T = c.refine_T;
    g.numerics.dt = c.dt;
    g.numerics.burn_in = c.burn_in;
    g.numerics.renorm_every = c.renorm_every;
    g.validate();
    Outputs o(c);

    const SweepResult r = sweep_top_lyapunov(g, threads_of(c));
    const CurveEstimate curve = zero_contour(r);
    const SweepConsistency cons = check_consistency(r);
    o.csv("sweep.csv", [&](std::ostream& f) { write_sweep_csv(f, r); });
    o.csv("contour.csv", [&](std::ostream& f) { write_curve_csv(f, curve); });

    std::size_t failed = 0, certified = 0, refined = 0, undetermined = 0;
    for (const SweepCell& cell : r.cells) {
        failed += cell.failed;
        certified += cell.certified();
        refined += cell.refined;
    }
    for (const ContourPoint& pt : curve.points) undetermined += !pt.determined;
    out << "cells = " << r.cells.size() << "  certified = " << certified << "  refined = " << refined
        << "  failed = " << failed << '\n'
        << "contour points = " << curve.points.size() - undetermined << "  undetermined rows = " << undetermined << '\n'
        << "small-shear mismatches = " << cons.small_shear_mismatches.size()
        << "  bound violations = " << cons.bound_violations.size() << '\n'
        << "seconds = " << r.cpu_seconds << '\n';
    return failed > 0 ? 2 : 0;
}

int cmd_verify(const RunConfig&, std::ostream& out) { return print_verify_table(out, run_verify_suite()) ? 0 : 2; }

struct Command {
    const char* name;
    const char* help;
    std::vector<std::string> keys;
    std::function<int(const RunConfig&, std::ostream&)> run;
};

const std::vector<std::string> kModel = {"alpha", "beta", "a", "b", "sigma"};

std::vector<std::string> with_model(std::vector<std::string> extra) {
    extra.insert(extra.begin(), kModel.begin(), kModel.end());
    return extra;
}

const std::vector<Command>& commands() {
    static const std::vector<Command> c = {
        {"density", "analytic radial density table; with --T also the empirical histogram",
         with_model({"n", "T", "bins", "seed", "dt", "burn_in"}), cmd_density},
        {"bounds", "K, kappa, lambda_sum and the upper bound", with_model({}), cmd_bounds},
        {"simulate", "Euler-Maruyama trajectory", with_model({"T", "dt", "seed", "x0", "y0", "tangent"}),
         cmd_simulate},
        {"lyapunov", "top and sum Lyapunov exponents",
         with_model({"T", "dt", "seed", "burn_in", "renorm_every", "certify"}), cmd_lyapunov},
        {"ftle", "finite-time Lyapunov exponent distribution",
         with_model({"T", "dt", "seed", "n", "renorm_every", "pullback"}), cmd_ftle},
        {"pullback", "pullback clouds and diameters", with_model({"T", "dt", "seed", "n", "checkpoints"}),
         cmd_pullback},
        {"sweep", "lambda_top over a (b, alpha) grid and its zero contour",
         {"beta", "a", "sigma", "grid", "T", "dt", "seed", "seeds", "refine_T", "burn_in", "renorm_every"}, cmd_sweep},
        {"verify", "invariant suite", {}, cmd_verify},
    };
    return c;
}

std::string flag_name(const std::string& key) {
    std::string f = "--" + key;
    std::replace(f.begin(), f.end(), '_', '-');
    return f;
}

const char* flag_help(const std::string& key) {
    static const std::vector<std::pair<std::string, const char*>> h = {
        {"alpha", "linear growth rate"},
        {"beta", "linear rotation rate"},
        {"a", "cubic radial damping (> 0)"},
        {"b", "shear"},
        {"sigma", "noise amplitude"},
        {"dt", "time step"},
        {"T", "horizon (burn-in included)"},
        {"burn_in", "discarded initial time"},
        {"renorm_every", "steps between QR renormalisations"},
        {"seed", "master seed"},
        {"n", "sample count (density: table points)"},
        {"bins", "histogram bins"},
        {"checkpoints", "comma-separated pullback times"},
        {"grid", "b_min:b_max:steps,alpha_min:alpha_max:steps"},
        {"seeds", "seeds per grid cell"},
        {"refine_T", "horizon for cells next to a sign change; 0 disables"},
        {"x0", "initial x"},
        {"y0", "initial y"},
        {"pullback", "pull the initial state back over this time first"},
        {"tangent", "also write the tangent flow"},
        {"certify", "double T up to 1e5 until the CI excludes 0; exit 2 otherwise"},
    };
    for (const auto& [k, v] : h)
        if (k == key) return v;
    return "";
}

void add_flag(CLI::App* sub, const std::string& key, json& given) {
    const std::string name = flag_name(key);
    const std::string help = flag_help(key);
    auto put = [&given, key](auto v) { given[key] = v; };
    if (key == "seed" || key == "n") {
        sub->add_option_function<std::uint64_t>(name, put, help);
    } else if (key == "bins" || key == "seeds" || key == "renorm_every") {
        sub->add_option_function<int>(name, put, help);
    } else if (key == "grid") {
        sub->add_option_function<std::string>(name, put, help);
    } else if (key == "checkpoints") {
        sub->add_option_function<std::vector<double>>(name, put, help)->delimiter(',');
    } else if (key == "tangent" || key == "certify") {
        sub->add_flag_callback(name, [&given, key] { given[key] = true; }, help);
    } else {
        sub->add_option_function<double>(name, put, help);
    }
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot read config '" + path + "'");
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace

RunConfig defaults_for(const std::string& command) {
    RunConfig c;
    c.command = command;
    if (command == "density") {
        c.n = 1001;
        c.out = "hopf_out";
    } else if (command == "simulate") {
        c.T = 10.0;
        c.out = "hopf_out";
    } else if (command == "lyapunov") {
        c.T = 1e4;
        c.out = "hopf_out";
    } else if (command == "ftle") {
        c.T = 10.0;
        c.n = 10000;
        c.out = "hopf_out";
    } else if (command == "pullback") {
        c.T = 50.0;
        c.n = 1000;
        c.out = "hopf_out";
    } else if (command == "sweep") {
        c.T = 2000.0;
        c.out = "hopf_out";
    }
    return c;
}

std::string to_json(const RunConfig& cfg) { return as_json(cfg).dump(); }

RunConfig merge_json(RunConfig base, const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config: expected a flat JSON object");
    for (const auto& [key, value] : j.items()) {
        const auto& fs = fields();
        const auto it = std::find_if(fs.begin(), fs.end(), [&](const Field& f) { return key == f.key; });
        if (it == fs.end()) throw std::invalid_argument("config: unknown key '" + key + "'");
        if (key == "command" && value.is_string() && !base.command.empty() && value.get<std::string>() != base.command)
            throw std::invalid_argument("config: written for '" + value.get<std::string>() + "', not '" +
                                        base.command + "'");
        it->set(base, value);
    }
    return base;
}

std::string config_hash(const RunConfig& cfg) {
    json j = as_json(cfg);
    j.erase("out");
    j.erase("threads");
    return fnv1a_hex(j.dump());
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app("Numerical lab for the stochastic Hopf normal form", "hopf_lab");
    app.require_subcommand(1);
    json given = json::object();
    std::string config_path;
    std::vector<std::pair<const Command*, CLI::App*>> subs;
    for (const Command& c : commands()) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        for (const std::string& key : c.keys) add_flag(sub, key, given);
        sub->add_option("--config", config_path, "flat JSON config; flags override its values");
        sub->add_option_function<std::string>("--out", [&given](const std::string& v) { given["out"] = v; },
                                               "output directory");
        sub->add_option_function<unsigned>("--threads", [&given](unsigned v) { given["threads"] = v; },
                                           "worker threads (default: hardware parallelism)");
        subs.emplace_back(&c, sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const auto active = app.get_subcommands();
        err << (active.empty() ? app.help() : active.front()->help());
        return 1;
    }

    const auto chosen = std::find_if(subs.begin(), subs.end(), [](const auto& s) { return s.second->parsed(); });
    const Command& cmd = *chosen->first;
    try {
        RunConfig cfg = defaults_for(cmd.name);
        if (!config_path.empty()) cfg = merge_json(cfg, read_file(config_path));
        cfg = merge_json(cfg, given.dump());
        cfg.command = cmd.name;
        validate(cfg);
        return cmd.run(cfg, out);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return 2;
    }
}

int run(int argc, const char* const* argv) { return run(argc, argv, std::cout, std::cerr); }

}  // namespace hopf::cli
