#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "errors.hpp"
#include "kernel.hpp"
#include "montecarlo.hpp"
#include "solver.hpp"
#include "timechange.hpp"
#include "validation.hpp"

namespace fracheat::cli {

enum class Command { kernel, time_density, solve, moments, sample, validate };

inline const char* command_name(Command c) {
    switch (c) {
    case Command::kernel: return "kernel";
    case Command::time_density: return "time-density";
    case Command::solve: return "solve";
    case Command::moments: return "moments";
    case Command::sample: return "sample";
    case Command::validate: return "validate";
    }
    return "unknown";
}

struct GridSpec {
    double min = 0.0;
    double max = 0.0;
    int points = 0;

    std::vector<double> nodes() const {
        std::vector<double> v(points);
        for (int i = 0; i < points; ++i) v[i] = i + 1 == points ? max : min + (max - min) * i / (points - 1);
        return v;
    }
};

struct RunConfig {
    Command command = Command::validate;
    int n = 2;
    double alpha = 0.5;
    int odd_sign = 1;
    double t = 1.0;
    std::string route = "auto";       // solve: auto|subordination|fourier_ml; time-density: auto|wright|...
    std::string time_route;           // solve with subordination
    std::optional<GridSpec> grid;
    int m = 2;
    int j = 1;
    std::string law = "product";      // sample: product|gj|reflecting|composed
    std::optional<double> delta;
    std::optional<int> r;
    std::uint64_t seed = 20240601;
    std::uint64_t stream = 0;
    std::size_t count = 1000;
    std::map<std::string, double> tolerance_overrides;
    std::string output;               // empty: standard output
    bool quick = false;
    unsigned threads = 1;
};

inline double parse_number(const std::string& text, const std::string& what) {
    std::istringstream is(text);
    is.imbue(std::locale::classic());
    double v = 0.0;
    is >> v;
    if (!is || !is.eof() || !std::isfinite(v)) throw UsageError("invalid number for " + what + ": '" + text + "'");
    return v;
}

inline GridSpec parse_grid(const std::string& text) {
    const auto a = text.find(':');
    const auto b = a == std::string::npos ? a : text.find(':', a + 1);
    if (b == std::string::npos) throw UsageError("grid must be min:max:points, got '" + text + "'");
    GridSpec g;
    g.min = parse_number(text.substr(0, a), "grid min");
    g.max = parse_number(text.substr(a + 1, b - a - 1), "grid max");
    const double p = parse_number(text.substr(b + 1), "grid points");
    if (p != std::floor(p) || p < 2 || p > 1e7) throw UsageError("grid points must be an integer >= 2");
    g.points = static_cast<int>(p);
    if (!(g.max > g.min)) throw UsageError("grid max must exceed grid min");
    return g;
}

inline unsigned threads_from_env() {
    const char* env = std::getenv("FRACHEAT_THREADS");
    if (!env || !*env) return 1;
    const double v = parse_number(env, "FRACHEAT_THREADS");
    if (v < 1 || v != std::floor(v) || v > 4096) throw UsageError("FRACHEAT_THREADS must be an integer >= 1");
    return static_cast<unsigned>(v);
}

// key=value lines; blank lines and lines starting with '#' are skipped.
inline std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file '" + path + "'");
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError("config line " + std::to_string(lineno) + " is not key=value: '" + line + "'");
        out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

namespace detail {

struct Parser {
    CLI::App app{"Time-fractional higher-order heat equations: kernels, random times, solutions, sampling"};
    RunConfig cfg;
    std::string grid_text;
    std::vector<std::string> tolerances;
    std::string config_path;
    std::optional<unsigned> threads;
    double delta_value = 0.0;
    int r_value = 0;
    std::map<std::string, CLI::App*> subs;

    Parser() {
        app.require_subcommand(1);
        app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        auto common = [&](CLI::App* s) {
            s->add_option("--config", config_path, "key=value file; flags take precedence");
            s->add_option("--output", cfg.output, "output path (default: standard output)");
            s->add_option("--threads", threads, "worker count (overrides FRACHEAT_THREADS)");
        };
        auto eqn = [&](CLI::App* s) {
            s->add_option("--n", cfg.n, "equation order n >= 2");
            s->add_option("--odd-sign", cfg.odd_sign, "k_n for odd n (+1 or -1)");
        };
        auto* k = app.add_subcommand("kernel", "p_n(x,t) on a grid");
        eqn(k);
        k->add_option("--t", cfg.t, "time");
        k->add_option("--grid", grid_text, "min:max:points")->required();
        common(k);

        auto* td = app.add_subcommand("time-density", "density of the random time on a u-grid");
        td->add_option("--alpha", cfg.alpha, "order in (0,1)");
        td->add_option("--t", cfg.t, "time");
        td->add_option("--route", cfg.route, "auto|wright|frac_integral|stable|product");
        td->add_option("--grid", grid_text, "min:max:points")->required();
        common(td);

        auto* so = app.add_subcommand("solve", "fundamental solution on an x-grid");
        eqn(so);
        so->add_option("--alpha", cfg.alpha, "order in (0,1]");
        so->add_option("--t", cfg.t, "time");
        so->add_option("--route", cfg.route, "auto|subordination|fourier_ml");
        so->add_option("--time-route", cfg.time_route, "wright|frac_integral|stable|product (subordination)");
        so->add_option("--grid", grid_text, "min:max:points")->required();
        common(so);

        auto* mo = app.add_subcommand("moments", "solution moment (--r) or random-time moment (--delta)");
        eqn(mo);
        mo->add_option("--alpha", cfg.alpha, "order in (0,1]");
        mo->add_option("--t", cfg.t, "time");
        mo->add_option("--r", r_value, "solution moment order");
        mo->add_option("--delta", delta_value, "random-time moment order");
        common(mo);

        auto* sa = app.add_subcommand("sample", "Monte Carlo samples");
        sa->add_option("--law", cfg.law, "product|gj|reflecting|composed");
        sa->add_option("--m", cfg.m, "m >= 2");
        sa->add_option("--j", cfg.j, "1 <= j <= m-1 (gj)");
        sa->add_option("--alpha", cfg.alpha, "1/2 or 1/m (composed)");
        sa->add_option("--t", cfg.t, "time");
        sa->add_option("--seed", cfg.seed, "64-bit seed");
        sa->add_option("--stream", cfg.stream, "stream id");
        sa->add_option("--count", cfg.count, "number of samples");
        common(sa);

        auto* va = app.add_subcommand("validate", "run the identity suite");
        va->add_flag("--quick", cfg.quick, "reduced grids and sample sizes");
        va->add_option("--seed", cfg.seed, "Monte Carlo seed");
        va->add_option("--tolerance", tolerances, "row-name=value override (repeatable)")
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
        common(va);

        for (auto* s : {k, td, so, mo, sa, va}) subs[s->get_name()] = s;
    }
};

inline bool is_flag_option(const CLI::Option* o) { return o->get_expected_min() == 0; }

} // namespace detail

// argv excludes the program name. Config-file entries are placed ahead of the
// flags, so a flag given on the command line wins.
inline RunConfig parse_config(const std::vector<std::string>& args) {
    detail::Parser p;
    std::string command;
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (command.empty() && p.subs.count(args[i])) command = args[i];
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    std::vector<std::string> merged;
    if (!config_path.empty()) {
        const auto entries = read_config_file(config_path);
        for (const auto& [key, value] : entries)
            if (key == "command" && command.empty()) command = value;
        const auto it = p.subs.find(command);
        if (it == p.subs.end()) throw UsageError("unknown or missing command '" + command + "'");
        for (const auto& [key, value] : entries) {
            if (key == "command") continue;
            const CLI::Option* opt = it->second->get_option_no_throw("--" + key);
            if (!opt || key == "config") throw UsageError("unknown config key '" + key + "'");
            if (detail::is_flag_option(opt)) {
                if (value == "true" || value == "1") merged.push_back("--" + key);
                else if (value != "false" && value != "0") throw UsageError("config key '" + key + "' expects true or false");
            } else {
                merged.push_back("--" + key);
                merged.push_back(value);
            }
        }
    }
    std::vector<std::string> argv;
    bool placed = false;
    for (const auto& a : args) {
        argv.push_back(a);
        if (!placed && a == command) {
            argv.insert(argv.end(), merged.begin(), merged.end());
            placed = true;
        }
    }
    if (!placed) {
        argv.insert(argv.begin(), command);
        argv.insert(argv.begin() + 1, merged.begin(), merged.end());
    }
    // CLI11 consumes the vector from the back.
    std::vector<std::string> rev(argv.rbegin(), argv.rend());
    try {
        p.app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        throw;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    RunConfig cfg = p.cfg;
    const CLI::App* sub = p.app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "kernel") cfg.command = Command::kernel;
    else if (name == "time-density") cfg.command = Command::time_density;
    else if (name == "solve") cfg.command = Command::solve;
    else if (name == "moments") cfg.command = Command::moments;
    else if (name == "sample") cfg.command = Command::sample;
    else cfg.command = Command::validate;

    if (!p.grid_text.empty()) cfg.grid = parse_grid(p.grid_text);
    if (sub->get_option_no_throw("--r") && sub->get_option("--r")->count() > 0) cfg.r = p.r_value;
    if (sub->get_option_no_throw("--delta") && sub->get_option("--delta")->count() > 0) cfg.delta = p.delta_value;
    for (const auto& item : p.tolerances) {
        const auto eq = item.rfind('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--tolerance expects row-name=value, got '" + item + "'");
        cfg.tolerance_overrides[item.substr(0, eq)] = parse_number(item.substr(eq + 1), "tolerance");
    }
    cfg.threads = p.threads ? *p.threads : threads_from_env();
    if (cfg.threads < 1) throw UsageError("threads must be >= 1");

    if (cfg.n < 2) throw UsageError("n must be at least 2");
    if (cfg.odd_sign != 1 && cfg.odd_sign != -1) throw UsageError("odd-sign must be +1 or -1");
    if (!(cfg.t > 0) || !std::isfinite(cfg.t)) throw UsageError("t must be positive");
    if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) throw UsageError("alpha must lie in (0,1]");
    if (cfg.command == Command::moments && cfg.r.has_value() == cfg.delta.has_value())
        throw UsageError("moments needs exactly one of --r and --delta");
    if (cfg.r && *cfg.r < 0) throw UsageError("r must be nonnegative");
    if (cfg.delta && *cfg.delta < 0) throw UsageError("delta must be nonnegative");
    if (cfg.command == Command::sample && cfg.count < 1) throw UsageError("count must be at least 1");
    return cfg;
}

inline RunConfig parse_config(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return parse_config(args);
}

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {
        buf_.imbue(std::locale::classic());
        buf_.precision(9);
        buf_ << "# fracheat v1\n";
    }
    template <class... Ts>
    void row(const Ts&... v) {
        bool first = true;
        ((buf_ << (first ? "" : ",") << v, first = false), ...);
        buf_ << '\n';
    }
    void raw(const std::string& s) { buf_ << s; }
    ~CsvWriter() { os_ << buf_.str() << std::flush; }

private:
    std::ostream& os_;
    std::ostringstream buf_;
};

inline solver::SolveRoute parse_solve_route(const std::string& r) {
    if (r == "auto") return solver::SolveRoute::automatic;
    if (r == "subordination") return solver::SolveRoute::subordination;
    if (r == "fourier_ml") return solver::SolveRoute::fourier_ml;
    throw UsageError("unknown solve route '" + r + "'");
}

inline timechange::TimeRoute parse_time_route(const std::string& r) {
    if (r == "wright") return timechange::TimeRoute::wright;
    if (r == "frac_integral") return timechange::TimeRoute::frac_integral;
    if (r == "stable") return timechange::TimeRoute::stable;
    if (r == "product") return timechange::TimeRoute::product;
    throw UsageError("unknown time route '" + r + "'");
}

inline int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    switch (cfg.command) {
    case Command::kernel: {
        const auto spec = kernel::make_equation_spec(cfg.n, cfg.odd_sign);
        const auto xs = cfg.grid->nodes();
        std::vector<kernel::SignedDensitySample> v(xs.size());
        fracheat::detail::parallel_for(xs.size(), cfg.threads, [&](std::size_t i) { v[i] = kernel::kernel_density(spec, xs[i], cfg.t); });
        CsvWriter w(out);
        w.row("x", "value", "error_estimate");
        for (const auto& s : v) w.row(s.x, s.value, s.error_estimate);
        return 0;
    }
    case Command::time_density: {
        if (cfg.alpha == 1.0) throw UsageError("alpha = 1 is a point mass at u = t and has no density");
        const auto route = cfg.route == "auto" ? solver::default_time_route(cfg.alpha) : parse_time_route(cfg.route);
        const auto law = timechange::make_time_change_law(cfg.alpha, route, cfg.t);
        const timechange::TimeDensity dens(law);
        const auto us = cfg.grid->nodes();
        std::vector<double> v(us.size());
        fracheat::detail::parallel_for(us.size(), cfg.threads, [&](std::size_t i) {
            v[i] = us[i] < 0 ? 0.0 : (us[i] == 0 && route == timechange::TimeRoute::stable) ? dens.limit_at_zero() : dens(us[i]);
        });
        CsvWriter w(out);
        w.row("u", "value", "route");
        for (std::size_t i = 0; i < us.size(); ++i) w.row(us[i], v[i], timechange::route_name(route));
        return 0;
    }
    case Command::solve: {
        solver::SolutionRequest req;
        req.spec = kernel::make_equation_spec(cfg.n, cfg.odd_sign);
        req.alpha = cfg.alpha;
        req.t = cfg.t;
        req.x_grid = cfg.grid->nodes();
        req.route = parse_solve_route(cfg.route);
        if (!cfg.time_route.empty()) req.time_route = parse_time_route(cfg.time_route);
        req.threads = cfg.threads;
        const auto field = solver::solve(req);
        CsvWriter w(out);
        w.row("x", "value", "error_estimate");
        for (const auto& s : field.values) w.row(s.x, s.value, s.error_estimate);
        return 0;
    }
    case Command::moments: {
        CsvWriter w(out);
        w.row("order", "value");
        if (cfg.r) w.row(*cfg.r, solver::solution_moment(kernel::make_equation_spec(cfg.n, cfg.odd_sign), cfg.alpha, *cfg.r, cfg.t));
        else w.row(*cfg.delta, timechange::time_moment(cfg.alpha, *cfg.delta, cfg.t));
        return 0;
    }
    case Command::sample: {
        const montecarlo::RngStream rng{cfg.seed, cfg.stream};
        montecarlo::SampleBatch b;
        if (cfg.law == "product") b = montecarlo::sample_time_product(cfg.m, cfg.t, rng, cfg.count, cfg.threads);
        else if (cfg.law == "gj") b = montecarlo::sample_gj({cfg.m, cfg.j, cfg.t}, rng, cfg.count, cfg.threads);
        else if (cfg.law == "reflecting") b = montecarlo::sample_reflecting_bm(cfg.t, rng, cfg.count, cfg.threads);
        else if (cfg.law == "composed") b = montecarlo::sample_composed_bm(cfg.alpha, cfg.t, rng, cfg.count, cfg.threads);
        else throw UsageError("unknown sample law '" + cfg.law + "'");
        CsvWriter w(out);
        w.row("index", "value");
        for (std::size_t i = 0; i < b.values.size(); ++i) w.row(i, b.values[i]);
        return 0;
    }
    case Command::validate: {
        validation::SuiteOptions opt;
        opt.quick = cfg.quick;
        opt.threads = cfg.threads;
        opt.seed = cfg.seed;
        opt.tolerance_overrides = cfg.tolerance_overrides;
        const auto report = validation::run_suite(opt);
        std::ostringstream csv;
        validation::write_csv(csv, report);
        {
            CsvWriter w(out);
            w.raw(csv.str());
        }
        validation::write_summary(err, report);
        return report.pass() ? 0 : 1;
    }
    }
    return 2;
}

// Exit statuses: 0 success, 1 validation failure, 2 usage error, 3 numerical non-convergence.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (cfg.output.empty()) return run_command(cfg, out, err);
        std::ofstream file(cfg.output);
        if (!file) throw UsageError("cannot open output file '" + cfg.output + "'");
        return run_command(cfg, file, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const ConvergenceError& e) {
        err << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const OutOfRangeError& e) {
        err << "numerical error: " << e.what() << '\n';
        return 3;
    }
}

inline int main_entry(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    RunConfig cfg;
    try {
        cfg = parse_config(argc, argv);
    } catch (const CLI::CallForHelp&) {
        detail::Parser p;
        out << p.app.help();
        return 0;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }
    return run(cfg, out, err);
}

} // namespace fracheat::cli
