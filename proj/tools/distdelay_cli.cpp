#include "distdelay/acceptance.hpp"
#include "distdelay/analysis.hpp"
#include "distdelay/config.hpp"
#include "distdelay/counterexample.hpp"
#include "distdelay/error.hpp"
#include "distdelay/integrator.hpp"
#include "distdelay/report_io.hpp"
#include "distdelay/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace distdelay;

namespace {

struct Args {
    std::string config;
    std::string out;
    std::size_t jobs = 0;
    std::string filter;
    double tol_scale = 1.0;
};

fs::path output_path(const ExperimentConfig& cfg, const Args& args, const std::string& name)
{
    const fs::path dir = args.out.empty() ? fs::path(cfg.output.dir) : fs::path(args.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir / name;
}

std::ofstream open_out(const fs::path& p)
{
    std::ofstream os(p);
    if (!os) throw ConfigError("cannot write " + p.string());
    return os;
}

void write_json(const fs::path& p, const json& j)
{
    auto os = open_out(p);
    os << j.dump(2) << '\n';
}

void write_csv(const fs::path& p, const Trajectory& traj, std::size_t stride)
{
    auto os = open_out(p);
    write_trajectory_csv(os, traj, stride);
}

std::size_t thread_count(std::size_t jobs)
{
    return jobs ? jobs : std::max(1u, std::thread::hardware_concurrency());
}

double constant_rate(const ModelBlock& m)
{
    const auto r = build_rate(m);
    if (!r.is_constant()) throw ConfigError("analysis needs a constant rate");
    return r.values()[0];
}

int cmd_simulate(const Args& args)
{
    const auto cfg = load_config(args.config);
    if (!cfg.history) throw ConfigError("simulate needs a history block");
    const auto model = build_model(cfg);
    const auto history = build_history(*cfg.history, model.measure, cfg.run.seed);
    const double horizon = resolve_horizon(cfg.run, model.measure);
    const IntegratorOptions opts{cfg.run.step};
    const auto traj = integrate(model, history, horizon, opts);

    const auto K = model.f.equilibrium();
    const double tol = cfg.run.convergence_tol > 0.0 ? cfg.run.convergence_tol : 1e-4 * std::max(1.0, K.value_or(1.0));
    const auto tail = tail_statistics(traj, cfg.run.window_fraction, tol);
    const std::string hash = config_hash(cfg);

    write_csv(output_path(cfg, args, cfg.output.trajectory), traj, cfg.output.stride);
    json manifest = {{"command", "simulate"},
                     {"config", to_json(cfg)},
                     {"model", model.f.name()},
                     {"measure", to_json(model.measure)},
                     {"options", {{"horizon", horizon}, {"step", traj.stats().nominal_step}}},
                     {"stats", to_json(traj.stats())}};
    write_json(output_path(cfg, args, cfg.output.manifest), stamp(manifest, hash));
    json tj = to_json(tail);
    tj["equilibrium"] = K ? json(*K) : json(nullptr);
    tj["window_fraction"] = cfg.run.window_fraction;
    tj["convergence_tol"] = tol;
    if (model.measure.max_lag() > 0.0) {
        tj["window_memory_lengths"] = cfg.run.window_fraction * horizon / model.measure.max_lag();
    }
    write_json(output_path(cfg, args, cfg.output.tail), stamp(tj, hash));

    std::cout << "simulated " << traj.size() << " knots to t = " << traj.t_max() << "; tail "
              << (tail.converged ? "converged" : "not converged") << " [" << tail.inf_est << ", " << tail.sup_est
              << "]\n";
    return 0;
}

StabilityReport analyze_model(const ModelBlock& m)
{
    const auto f = build_function(m);
    if (m.kind == "nicholson") return nicholson_report(m.p, m.delta, m.a);
    if (m.kind == "mackey_glass") return mackey_glass_report(m.a, m.b, m.gamma);
    return generic_report(f, constant_rate(m));
}

int cmd_analyze(const Args& args)
{
    const auto cfg = load_config(args.config);
    const auto rep = analyze_model(cfg.model);
    json j = to_json(rep);
    j["command"] = "analyze";
    write_json(output_path(cfg, args, cfg.output.report), stamp(j, config_hash(cfg)));
    std::cout << rep.model << ": " << to_string(rep.regime) << '\n';
    return 0;
}

int cmd_counterexample(const Args& args)
{
    const auto cfg = load_config(args.config);
    if (!cfg.counterexample) throw ConfigError("counterexample command needs a counterexample block");
    const auto& c = *cfg.counterexample;
    const auto f = build_function(cfg.model);
    Counterexample ce = [&] {
        try {
            return construct({f, c.r, c.a, c.b}, c.cycles);
        } catch (const SpecViolation& e) {
            throw ConfigError(std::string("counterexample request rejected: ") + e.what());
        }
    }();
    const auto rep = validate(ce, IntegratorOptions{cfg.run.step});
    const double tol = cfg.run.convergence_tol > 0.0 ? cfg.run.convergence_tol : 1e-3;
    const bool pass = std::abs(rep.inf_est - c.a) < tol && std::abs(rep.sup_est - c.b) < tol;
    const std::string hash = config_hash(cfg);

    write_json(output_path(cfg, args, cfg.output.schedule), stamp(schedule_json(ce), hash));
    write_csv(output_path(cfg, args, cfg.output.trajectory), rep.trajectory, cfg.output.stride);
    json vj = {{"command", "counterexample"},
               {"inf_est", rep.inf_est},
               {"sup_est", rep.sup_est},
               {"max_abs_dev_from_prediction", rep.max_abs_dev_from_prediction},
               {"max_switch_dev", rep.max_switch_dev},
               {"max_sample_dev", rep.max_sample_dev},
               {"tolerance", tol},
               {"pass", pass}};
    write_json(output_path(cfg, args, cfg.output.report), stamp(vj, hash));
    std::cout << (pass ? "PASS" : "FAIL") << " inf = " << rep.inf_est << " (target " << c.a << "), sup = "
              << rep.sup_est << " (target " << c.b << ")\n";
    return pass ? 0 : 1;
}

int cmd_sweep(const Args& args)
{
    const auto cfg = load_config(args.config);
    if (!cfg.sweep) throw ConfigError("sweep command needs a sweep block");
    const auto points = sweep_points(*cfg.sweep);
    std::vector<StabilityReport> reports;
    try {
        reports = run_sweep(cfg.sweep->model, points, thread_count(args.jobs));
    } catch (const DomainError& e) {
        throw ConfigError(std::string("sweep point rejected: ") + e.what());
    }
    auto os = open_out(output_path(cfg, args, cfg.output.sweep));
    write_sweep_csv(os, cfg.sweep->model, points, reports);
    std::cout << "wrote " << points.size() << " rows\n";
    return 0;
}

int cmd_verify(const Args& args)
{
    acceptance::Options opts;
    opts.filter = args.filter;
    opts.tol_scale = args.tol_scale;
    opts.threads = args.jobs;
    const auto results = acceptance::run(opts, &std::cout);
    const auto failed = std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.pass; });
    std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
    if (results.empty()) throw ConfigError("filter '" + args.filter + "' selects no criteria");
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"distributed-delay simulation and stability toolbox"};
    app.require_subcommand(1);
    Args args;

    auto add_config = [&](CLI::App* sub) {
        sub->add_option("-c,--config", args.config, "experiment config (JSON)")->required();
        sub->add_option("-o,--out", args.out, "output directory (overrides output.dir)");
    };
    auto* simulate = app.add_subcommand("simulate", "integrate the configured model");
    add_config(simulate);
    auto* analyze = app.add_subcommand("analyze", "stability report for the configured model");
    add_config(analyze);
    auto* counter = app.add_subcommand("counterexample", "construct and validate a prescribed oscillation");
    add_config(counter);
    auto* sweep = app.add_subcommand("sweep", "threshold table over a parameter grid");
    add_config(sweep);
    sweep->add_option("-j,--jobs", args.jobs, "worker threads (0: hardware)");
    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    verify->add_option("--filter", args.filter, "comma-separated criterion numbers or names");
    verify->add_option("--tol-scale", args.tol_scale, "scale every tolerance")->check(CLI::PositiveNumber);
    verify->add_option("-j,--jobs", args.jobs, "worker threads (0: hardware)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(args);
        if (analyze->parsed()) return cmd_analyze(args);
        if (counter->parsed()) return cmd_counterexample(args);
        if (sweep->parsed()) return cmd_sweep(args);
        if (verify->parsed()) return cmd_verify(args);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
