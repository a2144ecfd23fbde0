#include "distdelay/sweep.hpp"

#include "distdelay/error.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

namespace distdelay {

namespace {

std::vector<std::string> axis_names(const std::string& model)
{
    if (model == "nicholson") return {"p", "delta", "a"};
    if (model == "mackey_glass") return {"a", "b", "gamma"};
    throw ConfigError("sweep.model must be nicholson or mackey_glass");
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::vector<SweepPoint> sweep_points(const SweepBlock& sweep)
{
    const auto names = axis_names(sweep.model);
    std::map<std::string, std::vector<double>> axes;
    for (const auto& n : names) axes[n] = {1.0};
    if (sweep.model == "mackey_glass") axes["a"] = {};
    if (sweep.model == "mackey_glass") axes["gamma"] = {};
    if (sweep.model == "nicholson") axes["p"] = {};
    for (const auto& [k, v] : sweep.axes) {
        if (std::find(names.begin(), names.end(), k) == names.end()) {
            throw ConfigError("unknown sweep axis '" + k + "' for model " + sweep.model);
        }
        axes[k] = v;
    }
    for (const auto& [k, v] : axes) {
        if (v.empty()) throw ConfigError("sweep axis '" + k + "' is empty");
    }

    std::vector<SweepPoint> points{SweepPoint{}};
    for (const auto& [k, values] : axes) {
        std::vector<SweepPoint> next;
        next.reserve(points.size() * values.size());
        for (const auto& p : points) {
            for (double v : values) {
                auto q = p;
                q[k] = v;
                next.push_back(std::move(q));
            }
        }
        points = std::move(next);
    }
    return points;
}

StabilityReport point_report(const std::string& model, const SweepPoint& point)
{
    if (model == "nicholson") return nicholson_report(point.at("p"), point.at("delta"), point.at("a"));
    if (model == "mackey_glass") return mackey_glass_report(point.at("a"), point.at("b"), point.at("gamma"));
    throw ConfigError("sweep.model must be nicholson or mackey_glass");
}

std::vector<StabilityReport> run_sweep(const std::string& model, const std::vector<SweepPoint>& points,
                                       std::size_t threads)
{
    std::vector<StabilityReport> out(points.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            try {
                out[i] = point_report(model, points[i]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = points.size();
            }
        }
    };
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, points.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

std::vector<std::string> sweep_columns(const std::string& model)
{
    auto cols = axis_names(model);
    for (const char* c : {"regime", "K", "m", "M"}) cols.emplace_back(c);
    if (model == "nicholson") {
        for (const char* c : {"tau_57", "tau_58", "tau_GL", "tau0"}) cols.emplace_back(c);
    } else {
        for (const char* c : {"general_L", "general_Lstar", "tau_mg_quadratic", "tau_mg_lstar"}) cols.emplace_back(c);
    }
    return cols;
}

void write_sweep_csv(std::ostream& os, const std::string& model, const std::vector<SweepPoint>& points,
                     const std::vector<StabilityReport>& reports)
{
    const auto cols = sweep_columns(model);
    for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
    os << '\n';
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& rep = reports[i];
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c) os << ',';
            const auto& col = cols[c];
            if (auto it = points[i].find(col); it != points[i].end() && c < 3) {
                os << fmt(it->second);
            } else if (col == "regime") {
                os << to_string(rep.regime);
            } else if (col == "K") {
                if (rep.descriptor.K) os << fmt(*rep.descriptor.K);
            } else if (col == "m" || col == "M") {
                if (rep.attracting_interval) {
                    os << fmt(col == "m" ? rep.attracting_interval->first : rep.attracting_interval->second);
                }
            } else if (auto t = rep.thresholds.find(col); t != rep.thresholds.end()) {
                os << fmt(t->second);
            }
        }
        os << '\n';
    }
}

}  // namespace distdelay
