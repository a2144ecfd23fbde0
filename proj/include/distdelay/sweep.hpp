#pragma once

#include "distdelay/analysis.hpp"
#include "distdelay/config.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace distdelay {

using SweepPoint = std::map<std::string, double>;

// Cartesian product of the axes in row-major order (last axis fastest, axes
// sorted by name). Missing nicholson axes default to delta = a = 1; missing
// mackey_glass axes default to b = 1. Throws ConfigError on an empty or
// unknown axis.
std::vector<SweepPoint> sweep_points(const SweepBlock& sweep);

StabilityReport point_report(const std::string& model, const SweepPoint& point);

// Reports in point order; `threads` workers pull indices from a shared counter.
std::vector<StabilityReport> run_sweep(const std::string& model, const std::vector<SweepPoint>& points,
                                       std::size_t threads);

std::vector<std::string> sweep_columns(const std::string& model);
void write_sweep_csv(std::ostream& os, const std::string& model, const std::vector<SweepPoint>& points,
                     const std::vector<StabilityReport>& reports);

}  // namespace distdelay
