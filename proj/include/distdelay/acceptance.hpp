#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace distdelay::acceptance {

struct Options {
    // Multiplies every numeric tolerance; values below 1 tighten the suite.
    double tol_scale = 1.0;
    // Comma-separated criterion numbers or name substrings; empty runs all.
    std::string filter;
    // Worker count for the threshold sweep.
    std::size_t threads = 0;
};

struct Result {
    int id;
    std::string name;
    bool pass;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
};

const std::vector<Criterion>& criteria();

bool selected(const Criterion& c, const std::string& filter);

// Runs the selected criteria, printing one line per criterion to `out` as
// each finishes (when non-null).
std::vector<Result> run(const Options& opts, std::ostream* out = nullptr);

std::string format_line(const Result& r);

}  // namespace distdelay::acceptance
