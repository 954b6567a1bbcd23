#pragma once

// Sweep configuration: a flat `key = value` document.
//
//   # comment (whole line or trailing)
//   varied    = g | omega | bigomega        (required)
//   xi1_grid  = start, stop, count          (required, linear, count >= 2)
//   alphas    = a1, a2, ...                 (required, non-empty)
//   g, omega, bigomega = value              (held parameters, default 1;
//                                            the varied one may not be set)
//   method    = exact | approx | both       (default exact)
//   n_max, growth_step, tol, hard_cap       (truncation policy overrides)
//   output    = path                        (default: standard output)
//   format    = csv | json                  (default csv)
//   threads   = count                       (default: hardware concurrency)
//
// Keys may appear once each. Syntax errors carry the line number; semantic
// errors carry the offending key.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rabi/cycle.hpp"

namespace rabi {

enum class MethodSet { Exact, Approximate, Both };
enum class TableFormat { Csv, Json };

std::string_view to_string(MethodSet m);
std::string_view to_string(TableFormat f);

struct LinearGrid {
    double start = 0.0;
    double stop = 0.0;
    int count = 0;

    /// count points from start to stop inclusive; the last point is exactly stop.
    std::vector<double> points() const;
};

struct SweepConfig {
    Knob varied = Knob::Coupling;
    LinearGrid xi1_grid;
    std::vector<double> alphas;
    ModelParams fixed;  // the varied component is ignored
    MethodSet methods = MethodSet::Exact;
    TruncationPolicy policy;
    std::string output;  // empty: standard output
    TableFormat format = TableFormat::Csv;
    unsigned threads = 0;  // 0: hardware concurrency

    /// Throws ConfigError naming the offending key.
    void validate() const;
    std::vector<Method> method_list() const;
    CycleSpec cycle_spec(Method method, double xi1, double alpha) const;
};

/// Parses and validates a configuration document.
SweepConfig parse_config(std::string_view text);
SweepConfig load_config(const std::filesystem::path& path);

Knob parse_knob(std::string_view text);
MethodSet parse_method_set(std::string_view text);
TableFormat parse_format(std::string_view text);

}  // namespace rabi
