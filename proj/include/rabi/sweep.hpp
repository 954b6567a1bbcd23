#pragma once

// Grid sweeps over (xi1, alpha, method) and their tabular serialization.
//
// CSV header:
//   varied,method,xi1,alpha,xi2,xi3,xi4,q_in,q_out,w_total,eta,dsc_flag,status
// Floats are written as shortest round-trip decimals; absent values are empty
// fields (null in JSON). dsc_flag is 0/1 in CSV and a boolean in JSON. status
// is "ok" or "error:<stage>:<kind>". xi1 is always the raw knob value.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rabi/config.hpp"
#include "rabi/cycle.hpp"

namespace rabi {

struct SweepRow {
    Knob varied = Knob::Coupling;
    Method method = Method::ExactNumeric;
    double xi1 = 0.0;
    double alpha = 0.0;
    std::optional<double> xi2;
    std::optional<double> xi3;
    std::optional<double> xi4;
    std::optional<double> q_in;
    std::optional<double> q_out;
    std::optional<double> w_total;
    std::optional<double> eta;
    bool dsc_flag = false;
    std::string status = "ok";

    bool ok() const { return status == "ok"; }
    bool operator==(const SweepRow&) const = default;
};

/// Table order: method (exact first), then alpha, then xi1.
bool row_order(const SweepRow& a, const SweepRow& b);

struct SweepTable {
    static constexpr std::array<std::string_view, 13> header = {
        "varied", "method", "xi1", "alpha", "xi2", "xi3", "xi4",
        "q_in", "q_out", "w_total", "eta", "dsc_flag", "status"};

    std::vector<SweepRow> rows;

    std::size_t ok_count() const;
    bool operator==(const SweepTable&) const = default;
};

SweepRow ok_row(const CycleSpec& spec, const CycleResult& r);
SweepRow error_row(const CycleSpec& spec, std::string_view stage, std::string_view kind);

/// One cycle evaluated into a row; library errors become error rows.
SweepRow evaluate_point(const CycleSpec& spec);

struct SweepOptions {
    unsigned threads = 0;                    // 0: take it from the config
    std::optional<std::uint64_t> order_seed; // shuffles the evaluation order
};

/// Evaluates every (xi1, alpha, method) point concurrently and returns the
/// rows sorted with row_order. The result does not depend on thread count or
/// evaluation order.
SweepTable run_sweep(const SweepConfig& config, const SweepOptions& options = {});

/// Shortest decimal that parses back to the same double.
std::string format_double(double x);
double parse_double(std::string_view text);

std::string to_csv(const SweepTable& table);
SweepTable parse_csv(std::string_view text);
std::string to_json(const SweepTable& table);
SweepTable parse_json(std::string_view text);
std::string serialize(const SweepTable& table, TableFormat format);

}  // namespace rabi
