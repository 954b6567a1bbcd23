#pragma once

// Preset datasets for the figure set fig1, fig3 .. fig10.
//
// fig1 is a spectrum table (two lowest levels against each knob) with header
//   block,method,xi,e0,e1,gap
// fig3 .. fig10 are cycle sweeps in the SweepTable schema. Grids are dense
// reconstructions over the plotted ranges.

#include <string>
#include <string_view>
#include <vector>

#include "rabi/config.hpp"
#include "rabi/sweep.hpp"

namespace rabi {

std::vector<std::string> figure_ids();
bool is_figure_id(std::string_view id);

/// Sweep configuration behind fig3 .. fig10. Throws ParameterError for
/// fig1 and for unknown ids.
SweepConfig figure_config(std::string_view id);

struct SpectrumRow {
    Knob block = Knob::Coupling;
    Method method = Method::ExactNumeric;
    double xi = 0.0;
    double e0 = 0.0;
    double e1 = 0.0;
    double gap = 0.0;
};

struct SpectrumTable {
    std::vector<SpectrumRow> rows;
};

/// Two lowest levels against g (omega = Omega = 1), omega (g = Omega = 1)
/// and Omega (g = omega = 1), for both methods.
SpectrumTable spectrum_dataset(int points_per_block = 121);
std::string to_csv(const SpectrumTable& table);

/// Writes <out_dir>/<id>.csv and returns the path.
std::string write_figure(std::string_view id, const std::string& out_dir, unsigned threads = 0);

}  // namespace rabi
