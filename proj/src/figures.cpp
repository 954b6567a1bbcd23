#include "rabi/figures.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

namespace rabi {

namespace {

SweepConfig base(Knob varied, LinearGrid grid, std::vector<double> alphas, MethodSet methods) {
    SweepConfig cfg;
    cfg.varied = varied;
    cfg.xi1_grid = grid;
    cfg.alphas = std::move(alphas);
    cfg.fixed = ModelParams{1.0, 1.0, 1.0, declared_unit(varied)};
    cfg.methods = methods;
    return cfg;
}

const std::vector<double> kCouplingAlphas = {1.2, 1.4, 1.6, 1.8, 2.0};
const std::vector<double> kFrequencyAlphas = {0.75, 0.80, 0.85, 0.90, 0.95};

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParameterError("cannot write " + path.string());
    out << text;
    if (!out) throw ParameterError("write failed for " + path.string());
}

}  // namespace

std::vector<std::string> figure_ids() {
    return {"fig1", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10"};
}

bool is_figure_id(std::string_view id) {
    const auto ids = figure_ids();
    return std::find(ids.begin(), ids.end(), id) != ids.end();
}

SweepConfig figure_config(std::string_view id) {
    if (id == "fig3" || id == "fig4" || id == "fig5") {
        return base(Knob::Coupling, {0.05, 1.45, 50}, kCouplingAlphas, MethodSet::Both);
    }
    if (id == "fig6" || id == "fig7" || id == "fig8") {
        return base(Knob::Resonator, {0.55, 10.0, 190}, kFrequencyAlphas, MethodSet::Both);
    }
    if (id == "fig9" || id == "fig10") {
        return base(Knob::Tls, {0.55, 5.95, 109}, kFrequencyAlphas, MethodSet::Exact);
    }
    if (id == "fig1") throw ParameterError("fig1 is a spectrum table, not a cycle sweep");
    throw ParameterError("unknown figure id '" + std::string(id) + "'");
}

SpectrumTable spectrum_dataset(int points_per_block) {
    if (points_per_block < 2) throw ParameterError("spectrum dataset needs at least two points per block");
    struct Block {
        Knob knob;
        LinearGrid grid;
    };
    const Block blocks[] = {
        {Knob::Coupling, {0.0, 3.0, points_per_block}},
        {Knob::Resonator, {0.25, 4.0, points_per_block}},
        {Knob::Tls, {0.0, 6.0, points_per_block}},
    };
    SpectrumTable table;
    for (const Block& b : blocks) {
        const ModelParams fixed{1.0, 1.0, 1.0, declared_unit(b.knob)};
        for (Method m : {Method::ExactNumeric, Method::Approximate}) {
            for (double x : b.grid.points()) {
                const LevelPair lp = levels(fixed.with(b.knob, x), m);
                if (!lp.converged) {
                    throw ConvergenceError("spectrum dataset point did not converge");
                }
                table.rows.push_back({b.knob, m, x, lp.e0, lp.e1, level_gap(lp)});
            }
        }
    }
    return table;
}

std::string to_csv(const SpectrumTable& table) {
    std::string out = "block,method,xi,e0,e1,gap\n";
    for (const SpectrumRow& r : table.rows) {
        out += to_string(r.block);
        out += ',';
        out += to_string(r.method);
        for (double v : {r.xi, r.e0, r.e1, r.gap}) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

std::string write_figure(std::string_view id, const std::string& out_dir, unsigned threads) {
    if (!is_figure_id(id)) throw ParameterError("unknown figure id '" + std::string(id) + "'");
    std::filesystem::create_directories(out_dir);
    const auto path = std::filesystem::path(out_dir) / (std::string(id) + ".csv");
    if (id == "fig1") {
        write_file(path, to_csv(spectrum_dataset()));
    } else {
        SweepOptions opts;
        opts.threads = threads;
        write_file(path, to_csv(run_sweep(figure_config(id), opts)));
    }
    return path.string();
}

}  // namespace rabi
