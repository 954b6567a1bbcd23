// rabicycle: spectrum, single cycles, sweeps and figure datasets.
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration or usage error,
// 3 sweep in which every point failed.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "rabi/config.hpp"
#include "rabi/cycle.hpp"
#include "rabi/figures.hpp"
#include "rabi/spectrum.hpp"
#include "rabi/sweep.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSweepFailed = 3;

rabi::Method parse_single_method(const std::string& text) {
    if (text == "exact") return rabi::Method::ExactNumeric;
    if (text == "approx") return rabi::Method::Approximate;
    throw rabi::ConfigError("unknown method '" + text + "' (exact | approx)", 0, "method");
}

void print_number(std::ostream& os, const char* key, double v) {
    os << key << " = " << rabi::format_double(v) << '\n';
}

int run_spectrum(double g, double omega, double big_omega, const std::string& method,
                 std::optional<int> nmax) {
    const rabi::ModelParams p{g, omega, big_omega, rabi::EnergyUnit::TlsFrequency};
    p.validate();
    const rabi::Method m = parse_single_method(method);
    rabi::LevelPair lp;
    if (m == rabi::Method::ExactNumeric && nmax) {
        lp = rabi::exact_levels_at_cutoff(p, *nmax);
    } else {
        lp = rabi::levels(p, m);
    }
    std::cout << "method = " << rabi::to_string(m) << '\n';
    print_number(std::cout, "e0", lp.e0);
    print_number(std::cout, "e1", lp.e1);
    print_number(std::cout, "gap", rabi::level_gap(lp));
    if (m == rabi::Method::ExactNumeric) {
        std::cout << "n_used = " << lp.n_used << '\n'
                  << "converged = " << (lp.converged ? "true" : "false") << '\n'
                  << "parity0 = " << lp.parity0 << '\n'
                  << "parity1 = " << lp.parity1 << '\n';
    }
    return 0;
}

int run_single_cycle(const std::string& varied, double xi1, double alpha, const std::string& method,
                     double g, double omega, double big_omega) {
    rabi::CycleSpec spec;
    spec.varied = rabi::parse_knob(varied);
    spec.xi1 = xi1;
    spec.alpha = alpha;
    spec.method = parse_single_method(method);
    spec.fixed = rabi::ModelParams{g, omega, big_omega, rabi::declared_unit(spec.varied)};
    const rabi::CycleResult r = rabi::run_cycle(spec);
    std::cout << "varied = " << rabi::to_string(spec.varied) << '\n'
              << "method = " << rabi::to_string(spec.method) << '\n'
              << "unit = " << rabi::to_string(spec.fixed.unit) << '\n';
    const char* names[] = {"xi1", "xi2", "xi3", "xi4"};
    for (int i = 0; i < 4; ++i) print_number(std::cout, names[i], r.xi[i]);
    print_number(std::cout, "q_in", r.q_in);
    print_number(std::cout, "q_out", r.q_out);
    print_number(std::cout, "w_total", r.w_total);
    print_number(std::cout, "eta", r.eta);
    print_number(std::cout, "w_adiabat_23", r.w_adiabatic[0]);
    print_number(std::cout, "w_adiabat_41", r.w_adiabatic[1]);
    std::cout << "dsc_flag = " << (r.flags.dsc_threshold ? 1 : 0) << '\n'
              << "near_degenerate = " << (r.flags.near_degenerate ? 1 : 0) << '\n';
    return 0;
}

int run_sweep_command(const std::string& config_path, const std::string& format_override) {
    rabi::SweepConfig cfg = rabi::load_config(config_path);
    if (!format_override.empty()) cfg.format = rabi::parse_format(format_override);
    const rabi::SweepTable table = rabi::run_sweep(cfg);
    const std::string text = rabi::serialize(table, cfg.format);
    if (cfg.output.empty()) {
        std::cout << text;
    } else {
        std::filesystem::path out = cfg.output;
        if (out.is_relative()) out = std::filesystem::path(config_path).parent_path() / out;
        std::ofstream f(out, std::ios::binary);
        if (!f || !(f << text)) {
            std::cerr << "error: cannot write " << out.string() << '\n';
            return kExitRuntime;
        }
    }
    const std::size_t ok = table.ok_count();
    std::cerr << ok << " of " << table.rows.size() << " points closed\n";
    return (ok == 0 && !table.rows.empty()) ? kExitSweepFailed : 0;
}

int run_figure(const std::string& id, const std::string& out_dir) {
    if (!rabi::is_figure_id(id)) {
        std::cerr << "error: unknown figure id '" << id << "'\n";
        return kExitConfig;
    }
    std::cout << rabi::write_figure(id, out_dir) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Isoenergetic cycle on the quantum Rabi model"};
    app.require_subcommand(1);

    double g = 1.0;
    double omega = 1.0;
    double big_omega = 1.0;
    std::string method = "exact";

    auto* spectrum = app.add_subcommand("spectrum", "Two lowest levels at one parameter point");
    std::optional<int> nmax;
    spectrum->add_option("--g", g, "Coupling strength")->required();
    spectrum->add_option("--omega", omega, "Resonator frequency")->required();
    spectrum->add_option("--bigomega", big_omega, "TLS frequency")->required();
    spectrum->add_option("--method", method, "exact | approx")->capture_default_str();
    spectrum->add_option("--nmax", nmax, "Fixed boson cutoff (skips the adaptive loop)");

    auto* cycle = app.add_subcommand("cycle", "One closed cycle");
    std::string varied;
    double xi1 = 0.0;
    double alpha = 0.0;
    cycle->add_option("--varied", varied, "g | omega | bigomega")->required();
    cycle->add_option("--xi1", xi1, "Starting value of the varied parameter")->required();
    cycle->add_option("--alpha", alpha, "Adiabat ratio xi3 / xi2")->required();
    cycle->add_option("--method", method, "exact | approx")->capture_default_str();
    cycle->add_option("--g", g, "Held coupling")->capture_default_str();
    cycle->add_option("--omega", omega, "Held resonator frequency")->capture_default_str();
    cycle->add_option("--bigomega", big_omega, "Held TLS frequency")->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "Grid sweep from a configuration file");
    std::string config_path;
    std::string format;
    sweep->add_option("--config", config_path, "Configuration file")->required();
    sweep->add_option("--format", format, "csv | json (overrides the config)");

    auto* figure = app.add_subcommand("figure", "Write a preset figure dataset");
    std::string figure_id;
    std::string out_dir = ".";
    figure->add_option("id", figure_id, "fig1, fig3 .. fig10")->required();
    figure->add_option("--out", out_dir, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*spectrum) return run_spectrum(g, omega, big_omega, method, nmax);
        if (*cycle) return run_single_cycle(varied, xi1, alpha, method, g, omega, big_omega);
        if (*sweep) return run_sweep_command(config_path, format);
        if (*figure) return run_figure(figure_id, out_dir);
    } catch (const rabi::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const rabi::Error& e) {
        std::cerr << "error (" << rabi::to_string(e.kind()) << "): " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
