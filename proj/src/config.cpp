#include "rabi/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace rabi {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct Entry {
    std::string value;
    int line = 0;
};

[[noreturn]] void semantic(const std::string& key, const std::string& message, int line = 0) {
    throw ConfigError("config key '" + key + "': " + message, line, key);
}

std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> parts;
    if (trim(s).empty()) return parts;
    std::size_t pos = 0;
    while (true) {
        const auto comma = s.find(',', pos);
        parts.push_back(trim(s.substr(pos, comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return parts;
}

double number(const std::string& key, std::string_view text, int line) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty() || !std::isfinite(v)) {
        semantic(key, "'" + std::string(text) + "' is not a finite number", line);
    }
    return v;
}

long long integer(const std::string& key, std::string_view text, int line) {
    long long v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty()) {
        semantic(key, "'" + std::string(text) + "' is not an integer", line);
    }
    return v;
}

const std::map<std::string, bool>& known_keys() {
    static const std::map<std::string, bool> keys = {
        {"varied", true},  {"xi1_grid", true}, {"alphas", true},      {"g", false},
        {"omega", false},  {"bigomega", false}, {"method", false},    {"n_max", false},
        {"growth_step", false}, {"tol", false}, {"hard_cap", false},  {"output", false},
        {"format", false}, {"threads", false},
    };
    return keys;
}

std::string_view knob_key(Knob k) {
    switch (k) {
        case Knob::Coupling: return "g";
        case Knob::Resonator: return "omega";
        case Knob::Tls: return "bigomega";
    }
    return "?";
}

}  // namespace

std::string_view to_string(MethodSet m) {
    switch (m) {
        case MethodSet::Exact: return "exact";
        case MethodSet::Approximate: return "approx";
        case MethodSet::Both: return "both";
    }
    return "?";
}

std::string_view to_string(TableFormat f) {
    return f == TableFormat::Csv ? "csv" : "json";
}

Knob parse_knob(std::string_view text) {
    if (text == "g") return Knob::Coupling;
    if (text == "omega") return Knob::Resonator;
    if (text == "bigomega") return Knob::Tls;
    throw ConfigError("unknown knob '" + std::string(text) + "' (g | omega | bigomega)", 0, "varied");
}

MethodSet parse_method_set(std::string_view text) {
    if (text == "exact") return MethodSet::Exact;
    if (text == "approx") return MethodSet::Approximate;
    if (text == "both") return MethodSet::Both;
    throw ConfigError("unknown method '" + std::string(text) + "' (exact | approx | both)", 0, "method");
}

TableFormat parse_format(std::string_view text) {
    if (text == "csv") return TableFormat::Csv;
    if (text == "json") return TableFormat::Json;
    throw ConfigError("unknown format '" + std::string(text) + "' (csv | json)", 0, "format");
}

std::vector<double> LinearGrid::points() const {
    std::vector<double> xs;
    if (count <= 0) return xs;
    xs.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        if (i + 1 == count) {
            xs.push_back(stop);
        } else {
            xs.push_back(start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1));
        }
    }
    return xs;
}

std::vector<Method> SweepConfig::method_list() const {
    switch (methods) {
        case MethodSet::Exact: return {Method::ExactNumeric};
        case MethodSet::Approximate: return {Method::Approximate};
        case MethodSet::Both: return {Method::ExactNumeric, Method::Approximate};
    }
    return {};
}

CycleSpec SweepConfig::cycle_spec(Method method, double xi1, double alpha) const {
    CycleSpec spec;
    spec.varied = varied;
    spec.xi1 = xi1;
    spec.alpha = alpha;
    spec.fixed = fixed;
    spec.fixed.unit = declared_unit(varied);
    spec.method = method;
    spec.policy = policy;
    return spec;
}

void SweepConfig::validate() const {
    if (xi1_grid.count < 2) semantic("xi1_grid", "count must be at least 2");
    if (!std::isfinite(xi1_grid.start) || !std::isfinite(xi1_grid.stop) ||
        !(xi1_grid.stop > xi1_grid.start)) {
        semantic("xi1_grid", "grid must be finite and strictly increasing");
    }
    if (varied == Knob::Coupling ? xi1_grid.start < 0.0 : !(xi1_grid.start > 0.0)) {
        semantic("xi1_grid", varied == Knob::Coupling ? "g must be >= 0" : "frequencies must be > 0");
    }
    if (alphas.empty()) semantic("alphas", "at least one alpha is required");
    for (double a : alphas) {
        if (!std::isfinite(a)) semantic("alphas", "alpha must be finite");
        if (varied == Knob::Coupling && !(a >= 1.0)) {
            semantic("alphas", "alpha must be >= 1 when varied = g (the coupling must increase)");
        }
        if (varied != Knob::Coupling && !(a > 0.0 && a <= 1.0)) {
            semantic("alphas", "alpha must lie in (0, 1] when varied = " + std::string(knob_key(varied)));
        }
    }
    for (Knob k : {Knob::Coupling, Knob::Resonator, Knob::Tls}) {
        if (k == varied) continue;
        const double v = fixed.get(k);
        const bool ok = std::isfinite(v) && (k == Knob::Resonator ? v > 0.0 : v >= 0.0);
        if (!ok) {
            semantic(std::string(knob_key(k)),
                     k == Knob::Resonator ? "must be > 0" : "must be >= 0");
        }
    }
    if (varied == Knob::Tls && methods != MethodSet::Exact) {
        semantic("method", "only exact levels are supported when varied = bigomega");
    }
    try {
        policy.validate();
    } catch (const Error& e) {
        semantic("n_max", e.what());
    }
}

SweepConfig parse_config(std::string_view text) {
    std::map<std::string, Entry> entries;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'", line_no, "");
        }
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": missing key before '='", line_no, "");
        }
        if (key.find_first_of(" \t") != std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": key contains whitespace", line_no, key);
        }
        if (!known_keys().count(key)) semantic(key, "unknown key", line_no);
        if (entries.count(key)) semantic(key, "duplicate key", line_no);
        entries[key] = Entry{std::string(trim(line.substr(eq + 1))), line_no};
    }

    for (const auto& [key, required] : known_keys()) {
        if (required && !entries.count(key)) semantic(key, "missing required key");
    }

    SweepConfig cfg;
    cfg.fixed = ModelParams{1.0, 1.0, 1.0, EnergyUnit::TlsFrequency};
    auto wrap = [&](const std::string& key, auto&& fn) {
        const Entry& e = entries.at(key);
        try {
            fn(e);
        } catch (const ConfigError& err) {
            if (err.line() != 0) throw;
            throw ConfigError(err.what(), e.line, key);
        }
    };

    wrap("varied", [&](const Entry& e) { cfg.varied = parse_knob(e.value); });
    wrap("xi1_grid", [&](const Entry& e) {
        const auto parts = split_list(e.value);
        if (parts.size() != 3) semantic("xi1_grid", "expected 'start, stop, count'", e.line);
        cfg.xi1_grid.start = number("xi1_grid", parts[0], e.line);
        cfg.xi1_grid.stop = number("xi1_grid", parts[1], e.line);
        const long long n = integer("xi1_grid", parts[2], e.line);
        if (n < 2 || n > 1'000'000) semantic("xi1_grid", "count must be in [2, 1000000]", e.line);
        cfg.xi1_grid.count = static_cast<int>(n);
    });
    wrap("alphas", [&](const Entry& e) {
        for (auto part : split_list(e.value)) cfg.alphas.push_back(number("alphas", part, e.line));
    });
    for (Knob k : {Knob::Coupling, Knob::Resonator, Knob::Tls}) {
        const std::string key(knob_key(k));
        if (!entries.count(key)) continue;
        wrap(key, [&](const Entry& e) {
            if (k == cfg.varied) semantic(key, "the varied parameter cannot be held fixed", e.line);
            cfg.fixed = cfg.fixed.with(k, number(key, e.value, e.line));
        });
    }
    if (entries.count("method")) wrap("method", [&](const Entry& e) { cfg.methods = parse_method_set(e.value); });
    auto int_key = [&](const char* key, int& target) {
        if (!entries.count(key)) return;
        wrap(key, [&](const Entry& e) {
            const long long v = integer(key, e.value, e.line);
            if (v < 0 || v > kMaxCutoff) semantic(key, "out of range", e.line);
            target = static_cast<int>(v);
        });
    };
    int_key("n_max", cfg.policy.n_max);
    int_key("growth_step", cfg.policy.growth_step);
    int_key("hard_cap", cfg.policy.hard_cap);
    if (entries.count("tol")) wrap("tol", [&](const Entry& e) { cfg.policy.tol = number("tol", e.value, e.line); });
    if (entries.count("output")) cfg.output = entries.at("output").value;
    if (entries.count("format")) wrap("format", [&](const Entry& e) { cfg.format = parse_format(e.value); });
    if (entries.count("threads")) {
        wrap("threads", [&](const Entry& e) {
            const long long v = integer("threads", e.value, e.line);
            if (v < 0 || v > 1024) semantic("threads", "must be in [0, 1024]", e.line);
            cfg.threads = static_cast<unsigned>(v);
        });
    }

    cfg.fixed.unit = declared_unit(cfg.varied);
    auto line_of = [&](const char* key) { return entries.count(key) ? entries.at(key).line : 0; };
    const TruncationPolicy& pol = cfg.policy;
    if (pol.n_max < 1) semantic("n_max", "must be >= 1", line_of("n_max"));
    if (pol.growth_step < 1) semantic("growth_step", "must be >= 1", line_of("growth_step"));
    if (!(pol.tol > 0.0)) semantic("tol", "must be > 0", line_of("tol"));
    if (pol.hard_cap < pol.n_max) semantic("hard_cap", "must be >= n_max", line_of("hard_cap"));
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(e.what(), line_of(e.key().c_str()), e.key());
    }
    return cfg;
}

SweepConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string(), 0, "");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace rabi
