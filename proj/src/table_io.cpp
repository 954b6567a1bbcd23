#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "rabi/sweep.hpp"

namespace rabi {

namespace {

using json = nlohmann::ordered_json;

Method parse_method(std::string_view text) {
    if (text == "exact") return Method::ExactNumeric;
    if (text == "approx") return Method::Approximate;
    throw ParameterError("unknown method '" + std::string(text) + "' in table");
}

Knob parse_varied(std::string_view text) {
    try {
        return parse_knob(text);
    } catch (const ConfigError&) {
        throw ParameterError("unknown knob '" + std::string(text) + "' in table");
    }
}

std::string optional_field(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

std::optional<double> parse_optional(std::string_view text) {
    if (text.empty()) return std::nullopt;
    return parse_double(text);
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        fields.push_back(line.substr(pos, comma - pos));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return fields;
}

std::optional<double> json_optional(const json& row, const char* key) {
    const json& v = row.at(key);
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
}

json optional_json(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

}  // namespace

std::string format_double(double x) {
    if (!std::isfinite(x)) throw ParameterError("non-finite value cannot be serialized");
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) throw ParameterError("number formatting failed");
    return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw ParameterError("malformed number '" + std::string(text) + "'");
    }
    return v;
}

std::string to_csv(const SweepTable& table) {
    std::string out;
    for (std::size_t i = 0; i < SweepTable::header.size(); ++i) {
        if (i) out += ',';
        out += SweepTable::header[i];
    }
    out += '\n';
    for (const SweepRow& r : table.rows) {
        out += to_string(r.varied);
        out += ',';
        out += to_string(r.method);
        for (const std::string& f :
             {format_double(r.xi1), format_double(r.alpha), optional_field(r.xi2), optional_field(r.xi3),
              optional_field(r.xi4), optional_field(r.q_in), optional_field(r.q_out),
              optional_field(r.w_total), optional_field(r.eta)}) {
            out += ',';
            out += f;
        }
        out += r.dsc_flag ? ",1," : ",0,";
        out += r.status;
        out += '\n';
    }
    return out;
}

SweepTable parse_csv(std::string_view text) {
    SweepTable table;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        const auto f = split_csv_line(line);
        if (f.size() != SweepTable::header.size()) {
            throw ParameterError("CSV line " + std::to_string(line_no) + ": expected " +
                                 std::to_string(SweepTable::header.size()) + " fields");
        }
        if (line_no == 1) {
            for (std::size_t i = 0; i < f.size(); ++i) {
                if (f[i] != SweepTable::header[i]) throw ParameterError("CSV header mismatch");
            }
            continue;
        }
        SweepRow r;
        r.varied = parse_varied(f[0]);
        r.method = parse_method(f[1]);
        r.xi1 = parse_double(f[2]);
        r.alpha = parse_double(f[3]);
        r.xi2 = parse_optional(f[4]);
        r.xi3 = parse_optional(f[5]);
        r.xi4 = parse_optional(f[6]);
        r.q_in = parse_optional(f[7]);
        r.q_out = parse_optional(f[8]);
        r.w_total = parse_optional(f[9]);
        r.eta = parse_optional(f[10]);
        if (f[11] != "0" && f[11] != "1") throw ParameterError("dsc_flag must be 0 or 1");
        r.dsc_flag = f[11] == "1";
        r.status = std::string(f[12]);
        table.rows.push_back(std::move(r));
    }
    if (line_no == 0) throw ParameterError("CSV is empty");
    return table;
}

std::string to_json(const SweepTable& table) {
    json arr = json::array();
    for (const SweepRow& r : table.rows) {
        json o;
        o["varied"] = std::string(to_string(r.varied));
        o["method"] = std::string(to_string(r.method));
        o["xi1"] = r.xi1;
        o["alpha"] = r.alpha;
        o["xi2"] = optional_json(r.xi2);
        o["xi3"] = optional_json(r.xi3);
        o["xi4"] = optional_json(r.xi4);
        o["q_in"] = optional_json(r.q_in);
        o["q_out"] = optional_json(r.q_out);
        o["w_total"] = optional_json(r.w_total);
        o["eta"] = optional_json(r.eta);
        o["dsc_flag"] = r.dsc_flag;
        o["status"] = r.status;
        arr.push_back(std::move(o));
    }
    return arr.dump(1) + "\n";
}

SweepTable parse_json(std::string_view text) {
    json arr;
    try {
        arr = json::parse(text);
    } catch (const json::exception& e) {
        throw ParameterError(std::string("malformed JSON table: ") + e.what());
    }
    if (!arr.is_array()) throw ParameterError("JSON table must be an array");
    SweepTable table;
    try {
        for (const json& o : arr) {
            SweepRow r;
            r.varied = parse_varied(o.at("varied").get<std::string>());
            r.method = parse_method(o.at("method").get<std::string>());
            r.xi1 = o.at("xi1").get<double>();
            r.alpha = o.at("alpha").get<double>();
            r.xi2 = json_optional(o, "xi2");
            r.xi3 = json_optional(o, "xi3");
            r.xi4 = json_optional(o, "xi4");
            r.q_in = json_optional(o, "q_in");
            r.q_out = json_optional(o, "q_out");
            r.w_total = json_optional(o, "w_total");
            r.eta = json_optional(o, "eta");
            r.dsc_flag = o.at("dsc_flag").get<bool>();
            r.status = o.at("status").get<std::string>();
            table.rows.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw ParameterError(std::string("malformed JSON row: ") + e.what());
    }
    return table;
}

std::string serialize(const SweepTable& table, TableFormat format) {
    return format == TableFormat::Csv ? to_csv(table) : to_json(table);
}

}  // namespace rabi
