#pragma once

/**
 * @file csv.hpp
 * @brief Trace CSV serialization: fixed header, 9-significant-digit decimal
 *        formatting, locale-independent, atomic file writes.
 */

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "csf/errors.hpp"
#include "csf/scenario.hpp"
#include "csf/trace.hpp"

namespace csf {

inline constexpr const char* kTraceCsvHeader = "t_min,pressure_mmH2O";

/// 9 significant digits, shortest decimal form ("%.9g").
inline std::string format_sig9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline std::string trace_to_csv(const PressureTrace& trace) {
    trace.validate();
    std::string out = kTraceCsvHeader;
    out += '\n';
    for (std::size_t i = 0; i < trace.size(); ++i) {
        out += format_sig9(trace.times[i]);
        out += ',';
        out += format_sig9(trace.pressures[i]);
        out += '\n';
    }
    return out;
}

/// Figures may carry several value columns (all traces share the time grid).
inline std::string figure_to_csv(const FigureData& fig) {
    std::string out;
    for (std::size_t c = 0; c < fig.columns.size(); ++c) {
        if (c) out += ',';
        out += fig.columns[c];
    }
    out += '\n';
    const auto& times = fig.traces.front().times;
    for (std::size_t i = 0; i < times.size(); ++i) {
        out += format_sig9(times[i]);
        for (const auto& tr : fig.traces) {
            out += ',';
            out += format_sig9(tr.pressures[i]);
        }
        out += '\n';
    }
    return out;
}

/// Parse a two-column trace CSV. Malformed rows and non-increasing time
/// columns raise ConfigParseError with the line number.
inline PressureTrace parse_trace_csv(const std::string& text, const std::string& source_name) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    PressureTrace trace;
    trace.provenance = Provenance::external;
    trace.scenario_id = source_name;

    if (!std::getline(in, line))
        throw ConfigParseError(source_name + ": empty trace file", 1);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("t_min,", 0) != 0)
        throw ConfigParseError(source_name + ": expected header starting with 't_min,', got '" +
                                   line + "'",
                               lineno);

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ConfigParseError(source_name + ": expected 't,value' row", lineno);
        char* end = nullptr;
        const std::string tf = line.substr(0, comma);
        const std::string pf = line.substr(comma + 1);
        const double t = std::strtod(tf.c_str(), &end);
        if (end == tf.c_str() || *end != '\0')
            throw ConfigParseError(source_name + ": bad time value '" + tf + "'", lineno);
        const double p = std::strtod(pf.c_str(), &end);
        if (end == pf.c_str() || *end != '\0')
            throw ConfigParseError(source_name + ": bad pressure value '" + pf + "'", lineno);
        if (!trace.times.empty() && !(t > trace.times.back()))
            throw ConfigParseError(source_name + ": time column not strictly increasing", lineno);
        trace.times.push_back(t);
        trace.pressures.push_back(p);
    }
    trace.validate();
    return trace;
}

inline PressureTrace read_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open trace file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_trace_csv(ss.str(), path.filename().string());
}

/// Write via a temporary file in the same directory, then rename into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw std::runtime_error("rename to " + path.string() + " failed: " + ec.message());
}

}  // namespace csf
