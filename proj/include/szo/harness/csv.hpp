#pragma once

#include <szo/core.hpp>
#include <szo/regret.hpp>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace szo::harness {

inline constexpr std::string_view kTraceHeader =
    "algo,seed,queries_used,f_iterate,simple_regret,cum_regret_iter,cum_regret_query";

class SchemaMismatch : public Error {
  public:
    using Error::Error;
};

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw SchemaMismatch("malformed number '" + std::string(s) + "'");
    return v;
}

struct TraceRecord {
    std::string algo;
    std::uint64_t seed = 0;
    RegretRow row;
};

inline std::string trace_csv(std::string_view algo, std::uint64_t seed, const RegretTrace& trace) {
    std::string out(kTraceHeader);
    out += '\n';
    for (const auto& r : trace) {
        out += algo;
        out += ',' + std::to_string(seed);
        out += ',' + std::to_string(r.queries_used);
        out += ',' + format_double(r.f_iterate);
        out += ',' + format_double(r.simple_regret);
        out += ',' + format_double(r.cum_regret_iter);
        out += ',' + format_double(r.cum_regret_query);
        out += '\n';
    }
    return out;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw Error("failed writing '" + path + "'");
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::vector<TraceRecord> read_trace_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(f, line)) throw SchemaMismatch(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTraceHeader) throw SchemaMismatch(path + ": unexpected header '" + line + "'");

    std::vector<TraceRecord> rows;
    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != 7)
            throw SchemaMismatch(path + ":" + std::to_string(lineno) + ": expected 7 columns");
        TraceRecord rec;
        rec.algo = std::string(cells[0]);
        try {
            rec.seed = std::stoull(std::string(cells[1]));
            rec.row.queries_used = std::stoll(std::string(cells[2]));
        } catch (const std::exception&) {
            throw SchemaMismatch(path + ":" + std::to_string(lineno) + ": malformed integer");
        }
        rec.row.f_iterate = parse_double(cells[3]);
        rec.row.simple_regret = parse_double(cells[4]);
        rec.row.cum_regret_iter = parse_double(cells[5]);
        rec.row.cum_regret_query = parse_double(cells[6]);
        rows.push_back(std::move(rec));
    }
    return rows;
}

}  // namespace szo::harness
