#ifndef HELMNS_REPORT_IO_HPP
#define HELMNS_REPORT_IO_HPP

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "helmns/report.hpp"

namespace helmns::report_io {

using nlohmann::json;

/// Fixed-schema JSON for one check:
/// { name, passed, informational, tolerance, worst_sup, worst_l2,
///   masked_total, series_csv_path, notes }
inline json to_json(const CheckReport& rep, const std::string& seriesCsvPath) {
    json j;
    j["name"] = rep.name;
    j["passed"] = rep.passed;
    j["informational"] = rep.informational;
    j["tolerance"] = rep.tolerance;
    j["worst_sup"] = rep.worst_sup();
    j["worst_l2"] = rep.worst_l2();
    j["masked_total"] = rep.masked_total;
    j["series_csv_path"] = seriesCsvPath;
    j["notes"] = rep.applicable ? rep.notes : ("not applicable; " + rep.notes);
    return j;
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Residual time series as CSV: t, sup, l2, masked.
inline void write_series_csv(const CheckReport& rep, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "t,sup,l2,masked\n";
    for (const auto& r : rep.residuals)
        os << format_double(r.t) << ',' << format_double(r.sup) << ',' << format_double(r.l2)
           << ',' << r.masked << '\n';
    if (!os) throw std::runtime_error("write failed for " + path);
}

inline void write_json(const json& j, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << j.dump(2) << '\n';
    if (!os) throw std::runtime_error("write failed for " + path);
}

}  // namespace helmns::report_io

#endif  // HELMNS_REPORT_IO_HPP
