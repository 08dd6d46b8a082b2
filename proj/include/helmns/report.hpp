#ifndef HELMNS_REPORT_HPP
#define HELMNS_REPORT_HPP

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

namespace helmns {

struct ResidualSample {
    double t = 0.0;
    double sup = 0.0;
    double l2 = 0.0;
    std::size_t masked = 0;
};

/// Outcome of one named check: residual time series, pass/fail against a
/// tolerance, masked-point accounting, free-text notes. Informational
/// checks report without gating; inapplicable checks say so explicitly.
struct CheckReport {
    std::string name;
    bool passed = true;
    bool informational = false;
    bool applicable = true;
    double tolerance = 0.0;
    std::vector<ResidualSample> residuals;
    std::size_t masked_total = 0;
    std::string notes;

    void record(double t, double sup, double l2, std::size_t masked = 0) {
        residuals.push_back({t, sup, l2, masked});
        masked_total += masked;
    }

    double worst_sup() const {
        double w = 0.0;
        for (const auto& r : residuals) w = std::max(w, r.sup);
        return w;
    }

    double worst_l2() const {
        double w = 0.0;
        for (const auto& r : residuals) w = std::max(w, r.l2);
        return w;
    }

    /// passed <=> every recorded sup residual is within tolerance.
    void settle() { passed = worst_sup() <= tolerance; }

    void note(const std::string& line) {
        if (!notes.empty()) notes += "; ";
        notes += line;
    }
};

}  // namespace helmns

#endif  // HELMNS_REPORT_HPP
