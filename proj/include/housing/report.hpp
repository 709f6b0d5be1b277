#pragma once

#include <span>
#include <string>
#include <vector>

#include "housing/engine.hpp"
#include "housing/scenario.hpp"
#include "housing/stats.hpp"

namespace housing {

/// Fraction of months where the observed series falls inside each ensemble
/// band, over the overlap of the two lengths.
struct CoverageReport {
    int months = 0;
    double minmax = 0.0;
    double one_sd = 0.0;
    double two_sd = 0.0;
};

CoverageReport coverage(const EnsembleSummary& summary, std::span<const double> actual);

/// Cross-sectional fit of simulated against observed end-of-period area
/// prices. A well calibrated run sits near slope 1, intercept 0.
struct AreaRegression {
    OlsFit fit;
    std::vector<double> actual;    // per area
    std::vector<double> predicted; // per area
};

AreaRegression area_regression(std::span<const double> actual_by_area,
                               std::span<const double> predicted_by_area);

/// Where movers of one kind settle, scaled by the destination's population in
/// the month of the move and normalized to total 1. Areas are ordered by
/// their end-of-period median price, cheapest first. First-time buyers carry
/// an origin, so they fill the full origin x destination matrix; the other
/// kinds arrive from outside and only fill the destination vector.
struct MobilityReport {
    MoverKind kind = MoverKind::NewRenter;
    std::vector<int> area_order;     // scenario area index per ordered row
    std::vector<std::string> labels; // names in ordered position
    std::vector<double> inflow;      // per ordered destination
    std::vector<std::vector<double>> matrix; // ordered origin x destination
    int moves = 0;
    bool empty = false; // no recorded movements of this kind
};

MobilityReport mobility_report(std::span<const SimulationTrace> traces, const Scenario& scn,
                               MoverKind kind);

void write_coverage_json(const CoverageReport& cov, const AreaRegression& reg,
                         const std::string& path);
void write_mobility_csv(const MobilityReport& rep, const std::string& path);

} // namespace housing
