#include "housing/report.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "housing/csv.hpp"

namespace housing {

CoverageReport coverage(const EnsembleSummary& summary, std::span<const double> actual) {
    CoverageReport rep;
    const int n = std::min(summary.months, static_cast<int>(actual.size()));
    if (n <= 0) return rep;
    rep.months = n;
    int in_minmax = 0, in_one = 0, in_two = 0;
    for (int m = 0; m < n; ++m) {
        const std::size_t i = static_cast<std::size_t>(m);
        const double a = actual[i];
        if (a >= summary.min[i] && a <= summary.max[i]) ++in_minmax;
        if (a >= summary.mean[i] - summary.sd[i] && a <= summary.mean[i] + summary.sd[i])
            ++in_one;
        if (a >= summary.mean[i] - 2.0 * summary.sd[i] &&
            a <= summary.mean[i] + 2.0 * summary.sd[i])
            ++in_two;
    }
    rep.minmax = static_cast<double>(in_minmax) / n;
    rep.one_sd = static_cast<double>(in_one) / n;
    rep.two_sd = static_cast<double>(in_two) / n;
    return rep;
}

AreaRegression area_regression(std::span<const double> actual_by_area,
                               std::span<const double> predicted_by_area) {
    if (actual_by_area.size() != predicted_by_area.size())
        throw std::invalid_argument("area_regression: series lengths differ");
    AreaRegression reg;
    reg.actual.assign(actual_by_area.begin(), actual_by_area.end());
    reg.predicted.assign(predicted_by_area.begin(), predicted_by_area.end());
    reg.fit = ols_fit(reg.actual, reg.predicted);
    return reg;
}

MobilityReport mobility_report(std::span<const SimulationTrace> traces, const Scenario& scn,
                               MoverKind kind) {
    const int n_areas = scn.n_areas();
    MobilityReport rep;
    rep.kind = kind;

    // Order areas by their end-of-period median price, averaged over runs.
    std::vector<double> final_median(static_cast<std::size_t>(n_areas), 0.0);
    int counted = 0;
    for (const SimulationTrace& tr : traces) {
        if (tr.months.empty()) continue;
        ++counted;
        const MonthRow& last = tr.months.back();
        for (int a = 0; a < n_areas; ++a)
            final_median[static_cast<std::size_t>(a)] +=
                last.areas[static_cast<std::size_t>(a)].median_price;
    }
    if (counted > 0)
        for (double& v : final_median) v /= counted;
    rep.area_order.resize(static_cast<std::size_t>(n_areas));
    for (int a = 0; a < n_areas; ++a) rep.area_order[static_cast<std::size_t>(a)] = a;
    std::stable_sort(rep.area_order.begin(), rep.area_order.end(), [&](int a, int b) {
        return final_median[static_cast<std::size_t>(a)] < final_median[static_cast<std::size_t>(b)];
    });
    std::vector<int> position(static_cast<std::size_t>(n_areas));
    for (int row = 0; row < n_areas; ++row) {
        position[static_cast<std::size_t>(rep.area_order[static_cast<std::size_t>(row)])] = row;
        rep.labels.push_back(
            scn.area_names[static_cast<std::size_t>(rep.area_order[static_cast<std::size_t>(row)])]);
    }

    rep.inflow.assign(static_cast<std::size_t>(n_areas), 0.0);
    rep.matrix.assign(static_cast<std::size_t>(n_areas),
                      std::vector<double>(static_cast<std::size_t>(n_areas), 0.0));

    // Each move counts 1 / (destination population that month), damping the
    // mechanical pull of big areas; the grand total is then normalized to 1.
    double total = 0.0;
    for (const SimulationTrace& tr : traces) {
        for (const MovementRecord& mv : tr.moves) {
            if (mv.kind != kind) continue;
            if (mv.to_area < 0 || mv.to_area >= n_areas) continue;
            if (mv.month < 0 || mv.month >= static_cast<int>(tr.months.size())) continue;
            const AreaMonth& dest =
                tr.months[static_cast<std::size_t>(mv.month)].areas[static_cast<std::size_t>(mv.to_area)];
            const double w = 1.0 / std::max(1, dest.households);
            const int drow = position[static_cast<std::size_t>(mv.to_area)];
            rep.inflow[static_cast<std::size_t>(drow)] += w;
            if (mv.from_area >= 0 && mv.from_area < n_areas) {
                const int orow = position[static_cast<std::size_t>(mv.from_area)];
                rep.matrix[static_cast<std::size_t>(orow)][static_cast<std::size_t>(drow)] += w;
            }
            total += w;
            ++rep.moves;
        }
    }
    if (rep.moves == 0 || total <= 0.0) {
        rep.empty = true;
        return rep;
    }
    for (double& v : rep.inflow) v /= total;
    for (std::vector<double>& row : rep.matrix)
        for (double& v : row) v /= total;
    return rep;
}

void write_coverage_json(const CoverageReport& cov, const AreaRegression& reg,
                         const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open report file: " + path);
    out << "{\n  \"coverage\": {\"months\": " << cov.months
        << ", \"minmax\": " << fmt_double(cov.minmax) << ", \"one_sd\": " << fmt_double(cov.one_sd)
        << ", \"two_sd\": " << fmt_double(cov.two_sd) << "},\n";
    out << "  \"area_regression\": {\"slope\": " << fmt_double(reg.fit.slope)
        << ", \"intercept\": " << fmt_double(reg.fit.intercept)
        << ", \"r_squared\": " << fmt_double(reg.fit.r_squared) << ", \"areas\": ["
        << "\n";
    for (std::size_t i = 0; i < reg.actual.size(); ++i) {
        out << "    {\"actual\": " << fmt_double(reg.actual[i])
            << ", \"predicted\": " << fmt_double(reg.predicted[i]) << "}"
            << (i + 1 < reg.actual.size() ? "," : "") << "\n";
    }
    out << "  ]}\n}\n";
}

void write_mobility_csv(const MobilityReport& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open report file: " + path);
    out << "# mobility report, areas ordered by end-of-period median price\n";
    out << "origin,destination,weight\n";
    const std::size_t n = rep.labels.size();
    for (std::size_t row = 0; row < n; ++row)
        out << "outside," << rep.labels[row] << "," << fmt_double(rep.inflow[row]) << "\n";
    for (std::size_t o = 0; o < n; ++o)
        for (std::size_t d = 0; d < n; ++d)
            out << rep.labels[o] << "," << rep.labels[d] << ","
                << fmt_double(rep.matrix[o][d]) << "\n";
}

} // namespace housing
