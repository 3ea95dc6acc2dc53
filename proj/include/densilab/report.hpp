#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "densilab/engine.hpp"
#include "densilab/experiments.hpp"

// Artifact layer: JSON reports, versioned CSV tables, and PBM space-time
// rasters. Everything here is deterministic given the inputs; wall-clock
// metadata lives only under the report's "timing" subtree so consumers can
// drop it before comparing runs.

namespace densilab {

using Json = nlohmann::json;

inline constexpr const char* kReportFormat = "densilab-report v1";
inline constexpr const char* kCsvFormat = "# densilab-csv v1";
inline constexpr const char* kIntervalMethod = "wilson z=1.96";

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// Rows joined with commas under the versioned header line. Cells must not
// contain commas or newlines; table content here never does.
inline std::string csv_document(
    const std::vector<std::string>& columns,
    const std::vector<std::vector<std::string>>& rows) {
    std::string out = kCsvFormat;
    out += '\n';
    const auto append_row = [&](const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    append_row(columns);
    for (const auto& row : rows) {
        if (row.size() != columns.size())
            throw std::invalid_argument("csv_document: ragged row");
        append_row(row);
    }
    return out;
}

struct Raster {
    int64_t width = 0;
    int64_t height = 0;
    std::vector<uint8_t> cells; // row-major, 0 or 1

    uint8_t at(int64_t i, int64_t j) const {
        return cells[size_t(j * width + i)];
    }
};

// P1 text raster: '1' renders black. One digit row per line.
inline std::string to_pbm(const Raster& r) {
    if (r.width < 1 || r.height < 1 ||
        int64_t(r.cells.size()) != r.width * r.height)
        throw std::invalid_argument("to_pbm: malformed raster");
    for (uint8_t c : r.cells)
        if (c > 1) throw std::invalid_argument("to_pbm: cell outside {0,1}");
    std::string out = "P1\n" + std::to_string(r.width) + " " +
                      std::to_string(r.height) + "\n";
    for (int64_t j = 0; j < r.height; ++j) {
        for (int64_t i = 0; i < r.width; ++i)
            out += char('0' + r.at(i, j));
        out += '\n';
    }
    return out;
}

// Space-time diagram of one ring trajectory: steps+1 rows, oldest first.
// Paired-tape rules stack the full second-tape block under the first.
inline Raster spacetime_raster(const TopologyPtr& topo, const Rule& rule,
                               double p, int64_t steps, uint64_t master_seed) {
    if (topo->kind() != TopologyKind::ring)
        throw std::invalid_argument("spacetime_raster: ring topology required");
    if (steps < 0)
        throw std::invalid_argument("spacetime_raster: negative step count");
    require_open_probability(p, "spacetime_raster");
    const int64_t n = topo->cell_count();
    Engine eng(topo, rule);
    Rng rng = replica_rng(master_seed, 0);
    Coin coin = replica_coin(master_seed, 0);
    const bool paired = rule.id == RuleId::two_tape;
    Raster r;
    r.width = n;
    r.height = (steps + 1) * (paired ? 2 : 1);
    r.cells.assign(size_t(r.width * r.height), 0);
    const auto emit = [&](const Configuration& cfg, int64_t row) {
        for (int64_t k = 0; k < n; ++k)
            r.cells[size_t(row * n + k)] = uint8_t(cfg.get(k));
    };
    Configuration x(topo), y(topo);
    sample_bernoulli(x, p, rng);
    if (!paired) {
        emit(x, 0);
        for (int64_t t = 1; t <= steps; ++t) {
            eng.step(x, y, rule.uses_coin ? &coin : nullptr);
            std::swap(x, y);
            emit(x, t);
        }
        return r;
    }
    Configuration x2(topo), y2(topo);
    sample_bernoulli(x2, 0.5, rng);
    emit(x, 0);
    emit(x2, steps + 1);
    for (int64_t t = 1; t <= steps; ++t) {
        eng.step_pair(x, x2, y, y2);
        std::swap(x, y);
        std::swap(x2, y2);
        emit(x, t);
        emit(x2, steps + 1 + t);
    }
    return r;
}

inline Json interval_json(const Interval& iv) {
    return Json{{"lo", iv.lo}, {"hi", iv.hi}};
}

inline Json q_estimate_json(const QEstimate& est) {
    return Json{{"samples", est.samples},
                {"good", est.good},
                {"wrong_uniform", est.wrong_uniform},
                {"stuck_orbit", est.stuck_orbit},
                {"out_of_budget", est.out_of_budget},
                {"ties_resampled", est.ties_resampled},
                {"settle_steps_total", est.settle_steps_total},
                {"q", est.q()},
                {"ci95", interval_json(est.ci())}};
}

inline Json err_curve_json(const std::vector<ErrPoint>& curve) {
    Json rows = Json::array();
    for (const ErrPoint& pt : curve)
        rows.push_back(Json{{"k", pt.k},
                            {"trials", pt.trials},
                            {"failures", pt.failures},
                            {"defined", pt.defined},
                            {"err", pt.err()},
                            {"ci95", interval_json(pt.ci())}});
    return rows;
}

inline Json convergence_json(const ConvergenceReport& rep) {
    Json out{{"replicas", rep.replicas},
             {"reached_target", rep.reached_target},
             {"reached_opposite", rep.reached_opposite},
             {"unresolved", rep.unresolved},
             {"settle_steps_total", rep.settle_steps_total},
             {"target_fraction", rep.target_fraction()},
             {"ci95", interval_json(rep.target_ci())}};
    if (!rep.root_ones_by_step.empty())
        out["root_ones_by_step"] = rep.root_ones_by_step;
    return out;
}

inline Json invariance_json(const std::vector<InvarianceCheck>& ledger) {
    Json rows = Json::array();
    for (const InvarianceCheck& c : ledger)
        rows.push_back(Json{{"tag", c.tag},
                            {"name", c.name},
                            {"rule", rule_name(c.rule)},
                            {"pass", c.pass},
                            {"witness", c.witness}});
    return rows;
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    if (in.bad()) throw std::runtime_error("read failed for " + path.string());
    return content;
}

} // namespace densilab
