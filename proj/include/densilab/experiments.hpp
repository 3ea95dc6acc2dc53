#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "densilab/config.hpp"
#include "densilab/engine.hpp"
#include "densilab/rng.hpp"
#include "densilab/rules.hpp"
#include "densilab/stats.hpp"
#include "densilab/topology.hpp"

// Statistical harness: classification quality Q(n), the error curve err(k/n)
// and its binomially weighted aggregate E(n), exact invariant-orbit checks,
// and convergence experiments across topologies. Every estimator derives its
// replica streams from a master seed, so reports are reproducible
// bit-for-bit.

namespace densilab {

// Stream 2r feeds configuration sampling of replica r, stream 2r+1 its coin
// flips; derive_stream_seed keeps the pairs disjoint across replicas.
inline Rng replica_rng(uint64_t master_seed, int64_t replica) {
    return Rng(derive_stream_seed(master_seed, uint64_t(2 * replica)));
}

inline Coin replica_coin(uint64_t master_seed, int64_t replica) {
    return Coin(derive_stream_seed(master_seed, uint64_t(2 * replica + 1)));
}

inline void require_open_probability(double p, const char* what) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument(std::string(what) +
                                    ": probability must lie in (0,1)");
}

// Splits [0, count) into contiguous chunks and runs them on `jobs` threads.
// Every estimator derives replica outcomes from (master_seed, index) alone
// and merges associatively, so the degree never changes a result.
inline void parallel_chunks(
    int64_t count, int jobs,
    const std::function<void(int64_t, int64_t, int)>& body) {
    if (jobs < 1) throw std::invalid_argument("parallel_chunks: jobs < 1");
    const int workers = int(std::min<int64_t>(jobs, std::max<int64_t>(count, 1)));
    if (workers == 1) {
        body(0, count, 0);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(size_t(workers));
    for (int w = 0; w < workers; ++w) {
        const int64_t begin = count * w / workers;
        const int64_t end = count * (w + 1) / workers;
        pool.emplace_back([&body, begin, end, w] { body(begin, end, w); });
    }
    for (auto& t : pool) t.join();
}

struct QEstimate {
    int64_t samples = 0;
    int64_t good = 0;
    int64_t wrong_uniform = 0;
    int64_t stuck_orbit = 0;
    int64_t out_of_budget = 0;
    int64_t ties_resampled = 0;
    int64_t settle_steps_total = 0; // runs that reached a uniform state

    double q() const {
        return samples ? double(good) / double(samples) : 0.0;
    }
    Interval ci(double z = 1.96) const {
        return wilson_interval(good, samples, z);
    }
};

// Fraction of replicas absorbed at the uniform configuration matching the
// sampled majority. Exact-density ties are resampled and counted; budget
// exhaustion and non-uniform orbits count against Q.
inline QEstimate estimate_Q(const TopologyPtr& topo, const Rule& rule,
                            double p, int64_t samples, int64_t max_steps,
                            uint64_t master_seed,
                            std::vector<Verdict>* log = nullptr,
                            int jobs = 1) {
    require_open_probability(p, "estimate_Q");
    if (rule.id == RuleId::two_tape)
        throw std::invalid_argument(
            "estimate_Q: paired-tape rule needs convergence_experiment");
    const int64_t n = topo->cell_count();
    if (log) log->assign(size_t(samples), Verdict::out_of_budget);
    std::vector<QEstimate> parts(
        size_t(std::max<int64_t>(std::min<int64_t>(jobs, samples), 1)));
    parallel_chunks(samples, jobs, [&](int64_t begin, int64_t end, int w) {
        Engine eng(topo, rule);
        QEstimate& est = parts[size_t(w)];
        for (int64_t r = begin; r < end; ++r) {
            Rng rng = replica_rng(master_seed, r);
            Coin coin = replica_coin(master_seed, r);
            Configuration x(topo);
            sample_bernoulli(x, p, rng);
            while (2 * x.interior_ones() == n) {
                ++est.ties_resampled;
                sample_bernoulli(x, p, rng);
            }
            const int majority = 2 * x.interior_ones() > n ? 1 : 0;
            const RunResult res =
                run_sync(eng, std::move(x), rule.uses_coin ? &coin : nullptr,
                         max_steps);
            if (log) (*log)[size_t(r)] = res.verdict;
            switch (res.verdict) {
            case Verdict::uniform_zero:
            case Verdict::uniform_one: {
                const int v = res.verdict == Verdict::uniform_one ? 1 : 0;
                (v == majority ? est.good : est.wrong_uniform) += 1;
                est.settle_steps_total += res.steps;
                break;
            }
            case Verdict::fixed_point:
            case Verdict::two_cycle:
                ++est.stuck_orbit;
                break;
            case Verdict::out_of_budget:
                ++est.out_of_budget;
                break;
            }
        }
    });
    QEstimate total;
    total.samples = samples;
    for (const QEstimate& part : parts) {
        total.good += part.good;
        total.wrong_uniform += part.wrong_uniform;
        total.stuck_orbit += part.stuck_orbit;
        total.out_of_budget += part.out_of_budget;
        total.ties_resampled += part.ties_resampled;
        total.settle_steps_total += part.settle_steps_total;
    }
    return total;
}

struct ErrPoint {
    int64_t k = 0;
    int64_t trials = 0;
    int64_t failures = 0;
    bool defined = true; // false at the exact-half density of an even ring

    double err() const {
        return trials ? double(failures) / double(trials) : 0.0;
    }
    Interval ci(double z = 1.96) const {
        return wilson_interval(failures, trials, z);
    }
    double variance() const {
        if (!trials) return 0.0;
        const double e = err();
        return std::max(e * (1.0 - e), 1.0 / double(trials)) / double(trials);
    }
};

// Misclassification probability at each exact density k/n, from initial
// configurations drawn uniformly among those with exactly k ones. Any
// non-absorbed or wrongly absorbed run is a failure.
inline std::vector<ErrPoint> estimate_err_curve(const TopologyPtr& topo,
                                                const Rule& rule,
                                                int64_t samples_per_k,
                                                int64_t max_steps,
                                                uint64_t master_seed,
                                                int jobs = 1) {
    if (rule.id == RuleId::two_tape)
        throw std::invalid_argument(
            "estimate_err_curve: paired-tape rule unsupported");
    const int64_t n = topo->cell_count();
    std::vector<ErrPoint> curve(size_t(n + 1));
    parallel_chunks(n + 1, jobs, [&](int64_t kbegin, int64_t kend, int) {
        Engine eng(topo, rule);
        for (int64_t k = kbegin; k < kend; ++k) {
            ErrPoint& pt = curve[size_t(k)];
            pt.k = k;
            pt.trials = samples_per_k;
            if (2 * k == n) {
                pt.defined = false;
                pt.failures = samples_per_k;
                continue;
            }
            const int target = 2 * k > n ? 1 : 0;
            const Verdict want =
                target ? Verdict::uniform_one : Verdict::uniform_zero;
            for (int64_t r = 0; r < samples_per_k; ++r) {
                const int64_t stream = k * samples_per_k + r;
                Rng rng = replica_rng(master_seed, stream);
                Coin coin = replica_coin(master_seed, stream);
                Configuration x(topo);
                sample_fixed_ones(x, k, rng);
                const RunResult res = run_sync(
                    eng, std::move(x), rule.uses_coin ? &coin : nullptr,
                    max_steps);
                pt.failures += res.verdict != want;
            }
        }
    });
    return curve;
}

// Binomially weighted aggregate of the error curve. Undefined points (the
// exact tie on even rings) are excluded and the remaining mass renormalised,
// mirroring the tie-resampling convention of estimate_Q.
inline double aggregate_E(const std::vector<ErrPoint>& curve, int64_t n,
                          double p) {
    require_open_probability(p, "aggregate_E");
    if (int64_t(curve.size()) != n + 1)
        throw std::invalid_argument("aggregate_E: curve must cover k = 0..n");
    double sum = 0.0, mass = 0.0;
    for (int64_t k = 0; k <= n; ++k) {
        const ErrPoint& pt = curve[size_t(k)];
        if (pt.k != k)
            throw std::invalid_argument("aggregate_E: curve rows out of order");
        if (!pt.defined) continue;
        const double w = binom_pmf(n, k, p);
        sum += w * pt.err();
        mass += w;
    }
    return sum / mass;
}

// Standard deviation of aggregate_E under the per-point sampling noise.
inline double aggregate_E_sigma(const std::vector<ErrPoint>& curve, int64_t n,
                                double p) {
    require_open_probability(p, "aggregate_E_sigma");
    if (int64_t(curve.size()) != n + 1)
        throw std::invalid_argument(
            "aggregate_E_sigma: curve must cover k = 0..n");
    double var = 0.0, mass = 0.0;
    for (int64_t k = 0; k <= n; ++k) {
        const ErrPoint& pt = curve[size_t(k)];
        if (!pt.defined) continue;
        const double w = binom_pmf(n, k, p);
        var += w * w * pt.variance();
        mass += w;
    }
    return std::sqrt(var) / mass;
}

// Copies layer `layer` of a product configuration onto its base topology.
inline Configuration extract_layer(const Configuration& cfg, int64_t layer) {
    const auto& topo = *cfg.topology();
    if (topo.kind() != TopologyKind::product)
        throw std::invalid_argument("extract_layer: product topology required");
    if (layer < 0 || layer >= topo.layers())
        throw std::invalid_argument("extract_layer: layer out of range");
    const TopologyPtr base = topo.base();
    const int64_t bc = base->cell_count();
    Configuration out(base);
    for (int64_t b = 0; b < bc; ++b) out.set(b, cfg.get(layer * bc + b));
    return out;
}

struct InvarianceCheck {
    std::string tag;  // "a" through "g"
    std::string name;
    RuleId rule = RuleId::identity;
    bool pass = true;
    std::string witness;
};

namespace detail {

inline constexpr uint64_t kSuiteSeed = 0x5eedfacade5157ULL;

inline void suite_fail(InvarianceCheck& c, const std::string& witness) {
    c.pass = false;
    if (c.witness.empty()) c.witness = witness;
}

// Fixedness of every configuration whose cells all agree with their North or
// East neighbor: stripes exhaust the single-direction families, random
// configurations probe the equivalence with the per-cell condition.
inline InvarianceCheck check_ne_paths() {
    InvarianceCheck c{"a", "north-east monochromatic paths fixed under toom",
                      RuleId::toom, true, ""};
    {
        auto topo = Topology::make_torus(16, 4);
        Engine eng(topo, make_rule(RuleId::toom, *topo));
        Configuration x(topo), y(topo);
        for (uint32_t f = 0; f < (uint32_t(1) << 16); ++f) {
            for (int64_t j = 0; j < 4; ++j)
                for (int64_t i = 0; i < 16; ++i)
                    x.set(j * 16 + i, int((f >> i) & 1));
            eng.step(x, y);
            if (!(y == x)) {
                suite_fail(c, "column stripe " + std::to_string(f) + " moved");
                break;
            }
        }
    }
    {
        auto topo = Topology::make_torus(4, 16);
        Engine eng(topo, make_rule(RuleId::toom, *topo));
        Configuration x(topo), y(topo);
        for (uint32_t f = 0; f < (uint32_t(1) << 16); ++f) {
            for (int64_t j = 0; j < 16; ++j)
                for (int64_t i = 0; i < 4; ++i)
                    x.set(j * 4 + i, int((f >> j) & 1));
            eng.step(x, y);
            if (!(y == x)) {
                suite_fail(c, "row stripe " + std::to_string(f) + " moved");
                break;
            }
        }
    }
    {
        auto topo = Topology::make_torus(8, 8);
        Engine eng(topo, make_rule(RuleId::toom, *topo));
        Rng rng(derive_stream_seed(kSuiteSeed, 1));
        Configuration x(topo), y(topo);
        for (int rep = 0; rep < 300 && c.pass; ++rep) {
            sample_bernoulli(x, 0.5, rng);
            eng.step(x, y);
            bool property = true;
            for (int64_t j = 0; j < 8 && property; ++j)
                for (int64_t i = 0; i < 8; ++i) {
                    const int v = x.get(j * 8 + i);
                    const int north = x.get(((j + 1) % 8) * 8 + i);
                    const int east = x.get(j * 8 + (i + 1) % 8);
                    if (v != north && v != east) {
                        property = false;
                        break;
                    }
                }
            if (property != (y == x))
                suite_fail(c, "per-cell condition and fixedness disagree on "
                              "sample " +
                                  std::to_string(rep));
        }
    }
    return c;
}

inline InvarianceCheck check_checkerboard() {
    InvarianceCheck c{"b", "checkerboard orbit under toom has period exactly 2",
                      RuleId::toom, true, ""};
    auto topo = Topology::make_torus(16, 16);
    Engine eng(topo, make_rule(RuleId::toom, *topo));
    Configuration x(topo), y(topo), z(topo);
    for (int64_t j = 0; j < 16; ++j)
        for (int64_t i = 0; i < 16; ++i) x.set(j * 16 + i, int((i + j) & 1));
    eng.step(x, y);
    eng.step(y, z);
    bool complemented = true;
    for (int64_t id = 0; id < topo->cell_count(); ++id)
        complemented = complemented && y.get(id) == 1 - x.get(id);
    if (!complemented) suite_fail(c, "first step is not the complement");
    if (y == x) suite_fail(c, "checkerboard is a fixed point");
    if (!(z == x)) suite_fail(c, "second step misses the original");
    return c;
}

inline InvarianceCheck check_gkl_words() {
    InvarianceCheck c{"c",
                      "every {001,011}-concatenation ring fixed under gkl",
                      RuleId::gkl, true, ""};
    for (int64_t n : {int64_t(9), int64_t(12), int64_t(15)}) {
        auto topo = Topology::make_ring(n);
        Engine eng(topo, make_rule(RuleId::gkl, *topo));
        Configuration x(topo), y(topo);
        const int64_t blocks = n / 3;
        for (uint32_t pick = 0; pick < (uint32_t(1) << blocks); ++pick) {
            for (int64_t b = 0; b < blocks; ++b) {
                const bool v = (pick >> b) & 1;
                x.set(3 * b + 0, 0);
                x.set(3 * b + 1, v ? 1 : 0);
                x.set(3 * b + 2, 1);
            }
            eng.step(x, y);
            if (!(y == x)) {
                suite_fail(c, "n=" + std::to_string(n) + " pick=" +
                                  std::to_string(pick) + " moved");
                break;
            }
        }
    }
    return c;
}

inline InvarianceCheck check_alternating_orbit() {
    InvarianceCheck c{"d",
                      "(01)-ring maps to (10)-ring under majority-traffic "
                      "and kari",
                      RuleId::majority_traffic, true, ""};
    const int64_t n = 100;
    auto topo = Topology::make_ring(n);
    Configuration x(topo);
    for (int64_t k = 0; k < n; ++k) x.set(k, int(k & 1));
    const auto is_complement = [&](const Configuration& y) {
        for (int64_t k = 0; k < n; ++k)
            if (y.get(k) != 1 - x.get(k)) return false;
        return true;
    };
    for (double alpha : {0.1, 0.37}) {
        const Rule rule = make_rule(RuleId::majority_traffic, *topo, alpha);
        Engine eng(topo, rule);
        Configuration y(topo);
        for (int64_t rep = 0; rep < 100; ++rep) {
            Coin coin(derive_stream_seed(kSuiteSeed, uint64_t(100 + rep)));
            eng.step(x, y, &coin);
            if (!is_complement(y)) {
                suite_fail(c, "majority-traffic stream " + std::to_string(rep) +
                                  " at alpha=" + std::to_string(alpha) +
                                  " broke the orbit");
                break;
            }
        }
        for (uint32_t g = 0; g < 8; ++g) {
            const int lo = eval_rule(rule, g, 0);
            const int hi = eval_rule(rule, g, ~uint32_t(0));
            if ((g == 0b010 || g == 0b101) && lo != hi)
                suite_fail(c, "branches disagree on alternating window " +
                                  std::to_string(g));
        }
    }
    {
        Engine eng(topo, make_rule(RuleId::kari, *topo));
        Configuration y(topo);
        eng.step(x, y);
        if (!is_complement(y)) suite_fail(c, "kari broke the orbit");
    }
    return c;
}

inline InvarianceCheck check_block_fixed() {
    InvarianceCheck c{"e", "2x2 one-block fixed under maj5", RuleId::maj5,
                      true, ""};
    auto topo = Topology::make_torus(16, 16);
    Engine eng(topo, make_rule(RuleId::maj5, *topo));
    Configuration x(topo), y(topo);
    x.fill(0);
    for (int64_t j = 7; j <= 8; ++j)
        for (int64_t i = 7; i <= 8; ++i) x.set(j * 16 + i, 1);
    eng.step(x, y);
    if (!(y == x)) suite_fail(c, "block moved after one step");
    return c;
}

inline InvarianceCheck check_tree_path() {
    InvarianceCheck c{"f", "bi-infinite path of ones fixed under maj5_tree",
                      RuleId::maj5_tree, true, ""};
    auto topo =
        Topology::make_tree(TreeFamily::free_group, 4, /*depth=*/6,
                            /*halo=*/1);
    Engine eng(topo, make_rule(RuleId::maj5_tree, *topo));
    Configuration x(topo);
    x.fill(0);
    for (const char* dir : {"a", "A"}) {
        int64_t id = 0;
        while (id >= 0) {
            x.set(id, 1);
            id = topo->resolve(id, Offset::word(dir));
        }
    }
    x.set(0, 1);
    Configuration y(topo);
    for (int step = 0; step < 5; ++step) {
        eng.step(x, y);
        if (!(y == x)) {
            suite_fail(c, "path moved at step " + std::to_string(step));
            break;
        }
        std::swap(x, y);
    }
    return c;
}

inline InvarianceCheck check_pattern_monotone() {
    InvarianceCheck c{"g",
                      "frequency of 100 non-increasing under majority-traffic",
                      RuleId::majority_traffic, true, ""};
    const int64_t n = 10000, steps = 50, replicas = 100;
    const double alpha = 0.1, p = 0.5;
    auto topo = Topology::make_ring(n);
    Engine eng(topo, make_rule(RuleId::majority_traffic, *topo, alpha));
    std::vector<std::vector<int64_t>> counts(
        size_t(replicas), std::vector<int64_t>(size_t(steps + 1), 0));
    for (int64_t r = 0; r < replicas; ++r) {
        Rng rng = replica_rng(kSuiteSeed, r);
        Coin coin = replica_coin(kSuiteSeed, r);
        Configuration x(topo), y(topo);
        sample_bernoulli(x, p, rng);
        counts[size_t(r)][0] = count_pattern(x, "100");
        for (int64_t t = 1; t <= steps; ++t) {
            eng.step(x, y, &coin);
            std::swap(x, y);
            counts[size_t(r)][size_t(t)] = count_pattern(x, "100");
        }
    }
    for (int64_t t = 0; t < steps && c.pass; ++t) {
        double mean = 0.0, m2 = 0.0;
        for (int64_t r = 0; r < replicas; ++r) {
            const double d = double(counts[size_t(r)][size_t(t + 1)] -
                                    counts[size_t(r)][size_t(t)]);
            const double delta = d - mean;
            mean += delta / double(r + 1);
            m2 += delta * (d - mean);
        }
        const double se =
            std::sqrt(m2 / double(replicas - 1) / double(replicas));
        if (mean > 3.0 * se)
            suite_fail(c, "frequency rose between steps " + std::to_string(t) +
                              " and " + std::to_string(t + 1));
    }
    return c;
}

} // namespace detail

// Runs the invariant-orbit checks named by their tags. Checks (a) through
// (f) are exact; (g) is statistical.
inline std::vector<InvarianceCheck> invariance_checks(
    const std::vector<std::string>& tags) {
    std::vector<InvarianceCheck> out;
    for (const std::string& tag : tags) {
        if (tag == "a") out.push_back(detail::check_ne_paths());
        else if (tag == "b") out.push_back(detail::check_checkerboard());
        else if (tag == "c") out.push_back(detail::check_gkl_words());
        else if (tag == "d") out.push_back(detail::check_alternating_orbit());
        else if (tag == "e") out.push_back(detail::check_block_fixed());
        else if (tag == "f") out.push_back(detail::check_tree_path());
        else if (tag == "g") out.push_back(detail::check_pattern_monotone());
        else
            throw std::invalid_argument("invariance_checks: unknown tag " +
                                        tag);
    }
    return out;
}

// Exact and statistical checks of the known invariant orbits, tagged (a)
// through (g). Pass a rule to keep only the checks concerning it.
inline std::vector<InvarianceCheck> invariance_suite(
    std::optional<RuleId> only = std::nullopt) {
    std::vector<InvarianceCheck> all =
        invariance_checks({"a", "b", "c", "d", "e", "f", "g"});
    if (!only) return all;
    std::vector<InvarianceCheck> filtered;
    for (auto& c : all)
        if (c.rule == *only ||
            (c.tag == "d" && *only == RuleId::kari))
            filtered.push_back(std::move(c));
    return filtered;
}

struct ConvergenceReport {
    int64_t replicas = 0;
    int64_t reached_target = 0;
    int64_t reached_opposite = 0;
    int64_t unresolved = 0;
    int64_t settle_steps_total = 0; // runs that reached either uniform state
    // Trees: root occupation counts after 0..max_steps synchronous steps.
    std::vector<int64_t> root_ones_by_step;

    double target_fraction() const {
        return replicas ? double(reached_target) / double(replicas) : 0.0;
    }
    Interval target_ci(double z = 1.96) const {
        return wilson_interval(reached_target, replicas, z);
    }
};

// Convergence toward the p-majority uniform configuration. Rings, tori and
// products run to absorption; paired-tape rules report the second tape's
// verdict; trees run exactly max_steps steps and record the root marginal,
// with the frozen halo sampled from the same Bernoulli(p) product measure.
inline ConvergenceReport convergence_experiment(const TopologyPtr& topo,
                                                const Rule& rule, double p,
                                                int64_t replicas,
                                                int64_t max_steps,
                                                uint64_t master_seed,
                                                int jobs = 1) {
    require_open_probability(p, "convergence_experiment");
    if (p == 0.5)
        throw std::invalid_argument(
            "convergence_experiment: p must pick a majority side");
    const int target = p > 0.5 ? 1 : 0;
    const bool tree = topo->kind() == TopologyKind::tree;
    std::vector<ConvergenceReport> parts(
        size_t(std::max<int64_t>(std::min<int64_t>(jobs, replicas), 1)));
    parallel_chunks(replicas, jobs, [&](int64_t begin, int64_t end, int w) {
        Engine eng(topo, rule);
        ConvergenceReport& rep = parts[size_t(w)];
        if (rule.id == RuleId::two_tape) {
            for (int64_t r = begin; r < end; ++r) {
                Rng rng = replica_rng(master_seed, r);
                Configuration t1(topo), t2(topo);
                sample_bernoulli(t1, p, rng);
                sample_bernoulli(t2, 0.5, rng);
                const TwoTapeResult res = run_two_tape(
                    eng, std::move(t1), std::move(t2), max_steps);
                if (res.verdict == Verdict::out_of_budget) {
                    ++rep.unresolved;
                    continue;
                }
                const int v = res.verdict == Verdict::uniform_one ? 1 : 0;
                (v == target ? rep.reached_target : rep.reached_opposite) +=
                    1;
                rep.settle_steps_total += res.steps;
            }
            return;
        }
        if (tree) {
            rep.root_ones_by_step.assign(size_t(max_steps + 1), 0);
            Configuration x(topo), y(topo);
            for (int64_t r = begin; r < end; ++r) {
                Rng rng = replica_rng(master_seed, r);
                Coin coin = replica_coin(master_seed, r);
                sample_bernoulli(x, p, rng);
                sample_halo_bernoulli(x, p, rng);
                rep.root_ones_by_step[0] += x.get(0);
                for (int64_t t = 1; t <= max_steps; ++t) {
                    eng.step(x, y, rule.uses_coin ? &coin : nullptr);
                    std::swap(x, y);
                    rep.root_ones_by_step[size_t(t)] += x.get(0);
                }
            }
            return;
        }
        for (int64_t r = begin; r < end; ++r) {
            Rng rng = replica_rng(master_seed, r);
            Coin coin = replica_coin(master_seed, r);
            Configuration x(topo);
            sample_bernoulli(x, p, rng);
            const RunResult res =
                run_sync(eng, std::move(x), rule.uses_coin ? &coin : nullptr,
                         max_steps);
            switch (res.verdict) {
            case Verdict::uniform_zero:
            case Verdict::uniform_one: {
                const int v = res.verdict == Verdict::uniform_one ? 1 : 0;
                (v == target ? rep.reached_target : rep.reached_opposite) +=
                    1;
                rep.settle_steps_total += res.steps;
                break;
            }
            default:
                ++rep.unresolved;
                break;
            }
        }
    });
    ConvergenceReport total;
    total.replicas = replicas;
    if (tree) total.root_ones_by_step.assign(size_t(max_steps + 1), 0);
    for (const ConvergenceReport& part : parts) {
        total.reached_target += part.reached_target;
        total.reached_opposite += part.reached_opposite;
        total.unresolved += part.unresolved;
        total.settle_steps_total += part.settle_steps_total;
        for (size_t t = 0; t < part.root_ones_by_step.size(); ++t)
            total.root_ones_by_step[t] += part.root_ones_by_step[t];
    }
    return total;
}

} // namespace densilab
