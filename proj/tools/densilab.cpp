#include <algorithm>
#include <chrono>
#include <clocale>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "densilab/analysis.hpp"
#include "densilab/report.hpp"

namespace {

using densilab::Json;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitValidation = 2;
constexpr int kExitInvariant = 3;

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void reject_unknown_keys(const Json& obj, const std::set<std::string>& known,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key()))
            throw ValidationError("unknown key \"" + where + it.key() +
                                  "\" in config");
}

int64_t positive_int(const Json& obj, const std::string& key) {
    const Json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<int64_t>() < 1)
        throw ValidationError("key \"" + key + "\" must be a positive integer");
    return v.get<int64_t>();
}

int64_t non_negative_int(const Json& obj, const std::string& key) {
    const Json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<int64_t>() < 0)
        throw ValidationError("key \"" + key +
                              "\" must be a non-negative integer");
    return v.get<int64_t>();
}

void require_keys(const Json& obj, const std::vector<std::string>& keys,
                  const std::string& where) {
    for (const auto& key : keys)
        if (!obj.contains(key))
            throw ValidationError("missing key \"" + where + key +
                                  "\" in config");
}

densilab::TopologyPtr topology_from_json(const Json& j,
                                         const std::string& where) {
    using namespace densilab;
    if (!j.is_object())
        throw ValidationError("\"" + where + "\" must be an object");
    require_keys(j, {"kind"}, where + ".");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "ring") {
        reject_unknown_keys(j, {"kind", "n"}, where + ".");
        require_keys(j, {"n"}, where + ".");
        return Topology::make_ring(positive_int(j, "n"));
    }
    if (kind == "torus") {
        reject_unknown_keys(j, {"kind", "width", "height"}, where + ".");
        require_keys(j, {"width", "height"}, where + ".");
        return Topology::make_torus(positive_int(j, "width"),
                                    positive_int(j, "height"));
    }
    if (kind == "tree") {
        reject_unknown_keys(j, {"kind", "family", "degree", "depth", "halo"},
                            where + ".");
        require_keys(j, {"family", "degree", "depth", "halo"}, where + ".");
        const std::string family = j.at("family").get<std::string>();
        TreeFamily fam;
        if (family == "involution")
            fam = TreeFamily::involution;
        else if (family == "free_group")
            fam = TreeFamily::free_group;
        else
            throw ValidationError(
                "key \"" + where +
                ".family\" must be \"involution\" or \"free_group\"");
        return Topology::make_tree(fam, int(positive_int(j, "degree")),
                                   int(non_negative_int(j, "depth")),
                                   int(positive_int(j, "halo")));
    }
    if (kind == "product") {
        reject_unknown_keys(j, {"kind", "base", "layers"}, where + ".");
        require_keys(j, {"base", "layers"}, where + ".");
        return Topology::make_product(
            topology_from_json(j.at("base"), where + ".base"),
            int(positive_int(j, "layers")));
    }
    throw ValidationError("key \"" + where + ".kind\" must be one of "
                          "ring, torus, tree, product");
}

std::string topology_label(const densilab::Topology& topo) {
    using namespace densilab;
    switch (topo.kind()) {
    case TopologyKind::ring:
        return "ring:" + std::to_string(topo.cell_count());
    case TopologyKind::torus2d:
        return "torus:" + std::to_string(topo.width()) + "x" +
               std::to_string(topo.height());
    case TopologyKind::tree:
        return std::string("tree:") +
               (topo.family() == TreeFamily::involution ? "involution"
                                                        : "free_group") +
               ":" + std::to_string(topo.degree()) + ":d" +
               std::to_string(topo.tree_depth()) + ":h" +
               std::to_string(topo.tree_halo());
    case TopologyKind::product:
        return "product:" + topology_label(*topo.base()) + ":x" +
               std::to_string(topo.layers());
    }
    return "?";
}

Json topology_echo_json(const densilab::Topology& topo) {
    using namespace densilab;
    switch (topo.kind()) {
    case TopologyKind::ring:
        return Json{{"kind", "ring"}, {"n", topo.cell_count()}};
    case TopologyKind::torus2d:
        return Json{{"kind", "torus"},
                    {"width", topo.width()},
                    {"height", topo.height()}};
    case TopologyKind::tree:
        return Json{{"kind", "tree"},
                    {"family", topo.family() == TreeFamily::involution
                                   ? "involution"
                                   : "free_group"},
                    {"degree", topo.degree()},
                    {"depth", topo.tree_depth()},
                    {"halo", topo.tree_halo()}};
    case TopologyKind::product:
        return Json{{"kind", "product"},
                    {"base", topology_echo_json(*topo.base())},
                    {"layers", topo.layers()}};
    }
    return Json{};
}

struct RuleSpec {
    densilab::RuleId id;
    double param = 0.0;
    bool has_param = false;
};

RuleSpec rule_from_config(const Json& cfg) {
    using namespace densilab;
    RuleSpec spec;
    const std::string name = cfg.at("rule").get<std::string>();
    spec.id = rule_from_name(name);
    const bool has_alpha = cfg.contains("alpha");
    const bool has_q = cfg.contains("q");
    if (has_alpha && spec.id != RuleId::majority_traffic)
        throw ValidationError(
            "key \"alpha\" only applies to rule majority_traffic");
    if (has_q && spec.id != RuleId::fuks)
        throw ValidationError("key \"q\" only applies to rule fuks");
    if (spec.id == RuleId::majority_traffic) {
        if (!has_alpha)
            throw ValidationError(
                "rule majority_traffic requires key \"alpha\"");
        spec.param = cfg.at("alpha").get<double>();
        spec.has_param = true;
    }
    if (spec.id == RuleId::fuks) {
        if (!has_q) throw ValidationError("rule fuks requires key \"q\"");
        spec.param = cfg.at("q").get<double>();
        spec.has_param = true;
    }
    return spec;
}

uint64_t resolve_seed(const std::optional<uint64_t>& flag,
                      const std::optional<uint64_t>& config_seed) {
    if (flag) return *flag;
    if (config_seed) return *config_seed;
    if (const char* env = std::getenv("DENSILAB_SEED")) {
        char* rest = nullptr;
        const unsigned long long v = std::strtoull(env, &rest, 10);
        if (!rest || *rest != '\0' || env == rest)
            throw ValidationError(
                "environment variable DENSILAB_SEED must be an unsigned "
                "integer");
        return uint64_t(v);
    }
    return 1;
}

Json timing_json(std::chrono::steady_clock::time_point started) {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      started)
            .count();
    char stamp[32];
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return Json{{"wall_seconds", wall}, {"written_utc", stamp}};
}

std::string parse_location(const std::string& text, size_t byte) {
    size_t line = 1, col = 1;
    for (size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

int cmd_run(const std::string& config_path,
            const std::optional<uint64_t>& seed_flag,
            const std::optional<int64_t>& samples_flag,
            const std::string& out_flag, int jobs) {
    using namespace densilab;
    const auto started = std::chrono::steady_clock::now();
    std::string text;
    try {
        text = read_text_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    Json cfg;
    try {
        cfg = Json::parse(text);
    } catch (const Json::parse_error& e) {
        std::cerr << "error: config is not valid JSON at "
                  << parse_location(text, e.byte) << ": " << e.what() << "\n";
        return kExitValidation;
    }
    if (!cfg.is_object()) {
        std::cerr << "error: config root must be a JSON object\n";
        return kExitValidation;
    }
    reject_unknown_keys(cfg,
                        {"experiment", "rule", "alpha", "q", "topology", "p",
                         "samples", "max_steps", "master_seed", "verdict_log",
                         "out"},
                        "");
    require_keys(cfg, {"experiment", "rule", "topology", "samples",
                       "max_steps"},
                 "");
    const std::string experiment = cfg.at("experiment").get<std::string>();
    const RuleSpec spec = rule_from_config(cfg);
    const TopologyPtr topo = topology_from_json(cfg.at("topology"), "topology");
    const Rule rule = make_rule(spec.id, *topo, spec.param);
    const int64_t samples =
        samples_flag ? *samples_flag : positive_int(cfg, "samples");
    if (samples < 1) throw ValidationError("--samples must be positive");
    const int64_t max_steps = non_negative_int(cfg, "max_steps");
    std::optional<uint64_t> config_seed;
    if (cfg.contains("master_seed")) {
        if (!cfg.at("master_seed").is_number_unsigned() &&
            !cfg.at("master_seed").is_number_integer())
            throw ValidationError("key \"master_seed\" must be an integer");
        config_seed = cfg.at("master_seed").get<uint64_t>();
    }
    const uint64_t master_seed = resolve_seed(seed_flag, config_seed);
    const bool want_log =
        cfg.contains("verdict_log") && cfg.at("verdict_log").get<bool>();
    const std::string out_dir = !out_flag.empty()
                                    ? out_flag
                                    : (cfg.contains("out")
                                           ? cfg.at("out").get<std::string>()
                                           : ".");

    double p = 0.0;
    const bool has_p = cfg.contains("p");
    if (has_p) p = cfg.at("p").get<double>();

    Json report{{"format", kReportFormat},
                {"experiment", experiment},
                {"interval_method", kIntervalMethod}};
    Json config_echo{{"rule", rule_name(spec.id)},
                     {"topology", topology_echo_json(*topo)},
                     {"samples", samples},
                     {"max_steps", max_steps},
                     {"master_seed", master_seed}};
    if (spec.id == RuleId::majority_traffic) config_echo["alpha"] = spec.param;
    if (spec.id == RuleId::fuks) config_echo["q"] = spec.param;
    if (has_p) config_echo["p"] = p;
    report["config"] = config_echo;

    const std::string label = topology_label(*topo);
    const std::string n_str = std::to_string(topo->cell_count());
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    if (experiment == "quality") {
        if (!has_p)
            throw ValidationError("experiment quality requires key \"p\"");
        std::vector<Verdict> log;
        const QEstimate est =
            estimate_Q(topo, rule, p, samples, max_steps, master_seed,
                       want_log ? &log : nullptr, jobs);
        report["results"] = q_estimate_json(est);
        if (want_log) {
            Json verdicts = Json::array();
            for (Verdict v : log) verdicts.push_back(verdict_name(v));
            report["results"]["verdict_log"] = std::move(verdicts);
        }
        columns = {"rule", "topology", "n", "p", "samples", "good",
                   "wrong_uniform", "stuck_orbit", "out_of_budget",
                   "ties_resampled", "q", "ci95_lo", "ci95_hi"};
        rows.push_back({rule_name(spec.id), label, n_str, format_double(p),
                        std::to_string(est.samples), std::to_string(est.good),
                        std::to_string(est.wrong_uniform),
                        std::to_string(est.stuck_orbit),
                        std::to_string(est.out_of_budget),
                        std::to_string(est.ties_resampled),
                        format_double(est.q()), format_double(est.ci().lo),
                        format_double(est.ci().hi)});
    } else if (experiment == "err_curve") {
        const auto curve =
            estimate_err_curve(topo, rule, samples, max_steps, master_seed,
                               jobs);
        report["results"] = Json{{"curve", err_curve_json(curve)}};
        if (has_p) {
            const int64_t n = topo->cell_count();
            report["results"]["aggregate"] =
                Json{{"p", p},
                     {"E", aggregate_E(curve, n, p)},
                     {"sigma", aggregate_E_sigma(curve, n, p)}};
        }
        columns = {"rule", "topology", "n", "k", "density", "trials",
                   "failures", "defined", "err", "ci95_lo", "ci95_hi"};
        for (const ErrPoint& pt : curve)
            rows.push_back(
                {rule_name(spec.id), label, n_str, std::to_string(pt.k),
                 format_double(double(pt.k) / double(topo->cell_count())),
                 std::to_string(pt.trials), std::to_string(pt.failures),
                 pt.defined ? "1" : "0", format_double(pt.err()),
                 format_double(pt.ci().lo), format_double(pt.ci().hi)});
    } else if (experiment == "convergence") {
        if (!has_p)
            throw ValidationError("experiment convergence requires key \"p\"");
        const ConvergenceReport rep = convergence_experiment(
            topo, rule, p, samples, max_steps, master_seed, jobs);
        report["results"] = convergence_json(rep);
        if (rep.root_ones_by_step.empty()) {
            columns = {"rule", "topology", "n", "p", "replicas",
                       "reached_target", "reached_opposite", "unresolved",
                       "target_fraction", "ci95_lo", "ci95_hi"};
            rows.push_back({rule_name(spec.id), label, n_str,
                            format_double(p), std::to_string(rep.replicas),
                            std::to_string(rep.reached_target),
                            std::to_string(rep.reached_opposite),
                            std::to_string(rep.unresolved),
                            format_double(rep.target_fraction()),
                            format_double(rep.target_ci().lo),
                            format_double(rep.target_ci().hi)});
        } else {
            columns = {"rule", "topology", "n", "p", "step", "root_ones",
                       "replicas", "root_fraction"};
            for (size_t t = 0; t < rep.root_ones_by_step.size(); ++t)
                rows.push_back(
                    {rule_name(spec.id), label, n_str, format_double(p),
                     std::to_string(t),
                     std::to_string(rep.root_ones_by_step[t]),
                     std::to_string(rep.replicas),
                     format_double(double(rep.root_ones_by_step[t]) /
                                   double(rep.replicas))});
        }
    } else {
        throw ValidationError(
            "key \"experiment\" must be one of quality, err_curve, "
            "convergence");
    }

    report["timing"] = timing_json(started);
    try {
        std::filesystem::create_directories(out_dir);
        write_text_file(std::filesystem::path(out_dir) / "report.json",
                        report.dump(2) + "\n");
        write_text_file(std::filesystem::path(out_dir) / "report.csv",
                        csv_document(columns, rows));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    std::cout << "report written to " << out_dir << "\n";
    return kExitOk;
}

int cmd_diagram(const std::string& rule_arg, int64_t n, double p,
                int64_t steps, const std::optional<uint64_t>& seed_flag,
                const std::string& out_path, std::optional<double> alpha,
                std::optional<double> q) {
    using namespace densilab;
    const RuleId id = rule_from_name(rule_arg);
    if (alpha && id != RuleId::majority_traffic)
        throw ValidationError(
            "--alpha only applies to rule majority_traffic");
    if (q && id != RuleId::fuks)
        throw ValidationError("--q only applies to rule fuks");
    double param = 0.0;
    if (id == RuleId::majority_traffic) {
        if (!alpha)
            throw ValidationError("rule majority_traffic requires --alpha");
        param = *alpha;
    }
    if (id == RuleId::fuks) {
        if (!q) throw ValidationError("rule fuks requires --q");
        param = *q;
    }
    const uint64_t seed = resolve_seed(seed_flag, std::nullopt);
    const TopologyPtr topo = Topology::make_ring(n);
    const Raster raster =
        spacetime_raster(topo, make_rule(id, *topo, param), p, steps, seed);
    try {
        write_text_file(out_path, to_pbm(raster));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    std::cout << "raster written to " << out_path << "\n";
    return kExitOk;
}

int cmd_suite() {
    using namespace densilab;
    bool all_pass = true;
    const auto report_line = [&](const std::string& tag, bool pass,
                                 const std::string& name,
                                 const std::string& witness) {
        std::cout << "[" << tag << "] " << (pass ? "PASS" : "FAIL") << " "
                  << name;
        if (!pass && !witness.empty()) std::cout << " (" << witness << ")";
        std::cout << "\n";
        all_pass = all_pass && pass;
    };
    for (const InvarianceCheck& c : invariance_suite())
        report_line(c.tag, c.pass, c.name, c.witness);

    {
        bool pass = true;
        std::string witness;
        Rng rng(90210);
        for (int rep = 0; rep < 20 && pass; ++rep) {
            Grid g(64, 64);
            const double p_one = rep % 2 ? 0.6 : 0.4;
            for (int64_t j = 0; j < 64; ++j)
                for (int64_t i = 0; i < 64; ++i)
                    g.set(i, j, rng.uniform() < p_one ? 1 : 0);
            pass = check_no_merge_split(g, &witness);
        }
        report_line("h", pass,
                    "cluster step neither merges nor splits (20 random "
                    "grids)",
                    witness);
    }
    {
        bool pass = true;
        std::string witness;
        for (int64_t w = 1; w <= 6 && pass; ++w)
            for (int64_t h = 1; h <= 6 && pass; ++h) {
                bool contained = false;
                if (erosion_steps(w, h, 100, &contained) != w + h - 1 ||
                    !contained) {
                    pass = false;
                    witness = std::to_string(w) + "x" + std::to_string(h);
                }
            }
        report_line("i", pass,
                    "rectangles erode in width+height-1 steps, staying "
                    "inside",
                    witness);
    }
    {
        bool pass = true;
        std::string witness;
        for (int64_t n = 4; n <= 10 && pass; ++n) {
            auto topo = Topology::make_ring(n);
            Engine eng(topo, make_rule(RuleId::traffic, *topo));
            Configuration x(topo), y(topo);
            for (uint64_t bits = 0; bits < (uint64_t(1) << n) && pass;
                 ++bits) {
                for (int64_t k = 0; k < n; ++k)
                    x.set(k, int((bits >> k) & 1));
                eng.step(x, y);
                if (recode_psi(y) != annihilation_step(recode_psi(x))) {
                    pass = false;
                    witness = "n=" + std::to_string(n) +
                              " bits=" + std::to_string(bits);
                }
            }
        }
        report_line("j", pass,
                    "traffic step equals one ballistic-annihilation step "
                    "after recoding",
                    witness);
    }
    {
        bool pass = true;
        std::string witness;
        const int want[8] = {0, 1, 0, 0, 0, 1, 1, 1};
        for (uint32_t g = 0; g < 8; ++g) {
            const int x = int(g & 1), y = int((g >> 1) & 1),
                      z = int((g >> 2) & 1);
            if (trafv(x, y, z) != want[g]) {
                pass = false;
                witness = "window " + std::to_string(g);
            }
        }
        report_line("k", pass, "traffic rule table matches the eight pinned "
                               "entries",
                    witness);
    }

    return all_pass ? kExitOk : kExitInvariant;
}

} // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");
    CLI::App app{"density classification lab: experiments, diagrams, and "
                 "invariant checks"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run",
                                   "run an experiment described by a JSON "
                                   "config");
    std::string config_path;
    run->add_option("--config", config_path, "path to the JSON config")
        ->required();
    std::optional<uint64_t> seed_flag;
    run->add_option("--seed", seed_flag,
                    "master seed override (highest precedence)");
    std::optional<int64_t> samples_flag;
    run->add_option("--samples", samples_flag, "sample count override");
    std::string out_flag;
    run->add_option("--out", out_flag, "output directory override");
    int jobs = int(std::max(1u, std::thread::hardware_concurrency()));
    run->add_option("--jobs", jobs, "replica fan-out degree")
        ->check(CLI::PositiveNumber);

    auto* diagram = app.add_subcommand("diagram",
                                       "write a space-time PBM raster of one "
                                       "ring trajectory");
    std::string rule_arg;
    diagram->add_option("--rule", rule_arg, "rule name")->required();
    int64_t n = 0;
    diagram->add_option("--n", n, "ring size")->required();
    double p = 0.5;
    diagram->add_option("--p", p, "initial density")->required();
    int64_t steps = 0;
    diagram->add_option("--steps", steps, "number of steps")->required();
    std::optional<uint64_t> diagram_seed;
    diagram->add_option("--seed", diagram_seed, "master seed");
    std::string out_path;
    diagram->add_option("--out", out_path, "output PBM path")->required();
    std::optional<double> alpha;
    diagram->add_option("--alpha", alpha, "majority-traffic mixing weight");
    std::optional<double> q;
    diagram->add_option("--q", q, "fuks traffic weight");

    auto* suite = app.add_subcommand("suite",
                                     "run the invariant-orbit and analysis "
                                     "property checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (run->parsed())
            return cmd_run(config_path, seed_flag, samples_flag, out_flag,
                           jobs);
        if (diagram->parsed())
            return cmd_diagram(rule_arg, n, p, steps, diagram_seed, out_path,
                               alpha, q);
        if (suite->parsed()) return cmd_suite();
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const Json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}
