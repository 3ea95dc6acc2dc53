#include <cstdio>

#include "densilab/experiments.hpp"

// Prints Q(n) for three ring rules at a slightly biased density. Q is the
// probability that the final uniform state matches the initial majority.
int main() {
    using namespace densilab;
    const double p = 0.45;
    const int64_t samples = 1000;
    struct Row {
        const char* name;
        RuleId id;
        double param;
        int64_t budget_factor;
    };
    const Row rows[] = {
        {"gkl", RuleId::gkl, 0.0, 4},
        {"kari", RuleId::kari, 0.0, 4},
        {"majority_traffic(0.1)", RuleId::majority_traffic, 0.1, 40},
    };
    std::printf("%-22s", "rule");
    for (int64_t n : {49, 99, 199, 299}) std::printf("  Q(%lld)", (long long)n);
    std::printf("\n");
    for (const Row& r : rows) {
        std::printf("%-22s", r.name);
        for (int64_t n : {49, 99, 199, 299}) {
            auto topo = Topology::make_ring(n);
            const QEstimate est =
                estimate_Q(topo, make_rule(r.id, *topo, r.param), p, samples,
                           r.budget_factor * n, 7);
            std::printf("  %.3f", est.q());
        }
        std::printf("\n");
    }
    return 0;
}
