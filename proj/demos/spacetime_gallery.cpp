#include <cstdio>
#include <filesystem>
#include <string>

#include "densilab/report.hpp"

// Writes one space-time raster per rule into ./gallery. Rows run top to
// bottom in time; stripes that sort themselves out are classification at
// work, persistent interfaces are not.
int main() {
    using namespace densilab;
    namespace fs = std::filesystem;
    fs::create_directories("gallery");

    struct Shot {
        const char* file;
        RuleId id;
        double param;
        double p;
    };
    const Shot shots[] = {
        {"traffic.pbm", RuleId::traffic, 0.0, 0.50},
        {"gkl.pbm", RuleId::gkl, 0.0, 0.48},
        {"kari.pbm", RuleId::kari, 0.0, 0.48},
        {"majority_traffic.pbm", RuleId::majority_traffic, 0.1, 0.48},
        {"fuks.pbm", RuleId::fuks, 0.1, 0.40},
        {"two_tape.pbm", RuleId::two_tape, 0.0, 0.45},
    };
    const int64_t n = 199, steps = 240;
    auto topo = Topology::make_ring(n);
    for (const Shot& s : shots) {
        const Raster r = spacetime_raster(
            topo, make_rule(s.id, *topo, s.param), s.p, steps, 2024);
        const std::string path = std::string("gallery/") + s.file;
        write_text_file(path, to_pbm(r));
        std::printf("%-28s %lldx%lld p=%.2f\n", path.c_str(),
                    (long long)r.width, (long long)r.height, s.p);
    }
    return 0;
}
