#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "densilab/rng.hpp"
#include "densilab/topology.hpp"

// The catalogue of local rules. A rule lists its inputs as topology offsets
// in a fixed gather order; evaluation maps the gathered bits (bit t = input
// t) and, for probabilistic rules, one 32-bit coin to the new cell value.
// Probabilistic rules draw exactly one coin per cell per step whether or not
// the value ends up used, so coin streams stay aligned across rules and
// across scalar/word-parallel execution paths.

namespace densilab {

enum class RuleId {
    identity,
    maj3,
    traffic,
    gkl,
    kari,
    majority_traffic,
    fuks,
    toom,
    maj5,
    toom_ips,
    glauber4,
    tree4,
    tree3,
    maj5_tree,
    two_tape,
};

constexpr int maj3v(int x, int y, int z) { return x + y + z >= 2 ? 1 : 0; }

// Rule 184. A car (1) advances iff the cell ahead is free.
constexpr int trafv(int x, int y, int z) { return (y & z) | (x & (1 - y)); }

struct Rule {
    RuleId id = RuleId::identity;
    std::vector<Offset> offsets;
    bool uses_coin = false;
    double alpha = 0.0; // majority_traffic: probability of the majority map
    double q = 0.0;     // fuks: per-side copy probability
    uint32_t t_alpha = 0, t_q = 0, t_2q = 0, t_half = 0;
};

inline const char* rule_name(RuleId id) {
    switch (id) {
    case RuleId::identity: return "identity";
    case RuleId::maj3: return "maj3";
    case RuleId::traffic: return "traffic";
    case RuleId::gkl: return "gkl";
    case RuleId::kari: return "kari";
    case RuleId::majority_traffic: return "majority_traffic";
    case RuleId::fuks: return "fuks";
    case RuleId::toom: return "toom";
    case RuleId::maj5: return "maj5";
    case RuleId::toom_ips: return "toom_ips";
    case RuleId::glauber4: return "glauber4";
    case RuleId::tree4: return "tree4";
    case RuleId::tree3: return "tree3";
    case RuleId::maj5_tree: return "maj5_tree";
    case RuleId::two_tape: return "two_tape";
    }
    return "?";
}

inline RuleId rule_from_name(std::string_view name) {
    for (RuleId id : {RuleId::identity, RuleId::maj3, RuleId::traffic,
                      RuleId::gkl, RuleId::kari, RuleId::majority_traffic,
                      RuleId::fuks, RuleId::toom, RuleId::maj5,
                      RuleId::toom_ips, RuleId::glauber4, RuleId::tree4,
                      RuleId::tree3, RuleId::maj5_tree, RuleId::two_tape})
        if (name == rule_name(id)) return id;
    throw std::invalid_argument("unknown rule: " + std::string(name));
}

// `param` is the mix probability alpha for majority_traffic and the per-side
// copy probability q for fuks; other rules take no parameter.
inline Rule make_rule(RuleId id, const Topology& topo, double param = 0.0) {
    Rule r;
    r.id = id;
    const TopologyKind kind = topo.kind() == TopologyKind::product
                                  ? topo.base()->kind()
                                  : topo.kind();
    const auto w = [](const char* s) { return Offset::word(s); };
    switch (id) {
    case RuleId::identity:
        r.offsets = {kind == TopologyKind::ring      ? Offset::step(0)
                     : kind == TopologyKind::torus2d ? Offset::step2(0, 0)
                                                     : w("")};
        break;
    case RuleId::maj3:
    case RuleId::traffic:
    case RuleId::two_tape:
        r.offsets = {Offset::step(-1), Offset::step(0), Offset::step(1)};
        break;
    case RuleId::majority_traffic:
        if (!(param > 0.0 && param < 1.0))
            throw std::invalid_argument("majority_traffic: alpha must be in (0,1)");
        r.offsets = {Offset::step(-1), Offset::step(0), Offset::step(1)};
        r.uses_coin = true;
        r.alpha = param;
        r.t_alpha = Coin::threshold(param);
        break;
    case RuleId::fuks:
        if (!(param > 0.0 && param < 0.5))
            throw std::invalid_argument("fuks: q must be in (0,1/2)");
        r.offsets = {Offset::step(-1), Offset::step(0), Offset::step(1)};
        r.uses_coin = true;
        r.q = param;
        r.t_q = Coin::threshold(param);
        r.t_2q = Coin::threshold(2.0 * param);
        break;
    case RuleId::gkl:
        r.offsets = {Offset::step(0), Offset::step(1), Offset::step(3),
                     Offset::step(-1), Offset::step(-3)};
        break;
    case RuleId::kari:
        r.offsets = {Offset::step(-3), Offset::step(-2), Offset::step(-1),
                     Offset::step(0),  Offset::step(1),  Offset::step(2),
                     Offset::step(3)};
        break;
    case RuleId::toom:
        r.offsets = {Offset::step2(0, 0), Offset::step2(0, 1),
                     Offset::step2(1, 0)};
        break;
    case RuleId::maj5:
        r.offsets = {Offset::step2(0, 0), Offset::step2(0, 1),
                     Offset::step2(1, 0), Offset::step2(0, -1),
                     Offset::step2(-1, 0)};
        break;
    case RuleId::toom_ips:
        r.offsets = {Offset::step2(0, 0),  Offset::step2(0, 1),
                     Offset::step2(1, 0),  Offset::step2(0, -1),
                     Offset::step2(-1, 0), Offset::step2(1, -1),
                     Offset::step2(-1, 1)};
        break;
    case RuleId::glauber4:
        r.offsets = {Offset::step2(0, 1), Offset::step2(1, 0),
                     Offset::step2(0, -1), Offset::step2(-1, 0)};
        r.uses_coin = true;
        r.t_half = Coin::threshold(0.5);
        break;
    case RuleId::tree4:
        r.offsets = {w("a"), w("ab"), w("aB")};
        break;
    case RuleId::tree3:
        r.offsets = {w("ab"), w("ac"), w("acbc")};
        break;
    case RuleId::maj5_tree:
        r.offsets = {w(""), w("a"), w("A"), w("b"), w("B")};
        break;
    }
    if (id != RuleId::majority_traffic && id != RuleId::fuks && param != 0.0)
        throw std::invalid_argument("rule takes no parameter");
    return r;
}

// Longest generator word a rule reads; a tree's halo must be at least this
// deep for every neighbor lookup to resolve.
inline int max_word_length(const Rule& r) {
    size_t m = 0;
    for (const auto& o : r.offsets)
        if (o.kind == Offset::Kind::word) m = std::max(m, o.letters.size());
    return int(m);
}

inline int eval_rule(const Rule& r, uint32_t g, uint32_t coin = 0) {
    const auto bit = [g](int t) { return int((g >> t) & 1); };
    switch (r.id) {
    case RuleId::identity:
        return bit(0);
    case RuleId::maj3:
        return maj3v(bit(0), bit(1), bit(2));
    case RuleId::traffic:
    case RuleId::two_tape: // first-tape component; the engine pairs it with
                           // the second-tape update
        return trafv(bit(0), bit(1), bit(2));
    case RuleId::majority_traffic:
        return coin < r.t_alpha ? maj3v(bit(0), bit(1), bit(2))
                                : trafv(bit(0), bit(1), bit(2));
    case RuleId::fuks:
        // Copy the left neighbor with probability q, the right neighbor with
        // probability q, keep the cell otherwise.
        return coin < r.t_q ? bit(0) : (coin < r.t_2q ? bit(2) : bit(1));
    case RuleId::gkl: {
        const int c = bit(0);
        return c ? maj3v(c, bit(1), bit(2)) : maj3v(c, bit(3), bit(4));
    }
    case RuleId::kari: {
        // Traffic pass on the radius-3 window, then the two substitutions
        // located on the intermediate row: 0010 -> 0000 (clear the third
        // symbol) and 1011 -> 1111 (set the second symbol). The two match
        // sets cannot target the same cell.
        int y[5];
        for (int m = 0; m < 5; ++m)
            y[m] = trafv(bit(m), bit(m + 1), bit(m + 2));
        const int clear0010 = !y[0] && !y[1] && y[2] && !y[3] ? 1 : 0;
        const int set1011 = y[1] && !y[2] && y[3] && y[4] ? 1 : 0;
        return (y[2] & ~clear0010) | set1011;
    }
    case RuleId::toom:
        return maj3v(bit(0), bit(1), bit(2));
    case RuleId::maj5:
    case RuleId::maj5_tree:
        return bit(0) + bit(1) + bit(2) + bit(3) + bit(4) >= 3 ? 1 : 0;
    case RuleId::toom_ips: {
        const int c = bit(0), n = bit(1), e = bit(2), s = bit(3), w = bit(4),
                  se = bit(5), nw = bit(6);
        const int b = 1 - c;
        // North-East-Centre majority, except the cell keeps its state when
        // flipping it could merge clusters of its own color.
        const bool keep =
            (nw == c && se == c && n == b && e == b && (s == b || w == b)) ||
            (nw == c && s == c && n == b && e == b && se == b && w == b) ||
            (w == c && se == c && n == b && e == b && nw == b && s == b);
        return keep ? c : maj3v(c, n, e);
    }
    case RuleId::glauber4: {
        const int sum = bit(0) + bit(1) + bit(2) + bit(3);
        if (sum != 2) return sum > 2 ? 1 : 0;
        return coin < r.t_half ? 0 : 1;
    }
    case RuleId::tree4:
    case RuleId::tree3:
        return maj3v(bit(0), bit(1), bit(2));
    }
    return 0;
}

} // namespace densilab
