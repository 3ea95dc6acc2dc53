#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "densilab/bitops.hpp"
#include "densilab/config.hpp"
#include "densilab/rng.hpp"
#include "densilab/rules.hpp"
#include "densilab/topology.hpp"

// Synchronous and asynchronous execution of local rules.
//
// Two step paths produce bit-identical results: a scalar path that gathers
// each cell's inputs through precomputed neighbor tables, and a word-parallel
// path that shifts whole bit planes and combines them with boolean algebra.
// Probabilistic rules consume one 32-bit coin per interior cell per step, in
// cell id order, on both paths. Trees always take the scalar path; their
// halo cells are read but never written.

namespace densilab {

class Engine {
public:
    Engine(TopologyPtr topo, Rule rule, bool force_scalar = false)
        : topo_(std::move(topo)), rule_(std::move(rule)) {
        scalar_ = force_scalar || topo_->kind() == TopologyKind::tree;
        if (topo_->kind() == TopologyKind::tree) {
            const int need = max_word_length(rule_);
            if (topo_->tree_halo() < need)
                throw std::invalid_argument(
                    "engine: tree halo shallower than the rule's longest word");
        }
        // Resolving offsets for cell 0 validates the rule/topology pairing
        // up front instead of on the first step.
        for (const auto& o : rule_.offsets) topo_->resolve(0, o);
        if (scalar_ || rule_.id == RuleId::two_tape) build_tables();
        const size_t nw = size_t(topo_->padded_words());
        planes_.assign(rule_.offsets.size(), std::vector<uint64_t>(nw, 0));
        mask_a_.assign(nw, 0);
        mask_b_.assign(nw, 0);
        tmp_.assign(nw, 0);
    }

    const TopologyPtr& topology() const { return topo_; }
    const Rule& rule() const { return rule_; }
    bool scalar_path() const { return scalar_; }

    // One synchronous step. `coin` is required iff the rule is probabilistic.
    void step(const Configuration& in, Configuration& out, Coin* coin = nullptr) {
        if (rule_.id == RuleId::two_tape)
            throw std::logic_error("engine: two_tape needs step_pair");
        if (&in == &out) throw std::invalid_argument("engine: in/out must differ");
        check_coin(coin);
        if (scalar_)
            step_scalar(in, out, coin);
        else
            step_packed(in, out, coin);
    }

    // One synchronous step of the paired-tape rule: traffic on tape 1; tape 2
    // records the value of the last pair of equal consecutive tape-1 symbols.
    void step_pair(const Configuration& t1in, const Configuration& t2in,
                   Configuration& t1out, Configuration& t2out) {
        if (rule_.id != RuleId::two_tape)
            throw std::logic_error("engine: step_pair is for the two_tape rule");
        if (&t1in == &t1out || &t2in == &t2out)
            throw std::invalid_argument("engine: in/out must differ");
        if (scalar_) {
            const int64_t n = topo_->cell_count();
            for (int64_t id = 0; id < n; ++id) {
                const int l = get_slot(t1in, tbl_[size_t(id) * 3]);
                const int c = get_slot(t1in, tbl_[size_t(id) * 3 + 1]);
                const int r = get_slot(t1in, tbl_[size_t(id) * 3 + 2]);
                t1out.set(id, trafv(l, c, r));
                t2out.set(id, l == c ? c : t2in.get(id));
            }
            return;
        }
        const int64_t nw = topo_->padded_words();
        auto& left = planes_[0];
        auto& right = planes_[2];
        shift_plane(t1in.words(), left.data(), rule_.offsets[0]);
        shift_plane(t1in.words(), right.data(), rule_.offsets[2]);
        const uint64_t* c = t1in.words();
        const uint64_t* t2 = t2in.words();
        for (int64_t k = 0; k < nw; ++k) {
            t1out.words()[k] = (c[k] & right[size_t(k)]) | (left[size_t(k)] & ~c[k]);
            t2out.words()[k] =
                (left[size_t(k)] & c[k]) | (t2[k] & (left[size_t(k)] ^ c[k]));
        }
        t1out.mask_padding();
        t2out.mask_padding();
    }

    // Continuous-time dynamics: the number of update events in a window of
    // the given duration is Poisson(cells * duration); each event rewrites
    // one uniformly chosen cell in place. Returns the event count. The
    // optional observer sees (cell id, old value, new value) per event.
    int64_t step_async(
        Configuration& cfg, Rng& rng, double duration,
        const std::function<void(int64_t, int, int)>& on_event = {}) {
        if (rule_.id == RuleId::two_tape)
            throw std::logic_error("engine: two_tape has no asynchronous mode");
        ensure_tables();
        const int64_t n = topo_->cell_count();
        const int64_t events = rng.poisson(double(n) * duration);
        const size_t k = rule_.offsets.size();
        for (int64_t e = 0; e < events; ++e) {
            const int64_t id = int64_t(rng.bounded(uint64_t(n)));
            uint32_t g = 0;
            for (size_t t = 0; t < k; ++t)
                g |= uint32_t(get_slot(cfg, tbl_[size_t(id) * k + t])) << t;
            const uint32_t coin =
                rule_.uses_coin ? uint32_t(rng.next_u64() >> 32) : 0;
            const int old = cfg.get(id);
            const int v = eval_rule(rule_, g, coin);
            if (on_event) on_event(id, old, v);
            cfg.set(id, v);
        }
        return events;
    }

private:
    void check_coin(Coin* coin) const {
        if (rule_.uses_coin && !coin)
            throw std::invalid_argument("engine: probabilistic rule needs a coin stream");
    }

    static int get_slot(const Configuration& cfg, int64_t slot) {
        return int((cfg.words()[slot >> 6] >> (slot & 63)) & 1);
    }

    void ensure_tables() {
        if (tbl_.empty()) build_tables();
    }

    void build_tables() {
        const int64_t n = topo_->cell_count();
        const size_t k = rule_.offsets.size();
        tbl_.resize(size_t(n) * k);
        for (int64_t id = 0; id < n; ++id)
            for (size_t t = 0; t < k; ++t) {
                const int64_t nb = topo_->resolve(id, rule_.offsets[t]);
                if (nb < 0)
                    throw std::invalid_argument(
                        "engine: neighbor lookup leaves the stored tree");
                tbl_[size_t(id) * k + t] = topo_->slot(nb);
            }
    }

    void step_scalar(const Configuration& in, Configuration& out, Coin* coin) {
        ensure_tables();
        // Halo and padding carry over; only interior cells are rewritten.
        std::copy(in.words(), in.words() + in.word_count(), out.words());
        const int64_t n = topo_->cell_count();
        const size_t k = rule_.offsets.size();
        for (int64_t id = 0; id < n; ++id) {
            uint32_t g = 0;
            for (size_t t = 0; t < k; ++t)
                g |= uint32_t(get_slot(in, tbl_[size_t(id) * k + t])) << t;
            const uint32_t c = rule_.uses_coin ? coin->next_u32() : 0;
            out.set(id, eval_rule(rule_, g, c));
        }
    }

    // Builds the plane of input values for one offset: bit slot(id) of dst
    // holds the value this offset reads for cell id.
    void shift_plane(const uint64_t* src, uint64_t* dst, const Offset& o) const {
        shift_block(*topo_, src, dst, o);
    }

    static void shift_block(const Topology& topo, const uint64_t* src,
                            uint64_t* dst, const Offset& o) {
        switch (topo.kind()) {
        case TopologyKind::ring:
            rotate_bits(dst, src, topo.cell_count(), o.shift);
            return;
        case TopologyKind::torus2d: {
            const int64_t w = topo.width(), h = topo.height();
            const int64_t rw = topo.padded_words() / h;
            for (int64_t j = 0; j < h; ++j) {
                const int64_t sj = floored_mod(j + o.dj, h);
                rotate_bits(dst + j * rw, src + sj * rw, w, o.di);
            }
            return;
        }
        case TopologyKind::product: {
            const auto& base = *topo.base();
            const int64_t bw = base.padded_words();
            for (int l = 0; l < topo.layers(); ++l)
                shift_block(base, src + l * bw, dst + l * bw, o);
            return;
        }
        case TopologyKind::tree:
            throw std::logic_error("engine: no packed path on trees");
        }
    }

    // Coin masks, one bit per cell in slot order, drawn in cell id order.
    // mask_a: majority_traffic "use majority" / fuks "copy left" /
    // glauber4 "tie resolves to one". mask_b: fuks "copy right".
    void draw_coin_masks(Coin& coin) {
        std::fill(mask_a_.begin(), mask_a_.end(), 0);
        std::fill(mask_b_.begin(), mask_b_.end(), 0);
        const int64_t n = topo_->cell_count();
        if (topo_->kind() == TopologyKind::ring &&
            (rule_.id == RuleId::fuks ||
             rule_.id == RuleId::majority_traffic)) {
            // Ring slots equal cell ids, so whole words can be built in
            // registers with branchless compares. Draw order and values
            // match the generic loop bit for bit.
            const bool two = rule_.id == RuleId::fuks;
            const uint32_t ta = two ? rule_.t_q : rule_.t_alpha;
            const uint32_t tb = rule_.t_2q;
            for (int64_t base = 0; base < n; base += 64) {
                const int lim = int(std::min<int64_t>(64, n - base));
                uint64_t a = 0, b = 0;
                for (int k = 0; k < lim; ++k) {
                    const uint32_t u = coin.next_u32();
                    a |= uint64_t(u < ta) << k;
                    b |= uint64_t(u < tb) << k;
                }
                mask_a_[size_t(base >> 6)] = a;
                if (two) mask_b_[size_t(base >> 6)] = b & ~a;
            }
            return;
        }
        for (int64_t id = 0; id < n; ++id) {
            const uint32_t u = coin.next_u32();
            const int64_t s = topo_->slot(id);
            const uint64_t bit = uint64_t(1) << (s & 63);
            switch (rule_.id) {
            case RuleId::majority_traffic:
                if (u < rule_.t_alpha) mask_a_[size_t(s >> 6)] |= bit;
                break;
            case RuleId::fuks:
                if (u < rule_.t_q)
                    mask_a_[size_t(s >> 6)] |= bit;
                else if (u < rule_.t_2q)
                    mask_b_[size_t(s >> 6)] |= bit;
                break;
            case RuleId::glauber4:
                if (!(u < rule_.t_half)) mask_a_[size_t(s >> 6)] |= bit;
                break;
            default:
                break;
            }
        }
    }

    void step_packed(const Configuration& in, Configuration& out, Coin* coin) {
        const int64_t nw = topo_->padded_words();
        if (rule_.id == RuleId::kari) {
            step_packed_kari(in, out);
            return;
        }
        for (size_t t = 0; t < rule_.offsets.size(); ++t)
            shift_plane(in.words(), planes_[t].data(), rule_.offsets[t]);
        if (rule_.uses_coin) draw_coin_masks(*coin);
        uint64_t* o = out.words();
        const auto& P = planes_;
        for (int64_t k = 0; k < nw; ++k) {
            const size_t i = size_t(k);
            uint64_t v = 0;
            switch (rule_.id) {
            case RuleId::identity:
                v = P[0][i];
                break;
            case RuleId::maj3:
            case RuleId::toom:
                v = (P[0][i] & P[1][i]) | ((P[0][i] | P[1][i]) & P[2][i]);
                break;
            case RuleId::traffic:
                v = (P[1][i] & P[2][i]) | (P[0][i] & ~P[1][i]);
                break;
            case RuleId::gkl:
                v = (P[0][i] & (P[1][i] | P[2][i])) |
                    (~P[0][i] & P[3][i] & P[4][i]);
                break;
            case RuleId::majority_traffic: {
                const uint64_t maj =
                    (P[0][i] & P[1][i]) | ((P[0][i] | P[1][i]) & P[2][i]);
                const uint64_t tra = (P[1][i] & P[2][i]) | (P[0][i] & ~P[1][i]);
                v = (mask_a_[i] & maj) | (~mask_a_[i] & tra);
                break;
            }
            case RuleId::fuks:
                v = (mask_a_[i] & P[0][i]) | (mask_b_[i] & P[2][i]) |
                    (~mask_a_[i] & ~mask_b_[i] & P[1][i]);
                break;
            case RuleId::maj5: {
                const uint64_t s1 = P[0][i] ^ P[1][i] ^ P[2][i];
                const uint64_t c1 =
                    (P[0][i] & P[1][i]) | ((P[0][i] | P[1][i]) & P[2][i]);
                const uint64_t s2 = s1 ^ P[3][i] ^ P[4][i];
                const uint64_t c2 = (s1 & P[3][i]) | ((s1 | P[3][i]) & P[4][i]);
                v = (c1 & c2) | ((c1 ^ c2) & s2);
                break;
            }
            case RuleId::toom_ips: {
                const uint64_t C = P[0][i];
                // Per-bit "differs from the centre" planes.
                const uint64_t nD = P[1][i] ^ C, eD = P[2][i] ^ C,
                               sD = P[3][i] ^ C, wD = P[4][i] ^ C,
                               seD = P[5][i] ^ C, nwD = P[6][i] ^ C;
                const uint64_t g1 = ~nwD & ~seD & nD & eD & (sD | wD);
                const uint64_t g2 = ~nwD & ~sD & nD & eD & seD & wD;
                const uint64_t g3 = ~wD & ~seD & nD & eD & nwD & sD;
                const uint64_t keep = g1 | g2 | g3;
                const uint64_t maj =
                    (C & P[1][i]) | ((C | P[1][i]) & P[2][i]);
                v = (keep & C) | (~keep & maj);
                break;
            }
            case RuleId::glauber4: {
                const uint64_t s1 = P[0][i] ^ P[1][i] ^ P[2][i];
                const uint64_t c1 =
                    (P[0][i] & P[1][i]) | ((P[0][i] | P[1][i]) & P[2][i]);
                const uint64_t gt2 = c1 & (s1 | P[3][i]);
                const uint64_t eq2 =
                    (c1 & ~s1 & ~P[3][i]) | (~c1 & s1 & P[3][i]);
                v = gt2 | (eq2 & mask_a_[i]);
                break;
            }
            default:
                throw std::logic_error("engine: rule lacks a packed kernel");
            }
            o[k] = v;
        }
        out.mask_padding();
    }

    void step_packed_kari(const Configuration& in, Configuration& out) {
        const int64_t nw = topo_->padded_words();
        auto& left = planes_[0];
        auto& right = planes_[1];
        shift_plane(in.words(), left.data(), Offset::step(-1));
        shift_plane(in.words(), right.data(), Offset::step(1));
        const uint64_t* c = in.words();
        for (int64_t k = 0; k < nw; ++k)
            tmp_[size_t(k)] =
                (c[k] & right[size_t(k)]) | (left[size_t(k)] & ~c[k]);
        // Substitutions on the intermediate row y: occurrences of 0010 clear
        // their third symbol, occurrences of 1011 set their second.
        auto& ym2 = planes_[2];
        auto& ym1 = planes_[3];
        auto& yp1 = planes_[0];
        auto& yp2 = planes_[1];
        shift_plane(tmp_.data(), ym2.data(), Offset::step(-2));
        shift_plane(tmp_.data(), ym1.data(), Offset::step(-1));
        shift_plane(tmp_.data(), yp1.data(), Offset::step(1));
        shift_plane(tmp_.data(), yp2.data(), Offset::step(2));
        uint64_t* o = out.words();
        for (int64_t k = 0; k < nw; ++k) {
            const size_t i = size_t(k);
            const uint64_t y = tmp_[i];
            const uint64_t f0 = ~ym2[i] & ~ym1[i] & y & ~yp1[i];
            const uint64_t f1 = ym1[i] & ~y & yp1[i] & yp2[i];
            o[k] = (y & ~f0) | f1;
        }
        out.mask_padding();
    }

    TopologyPtr topo_;
    Rule rule_;
    bool scalar_ = false;
    std::vector<int64_t> tbl_;
    std::vector<std::vector<uint64_t>> planes_;
    std::vector<uint64_t> mask_a_, mask_b_, tmp_;
};

enum class Verdict {
    uniform_zero,
    uniform_one,
    fixed_point,   // non-uniform fixed point (deterministic rules only)
    two_cycle,     // period-2 orbit (deterministic rules only)
    out_of_budget,
};

inline const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::uniform_zero: return "uniform_zero";
    case Verdict::uniform_one: return "uniform_one";
    case Verdict::fixed_point: return "fixed_point";
    case Verdict::two_cycle: return "two_cycle";
    case Verdict::out_of_budget: return "out_of_budget";
    }
    return "?";
}

struct RunResult {
    Verdict verdict = Verdict::out_of_budget;
    int64_t steps = 0;
    Configuration final_config;
};

// Runs synchronous steps until the interior is uniform, a short orbit is
// detected (deterministic rules only; random rules could match by
// coincidence), or the budget runs out. An optional observer sees each
// configuration, the initial one included, before any absorption check.
inline RunResult run_sync(
    Engine& eng, Configuration x, Coin* coin, int64_t max_steps,
    const std::function<void(int64_t, const Configuration&)>& observe = {}) {
    const auto topo = eng.topology();
    const bool detect_orbits = !eng.rule().uses_coin;
    Configuration cur = std::move(x);
    Configuration nxt(topo), prev2(topo);
    bool have_prev2 = false;
    if (observe) observe(0, cur);
    int v = 0;
    if (cur.is_uniform(&v))
        return {v ? Verdict::uniform_one : Verdict::uniform_zero, 0,
                std::move(cur)};
    for (int64_t t = 1; t <= max_steps; ++t) {
        eng.step(cur, nxt, coin);
        if (observe) observe(t, nxt);
        if (nxt.is_uniform(&v))
            return {v ? Verdict::uniform_one : Verdict::uniform_zero, t,
                    std::move(nxt)};
        if (detect_orbits) {
            if (nxt == cur) return {Verdict::fixed_point, t, std::move(nxt)};
            if (have_prev2 && nxt == prev2)
                return {Verdict::two_cycle, t, std::move(nxt)};
        }
        std::swap(prev2, cur); // prev2 <- cur, cur holds scratch
        std::swap(cur, nxt);   // cur <- nxt, nxt holds scratch
        have_prev2 = true;
    }
    return {Verdict::out_of_budget, max_steps, std::move(cur)};
}

struct TwoTapeResult {
    Verdict verdict = Verdict::out_of_budget;
    int64_t steps = 0;
    Configuration tape1;
    Configuration tape2;
};

// The paired-tape run settles once tape 2 is uniform with value v and tape 1
// contains no adjacent pair of the opposite symbol; traffic cannot create
// such a pair afterwards, so the verdict is absorbing.
inline TwoTapeResult run_two_tape(Engine& eng, Configuration t1,
                                  Configuration t2, int64_t max_steps) {
    const auto topo = eng.topology();
    Configuration n1(topo), n2(topo);
    const auto settled = [&](const Configuration& a, const Configuration& b,
                             int* v) {
        if (!b.is_uniform(v)) return false;
        return count_pattern(a, *v ? "00" : "11") == 0;
    };
    int v = 0;
    if (settled(t1, t2, &v))
        return {v ? Verdict::uniform_one : Verdict::uniform_zero, 0,
                std::move(t1), std::move(t2)};
    for (int64_t t = 1; t <= max_steps; ++t) {
        eng.step_pair(t1, t2, n1, n2);
        std::swap(t1, n1);
        std::swap(t2, n2);
        if (settled(t1, t2, &v))
            return {v ? Verdict::uniform_one : Verdict::uniform_zero, t,
                    std::move(t1), std::move(t2)};
    }
    return {Verdict::out_of_budget, max_steps, std::move(t1), std::move(t2)};
}

} // namespace densilab
