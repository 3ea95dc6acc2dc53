#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace densilab {

struct Interval {
    double lo;
    double hi;
    bool contains(double v) const { return lo <= v && v <= hi; }
    bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(uint64_t successes, uint64_t trials, double z) {
    if (trials == 0) throw std::invalid_argument("wilson_interval: trials == 0");
    const double n = double(trials);
    const double phat = double(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half =
        z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    return {center - half, center + half};
}

inline double binom_pmf(uint64_t n, uint64_t k, double p) {
    if (k > n) return 0.0;
    if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
    if (p >= 1.0) return k == n ? 1.0 : 0.0;
    const double log_choose = std::lgamma(double(n) + 1.0) -
                              std::lgamma(double(k) + 1.0) -
                              std::lgamma(double(n - k) + 1.0);
    return std::exp(log_choose + double(k) * std::log(p) +
                    double(n - k) * std::log1p(-p));
}

} // namespace densilab
