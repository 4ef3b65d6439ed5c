#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

/// Direct O(n²) evaluation of the two-barrier sup-inf formula
/// φ(t) − sup_{s≤t} [ (φ(s) − H0)⁺ ∧ inf_{u∈[s,t]} φ(u) ] for a nonnegative path.
inline std::vector<double> two_sided(const std::vector<double>& phi, double barrier) {
    std::vector<double> out(phi.size());
    for (std::size_t t = 0; t < phi.size(); ++t) {
        double sup = -INFINITY;
        double inf = INFINITY;
        for (std::size_t s = t + 1; s-- > 0;) {
            inf = std::min(inf, phi[s]);
            sup = std::max(sup, std::min(std::max(phi[s] - barrier, 0.0), inf));
        }
        out[t] = phi[t] - sup;
    }
    return out;
}

/// Direct evaluation of the one-sided pushing −min(0, min_{s≤t} x(s)).
inline std::vector<double> one_sided_push(const std::vector<double>& x) {
    std::vector<double> out;
    for (std::size_t t = 0; t < x.size(); ++t) {
        double m = 0;
        for (std::size_t s = 0; s <= t; ++s) m = std::min(m, x[s]);
        out.push_back(-m);
    }
    return out;
}

}  // namespace oracle
