#pragma once

#include "edfsim/primitives.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace edfsim::diffusion {

/// A function of time sampled on the uniform grid t0, t0 + dt, …
struct PathGrid {
    double t0 = 0;
    double dt = 1;
    std::vector<double> values;

    double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
    std::size_t size() const { return values.size(); }
};

struct OneSidedResult {
    PathGrid reflected;  ///< path + pushing ≥ 0
    PathGrid pushing;    ///< I(t) = −min(0, min_{s≤t} path(s))
};

OneSidedResult reflect_one_sided(const PathGrid& path);

struct TwoSidedResult {
    PathGrid constrained;  ///< path − upper + lower, in [0, H0]
    PathGrid upper;        ///< κ⁺: pushing at H0 (local time at the upper barrier)
    PathGrid lower;        ///< κ⁻: pushing at 0
};

/// Incremental two-barrier reflection on [0, H0], one grid value at a time.
class TwoSidedReflector {
public:
    explicit TwoSidedReflector(double barrier);
    /// Feeds the next input value and returns the constrained value.
    double push(double value);
    double value() const { return z_; }
    double upper() const { return upper_; }
    double lower() const { return lower_; }

private:
    double barrier_;
    double z_ = 0;
    double last_ = 0;
    double upper_ = 0;
    double lower_ = 0;
    bool started_ = false;
};

/// Two-sided reflection of `path` on [0, H0]; the first value is clipped into
/// the interval and the clipping is counted in κ±.
TwoSidedResult reflect_two_sided(const PathGrid& path, double barrier);

/// Brownian motion with drift −γ and variance σ² per unit time, N(0) = 0.
PathGrid simulate_bm(double gamma, double sigma2, double horizon, double dt, std::uint64_t seed);

/// Long-run rate of upper-barrier local time: γ/(e^{2γH0/σ²} − 1), or σ²/(2H0) at γ = 0.
double renege_rate(double gamma, double sigma2, double barrier);

/// Stationary density of the doubly reflected process on [0, H0].
double stationary_density(double gamma, double sigma2, double barrier, double x);
double stationary_cdf(double gamma, double sigma2, double barrier, double x);

/// Stationary density (2γ/σ²)e^{−2γx/σ²} of the one-sided reflected process; needs γ > 0.
double stationary_density_one_sided(double gamma, double sigma2, double x);

struct DrbmExperiment {
    double gamma = 0;
    double sigma2 = 1;
    double barrier = 1;
    double horizon = 200;
    double dt = 1e-4;
    std::size_t seeds = 100;
    std::uint64_t first_seed = 1;
    std::size_t workers = 1;
    std::size_t histogram_bins = 2000;
    /// Combine the dt grid with a coupled 4·dt grid to remove the leading √dt bias.
    bool extrapolate = true;
};

/// Ratio of the coarse to the fine grid step used for extrapolation.
inline constexpr std::size_t kCoarseFactor = 4;

struct DrbmResult {
    double estimate = 0;      ///< mean over seeds of κ⁺(T)/T, extrapolated when requested
    double raw_estimate = 0;  ///< fine-grid mean, without extrapolation
    double ci_half = 0;      ///< 95% normal half-width
    double theory = 0;       ///< renege_rate(γ, σ², H0)
    double ks_distance = 0;  ///< sup |empirical occupation CDF − stationary CDF|
    std::vector<double> per_seed;
    std::vector<double> occupation;  ///< pooled time fraction per histogram bin
};

/// Monte-Carlo estimate of lim κ⁺(T)/T: simulate N*, reflect at 0, then on [0, H0].
DrbmResult local_time_rate_mc(const DrbmExperiment& experiment);

/// Integrated lead-time tail of the scaled lead law G(y) = P{L ≤ √n y}.
class LeadProfile {
public:
    LeadProfile(const LeadTimeSpec& spec, double n);

    double n() const { return n_; }
    double y_lo() const { return y_lo_; }
    double y_star() const { return y_star_; }
    double cdf(double y) const;
    /// H(y) = ∫_y^{y*} (1 − G) = E[(L/√n − y)⁺].
    double H(double y) const;
    /// Inverse of H on [0, ∞); w ≥ H(y_lo) uses the linear piece below y_lo.
    double H_inverse(double w) const;

private:
    DistributionSpec dist_;
    double n_;
    double scale_;
    double y_lo_;
    double y_star_;
};

LeadProfile lead_profile(const LeadTimeSpec& spec, double n);
double frontier_from_workload(double w, const LeadProfile& profile);

/// `t,value` rows with header.
void write_path_csv(std::ostream& out, const PathGrid& path);

}  // namespace edfsim::diffusion
