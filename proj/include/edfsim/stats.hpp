#pragma once

#include "edfsim/diffusion.hpp"
#include "edfsim/predict.hpp"
#include "edfsim/simulator.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace edfsim::stats {

struct BatchOptions {
    std::size_t batches = 32;
    double warmup = 0.05;  ///< fraction of the horizon discarded
};

/// Point estimate with a 95% batch-means confidence half-width.
struct SteadyEstimate {
    std::string metric;
    double point = 0;
    double ci_half = 0;
    std::size_t batches = 0;
    double warmup = 0;
};

/// Mean of the given batch values with a Student-t half-width.
SteadyEstimate estimate_from_batches(const std::string& metric, const std::vector<double>& batch_values,
                                     double warmup = 0);

/// Ratio of increments of two cumulative counters sampled at increasing times.
/// The point is Δnum/Δden over the post-warm-up window; the CI comes from the
/// per-batch ratios.
SteadyEstimate ratio_estimate(const std::string& metric, const std::vector<double>& times,
                              const std::vector<double>& numerator, const std::vector<double>& denominator,
                              double horizon, const BatchOptions& options);

/// Loss fractions of a sampled trajectory. Reneging systems report
/// `reneged_customer_fraction` and `reneged_work_fraction`; the standard system
/// reports `late_customer_fraction` and `late_work_fraction`.
std::vector<SteadyEstimate> long_run_fractions(const SystemTrajectory<double>& traj, const BatchOptions& options);

/// Diffusion-scaled samples: time divided by n, space by √n.
struct ScaledPath {
    double n = 1;
    double t0 = 0;
    double dt = 0;
    std::vector<double> work;
    std::vector<double> queue;
    std::vector<double> frontier;
    std::vector<double> reneged_work;

    double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
    std::size_t size() const { return work.size(); }
};

/// Scales the left-limit samples of `traj`. When `scaled_horizon` is given, the
/// trajectory must cover n times it and samples beyond it are dropped.
ScaledPath scale_path(const SystemTrajectory<double>& traj, double n,
                      std::optional<double> scaled_horizon = std::nullopt);

/// Scales an already scaled path by a further factor m.
ScaledPath rescale(const ScaledPath& path, double m);

/// sup |H(F(t)) − W(t)| / √n over post-warm-up samples, with H the unscaled
/// lead profile (n = 1).
double frontier_relation_check(const SystemTrajectory<double>& traj, const diffusion::LeadProfile& unscaled,
                               double n, double warmup = 0.05);

/// Least-squares slope through the origin of queue length on workload.
double queue_work_proportionality(const SystemTrajectory<double>& traj, double warmup = 0.05);

/// Time-averaged L¹ distance, in scaled lead-time units, between the tail
/// 𝒲̂(t)(y, ∞) and H(y ∨ F̂(t)) over y ∈ [0, y*]. Needs sampled measures.
double lead_profile_check(const SystemTrajectory<double>& traj, const diffusion::LeadProfile& unscaled, double n,
                          double warmup = 0.05, std::size_t grid_cells = 4096);

struct LocalTimeCheck {
    SteadyEstimate empirical;  ///< √n R_W per unit unscaled time
    double gamma = 0;          ///< √n(1 − ρ)
    double barrier = 0;        ///< H(0) = D̄/√n
    double theory = 0;         ///< γ/(e^{2γH(0)/σ²} − 1)
};

LocalTimeCheck renege_local_time_check(const SystemTrajectory<double>& traj, double n,
                                       const predict::PredictionInputs& inputs, const BatchOptions& options);

/// CSV `metric,point,ci_half,batches,warmup`.
void write_estimates_csv(std::ostream& out, const std::vector<SteadyEstimate>& estimates, bool header = true);

}  // namespace edfsim::stats
