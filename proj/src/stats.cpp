#include "edfsim/stats.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace edfsim::stats {

namespace {

double t_quantile_975(std::size_t dof) {
    boost::math::students_t dist(static_cast<double>(dof));
    return boost::math::quantile(dist, 0.975);
}

const std::vector<Snapshot<double>>& require_samples(const SystemTrajectory<double>& traj, const char* who) {
    if (traj.samples.empty()) throw InvalidArgument(std::string(who) + ": trajectory has no samples");
    return traj.samples;
}

/// Index of the first sample at or after the warm-up time.
std::size_t first_after_warmup(const std::vector<Snapshot<double>>& samples, double horizon, double warmup) {
    if (!(warmup >= 0 && warmup < 1)) throw InvalidArgument("stats: warm-up fraction must lie in [0, 1)");
    const double tw = warmup * horizon;
    std::size_t i = 0;
    while (i < samples.size() && samples[i].time < tw) ++i;
    return i;
}

}  // namespace

SteadyEstimate estimate_from_batches(const std::string& metric, const std::vector<double>& batch_values,
                                     double warmup) {
    if (batch_values.size() < 2) throw InvalidArgument("stats: need at least two batches");
    const double b = static_cast<double>(batch_values.size());
    Accumulator<double> sum;
    for (double x : batch_values) sum.add(x);
    const double mean = sum.value() / b;
    Accumulator<double> sq;
    for (double x : batch_values) sq.add((x - mean) * (x - mean));
    SteadyEstimate out;
    out.metric = metric;
    out.point = mean;
    out.ci_half = t_quantile_975(batch_values.size() - 1) * std::sqrt(sq.value() / (b - 1) / b);
    out.batches = batch_values.size();
    out.warmup = warmup;
    return out;
}

SteadyEstimate ratio_estimate(const std::string& metric, const std::vector<double>& times,
                              const std::vector<double>& numerator, const std::vector<double>& denominator,
                              double horizon, const BatchOptions& options) {
    if (options.batches < 10) throw InvalidArgument("stats: batch count must be at least 10");
    if (times.size() != numerator.size() || times.size() != denominator.size()) {
        throw InvalidArgument("stats: counter series have different lengths");
    }
    if (!(options.warmup >= 0 && options.warmup < 1)) {
        throw InvalidArgument("stats: warm-up fraction must lie in [0, 1)");
    }
    const double tw = options.warmup * horizon;
    std::size_t i0 = 0;
    while (i0 < times.size() && times[i0] < tw) ++i0;
    if (times.size() < i0 + options.batches + 1) {
        throw InvalidArgument("stats: insufficient post-warm-up data for " + std::to_string(options.batches) +
                              " batches");
    }
    const std::size_t m = times.size() - 1 - i0;
    std::vector<double> ratios;
    ratios.reserve(options.batches);
    for (std::size_t j = 0; j < options.batches; ++j) {
        const std::size_t a = i0 + j * m / options.batches;
        const std::size_t b = i0 + (j + 1) * m / options.batches;
        const double dn = numerator[b] - numerator[a];
        const double dd = denominator[b] - denominator[a];
        ratios.push_back(dd > 0 ? dn / dd : 0.0);
    }
    SteadyEstimate out = estimate_from_batches(metric, ratios, options.warmup);
    const double dn = numerator.back() - numerator[i0];
    const double dd = denominator.back() - denominator[i0];
    out.point = dd > 0 ? dn / dd : 0.0;
    return out;
}

std::vector<SteadyEstimate> long_run_fractions(const SystemTrajectory<double>& traj, const BatchOptions& options) {
    const auto& samples = require_samples(traj, "long_run_fractions");
    std::vector<double> times, arrivals, work, customers, lost;
    for (const auto& s : samples) {
        times.push_back(s.time);
        arrivals.push_back(static_cast<double>(s.arrivals));
        work.push_back(s.arrived_work);
        if (traj.policy.reneging()) {
            customers.push_back(static_cast<double>(s.reneged_customers));
            lost.push_back(s.reneged_work);
        } else {
            customers.push_back(static_cast<double>(s.late_customers));
            lost.push_back(s.late_work);
        }
    }
    const std::string prefix = traj.policy.reneging() ? "reneged" : "late";
    return {ratio_estimate(prefix + "_customer_fraction", times, customers, arrivals, traj.horizon, options),
            ratio_estimate(prefix + "_work_fraction", times, lost, work, traj.horizon, options)};
}

ScaledPath scale_path(const SystemTrajectory<double>& traj, double n, std::optional<double> scaled_horizon) {
    if (!(n >= 1)) throw InvalidArgument("scale_path: scaling level must be at least 1");
    const auto& samples = require_samples(traj, "scale_path");
    double limit = traj.horizon;
    if (scaled_horizon) {
        if (traj.horizon < n * *scaled_horizon) {
            throw InvalidArgument("scale_path: horizon too short for the requested scaled horizon");
        }
        limit = n * *scaled_horizon;
    }
    const double root = std::sqrt(n);
    ScaledPath out;
    out.n = n;
    out.dt = *traj.sample_interval / n;
    out.t0 = samples.front().time / n;
    for (const auto& s : samples) {
        if (limit < s.time) break;
        out.work.push_back(s.work / root);
        out.queue.push_back(static_cast<double>(s.queue) / root);
        out.frontier.push_back(s.frontier / root);
        out.reneged_work.push_back(s.reneged_work / root);
    }
    return out;
}

ScaledPath rescale(const ScaledPath& path, double m) {
    if (!(m >= 1)) throw InvalidArgument("rescale: scaling factor must be at least 1");
    const double root = std::sqrt(m);
    ScaledPath out = path;
    out.n = path.n * m;
    out.t0 = path.t0 / m;
    out.dt = path.dt / m;
    for (auto* series : {&out.work, &out.queue, &out.frontier, &out.reneged_work}) {
        for (double& v : *series) v /= root;
    }
    return out;
}

double frontier_relation_check(const SystemTrajectory<double>& traj, const diffusion::LeadProfile& unscaled,
                               double n, double warmup) {
    const auto& samples = require_samples(traj, "frontier_relation_check");
    double sup = 0;
    for (std::size_t i = first_after_warmup(samples, traj.horizon, warmup); i < samples.size(); ++i) {
        sup = std::max(sup, std::abs(unscaled.H(samples[i].frontier) - samples[i].work));
    }
    return sup / std::sqrt(n);
}

double queue_work_proportionality(const SystemTrajectory<double>& traj, double warmup) {
    const auto& samples = require_samples(traj, "queue_work_proportionality");
    Accumulator<double> qw, ww;
    for (std::size_t i = first_after_warmup(samples, traj.horizon, warmup); i < samples.size(); ++i) {
        qw.add(static_cast<double>(samples[i].queue) * samples[i].work);
        ww.add(samples[i].work * samples[i].work);
    }
    if (!(ww.value() > 0)) throw InvalidArgument("queue_work_proportionality: workload samples are all zero");
    return qw.value() / ww.value();
}

double lead_profile_check(const SystemTrajectory<double>& traj, const diffusion::LeadProfile& unscaled, double n,
                          double warmup, std::size_t grid_cells) {
    const auto& samples = require_samples(traj, "lead_profile_check");
    if (grid_cells == 0) throw InvalidArgument("lead_profile_check: need grid cells");
    const double y_star = unscaled.y_star();
    const double h = y_star / static_cast<double>(grid_cells);
    std::vector<double> grid(grid_cells), profile(grid_cells);
    for (std::size_t c = 0; c < grid_cells; ++c) {
        grid[c] = (static_cast<double>(c) + 0.5) * h;
        profile[c] = unscaled.H(grid[c]);
    }
    Accumulator<double> total;
    std::size_t count = 0;
    for (std::size_t i = first_after_warmup(samples, traj.horizon, warmup); i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (!s.workload) throw InvalidArgument("lead_profile_check: samples carry no workload measure");
        const auto atoms = s.workload->atoms();
        const double h_frontier = unscaled.H(s.frontier);
        double below = 0;
        std::size_t k = 0;
        Accumulator<double> l1;
        for (std::size_t c = 0; c < grid_cells; ++c) {
            while (k < atoms.size() && atoms[k].location <= grid[c]) below += atoms[k++].mass;
            const double tail = s.work - below;
            const double limit = grid[c] < s.frontier ? h_frontier : profile[c];
            l1.add(std::abs(tail - limit));
        }
        total.add(l1.value() * h);
        ++count;
    }
    if (count == 0) throw InvalidArgument("lead_profile_check: no post-warm-up samples");
    return total.value() / static_cast<double>(count) / n;
}

LocalTimeCheck renege_local_time_check(const SystemTrajectory<double>& traj, double n,
                                       const predict::PredictionInputs& inputs, const BatchOptions& options) {
    if (!traj.policy.reneging()) throw InvalidArgument("renege_local_time_check: needs a reneging trajectory");
    const auto& samples = require_samples(traj, "renege_local_time_check");
    const double root = std::sqrt(n);
    std::vector<double> times, reneged;
    for (const auto& s : samples) {
        times.push_back(s.time);
        reneged.push_back(root * s.reneged_work);
    }
    LocalTimeCheck out;
    out.empirical = ratio_estimate("scaled_renege_rate", times, reneged, times, traj.horizon, options);
    out.gamma = root * (1.0 - inputs.rho);
    out.barrier = inputs.mean_lead / root;
    out.theory = diffusion::renege_rate(out.gamma, inputs.sigma2, out.barrier);
    return out;
}

void write_estimates_csv(std::ostream& out, const std::vector<SteadyEstimate>& estimates, bool header) {
    if (header) out << "metric,point,ci_half,batches,warmup\n";
    for (const auto& e : estimates) {
        out << e.metric << ',' << NumTraits<double>::format(e.point) << ',' << NumTraits<double>::format(e.ci_half)
            << ',' << e.batches << ',' << NumTraits<double>::format(e.warmup) << '\n';
    }
}

}  // namespace edfsim::stats
