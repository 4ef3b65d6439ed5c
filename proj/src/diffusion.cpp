#include "edfsim/diffusion.hpp"

#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <thread>

namespace edfsim::diffusion {

OneSidedResult reflect_one_sided(const PathGrid& path) {
    OneSidedResult out{{path.t0, path.dt, {}}, {path.t0, path.dt, {}}};
    out.reflected.values.reserve(path.size());
    out.pushing.values.reserve(path.size());
    double push = 0;
    for (double x : path.values) {
        push = std::max(push, -x);
        out.pushing.values.push_back(push);
        out.reflected.values.push_back(x + push);
    }
    return out;
}

TwoSidedReflector::TwoSidedReflector(double barrier) : barrier_(barrier) {
    if (!(barrier > 0)) throw InvalidArgument("reflect_two_sided: barrier must be positive");
}

double TwoSidedReflector::push(double value) {
    double z = started_ ? z_ + (value - last_) : value;
    started_ = true;
    last_ = value;
    if (z > barrier_) {
        upper_ += z - barrier_;
        z = barrier_;
    } else if (z < 0) {
        lower_ -= z;
        z = 0;
    }
    z_ = z;
    return z;
}

TwoSidedResult reflect_two_sided(const PathGrid& path, double barrier) {
    TwoSidedReflector r(barrier);
    TwoSidedResult out{{path.t0, path.dt, {}}, {path.t0, path.dt, {}}, {path.t0, path.dt, {}}};
    for (double x : path.values) {
        out.constrained.values.push_back(r.push(x));
        out.upper.values.push_back(r.upper());
        out.lower.values.push_back(r.lower());
    }
    return out;
}

PathGrid simulate_bm(double gamma, double sigma2, double horizon, double dt, std::uint64_t seed) {
    if (!(dt > 0) || !(sigma2 > 0) || !(horizon >= 0) || !std::isfinite(gamma)) {
        throw InvalidArgument("simulate_bm: need dt > 0, sigma2 > 0, horizon >= 0");
    }
    const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
    Engine engine = make_engine(seed, Substream::brownian);
    boost::random::normal_distribution<double> step(-gamma * dt, std::sqrt(sigma2 * dt));
    PathGrid out{0.0, dt, {}};
    out.values.reserve(steps + 1);
    double x = 0;
    out.values.push_back(x);
    for (std::size_t i = 0; i < steps; ++i) {
        x += step(engine);
        out.values.push_back(x);
    }
    return out;
}

double renege_rate(double gamma, double sigma2, double barrier) {
    if (!(sigma2 > 0) || !(barrier > 0)) throw InvalidArgument("renege_rate: need sigma2 > 0 and H0 > 0");
    if (gamma == 0.0) return sigma2 / (2.0 * barrier);
    return gamma / std::expm1(2.0 * gamma * barrier / sigma2);
}

double stationary_density(double gamma, double sigma2, double barrier, double x) {
    if (!(barrier > 0) || !(sigma2 > 0)) throw InvalidArgument("stationary_density: need H0 > 0 and sigma2 > 0");
    if (x < 0 || x > barrier) return 0.0;
    if (gamma == 0.0) return 1.0 / barrier;
    const double c = 2.0 * gamma / sigma2;
    return c * std::exp(-c * x) / (-std::expm1(-c * barrier));
}

double stationary_cdf(double gamma, double sigma2, double barrier, double x) {
    if (!(barrier > 0) || !(sigma2 > 0)) throw InvalidArgument("stationary_cdf: need H0 > 0 and sigma2 > 0");
    if (x <= 0) return 0.0;
    if (x >= barrier) return 1.0;
    if (gamma == 0.0) return x / barrier;
    const double c = 2.0 * gamma / sigma2;
    return std::expm1(-c * x) / std::expm1(-c * barrier);
}

double stationary_density_one_sided(double gamma, double sigma2, double x) {
    if (!(gamma > 0)) throw InvalidArgument("stationary_density_one_sided: gamma must be positive");
    if (!(sigma2 > 0)) throw InvalidArgument("stationary_density_one_sided: sigma2 must be positive");
    if (x < 0) return 0.0;
    const double c = 2.0 * gamma / sigma2;
    return c * std::exp(-c * x);
}

namespace {

struct SeedRun {
    double rate = 0;      ///< fine-grid κ⁺(T)/T
    double coarse = 0;    ///< same path on the 4·dt grid
    std::vector<std::uint64_t> histogram;
};

SeedRun run_seed(const DrbmExperiment& ex, std::uint64_t seed) {
    const auto steps = static_cast<std::size_t>(std::llround(ex.horizon / ex.dt));
    Engine engine = make_engine(seed, Substream::brownian);
    boost::random::normal_distribution<double> step(-ex.gamma * ex.dt, std::sqrt(ex.sigma2 * ex.dt));
    TwoSidedReflector fine(ex.barrier), coarse(ex.barrier);
    SeedRun out;
    out.histogram.assign(ex.histogram_bins, 0);
    const double bin_scale = static_cast<double>(ex.histogram_bins) / ex.barrier;
    double x = 0, push = 0, coarse_push = 0;
    fine.push(0.0);
    coarse.push(0.0);
    std::size_t coarse_steps = 0;
    for (std::size_t i = 0; i < steps; ++i) {
        x += step(engine);
        push = std::max(push, -x);  // one-sided reflection of N*
        const double z = fine.push(x + push);
        auto bin = static_cast<std::size_t>(z * bin_scale);
        out.histogram[std::min(bin, ex.histogram_bins - 1)] += 1;
        if ((i + 1) % kCoarseFactor == 0) {
            coarse_push = std::max(coarse_push, -x);
            coarse.push(x + coarse_push);
            ++coarse_steps;
        }
    }
    out.rate = fine.upper() / ex.horizon;
    const double coarse_horizon = static_cast<double>(coarse_steps * kCoarseFactor) * ex.dt;
    out.coarse = coarse_horizon > 0 ? coarse.upper() / coarse_horizon : out.rate;
    return out;
}

}  // namespace

DrbmResult local_time_rate_mc(const DrbmExperiment& ex) {
    if (ex.seeds < 2) throw InvalidArgument("local_time_rate_mc: need at least two seeds");
    if (!(ex.horizon > 0) || !(ex.dt > 0)) throw InvalidArgument("local_time_rate_mc: need horizon > 0 and dt > 0");
    if (ex.histogram_bins == 0) throw InvalidArgument("local_time_rate_mc: need histogram bins");
    std::vector<SeedRun> runs(ex.seeds);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < ex.seeds; i = next++) runs[i] = run_seed(ex, ex.first_seed + i);
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min(ex.workers, ex.seeds));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    DrbmResult out;
    out.theory = renege_rate(ex.gamma, ex.sigma2, ex.barrier);
    Accumulator<double> sum, raw;
    for (const auto& r : runs) {
        // The grid error is c·√dt to leading order, so 2·fine − coarse (√4 = 2) cancels it.
        const double rate = ex.extrapolate ? 2.0 * r.rate - r.coarse : r.rate;
        out.per_seed.push_back(rate);
        sum.add(rate);
        raw.add(r.rate);
    }
    const double n = static_cast<double>(ex.seeds);
    out.estimate = sum.value() / n;
    out.raw_estimate = raw.value() / n;
    Accumulator<double> sq;
    for (double r : out.per_seed) sq.add((r - out.estimate) * (r - out.estimate));
    out.ci_half = 1.959963984540054 * std::sqrt(sq.value() / (n - 1) / n);

    std::vector<double> pooled(ex.histogram_bins, 0.0);
    double total = 0;
    for (const auto& r : runs) {
        for (std::size_t b = 0; b < ex.histogram_bins; ++b) pooled[b] += static_cast<double>(r.histogram[b]);
    }
    for (double c : pooled) total += c;
    double cum = 0, ks = 0;
    for (std::size_t b = 0; b < ex.histogram_bins; ++b) {
        cum += pooled[b];
        pooled[b] /= total;
        const double edge = ex.barrier * static_cast<double>(b + 1) / static_cast<double>(ex.histogram_bins);
        const double lower_edge = ex.barrier * static_cast<double>(b) / static_cast<double>(ex.histogram_bins);
        const double emp_hi = cum / total;
        const double emp_lo = (cum - pooled[b] * total) / total;
        ks = std::max(ks, std::abs(emp_hi - stationary_cdf(ex.gamma, ex.sigma2, ex.barrier, edge)));
        ks = std::max(ks, std::abs(emp_lo - stationary_cdf(ex.gamma, ex.sigma2, ex.barrier, lower_edge)));
    }
    out.ks_distance = ks;
    out.occupation = std::move(pooled);
    return out;
}

LeadProfile::LeadProfile(const LeadTimeSpec& spec, double n)
    : dist_(spec.distribution()), n_(n), scale_(std::sqrt(n)) {
    if (!(n >= 1)) throw InvalidArgument("lead_profile: scaling level must be at least 1");
    y_lo_ = spec.y_lo() / scale_;
    y_star_ = spec.y_hi() / scale_;
}

double LeadProfile::cdf(double y) const {
    const double x = y * scale_;
    const auto& p = dist_.params();
    switch (dist_.family()) {
        case Family::deterministic: return x >= p[0] ? 1.0 : 0.0;
        case Family::uniform:
            if (x < p[0]) return 0.0;
            if (x >= p[1]) return 1.0;
            return (x - p[0]) / (p[1] - p[0]);
        case Family::sequence: {
            std::size_t k = 0;
            for (double v : p) k += v <= x ? 1 : 0;
            return static_cast<double>(k) / static_cast<double>(p.size());
        }
        case Family::exponential: break;
    }
    throw InvalidArgument("lead_profile: unsupported lead family");
}

double LeadProfile::H(double y) const {
    if (y >= y_star_) return 0.0;
    const auto& p = dist_.params();
    switch (dist_.family()) {
        case Family::deterministic: return y_star_ - y;
        case Family::uniform: {
            const double a = p[0] / scale_, b = p[1] / scale_;
            if (a == b) return b - y;
            if (y >= a) return (b - y) * (b - y) / (2.0 * (b - a));
            return (a - y) + 0.5 * (b - a);
        }
        case Family::sequence: {
            Accumulator<double> acc;
            for (double v : p) acc.add(std::max(0.0, v / scale_ - y));
            return acc.value() / static_cast<double>(p.size());
        }
        case Family::exponential: break;
    }
    throw InvalidArgument("lead_profile: unsupported lead family");
}

double LeadProfile::H_inverse(double w) const {
    if (w < 0) throw InvalidArgument("frontier_from_workload: workload must be nonnegative");
    if (w == 0) return y_star_;
    const double h_lo = H(y_lo_);
    if (w >= h_lo) return y_lo_ - (w - h_lo);
    double lo = y_lo_, hi = y_star_;  // H(lo) > w > H(hi) = 0
    while (hi - lo > 1e-12 * std::max(1.0, std::abs(hi))) {
        const double mid = 0.5 * (lo + hi);
        if (H(mid) > w) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (mid == lo && mid == hi) break;
    }
    return 0.5 * (lo + hi);
}

LeadProfile lead_profile(const LeadTimeSpec& spec, double n) { return LeadProfile(spec, n); }

double frontier_from_workload(double w, const LeadProfile& profile) { return profile.H_inverse(w); }

void write_path_csv(std::ostream& out, const PathGrid& path) {
    out << "t,value\n";
    out.precision(17);
    for (std::size_t i = 0; i < path.size(); ++i) out << path.time(i) << ',' << path.values[i] << '\n';
}

}  // namespace edfsim::diffusion
