#pragma once

#include "edfsim/config.hpp"
#include "edfsim/diffusion.hpp"
#include "edfsim/predict.hpp"
#include "edfsim/reference.hpp"
#include "edfsim/stats.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace edfsim::experiments {

/// Runs fn(0), …, fn(count − 1) on up to `workers` threads. Exceptions are
/// rethrown in the caller (the first one by index).
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

/// Lazily generated stream of customers arriving in [0, horizon].
template <class Real>
CustomerFeed<Real> make_feed(std::uint64_t seed, const StreamSpec& spec, double horizon);

/// Options for a long sampled run used by the estimators.
struct SampledRunOptions {
    double horizon = 0;
    double sample_interval = 0;
    bool sample_measures = false;
};

/// Reneging or standard EDF over a generated stream, events not recorded, samples kept.
SystemTrajectory<double> sampled_edf_run(std::uint64_t seed, const StreamSpec& spec, bool reneging,
                                         const SampledRunOptions& options);

// ---------------------------------------------------------------- audit

struct AuditOptions {
    bool reference = true;
    bool policies = true;
};

/// All invariant checks on one stream: both EDF systems, both reference
/// constructions, their comparison, and (optionally) EDF optimality against
/// FIFO, LIFO, RANDOM and HYBRID.
template <class Real>
InvariantReport audit_stream(const std::vector<CustomerRecord>& records, double frontier_floor,
                             std::uint64_t policy_seed, const AuditOptions& options);

/// Hand-built streams with simultaneous events, deadlines that coincide with
/// arrivals and completions, and tiny services, plus lattice-valued random
/// streams that force ties.
std::vector<std::vector<CustomerRecord>> edge_case_corpus(std::uint64_t seed, std::size_t lattice_streams);

struct AuditSummary {
    InvariantReport report;
    std::size_t streams = 0;
    std::size_t edge_streams = 0;
};

/// Random corpus from the configured primitives plus the edge-case corpus.
AuditSummary run_audit(const ExperimentConfig& config);

void write_audit_report(std::ostream& out, const InvariantReport& report, double tolerance);

// ---------------------------------------------------------------- sweep

struct SweepRow {
    double upper = 0;  ///< B
    std::uint64_t seed = 0;
    double mean_lead = 0;
    double rho = 0;
    double theta = 0;
    std::uint64_t arrivals = 0;
    stats::SteadyEstimate late_customers, late_work, reneged_customers, reneged_work;
    double theory_late = 0;            ///< e^{−θD̄}
    double theory_lost_work = 0;       ///< fraction lost, reneging
    double theory_lost_customers = 0;  ///< customer-loss heuristic
    std::optional<double> fifo_crosscheck;
};

SweepRow run_sweep_point(const StreamSpec& base, double upper, std::uint64_t seed, double horizon,
                         std::size_t batches, double warmup);

/// One row per (B, seed), sorted by B then seed.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

// ---------------------------------------------------------------- diffusion

struct DiffusionRow {
    diffusion::DrbmExperiment experiment;
    diffusion::DrbmResult result;
};

std::vector<DiffusionRow> run_diffusion(const ExperimentConfig& config, std::optional<double> dt_override);

/// CSV `gamma,sigma2,H0,dt,T,seeds,estimate,ci_half,theory,ks_distance,raw_estimate`.
void write_diffusion_csv(std::ostream& out, const std::vector<DiffusionRow>& rows);

}  // namespace edfsim::experiments
