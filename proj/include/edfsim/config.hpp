#pragma once

#include "edfsim/primitives.hpp"
#include "edfsim/simulator.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace edfsim {

/// Configuration error with the source location of the offending entry.
class ConfigError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

struct RunBlock {
    std::vector<PolicySpec> policies{PolicySpec::edf_reneging(), PolicySpec::edf_standard()};
    std::optional<double> horizon;
    std::optional<std::uint64_t> arrivals;
    std::vector<std::uint64_t> seeds{1};
    /// Sample grid spacing; defaults to horizon / (100 · batches) when estimates are wanted.
    std::optional<double> sample_interval;
    bool sample_measures = false;
    bool rational = false;
    bool record_events = true;
    bool write_measures = false;
};

struct AuditBlock {
    std::size_t streams = 100;
    std::uint64_t customers = 200;
    std::uint64_t first_seed = 1;
    bool reference = true;
    bool policies = true;
    double tolerance = kMassEpsilon;
};

/// The sweep axis is the upper end B of the lead-time law: leads become
/// uniform on [lower, B], or deterministic when B equals the lower end.
struct SweepBlock {
    std::vector<double> upper_bounds;
};

struct DiffusionBlock {
    std::vector<double> gammas{0.0};
    double sigma2 = 1;
    double barrier = 1;
    double dt = 1e-4;
    double horizon = 200;
    std::size_t seeds = 100;
    std::uint64_t first_seed = 1;
    std::size_t histogram_bins = 2000;
    bool extrapolate = true;
};

struct ExperimentConfig {
    std::string source = "<config>";
    std::optional<StreamSpec> primitives;
    RunBlock run;
    AuditBlock audit;
    std::optional<SweepBlock> sweep;
    std::optional<DiffusionBlock> diffusion;
    std::string output_dir = "out";
    double warmup = 0.05;
    std::size_t batches = 32;
    std::size_t workers = 1;

    /// INI text with sections [primitives], [run], [audit], [sweep], [diffusion], [output].
    static ExperimentConfig parse(std::istream& in, const std::string& source = "<config>");
    static ExperimentConfig load(const std::string& path);

    const StreamSpec& require_primitives() const;
    /// Horizon of a run: the configured one, or arrivals × mean interarrival time.
    double run_horizon() const;
};

/// Lead law of sweep point B: uniform on [lower, B], deterministic when B = lower.
LeadTimeSpec lead_for_upper_bound(const LeadTimeSpec& base, double upper);

}  // namespace edfsim
