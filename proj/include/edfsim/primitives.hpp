#pragma once

#include "edfsim/numeric.hpp"
#include "edfsim/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace edfsim {

/// Random draws are rounded to multiples of 2^-20 time units. Sums and
/// differences of such values are exact in double precision up to 2^33, so
/// event times in floating mode carry no rounding error.
inline constexpr int kQuantumBits = 20;

double quantize(double x);

/// Distribution family of a primitive sequence.
enum class Family { exponential, deterministic, uniform, sequence };

/// A distribution of a positive primitive (interarrival, service or lead time).
///
/// `sequence` replays a fixed list cyclically; it models recorded traces.
class DistributionSpec {
public:
    static DistributionSpec exponential(double rate);
    static DistributionSpec deterministic(double value);
    static DistributionSpec uniform(double lo, double hi);
    static DistributionSpec sequence(std::vector<double> values);

    /// Parses `exponential rate=0.5`, `exponential mean=2`, `deterministic value=1.96`,
    /// `uniform lo=5 hi=200` or `sequence values=1,1,3`.
    static DistributionSpec parse(std::string_view text);

    Family family() const { return family_; }
    double mean() const;
    double variance() const;
    double second_moment() const { return variance() + mean() * mean(); }
    double lower() const;
    /// Upper end of the support (+∞ for exponential).
    double upper() const;
    /// E[e^{sX}] if finite.
    std::optional<double> mgf(double s) const;
    /// True for families that draw from an engine.
    bool is_random() const { return family_ == Family::exponential || family_ == Family::uniform; }
    const std::vector<double>& params() const { return params_; }
    std::string to_string() const;

    /// Value number `index` (0-based) of the sequence drawn with `engine`.
    double sample(Engine& engine, std::uint64_t index) const;

    bool operator==(const DistributionSpec&) const = default;

private:
    DistributionSpec(Family f, std::vector<double> p) : family_(f), params_(std::move(p)) {}
    Family family_;
    std::vector<double> params_;
};

/// Initial lead-time law with strictly positive bounded support.
class LeadTimeSpec {
public:
    explicit LeadTimeSpec(DistributionSpec dist);
    const DistributionSpec& distribution() const { return dist_; }
    double y_lo() const { return dist_.lower(); }
    double y_hi() const { return dist_.upper(); }
    double mean() const { return dist_.mean(); }

private:
    DistributionSpec dist_;
};

/// The three primitive laws of a stream.
struct StreamSpec {
    DistributionSpec interarrival;
    DistributionSpec service;
    LeadTimeSpec lead;
};

/// One arriving customer; all fields in unscaled time units.
struct CustomerRecord {
    std::uint64_t index = 0;  ///< 1-based arrival order
    double u = 0;             ///< interarrival gap
    double v = 0;             ///< service requirement
    double L = 0;             ///< initial lead time
    double S = 0;             ///< arrival time
    double d = 0;             ///< deadline S + L

    bool operator==(const CustomerRecord&) const = default;
};

/// Lazily generated customer stream with three independent sub-streams.
class CustomerSource {
public:
    CustomerSource(std::uint64_t seed, StreamSpec spec);
    CustomerRecord next();
    const StreamSpec& spec() const { return spec_; }

private:
    StreamSpec spec_;
    Engine arrivals_;
    Engine services_;
    Engine leads_;
    std::uint64_t count_ = 0;
    double clock_ = 0;
};

/// Stopping rule for a generated stream: a customer count, an arrival-time
/// horizon (arrivals with S ≤ horizon), or both (whichever stops first).
struct StreamBound {
    std::optional<std::uint64_t> count;
    std::optional<double> horizon;
};

std::vector<CustomerRecord> generate_stream(std::uint64_t seed, const StreamSpec& spec, StreamBound bound);

/// Builds records from explicit gap, service and lead lists of equal length.
/// A zero gap makes two customers arrive together.
std::vector<CustomerRecord> make_stream(const std::vector<double>& gaps, const std::vector<double>& services,
                                        const std::vector<double>& leads);

/// Heavy-traffic parameters of a stream.
struct TrafficParams {
    double lambda;  ///< arrival rate 1/E[u]
    double mu;      ///< service rate 1/E[v]
    double alpha;   ///< standard deviation of u
    double beta;    ///< standard deviation of v
    double rho;     ///< λ/μ
    double sigma2;  ///< λ(α² + β²)
    double theta;   ///< 2(1 − ρ)/σ²
};

TrafficParams traffic_params(const DistributionSpec& interarrival, const DistributionSpec& service);

}  // namespace edfsim
