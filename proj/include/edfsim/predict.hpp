#pragma once

#include "edfsim/primitives.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace edfsim::predict {

/// Inputs of the closed-form heavy-traffic predictions. All times unscaled.
struct PredictionInputs {
    double rho = 0;
    double sigma2 = 0;
    double mean_lead = 0;  ///< D̄
    double theta = 0;      ///< 2(1 − ρ)/σ²
    double mean_service = 0;
    double service_second_moment = 0;
    /// Service law, used for the moment generating function in `renege_probability_and_excess`.
    std::optional<DistributionSpec> service;
    bool poisson_arrivals = false;
    bool constant_deadlines = false;

    /// Builds inputs from primitive laws; θ is taken from the exact ρ and σ².
    static PredictionInputs from_primitives(const DistributionSpec& interarrival, const DistributionSpec& service,
                                            const LeadTimeSpec& lead);
    void validate() const;
};

/// e^{−θD̄}(1 − ρ)/(ρ(1 − e^{−θD̄})), or σ²/(2D̄) at ρ = 1.
double fraction_lost_work_reneging(const PredictionInputs& in);

/// e^{−θD̄} for ρ < 1; 1 when ρ ≥ 1.
double fraction_late_work_standard(const PredictionInputs& in);

/// (1 − ρ)/(ρ(1 − e^{−θD̄})) for ρ < 1; σ²/(2D̄) for ρ ≥ 1.
double work_ratio(const PredictionInputs& in);

/// Customer loss fraction with its validity caveat.
struct CustomerLossPrediction {
    double value = 0;
    double coefficient = 0;  ///< 2(EV)²/E[V²]
    /// Empty when arrivals are Poisson and deadlines constant; otherwise says which hypothesis fails.
    std::string caveat;
};

CustomerLossPrediction fraction_lost_customers_reneging(const PredictionInputs& in);

struct RenegeProbability {
    double probability = 0;  ///< (E e^{θV} − 1)/(e^{θD̄} − 1)
    double excess = 0;       ///< E[V²]/(2EV)
};

RenegeProbability renege_probability_and_excess(const PredictionInputs& in);

/// (1 − ρ)P/(1 − ρP) with P = P{W > D̄} ≈ e^{−θD̄}: exact loss of a FIFO M/G/1 queue
/// with constant patience, written with the heavy-traffic waiting-time tail.
double fifo_constant_deadline_loss(const PredictionInputs& in);

/// Plain-text table of inputs, θ and all predictions.
void write_prediction_table(std::ostream& out, const PredictionInputs& in);

}  // namespace edfsim::predict
