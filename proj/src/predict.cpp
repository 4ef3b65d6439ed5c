#include "edfsim/predict.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace edfsim::predict {

namespace {

/// 1 − e^{−x} without cancellation.
double one_minus_exp_neg(double x) { return -std::expm1(-x); }

}  // namespace

PredictionInputs PredictionInputs::from_primitives(const DistributionSpec& interarrival,
                                                   const DistributionSpec& service, const LeadTimeSpec& lead) {
    const TrafficParams tp = traffic_params(interarrival, service);
    PredictionInputs in;
    in.rho = tp.rho;
    in.sigma2 = tp.sigma2;
    in.theta = tp.theta;
    in.mean_lead = lead.mean();
    in.mean_service = service.mean();
    in.service_second_moment = service.second_moment();
    in.service = service;
    in.poisson_arrivals = interarrival.family() == Family::exponential;
    in.constant_deadlines = lead.distribution().family() == Family::deterministic;
    return in;
}

void PredictionInputs::validate() const {
    if (!(rho > 0)) throw InvalidArgument("predict: rho must be positive");
    if (!(sigma2 > 0)) throw InvalidArgument("predict: sigma2 must be positive");
    if (!(mean_lead >= 0)) throw InvalidArgument("predict: mean lead time must be nonnegative");
    if (!std::isfinite(theta)) throw InvalidArgument("predict: theta must be finite");
    const double expected = 2.0 * (1.0 - rho) / sigma2;
    if (std::abs(theta - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
        throw InvalidArgument("predict: theta is inconsistent with rho and sigma2");
    }
}

double fraction_lost_work_reneging(const PredictionInputs& in) {
    in.validate();
    if (!(in.mean_lead > 0)) throw InvalidArgument("predict: mean lead time must be positive");
    if (in.rho == 1.0) return in.sigma2 / (2.0 * in.mean_lead);
    const double x = in.theta * in.mean_lead;
    return std::exp(-x) * (1.0 - in.rho) / (in.rho * one_minus_exp_neg(x));
}

double fraction_late_work_standard(const PredictionInputs& in) {
    in.validate();
    if (in.rho >= 1.0) return 1.0;
    return std::exp(-in.theta * in.mean_lead);
}

double work_ratio(const PredictionInputs& in) {
    in.validate();
    if (!(in.mean_lead > 0)) throw InvalidArgument("predict: mean lead time must be positive");
    if (in.rho >= 1.0) return in.sigma2 / (2.0 * in.mean_lead);
    return (1.0 - in.rho) / (in.rho * one_minus_exp_neg(in.theta * in.mean_lead));
}

CustomerLossPrediction fraction_lost_customers_reneging(const PredictionInputs& in) {
    if (!(in.mean_service > 0) || !(in.service_second_moment > 0)) {
        throw InvalidArgument("predict: service moments must be positive");
    }
    CustomerLossPrediction out;
    out.coefficient = 2.0 * in.mean_service * in.mean_service / in.service_second_moment;
    out.value = out.coefficient * fraction_lost_work_reneging(in);
    if (!in.poisson_arrivals) {
        out.caveat = "arrivals are not Poisson; the customer-loss heuristic assumes PASTA";
    } else if (!in.constant_deadlines) {
        out.caveat = "deadlines are not constant; the customer-loss heuristic is empirical here";
    }
    return out;
}

RenegeProbability renege_probability_and_excess(const PredictionInputs& in) {
    in.validate();
    if (in.theta == 0.0) throw InvalidArgument("predict: renege probability needs theta != 0");
    if (!in.service) throw InvalidArgument("predict: renege probability needs the service law");
    const auto mgf = in.service->mgf(in.theta);
    if (!mgf) throw InvalidArgument("predict: service moment generating function is infinite at theta");
    RenegeProbability out;
    out.probability = (*mgf - 1.0) / std::expm1(in.theta * in.mean_lead);
    out.excess = in.service_second_moment / (2.0 * in.mean_service);
    return out;
}

double fifo_constant_deadline_loss(const PredictionInputs& in) {
    const double p = fraction_late_work_standard(in);
    return (1.0 - in.rho) * p / (1.0 - in.rho * p);
}

void write_prediction_table(std::ostream& out, const PredictionInputs& in) {
    auto row = [&](const char* name, double value) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%-34s %.10g\n", name, value);
        out << buf;
    };
    row("rho", in.rho);
    row("sigma2", in.sigma2);
    row("mean_lead", in.mean_lead);
    row("mean_service", in.mean_service);
    row("service_second_moment", in.service_second_moment);
    row("theta", in.theta);
    row("fraction_lost_work_reneging", fraction_lost_work_reneging(in));
    row("fraction_late_work_standard", fraction_late_work_standard(in));
    row("work_ratio", work_ratio(in));
    const auto customers = fraction_lost_customers_reneging(in);
    row("fraction_lost_customers_reneging", customers.value);
    if (!customers.caveat.empty()) out << "  caveat: " << customers.caveat << '\n';
    if (in.theta != 0.0 && in.service && in.service->mgf(in.theta)) {
        const auto p = renege_probability_and_excess(in);
        row("renege_probability", p.probability);
        row("lost_work_given_renege", p.excess);
    } else {
        out << "renege_probability                 n/a\n";
    }
    if (in.constant_deadlines) row("fifo_constant_deadline_loss", fifo_constant_deadline_loss(in));
}

}  // namespace edfsim::predict
