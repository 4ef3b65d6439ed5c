#include "edfsim/predict.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace edfsim;
using namespace edfsim::predict;

namespace {

PredictionInputs mm1(double upper = 200) {
    return PredictionInputs::from_primitives(DistributionSpec::exponential(0.5),
                                             DistributionSpec::exponential(1.0 / 1.96),
                                             LeadTimeSpec(DistributionSpec::uniform(5, upper)));
}

PredictionInputs md1(double upper = 200) {
    const auto lead = upper == 5 ? DistributionSpec::deterministic(5) : DistributionSpec::uniform(5, upper);
    return PredictionInputs::from_primitives(DistributionSpec::exponential(0.5), DistributionSpec::deterministic(1.96),
                                             LeadTimeSpec(lead));
}

PredictionInputs manual(double rho, double sigma2, double mean_lead) {
    PredictionInputs in;
    in.rho = rho;
    in.sigma2 = sigma2;
    in.mean_lead = mean_lead;
    in.theta = 2 * (1 - rho) / sigma2;
    in.mean_service = 1;
    in.service_second_moment = 2;
    in.service = DistributionSpec::exponential(1);
    return in;
}

/// Lost-work fraction evaluated in long double straight from the formula.
long double lost_work_oracle(long double rho, long double theta, long double d) {
    const long double e = std::exp(-theta * d);
    return e * (1 - rho) / (rho * (1 - e));
}

}  // namespace

TEST_CASE("inputs of the M/M/1 and M/D/1 examples") {
    const auto a = mm1();
    CHECK(a.rho == doctest::Approx(0.98));
    CHECK(a.theta == doctest::Approx(0.010202).epsilon(1e-4));
    CHECK(a.mean_lead == 102.5);
    CHECK(a.poisson_arrivals);
    CHECK_FALSE(a.constant_deadlines);
    const auto b = md1(5);
    CHECK(b.theta == doctest::Approx(0.02));
    CHECK(b.constant_deadlines);
    CHECK(b.mean_lead == 5.0);
}

TEST_CASE("lost-work fraction of the M/M/1 example") {
    const auto in = mm1();
    const double v = fraction_lost_work_reneging(in);
    CHECK(v == doctest::Approx(static_cast<double>(lost_work_oracle(in.rho, in.theta, 102.5))).epsilon(1e-12));
    // With θ rounded to 0.010202 the value is ≈ 0.01098.
    CHECK(std::abs(v / 0.01098 - 1) < 0.01);
    auto rounded = manual(0.98, 2 * 0.02 / 0.010202, 102.5);
    CHECK(fraction_lost_work_reneging(rounded) == doctest::Approx(0.01098).epsilon(2e-3));
}

TEST_CASE("lost-work fraction at critical load and its limits") {
    CHECK(fraction_lost_work_reneging(manual(1.0, 2.0, 100.0)) == doctest::Approx(0.01));
    CHECK(fraction_lost_work_reneging(manual(0.9, 2.0, 1e6)) < 1e-100);
    // Branch continuity across ρ = 1. Near 1 the formula expands to
    // σ²/(2D̄) · (1 + (1 − ρ)(1 − D̄/σ²)), so the gap is first order in 1 − ρ.
    for (double sigma2 : {1.0, 2.0, 3.9208}) {
        const double at_one = fraction_lost_work_reneging(manual(1.0, sigma2, 102.5));
        for (double gap : {1e-6, -1e-6}) {
            const double diff = fraction_lost_work_reneging(manual(1 - gap, sigma2, 102.5)) - at_one;
            CHECK(diff == doctest::Approx(at_one * gap * (1 - 102.5 / sigma2)).epsilon(1e-3));
        }
        CHECK(std::abs(fraction_lost_work_reneging(manual(1 - 1e-9, sigma2, 102.5)) - at_one) < 1e-8);
    }
}

TEST_CASE("late-work fraction of the standard system") {
    const auto in = md1();
    CHECK(fraction_late_work_standard(in) == doctest::Approx(std::exp(-2.05)).epsilon(1e-12));
    CHECK(fraction_late_work_standard(in) == doctest::Approx(0.12873).epsilon(1e-4));
    auto zero = manual(0.9, 2.0, 0.0);
    CHECK(fraction_late_work_standard(zero) == 1.0);
    CHECK(fraction_late_work_standard(manual(1.0, 2.0, 50)) == 1.0);
    CHECK(fraction_late_work_standard(manual(1.2, 2.0, 50)) == 1.0);
}

TEST_CASE("work ratio ties the two fractions together and approaches the log gap") {
    for (double rho : {0.8, 0.9, 0.95, 0.98, 0.995}) {
        for (double d : {5.0, 50.0, 102.5, 500.0}) {
            const auto in = manual(rho, 2.0, d);
            CHECK(work_ratio(in) * fraction_late_work_standard(in) ==
                  doctest::Approx(fraction_lost_work_reneging(in)).epsilon(1e-12));
        }
    }
    const auto far = manual(0.98, 2.0, 2000);
    const double gap = std::log(fraction_late_work_standard(far)) - std::log(fraction_lost_work_reneging(far));
    CHECK(gap == doctest::Approx(-std::log(0.02 / 0.98)).epsilon(1e-9));
    CHECK(-std::log(0.02 / 0.98) == doctest::Approx(3.8918).epsilon(1e-4));
    CHECK(work_ratio(manual(1.0, 2.0, 100.0)) == doctest::Approx(0.01));
}

TEST_CASE("customer-loss coefficient by service law") {
    const auto e = fraction_lost_customers_reneging(mm1());
    CHECK(e.coefficient == doctest::Approx(1.0));
    CHECK(e.value == doctest::Approx(fraction_lost_work_reneging(mm1())));
    CHECK(e.caveat.find("not constant") != std::string::npos);
    const auto d = fraction_lost_customers_reneging(md1(5));
    CHECK(d.coefficient == doctest::Approx(2.0));
    CHECK(d.caveat.empty());
    const auto u = PredictionInputs::from_primitives(DistributionSpec::deterministic(2),
                                                     DistributionSpec::uniform(0.5, 1.5),
                                                     LeadTimeSpec(DistributionSpec::deterministic(10)));
    const auto c = fraction_lost_customers_reneging(u);
    CHECK(c.coefficient > 0);
    CHECK(c.coefficient <= 2);
    CHECK(c.caveat.find("Poisson") != std::string::npos);
}

TEST_CASE("renege probability and residual work of the M/D/1 example") {
    const auto p = renege_probability_and_excess(md1());
    CHECK(p.probability == doctest::Approx(std::expm1(0.0392) / std::expm1(2.05)).epsilon(1e-12));
    CHECK(p.probability == doctest::Approx(0.0059070).epsilon(1e-4));
    CHECK(p.excess == doctest::Approx(0.98));
    // P · excess / E[V] reproduces the lost-work fraction up to the θ-expansion error.
    const double chain = p.probability * p.excess / 1.96;
    CHECK(chain == doctest::Approx(fraction_lost_work_reneging(md1())).epsilon(0.05));
}

TEST_CASE("renege probability tends to E[V]/D̄ as θ → 0") {
    PredictionInputs in = manual(1 - 1e-7, 2.0, 100);
    in.service = DistributionSpec::deterministic(1.0);
    in.mean_service = 1;
    in.service_second_moment = 1;
    CHECK(renege_probability_and_excess(in).probability == doctest::Approx(1.0 / 100).epsilon(1e-5));
    CHECK_THROWS_AS(renege_probability_and_excess(manual(1.0, 2.0, 100)), InvalidArgument);
    PredictionInputs heavy = manual(0.2, 1.0, 10);  // θ = 1.6 exceeds the exponential rate 1
    CHECK_THROWS_AS(renege_probability_and_excess(heavy), InvalidArgument);
}

TEST_CASE("FIFO crosscheck for constant deadlines") {
    const auto in = md1(5);
    const double p = std::exp(-0.02 * 5);
    CHECK(fifo_constant_deadline_loss(in) == doctest::Approx(0.02 * p / (1 - 0.98 * p)).epsilon(1e-12));
}

TEST_CASE("property: fractions lie in [0, 1] and lost work decreases in D̄ and in 1 − ρ") {
    // The lost-work fraction is at most σ²/(2ρD̄), so D̄ ≥ σ²/(2ρ) keeps it in [0, 1].
    for (double rho = 0.5; rho < 1.0; rho += 0.05) {
        double last = INFINITY;
        for (double d = 2; d <= 400; d *= 1.5) {
            const auto in = manual(rho, 2.0, d);
            const double v = fraction_lost_work_reneging(in);
            CHECK(v >= 0);
            CHECK(v <= 1);
            CHECK(v < last);
            CHECK(fraction_late_work_standard(in) <= 1);
            CHECK(work_ratio(in) > 0);
            last = v;
        }
    }
    double last = 0;
    for (double rho = 0.5; rho < 1.0; rho += 0.05) {
        const double v = fraction_lost_work_reneging(manual(rho, 2.0, 50));
        CHECK(v > last);
        last = v;
    }
}

TEST_CASE("inconsistent inputs are rejected") {
    auto in = manual(0.9, 2.0, 10);
    in.theta = 0.5;
    CHECK_THROWS_AS(fraction_lost_work_reneging(in), InvalidArgument);
    CHECK_THROWS_AS(fraction_lost_work_reneging(manual(0.0, 2.0, 10)), InvalidArgument);
    CHECK_THROWS_AS(fraction_lost_work_reneging(manual(0.9, 2.0, 0)), InvalidArgument);
}

TEST_CASE("prediction table lists every output") {
    std::ostringstream out;
    write_prediction_table(out, md1(5));
    const std::string s = out.str();
    for (const char* key : {"theta", "fraction_lost_work_reneging", "fraction_late_work_standard", "work_ratio",
                            "fraction_lost_customers_reneging", "renege_probability", "fifo_constant_deadline_loss"}) {
        CHECK(s.find(key) != std::string::npos);
    }
    std::ostringstream critical;
    write_prediction_table(critical, manual(1.0, 2.0, 100));
    CHECK(critical.str().find("n/a") != std::string::npos);
}
