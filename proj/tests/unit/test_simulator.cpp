#include "edfsim/simulator.hpp"

#include <doctest.h>

#include "example43.hpp"

#include <boost/random/uniform_int_distribution.hpp>

#include <sstream>

using namespace edfsim;
using R = Rational;

namespace {

SystemTrajectory<R> example_run(const PolicySpec& policy) {
    return simulate_records<R>(example43::stream(), policy, R(9));
}

std::string atoms_text(const example43::Atoms& a) {
    std::ostringstream out;
    for (const auto& x : a) out << "(" << NumTraits<R>::format(x.location) << "," << NumTraits<R>::format(x.mass) << ")";
    return out.str();
}

void report(const R& t, const example43::Atoms& expected, const example43::Atoms& got) {
    MESSAGE("t=" << NumTraits<R>::format(t) << " expected " << atoms_text(expected) << " got " << atoms_text(got));
}

/// Integer-lattice streams with frequent ties.
std::vector<CustomerRecord> lattice_stream(Engine& engine) {
    boost::random::uniform_int_distribution<int> gap(0, 2), work(1, 6), lead(1, 8), size(1, 25);
    std::vector<double> g, v, l;
    const int n = size(engine);
    for (int i = 0; i < n; ++i) {
        g.push_back(gap(engine));
        v.push_back(0.5 * work(engine));
        l.push_back(lead(engine));
    }
    return make_stream(g, v, l);
}

}  // namespace

TEST_CASE("policy names parse") {
    CHECK(PolicySpec::parse("EDF") == PolicySpec::edf_reneging());
    CHECK(PolicySpec::parse("edf_standard") == PolicySpec::edf_standard());
    CHECK(PolicySpec::parse("fifo_reneging") == PolicySpec::fifo());
    CHECK(PolicySpec::parse("lifo") == PolicySpec::lifo());
    CHECK(PolicySpec::parse("random(17)") == PolicySpec::random(17));
    CHECK(PolicySpec::parse("hybrid") == PolicySpec::hybrid());
    CHECK_THROWS_AS(PolicySpec::parse("round_robin"), InvalidArgument);
    CHECK_THROWS_AS(PolicySpec::parse("random(x)"), InvalidArgument);
}

TEST_CASE("worked example: reneging EDF workload matches every displayed row") {
    const auto traj = example_run(PolicySpec::edf_reneging());
    const int bad = example43::check_table(
        example43::reneging_workload(), [&](const R& t) { return traj.state_at(t, false).workload->atoms(); }, report);
    CHECK(bad == 0);
}

TEST_CASE("worked example: standard EDF workload matches every displayed row") {
    const auto traj = example_run(PolicySpec::edf_standard());
    const int bad = example43::check_table(
        example43::standard_workload(), [&](const R& t) { return traj.state_at(t, false).workload->atoms(); }, report);
    CHECK(bad == 0);
}

TEST_CASE("worked example: reneged work jumps at 4, 6 and 7") {
    const auto traj = example_run(PolicySpec::edf_reneging());
    const auto curve = reneged_work_curve(traj);
    REQUIRE(curve.size() == 3);
    CHECK(curve[0].time == R(4));
    CHECK(curve[0].value == R(1));
    CHECK(curve[1].time == R(6));
    CHECK(curve[1].value == R(2));
    CHECK(curve[2].time == R(7));
    CHECK(curve[2].value == R(4));
    CHECK(traj.final.reneged_work == R(4));
    CHECK(traj.final.reneged_customers == 3);
}

TEST_CASE("worked example: frontier and current lead of the reneging system") {
    const auto traj = example_run(PolicySpec::edf_reneging());
    // Floor y* = 5: an idle system before the first arrival has F(t) = 5 − t.
    CHECK(traj.state_at(R(1, 2), false).frontier == R(9, 2));
    CHECK(traj.state_at(R(1), false).frontier == R(4));
    // Customer 2 (deadline 7) is served from 4 on: F = 7 − t.
    CHECK(traj.state_at(R(9, 2), false).frontier == R(5, 2));
    CHECK(traj.state_at(R(7), false).frontier == R(4));  // customer 4, deadline 11
    const auto track = frontier_track(traj);
    for (const auto& p : track) {
        CHECK(p.lead_after <= p.frontier_after);
        CHECK(p.lead_before <= p.frontier_before);
    }
}

TEST_CASE("worked example: standard system keeps late customers and counts late work") {
    const auto traj = example_run(PolicySpec::edf_standard());
    // Customer 1 has residual 1 at its deadline 4, customer 3 residual 1 at 6, customer 2 residual 4 at 7.
    CHECK(traj.final.late_work == R(6));
    CHECK(traj.final.late_customers == 3);
    CHECK(traj.final.reneged_work == R(0));
    const auto late = late_work_curve(traj);
    REQUIRE(late.size() == 3);
    CHECK(late[2].time == R(7));
    CHECK(traj.state_at(R(8), false).late_mass == R(3));
    CHECK_THROWS_AS(reneged_work_curve(traj), InvalidArgument);
}

TEST_CASE("worked example: event labels and trajectory CSV") {
    const auto traj = example_run(PolicySpec::edf_reneging());
    std::ostringstream out;
    write_trajectory_csv(out, traj);
    const std::string csv = out.str();
    CHECK(csv.rfind("time,event,total_work,total_queue,frontier,reneged_work,reneged_customers,idle\n", 0) == 0);
    CHECK(csv.find("7,renege+arrival,1,1,4,4,3,1\n") != std::string::npos);
    CHECK(csv.find("9,arrival+horizon,1,1,2,4,3,2\n") != std::string::npos);
}

TEST_CASE("customer outcomes record fate and frontier at arrival") {
    const auto traj = example_run(PolicySpec::edf_reneging());
    REQUIRE(traj.outcomes.size() == 5);
    CHECK(traj.outcomes[0].fate == Fate::reneged);
    CHECK(traj.outcomes[0].reneged_work == R(1));
    CHECK(traj.outcomes[3].fate == Fate::completed);
    CHECK(traj.outcomes[3].departure == R(8));
    CHECK(traj.outcomes[4].fate == Fate::present);
    CHECK(traj.outcomes[0].frontier_at_arrival == R(4));
}

TEST_CASE("FIFO loses strictly more work than EDF on a crafted three-customer instance") {
    // Customer 2 arrives at 0.5 with deadline 2 behind a long job with a late deadline.
    const auto stream = to_customers<R>(make_stream({0, 0.5, 0.5}, {2, 1, 1}, {10, 1.5, 5}));
    const auto suite = run_policy_suite(stream, {PolicySpec::fifo()}, R(20), R(10));
    CHECK(suite.reneged[0].back() == R(0));
    CHECK(suite.reneged[1].back() == R(1));
}

TEST_CASE("LIFO and RANDOM run and respect the EDF bound on the worked example") {
    const auto stream = to_customers<R>(example43::stream());
    const auto suite = run_policy_suite(stream, {PolicySpec::fifo(), PolicySpec::lifo(), PolicySpec::random(3),
                                                 PolicySpec::hybrid()},
                                        R(20), R(5));
    for (std::size_t p = 1; p < suite.policies.size(); ++p) {
        for (std::size_t i = 0; i < suite.times.size(); ++i) CHECK(suite.reneged[0][i] <= suite.reneged[p][i]);
    }
}

TEST_CASE("hybrid policy requires a companion run") {
    const auto stream = to_customers<R>(example43::stream());
    SimOptions<R> options;
    options.horizon = R(10);
    CHECK_THROWS_AS(simulate(stream, PolicySpec::hybrid(), options), InvalidArgument);
}

TEST_CASE("invalid streams are rejected") {
    SimOptions<double> options;
    options.horizon = 10;
    std::vector<Customer<double>> unsorted{{1, 2.0, 1.0, 1.0, 3.0}, {2, 1.0, 1.0, 1.0, 2.0}};
    CHECK_THROWS_AS(simulate(unsorted, PolicySpec::edf_reneging(), options), InvalidArgument);
    std::vector<Customer<double>> bad_service{{1, 1.0, 0.0, 1.0, 2.0}};
    CHECK_THROWS_AS(simulate(bad_service, PolicySpec::edf_reneging(), options), InvalidArgument);
    options.horizon = 0;
    CHECK_THROWS_AS(simulate(std::vector<Customer<double>>{}, PolicySpec::edf_reneging(), options), InvalidArgument);
}

TEST_CASE("samples are left limits on the grid") {
    SimOptions<R> options;
    options.horizon = R(9);
    options.frontier_floor = R(5);
    options.sample_interval = R(1);
    options.sample_measures = true;
    const auto stream = to_customers<R>(example43::stream());
    const auto traj = simulate(stream, PolicySpec::edf_reneging(), options);
    REQUIRE(traj.samples.size() == 9);
    // Left limit at 4: customer 1 still holds its last unit at lead 0.
    CHECK(traj.samples[3].time == R(4));
    CHECK(traj.samples[3].work == R(5));
    CHECK(traj.samples[3].reneged_work == R(0));
    CHECK(traj.samples[8].work == R(0));
    CHECK(traj.samples[8].reneged_work == R(4));
    const auto full = example_run(PolicySpec::edf_reneging());
    for (const auto& s : traj.samples) {
        const auto ref = full.state_at(s.time, true);
        CHECK(s.work == ref.work);
        CHECK(s.frontier == ref.frontier);
        CHECK(*s.workload == *ref.workload);
    }
}

TEST_CASE("property: work balance W = V(A) − t + I − R_W holds at every event") {
    Engine engine = make_engine(99, Substream::policy);
    for (int trial = 0; trial < 200; ++trial) {
        const auto records = lattice_stream(engine);
        for (auto policy : {PolicySpec::edf_reneging(), PolicySpec::edf_standard(), PolicySpec::fifo(),
                            PolicySpec::lifo(), PolicySpec::random(trial)}) {
            const auto traj = simulate_records<R>(records, policy, R(100), std::nullopt, false, false);
            for (const auto& e : traj.events) {
                for (const auto* s : {&e.before, &e.after}) {
                    REQUIRE(s->work == s->arrived_work - s->time + s->idle - s->reneged_work);
                    REQUIRE(s->work >= R(0));
                }
            }
        }
    }
}

TEST_CASE("property: EDF is work conserving and its frontier dominates the current lead") {
    Engine engine = make_engine(5, Substream::policy);
    for (int trial = 0; trial < 200; ++trial) {
        const auto records = lattice_stream(engine);
        const auto traj = simulate_records<R>(records, PolicySpec::edf_reneging(), R(60), std::nullopt, true, true);
        for (const auto& e : traj.events) {
            const auto& a = e.after;
            REQUIRE((a.work == R(0)) == (a.queue == 0));
            REQUIRE(a.in_service.has_value() == (a.queue > 0));
            if (a.in_service) REQUIRE(a.current_lead <= a.frontier);
            REQUIRE(a.workload->total() == a.work);
            // Reneging systems never hold mass at or below lead 0 after an epoch.
            REQUIRE(a.workload->mass_below(R(0)) == R(0));
        }
    }
}

TEST_CASE("double and rational runs agree on quantized random streams") {
    const StreamSpec spec{DistributionSpec::exponential(1.0), DistributionSpec::exponential(1.0 / 0.95),
                          LeadTimeSpec(DistributionSpec::uniform(1, 8))};
    const auto records = generate_stream(17, spec, {300, std::nullopt});
    const auto d = simulate_records<double>(records, PolicySpec::edf_reneging(), 400.0, 8.0, false, false);
    const auto r = simulate_records<R>(records, PolicySpec::edf_reneging(), R(400), R(8), false, false);
    REQUIRE(d.events.size() == r.events.size());
    for (std::size_t i = 0; i < d.events.size(); ++i) {
        REQUIRE(d.events[i].time == NumTraits<R>::to_double(r.events[i].time));
        REQUIRE(d.events[i].after.reneged_work == doctest::Approx(NumTraits<R>::to_double(r.events[i].after.reneged_work)));
    }
}
