#include "edfsim/reference.hpp"

#include <doctest.h>

#include "example43.hpp"

#include <boost/random/uniform_int_distribution.hpp>

#include <sstream>

using namespace edfsim;
using R = Rational;

namespace {

struct ExampleRuns {
    SystemTrajectory<R> standard;
    SystemTrajectory<R> reneging;
    ReferenceTrajectory<R> phi;
    ReferenceTrajectory<R> direct;
};

ExampleRuns example_runs() {
    const auto records = example43::stream();
    ExampleRuns r{simulate_records<R>(records, PolicySpec::edf_standard(), R(9)),
                  simulate_records<R>(records, PolicySpec::edf_reneging(), R(9)),
                  {},
                  {}};
    r.phi = phi_map(r.standard);
    r.direct = direct_reference_dynamics(to_customers<R>(records), r.standard);
    return r;
}

void report(const R& t, const example43::Atoms& expected, const example43::Atoms& got) {
    std::ostringstream out;
    out << "t=" << NumTraits<R>::format(t) << " expected";
    for (const auto& a : expected) out << " (" << a.location << "," << a.mass << ")";
    out << " got";
    for (const auto& a : got) out << " (" << a.location << "," << a.mass << ")";
    MESSAGE(out.str());
}

std::vector<CustomerRecord> lattice_stream(Engine& engine) {
    boost::random::uniform_int_distribution<int> gap(0, 3), work(1, 6), lead(1, 8), size(1, 30);
    std::vector<double> g, v, l;
    const int n = size(engine);
    for (int i = 0; i < n; ++i) {
        g.push_back(gap(engine));
        v.push_back(0.5 * work(engine));
        l.push_back(lead(engine));
    }
    return make_stream(g, v, l);
}

template <class Real>
InvariantReport full_audit(const std::vector<CustomerRecord>& records, const Real& horizon) {
    const auto standard = simulate_records<Real>(records, PolicySpec::edf_standard(), horizon);
    const auto reneging = simulate_records<Real>(records, PolicySpec::edf_reneging(), horizon);
    const auto phi = phi_map(standard);
    const auto direct = direct_reference_dynamics(to_customers<Real>(records), standard);
    InvariantReport report;
    report.merge(audit_reference(phi, standard));
    report.merge(audit_reference(direct, standard));
    report.merge(audit_system(standard));
    report.merge(audit_system(reneging));
    report.merge(compare_systems(reneging, phi).invariants);
    report.record("phi_equals_direct", reference_distance(phi, direct), 0);
    report.record("direct_equals_phi", reference_distance(direct, phi), 0);
    return report;
}

std::string failures(const InvariantReport& report, double tol) {
    std::string out;
    for (const auto& r : report.results) {
        if (r.max_violation > tol) out += r.name + "=" + std::to_string(r.max_violation) + " ";
    }
    return out;
}

}  // namespace

TEST_CASE("worked example: reference workload from the truncation map matches every displayed row") {
    const auto runs = example_runs();
    const int bad = example43::check_table(
        example43::reference_workload(), [&](const R& t) { return runs.phi.state_at(t, false).measure.atoms(); },
        report);
    CHECK(bad == 0);
}

TEST_CASE("worked example: reference workload from its own dynamics matches every displayed row") {
    const auto runs = example_runs();
    const int bad = example43::check_table(
        example43::reference_workload(), [&](const R& t) { return runs.direct.state_at(t, false).measure.atoms(); },
        report);
    CHECK(bad == 0);
}

TEST_CASE("worked example: K, its decomposition and the reference renege count") {
    const auto runs = example_runs();
    const auto at = [&](int t) { return runs.phi.state_at(R(t), false); };
    CHECK(at(8).k == R(4));
    CHECK(at(9).k == R(3));
    CHECK(at(9).k_plus == R(4));
    CHECK(at(9).k_minus == R(1));
    CHECK(at(9).reneged == R(4));
    CHECK(runs.phi.state_at(R(4), true).reneged == R(0));
    CHECK(at(4).reneged == R(1));
    CHECK(at(6).reneged == R(1));
    CHECK(at(7).reneged == R(4));
    // R_U ≤ R_W pathwise: R_W(6) = 2 while R_U(6) = 1.
    CHECK(at(6).reneged <= runs.reneging.state_at(R(6), false).reneged_work);
}

TEST_CASE("worked example: busy cycles of the reference system") {
    const auto runs = example_runs();
    CHECK(runs.phi.cycles.sigma == std::vector<R>{R(1), R(9)});
    CHECK(runs.phi.cycles.tau == std::vector<R>{R(8)});
    const auto k = k_decompose(runs.standard);
    CHECK(k.cycles.sigma == runs.phi.cycles.sigma);
    CHECK(k.reneged.back() == R(4));
}

TEST_CASE("worked example: every invariant holds exactly") {
    const auto report = full_audit<R>(example43::stream(), R(9));
    CHECK_MESSAGE(report.pass(0.0), failures(report, 0.0));
    CHECK(report.results.size() >= 20);
}

TEST_CASE("worked example: comparison CSV") {
    const auto runs = example_runs();
    const auto cmp = compare_systems(runs.reneging, runs.phi);
    std::ostringstream out;
    write_comparison_csv(out, cmp);
    const std::string csv = out.str();
    CHECK(csv.rfind("time,W,U,W_S,K,Kplus,Kminus,R_W,R_U,E,F,violation_flags\n", 0) == 0);
    CHECK(cmp.rows.size() >= 8);
}

TEST_CASE("truncation map requires a standard trajectory with measures") {
    const auto records = example43::stream();
    const auto reneging = simulate_records<R>(records, PolicySpec::edf_reneging(), R(9));
    CHECK_THROWS_AS(phi_map(reneging), InvalidArgument);
    const auto bare = simulate_records<R>(records, PolicySpec::edf_standard(), R(9), std::nullopt, false, false);
    CHECK_THROWS_AS(phi_map(bare), InvalidArgument);
}

TEST_CASE("property: both reference constructions agree and all relations hold on lattice streams (exact)") {
    Engine engine = make_engine(2024, Substream::policy);
    for (int trial = 0; trial < 300; ++trial) {
        const auto records = lattice_stream(engine);
        const auto report = full_audit<R>(records, R(records.back().S + 20));
        REQUIRE_MESSAGE(report.pass(0.0), "trial " << trial << ": " << failures(report, 0.0));
    }
}

TEST_CASE("property: relations hold in floating mode on random streams") {
    const StreamSpec spec{DistributionSpec::exponential(1.0), DistributionSpec::exponential(1.0 / 0.97),
                          LeadTimeSpec(DistributionSpec::uniform(0.5, 6))};
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto records = generate_stream(seed, spec, {150, std::nullopt});
        const auto report = full_audit<double>(records, records.back().S + 10);
        REQUIRE_MESSAGE(report.pass(kMassEpsilon), "seed " << seed << ": " << failures(report, kMassEpsilon));
    }
}
