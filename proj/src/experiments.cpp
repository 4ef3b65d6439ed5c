#include "edfsim/experiments.hpp"

#include <boost/random/uniform_int_distribution.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

namespace edfsim::experiments {

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t n = std::max<std::size_t>(1, std::min(workers, count));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < n; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

template <class Real>
CustomerFeed<Real> make_feed(std::uint64_t seed, const StreamSpec& spec, double horizon) {
    auto source = std::make_shared<CustomerSource>(seed, spec);
    return [source, horizon]() -> std::optional<Customer<Real>> {
        const CustomerRecord r = source->next();
        if (r.S > horizon) return std::nullopt;
        Customer<Real> c;
        c.index = r.index;
        c.arrival = NumTraits<Real>::from_double(r.S);
        c.service = NumTraits<Real>::from_double(r.v);
        c.lead = NumTraits<Real>::from_double(r.L);
        c.deadline = c.arrival + c.lead;
        return c;
    };
}

template CustomerFeed<double> make_feed<double>(std::uint64_t, const StreamSpec&, double);
template CustomerFeed<Rational> make_feed<Rational>(std::uint64_t, const StreamSpec&, double);

SystemTrajectory<double> sampled_edf_run(std::uint64_t seed, const StreamSpec& spec, bool reneging,
                                         const SampledRunOptions& options) {
    SimOptions<double> sim;
    sim.horizon = options.horizon;
    sim.frontier_floor = spec.lead.y_hi();
    sim.record_events = false;
    sim.sample_interval = options.sample_interval;
    sim.sample_measures = options.sample_measures;
    const PolicySpec policy = reneging ? PolicySpec::edf_reneging() : PolicySpec::edf_standard();
    return simulate(make_feed<double>(seed, spec, options.horizon), policy, sim);
}

// ---------------------------------------------------------------- audit

template <class Real>
InvariantReport audit_stream(const std::vector<CustomerRecord>& records, double frontier_floor,
                             std::uint64_t policy_seed, const AuditOptions& options) {
    InvariantReport report;
    if (records.empty()) return report;
    const auto stream = to_customers<Real>(records);
    Real horizon(0);
    for (const auto& c : stream) {
        horizon = max_of(horizon, c.deadline);
        horizon += c.service;
    }
    SimOptions<Real> sim;
    sim.horizon = horizon;
    sim.frontier_floor = NumTraits<Real>::from_double(frontier_floor);
    sim.record_measures = true;
    sim.record_outcomes = true;
    const auto reneging = simulate(stream, PolicySpec::edf_reneging(), sim);
    const auto standard = simulate(stream, PolicySpec::edf_standard(), sim);
    report.merge(audit_system(reneging));
    report.merge(audit_system(standard));

    if (options.reference) {
        const auto phi = phi_map(standard);
        const auto direct = direct_reference_dynamics(stream, standard);
        report.merge(audit_reference(phi, standard));
        report.merge(audit_reference(direct, standard));
        report.record("phi_equals_direct", reference_distance(phi, direct), 0.0);
        report.record("direct_equals_phi", reference_distance(direct, phi), 0.0);
        report.merge(compare_systems(reneging, phi).invariants);
    }

    if (options.policies) {
        const std::vector<PolicySpec> rivals{PolicySpec::fifo(), PolicySpec::lifo(), PolicySpec::random(policy_seed),
                                             PolicySpec::hybrid()};
        const auto suite = run_policy_suite(stream, rivals, horizon, sim.frontier_floor);
        for (std::size_t p = 1; p < suite.policies.size(); ++p) {
            // The random policy's seed varies per stream; group its checks under one name.
            const auto& rival = suite.policies[p];
            const std::string name = "edf_optimality_vs_" + (rival.kind == PolicyKind::random_reneging
                                                                   ? std::string("random_reneging")
                                                                   : rival.name());
            report.entry(name);
            for (std::size_t i = 0; i < suite.times.size(); ++i) {
                const Real gap = suite.reneged[0][i] - suite.reneged[p][i];
                report.record(name, NumTraits<Real>::to_double(gap), NumTraits<Real>::to_double(suite.times[i]));
            }
        }
    }
    return report;
}

template InvariantReport audit_stream<double>(const std::vector<CustomerRecord>&, double, std::uint64_t,
                                              const AuditOptions&);
template InvariantReport audit_stream<Rational>(const std::vector<CustomerRecord>&, double, std::uint64_t,
                                                const AuditOptions&);

std::vector<std::vector<CustomerRecord>> edge_case_corpus(std::uint64_t seed, std::size_t lattice_streams) {
    std::vector<std::vector<CustomerRecord>> corpus;
    // The worked example with integer data.
    corpus.push_back(make_stream({1, 1, 3, 2, 2}, {4, 4, 2, 1, 1}, {3, 5, 1, 4, 1}));
    // Simultaneous arrivals with equal deadlines.
    corpus.push_back(make_stream({1, 0, 0, 1}, {1, 1, 1, 2}, {2, 2, 2, 1}));
    // An arrival exactly at another customer's deadline.
    corpus.push_back(make_stream({0.5, 1.5}, {3, 1}, {1.5, 2}));
    // Completion exactly at the deadline.
    corpus.push_back(make_stream({1, 2, 1}, {2, 1, 1}, {2, 1, 1}));
    // Arrival at a completion instant, and a deadline at the same time.
    corpus.push_back(make_stream({1, 1, 0}, {1, 2, 1}, {3, 1, 2}));
    // Services one quantum long next to long ones.
    const double q = std::ldexp(1.0, -kQuantumBits);
    corpus.push_back(make_stream({q, q, 1, q}, {q, 5, q, q}, {q * 2, 3, q, 1}));
    // Preemption by a more urgent arrival while the reference system is busy.
    corpus.push_back(make_stream({0, 1, 1, 1}, {4, 3, 1, 2}, {6, 2, 5, 1}));

    Engine engine = make_engine(seed, Substream::policy);
    boost::random::uniform_int_distribution<int> gap(0, 2), work(1, 4), lead(1, 6), size(2, 30);
    for (std::size_t s = 0; s < lattice_streams; ++s) {
        const int n = size(engine);
        std::vector<double> g, v, l;
        for (int i = 0; i < n; ++i) {
            g.push_back(i == 0 ? 1.0 : gap(engine));
            v.push_back(0.5 * work(engine));
            l.push_back(lead(engine));
        }
        corpus.push_back(make_stream(g, v, l));
    }
    return corpus;
}

AuditSummary run_audit(const ExperimentConfig& config) {
    const StreamSpec& spec = config.require_primitives();
    const AuditOptions options{config.audit.reference, config.audit.policies};
    const auto edge = edge_case_corpus(config.audit.first_seed, 50);
    const std::size_t total = config.audit.streams + edge.size();
    std::vector<InvariantReport> reports(total);
    parallel_for(total, config.workers, [&](std::size_t i) {
        std::vector<CustomerRecord> records;
        double floor = spec.lead.y_hi();
        if (i < config.audit.streams) {
            records = generate_stream(config.audit.first_seed + i, spec, {config.audit.customers, std::nullopt});
        } else {
            records = edge[i - config.audit.streams];
            floor = 0;
            for (const auto& r : records) floor = std::max(floor, r.L);
        }
        const std::uint64_t policy_seed = substream_seed(config.audit.first_seed, Substream::policy, i);
        reports[i] = config.run.rational ? audit_stream<Rational>(records, floor, policy_seed, options)
                                         : audit_stream<double>(records, floor, policy_seed, options);
    });
    AuditSummary summary;
    for (const auto& r : reports) summary.report.merge(r);
    summary.streams = config.audit.streams;
    summary.edge_streams = edge.size();
    return summary;
}

void write_audit_report(std::ostream& out, const InvariantReport& report, double tolerance) {
    char buf[256];
    for (const auto& r : report.results) {
        const bool ok = r.max_violation <= tolerance;
        std::snprintf(buf, sizeof buf, "%-36s checks=%-10zu max_violation=%-12.4g %s", r.name.c_str(), r.checks,
                      r.max_violation, ok ? "PASS" : "FAIL");
        out << buf;
        if (!ok && r.first_failure_time) out << " first_failure_t=" << *r.first_failure_time;
        out << '\n';
    }
}

// ---------------------------------------------------------------- sweep

SweepRow run_sweep_point(const StreamSpec& base, double upper, std::uint64_t seed, double horizon,
                         std::size_t batches, double warmup) {
    const StreamSpec spec{base.interarrival, base.service, lead_for_upper_bound(base.lead, upper)};
    const auto inputs = predict::PredictionInputs::from_primitives(spec.interarrival, spec.service, spec.lead);
    const SampledRunOptions run{horizon, horizon / static_cast<double>(100 * batches), false};
    const stats::BatchOptions batch{batches, warmup};

    SweepRow row;
    row.upper = upper;
    row.seed = seed;
    row.mean_lead = inputs.mean_lead;
    row.rho = inputs.rho;
    row.theta = inputs.theta;
    const auto standard = sampled_edf_run(seed, spec, false, run);
    const auto lateness = stats::long_run_fractions(standard, batch);
    row.late_customers = lateness[0];
    row.late_work = lateness[1];
    const auto reneging = sampled_edf_run(seed, spec, true, run);
    const auto losses = stats::long_run_fractions(reneging, batch);
    row.reneged_customers = losses[0];
    row.reneged_work = losses[1];
    row.arrivals = reneging.final.arrivals;
    row.theory_late = predict::fraction_late_work_standard(inputs);
    row.theory_lost_work = predict::fraction_lost_work_reneging(inputs);
    row.theory_lost_customers = predict::fraction_lost_customers_reneging(inputs).value;
    if (inputs.constant_deadlines) row.fifo_crosscheck = predict::fifo_constant_deadline_loss(inputs);
    return row;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config) {
    if (!config.sweep) throw ConfigError(config.source + ": [sweep] section is required");
    const StreamSpec& spec = config.require_primitives();
    const double horizon = config.run_horizon();
    const auto& bounds = config.sweep->upper_bounds;
    const auto& seeds = config.run.seeds;
    std::vector<SweepRow> rows(bounds.size() * seeds.size());
    parallel_for(rows.size(), config.workers, [&](std::size_t i) {
        rows[i] = run_sweep_point(spec, bounds[i / seeds.size()], seeds[i % seeds.size()], horizon, config.batches,
                                  config.warmup);
    });
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        return a.upper != b.upper ? a.upper < b.upper : a.seed < b.seed;
    });
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    using T = NumTraits<double>;
    out << "B,seed,mean_lead,rho,theta,arrivals,"
           "late_customer_fraction,late_customer_ci,late_work_fraction,late_work_ci,"
           "reneged_customer_fraction,reneged_customer_ci,reneged_work_fraction,reneged_work_ci,"
           "theory_late,theory_lost_work,theory_lost_customers,fifo_crosscheck\n";
    for (const auto& r : rows) {
        out << T::format(r.upper) << ',' << r.seed << ',' << T::format(r.mean_lead) << ',' << T::format(r.rho) << ','
            << T::format(r.theta) << ',' << r.arrivals;
        for (const auto* e : {&r.late_customers, &r.late_work, &r.reneged_customers, &r.reneged_work}) {
            out << ',' << T::format(e->point) << ',' << T::format(e->ci_half);
        }
        out << ',' << T::format(r.theory_late) << ',' << T::format(r.theory_lost_work) << ','
            << T::format(r.theory_lost_customers) << ',';
        if (r.fifo_crosscheck) out << T::format(*r.fifo_crosscheck);
        out << '\n';
    }
}

// ---------------------------------------------------------------- diffusion

std::vector<DiffusionRow> run_diffusion(const ExperimentConfig& config, std::optional<double> dt_override) {
    if (!config.diffusion) throw ConfigError(config.source + ": [diffusion] section is required");
    const auto& d = *config.diffusion;
    std::vector<DiffusionRow> rows;
    for (double gamma : d.gammas) {
        DiffusionRow row;
        row.experiment.gamma = gamma;
        row.experiment.sigma2 = d.sigma2;
        row.experiment.barrier = d.barrier;
        row.experiment.horizon = d.horizon;
        row.experiment.dt = dt_override.value_or(d.dt);
        row.experiment.seeds = d.seeds;
        row.experiment.first_seed = d.first_seed;
        row.experiment.workers = config.workers;
        row.experiment.histogram_bins = d.histogram_bins;
        row.experiment.extrapolate = d.extrapolate;
        row.result = diffusion::local_time_rate_mc(row.experiment);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_diffusion_csv(std::ostream& out, const std::vector<DiffusionRow>& rows) {
    using T = NumTraits<double>;
    out << "gamma,sigma2,H0,dt,T,seeds,estimate,ci_half,theory,ks_distance,raw_estimate\n";
    for (const auto& r : rows) {
        const auto& e = r.experiment;
        out << T::format(e.gamma) << ',' << T::format(e.sigma2) << ',' << T::format(e.barrier) << ','
            << T::format(e.dt) << ',' << T::format(e.horizon) << ',' << e.seeds << ',' << T::format(r.result.estimate)
            << ',' << T::format(r.result.ci_half) << ',' << T::format(r.result.theory) << ','
            << T::format(r.result.ks_distance) << ',' << T::format(r.result.raw_estimate) << '\n';
    }
}

}  // namespace edfsim::experiments
