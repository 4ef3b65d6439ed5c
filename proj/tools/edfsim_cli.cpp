#include "edfsim/config.hpp"
#include "edfsim/experiments.hpp"
#include "edfsim/predict.hpp"
#include "edfsim/reference.hpp"
#include "edfsim/simulator.hpp"
#include "edfsim/stats.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace edfsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInvariant = 2;

struct Overrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    bool rational = false;
    std::optional<std::size_t> workers;
    std::optional<double> warmup;
    std::optional<double> dt;
};

ExperimentConfig load_config(const Overrides& o) {
    ExperimentConfig cfg = ExperimentConfig::load(o.config_path);
    if (o.seed) {
        cfg.run.seeds = {*o.seed};
        cfg.audit.first_seed = *o.seed;
        if (cfg.diffusion) cfg.diffusion->first_seed = *o.seed;
    }
    if (o.out) cfg.output_dir = *o.out;
    if (o.rational) cfg.run.rational = true;
    if (o.workers) cfg.workers = *o.workers;
    if (o.warmup) {
        if (!(*o.warmup >= 0 && *o.warmup < 1)) throw ConfigError("--warmup must lie in [0, 1)");
        cfg.warmup = *o.warmup;
    }
    return cfg;
}

std::ofstream open_output(const ExperimentConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.output_dir);
    const fs::path path = fs::path(cfg.output_dir) / name;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    return out;
}

std::string file_tag(const PolicySpec& p) {
    std::string s = p.name();
    for (char& c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
    }
    while (!s.empty() && s.back() == '_') s.pop_back();
    return s;
}

template <class Real>
void simulate_seed(const ExperimentConfig& cfg, std::uint64_t seed, std::vector<stats::SteadyEstimate>& estimates) {
    const StreamSpec& spec = cfg.require_primitives();
    const double horizon = cfg.run_horizon();
    SimOptions<Real> sim;
    sim.horizon = NumTraits<Real>::from_double(horizon);
    sim.frontier_floor = NumTraits<Real>::from_double(spec.lead.y_hi());
    sim.record_events = cfg.run.record_events;
    sim.record_measures = cfg.run.write_measures;
    const bool sampled = NumTraits<Real>::exact == false;
    if (sampled) {
        sim.sample_interval = NumTraits<Real>::from_double(
            cfg.run.sample_interval.value_or(horizon / static_cast<double>(100 * cfg.batches)));
    }
    auto feed = [&]() {
        auto inner = experiments::make_feed<Real>(seed, spec, horizon);
        return CustomerFeed<Real>([inner, count = std::uint64_t(0), limit = cfg.run.arrivals]() mutable {
            if (limit && count >= *limit) return std::optional<Customer<Real>>();
            ++count;
            return inner();
        });
    };
    std::optional<SystemTrajectory<Real>> companion;
    for (const auto& policy : cfg.run.policies) {
        SimOptions<Real> opts = sim;
        if (policy.kind == PolicyKind::hybrid) {
            if (!companion) {
                SimOptions<Real> c = sim;
                c.record_outcomes = true;
                c.record_events = false;
                c.sample_interval.reset();
                companion = simulate(feed(), PolicySpec::edf_reneging(), c);
            }
            opts.companion = &companion->outcomes;
        }
        const auto traj = simulate(feed(), policy, opts);
        const std::string stem = "seed" + std::to_string(seed) + "_" + file_tag(policy);
        if (cfg.run.record_events) {
            auto out = open_output(cfg, "traj_" + stem + ".csv");
            write_trajectory_csv(out, traj);
        }
        if (cfg.run.write_measures && cfg.run.record_events) {
            auto out = open_output(cfg, "measures_" + stem + ".csv");
            write_measure_dump(out, traj);
        }
        if constexpr (std::is_same_v<Real, double>) {
            try {
                for (auto e : stats::long_run_fractions(traj, {cfg.batches, cfg.warmup})) {
                    e.metric = stem + "/" + e.metric;
                    estimates.push_back(e);
                }
            } catch (const InvalidArgument& e) {
                std::cerr << "note: no estimates for " << stem << ": " << e.what() << '\n';
            }
        }
        std::cout << stem << ": arrivals=" << traj.final.arrivals
                  << " reneged_work=" << NumTraits<Real>::format(traj.final.reneged_work)
                  << " late_work=" << NumTraits<Real>::format(traj.final.late_work) << '\n';
    }
}

int cmd_simulate(const Overrides& o) {
    const auto cfg = load_config(o);
    std::vector<stats::SteadyEstimate> estimates;
    for (auto seed : cfg.run.seeds) {
        if (cfg.run.rational) {
            simulate_seed<Rational>(cfg, seed, estimates);
        } else {
            simulate_seed<double>(cfg, seed, estimates);
        }
    }
    if (!estimates.empty()) {
        auto out = open_output(cfg, "estimates.csv");
        stats::write_estimates_csv(out, estimates);
    }
    return kExitOk;
}

int cmd_audit(const Overrides& o) {
    const auto cfg = load_config(o);
    const auto summary = experiments::run_audit(cfg);
    std::cout << "audit: " << summary.streams << " random streams, " << summary.edge_streams
              << " edge-case streams, tolerance " << cfg.audit.tolerance << '\n';
    experiments::write_audit_report(std::cout, summary.report, cfg.audit.tolerance);
    {
        auto out = open_output(cfg, "audit.txt");
        experiments::write_audit_report(out, summary.report, cfg.audit.tolerance);
    }
    const bool ok = summary.report.pass(cfg.audit.tolerance);
    std::cout << (ok ? "PASS" : "FAIL") << '\n';
    return ok ? kExitOk : kExitInvariant;
}

int cmd_sweep(const Overrides& o) {
    const auto cfg = load_config(o);
    const auto rows = experiments::run_sweep(cfg);
    auto out = open_output(cfg, "sweep.csv");
    experiments::write_sweep_csv(out, rows);
    experiments::write_sweep_csv(std::cout, rows);
    return kExitOk;
}

int cmd_diffusion(const Overrides& o) {
    const auto cfg = load_config(o);
    if (!cfg.diffusion) throw ConfigError(cfg.source + ": the diffusion subcommand needs a [diffusion] section");
    const auto rows = experiments::run_diffusion(cfg, o.dt);
    auto out = open_output(cfg, "diffusion.csv");
    experiments::write_diffusion_csv(out, rows);
    experiments::write_diffusion_csv(std::cout, rows);
    return kExitOk;
}

int cmd_predict(const Overrides& o) {
    const auto cfg = load_config(o);
    const StreamSpec& spec = cfg.require_primitives();
    std::vector<LeadTimeSpec> leads{spec.lead};
    if (cfg.sweep) {
        leads.clear();
        for (double b : cfg.sweep->upper_bounds) leads.push_back(lead_for_upper_bound(spec.lead, b));
    }
    for (const auto& lead : leads) {
        std::cout << "lead " << lead.distribution().to_string() << '\n';
        predict::write_prediction_table(
            std::cout, predict::PredictionInputs::from_primitives(spec.interarrival, spec.service, lead));
        std::cout << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete-event simulator for EDF queues with deadlines, reneging and reference systems"};
    app.require_subcommand(1);
    Overrides o;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "INI configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed-override", o.seed, "replace the configured seeds by this one");
        sub->add_option("--out", o.out, "output directory");
        sub->add_flag("--rational", o.rational, "exact rational arithmetic");
        sub->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--warmup", o.warmup, "warm-up fraction of the horizon");
    };
    auto* simulate = app.add_subcommand("simulate", "run each (seed, policy) and write trajectories and estimates");
    auto* audit = app.add_subcommand("audit", "check pathwise invariants on random and edge-case streams");
    auto* sweep = app.add_subcommand("sweep", "loss fractions over the lead-time upper bound");
    auto* diffusion = app.add_subcommand("diffusion", "local-time rate of the doubly reflected Brownian motion");
    auto* predict = app.add_subcommand("predict", "closed-form heavy-traffic predictions");
    for (auto* sub : {simulate, audit, sweep, diffusion, predict}) add_common(sub);
    diffusion->add_option("--dt", o.dt, "override the grid step")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*simulate) return cmd_simulate(o);
        if (*audit) return cmd_audit(o);
        if (*sweep) return cmd_sweep(o);
        if (*diffusion) return cmd_diffusion(o);
        if (*predict) return cmd_predict(o);
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << '\n';
        return kExitInvariant;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
