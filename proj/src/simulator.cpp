#include "edfsim/simulator.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include <algorithm>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <unordered_map>

namespace edfsim {

PolicySpec PolicySpec::parse(std::string_view text) {
    std::string s = boost::algorithm::to_lower_copy(boost::algorithm::trim_copy(std::string(text)));
    auto strip = [&](const std::string& suffix) {
        if (boost::algorithm::ends_with(s, suffix)) s.erase(s.size() - suffix.size());
    };
    if (boost::algorithm::starts_with(s, "random")) {
        auto open = s.find('(');
        auto close = s.find(')');
        std::uint64_t seed = 0;
        if (open != std::string::npos) {
            if (close == std::string::npos || close < open) throw InvalidArgument("policy: malformed '" + s + "'");
            try {
                seed = std::stoull(s.substr(open + 1, close - open - 1));
            } catch (const std::exception&) {
                throw InvalidArgument("policy: bad random seed in '" + s + "'");
            }
        }
        return random(seed);
    }
    strip("_reneging");
    if (s == "edf") return edf_reneging();
    if (s == "edf_standard" || s == "standard") return edf_standard();
    if (s == "fifo") return fifo();
    if (s == "lifo") return lifo();
    if (s == "hybrid") return hybrid();
    throw InvalidArgument("policy: unknown policy '" + std::string(text) + "'");
}

std::string PolicySpec::name() const {
    switch (kind) {
        case PolicyKind::edf_reneging: return "edf_reneging";
        case PolicyKind::edf_standard: return "edf_standard";
        case PolicyKind::fifo_reneging: return "fifo_reneging";
        case PolicyKind::lifo_reneging: return "lifo_reneging";
        case PolicyKind::random_reneging: return "random_reneging(" + std::to_string(seed) + ")";
        case PolicyKind::hybrid: return "hybrid";
    }
    return "unknown";
}

std::string event_label(unsigned kinds) {
    static const std::pair<unsigned, const char*> names[] = {
        {ev_completion, "completion"}, {ev_renege, "renege"},   {ev_zero_crossing, "zero-crossing"},
        {ev_arrival, "arrival"},       {ev_resume, "resume"},   {ev_horizon, "horizon"},
    };
    std::string out;
    for (const auto& [flag, name] : names) {
        if (kinds & flag) {
            if (!out.empty()) out += '+';
            out += name;
        }
    }
    return out;
}

namespace {

template <class Real>
struct Present {
    Customer<Real> c;
    Real residual;
    bool late = false;
    std::size_t slot = 0;  // position in the outcome vector
};

template <class Real>
struct State {
    bool reneging = true;
    Real t{0};
    std::map<std::uint64_t, Present<Real>> by_index;
    std::set<std::pair<Real, std::uint64_t>> by_deadline;
    std::set<std::pair<Real, std::uint64_t>> pending;  // standard mode: deadline not yet passed
    std::optional<std::uint64_t> in_service;
    Real work{0};
    Real late_mass{0};
    Real served_deadline_max{0};  // M(t); F(t) = M(t) − t
    Accumulator<Real> idle, reneged_work, late_work, arrived_work, late_time;
    std::uint64_t reneged_customers = 0, late_customers = 0, arrivals = 0;

    std::set<std::pair<Real, std::uint64_t>>& expiry_set() { return reneging ? by_deadline : pending; }
    const std::set<std::pair<Real, std::uint64_t>>& expiry_set() const { return reneging ? by_deadline : pending; }
    const Present<Real>& served() const { return by_index.at(*in_service); }
};

template <class Real>
class Policy {
public:
    virtual ~Policy() = default;
    virtual void on_arrival(const State<Real>&, const Present<Real>&) {}
    virtual void on_departure(const State<Real>&, const Present<Real>&) {}
    virtual std::optional<std::uint64_t> select(const State<Real>& s) = 0;
    virtual std::optional<Real> next_decision_time(const State<Real>&) const { return std::nullopt; }
};

template <class Real>
class EdfPolicy final : public Policy<Real> {
public:
    std::optional<std::uint64_t> select(const State<Real>& s) override {
        if (s.by_deadline.empty()) return std::nullopt;
        return s.by_deadline.begin()->second;
    }
};

template <class Real>
class FifoPolicy final : public Policy<Real> {
public:
    std::optional<std::uint64_t> select(const State<Real>& s) override {
        if (s.by_index.empty()) return std::nullopt;
        return s.by_index.begin()->first;
    }
};

template <class Real>
class LifoPolicy final : public Policy<Real> {
public:
    std::optional<std::uint64_t> select(const State<Real>& s) override {
        if (s.by_index.empty()) return std::nullopt;
        return s.by_index.rbegin()->first;
    }
};

/// Non-preemptive uniformly random choice among present customers.
template <class Real>
class RandomPolicy final : public Policy<Real> {
public:
    explicit RandomPolicy(std::uint64_t seed) : engine_(make_engine(seed, Substream::policy)) {}
    std::optional<std::uint64_t> select(const State<Real>& s) override {
        if (s.in_service && s.by_index.count(*s.in_service)) return s.in_service;
        if (s.by_index.empty()) return std::nullopt;
        boost::random::uniform_int_distribution<std::size_t> pick(0, s.by_index.size() - 1);
        return std::next(s.by_index.begin(), static_cast<std::ptrdiff_t>(pick(engine_)))->first;
    }

private:
    Engine engine_;
};

/// Customers arriving with lead below the companion EDF frontier form a FIFO
/// high-priority class. When that class is empty the server idles until the
/// companion has released every high-priority customer, then serves the
/// remaining customers by EDF.
template <class Real>
class HybridPolicy final : public Policy<Real> {
public:
    explicit HybridPolicy(const std::vector<CustomerOutcome<Real>>& companion) {
        for (const auto& o : companion) companion_[o.index] = &o;
    }
    void on_arrival(const State<Real>&, const Present<Real>& p) override {
        auto it = companion_.find(p.c.index);
        if (it == companion_.end()) throw InvalidArgument("hybrid: companion run lacks customer " + std::to_string(p.c.index));
        const CustomerOutcome<Real>& o = *it->second;
        if (p.c.lead < o.frontier_at_arrival) {
            high_.insert(p.c.index);
            if (!o.departure) throw InvalidArgument("hybrid: companion run ends before customer departs");
            release_ = max_of(release_, *o.departure);
        } else {
            low_.insert({p.c.deadline, p.c.index});
        }
    }
    void on_departure(const State<Real>&, const Present<Real>& p) override {
        high_.erase(p.c.index);
        low_.erase({p.c.deadline, p.c.index});
    }
    std::optional<std::uint64_t> select(const State<Real>& s) override {
        if (!high_.empty()) return *high_.begin();
        if (s.t < release_) return std::nullopt;
        if (low_.empty()) return std::nullopt;
        return low_.begin()->second;
    }
    std::optional<Real> next_decision_time(const State<Real>& s) const override {
        if (high_.empty() && s.t < release_) return release_;
        return std::nullopt;
    }

private:
    std::unordered_map<std::uint64_t, const CustomerOutcome<Real>*> companion_;
    std::set<std::uint64_t> high_;
    std::set<std::pair<Real, std::uint64_t>> low_;
    Real release_{0};
};

template <class Real>
std::unique_ptr<Policy<Real>> make_policy(const PolicySpec& spec, const SimOptions<Real>& options) {
    switch (spec.kind) {
        case PolicyKind::edf_reneging:
        case PolicyKind::edf_standard: return std::make_unique<EdfPolicy<Real>>();
        case PolicyKind::fifo_reneging: return std::make_unique<FifoPolicy<Real>>();
        case PolicyKind::lifo_reneging: return std::make_unique<LifoPolicy<Real>>();
        case PolicyKind::random_reneging: return std::make_unique<RandomPolicy<Real>>(spec.seed);
        case PolicyKind::hybrid:
            if (!options.companion) throw InvalidArgument("hybrid policy needs a companion reneging EDF run");
            return std::make_unique<HybridPolicy<Real>>(*options.companion);
    }
    throw InvalidArgument("unknown policy");
}

template <class Real>
AtomicMeasure<Real> workload_measure(const State<Real>& s, const Real& time, const Real& served_reduction) {
    AtomicMeasure<Real> m(time);
    for (const auto& [idx, p] : s.by_index) {
        Real r = p.residual;
        if (s.in_service && *s.in_service == idx) r -= served_reduction;
        if (!is_zero(r)) m.add_stored(p.c.deadline, r);
    }
    return m;
}

template <class Real>
AtomicMeasure<Real> queue_measure(const State<Real>& s, const Real& time) {
    AtomicMeasure<Real> m(time);
    for (const auto& [idx, p] : s.by_index) m.add_stored(p.c.deadline, Real(1));
    return m;
}

/// State at `time` ≥ s.t assuming no event in between.
template <class Real>
Snapshot<Real> snapshot_at(const State<Real>& s, const Real& time, bool with_measures) {
    const Real dt = time - s.t;
    const bool busy = s.in_service.has_value();
    Snapshot<Real> out;
    out.time = time;
    out.work = busy ? s.work - dt : s.work;
    out.queue = s.by_index.size();
    out.frontier = s.served_deadline_max - time;
    out.current_lead = busy ? s.served().c.deadline - time : out.frontier;
    out.idle = busy ? s.idle.value() : s.idle.value() + dt;
    out.reneged_work = s.reneged_work.value();
    out.reneged_customers = s.reneged_customers;
    out.late_work = s.late_work.value();
    out.late_customers = s.late_customers;
    out.arrived_work = s.arrived_work.value();
    out.arrivals = s.arrivals;
    out.late_mass = (busy && s.served().late) ? s.late_mass - dt : s.late_mass;
    out.late_time = s.late_time.value() + (Real(0) < s.late_mass ? dt : Real(0));
    out.in_service = s.in_service;
    if (with_measures) {
        out.workload = workload_measure(s, time, busy ? dt : Real(0));
        out.queue_measure = queue_measure(s, time);
    }
    return out;
}

template <class Real>
void advance(State<Real>& s, const Real& to) {
    const Real dt = to - s.t;
    if (dt < Real(0)) throw InvariantViolation("simulator: time moved backwards");
    if (Real(0) < s.late_mass) s.late_time.add(dt);
    if (s.in_service) {
        auto& p = s.by_index.at(*s.in_service);
        p.residual -= dt;
        s.work -= dt;
        if (p.late) s.late_mass -= dt;
    } else {
        s.idle.add(dt);
    }
    s.t = to;
}

template <class Real>
SystemTrajectory<Real> run(const CustomerFeed<Real>& feed, const PolicySpec& spec, const SimOptions<Real>& options) {
    if (!(Real(0) < options.horizon)) throw InvalidArgument("simulate: horizon must be positive");
    if (options.sample_interval && !(Real(0) < *options.sample_interval)) {
        throw InvalidArgument("simulate: sample interval must be positive");
    }
    auto policy = make_policy(spec, options);

    SystemTrajectory<Real> traj;
    traj.policy = spec;
    traj.horizon = options.horizon;
    traj.frontier_floor = options.frontier_floor;
    traj.sample_interval = options.sample_interval;

    State<Real> s;
    s.reneging = spec.reneging();
    s.served_deadline_max = options.frontier_floor;

    std::optional<Customer<Real>> upcoming = feed();
    Real last_arrival(0);
    auto check_next = [&]() {
        if (!upcoming) return;
        if (upcoming->arrival < last_arrival) throw InvalidArgument("simulate: stream is not sorted by arrival time");
        if (upcoming->arrival < Real(0)) throw InvalidArgument("simulate: negative arrival time");
        if (!(Real(0) < upcoming->service)) throw InvalidArgument("simulate: service must be positive");
        if (!(upcoming->arrival < upcoming->deadline)) throw InvalidArgument("simulate: deadline must follow arrival");
        if (options.horizon < upcoming->arrival) upcoming.reset();
    };
    check_next();

    std::uint64_t next_sample_k = 1;
    auto next_sample_time = [&]() { return Real(static_cast<long long>(next_sample_k)) * *options.sample_interval; };

    auto remove = [&](std::uint64_t idx, Fate fate) {
        auto it = s.by_index.find(idx);
        Present<Real> p = it->second;
        policy->on_departure(s, p);
        s.by_deadline.erase({p.c.deadline, idx});
        if (!s.reneging) s.pending.erase({p.c.deadline, idx});
        if (s.in_service && *s.in_service == idx) s.in_service.reset();
        if (p.late) s.late_mass -= p.residual;
        s.work -= p.residual;
        s.by_index.erase(it);
        if (options.record_outcomes) {
            auto& o = traj.outcomes[p.slot];
            o.fate = fate;
            o.departure = s.t;
            if (fate == Fate::reneged) o.reneged_work = p.residual;
        }
        return p;
    };

    while (true) {
        Real t_next = options.horizon;
        if (upcoming) t_next = min_of(t_next, upcoming->arrival);
        if (s.in_service) t_next = min_of(t_next, s.t + s.served().residual);
        const auto& exp = s.expiry_set();
        if (!exp.empty()) t_next = min_of(t_next, max_of(exp.begin()->first, s.t));
        if (auto d = policy->next_decision_time(s); d && s.t < *d) t_next = min_of(t_next, *d);

        if (options.sample_interval) {
            while (!(t_next < next_sample_time())) {
                traj.samples.push_back(snapshot_at(s, next_sample_time(), options.sample_measures));
                ++next_sample_k;
            }
        }

        advance(s, t_next);
        const Real t = s.t;
        Snapshot<Real> before;
        if (options.record_events) before = snapshot_at(s, t, options.record_measures);
        unsigned kinds = 0;

        // 1. service completion
        if (s.in_service && is_zero(s.served().residual)) {
            remove(*s.in_service, Fate::completed);
            kinds |= ev_completion;
        }
        // 2. deadline expiries
        while (!s.expiry_set().empty() && !(t < s.expiry_set().begin()->first)) {
            const std::uint64_t idx = s.expiry_set().begin()->second;
            if (s.reneging) {
                Present<Real> p = remove(idx, Fate::reneged);
                s.reneged_work.add(p.residual);
                ++s.reneged_customers;
                kinds |= ev_renege;
            } else {
                auto& p = s.by_index.at(idx);
                s.pending.erase(s.pending.begin());
                p.late = true;
                s.late_mass += p.residual;
                s.late_work.add(p.residual);
                ++s.late_customers;
                if (options.record_outcomes) {
                    traj.outcomes[p.slot].late = true;
                    traj.outcomes[p.slot].late_residual = p.residual;
                }
                kinds |= ev_zero_crossing;
            }
        }
        // 3. arrivals
        std::vector<std::uint64_t> arrived;
        while (upcoming && !(t < upcoming->arrival)) {
            Present<Real> p{*upcoming, upcoming->service};
            last_arrival = upcoming->arrival;
            if (options.record_outcomes) {
                p.slot = traj.outcomes.size();
                CustomerOutcome<Real> o;
                o.index = p.c.index;
                o.arrival = p.c.arrival;
                o.lead = p.c.lead;
                o.deadline = p.c.deadline;
                o.service = p.c.service;
                traj.outcomes.push_back(o);
            }
            if (s.by_index.count(p.c.index)) throw InvalidArgument("simulate: duplicate customer index");
            s.by_index.emplace(p.c.index, p);
            s.by_deadline.insert({p.c.deadline, p.c.index});
            if (!s.reneging) s.pending.insert({p.c.deadline, p.c.index});
            s.work += p.c.service;
            s.arrived_work.add(p.c.service);
            ++s.arrivals;
            arrived.push_back(p.c.index);
            policy->on_arrival(s, s.by_index.at(p.c.index));
            kinds |= ev_arrival;
            upcoming = feed();
            check_next();
        }
        // 4. service reassignment
        const auto chosen = policy->select(s);
        if (chosen != s.in_service) {
            s.in_service = chosen;
            if (chosen) s.served_deadline_max = max_of(s.served_deadline_max, s.served().c.deadline);
        }
        if (options.record_outcomes) {
            for (std::uint64_t idx : arrived) {
                const auto& p = s.by_index.at(idx);
                auto& o = traj.outcomes[p.slot];
                o.frontier_at_arrival = s.served_deadline_max - t;
                Accumulator<Real> below;
                for (const auto& [j, q] : s.by_index) {
                    if (j == idx) continue;
                    const Real loc = q.c.deadline - t;
                    if (Real(0) < loc && loc < o.frontier_at_arrival) below.add(q.residual);
                }
                o.work_below_frontier = below.value();
            }
        }
        if (s.by_index.empty() && is_zero(s.work)) s.work = Real(0);
        if (kinds == 0 && t < options.horizon) kinds |= ev_resume;
        const bool at_horizon = !(t < options.horizon);
        if (at_horizon) kinds |= ev_horizon;
        if (options.record_events) {
            traj.events.push_back({t, kinds, std::move(before), snapshot_at(s, t, options.record_measures)});
        }
        if (at_horizon) break;
    }
    traj.final = snapshot_at(s, s.t, options.record_measures);
    return traj;
}

template <class Real>
Snapshot<Real> initial_snapshot(const SystemTrajectory<Real>& traj, bool with_measures) {
    Snapshot<Real> s;
    s.frontier = traj.frontier_floor;
    s.current_lead = traj.frontier_floor;
    if (with_measures) {
        s.workload = AtomicMeasure<Real>();
        s.queue_measure = AtomicMeasure<Real>();
    }
    return s;
}

}  // namespace

template <class Real>
Snapshot<Real> SystemTrajectory<Real>::state_at(const Real& t, bool left) const {
    // Last event strictly before t (left limit) or at/before t (value).
    auto it = left ? std::lower_bound(events.begin(), events.end(), t,
                                      [](const EventRecord<Real>& e, const Real& x) { return e.time < x; })
                   : std::upper_bound(events.begin(), events.end(), t,
                                      [](const Real& x, const EventRecord<Real>& e) { return x < e.time; });
    if (left && it != events.end() && !(t < it->time) && !(it->time < t)) return it->before;
    const bool with_measures = !events.empty() && events.front().after.workload.has_value();
    Snapshot<Real> s = it == events.begin() ? initial_snapshot(*this, with_measures) : std::prev(it)->after;
    if (!left && it != events.begin() && !(std::prev(it)->time < t)) return s;
    const Real dt = t - s.time;
    const bool busy = s.in_service.has_value();
    s.time = t;
    s.frontier -= dt;
    s.current_lead -= dt;
    s.late_time += Real(0) < s.late_mass ? dt : Real(0);
    if (busy) {
        s.work -= dt;
        if (Real(0) < s.late_mass) s.late_mass -= dt;
    } else {
        s.idle += dt;
    }
    if (s.workload) {
        if (policy.is_edf()) {
            advance_edf(*s.workload, dt);
            s.queue_measure->drift(dt);
        } else {
            s.workload.reset();
            s.queue_measure.reset();
        }
    }
    return s;
}

template <class Real>
SystemTrajectory<Real> simulate(const CustomerFeed<Real>& feed, const PolicySpec& policy,
                                const SimOptions<Real>& options) {
    return run(feed, policy, options);
}

template <class Real>
SystemTrajectory<Real> simulate(const std::vector<Customer<Real>>& stream, const PolicySpec& policy,
                                const SimOptions<Real>& options) {
    std::size_t pos = 0;
    CustomerFeed<Real> feed = [&]() -> std::optional<Customer<Real>> {
        if (pos == stream.size()) return std::nullopt;
        return stream[pos++];
    };
    return run(feed, policy, options);
}

template <class Real>
SystemTrajectory<Real> simulate_records(const std::vector<CustomerRecord>& records, const PolicySpec& policy,
                                        const Real& horizon, std::optional<Real> frontier_floor,
                                        bool record_measures, bool record_outcomes) {
    auto stream = to_customers<Real>(records);
    SimOptions<Real> options;
    options.horizon = horizon;
    if (frontier_floor) {
        options.frontier_floor = *frontier_floor;
    } else {
        for (const auto& c : stream) options.frontier_floor = max_of(options.frontier_floor, c.lead);
    }
    options.record_measures = record_measures;
    options.record_outcomes = record_outcomes;
    return simulate(stream, policy, options);
}

template <class Real>
std::vector<FrontierPoint<Real>> frontier_track(const SystemTrajectory<Real>& traj) {
    if (!traj.policy.is_edf()) throw InvalidArgument("frontier_track: frontier is defined for EDF systems only");
    std::vector<FrontierPoint<Real>> out;
    out.reserve(traj.events.size());
    for (const auto& e : traj.events) {
        out.push_back({e.time, e.before.frontier, e.after.frontier, e.before.current_lead, e.after.current_lead});
    }
    return out;
}

template <class Real>
std::vector<StepPoint<Real>> reneged_work_curve(const SystemTrajectory<Real>& traj) {
    if (!traj.policy.reneging()) throw InvalidArgument("reneged_work_curve: trajectory is not a reneging system");
    std::vector<StepPoint<Real>> out;
    for (const auto& e : traj.events) {
        if (e.before.reneged_work < e.after.reneged_work) out.push_back({e.time, e.after.reneged_work});
    }
    return out;
}

template <class Real>
std::vector<StepPoint<Real>> late_work_curve(const SystemTrajectory<Real>& traj) {
    if (traj.policy.reneging()) throw InvalidArgument("late_work_curve: trajectory is not a standard system");
    std::vector<StepPoint<Real>> out;
    for (const auto& e : traj.events) {
        if (e.before.late_work < e.after.late_work) out.push_back({e.time, e.after.late_work});
    }
    return out;
}

template <class Real>
PolicySuiteResult<Real> run_policy_suite(const std::vector<Customer<Real>>& stream,
                                         const std::vector<PolicySpec>& policies, const Real& horizon,
                                         const Real& frontier_floor) {
    for (const auto& p : policies) {
        if (!p.reneging()) throw InvalidArgument("run_policy_suite: policies must be reneging-type");
    }
    SimOptions<Real> options;
    options.horizon = horizon;
    options.frontier_floor = frontier_floor;
    options.record_outcomes = true;
    std::vector<SystemTrajectory<Real>> runs;
    runs.reserve(policies.size() + 1);  // the companion pointer must stay valid
    runs.push_back(simulate(stream, PolicySpec::edf_reneging(), options));
    options.companion = &runs.front().outcomes;
    for (const auto& p : policies) runs.push_back(simulate(stream, p, options));

    PolicySuiteResult<Real> result;
    result.policies.push_back(PolicySpec::edf_reneging());
    for (const auto& p : policies) result.policies.push_back(p);
    for (const auto& r : runs) {
        for (const auto& e : r.events) result.times.push_back(e.time);
    }
    std::sort(result.times.begin(), result.times.end());
    result.times.erase(std::unique(result.times.begin(), result.times.end()), result.times.end());
    for (const auto& r : runs) {
        std::vector<Real> curve;
        curve.reserve(result.times.size());
        std::size_t k = 0;
        Real value(0);
        for (const auto& t : result.times) {
            while (k < r.events.size() && !(t < r.events[k].time)) value = r.events[k++].after.reneged_work;
            curve.push_back(value);
        }
        result.reneged.push_back(std::move(curve));
    }
    return result;
}

template <class Real>
void write_trajectory_csv(std::ostream& out, const SystemTrajectory<Real>& traj) {
    using T = NumTraits<Real>;
    out << "time,event,total_work,total_queue,frontier,reneged_work,reneged_customers,idle\n";
    for (const auto& e : traj.events) {
        const auto& a = e.after;
        out << T::format(e.time) << ',' << event_label(e.kinds) << ',' << T::format(a.work) << ',' << a.queue << ','
            << T::format(a.frontier) << ',' << T::format(a.reneged_work) << ',' << a.reneged_customers << ','
            << T::format(a.idle) << '\n';
    }
}

template <class Real>
void write_measure_dump(std::ostream& out, const SystemTrajectory<Real>& traj) {
    using T = NumTraits<Real>;
    out << "time,side,location,mass\n";
    for (const auto& e : traj.events) {
        for (const auto* side : {&e.before, &e.after}) {
            if (!side->workload) continue;
            const char* name = side == &e.before ? "before" : "after";
            for (const auto& a : side->workload->atoms()) {
                out << T::format(e.time) << ',' << name << ',' << T::format(a.location) << ',' << T::format(a.mass)
                    << '\n';
            }
        }
    }
}

#define EDFSIM_INSTANTIATE(R)                                                                                      \
    template struct SystemTrajectory<R>;                                                                           \
    template SystemTrajectory<R> simulate(const std::vector<Customer<R>>&, const PolicySpec&, const SimOptions<R>&); \
    template SystemTrajectory<R> simulate(const CustomerFeed<R>&, const PolicySpec&, const SimOptions<R>&);         \
    template SystemTrajectory<R> simulate_records(const std::vector<CustomerRecord>&, const PolicySpec&, const R&,  \
                                                  std::optional<R>, bool, bool);                                   \
    template std::vector<FrontierPoint<R>> frontier_track(const SystemTrajectory<R>&);                             \
    template std::vector<StepPoint<R>> reneged_work_curve(const SystemTrajectory<R>&);                             \
    template std::vector<StepPoint<R>> late_work_curve(const SystemTrajectory<R>&);                                \
    template PolicySuiteResult<R> run_policy_suite(const std::vector<Customer<R>>&, const std::vector<PolicySpec>&, \
                                                   const R&, const R&);                                            \
    template void write_trajectory_csv(std::ostream&, const SystemTrajectory<R>&);                                 \
    template void write_measure_dump(std::ostream&, const SystemTrajectory<R>&);

EDFSIM_INSTANTIATE(double)
EDFSIM_INSTANTIATE(Rational)

}  // namespace edfsim
