#pragma once

#include "edfsim/measures.hpp"
#include "edfsim/numeric.hpp"
#include "edfsim/primitives.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace edfsim {

enum class PolicyKind {
    edf_reneging,
    edf_standard,
    fifo_reneging,
    lifo_reneging,
    random_reneging,
    hybrid,
};

/// Service discipline plus its parameters.
///
/// All kinds except `edf_standard` delete a customer's residual work when its
/// deadline passes. `hybrid` needs the customer outcomes of a reneging EDF run
/// over the same stream (see `SimOptions::companion`).
struct PolicySpec {
    PolicyKind kind = PolicyKind::edf_reneging;
    std::uint64_t seed = 0;  ///< only used by `random_reneging`

    static PolicySpec edf_reneging() { return {PolicyKind::edf_reneging}; }
    static PolicySpec edf_standard() { return {PolicyKind::edf_standard}; }
    static PolicySpec fifo() { return {PolicyKind::fifo_reneging}; }
    static PolicySpec lifo() { return {PolicyKind::lifo_reneging}; }
    static PolicySpec random(std::uint64_t seed) { return {PolicyKind::random_reneging, seed}; }
    static PolicySpec hybrid() { return {PolicyKind::hybrid}; }

    /// Accepts `edf_reneging`, `edf_standard`, `fifo`, `lifo`, `random(SEED)`, `hybrid`
    /// (case-insensitive; the `_reneging` suffix is optional).
    static PolicySpec parse(std::string_view text);

    std::string name() const;
    bool reneging() const { return kind != PolicyKind::edf_standard; }
    bool is_edf() const { return kind == PolicyKind::edf_reneging || kind == PolicyKind::edf_standard; }
    bool operator==(const PolicySpec&) const = default;
};

/// Bit flags describing what happened at an event epoch.
enum EventKind : unsigned {
    ev_arrival = 1u << 0,
    ev_completion = 1u << 1,
    ev_renege = 1u << 2,
    ev_zero_crossing = 1u << 3,
    ev_resume = 1u << 4,  ///< a policy decision time with no other event (hybrid only)
    ev_horizon = 1u << 5,
};

/// `arrival+renege` style label of a flag set.
std::string event_label(unsigned kinds);

/// Primitive data of one customer in the simulator's number type.
template <class Real>
struct Customer {
    std::uint64_t index = 0;
    Real arrival;
    Real service;
    Real lead;
    Real deadline;
};

template <class Real>
std::vector<Customer<Real>> to_customers(const std::vector<CustomerRecord>& records) {
    std::vector<Customer<Real>> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        Customer<Real> c;
        c.index = r.index;
        c.arrival = NumTraits<Real>::from_double(r.S);
        c.service = NumTraits<Real>::from_double(r.v);
        c.lead = NumTraits<Real>::from_double(r.L);
        c.deadline = c.arrival + c.lead;
        out.push_back(std::move(c));
    }
    return out;
}

/// System state at one instant (either a left limit or a post-event value).
template <class Real>
struct Snapshot {
    Real time{0};
    Real work{0};                ///< W(t) = 𝒲(t)(ℝ)
    std::uint64_t queue = 0;     ///< number of customers present
    Real frontier{0};            ///< F(t)
    Real current_lead{0};        ///< C(t)
    Real idle{0};                ///< cumulative idle time I(t)
    Real reneged_work{0};        ///< R_W(t)
    std::uint64_t reneged_customers = 0;
    Real late_work{0};           ///< standard mode: residual work at the deadline, summed
    std::uint64_t late_customers = 0;
    Real arrived_work{0};        ///< V(A(t))
    std::uint64_t arrivals = 0;  ///< A(t)
    Real late_mass{0};           ///< 𝒲(t)(−∞, 0]
    Real late_time{0};           ///< cumulative time with late_mass > 0
    std::optional<std::uint64_t> in_service;
    std::optional<AtomicMeasure<Real>> workload;  ///< 𝒲(t), when requested
    std::optional<AtomicMeasure<Real>> queue_measure;  ///< 𝒬(t), when requested
};

template <class Real>
struct EventRecord {
    Real time;
    unsigned kinds = 0;
    Snapshot<Real> before;  ///< left limit at `time`
    Snapshot<Real> after;   ///< value at `time`
};

enum class Fate { present, completed, reneged };

/// What happened to one customer.
template <class Real>
struct CustomerOutcome {
    std::uint64_t index = 0;
    Real arrival{0};
    Real lead{0};
    Real deadline{0};
    Real service{0};
    Real frontier_at_arrival{0};  ///< F(S_k) after the arrival epoch is processed
    Real work_below_frontier{0};  ///< 𝒲(S_k−)(0, F(S_k))
    Fate fate = Fate::present;
    std::optional<Real> departure;
    Real reneged_work{0};         ///< residual deleted at the deadline (reneging modes)
    bool late = false;            ///< standard mode: deadline passed while present
    Real late_residual{0};        ///< standard mode: residual at the deadline
};

template <class Real>
struct SimOptions {
    Real horizon{0};
    /// Floor of the frontier, y^* (largest possible lead time); F(t) ≥ y^* − t.
    Real frontier_floor{0};
    bool record_events = true;
    /// Attach 𝒲 and 𝒬 snapshots to both sides of every recorded event.
    bool record_measures = false;
    /// Sample left-limit snapshots at multiples of this interval (0 < g ≤ horizon).
    std::optional<Real> sample_interval;
    bool sample_measures = false;
    bool record_outcomes = false;
    /// Outcomes of a reneging EDF run over the same stream; required by `hybrid`.
    const std::vector<CustomerOutcome<Real>>* companion = nullptr;
};

/// Event log of one simulated system.
template <class Real>
struct SystemTrajectory {
    PolicySpec policy;
    Real horizon{0};
    Real frontier_floor{0};
    std::vector<EventRecord<Real>> events;
    std::optional<Real> sample_interval;
    std::vector<Snapshot<Real>> samples;
    std::vector<CustomerOutcome<Real>> outcomes;
    Snapshot<Real> final;  ///< state at the horizon

    /// State at time t: the left limit when `left` is true. Valid for EDF
    /// trajectories with `record_events`; between events the state evolves
    /// deterministically from the previous record.
    Snapshot<Real> state_at(const Real& t, bool left) const;
};

/// Pull interface over a customer stream sorted by arrival time.
template <class Real>
using CustomerFeed = std::function<std::optional<Customer<Real>>()>;

template <class Real>
SystemTrajectory<Real> simulate(const std::vector<Customer<Real>>& stream, const PolicySpec& policy,
                                const SimOptions<Real>& options);

template <class Real>
SystemTrajectory<Real> simulate(const CustomerFeed<Real>& feed, const PolicySpec& policy,
                                const SimOptions<Real>& options);

/// Convenience: converts records and uses the largest lead in the stream as the frontier floor
/// unless `frontier_floor` is given.
template <class Real>
SystemTrajectory<Real> simulate_records(const std::vector<CustomerRecord>& records, const PolicySpec& policy,
                                        const Real& horizon, std::optional<Real> frontier_floor = std::nullopt,
                                        bool record_measures = true, bool record_outcomes = true);

/// F and C on both sides of each event.
template <class Real>
struct FrontierPoint {
    Real time;
    Real frontier_before;
    Real frontier_after;
    Real lead_before;
    Real lead_after;
};

template <class Real>
std::vector<FrontierPoint<Real>> frontier_track(const SystemTrajectory<Real>& traj);

/// Post-event value of a nondecreasing step process at each change.
template <class Real>
struct StepPoint {
    Real time;
    Real value;
};

template <class Real>
std::vector<StepPoint<Real>> reneged_work_curve(const SystemTrajectory<Real>& traj);

template <class Real>
std::vector<StepPoint<Real>> late_work_curve(const SystemTrajectory<Real>& traj);

/// Reneged work of several reneging policies on a common event-time grid.
template <class Real>
struct PolicySuiteResult {
    std::vector<Real> times;  ///< union of all event times
    std::vector<PolicySpec> policies;
    std::vector<std::vector<Real>> reneged;  ///< reneged[p][i] = R_p(times[i])
};

/// Runs reneging EDF plus each listed policy. The EDF curve is always row 0.
template <class Real>
PolicySuiteResult<Real> run_policy_suite(const std::vector<Customer<Real>>& stream,
                                         const std::vector<PolicySpec>& policies, const Real& horizon,
                                         const Real& frontier_floor);

/// CSV `time,event,total_work,total_queue,frontier,reneged_work,reneged_customers,idle`.
template <class Real>
void write_trajectory_csv(std::ostream& out, const SystemTrajectory<Real>& traj);

/// CSV `time,side,location,mass`: full 𝒲 on both sides of every event.
template <class Real>
void write_measure_dump(std::ostream& out, const SystemTrajectory<Real>& traj);

/// Moves an EDF-served measure forward by dt: drift, then drain from the left.
template <class Real>
void advance_edf(AtomicMeasure<Real>& m, const Real& dt) {
    m.drift(dt);
    m.remove_leftmost_mass(min_of(dt, m.total()));
}

}  // namespace edfsim
