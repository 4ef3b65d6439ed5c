#include "edfsim/reference.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace edfsim {

InvariantResult& InvariantReport::entry(const std::string& name) {
    for (auto& r : results) {
        if (r.name == name) return r;
    }
    results.push_back(InvariantResult{name, 0, 0, std::nullopt});
    return results.back();
}

void InvariantReport::record(const std::string& name, double violation, double time) {
    auto& r = entry(name);
    ++r.checks;
    if (violation > r.max_violation) r.max_violation = violation;
    if (violation > kMassEpsilon && !r.first_failure_time) r.first_failure_time = time;
}

void InvariantReport::merge(const InvariantReport& other) {
    for (const auto& o : other.results) {
        auto& r = entry(o.name);
        r.checks += o.checks;
        if (o.max_violation > r.max_violation) {
            r.max_violation = o.max_violation;
            if (!r.first_failure_time) r.first_failure_time = o.first_failure_time;
        }
    }
}

bool InvariantReport::pass(double tolerance) const {
    return std::all_of(results.begin(), results.end(),
                       [&](const InvariantResult& r) { return r.max_violation <= tolerance; });
}

double InvariantReport::worst() const {
    double w = 0;
    for (const auto& r : results) w = std::max(w, r.max_violation);
    return w;
}

namespace {

template <class Real>
double to_d(const Real& x) {
    return NumTraits<Real>::to_double(x);
}

template <class Real>
Real abs_of(const Real& x) {
    return x < Real(0) ? -x : x;
}

template <class Real>
void require_standard(const SystemTrajectory<Real>& standard) {
    if (standard.policy.kind != PolicyKind::edf_standard) {
        throw InvalidArgument("reference: input must be a standard EDF trajectory");
    }
    if (standard.events.empty() || !standard.events.front().after.workload) {
        throw InvalidArgument("reference: standard trajectory lacks recorded measures (left limits)");
    }
}

template <class Real>
ReferenceState<Real> make_state(const Real& time, const AtomicMeasure<Real>& standard_measure, const Real& k,
                                const Real& k_plus, const Real& k_minus, const Real& reneged, const Real& busy_time,
                                const Snapshot<Real>& standard) {
    ReferenceState<Real> s;
    s.time = time;
    s.measure = standard_measure.truncated(k);
    s.work = s.measure.total();
    s.standard_work = standard.work;
    s.k = k;
    s.k_plus = k_plus;
    s.k_minus = k_minus;
    s.reneged = reneged;
    s.busy_time = busy_time;
    s.arrived_work = standard.arrived_work;
    return s;
}

template <class Real>
ReferenceTrajectory<Real> build_phi(const SystemTrajectory<Real>& standard) {
    require_standard(standard);
    const Real eps = NumTraits<Real>::epsilon();
    ReferenceTrajectory<Real> out;
    out.horizon = standard.horizon;

    bool busy = false;
    Real k(0), k_plus(0), k_minus(0), reneged(0), busy_time(0);
    Real prev_time(0), prev_standard(0), prev_work(0), prev_arrived(0);

    for (const auto& e : standard.events) {
        const Real t = e.time;
        // U drains at unit rate on a busy cycle; it may reach 0 strictly between events.
        if (busy) {
            const Real hit = prev_time + prev_work;
            if (hit < t) {
                busy_time += prev_work;
                ReferenceState<Real> s;
                s.time = hit;
                s.measure = AtomicMeasure<Real>(hit);
                s.standard_work = prev_standard - prev_work;
                s.k = k;
                s.k_plus = k_plus;
                s.k_minus = k_minus;
                s.reneged = reneged;
                s.busy_time = busy_time;
                s.arrived_work = prev_arrived;
                if (eps < abs_of(k - s.standard_work)) throw InvariantViolation("phi_map: K(tau) != W_S(tau)");
                out.points.push_back({hit, true, s, s});
                out.cycles.tau.push_back(hit);
                busy = false;
                prev_time = hit;
                prev_standard = s.standard_work;
                prev_work = Real(0);
            }
        }
        // Left limit at t.
        if (busy) {
            busy_time += t - prev_time;
        } else {
            const Real k_left = e.before.work;
            k_minus += k - k_left;
            k = k_left;
        }
        ReferenceState<Real> before =
            make_state(t, *e.before.workload, k, k_plus, k_minus, reneged, busy_time, e.before);
        const Real ejected = before.measure.mass_at(Real(0));

        // Value at t.
        if (!busy && (e.kinds & ev_arrival)) {
            if (eps < e.after.late_mass - k) throw InvariantViolation("phi_map: K jumps at the start of a busy cycle");
            busy = true;
            out.cycles.sigma.push_back(t);
        }
        if (busy) {
            const Real next_k = max_of(k, e.after.late_mass);
            k_plus += next_k - k;
            k = next_k;
        } else {
            k_minus += k - e.after.work;
            k = e.after.work;
        }
        reneged += ejected;
        ReferenceState<Real> after = make_state(t, *e.after.workload, k, k_plus, k_minus, reneged, busy_time, e.after);
        if (busy && after.work <= eps) {
            if (eps < abs_of(k - e.after.work)) throw InvariantViolation("phi_map: K(tau) != W_S(tau)");
            busy = false;
            out.cycles.tau.push_back(t);
        }
        out.points.push_back({t, false, std::move(before), after});
        prev_time = t;
        prev_standard = e.after.work;
        prev_work = after.work;
        prev_arrived = e.after.arrived_work;
    }
    return out;
}

template <class Real>
ReferenceState<Real> initial_state() {
    return {};
}

}  // namespace

template <class Real>
ReferenceState<Real> ReferenceTrajectory<Real>::state_at(const Real& t, bool left) const {
    auto it = left ? std::lower_bound(points.begin(), points.end(), t,
                                      [](const ReferencePoint<Real>& p, const Real& x) { return p.time < x; })
                   : std::upper_bound(points.begin(), points.end(), t,
                                      [](const Real& x, const ReferencePoint<Real>& p) { return x < p.time; });
    if (left && it != points.end() && !(t < it->time) && !(it->time < t)) return it->before;
    ReferenceState<Real> s = it == points.begin() ? initial_state<Real>() : std::prev(it)->after;
    if (!left && it != points.begin() && !(std::prev(it)->time < t)) return s;
    const Real dt = t - s.time;
    const Real served = min_of(dt, s.work);
    advance_edf(s.measure, dt);
    s.time = t;
    s.work = s.measure.total();
    s.busy_time += served;
    s.standard_work = positive_part(s.standard_work - dt);
    s.k = s.standard_work - s.work;
    s.k_minus = s.k_plus - s.k;
    return s;
}

template <class Real>
ReferenceTrajectory<Real> phi_map(const SystemTrajectory<Real>& standard) {
    return build_phi(standard);
}

template <class Real>
KDecomposition<Real> k_decompose(const SystemTrajectory<Real>& standard) {
    auto ref = build_phi(standard);
    KDecomposition<Real> out;
    for (const auto& p : ref.points) {
        out.times.push_back(p.time);
        out.k.push_back(p.after.k);
        out.k_plus.push_back(p.after.k_plus);
        out.k_minus.push_back(p.after.k_minus);
        out.reneged.push_back(p.after.reneged);
    }
    out.cycles = std::move(ref.cycles);
    return out;
}

template <class Real>
ReferenceTrajectory<Real> direct_reference_dynamics(const std::vector<Customer<Real>>& stream,
                                                    const SystemTrajectory<Real>& standard) {
    require_standard(standard);
    const Real eps = NumTraits<Real>::epsilon();
    ReferenceTrajectory<Real> out;
    out.horizon = standard.horizon;

    AtomicMeasure<Real> u;  // 𝒰, stored at absolute deadlines
    Real reneged(0), busy_time(0), t(0);
    std::size_t next = 0;
    bool busy = false;

    // Serve and drift up to `to`, handling mass that reaches location 0 on the way.
    auto advance_to = [&](const Real& to) {
        while (t < to) {
            Real stop = to;
            if (auto e = u.leftmost(); e && t + *e < stop) stop = t + *e;
            const Real dt = stop - t;
            const Real served = min_of(dt, u.total());
            busy_time += served;
            u.drift_to(stop);
            u.remove_leftmost_mass(served);
            t = stop;
            if (t < to) reneged += u.remove_at_or_below(Real(0));
        }
    };
    auto state = [&](const Snapshot<Real>& s) {
        ReferenceState<Real> r;
        r.time = t;
        r.measure = u;
        r.work = u.total();
        r.standard_work = s.work;
        r.k = s.work - r.work;
        r.reneged = reneged;
        r.k_plus = reneged;
        r.k_minus = r.k_plus - r.k;
        r.busy_time = busy_time;
        r.arrived_work = s.arrived_work;
        return r;
    };

    for (const auto& e : standard.events) {
        advance_to(e.time);
        ReferenceState<Real> before = state(e.before);
        // (ii) mass reaching location 0 leaves the reference system.
        reneged += u.remove_at_or_below(Real(0));
        const Real u_mid = u.total();
        const auto e_left = u.leftmost();
        bool reconcile = false;
        std::vector<const Customer<Real>*> arriving;
        while (next < stream.size() && !(e.time < stream[next].arrival)) {
            if (stream[next].arrival < e.time) throw InvalidArgument("direct_reference_dynamics: stream/trajectory mismatch");
            const auto& c = stream[next++];
            arriving.push_back(&c);
            if (is_zero(u_mid) || !e_left || c.lead < *e_left) reconcile = true;
        }
        if (reconcile) {
            // Arrival left of E(t−) or at an empty reference: 𝒰(t) is 𝒲_S(t)
            // truncated by K(t) = W_S(t−) − U(t−) (after the ejection above).
            u = e.after.workload->truncated(e.before.work - u_mid);
            u.drift_to(t);
        } else {
            for (const auto* c : arriving) u.add_stored(c->deadline, c->service);  // (iii) plain insertion
        }
        if (!busy && eps < u.total()) {
            busy = true;
            out.cycles.sigma.push_back(e.time);
        } else if (busy && u.total() <= eps) {
            busy = false;
            out.cycles.tau.push_back(e.time);
        }
        out.points.push_back({e.time, false, std::move(before), state(e.after)});
    }
    return out;
}

template <class Real>
double reference_distance(const ReferenceTrajectory<Real>& a, const ReferenceTrajectory<Real>& b) {
    double worst = 0;
    for (const auto& p : a.points) {
        for (bool left : {true, false}) {
            const auto& sa = left ? p.before : p.after;
            const auto sb = b.state_at(p.time, left);
            worst = std::max(worst, to_d(cdf_distance(sa.measure, sb.measure)));
            worst = std::max(worst, std::abs(to_d(sa.reneged) - to_d(sb.reneged)));
        }
    }
    return worst;
}

template <class Real>
InvariantReport audit_reference(const ReferenceTrajectory<Real>& ref, const SystemTrajectory<Real>& standard) {
    InvariantReport rep;
    const Real eps = NumTraits<Real>::epsilon();
    Real prev_k_plus(0), prev_k_minus(0);
    Real prev_work(0), prev_time(0);
    for (const auto& p : ref.points) {
        const double time = to_d(p.time);
        for (bool left : {true, false}) {
            const auto& s = left ? p.before : p.after;
            const auto ws = standard.state_at(p.time, left);
            // Φ(μ)(t)(−∞,0] = 0; a left limit may carry the mass about to be ejected at 0.
            const Real neg = left ? s.measure.mass_in(Interval<Real>{std::nullopt, Real(0), false, false})
                                  : s.measure.mass_in(Interval<Real>::at_most(Real(0)));
            rep.record("phi_positivity", to_d(neg), time);
            rep.record("U_nonnegative", to_d(-s.work), time);
            rep.record("U_le_W_S", to_d(s.work - s.standard_work), time);
            if (auto e = s.leftmost()) {
                auto right_u = s.measure.restrict(Interval<Real>::above(*e));
                auto right_ws = ws.workload->restrict(Interval<Real>::above(*e));
                rep.record("U_equals_W_S_right_of_E", to_d(cdf_distance(right_u, right_ws)), time);
            }
            rep.record("K_decomposition", to_d(abs_of(s.k - (s.k_plus - s.k_minus))), time);
            rep.record("K_equals_W_S_minus_U", to_d(abs_of(s.k - (s.standard_work - s.work))), time);
            rep.record("R_U_equals_K_plus", to_d(abs_of(s.reneged - s.k_plus)), time);
            rep.record("U_accounting", to_d(abs_of(s.work - (s.arrived_work - s.busy_time - s.reneged))), time);
            rep.record("K_plus_nondecreasing", to_d(prev_k_plus - s.k_plus), time);
            rep.record("K_minus_nondecreasing", to_d(prev_k_minus - s.k_minus), time);
            // K⁻ may only grow where U = 0. U drains at unit rate between epochs, so the
            // stretch since the previous side reaches 0 exactly when the drain covers its work.
            const Real grow = s.k_minus - prev_k_minus;
            const bool touches_zero = prev_work <= (p.time - prev_time) + eps;
            rep.record("complementarity", touches_zero ? 0.0 : to_d(positive_part(grow)), time);
            prev_k_plus = s.k_plus;
            prev_k_minus = s.k_minus;
            prev_work = s.work;
            prev_time = p.time;
        }
    }
    // U ≡ 0 on [τ_k, σ_{k+1}).
    for (std::size_t k = 0; k < ref.cycles.tau.size(); ++k) {
        const Real& tau = ref.cycles.tau[k];
        const bool has_next = k + 1 < ref.cycles.sigma.size();
        for (const auto& p : ref.points) {
            if (p.time < tau || (has_next && !(p.time < ref.cycles.sigma[k + 1]))) continue;
            rep.record("U_zero_between_cycles", to_d(p.after.work), to_d(p.time));
        }
    }
    for (const auto& sigma : ref.cycles.sigma) {
        const auto l = ref.state_at(sigma, true);
        const auto r = ref.state_at(sigma, false);
        rep.record("K_continuous_at_sigma", to_d(abs_of(r.k - l.k)), to_d(sigma));
    }
    for (const auto& tau : ref.cycles.tau) {
        const auto r = ref.state_at(tau, false);
        rep.record("K_equals_W_S_at_tau", to_d(abs_of(r.k - r.standard_work)), to_d(tau));
    }
    return rep;
}

template <class Real>
InvariantReport audit_system(const SystemTrajectory<Real>& traj) {
    InvariantReport rep;
    const Real eps = NumTraits<Real>::epsilon();
    const bool edf = traj.policy.is_edf();
    std::optional<Real> first_arrival;
    Real best_m(0);
    const Snapshot<Real>* prev = nullptr;
    for (const auto& e : traj.events) {
        const double time = to_d(e.time);
        if (!first_arrival && (e.kinds & ev_arrival)) first_arrival = e.time;
        for (const auto* s : {&e.before, &e.after}) {
            const Real balance = s->work - (s->arrived_work - (s->time - s->idle) - s->reneged_work);
            rep.record("W_accounting", to_d(abs_of(balance)), time);
            rep.record("R_W_le_arrived_work", to_d(s->reneged_work - s->arrived_work), time);
            if (traj.policy.reneging() && s == &e.after) {
                Real late = s->late_mass;
                if (s->workload) late = s->workload->mass_in(Interval<Real>::at_most(Real(0)));
                rep.record("no_late_mass_when_reneging", to_d(late), time);
            }
            if (edf) {
                if (s->queue > 0) rep.record("C_le_F", to_d(s->current_lead - s->frontier), time);
                const bool after_first = first_arrival && (*first_arrival < e.time || s == &e.after);
                if (after_first) {
                    const Real m = s->frontier + s->time;
                    rep.record("frontier_drift_bound", to_d(best_m - m), time);
                    best_m = max_of(best_m, m);
                }
            }
            if (prev && edf) {
                // Idle time may only accrue while the system is empty.
                if (eps < prev->work) rep.record("work_conservation", to_d(s->idle - prev->idle), time);
            }
            prev = s;
        }
    }
    return rep;
}

template <class Real>
ComparisonReport<Real> compare_systems(const SystemTrajectory<Real>& reneging, const ReferenceTrajectory<Real>& ref) {
    if (reneging.policy.kind != PolicyKind::edf_reneging) {
        throw InvalidArgument("compare_systems: first trajectory must be reneging EDF");
    }
    const Real eps = NumTraits<Real>::epsilon();
    ComparisonReport<Real> report;
    auto& rep = report.invariants;

    std::vector<Real> times;
    for (const auto& e : reneging.events) times.push_back(e.time);
    for (const auto& p : ref.points) times.push_back(p.time);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    // Per-customer D-bound terms and deletions of customers that arrived below the frontier.
    std::vector<const CustomerOutcome<Real>*> by_arrival;
    std::vector<const CustomerOutcome<Real>*> deleted;
    for (const auto& o : reneging.outcomes) {
        by_arrival.push_back(&o);
        if (o.fate == Fate::reneged && o.lead < o.frontier_at_arrival) deleted.push_back(&o);
    }
    if (by_arrival.empty() && !times.empty() && reneging.final.arrivals > 0) {
        throw InvalidArgument("compare_systems: reneging trajectory lacks customer outcomes");
    }
    std::sort(by_arrival.begin(), by_arrival.end(),
              [](auto* a, auto* b) { return a->arrival < b->arrival; });
    std::sort(deleted.begin(), deleted.end(), [](auto* a, auto* b) { return *a->departure < *b->departure; });
    auto term = [](const CustomerOutcome<Real>& o) {
        if (!(o.lead < o.frontier_at_arrival)) return Real(0);
        return min_of(o.service, positive_part(o.work_below_frontier + o.service - o.lead));
    };

    std::size_t ia = 0, id = 0;
    Accumulator<Real> bound, deleted_work;
    Real best_gap(0);
    bool have_cycle = false;
    std::size_t next_sigma = 0;
    std::optional<Real> first_arrival;
    if (!by_arrival.empty()) first_arrival = by_arrival.front()->arrival;
    Real best_m(0);

    for (const auto& t : times) {
        for (bool left : {true, false}) {
            const double time = to_d(t);
            while (ia < by_arrival.size() && (left ? by_arrival[ia]->arrival < t : !(t < by_arrival[ia]->arrival))) {
                bound.add(term(*by_arrival[ia++]));
            }
            while (id < deleted.size() && (left ? *deleted[id]->departure < t : !(t < *deleted[id]->departure))) {
                deleted_work.add(deleted[id++]->reneged_work);
            }
            const auto w = reneging.state_at(t, left);
            const auto u = ref.state_at(t, left);
            std::string flags;
            auto check = [&](const std::string& name, const Real& violation) {
                rep.record(name, to_d(violation), time);
                if (eps < violation) flags += (flags.empty() ? "" : "|") + name;
            };
            check("W_le_U", w.work - u.work);
            check("R_U_le_R_W", u.reneged - w.reneged_work);
            const Real gap = w.reneged_work - u.reneged;
            if (have_cycle) check("renege_comparison_per_cycle", best_gap - gap);
            if (left && next_sigma < ref.cycles.sigma.size() && !(t < ref.cycles.sigma[next_sigma]) &&
                !(ref.cycles.sigma[next_sigma] < t)) {
                best_gap = have_cycle ? max_of(best_gap, gap) : gap;
                have_cycle = true;
                ++next_sigma;
            }
            std::optional<Real> e = u.leftmost();
            if (!left && eps < u.work && e) check("E_le_F", *e - w.frontier);
            check("U_minus_W_le_D", (u.work - w.work) - deleted_work.value());
            check("D_bound", (u.work - w.work) - bound.value());
            check("W_accounting", abs_of(w.work - (w.arrived_work - (t - w.idle) - w.reneged_work)));
            check("U_accounting", abs_of(u.work - (u.arrived_work - u.busy_time - u.reneged)));
            if (first_arrival && (*first_arrival < t || (!left && !(t < *first_arrival)))) {
                const Real m = w.frontier + t;
                check("frontier_drift_bound", best_m - m);
                best_m = max_of(best_m, m);
            }
            if (!left) {
                report.rows.push_back({t, left, w.work, u.work, u.standard_work, u.k, u.k_plus, u.k_minus,
                                       w.reneged_work, u.reneged, e, w.frontier, flags});
            } else if (!flags.empty()) {
                report.rows.push_back({t, left, w.work, u.work, u.standard_work, u.k, u.k_plus, u.k_minus,
                                       w.reneged_work, u.reneged, e, w.frontier, flags + "(left)"});
            }
        }
    }
    return report;
}

template <class Real>
void write_comparison_csv(std::ostream& out, const ComparisonReport<Real>& report) {
    using T = NumTraits<Real>;
    out << "time,W,U,W_S,K,Kplus,Kminus,R_W,R_U,E,F,violation_flags\n";
    for (const auto& r : report.rows) {
        out << T::format(r.time) << ',' << T::format(r.W) << ',' << T::format(r.U) << ',' << T::format(r.W_S) << ','
            << T::format(r.K) << ',' << T::format(r.K_plus) << ',' << T::format(r.K_minus) << ','
            << T::format(r.R_W) << ',' << T::format(r.R_U) << ',' << (r.E ? T::format(*r.E) : std::string("inf"))
            << ',' << T::format(r.F) << ',' << r.flags << '\n';
    }
}

#define EDFSIM_INSTANTIATE(R)                                                                                     \
    template struct ReferenceTrajectory<R>;                                                                       \
    template ReferenceTrajectory<R> phi_map(const SystemTrajectory<R>&);                                          \
    template KDecomposition<R> k_decompose(const SystemTrajectory<R>&);                                           \
    template ReferenceTrajectory<R> direct_reference_dynamics(const std::vector<Customer<R>>&,                    \
                                                              const SystemTrajectory<R>&);                        \
    template double reference_distance(const ReferenceTrajectory<R>&, const ReferenceTrajectory<R>&);             \
    template InvariantReport audit_reference(const ReferenceTrajectory<R>&, const SystemTrajectory<R>&);          \
    template InvariantReport audit_system(const SystemTrajectory<R>&);                                            \
    template ComparisonReport<R> compare_systems(const SystemTrajectory<R>&, const ReferenceTrajectory<R>&);      \
    template void write_comparison_csv(std::ostream&, const ComparisonReport<R>&);

EDFSIM_INSTANTIATE(double)
EDFSIM_INSTANTIATE(Rational)

}  // namespace edfsim
