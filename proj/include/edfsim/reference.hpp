#pragma once

#include "edfsim/measures.hpp"
#include "edfsim/simulator.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace edfsim {

/// Alternating busy-cycle epochs σ₁ < τ₁ < σ₂ < … of the reference workload.
/// The last cycle may still be open (no matching τ).
template <class Real>
struct BusyCycleIndex {
    std::vector<Real> sigma;
    std::vector<Real> tau;
};

/// Reference-system quantities at one side (left limit or value) of an epoch.
template <class Real>
struct ReferenceState {
    Real time{0};
    AtomicMeasure<Real> measure;  ///< 𝒰
    Real work{0};                 ///< U = 𝒰(ℝ)
    Real standard_work{0};        ///< W_S
    Real k{0};                    ///< K = K⁺ − K⁻
    Real k_plus{0};
    Real k_minus{0};
    Real reneged{0};              ///< R_U
    Real busy_time{0};            ///< ∫₀ᵗ 1{U(s) > 0} ds
    Real arrived_work{0};         ///< V(A(t))

    /// E(t): leftmost support point of 𝒰, empty (= +∞) when U = 0.
    std::optional<Real> leftmost() const { return measure.leftmost(); }
};

template <class Real>
struct ReferencePoint {
    Real time;
    bool cycle_end = false;  ///< an inserted τ breakpoint between standard events
    ReferenceState<Real> before;
    ReferenceState<Real> after;
};

template <class Real>
struct ReferenceTrajectory {
    Real horizon{0};
    std::vector<ReferencePoint<Real>> points;
    BusyCycleIndex<Real> cycles;

    /// Value (or left limit) at any t in [0, horizon]; between points 𝒰 is
    /// served from the left at unit rate and W_S drains at unit rate.
    ReferenceState<Real> state_at(const Real& t, bool left) const;
};

/// K and its decomposition at the epochs of a reference trajectory (post-epoch values).
template <class Real>
struct KDecomposition {
    std::vector<Real> times;
    std::vector<Real> k;
    std::vector<Real> k_plus;
    std::vector<Real> k_minus;
    std::vector<Real> reneged;  ///< R_U
    BusyCycleIndex<Real> cycles;
};

/// 𝒰 = Φ(𝒲_S): left truncation of the standard workload measure by K, with K
/// evaluated by the busy-cycle formulas. The standard trajectory must come from
/// `edf_standard` with measures recorded.
template <class Real>
ReferenceTrajectory<Real> phi_map(const SystemTrajectory<Real>& standard);

template <class Real>
KDecomposition<Real> k_decompose(const SystemTrajectory<Real>& standard);

/// Forward simulation of 𝒰 by its own dynamics. The standard trajectory is only
/// consulted at arrivals whose lead lies left of E(t−) (or when U(t−) = 0),
/// where 𝒰(t) is rebuilt as 𝒲_S(t) truncated by W_S(t−) − U(t−).
template <class Real>
ReferenceTrajectory<Real> direct_reference_dynamics(const std::vector<Customer<Real>>& stream,
                                                    const SystemTrajectory<Real>& standard);

/// Maximum violation of one checked relation.
struct InvariantResult {
    std::string name;
    double max_violation = 0;  ///< largest amount by which the relation failed (0 if never)
    std::size_t checks = 0;
    std::optional<double> first_failure_time;
};

/// One CSV row of the comparison report.
template <class Real>
struct ComparisonRow {
    Real time;
    bool left;
    Real W, U, W_S, K, K_plus, K_minus, R_W, R_U;
    std::optional<Real> E;
    Real F;
    std::string flags;
};

struct InvariantReport {
    std::vector<InvariantResult> results;

    InvariantResult& entry(const std::string& name);
    void record(const std::string& name, double violation, double time);
    void merge(const InvariantReport& other);
    bool pass(double tolerance) const;
    double worst() const;
};

template <class Real>
struct ComparisonReport {
    InvariantReport invariants;
    std::vector<ComparisonRow<Real>> rows;
};

/// Checks the pathwise relations between the reneging system and the reference
/// system at every epoch of either (both sides): W ≤ U, R_U ≤ R_W and its
/// per-cycle form, E ≤ F on {U > 0}, U − W ≤ D(t), the D-bound, the frontier
/// drift bound, and both mass balances. The reneging trajectory needs outcomes.
template <class Real>
ComparisonReport<Real> compare_systems(const SystemTrajectory<Real>& reneging,
                                       const ReferenceTrajectory<Real>& reference);

/// Identities internal to a reference trajectory: positivity of Φ, 0 ≤ U ≤ W_S,
/// 𝒰 = 𝒲_S right of E, K = K⁺ − K⁻, R_U = K⁺, complementarity, U accounting.
template <class Real>
InvariantReport audit_reference(const ReferenceTrajectory<Real>& reference, const SystemTrajectory<Real>& standard);

/// Largest CDF distance and R_U gap between two reference trajectories at the
/// epochs of the first (both sides).
template <class Real>
double reference_distance(const ReferenceTrajectory<Real>& a, const ReferenceTrajectory<Real>& b);

/// Mass-balance and structural checks of a simulated system alone: W accounting,
/// no late mass in reneging systems, C ≤ F, frontier drift bound, work
/// conservation for EDF.
template <class Real>
InvariantReport audit_system(const SystemTrajectory<Real>& traj);

/// CSV `time,W,U,W_S,K,Kplus,Kminus,R_W,R_U,E,F,violation_flags`.
template <class Real>
void write_comparison_csv(std::ostream& out, const ComparisonReport<Real>& report);

}  // namespace edfsim
