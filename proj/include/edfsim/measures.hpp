#pragma once

#include "edfsim/numeric.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

namespace edfsim {

/// A real interval with optional (infinite) endpoints and per-end closedness.
template <class Real>
struct Interval {
    std::optional<Real> lo;  ///< empty means −∞
    std::optional<Real> hi;  ///< empty means +∞
    bool lo_closed = false;
    bool hi_closed = false;

    static Interval all() { return {}; }
    static Interval open(Real a, Real b) { return {std::move(a), std::move(b), false, false}; }
    static Interval closed(Real a, Real b) { return {std::move(a), std::move(b), true, true}; }
    /// (a, b]
    static Interval left_open(Real a, Real b) { return {std::move(a), std::move(b), false, true}; }
    /// [a, b)
    static Interval right_open(Real a, Real b) { return {std::move(a), std::move(b), true, false}; }
    /// (a, ∞)
    static Interval above(Real a) { return {std::move(a), std::nullopt, false, false}; }
    /// (−∞, b]
    static Interval at_most(Real b) { return {std::nullopt, std::move(b), false, true}; }

    bool contains(const Real& x) const {
        if (lo && (lo_closed ? x < *lo : !(*lo < x))) return false;
        if (hi && (hi_closed ? *hi < x : !(x < *hi))) return false;
        return true;
    }
};

/// One atom in effective (post-drift) coordinates.
template <class Real>
struct Atom {
    Real location;
    Real mass;

    bool operator==(const Atom&) const = default;
};

/// Finite, purely atomic, nonnegative measure on the lead-time axis whose atoms
/// all drift left at unit rate.
///
/// Atoms are stored at `stored = effective + offset`; drifting only changes the
/// offset. Simulators store absolute deadlines with `offset = clock`, which
/// keeps every location exact.
template <class Real>
class AtomicMeasure {
public:
    AtomicMeasure() = default;
    explicit AtomicMeasure(Real offset) : offset_(std::move(offset)) {}

    /// Builds a measure from effective-coordinate atoms (any order; merged).
    static AtomicMeasure from_atoms(const std::vector<Atom<Real>>& atoms) {
        AtomicMeasure m;
        for (const auto& a : atoms) m.add_atom(a.location, a.mass);
        return m;
    }

    const Real& offset() const { return offset_; }
    bool empty() const { return atoms_.empty(); }
    std::size_t size() const { return atoms_.size(); }
    Real total() const { return total_.value(); }

    /// ν(−∞, y]; right-continuous in y.
    Real mass_below(const Real& y) const {
        Accumulator<Real> acc;
        const Real stored = y + offset_;
        for (auto it = atoms_.begin(); it != atoms_.end() && !(stored < it->first); ++it) {
            acc.add(it->second);
        }
        return acc.value();
    }

    /// ν(I) for an arbitrary interval.
    Real mass_in(const Interval<Real>& interval) const {
        Accumulator<Real> acc;
        for (const auto& [stored, mass] : atoms_) {
            if (interval.contains(stored - offset_)) acc.add(mass);
        }
        return acc.value();
    }

    /// Mass of the atom exactly at effective location y (0 if none).
    Real mass_at(const Real& y) const {
        auto it = atoms_.find(y + offset_);
        return it == atoms_.end() ? Real(0) : it->second;
    }

    /// Leftmost effective location, or empty for the zero measure.
    std::optional<Real> leftmost() const {
        if (atoms_.empty()) return std::nullopt;
        return atoms_.begin()->first - offset_;
    }

    /// Shifts every effective location left by dt ≥ 0.
    void drift(const Real& dt) {
        if (dt < Real(0)) throw InvalidArgument("drift: negative time step");
        offset_ += dt;
    }

    /// Sets the offset directly; used to keep `offset == clock` exact.
    void drift_to(const Real& offset) {
        if (offset < offset_) throw InvalidArgument("drift_to: offset moves backwards");
        offset_ = offset;
    }

    /// Adds mass at an effective location, merging equal locations.
    void add_atom(const Real& location, const Real& mass) { add_stored(location + offset_, mass); }

    /// Adds mass at a stored (offset-including) location.
    void add_stored(const Real& stored, const Real& mass) {
        if (!(Real(0) < mass)) throw InvalidArgument("add_atom: mass must be positive");
        atoms_[stored] += mass;
        total_.add(mass);
    }

    /// Removes `amount` of mass from the left; a partially depleted atom keeps its location.
    void remove_leftmost_mass(const Real& amount) {
        if (amount < Real(0)) throw InvalidArgument("remove_leftmost_mass: negative amount");
        if (total() + NumTraits<Real>::epsilon() < amount) {
            throw InvalidArgument("remove_leftmost_mass: amount exceeds total mass");
        }
        Real left = amount;
        while (!atoms_.empty() && Real(0) < left) {
            auto it = atoms_.begin();
            if (it->second <= left) {
                left -= it->second;
                total_.add(-it->second);
                atoms_.erase(it);
            } else {
                it->second -= left;
                total_.add(-left);
                left = Real(0);
                if (is_zero(it->second)) {
                    total_.add(-it->second);
                    atoms_.erase(it);
                }
            }
        }
        if (atoms_.empty()) total_ = Accumulator<Real>{};
    }

    /// Removes and returns the mass of the atom at effective location y.
    Real remove_atom_at(const Real& y) {
        auto it = atoms_.find(y + offset_);
        if (it == atoms_.end()) return Real(0);
        Real mass = it->second;
        total_.add(-mass);
        atoms_.erase(it);
        if (atoms_.empty()) total_ = Accumulator<Real>{};
        return mass;
    }

    /// Removes and returns all mass at effective locations ≤ y.
    Real remove_at_or_below(const Real& y) {
        Real removed(0);
        const Real stored = y + offset_;
        while (!atoms_.empty() && !(stored < atoms_.begin()->first)) {
            removed += atoms_.begin()->second;
            total_.add(-atoms_.begin()->second);
            atoms_.erase(atoms_.begin());
        }
        if (atoms_.empty()) total_ = Accumulator<Real>{};
        return removed;
    }

    /// The restriction ν|_I (same offset).
    AtomicMeasure restrict(const Interval<Real>& interval) const {
        AtomicMeasure out(offset_);
        for (const auto& [stored, mass] : atoms_) {
            if (interval.contains(stored - offset_)) out.add_stored(stored, mass);
        }
        return out;
    }

    /// Left truncation by `amount`: the measure whose CDF is (F(y) − amount)⁺.
    AtomicMeasure truncated(const Real& amount) const {
        AtomicMeasure out = *this;
        out.remove_leftmost_mass(min_of(positive_part(amount), out.total()));
        return out;
    }

    /// Atoms in effective coordinates, ordered by location.
    std::vector<Atom<Real>> atoms() const {
        std::vector<Atom<Real>> out;
        out.reserve(atoms_.size());
        for (const auto& [stored, mass] : atoms_) out.push_back({stored - offset_, mass});
        return out;
    }

    /// Raw (stored location, mass) pairs.
    const std::map<Real, Real>& stored_atoms() const { return atoms_; }

    /// Equality of the measures themselves (effective atoms), ignoring offsets.
    friend bool operator==(const AtomicMeasure& a, const AtomicMeasure& b) { return a.atoms() == b.atoms(); }

private:
    std::map<Real, Real> atoms_;
    Real offset_{0};
    Accumulator<Real> total_;
};

/// sup_y |ν₁(−∞,y] − ν₂(−∞,y]|: the Kolmogorov distance between two measures.
template <class Real>
Real cdf_distance(const AtomicMeasure<Real>& a, const AtomicMeasure<Real>& b) {
    auto xa = a.atoms();
    auto xb = b.atoms();
    Real ca(0), cb(0), best(0);
    std::size_t i = 0, j = 0;
    while (i < xa.size() || j < xb.size()) {
        Real loc;
        if (j == xb.size() || (i < xa.size() && xa[i].location < xb[j].location)) {
            loc = xa[i].location;
        } else {
            loc = xb[j].location;
        }
        while (i < xa.size() && !(loc < xa[i].location)) ca += xa[i++].mass;
        while (j < xb.size() && !(loc < xb[j].location)) cb += xb[j++].mass;
        Real gap = ca < cb ? cb - ca : ca - cb;
        if (best < gap) best = gap;
    }
    return best;
}

/// Writes `location,mass` rows (no header) in effective coordinates.
template <class Real>
void write_atoms_csv(std::ostream& out, const AtomicMeasure<Real>& m) {
    for (const auto& a : m.atoms()) {
        out << NumTraits<Real>::format(a.location) << ',' << NumTraits<Real>::format(a.mass) << '\n';
    }
}

/// Writes a `location,mass` CSV fragment with header.
template <class Real>
void write_measure_csv(std::ostream& out, const AtomicMeasure<Real>& m) {
    out << "location,mass\n";
    write_atoms_csv(out, m);
}

}  // namespace edfsim
