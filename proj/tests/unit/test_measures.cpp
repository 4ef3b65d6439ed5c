#include "edfsim/measures.hpp"

#include <doctest.h>

#include <boost/random/uniform_int_distribution.hpp>

#include "edfsim/rng.hpp"

#include <algorithm>
#include <sstream>

using namespace edfsim;
using R = Rational;

namespace {

/// Plain list of (location, mass) pairs, the oracle for the map-based measure.
struct NaiveMeasure {
    std::vector<std::pair<R, R>> atoms;

    R below(const R& y) const {
        R s(0);
        for (const auto& [x, m] : atoms) {
            if (x <= y) s += m;
        }
        return s;
    }
    R total() const { return below(R(1000000)); }
    void drift(const R& dt) {
        for (auto& a : atoms) a.first -= dt;
    }
    void remove_left(R amount) {
        std::sort(atoms.begin(), atoms.end());
        std::vector<std::pair<R, R>> out;
        for (auto [x, m] : atoms) {
            const R take = amount < m ? amount : m;
            amount -= take;
            if (m - take > R(0)) out.push_back({x, m - take});
        }
        atoms = out;
    }
};

/// Small random measures on a lattice of step 1/4 with masses in multiples of 1/8.
struct MeasureGen {
    Engine engine;
    explicit MeasureGen(std::uint64_t seed) : engine(make_engine(seed, Substream::policy)) {}

    std::pair<AtomicMeasure<R>, NaiveMeasure> next() {
        boost::random::uniform_int_distribution<int> count(0, 8), loc(-20, 40), mass(1, 24);
        AtomicMeasure<R> m;
        NaiveMeasure n;
        const int k = count(engine);
        for (int i = 0; i < k; ++i) {
            const R x(loc(engine), 4), w(mass(engine), 8);
            m.add_atom(x, w);
            n.atoms.push_back({x, w});
        }
        return {m, n};
    }
    R amount(int hi) {
        boost::random::uniform_int_distribution<int> d(0, hi);
        return R(d(engine), 8);
    }
};

}  // namespace

TEST_CASE("interval membership respects closedness") {
    auto i = Interval<double>::left_open(0.0, 1.0);
    CHECK_FALSE(i.contains(0.0));
    CHECK(i.contains(1.0));
    CHECK(Interval<double>::right_open(0.0, 1.0).contains(0.0));
    CHECK_FALSE(Interval<double>::right_open(0.0, 1.0).contains(1.0));
    CHECK(Interval<double>::above(2.0).contains(1e9));
    CHECK_FALSE(Interval<double>::above(2.0).contains(2.0));
    CHECK(Interval<double>::at_most(2.0).contains(2.0));
    CHECK(Interval<double>::all().contains(-1e300));
}

TEST_CASE("atoms at the same location merge and mass queries add up") {
    AtomicMeasure<R> m;
    m.add_atom(R(2), R(1));
    m.add_atom(R(2), R(3));
    m.add_atom(R(-1), R(2));
    CHECK(m.size() == 2);
    CHECK(m.total() == R(6));
    CHECK(m.mass_at(R(2)) == R(4));
    CHECK(m.mass_below(R(-1)) == R(2));
    CHECK(m.mass_below(R(1)) == R(2));
    CHECK(m.mass_in(Interval<R>::left_open(R(-1), R(2))) == R(4));
    CHECK(m.mass_in(Interval<R>::closed(R(-1), R(2))) == R(6));
    CHECK(m.leftmost() == R(-1));
}

TEST_CASE("drift moves every atom left without touching masses") {
    auto m = AtomicMeasure<R>::from_atoms({{R(3), R(4)}, {R(5), R(1)}});
    m.drift(R(2));
    CHECK(m.atoms() == std::vector<Atom<R>>{{R(1), R(4)}, {R(3), R(1)}});
    CHECK(m.total() == R(5));
    CHECK_THROWS_AS(m.drift(R(-1)), InvalidArgument);
}

TEST_CASE("adding a nonpositive mass is rejected") {
    AtomicMeasure<double> m;
    CHECK_THROWS_AS(m.add_atom(1.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(m.add_atom(1.0, -2.0), InvalidArgument);
}

TEST_CASE("removing more than the total mass is rejected") {
    auto m = AtomicMeasure<R>::from_atoms({{R(1), R(1)}});
    CHECK_THROWS_AS(m.remove_leftmost_mass(R(2)), InvalidArgument);
}

TEST_CASE("left truncation keeps the right tail") {
    auto m = AtomicMeasure<R>::from_atoms({{R(-2), R(2)}, {R(1), R(1)}, {R(2), R(1)}});
    CHECK(m.truncated(R(3)).atoms() == std::vector<Atom<R>>{{R(2), R(1)}});
    CHECK(m.truncated(R(5, 2)).atoms() == std::vector<Atom<R>>{{R(1), R(1, 2)}, {R(2), R(1)}});
    CHECK(m.truncated(R(0)) == m);
    CHECK(m.truncated(R(10)).empty());
}

TEST_CASE("remove_at_or_below and restrict") {
    auto m = AtomicMeasure<R>::from_atoms({{R(0), R(2)}, {R(1), R(1)}, {R(2), R(1)}});
    auto r = m.restrict(Interval<R>::above(R(0)));
    CHECK(r.total() == R(2));
    CHECK(m.remove_at_or_below(R(0)) == R(2));
    CHECK(m.total() == R(2));
    CHECK(m.remove_atom_at(R(1)) == R(1));
    CHECK(m.atoms() == std::vector<Atom<R>>{{R(2), R(1)}});
}

TEST_CASE("cdf distance is the Kolmogorov sup") {
    auto a = AtomicMeasure<R>::from_atoms({{R(1), R(2)}, {R(3), R(1)}});
    auto b = AtomicMeasure<R>::from_atoms({{R(2), R(2)}, {R(3), R(1)}});
    CHECK(cdf_distance(a, b) == R(2));
    CHECK(cdf_distance(a, a) == R(0));
}

TEST_CASE("measure CSV output") {
    auto m = AtomicMeasure<R>::from_atoms({{R(1, 2), R(3)}, {R(-2), R(2)}});
    std::ostringstream out;
    write_measure_csv(out, m);
    CHECK(out.str() == "location,mass\n-2,2\n1/2,3\n");
}

TEST_CASE("property: measure operations agree with a list oracle") {
    MeasureGen gen(7);
    for (int trial = 0; trial < 500; ++trial) {
        auto [m, n] = gen.next();
        const R dt = gen.amount(40);
        m.drift(dt);
        n.drift(dt);
        const R amount = min_of(gen.amount(80), m.total());
        m.remove_leftmost_mass(amount);
        n.remove_left(amount);
        REQUIRE(m.total() == n.total());
        for (int y = -40; y <= 40; ++y) {
            REQUIRE(m.mass_below(R(y, 4)) == n.below(R(y, 4)));
        }
        // Truncation is CDF subtraction: F_trunc(y) = (F(y) − a)⁺.
        const R a = gen.amount(40);
        const auto t = m.truncated(a);
        for (int y = -40; y <= 40; ++y) {
            REQUIRE(t.mass_below(R(y, 4)) == positive_part(m.mass_below(R(y, 4)) - a));
        }
    }
}

TEST_CASE("property: drift commutes with left removal when nothing is removed") {
    MeasureGen gen(11);
    for (int trial = 0; trial < 200; ++trial) {
        auto [m, n] = gen.next();
        auto a = m;
        a.drift(R(1));
        a.drift(R(3, 4));
        auto b = m;
        b.drift(R(7, 4));
        REQUIRE(a == b);
        REQUIRE(cdf_distance(a, b) == R(0));
    }
}
