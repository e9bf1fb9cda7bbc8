#pragma once

#include <array>
#include <vector>

#include "hkd/rational.hpp"

namespace hkd {

// Axis-aligned half-open box [lo, hi) with exact rational corners.
struct Box {
    std::vector<Rat> lo, hi;

    int dim() const { return static_cast<int>(lo.size()); }
    Rat measure() const;
    bool contains(const std::vector<Rat>& x) const;
    bool contains_box(const Box& other) const;  // other ⊆ this
    bool disjoint(const Box& other) const;
    Box intersect(const Box& other) const;  // may be empty (some hi ≤ lo)
    bool empty() const;
    std::vector<Rat> center() const;
    bool operator==(const Box& other) const { return lo == other.lo && hi == other.hi; }
};

// Open quasi-metric ball; for n=1 the interval (c−r, c+r).
struct Ball {
    std::vector<Rat> center;
    Rat radius;  // > 0
};

// A dyadic cube in the 1/3-shifted system: grid shift index t in [0, 3^n),
// generation k (sidelength 2^-k), integer lattice vector m.  The realized
// point set is 2^-k([0,1)^n + m + (-1)^k t).
struct CubeAddress {
    int t = 0;
    long k = 0;
    std::vector<Int> m;

    bool operator==(const CubeAddress& o) const { return t == o.t && k == o.k && m == o.m; }
};

// The system of 3^n adjacent one-third-shifted dyadic grids on R^n, n in {1,2}.
// Shift index decomposes base-3: tau_i = (t / 3^i) % 3, shift vector tau/3.
class GridSystem {
public:
    explicit GridSystem(int n);

    int dim() const { return n_; }
    int num_grids() const { return shifts_; }       // 3^n
    Rat children_ratio() const;                     // epsilon = 2^-n
    Rat inner_radius(long k) const;                 // (1/2) 2^-k
    Rat outer_radius_sq(long k) const;              // (n/4) 4^-k, (sqrt(n)/2 * 2^-k)^2

    // Shift vector component i of grid t, an exact element of {0, 1/3, 2/3}.
    Rat shift(int t, int i) const;
    // Numerator of the shift over 3 (0, 1 or 2); exact lattice arithmetic.
    int shift_num(int t, int i) const;

    Box cube_bounds(const CubeAddress& a) const;
    Rat cube_measure(const CubeAddress& a) const;
    std::vector<CubeAddress> children(const CubeAddress& a) const;
    CubeAddress parent(const CubeAddress& a) const;
    CubeAddress locate(const std::vector<Rat>& x, int t, long k) const;
    bool cube_contains(const CubeAddress& a, const std::vector<Rat>& x) const;

    // Smallest system cube containing the ball, scanned over all shifts and
    // the generations with 2^-k in [2r, 12r]; ties broken by lowest shift
    // index, then lexicographically smallest m.
    CubeAddress covering_cube(const Ball& b) const;

private:
    int n_;
    int shifts_;
};

// Deterministic ordering used for tie-breaks and canonical family sort.
bool lex_less(const CubeAddress& a, const CubeAddress& b);

}  // namespace hkd
