#include "hkd/grid.hpp"

#include <algorithm>
#include <stdexcept>

namespace hkd {

Rat Box::measure() const {
    Rat m = 1;
    for (size_t i = 0; i < lo.size(); ++i) {
        if (hi[i] <= lo[i]) return Rat(0);
        m *= hi[i] - lo[i];
    }
    return m;
}

bool Box::contains(const std::vector<Rat>& x) const {
    for (size_t i = 0; i < lo.size(); ++i)
        if (x[i] < lo[i] || x[i] >= hi[i]) return false;
    return true;
}

bool Box::contains_box(const Box& other) const {
    for (size_t i = 0; i < lo.size(); ++i)
        if (other.lo[i] < lo[i] || other.hi[i] > hi[i]) return false;
    return true;
}

bool Box::disjoint(const Box& other) const {
    for (size_t i = 0; i < lo.size(); ++i)
        if (other.hi[i] <= lo[i] || other.lo[i] >= hi[i]) return true;
    return false;
}

Box Box::intersect(const Box& other) const {
    Box r;
    r.lo.resize(lo.size());
    r.hi.resize(lo.size());
    for (size_t i = 0; i < lo.size(); ++i) {
        r.lo[i] = std::max(lo[i], other.lo[i]);
        r.hi[i] = std::min(hi[i], other.hi[i]);
    }
    return r;
}

bool Box::empty() const {
    for (size_t i = 0; i < lo.size(); ++i)
        if (hi[i] <= lo[i]) return true;
    return false;
}

std::vector<Rat> Box::center() const {
    std::vector<Rat> c(lo.size());
    for (size_t i = 0; i < lo.size(); ++i) c[i] = (lo[i] + hi[i]) / 2;
    return c;
}

GridSystem::GridSystem(int n) : n_(n) {
    if (n != 1 && n != 2) throw std::invalid_argument("GridSystem: n must be 1 or 2");
    shifts_ = 1;
    for (int i = 0; i < n; ++i) shifts_ *= 3;
}

Rat GridSystem::children_ratio() const { return Rat(1) / rat_pow2(n_); }

Rat GridSystem::inner_radius(long k) const { return rat_pow2(-k) / 2; }

Rat GridSystem::outer_radius_sq(long k) const {
    Rat s = rat_pow2(-k);
    return frac(n_, 4) * s * s;
}

int GridSystem::shift_num(int t, int i) const {
    int v = t;
    for (int j = 0; j < i; ++j) v /= 3;
    return v % 3;
}

Rat GridSystem::shift(int t, int i) const { return frac(shift_num(t, i), 3); }

static int parity_sign(long k) { return (k % 2 == 0) ? 1 : -1; }

Box GridSystem::cube_bounds(const CubeAddress& a) const {
    Box b;
    b.lo.resize(n_);
    b.hi.resize(n_);
    Rat side = rat_pow2(-a.k);
    int sgn = parity_sign(a.k);
    for (int i = 0; i < n_; ++i) {
        Rat off = Rat(a.m[i]) + frac(sgn * shift_num(a.t, i), 3);
        b.lo[i] = side * off;
        b.hi[i] = b.lo[i] + side;
    }
    return b;
}

Rat GridSystem::cube_measure(const CubeAddress& a) const {
    Rat side = rat_pow2(-a.k);
    Rat m = side;
    for (int i = 1; i < n_; ++i) m *= side;
    return m;
}

std::vector<CubeAddress> GridSystem::children(const CubeAddress& a) const {
    // Child lattice vectors 2m + 3(-1)^k t + s, s in {0,1}^n (the shift enters
    // through its numerator over 3, which is an integer).
    std::vector<CubeAddress> out;
    int sgn = parity_sign(a.k);
    std::vector<Int> base(n_);
    for (int i = 0; i < n_; ++i) base[i] = 2 * a.m[i] + sgn * shift_num(a.t, i);
    int count = 1 << n_;
    out.reserve(count);
    for (int s = 0; s < count; ++s) {
        CubeAddress c;
        c.t = a.t;
        c.k = a.k + 1;
        c.m.resize(n_);
        for (int i = 0; i < n_; ++i) c.m[i] = base[i] + ((s >> i) & 1);
        out.push_back(std::move(c));
    }
    return out;
}

CubeAddress GridSystem::parent(const CubeAddress& a) const {
    // Invert the child formula: m = 2 m~ + 3(-1)^(k-1) t + s with s in {0,1}^n.
    CubeAddress p;
    p.t = a.t;
    p.k = a.k - 1;
    p.m.resize(n_);
    int sgn = parity_sign(a.k - 1);
    for (int i = 0; i < n_; ++i) {
        Int shifted = a.m[i] - sgn * shift_num(a.t, i);
        Int q;
        mpz_fdiv_q_2exp(q.get_mpz_t(), shifted.get_mpz_t(), 1);
        p.m[i] = q;
    }
    return p;
}

CubeAddress GridSystem::locate(const std::vector<Rat>& x, int t, long k) const {
    // m_i = floor(2^k x_i - (-1)^k t_i)
    CubeAddress a;
    a.t = t;
    a.k = k;
    a.m.resize(n_);
    Rat scale = rat_pow2(k);
    int sgn = parity_sign(k);
    for (int i = 0; i < n_; ++i) a.m[i] = rat_floor(scale * x[i] - frac(sgn * shift_num(t, i), 3));
    return a;
}

bool GridSystem::cube_contains(const CubeAddress& a, const std::vector<Rat>& x) const {
    return cube_bounds(a).contains(x);
}

bool lex_less(const CubeAddress& a, const CubeAddress& b) {
    if (a.k != b.k) return a.k < b.k;
    if (a.t != b.t) return a.t < b.t;
    for (size_t i = 0; i < a.m.size(); ++i)
        if (a.m[i] != b.m[i]) return a.m[i] < b.m[i];
    return false;
}

CubeAddress GridSystem::covering_cube(const Ball& b) const {
    if (b.radius <= 0) throw std::invalid_argument("covering_cube: radius must be positive");
    // Generations with sidelength 2^-k in [2r, 12r]; a containing cube exists
    // in that band by the one-third trick.  Scan from the smallest sidelength
    // upward so the first hit is the minimal one.
    Rat two_r = 2 * b.radius;
    // smallest k with 2^-k >= 2r  <=>  largest k with 2^-k >= 2r
    long k_hi;  // finest candidate generation: largest k with 2^-k >= 2r
    {
        long k = 0;
        while (rat_pow2(-k) < two_r) --k;
        while (rat_pow2(-(k + 1)) >= two_r) ++k;
        k_hi = k;
    }
    long k_lo = k_hi;  // coarsest: smallest k with 2^-k <= 12r
    while (rat_pow2(-(k_lo - 1)) <= 6 * two_r) --k_lo;

    for (long k = k_hi; k >= k_lo; --k) {
        bool found = false;
        CubeAddress best;
        for (int t = 0; t < shifts_; ++t) {
            CubeAddress cand = locate(b.center, t, k);
            Box box = cube_bounds(cand);
            bool ok = true;
            for (int i = 0; i < n_; ++i) {
                if (box.lo[i] > b.center[i] - b.radius || b.center[i] + b.radius > box.hi[i]) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            if (!found || cand.t < best.t ||
                (cand.t == best.t && lex_less(cand, best))) {
                best = cand;
                found = true;
            }
        }
        if (found) return best;
    }
    throw std::logic_error("covering_cube: no cube found in the guaranteed band");
}

}  // namespace hkd
