#include "hkd/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hkd/util.hpp"

namespace hkd {

CubeFamily::CubeFamily(const GridSystem& g, std::vector<CubeAddress> cubes)
    : cubes_(std::move(cubes)) {
    std::sort(cubes_.begin(), cubes_.end(), lex_less);
    cubes_.erase(std::unique(cubes_.begin(), cubes_.end()), cubes_.end());
    boxes_.reserve(cubes_.size());
    for (const auto& c : cubes_) boxes_.push_back(g.cube_bounds(c));
    for (std::size_t i = 0; i < boxes_.size(); ++i)
        for (std::size_t j = i + 1; j < boxes_.size(); ++j)
            if (!boxes_[i].disjoint(boxes_[j]))
                throw std::invalid_argument("cube family: cubes overlap");
}

Rat cube_mean1(const GridSystem& g, const Integrator& integ, const StepFunction& f,
               const CubeAddress& q) {
    Box b = g.cube_bounds(q);
    return integ.box_integral(b) / g.cube_measure(q);
}

namespace {

// Integer fast path for 1-d exact means.  Coordinates are scaled by
// S = 3*2^(K+1), making every cube corner down to generation K+1 an integer;
// values share the common denominator D, so clipped integrals are integers
// in units 1/(D*S) and means are 64-bit fractions compared via int128.
struct FastMeans {
    bool ok = false;
    long long wlo_s = 0, whi_s = 0;
    long long dval = 1;                // D as a machine integer
    std::vector<long long> a;          // v_i * D
    std::vector<long long> p;          // prefix integral * D * S at breakpoints

    explicit FastMeans(const StepFunction& f) {
        const Window& w = f.w;
        if (w.n != 1 || w.K + 1 - w.k0 > 36) return;
        Int d(1);
        for (const Rat& v : f.v) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), v.get_den_mpz_t());
        if (!mpz_fits_slong_p(d.get_mpz_t())) return;
        dval = mpz_get_si(d.get_mpz_t());
        if (dval > (1LL << 30)) return;
        long long n = static_cast<long long>(f.v.size());
        a.reserve(n);
        Int total(0);
        for (const Rat& v : f.v) {
            Int s = v.get_num() * (d / v.get_den());
            total += s;
            if (!mpz_fits_slong_p(s.get_mpz_t())) return;
            a.push_back(mpz_get_si(s.get_mpz_t()));
        }
        total *= 6;
        if (!mpz_fits_slong_p(total.get_mpz_t()) || total > (Int(1) << 45)) return;
        p.resize(n + 1);
        p[0] = 0;
        for (long long i = 0; i < n; ++i) p[i + 1] = p[i] + 6 * a[i];
        wlo_s = w.m0[0] * (3LL << (w.K + 1 - w.k0));
        whi_s = wlo_s + n * 6;
        ok = true;
    }

    long long pref(long long x) const {
        if (x <= wlo_s) return 0;
        if (x >= whi_s) return p.back();
        long long off = x - wlo_s;
        long long j = off / 6;
        return p[j] + a[j] * (off - j * 6);
    }

    // integral * D * S over [xl, xh) clipped to the window
    long long integral(long long xl, long long xh) const { return pref(xh) - pref(xl); }
};

struct Frac64 {
    long long num = 0;
    long long den = 1;
};

inline bool frac64_less(const Frac64& x, const Frac64& y) {
    return static_cast<__int128>(x.num) * y.den < static_cast<__int128>(y.num) * x.den;
}

// Cone cube of xs (in S units) at generation k, as [lo_s, lo_s + len_s).
// Valid for K+1-k within the int64 range guarded by the caller.
inline void cone_cube_s(long long xs, int tau, long k, long kk1, long long& lo_s,
                        long long& len_s) {
    long long e = 1LL << (kk1 - k);  // 2^(K+1-k)
    int sgn = (k % 2 == 0) ? 1 : -1;
    long long shift = sgn * tau * e;
    long long num = xs - shift;
    long long den = 3 * e;
    long long m = num >= 0 ? num / den : -((-num + den - 1) / den);
    lo_s = m * den + shift;
    len_s = den;
}

// The portion of the window a t-cone of x can ever reach: full along shifted
// axes; along unshifted axes the origin is a boundary at every generation, so
// the cone stays on x's side of it.
Box cone_reach(const GridSystem& g, const Window& w, const std::vector<Rat>& x, int t) {
    Box r = w.box();
    for (int a = 0; a < w.n; ++a) {
        if (g.shift_num(t, a) != 0) continue;
        if (x[a] >= 0)
            r.lo[a] = std::max(r.lo[a], Rat(0));
        else
            r.hi[a] = std::min(r.hi[a], Rat(0));
    }
    return r;
}

// Cone scan: calls visit(cube, mean) for cone cubes of x from generation K+1
// coarsening until the cube covers everything it can ever reach (one coarser
// level included; beyond it the integral is frozen and means only decay).
template <typename Visit>
void scan_cone(const GridSystem& g, const StepFunction& f, const Integrator& integ,
               const std::vector<Rat>& x, int t, Visit&& visit) {
    const Window& w = f.w;
    Box reach = cone_reach(g, w, x, t);
    for (long k = w.K + 1;; --k) {
        CubeAddress q = g.locate(x, t, k);
        Box b = g.cube_bounds(q);
        Rat mean = integ.box_integral(b) / g.cube_measure(q);
        visit(q, mean);
        if (reach.empty() || b.contains_box(reach)) {
            CubeAddress up = g.parent(q);
            Box ub = g.cube_bounds(up);
            visit(up, integ.box_integral(ub) / g.cube_measure(up));
            break;
        }
        if (k < w.k0 - 128) throw std::logic_error("cone scan failed to terminate");
    }
}

// Coarsest generation worth scanning: at this generation every cube has
// measure >= total/lambda and hence mean <= lambda.
long cz_root_generation(const GridSystem& g, const Window& w, const Rat& total,
                        const Rat& lambda) {
    Rat need = total / lambda;
    long k = w.K + 1;
    while (rat_pow2(-k * g.dim()) < need) --k;
    return k;
}

}  // namespace

namespace {

// Best cone mean at xs for one grid, integer path.
Frac64 fast_cone_best(const FastMeans& fm, const Window& w, int tau, long long xs) {
    // reach of the cone in S units
    long long r_lo = fm.wlo_s, r_hi = fm.whi_s;
    if (tau == 0) {
        if (xs >= 0)
            r_lo = std::max(r_lo, 0LL);
        else
            r_hi = std::min(r_hi, 0LL);
    }
    Frac64 best{0, 1};
    long kk1 = w.K + 1;
    for (long k = kk1;; --k) {
        if (kk1 - k > 45) throw std::logic_error("fast cone scan failed to terminate");
        long long lo_s, len_s;
        cone_cube_s(xs, tau, k, kk1, lo_s, len_s);
        Frac64 mean{fm.integral(lo_s, lo_s + len_s), len_s};
        if (frac64_less(best, mean)) best = mean;
        if (r_hi <= r_lo || (lo_s <= r_lo && lo_s + len_s >= r_hi)) {
            // one coarser level, then stop: the reachable mass is frozen
            long long plo, plen;
            cone_cube_s(xs, tau, k - 1, kk1, plo, plen);
            Frac64 up{fm.integral(plo, plo + plen), plen};
            if (frac64_less(best, up)) best = up;
            break;
        }
    }
    return best;
}

StepFunction maximal_by_grids(const GridSystem& g, const StepFunction& f,
                              const std::vector<int>& grids) {
    StepFunction out = StepFunction::zero(f.w);
    if (f.is_zero()) return out;
    FastMeans fm(f);
    std::size_t cells = f.w.cell_count();
    if (fm.ok) {
        Int d(static_cast<long>(fm.dval));
        for (std::size_t i = 0; i < cells; ++i) {
            long long xs = fm.wlo_s + 6 * static_cast<long long>(i) + 3;
            Frac64 best{0, 1};
            for (int t : grids) {
                Frac64 b = fast_cone_best(fm, f.w, g.shift_num(t, 0), xs);
                if (frac64_less(best, b)) best = b;
            }
            out.v[i] = frac(Int(static_cast<long>(best.num)), d * Int(static_cast<long>(best.den)));
        }
        return out;
    }
    Integrator integ(f);
    for (std::size_t i = 0; i < cells; ++i) {
        auto x = f.w.cell_center(i);
        Rat best(0);
        for (int t : grids) {
            scan_cone(g, f, integ, x, t, [&](const CubeAddress&, const Rat& mean) {
                if (mean > best) best = mean;
            });
        }
        out.v[i] = best;
    }
    return out;
}

}  // namespace

StepFunction dyadic_maximal_grid(const GridSystem& g, const StepFunction& f, int t) {
    if (g.dim() != f.w.n) throw std::invalid_argument("dimension mismatch");
    return maximal_by_grids(g, f, {t});
}

StepFunction dyadic_maximal(const GridSystem& g, const StepFunction& f) {
    if (g.dim() != f.w.n) throw std::invalid_argument("dimension mismatch");
    std::vector<int> grids;
    for (int t = 0; t < g.num_grids(); ++t) grids.push_back(t);
    return maximal_by_grids(g, f, grids);
}

// ---------------------------------------------------------------------------
// Exact 1-d Hardy-Littlewood maximal function.
//
// Candidate values are slopes of the prefix-integral graph. In half-cell
// units all endpoints are integers, and with a common denominator D for the
// cell values every slope equals num/(D*den) with 64-bit num, den. When D or
// the total mass overflows the fast path we fall back to mpq arithmetic.
// ---------------------------------------------------------------------------

namespace {

struct Frac {
    long long num = 0;
    long long den = 1;  // > 0
};

inline bool frac_less(const Frac& a, const Frac& b) {
    return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
}

void hl_kernel_fast(const std::vector<long long>& a, std::vector<Frac>& out) {
    // a[i] = scaled cell value; prefix in half-cell x units: P[j] over
    // breakpoints (x = 2j), midpoints at x = 2i+1 with Pm[i] = P[i] + a[i].
    const long long n = static_cast<long long>(a.size());
    std::vector<long long> p(n + 1, 0);
    for (long long i = 0; i < n; ++i) p[i + 1] = p[i] + 2 * a[i];
    out.assign(n, Frac{});

    // Candidates anchored at the midpoint dominate: splitting any interval
    // [a,b] containing x at x itself shows mean[a,b] <= max of the one-sided
    // means, and [x,x] degenerates to the cell value.
    for (long long c = 0; c < n; ++c) {
        out[c] = Frac{a[c], 1};
        long long pm = p[c] + a[c];
        for (long long j = 0; j <= c; ++j) {
            Frac cand{pm - p[j], (2 * c + 1) - 2 * j};
            if (frac_less(out[c], cand)) out[c] = cand;
        }
        for (long long j = c + 1; j <= n; ++j) {
            Frac cand{p[j] - pm, 2 * j - (2 * c + 1)};
            if (frac_less(out[c], cand)) out[c] = cand;
        }
    }
}

void hl_kernel_exact(const std::vector<Rat>& v, const Rat& h, std::vector<Rat>& out) {
    const long long n = static_cast<long long>(v.size());
    std::vector<Rat> p(n + 1, Rat(0));
    for (long long i = 0; i < n; ++i) p[i + 1] = p[i] + v[i] * h;
    Rat half = h / 2;
    out.assign(n, Rat(0));
    auto xm = [&](long long c) -> Rat { return Rat(static_cast<long>(2 * c + 1)) * half; };
    auto xb = [&](long long j) -> Rat { return Rat(static_cast<long>(2 * j)) * half; };
    for (long long c = 0; c < n; ++c) {
        Rat best = v[c];
        Rat pm = p[c] + v[c] * half;
        for (long long j = 0; j <= c; ++j) best = std::max(best, Rat((pm - p[j]) / (xm(c) - xb(j))));
        for (long long j = c + 1; j <= n; ++j) best = std::max(best, Rat((p[j] - pm) / (xb(j) - xm(c))));
        out[c] = best;
    }
}

}  // namespace

StepFunction hl_maximal_1d(const StepFunction& f) {
    if (f.w.n != 1) throw std::invalid_argument("hl_maximal_1d: n must be 1");
    if (f.w.cell_count() > (1u << 14)) throw std::invalid_argument("hl_maximal_1d: window too large");
    StepFunction out = StepFunction::zero(f.w);
    if (f.is_zero()) return out;

    // Common denominator of all values.
    Int d(1);
    for (const Rat& x : f.v) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), x.get_den_mpz_t());
    Int total(0);
    bool fits = mpz_fits_slong_p(d.get_mpz_t()) != 0;
    std::vector<long long> scaled;
    if (fits) {
        scaled.reserve(f.v.size());
        for (const Rat& x : f.v) {
            Int s = x.get_num() * (d / x.get_den());
            total += s;
            if (!mpz_fits_slong_p(s.get_mpz_t())) {
                fits = false;
                break;
            }
            scaled.push_back(s.get_si());
        }
        // Slope numerators reach 2 * total; keep cross products in int128.
        Int limit = (Int(1) << 61) / (4 * static_cast<long>(f.v.size()) + 4);
        if (total > limit) fits = false;
    }

    if (fits) {
        std::vector<Frac> res;
        hl_kernel_fast(scaled, res);
        for (std::size_t i = 0; i < res.size(); ++i)
            out.v[i] = frac(Int(static_cast<long>(res[i].num)), d * Int(static_cast<long>(res[i].den)));
    } else {
        hl_kernel_exact(f.v, f.w.cell_width(), out.v);
    }
    return out;
}

StepFunction hl_maximal_2d_sampled(const StepFunction& f, int radii_per_octave) {
    if (f.w.n != 2) throw std::invalid_argument("hl_maximal_2d_sampled: n must be 2");
    if (radii_per_octave < 1) throw std::invalid_argument("radii_per_octave must be positive");
    const Window& w = f.w;
    long cpa = w.cells_per_axis();
    if (cpa > (1 << 7)) throw std::invalid_argument("hl_maximal_2d_sampled: window too large");
    StepFunction out = StepFunction::zero(w);
    double h = to_double(w.cell_width());
    double extent = to_double(w.axis_hi(0) - w.axis_lo(0));
    std::vector<double> vals(f.v.size());
    for (std::size_t i = 0; i < f.v.size(); ++i) vals[i] = to_double(f.v[i]);
    std::vector<double> radii;
    for (double r = 0.75 * h; r < extent; r *= std::exp2(1.0 / radii_per_octave))
        radii.push_back(r);
    for (long cy = 0; cy < cpa; ++cy) {
        for (long cx = 0; cx < cpa; ++cx) {
            double best = vals[w.cell_index({cy, cx})];
            for (double r : radii) {
                long reach = static_cast<long>(r / h) + 1;
                double sum = 0.0;
                long count = 0;
                for (long dy = -reach; dy <= reach; ++dy) {
                    long yy = cy + dy;
                    if (yy < 0 || yy >= cpa) continue;
                    for (long dx = -reach; dx <= reach; ++dx) {
                        long xx = cx + dx;
                        if (xx < 0 || xx >= cpa) continue;
                        double dist2 = (static_cast<double>(dx) * dx + static_cast<double>(dy) * dy) * h * h;
                        if (dist2 >= r * r) continue;
                        sum += vals[w.cell_index({yy, xx})];
                        ++count;
                    }
                }
                if (count > 0) best = std::max(best, sum / static_cast<double>(count));
            }
            out.v[w.cell_index({cy, cx})] = Rat(best);
        }
    }
    out.approx = true;
    return out;
}

StepFunction averaging(const GridSystem& g, const StepFunction& f, const CubeFamily& fam,
                       double s) {
    if (s < 1) throw std::domain_error("averaging: s must be >= 1");
    Box wbox = f.w.box();
    for (const Box& b : fam.boxes())
        if (!cell_aligned(f.w, b))
            throw std::invalid_argument("averaging: cube not cell-aligned with the window");
    StepFunction out = StepFunction::zero(f.w);
    Integrator integ(f);
    bool any_approx = false;
    for (std::size_t c = 0; c < fam.size(); ++c) {
        const Box& b = fam.boxes()[c];
        Box clip = b.intersect(wbox);
        if (clip.empty()) continue;
        Rat value;
        if (s == 1.0) {
            value = integ.box_integral(b) / fam.boxes()[c].measure();
        } else {
            value = Rat(mean_s(f, Region::from_box(b), s));
            any_approx = true;
        }
        // assign on all cells inside the clip
        Rat h = f.w.cell_width();
        std::vector<long> lo(f.w.n), hi(f.w.n);
        for (int a = 0; a < f.w.n; ++a) {
            lo[a] = rat_floor((clip.lo[a] - f.w.axis_lo(a)) / h).get_si();
            hi[a] = (rat_ceil((clip.hi[a] - f.w.axis_lo(a)) / h).get_si() - 1);
        }
        if (f.w.n == 1) {
            for (long i = lo[0]; i <= hi[0]; ++i) out.v[static_cast<std::size_t>(i)] = value;
        } else {
            for (long i = lo[0]; i <= hi[0]; ++i)
                for (long j = lo[1]; j <= hi[1]; ++j) out.v[f.w.cell_index({i, j})] = value;
        }
    }
    out.approx = any_approx || f.approx;
    return out;
}

std::vector<Rat> averaging_at_centers(const GridSystem& g, const StepFunction& f,
                                      const CubeFamily& fam) {
    std::vector<Rat> out(f.w.cell_count(), Rat(0));
    Integrator integ(f);
    for (std::size_t c = 0; c < fam.size(); ++c) {
        const Box& b = fam.boxes()[c];
        Rat mean = integ.box_integral(b) / b.measure();
        if (mean == 0) continue;
        // cells whose center lies in b
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (b.contains(f.w.cell_center(i))) out[i] = mean;
        }
    }
    return out;
}

std::vector<std::pair<Box, double>> averaging_pieces(const GridSystem& g, const StepFunction& f,
                                                     const CubeFamily& fam, double s) {
    std::vector<std::pair<Box, double>> pieces;
    pieces.reserve(fam.size());
    Integrator integ(f);
    for (std::size_t c = 0; c < fam.size(); ++c) {
        const Box& b = fam.boxes()[c];
        double value;
        if (s == 1.0)
            value = to_double(integ.box_integral(b) / b.measure());
        else
            value = mean_s(f, Region::from_box(b), s);
        if (value > 0) pieces.emplace_back(b, value);
    }
    return pieces;
}

CZResult cz_decompose(const GridSystem& g, const StepFunction& f, const Rat& lambda, int t) {
    if (lambda <= 0) throw std::domain_error("cz: lambda must be positive");
    CZResult r;
    r.t = t;
    r.lambda = lambda;
    auto supp = f.support_box();
    if (!supp) return r;
    Rat vmax(0);
    for (const Rat& v : f.v) vmax = std::max(vmax, v);
    if (lambda >= vmax) return r;  // every mean is at most the peak value
    Integrator integ(f);
    Rat total = integ.box_integral(f.w.box());

    // Scan roots: all grid-t cubes at the coarsest useful generation that
    // meet the support box.  Every qualifying cube lives below one of them,
    // and the roots themselves never qualify.
    long k_root = cz_root_generation(g, f.w, total, lambda);
    long cap = f.w.K + 1;

    FastMeans fm(f);
    bool fast = fm.ok && mpz_fits_slong_p(lambda.get_num_mpz_t()) &&
                mpz_fits_slong_p(lambda.get_den_mpz_t()) &&
                lambda.get_num() <= (1 << 30) && lambda.get_den() <= (1 << 30) &&
                cap - k_root <= 40;
    if (fast) {
        // Integer descent: node = (k, m); mean > lambda iff
        // I * lam_den > lam_num * D * len_s with everything in int128 range.
        long long ln = mpz_get_si(lambda.get_num_mpz_t());
        long long ld = mpz_get_si(lambda.get_den_mpz_t());
        int tau = g.shift_num(t, 0);
        long kk1 = f.w.K + 1;
        auto cube_lo = [&](long k, long long m) {
            long long e = 1LL << (kk1 - k);
            int sgn = (k % 2 == 0) ? 1 : -1;
            return m * 3 * e + sgn * tau * e;
        };
        std::vector<std::pair<long, long long>> stack;
        {
            long long e = 1LL << (kk1 - k_root);
            int sgn = (k_root % 2 == 0) ? 1 : -1;
            // cubes at k_root meeting the window (superset of the support)
            long long den = 3 * e, shift = sgn * tau * e;
            auto fl = [&](long long xs) {
                long long num = xs - shift;
                return num >= 0 ? num / den : -((-num + den - 1) / den);
            };
            for (long long m = fl(fm.whi_s - 1); m >= fl(fm.wlo_s); --m)
                stack.emplace_back(k_root, m);
        }
        while (!stack.empty()) {
            auto [k, m] = stack.back();
            stack.pop_back();
            long long lo = cube_lo(k, m);
            long long len = 3LL << (kk1 - k);
            long long integral = fm.integral(lo, lo + len);
            if (integral == 0) continue;
            bool above = static_cast<__int128>(integral) * ld >
                         static_cast<__int128>(ln) * fm.dval * len;
            if (above) {
                r.cubes.push_back(CubeAddress{t, k, {Int(static_cast<long>(m))}});
                r.means.push_back(frac(Int(static_cast<long>(integral)),
                                       Int(static_cast<long>(fm.dval)) * Int(static_cast<long>(len))));
            } else if (k < cap) {
                int sgn = (k % 2 == 0) ? 1 : -1;
                long long base = 2 * m + sgn * tau;
                stack.emplace_back(k + 1, base + 1);
                stack.emplace_back(k + 1, base);
            }
        }
    } else {
        std::vector<CubeAddress> stack;
        {
            Rat side = rat_pow2(-k_root);
            int sgn = (k_root % 2 == 0) ? 1 : -1;
            std::vector<long> m_lo(f.w.n), m_hi(f.w.n);
            for (int a = 0; a < f.w.n; ++a) {
                Rat shift = frac(sgn * g.shift_num(t, a), 3);
                m_lo[a] = rat_floor(f.w.axis_lo(a) / side - shift).get_si();
                m_hi[a] = rat_floor(f.w.axis_hi(a) / side - shift).get_si();
            }
            if (f.w.n == 1) {
                for (long m = m_hi[0]; m >= m_lo[0]; --m)
                    stack.push_back(CubeAddress{t, k_root, {Int(m)}});
            } else {
                for (long m0 = m_hi[0]; m0 >= m_lo[0]; --m0)
                    for (long m1 = m_hi[1]; m1 >= m_lo[1]; --m1)
                        stack.push_back(CubeAddress{t, k_root, {Int(m0), Int(m1)}});
            }
        }
        while (!stack.empty()) {
            CubeAddress q = stack.back();
            stack.pop_back();
            Rat integral = integ.box_integral(g.cube_bounds(q));
            if (integral == 0) continue;
            Rat mean = integral / g.cube_measure(q);
            if (mean > lambda) {
                r.cubes.push_back(q);
                r.means.push_back(mean);
            } else if (q.k < cap) {
                auto kids = g.children(q);
                for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(std::move(*it));
            }
        }
    }

    // canonical order
    std::vector<std::size_t> idx(r.cubes.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return lex_less(r.cubes[a], r.cubes[b]); });
    std::vector<CubeAddress> cs;
    std::vector<Rat> ms;
    cs.reserve(idx.size());
    ms.reserve(idx.size());
    for (std::size_t i : idx) {
        cs.push_back(r.cubes[i]);
        ms.push_back(r.means[i]);
    }
    r.cubes = std::move(cs);
    r.means = std::move(ms);

    Box wbox = f.w.box();
    for (const auto& q : r.cubes) {
        Box clip = g.cube_bounds(q).intersect(wbox);
        if (!clip.empty()) r.mask.push_back(clip);
    }
    return r;
}

bool union_covers_box(const std::vector<Box>& disjoint_union, const Box& b) {
    Rat covered(0);
    for (const Box& u : disjoint_union) covered += u.intersect(b).measure();
    return covered == b.measure();
}

bool union_subset(const std::vector<Box>& a, const std::vector<Box>& b_disjoint) {
    for (const Box& part : a)
        if (!union_covers_box(b_disjoint, part)) return false;
    return true;
}

namespace {

// Sorted disjoint intervals with logarithmic coverage queries (n = 1).
class IntervalUnion {
public:
    explicit IntervalUnion(const std::vector<Box>& boxes) {
        std::vector<std::pair<Rat, Rat>> iv;
        iv.reserve(boxes.size());
        for (const Box& b : boxes) iv.emplace_back(b.lo[0], b.hi[0]);
        std::sort(iv.begin(), iv.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        for (auto& [lo, hi] : iv) {
            lo_.push_back(lo);
            hi_.push_back(hi);
        }
    }

    bool covers(const Rat& a, const Rat& b) const {
        Rat cur = a;
        while (cur < b) {
            auto it = std::upper_bound(lo_.begin(), lo_.end(), cur);
            if (it == lo_.begin()) return false;
            std::size_t i = static_cast<std::size_t>(it - lo_.begin()) - 1;
            if (hi_[i] <= cur) return false;
            cur = hi_[i];
        }
        return true;
    }

private:
    std::vector<Rat> lo_, hi_;
};

}  // namespace

std::string cz_check(const GridSystem& g, const StepFunction& f, const CZResult& r) {
    Integrator integ(f);
    std::vector<Box> boxes;
    boxes.reserve(r.cubes.size());
    for (const auto& q : r.cubes) boxes.push_back(g.cube_bounds(q));
    const bool one_d = f.w.n == 1;
    IntervalUnion iu(one_d ? boxes : std::vector<Box>{});
    auto covered = [&](const Box& b) {
        return one_d ? iu.covers(b.lo[0], b.hi[0]) : union_covers_box(boxes, b);
    };

    // (i) pairwise disjoint
    if (one_d) {
        std::vector<std::pair<Rat, Rat>> iv;
        for (const Box& b : boxes) iv.emplace_back(b.lo[0], b.hi[0]);
        std::sort(iv.begin(), iv.end());
        for (std::size_t i = 0; i + 1 < iv.size(); ++i)
            if (iv[i + 1].first < iv[i].second) return "cubes overlap";
    } else {
        for (std::size_t i = 0; i < boxes.size(); ++i)
            for (std::size_t j = i + 1; j < boxes.size(); ++j)
                if (!boxes[i].disjoint(boxes[j])) return "cubes overlap";
    }

    // (ii) lambda < mean <= lambda / epsilon
    Rat eps = g.children_ratio();
    for (std::size_t i = 0; i < r.cubes.size(); ++i) {
        Rat mean = cube_mean1(g, integ, f, r.cubes[i]);
        if (mean != r.means[i]) return "recorded mean mismatch";
        if (!(r.lambda < mean)) return "mean not above lambda";
        if (!(mean <= r.lambda / eps)) return "mean above lambda/epsilon";
    }

    // (iii) maximality: no strict ancestor is contained in the superlevel set
    Rat total(0);
    for (const Box& b : boxes) total += b.measure();
    for (const auto& q : r.cubes) {
        CubeAddress anc = g.parent(q);
        while (g.cube_measure(anc) <= total) {
            if (covered(g.cube_bounds(anc))) return "ancestor contained in superlevel set";
            anc = g.parent(anc);
        }
    }

    // Union equality against an independent enumeration of every cube in the
    // scanned band that meets the window: each cube with mean > lambda must be
    // covered by the selected union, and each selected cube qualifies by (ii).
    auto supp = f.support_box();
    if (!supp) return r.cubes.empty() ? std::string{} : "nonempty result for zero function";
    const Window& w = f.w;
    Rat mass = integ.box_integral(w.box());
    long k_min = cz_root_generation(g, w, mass, r.lambda) - 1;
    for (long k = k_min; k <= w.K + 1; ++k) {
        Rat side = rat_pow2(-k);
        int sgn = (k % 2 == 0) ? 1 : -1;
        std::vector<long> m_lo(w.n), m_hi(w.n);
        for (int a = 0; a < w.n; ++a) {
            Rat shift = frac(sgn * g.shift_num(r.t, a), 3);
            m_lo[a] = rat_floor(w.axis_lo(a) / side - shift).get_si();
            m_hi[a] = rat_floor(w.axis_hi(a) / side - shift).get_si();
        }
        auto check_cube = [&](CubeAddress q) -> bool {
            Box b = g.cube_bounds(q);
            if (b.disjoint(w.box())) return true;
            Rat integral = integ.box_integral(b);
            if (integral == 0) return true;
            Rat mean = integral / g.cube_measure(q);
            if (mean <= r.lambda) return true;
            return covered(b);
        };
        if (w.n == 1) {
            FastMeans fm(f);
            bool fast = fm.ok && w.K + 1 - k <= 40 && mpz_fits_slong_p(r.lambda.get_num_mpz_t()) &&
                        mpz_fits_slong_p(r.lambda.get_den_mpz_t()) &&
                        r.lambda.get_num() <= (1 << 30) && r.lambda.get_den() <= (1 << 30);
            if (fast) {
                long long ln = mpz_get_si(r.lambda.get_num_mpz_t());
                long long ld = mpz_get_si(r.lambda.get_den_mpz_t());
                long long e = 1LL << (w.K + 1 - k);
                long long len = 3 * e, shift = sgn * g.shift_num(r.t, 0) * e;
                for (long m = m_lo[0]; m <= m_hi[0]; ++m) {
                    long long lo = m * len + shift;
                    long long integral = fm.integral(lo, lo + len);
                    if (integral == 0) continue;
                    if (static_cast<__int128>(integral) * ld <=
                        static_cast<__int128>(ln) * fm.dval * len)
                        continue;
                    CubeAddress q{r.t, k, {Int(m)}};
                    if (!covered(g.cube_bounds(q)))
                        return "qualifying cube not covered by selection";
                }
                continue;
            }
            for (long m = m_lo[0]; m <= m_hi[0]; ++m) {
                CubeAddress q{r.t, k, {Int(m)}};
                if (!check_cube(q)) return "qualifying cube not covered by selection";
            }
        } else {
            for (long m0 = m_lo[0]; m0 <= m_hi[0]; ++m0)
                for (long m1 = m_lo[1]; m1 <= m_hi[1]; ++m1) {
                    CubeAddress q{r.t, k, {Int(m0), Int(m1)}};
                    if (!check_cube(q)) return "qualifying cube not covered by selection";
                }
        }
    }

    // Recorded mask must be exactly the selected cubes clipped to the window.
    std::vector<Box> expect;
    Box wbox = w.box();
    for (const Box& b : boxes) {
        Box clip = b.intersect(wbox);
        if (!clip.empty()) expect.push_back(clip);
    }
    if (expect.size() != r.mask.size()) return "mask size mismatch";
    for (std::size_t i = 0; i < expect.size(); ++i)
        if (!(expect[i] == r.mask[i])) return "mask mismatch";
    return std::string{};
}

}  // namespace hkd
