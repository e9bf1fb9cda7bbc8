#include "hkd/step_function.hpp"

#include <cmath>
#include <stdexcept>

#include "hkd/util.hpp"

namespace hkd {

std::size_t Window::cell_count() const {
    std::size_t c = 1;
    for (int a = 0; a < n; ++a) c *= static_cast<std::size_t>(cells_per_axis());
    return c;
}

Box Window::box() const {
    Box b;
    b.lo.resize(n);
    b.hi.resize(n);
    for (int a = 0; a < n; ++a) {
        b.lo[a] = axis_lo(a);
        b.hi[a] = axis_hi(a);
    }
    return b;
}

Rat Window::cell_measure() const {
    Rat h = cell_width();
    Rat m = h;
    for (int a = 1; a < n; ++a) m *= h;
    return m;
}

std::vector<long> Window::cell_coords(std::size_t idx) const {
    std::vector<long> c(n);
    long cpa = cells_per_axis();
    for (int a = n - 1; a >= 0; --a) {
        c[a] = static_cast<long>(idx % static_cast<std::size_t>(cpa));
        idx /= static_cast<std::size_t>(cpa);
    }
    return c;
}

std::size_t Window::cell_index(const std::vector<long>& coords) const {
    std::size_t idx = 0;
    long cpa = cells_per_axis();
    for (int a = 0; a < n; ++a) idx = idx * static_cast<std::size_t>(cpa) + static_cast<std::size_t>(coords[a]);
    return idx;
}

Box Window::cell_box(std::size_t idx) const {
    auto c = cell_coords(idx);
    Box b;
    b.lo.resize(n);
    b.hi.resize(n);
    Rat h = cell_width();
    for (int a = 0; a < n; ++a) {
        b.lo[a] = axis_lo(a) + Rat(c[a]) * h;
        b.hi[a] = b.lo[a] + h;
    }
    return b;
}

std::vector<Rat> Window::cell_center(std::size_t idx) const {
    return cell_box(idx).center();
}

std::optional<std::size_t> Window::locate_cell(const std::vector<Rat>& x) const {
    std::vector<long> c(n);
    long cpa = cells_per_axis();
    Rat h = cell_width();
    for (int a = 0; a < n; ++a) {
        Rat rel = (x[a] - axis_lo(a)) / h;
        Int fl = rat_floor(rel);
        if (fl < 0 || fl >= cpa) return std::nullopt;
        c[a] = fl.get_si();
    }
    return cell_index(c);
}

void Window::validate() const {
    if (n != 1 && n != 2) throw std::invalid_argument("window: n must be 1 or 2");
    if (K < k0) throw std::invalid_argument("window: K < k0");
    if (nb < 1) throw std::invalid_argument("window: nb < 1");
    if (static_cast<int>(m0.size()) != n) throw std::invalid_argument("window: m0 size != n");
    if (K - k0 > 20) throw std::invalid_argument("window: refinement too deep");
    if (cell_count() > (1u << 22)) throw std::invalid_argument("window: too many cells");
}

StepFunction StepFunction::zero(const Window& w) {
    StepFunction f;
    f.w = w;
    f.v.assign(w.cell_count(), Rat(0));
    return f;
}

StepFunction StepFunction::indicator(const Window& w, const Box& b) {
    if (!cell_aligned(w, b)) throw std::invalid_argument("indicator: box not cell-aligned");
    StepFunction f = zero(w);
    for (std::size_t i = 0; i < f.v.size(); ++i) {
        if (b.contains(w.cell_center(i))) f.v[i] = 1;
    }
    return f;
}

StepFunction StepFunction::from_doubles(const Window& w, const std::vector<double>& vals) {
    if (vals.size() != w.cell_count()) throw std::invalid_argument("from_doubles: size mismatch");
    StepFunction f;
    f.w = w;
    f.approx = true;
    f.v.reserve(vals.size());
    for (double d : vals) {
        if (d < 0 || !std::isfinite(d)) throw std::invalid_argument("from_doubles: negative or non-finite value");
        f.v.emplace_back(d);  // exact binary rational of the double
    }
    return f;
}

bool StepFunction::is_zero() const {
    for (const Rat& x : v)
        if (x != 0) return false;
    return true;
}

std::optional<Box> StepFunction::support_box() const {
    long cpa = w.cells_per_axis();
    std::vector<long> lo(w.n, cpa), hi(w.n, -1);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == 0) continue;
        auto c = w.cell_coords(i);
        for (int a = 0; a < w.n; ++a) {
            lo[a] = std::min(lo[a], c[a]);
            hi[a] = std::max(hi[a], c[a]);
        }
    }
    if (hi[0] < 0) return std::nullopt;
    Box b;
    b.lo.resize(w.n);
    b.hi.resize(w.n);
    Rat h = w.cell_width();
    for (int a = 0; a < w.n; ++a) {
        b.lo[a] = w.axis_lo(a) + Rat(lo[a]) * h;
        b.hi[a] = w.axis_lo(a) + Rat(hi[a] + 1) * h;
    }
    return b;
}

void StepFunction::validate() const {
    w.validate();
    if (v.size() != w.cell_count()) throw std::invalid_argument("step function: value count mismatch");
    for (const Rat& x : v)
        if (x < 0) throw std::invalid_argument("step function: negative value");
}

Region Region::from_cubes(const GridSystem& g, const std::vector<CubeAddress>& cubes) {
    Region r;
    r.parts.reserve(cubes.size());
    for (const auto& c : cubes) r.parts.push_back(g.cube_bounds(c));
    return r;
}

Rat Region::measure_within(const Window& w) const {
    Box wb = w.box();
    Rat m = 0;
    for (const auto& p : parts) m += p.intersect(wb).measure();
    return m;
}

Rat Region::measure() const {
    Rat m = 0;
    for (const auto& p : parts) m += p.measure();
    return m;
}

bool cell_aligned(const Window& w, const Box& b) {
    Box c = b.intersect(w.box());
    if (c.empty()) return true;
    Rat h = w.cell_width();
    for (int a = 0; a < w.n; ++a) {
        if (!is_integer((c.lo[a] - w.axis_lo(a)) / h)) return false;
        if (!is_integer((c.hi[a] - w.axis_lo(a)) / h)) return false;
    }
    return true;
}

Integrator::Integrator(const StepFunction& f) : f_(f), cpa_(f.w.cells_per_axis()) {
    Rat h = f.w.cell_width();
    if (f.w.n == 1) {
        p_.assign(cpa_ + 1, Rat(0));
        for (long i = 0; i < cpa_; ++i) p_[i + 1] = p_[i] + f.v[i] * h;
    } else {
        // Row-local prefixes: p_[row*(cpa+1) + i] integrates row `row` over
        // the first i cells at unit row height (multiply by overlap later).
        p_.assign(static_cast<std::size_t>(cpa_) * (cpa_ + 1), Rat(0));
        for (long row = 0; row < cpa_; ++row) {
            std::size_t base = static_cast<std::size_t>(row) * (cpa_ + 1);
            for (long i = 0; i < cpa_; ++i) {
                std::size_t cell = f.w.cell_index({row, i});
                p_[base + i + 1] = p_[base + i] + f.v[cell] * h;
            }
        }
    }
}

Rat Integrator::prefix_at(const Rat& x) const {
    const Window& w = f_.w;
    Rat lo = w.axis_lo(0), hi = w.axis_hi(0);
    if (x <= lo) return Rat(0);
    if (x >= hi) return p_[cpa_];
    Rat h = w.cell_width();
    Rat rel = (x - lo) / h;
    long i = rat_floor(rel).get_si();
    return p_[i] + f_.v[i] * (x - (lo + Rat(i) * h));
}

Rat Integrator::row_integral(long row, const Rat& a, const Rat& b) const {
    const Window& w = f_.w;
    Rat lo = w.axis_lo(1), hi = w.axis_hi(1);
    Rat aa = std::max(a, lo), bb = std::min(b, hi);
    if (bb <= aa) return Rat(0);
    Rat h = w.cell_width();
    std::size_t base = static_cast<std::size_t>(row) * (cpa_ + 1);
    auto pref = [&](const Rat& x) -> Rat {
        if (x <= lo) return Rat(0);
        if (x >= hi) return p_[base + cpa_];
        long i = rat_floor((x - lo) / h).get_si();
        std::size_t cell = w.cell_index({row, i});
        return p_[base + i] + f_.v[cell] * (x - (lo + Rat(i) * h));
    };
    return pref(bb) - pref(aa);
}

Rat Integrator::box_integral(const Box& b) const {
    const Window& w = f_.w;
    if (w.n == 1) return prefix_at(b.hi[0]) - prefix_at(b.lo[0]);

    Rat lo0 = w.axis_lo(0), hi0 = w.axis_hi(0);
    Rat a0 = std::max(b.lo[0], lo0), b0 = std::min(b.hi[0], hi0);
    if (b0 <= a0) return Rat(0);
    Rat h = w.cell_width();
    long r_first = rat_floor((a0 - lo0) / h).get_si();
    long r_last = rat_ceil((b0 - lo0) / h).get_si() - 1;
    Rat total = 0;
    for (long row = r_first; row <= r_last && row < cpa_; ++row) {
        if (row < 0) continue;
        Rat rlo = lo0 + Rat(row) * h, rhi = rlo + h;
        Rat overlap = std::min(b0, rhi) - std::max(a0, rlo);
        if (overlap <= 0) continue;
        total += row_integral(row, b.lo[1], b.hi[1]) * overlap;
    }
    return total;
}

Rat Integrator::region_integral(const Region& r) const {
    Rat total = 0;
    for (const auto& p : r.parts) total += box_integral(p);
    return total;
}

Rat integrate(const StepFunction& f, const Region& r) {
    return Integrator(f).region_integral(r);
}

Rat mean1(const StepFunction& f, const Region& e) {
    Rat m = e.measure();
    if (m <= 0) throw std::domain_error("mean: zero-measure region");
    return integrate(f, e) / m;
}

double mean_s(const StepFunction& f, const Region& e, double s) {
    if (s < 1) throw std::domain_error("mean: s must be >= 1");
    Rat m = e.measure();
    if (m <= 0) throw std::domain_error("mean: zero-measure region");
    if (s == 1.0) return to_double(mean1(f, e));
    // ∫_E f^s with exact clipping weights and floating s-powers.
    Kahan acc;
    const Window& w = f.w;
    for (const auto& part : e.parts) {
        Box c = part.intersect(w.box());
        if (c.empty()) continue;
        // iterate cells intersecting c
        Rat h = w.cell_width();
        std::vector<long> lo(w.n), hi(w.n);
        for (int a = 0; a < w.n; ++a) {
            lo[a] = std::max<long>(0, rat_floor((c.lo[a] - w.axis_lo(a)) / h).get_si());
            hi[a] = std::min<long>(w.cells_per_axis() - 1, (rat_ceil((c.hi[a] - w.axis_lo(a)) / h).get_si() - 1));
        }
        auto cell_weight = [&](std::size_t idx) -> Rat {
            return w.cell_box(idx).intersect(c).measure();
        };
        if (w.n == 1) {
            for (long i = lo[0]; i <= hi[0]; ++i) {
                std::size_t idx = static_cast<std::size_t>(i);
                double val = to_double(f.v[idx]);
                if (val > 0) acc.add(to_double(cell_weight(idx)) * std::pow(val, s));
            }
        } else {
            for (long i = lo[0]; i <= hi[0]; ++i)
                for (long j = lo[1]; j <= hi[1]; ++j) {
                    std::size_t idx = w.cell_index({i, j});
                    double val = to_double(f.v[idx]);
                    if (val > 0) acc.add(to_double(cell_weight(idx)) * std::pow(val, s));
                }
        }
    }
    return std::pow(acc.sum() / to_double(m), 1.0 / s);
}

StepFunction pointwise_map(const StepFunction& f, const std::function<Rat(const Rat&)>& g) {
    StepFunction out = f;
    for (auto& x : out.v) x = g(x);
    return out;
}

Rat inner_product(const StepFunction& f, const StepFunction& g) {
    if (!(f.w == g.w)) throw std::invalid_argument("inner_product: window mismatch");
    Rat total = 0;
    Rat cm = f.w.cell_measure();
    for (std::size_t i = 0; i < f.v.size(); ++i)
        if (f.v[i] != 0 && g.v[i] != 0) total += f.v[i] * g.v[i];
    return total * cm;
}

}  // namespace hkd
