#include "hkd/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hkd/util.hpp"

namespace hkd {

std::vector<ModularAtom> atoms_of(const StepFunction& f, const PhiFamily& phi) {
    if (!(f.w == phi.window())) throw std::invalid_argument("norms: window mismatch");
    std::vector<ModularAtom> atoms;
    atoms.reserve(f.v.size());
    double cm = to_double(f.w.cell_measure());
    for (std::size_t i = 0; i < f.v.size(); ++i) {
        if (f.v[i] == 0) continue;
        atoms.push_back({cm, phi.coeff(i), phi.power(i), to_double(f.v[i])});
    }
    return atoms;
}

std::vector<ModularAtom> atoms_of_pieces(const PhiFamily& phi,
                                         const std::vector<std::pair<Box, double>>& pieces) {
    const Window& w = phi.window();
    std::vector<ModularAtom> atoms;
    Box wb = w.box();
    Rat h = w.cell_width();
    for (const auto& [box, value] : pieces) {
        if (value <= 0) continue;
        Box c = box.intersect(wb);
        if (c.empty()) continue;
        std::vector<long> lo(w.n), hi(w.n);
        for (int a = 0; a < w.n; ++a) {
            lo[a] = std::max<long>(0, rat_floor((c.lo[a] - w.axis_lo(a)) / h).get_si());
            hi[a] = std::min<long>(w.cells_per_axis() - 1,
                                   (rat_ceil((c.hi[a] - w.axis_lo(a)) / h).get_si() - 1));
        }
        auto push = [&](std::size_t idx) {
            Rat weight = w.cell_box(idx).intersect(c).measure();
            if (weight > 0) atoms.push_back({to_double(weight), phi.coeff(idx), phi.power(idx), value});
        };
        if (w.n == 1) {
            // exact clips at the two boundary cells, run-length grouping of
            // equal-exponent full cells in between
            double hc = to_double(h);
            long i0 = lo[0], i1 = hi[0];
            if (c.lo[0] > w.cell_box(static_cast<std::size_t>(i0)).lo[0]) {
                push(static_cast<std::size_t>(i0));
                ++i0;
            }
            if (i1 >= i0 && c.hi[0] < w.cell_box(static_cast<std::size_t>(i1)).hi[0]) {
                push(static_cast<std::size_t>(i1));
                --i1;
            }
            long i = i0;
            while (i <= i1) {
                long j = i;
                double cc = phi.coeff(static_cast<std::size_t>(i));
                double ee = phi.power(static_cast<std::size_t>(i));
                while (j + 1 <= i1 && phi.coeff(static_cast<std::size_t>(j + 1)) == cc &&
                       phi.power(static_cast<std::size_t>(j + 1)) == ee)
                    ++j;
                atoms.push_back({hc * static_cast<double>(j - i + 1), cc, ee, value});
                i = j + 1;
            }
        } else {
            for (long i = lo[0]; i <= hi[0]; ++i)
                for (long j = lo[1]; j <= hi[1]; ++j) push(w.cell_index({i, j}));
        }
    }
    return atoms;
}

namespace {

// Collapsed representation: rho(lambda) = sum_g B_g lambda^(-e_g).
struct Grouped {
    std::vector<double> b, e;
};

Grouped group(const std::vector<ModularAtom>& atoms) {
    std::vector<std::pair<double, double>> terms;  // (e, B)
    terms.reserve(atoms.size());
    for (const auto& a : atoms) {
        if (a.value <= 0 || a.weight <= 0) continue;
        terms.emplace_back(a.power, a.weight * a.coeff * std::pow(a.value, a.power));
    }
    std::sort(terms.begin(), terms.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    Grouped g;
    for (const auto& [e, b] : terms) {
        if (!g.e.empty() && g.e.back() == e)
            g.b.back() += b;
        else {
            g.e.push_back(e);
            g.b.push_back(b);
        }
    }
    return g;
}

double grouped_modular(const Grouped& g, double lambda) {
    Kahan acc;
    double ll = std::log(lambda);
    for (std::size_t i = 0; i < g.e.size(); ++i) acc.add(g.b[i] * std::exp(-g.e[i] * ll));
    return acc.sum();
}

}  // namespace

double modular_at(const std::vector<ModularAtom>& atoms, double lambda) {
    return grouped_modular(group(atoms), lambda);
}

double semimodular(const StepFunction& f, const PhiFamily& phi) {
    return modular_at(atoms_of(f, phi), 1.0);
}

double luxemburg_norm_atoms(const std::vector<ModularAtom>& atoms) {
    Grouped g = group(atoms);
    if (g.e.empty()) return 0.0;
    // rho is strictly decreasing in lambda; bracket outward from 1.
    double lo = 1.0, hi = 1.0;
    if (grouped_modular(g, 1.0) > 1.0) {
        while (grouped_modular(g, hi) > 1.0 && hi < 1e300) hi *= 2;
        lo = hi / 2;
    } else {
        while (grouped_modular(g, lo) <= 1.0 && lo > 1e-300) lo /= 2;
        hi = lo * 2;
    }
    if (grouped_modular(g, lo) < 1.0) return 0.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-14 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        if (grouped_modular(g, mid) > 1.0)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

double luxemburg_norm(const StepFunction& f, const PhiFamily& phi) {
    return luxemburg_norm_atoms(atoms_of(f, phi));
}

double classical_norm(const StepFunction& f, double q) {
    Kahan acc;
    double cm = to_double(f.w.cell_measure());
    for (const Rat& v : f.v) {
        double d = to_double(v);
        if (d > 0) acc.add(cm * std::pow(d, q));
    }
    return std::pow(acc.sum(), 1.0 / q);
}

double holder_gap(const StepFunction& f, const StepFunction& g, const PhiFamily& phi) {
    double nf = luxemburg_norm(f, phi);
    double ng = luxemburg_norm(g, phi.conjugate());
    return 2.0 * nf * ng - to_double(inner_product(f, g));
}

double power_conjugate_value(double c, double e, double u) {
    if (u <= 0) return 0.0;
    double t = std::pow(u / (c * e), 1.0 / (e - 1.0));
    return u * t - c * std::pow(t, e);
}

}  // namespace hkd
