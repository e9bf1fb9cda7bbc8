#include "hkd/phi_means.hpp"

#include <cmath>
#include <stdexcept>

#include "hkd/norms.hpp"
#include "hkd/util.hpp"

namespace hkd {

CubeMeanFn::CubeMeanFn(const GridSystem& g, const PhiFamily& phi, const CubeAddress& q, double s)
    : q_(q), s_(s), bar_tag_(phi.tag() == PhiTag::Bar) {
    if (s < 1) throw std::domain_error("cube mean: s must be >= 1");
    const Window& w = phi.window();
    Box b = g.cube_bounds(q);
    if (!w.box().contains_box(b))
        throw std::invalid_argument("cube mean: cube not inside the exponent window");
    Rat qm = g.cube_measure(q);
    measure_ = to_double(qm);
    Rat h = w.cell_width();
    std::vector<long> lo(w.n), hi(w.n);
    for (int a = 0; a < w.n; ++a) {
        lo[a] = rat_floor((b.lo[a] - w.axis_lo(a)) / h).get_si();
        hi[a] = (rat_ceil((b.hi[a] - w.axis_lo(a)) / h).get_si() - 1);
    }
    auto push = [&](std::size_t idx) {
        Rat weight = w.cell_box(idx).intersect(b).measure() / qm;
        if (weight > 0) {
            w_.push_back(to_double(weight));
            c_.push_back(phi.coeff(idx));
            e_.push_back(phi.power(idx));
        }
    };
    if (w.n == 1) {
        for (long i = lo[0]; i <= hi[0]; ++i) push(static_cast<std::size_t>(i));
    } else {
        for (long i = lo[0]; i <= hi[0]; ++i)
            for (long j = lo[1]; j <= hi[1]; ++j) push(w.cell_index({i, j}));
    }
}

double CubeMeanFn::eval(double t) const {
    if (t < 0) throw std::domain_error("cube mean: negative argument");
    if (t == 0) return 0.0;
    if (bar_tag_ && t == 1.0) return 1.0;  // all phi-bar(x,1) equal 1
    Kahan acc;
    for (std::size_t i = 0; i < w_.size(); ++i)
        acc.add(w_[i] * std::pow(c_[i] * std::pow(t, e_[i]), s_));
    return std::pow(acc.sum(), 1.0 / s_);
}

double CubeMeanFn::derivative(double t) const {
    if (t <= 0) return 0.0;
    Kahan sum, dsum;
    for (std::size_t i = 0; i < w_.size(); ++i) {
        double term = w_[i] * std::pow(c_[i], s_) * std::pow(t, e_[i] * s_);
        sum.add(term);
        dsum.add(term * e_[i] * s_ / t);
    }
    double sv = sum.sum();
    if (sv <= 0) return 0.0;
    return (1.0 / s_) * std::pow(sv, 1.0 / s_ - 1.0) * dsum.sum();
}

double phi_mean(const GridSystem& g, const PhiFamily& phi, const CubeAddress& q, double s,
                double t) {
    return CubeMeanFn(g, phi, q, s).eval(t);
}

double mirror_mean(const GridSystem& g, const PhiFamily& phi, const CubeAddress& q, double s,
                   double t) {
    if (t < 0) throw std::domain_error("mirror mean: negative argument");
    if (t == 0) return 0.0;
    CubeMeanFn conj(g, phi.conjugate(), q, s);
    // Stationarity: solve conj'(u) = t on the monotone derivative.
    double lo = 1.0, hi = 1.0;
    while (conj.derivative(hi) < t && hi < 1e290) hi *= 2;
    while (conj.derivative(lo) > t && lo > 1e-290) lo /= 2;
    for (int it = 0; it < 200 && (hi - lo) > 1e-14 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        (conj.derivative(mid) < t ? lo : hi) = mid;
    }
    double u = 0.5 * (lo + hi);
    return t * u - conj.eval(u);
}

namespace {

// Golden-section minimum of a convex function on [a, b].
template <typename F>
double golden_min(F&& fn, double a, double b, int iters = 96) {
    const double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = fn(x1), f2 = fn(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = fn(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = fn(x2);
        }
    }
    return std::min(f1, f2);
}

}  // namespace

double mirror_mean_infconv_oracle(const GridSystem& g, const PhiFamily& phi,
                                  const CubeAddress& q, double t) {
    if (t < 0) throw std::domain_error("oracle: negative argument");
    if (t == 0) return 0.0;
    const Window& w = phi.window();
    Box b = g.cube_bounds(q);
    if (!w.box().contains_box(b)) throw std::invalid_argument("oracle: cube outside window");
    Rat qm = g.cube_measure(q);
    std::vector<double> wt, cc, ee;
    Rat h = w.cell_width();
    long lo = rat_floor((b.lo[0] - w.axis_lo(0)) / h).get_si();
    long hi = (rat_ceil((b.hi[0] - w.axis_lo(0)) / h).get_si() - 1);
    if (w.n != 1) throw std::invalid_argument("oracle: n = 1 only");
    for (long i = lo; i <= hi; ++i) {
        std::size_t idx = static_cast<std::size_t>(i);
        Rat weight = w.cell_box(idx).intersect(b).measure() / qm;
        if (weight > 0) {
            wt.push_back(to_double(weight));
            cc.push_back(phi.coeff(idx));
            ee.push_back(phi.power(idx));
        }
    }
    auto cost = [&](std::size_t i, double f) { return wt[i] * cc[i] * std::pow(f, ee[i]); };
    switch (wt.size()) {
        case 1:
            return cost(0, t);
        case 2: {
            auto total = [&](double f0) {
                double f1 = (t - wt[0] * f0) / wt[1];
                return cost(0, f0) + cost(1, f1);
            };
            return golden_min(total, 0.0, t / wt[0]);
        }
        case 3: {
            auto total = [&](double f0) {
                double rem = t - wt[0] * f0;
                auto inner = [&](double f1) {
                    double f2 = (rem - wt[1] * f1) / wt[2];
                    return cost(1, f1) + cost(2, f2);
                };
                return cost(0, f0) + golden_min(inner, 0.0, rem / wt[1]);
            };
            return golden_min(total, 0.0, t / wt[0]);
        }
        default:
            throw std::invalid_argument("oracle: cube covers more than three cell portions");
    }
}

double ratio_alpha(const GridSystem& g, std::shared_ptr<const Exponent> p, const CubeAddress& q,
                   double s, double t) {
    if (t <= 0) throw std::domain_error("alpha: t must be positive");
    PhiFamily bar = PhiFamily::bar(std::move(p));
    double standard = phi_mean(g, bar, q, s, t);
    double mirror = mirror_mean(g, bar, q, s, t);
    return standard / mirror;
}

double norm_unit_identity(const GridSystem& g, std::shared_ptr<const Exponent> p,
                          const CubeAddress& q) {
    PhiFamily bar = PhiFamily::bar(p);
    const Window& w = p->window();
    Box b = g.cube_bounds(q);
    if (!cell_aligned(w, b) || !w.box().contains_box(b))
        throw std::invalid_argument("norm_unit_identity: cube must be cell-aligned inside the window");
    StepFunction chi = StepFunction::indicator(w, b);
    double norm = luxemburg_norm(chi, bar);
    CubeMeanFn mean(g, bar, q, 1.0);
    return mean.measure() * mean.eval(1.0 / norm);
}

CubePhi standard_means(const GridSystem& g, PhiFamily phi, double s) {
    return [&g, phi = std::move(phi), s](const CubeAddress& q, double t) {
        return phi_mean(g, phi, q, s, t);
    };
}

CubePhi mirror_means(const GridSystem& g, PhiFamily phi, double s) {
    return [&g, phi = std::move(phi), s](const CubeAddress& q, double t) {
        return mirror_mean(g, phi, q, s, t);
    };
}

double domination_constant_estimate(const GridSystem& g, const CubePhi& psi, const CubePhi& phi,
                                    const std::vector<CubeFamily>& families,
                                    const DominationConfig& cfg) {
    Rng rng(cfg.seed);
    double best = 0.0;
    for (const CubeFamily& fam : families) {
        if (fam.size() == 0) continue;
        std::vector<double> measures(fam.size());
        for (std::size_t i = 0; i < fam.size(); ++i)
            measures[i] = to_double(fam.boxes()[i].measure());

        auto phi_sum = [&](const std::vector<double>& t, double scale) {
            Kahan acc;
            for (std::size_t i = 0; i < t.size(); ++i)
                acc.add(measures[i] * phi(fam.cubes()[i], scale * t[i]));
            return acc.sum();
        };
        auto psi_sum = [&](const std::vector<double>& t, double scale) {
            Kahan acc;
            for (std::size_t i = 0; i < t.size(); ++i)
                acc.add(measures[i] * psi(fam.cubes()[i], scale * t[i]));
            return acc.sum();
        };
        // Rescale t onto the constraint surface phi_sum = 1 (monotone in the
        // scale), then read off the psi side.
        auto value_on_constraint = [&](const std::vector<double>& t) {
            double lo = 1.0, hi = 1.0;
            while (phi_sum(t, hi) < 1.0 && hi < 1e200) hi *= 2;
            while (phi_sum(t, lo) > 1.0 && lo > 1e-200) lo /= 2;
            for (int it = 0; it < 120 && (hi - lo) > 1e-13 * hi; ++it) {
                double mid = 0.5 * (lo + hi);
                (phi_sum(t, mid) < 1.0 ? lo : hi) = mid;
            }
            return psi_sum(t, 0.5 * (lo + hi));
        };

        for (int sample = 0; sample <= cfg.samples_per_family; ++sample) {
            std::vector<double> t(fam.size(), 1.0);
            if (sample > 0)
                for (double& x : t) x = std::exp2(12.0 * rng.uniform() - 6.0);
            double val = value_on_constraint(t);
            for (int round = 0; round < cfg.ascent_rounds; ++round) {
                bool improved = false;
                for (std::size_t i = 0; i < t.size(); ++i) {
                    for (double factor : {2.0, 1.25, 0.8, 0.5}) {
                        double saved = t[i];
                        t[i] = saved * factor;
                        double cand = value_on_constraint(t);
                        if (cand > val * (1 + 1e-12)) {
                            val = cand;
                            improved = true;
                        } else {
                            t[i] = saved;
                        }
                    }
                }
                if (!improved) break;
            }
            best = std::max(best, val);
        }
    }
    return best;
}

std::pair<double, double> strong_domination_probe(
    const GridSystem& g, const CubePhi& psi, const CubePhi& phi,
    const std::vector<std::pair<long, CubeFamily>>& ladder) {
    Kahan lhs, rhs;
    for (const auto& [k, fam] : ladder) {
        double tk = std::ldexp(1.0, static_cast<int>(k));
        for (std::size_t i = 0; i < fam.size(); ++i) {
            double m = to_double(fam.boxes()[i].measure());
            lhs.add(m * phi(fam.cubes()[i], tk));
            rhs.add(m * psi(fam.cubes()[i], tk));
        }
    }
    return {lhs.sum(), rhs.sum()};
}

}  // namespace hkd
