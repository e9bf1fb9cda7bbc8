#include "hkd/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "hkd/json_io.hpp"
#include "hkd/util.hpp"

namespace hkd {

namespace {

struct TestFn {
    std::string label;
    StepFunction f;
};

struct Corpus {
    std::shared_ptr<const Exponent> p;
    std::vector<TestFn> fns;
    std::vector<std::pair<std::string, CubeFamily>> shared_families;
};

Rat snap(double x) {
    if (x <= 0) return Rat(0);
    // quantize to 2^-24 so exact-arithmetic fast paths keep small denominators
    double q = std::ldexp(std::round(std::ldexp(x, 24)), -24);
    return q > 0 ? Rat(q) : Rat(0);
}

// Optimal single-cube witness: maximizes the mean of f over q at unit
// Luxemburg norm (Bar family). Lagrange profile f_i = (w_i/(mu |cell| p_i))
// ^(1/(p_i-1)) with mu chosen so the semimodular equals one.
StepFunction straddle_profile(const GridSystem& g, const Exponent& p, const CubeAddress& q) {
    const Window& w = p.window();
    Box b = g.cube_bounds(q).intersect(w.box());
    StepFunction f = StepFunction::zero(w);
    if (b.empty()) return f;
    Rat h = w.cell_width();
    long lo = rat_floor((b.lo[0] - w.axis_lo(0)) / h).get_si();
    long hi = (rat_ceil((b.hi[0] - w.axis_lo(0)) / h).get_si() - 1);
    double cell = to_double(w.cell_measure());
    std::vector<long> idx;
    std::vector<double> wt, pe;
    for (long i = lo; i <= hi; ++i) {
        std::size_t ci = static_cast<std::size_t>(i);
        double weight = to_double(w.cell_box(ci).intersect(b).measure());
        if (weight <= 0) continue;
        idx.push_back(i);
        wt.push_back(weight);
        pe.push_back(p.dvalues()[ci]);
    }
    if (idx.empty()) return f;
    auto modular = [&](double mu) {
        Kahan acc;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            double fi = std::pow(wt[i] / (mu * cell * pe[i]), 1.0 / (pe[i] - 1.0));
            acc.add(cell * std::pow(fi, pe[i]));
        }
        return acc.sum();
    };
    double mlo = 1.0, mhi = 1.0;
    while (modular(mhi) > 1.0 && mhi < 1e200) mhi *= 2;
    while (modular(mlo) < 1.0 && mlo > 1e-200) mlo /= 2;
    for (int it = 0; it < 120 && (mhi - mlo) > 1e-13 * mhi; ++it) {
        double mid = 0.5 * (mlo + mhi);
        (modular(mid) > 1.0 ? mlo : mhi) = mid;
    }
    double mu = 0.5 * (mlo + mhi);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        double fi = std::pow(wt[i] / (mu * cell * pe[i]), 1.0 / (pe[i] - 1.0));
        f.v[static_cast<std::size_t>(idx[i])] = snap(fi);
    }
    f.approx = true;
    return f;
}

std::vector<CubeAddress> hotspot_cubes(const GridSystem& g, const EstimatorConfig& cfg,
                                       const Window& w, const std::vector<Rat>& hotspots) {
    std::vector<CubeAddress> cubes;
    for (const Rat& xi : hotspots) {
        std::vector<Rat> pt{xi};
        for (long j = w.k0; j <= w.K; ++j) {
            if (!cfg.grid0_only) {
                for (int t = 1; t < g.num_grids(); ++t) {
                    CubeAddress q = g.locate(pt, t, j);
                    Box b = g.cube_bounds(q);
                    if (b.lo[0] < xi && xi < b.hi[0] && !b.intersect(w.box()).empty())
                        cubes.push_back(q);
                }
            }
            CubeAddress q0 = g.locate(pt, 0, j);
            if (!g.cube_bounds(q0).intersect(w.box()).empty()) cubes.push_back(q0);
        }
    }
    return cubes;
}

Corpus build_corpus(const GridSystem& g, const EstimatorConfig& cfg) {
    Corpus c;
    Window w = cfg.window();
    w.validate();
    if (w.n != 1) throw std::invalid_argument("estimators: n = 1 windows only");
    c.p = std::make_shared<Exponent>(parse_exponent(cfg.exponent, w));

    std::vector<Rat> hotspots = c.p->discontinuities();
    {
        // Always probe the window-interior origin of the shift construction.
        Rat zero(0);
        if (w.axis_lo(0) < zero && zero < w.axis_hi(0) &&
            std::find(hotspots.begin(), hotspots.end(), zero) == hotspots.end())
            hotspots.push_back(zero);
    }
    std::sort(hotspots.begin(), hotspots.end());

    Rat h = w.cell_width();
    auto aligned_indicator = [&](const Rat& a, const Rat& b, const Rat& amp) {
        Box box{{std::max(a, w.axis_lo(0))}, {std::min(b, w.axis_hi(0))}};
        StepFunction f = StepFunction::indicator(w, box);
        if (amp != 1)
            for (auto& v : f.v) v *= amp;
        return f;
    };

    // Indicators and blow-up-normalized bumps on both sides of each hotspot.
    for (const Rat& xi : hotspots) {
        for (long j = 0; j <= w.K; j += 2) {
            Rat len = rat_pow2(-j);
            if (xi + len <= w.axis_hi(0)) {
                auto right = w.locate_cell({xi + h / 2});
                double pr = right ? c.p->dvalues()[*right] : 2.0;
                c.fns.push_back({"ind:r", aligned_indicator(xi, xi + len, Rat(1))});
                c.fns.push_back(
                    {"bump:r", aligned_indicator(xi, xi + len, snap(std::exp2(j / pr)))});
            }
            if (xi - len >= w.axis_lo(0)) {
                auto left = w.locate_cell({xi - h / 2});
                double pl = left ? c.p->dvalues()[*left] : 2.0;
                c.fns.push_back({"ind:l", aligned_indicator(xi - len, xi, Rat(1))});
                c.fns.push_back(
                    {"bump:l", aligned_indicator(xi - len, xi, snap(std::exp2(j / pl)))});
            }
        }
    }

    // Optimal profiles for the straddling and cone cubes of each hotspot.
    std::vector<CubeAddress> singles = hotspot_cubes(g, cfg, w, hotspots);
    for (const CubeAddress& q : singles) {
        StepFunction f = straddle_profile(g, *c.p, q);
        if (!f.is_zero()) c.fns.push_back({"profile", std::move(f)});
        c.shared_families.emplace_back("single", CubeFamily(g, {q}));
    }

    // Base cubes of the window as one aligned family.
    {
        std::vector<CubeAddress> base;
        for (int ib = 0; ib < w.nb; ++ib)
            base.push_back(CubeAddress{0, w.k0, {Int(w.m0[0] + ib)}});
        c.shared_families.emplace_back("base", CubeFamily(g, base));
    }

    // Seeded random disjoint families.
    Rng rng(cfg.seed);
    Rng fam_rng = rng.fork();
    for (int r = 0; r < cfg.random_families; ++r) {
        int t = cfg.grid0_only ? 0 : static_cast<int>(fam_rng.below(g.num_grids()));
        std::vector<CubeAddress> cubes;
        std::vector<Box> boxes;
        for (int attempt = 0; attempt < 10; ++attempt) {
            long j = fam_rng.range(w.k0, w.K);
            Rat x = w.axis_lo(0) + Rat(fam_rng.below(w.cell_count())) * h + h / 2;
            CubeAddress q = g.locate({x}, t, j);
            Box b = g.cube_bounds(q);
            bool ok = !b.intersect(w.box()).empty();
            for (const Box& other : boxes)
                if (!b.disjoint(other)) ok = false;
            if (ok) {
                cubes.push_back(q);
                boxes.push_back(b);
            }
        }
        if (!cubes.empty()) c.shared_families.emplace_back("random", CubeFamily(g, cubes));
    }

    // Seeded random step functions with tame dynamic range.
    Rng fn_rng = rng.fork();
    for (int r = 0; r < cfg.random_functions; ++r) {
        StepFunction f = StepFunction::zero(w);
        for (auto& v : f.v) v = snap(std::exp2(4.0 * fn_rng.uniform() - 2.0));
        f.approx = true;
        c.fns.push_back({"random", std::move(f)});
    }
    return c;
}

struct FnResult {
    double best_family = 0;
    Witness family_witness;
    double best_max = 0;
    Witness max_witness;
    std::size_t evaluated = 0;
};

FnResult evaluate_function(const GridSystem& g, const EstimatorConfig& cfg, const Corpus& corpus,
                           const TestFn& tf) {
    FnResult res;
    PhiFamily phi(cfg.family, corpus.p);
    double nf = luxemburg_norm(tf.f, phi);
    if (nf <= 0) return res;

    auto try_family = [&](const std::string& label, const CubeFamily& fam) {
        auto pieces = averaging_pieces(g, tf.f, fam, 1.0);
        if (pieces.empty()) return;
        double ratio = luxemburg_norm_atoms(atoms_of_pieces(phi, pieces)) / nf;
        ++res.evaluated;
        if (ratio > res.best_family) {
            res.best_family = ratio;
            res.family_witness = {"family", label + "/" + tf.label, tf.f, fam.cubes(), ratio};
        }
    };

    for (const auto& [label, fam] : corpus.shared_families) try_family(label, fam);

    // Calderon-Zygmund families of this function at thresholds 2^k.
    std::vector<int> grids;
    if (cfg.grid0_only)
        grids = {0};
    else
        for (int t = 0; t < g.num_grids(); ++t) grids.push_back(t);
    for (int t : grids) {
        std::vector<CubeAddress> prev;
        for (int k = cfg.lambda_lo; k <= cfg.lambda_hi; ++k) {
            Rat lambda = rat_pow2(k);
            CZResult cz = cz_decompose(g, tf.f, lambda, t);
            if (cz.cubes.empty()) break;
            if (cz.cubes == prev) continue;
            prev = cz.cubes;
            try_family("cz:t" + std::to_string(t) + ":k" + std::to_string(k),
                       CubeFamily(g, cz.cubes));
        }
    }

    // Maximal bound for the same function; never below the averaging bound
    // (every averaging image is dominated by the maximal function).
    StepFunction mf =
        cfg.grid0_only ? dyadic_maximal_grid(g, tf.f, 0) : dyadic_maximal(g, tf.f);
    double rmax = luxemburg_norm(mf, phi) / nf;
    ++res.evaluated;
    res.best_max = rmax;
    res.max_witness = {"maximal", tf.label, tf.f, {}, rmax};
    if (res.best_family > res.best_max) {
        res.best_max = res.best_family;
        res.max_witness = res.family_witness;
        res.max_witness.kind = "family";
    }
    return res;
}

}  // namespace

std::pair<EstimatorReport, EstimatorReport> estimate_pair(const GridSystem& g,
                                                          const EstimatorConfig& cfg) {
    Corpus corpus = build_corpus(g, cfg);
    std::vector<FnResult> results(corpus.fns.size());
    parallel_for(corpus.fns.size(), [&](std::size_t i) {
        results[i] = evaluate_function(g, cfg, corpus, corpus.fns[i]);
    });

    EstimatorReport ad{"averaging", cfg, 0, 0, {}};
    EstimatorReport mx{"maximal", cfg, 0, 0, {}};
    for (const FnResult& r : results) {
        ad.candidates += r.evaluated;
        mx.candidates += r.evaluated;
        if (r.best_family > ad.best_ratio) {
            ad.best_ratio = r.best_family;
            ad.witness = r.family_witness;
        }
        if (r.best_max > mx.best_ratio) {
            mx.best_ratio = r.best_max;
            mx.witness = r.max_witness;
        }
    }
    return {ad, mx};
}

EstimatorReport ad_constant_estimate(const GridSystem& g, const EstimatorConfig& cfg) {
    return estimate_pair(g, cfg).first;
}

EstimatorReport maximal_norm_estimate(const GridSystem& g, const EstimatorConfig& cfg) {
    return estimate_pair(g, cfg).second;
}

double replay_witness(const GridSystem& g, const EstimatorConfig& cfg, const Witness& wit) {
    Window w = cfg.window();
    auto p = std::make_shared<Exponent>(parse_exponent(cfg.exponent, w));
    PhiFamily phi(cfg.family, p);
    double nf = luxemburg_norm(wit.f, phi);
    if (nf <= 0) return 0;
    if (wit.kind == "maximal") {
        StepFunction mf =
            cfg.grid0_only ? dyadic_maximal_grid(g, wit.f, 0) : dyadic_maximal(g, wit.f);
        return luxemburg_norm(mf, phi) / nf;
    }
    CubeFamily fam(g, wit.cubes);
    auto pieces = averaging_pieces(g, wit.f, fam, 1.0);
    return luxemburg_norm_atoms(atoms_of_pieces(phi, pieces)) / nf;
}

EquivReport equiv_report(const GridSystem& g, EstimatorConfig cfg, std::vector<long> ladder) {
    if (ladder.size() < 2) throw std::invalid_argument("equiv_report: ladder needs >= 2 levels");
    EquivReport rep;
    for (long K : ladder) {
        EstimatorConfig step = cfg;
        step.K = K;
        auto [ad, mx] = estimate_pair(g, step);
        rep.trace.push_back({K, ad.best_ratio, mx.best_ratio});
        if (K == ladder.back()) {
            rep.cfg = step;
            rep.ad_witness = ad.witness;
            rep.max_witness = mx.witness;
        }
    }
    const EquivRow& first = rep.trace.front();
    const EquivRow& last = rep.trace.back();
    rep.ad_growth = first.ad_ratio > 0 ? last.ad_ratio / first.ad_ratio : 1.0;
    rep.max_growth = first.max_ratio > 0 ? last.max_ratio / first.max_ratio : 1.0;
    if (rep.ad_growth >= kGrowthUnbounded && rep.max_growth >= kGrowthUnbounded)
        rep.verdict = "unbounded-consistent";
    else if (rep.ad_growth <= kGrowthBounded && rep.max_growth <= kGrowthBounded)
        rep.verdict = "bounded-consistent";
    else
        rep.verdict = "inconclusive";
    return rep;
}

}  // namespace hkd
