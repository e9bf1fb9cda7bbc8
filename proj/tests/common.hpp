#pragma once

#include <memory>

#include "hkd/estimators.hpp"
#include "hkd/json_io.hpp"
#include "hkd/norms.hpp"
#include "hkd/operators.hpp"
#include "hkd/phi_means.hpp"
#include "hkd/util.hpp"

namespace hkd::testing {

// [-4, 4) at resolution K: small default for unit tests.
inline Window small_window(long K = 4) {
    Window w;
    w.n = 1;
    w.k0 = -2;
    w.m0 = {-1};
    w.nb = 2;
    w.K = K;
    return w;
}

// The canonical [-8, 8) experiment window.
inline Window default_window(long K = 8) {
    Window w;
    w.n = 1;
    w.k0 = -3;
    w.m0 = {-1};
    w.nb = 2;
    w.K = K;
    return w;
}

inline StepFunction indicator(const Window& w, const Rat& a, const Rat& b, const Rat& amp = Rat(1)) {
    StepFunction f = StepFunction::indicator(w, Box{{a}, {b}});
    if (amp != 1)
        for (auto& v : f.v) v *= amp;
    return f;
}

// Random nonnegative step function with dyadic values k/2^6, k in [0, 2^12].
inline StepFunction random_step(const Window& w, Rng& rng, bool sparse = false) {
    StepFunction f = StepFunction::zero(w);
    for (auto& v : f.v) {
        if (sparse && rng.uniform() < 0.75) continue;
        v = frac(static_cast<long>(rng.below(1 << 12)), 64);
        v.canonicalize();
    }
    return f;
}

inline std::shared_ptr<const Exponent> const_exponent(const Window& w, const Rat& q) {
    std::vector<Rat> vals(w.cell_count(), q);
    return std::make_shared<Exponent>(w, std::move(vals));
}

// p = left on x < split, right on x >= split (split must be a cell boundary).
inline std::shared_ptr<const Exponent> split_exponent(const Window& w, const Rat& split,
                                                      const Rat& left, const Rat& right) {
    std::vector<Rat> vals(w.cell_count());
    for (std::size_t i = 0; i < vals.size(); ++i)
        vals[i] = (w.cell_center(i)[0] < split) ? left : right;
    return std::make_shared<Exponent>(w, std::move(vals));
}

}  // namespace hkd::testing
