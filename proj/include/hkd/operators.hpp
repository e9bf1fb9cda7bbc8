#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hkd/grid.hpp"
#include "hkd/step_function.hpp"

namespace hkd {

// A finite family of pairwise disjoint dyadic cubes (element of the set S of
// admissible averaging families); may mix shifts and generations.
class CubeFamily {
public:
    CubeFamily() = default;
    CubeFamily(const GridSystem& g, std::vector<CubeAddress> cubes);

    const std::vector<CubeAddress>& cubes() const { return cubes_; }
    const std::vector<Box>& boxes() const { return boxes_; }
    std::size_t size() const { return cubes_.size(); }

private:
    std::vector<CubeAddress> cubes_;
    std::vector<Box> boxes_;
};

struct CZResult {
    int t = 0;
    Rat lambda;
    std::vector<CubeAddress> cubes;  // pairwise disjoint, canonical order
    std::vector<Rat> means;          // exact mean of f over each cube
    std::vector<Box> mask;           // cube boxes clipped to the window
};

// Exact mean of f over the realized cube: integral over Q ∩ window (f is 0
// outside) divided by the full geometric measure of Q.
Rat cube_mean1(const GridSystem& g, const Integrator& integ, const StepFunction& f,
               const CubeAddress& q);

// t-dyadic maximal function sampled at cell centers. The cone of each center
// is scanned from generation K+1 (one below the resolution, where the cone
// cube lies inside the cell for every shift) up to one generation past the
// first cube covering the window. Exact rational output.
StepFunction dyadic_maximal_grid(const GridSystem& g, const StepFunction& f, int t);

// Cellwise max over all 3^n grids.
StepFunction dyadic_maximal(const GridSystem& g, const StepFunction& f);

// Exact uncentered Hardy-Littlewood maximal function at cell midpoints
// (n = 1): the sup of means over closed intervals [a,b] containing the
// midpoint with endpoints at cell boundaries or at the midpoint itself,
// which attains the sup over all intervals for a step function.
StepFunction hl_maximal_1d(const StepFunction& f);

// Approximate n = 2 variant: means over a ladder of sampled balls centered
// at each cell midpoint, with the ball integral taken as a Riemann sum over
// cell centers.  Not part of the exact invariants.
StepFunction hl_maximal_2d_sampled(const StepFunction& f, int radii_per_octave = 2);

// T_{s,Q} f as a StepFunction; every cube's window intersection must be
// cell-aligned (throws otherwise).
StepFunction averaging(const GridSystem& g, const StepFunction& f, const CubeFamily& fam,
                       double s = 1.0);

// Exact T_{1,Q} f evaluated at cell centers; families may be misaligned.
std::vector<Rat> averaging_at_centers(const GridSystem& g, const StepFunction& f,
                                      const CubeFamily& fam);

// (cube box, M_{s,Q} f) pieces for Luxemburg-norm evaluation of T_{s,Q} f.
std::vector<std::pair<Box, double>> averaging_pieces(const GridSystem& g, const StepFunction& f,
                                                     const CubeFamily& fam, double s = 1.0);

// Calderon-Zygmund decomposition of {M^{D^t} f > lambda} in grid t: top-down
// first-hit selection; descent capped one generation below the resolution
// (for the unshifted grid the capped set equals the true superlevel set).
CZResult cz_decompose(const GridSystem& g, const StepFunction& f, const Rat& lambda, int t);

// Re-validates properties (i)-(iii) and the superlevel-union equality against
// an independent enumeration of all cubes in the scanned band.  Returns an
// empty string on success, a violation description otherwise.
std::string cz_check(const GridSystem& g, const StepFunction& f, const CZResult& r);

// Exact set helpers for unions of pairwise disjoint boxes.
bool union_covers_box(const std::vector<Box>& disjoint_union, const Box& b);
bool union_subset(const std::vector<Box>& a, const std::vector<Box>& b_disjoint);

}  // namespace hkd
