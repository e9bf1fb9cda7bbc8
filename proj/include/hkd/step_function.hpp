#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hkd/grid.hpp"
#include "hkd/rational.hpp"

namespace hkd {

// Finite computational domain: nb contiguous grid-0 base cubes per axis at
// generation k0, refined to the finest generation K.  Cells are the grid-0
// cubes of generation K inside the base box; indexing is row-major with the
// last axis fastest.
struct Window {
    int n = 1;
    long k0 = -3;
    std::vector<long> m0 = {-1};
    int nb = 2;
    long K = 8;

    long cells_per_axis() const { return static_cast<long>(nb) << (K - k0); }
    std::size_t cell_count() const;
    Rat cell_width() const { return rat_pow2(-K); }
    Rat axis_lo(int axis) const { return Rat(m0[axis]) * rat_pow2(-k0); }
    Rat axis_hi(int axis) const { return Rat(m0[axis] + nb) * rat_pow2(-k0); }
    Box box() const;
    Rat cell_measure() const;

    std::vector<long> cell_coords(std::size_t idx) const;
    std::size_t cell_index(const std::vector<long>& coords) const;
    Box cell_box(std::size_t idx) const;
    std::vector<Rat> cell_center(std::size_t idx) const;
    // Cell containing x, or nullopt if outside the window.
    std::optional<std::size_t> locate_cell(const std::vector<Rat>& x) const;

    bool operator==(const Window& o) const {
        return n == o.n && k0 == o.k0 && m0 == o.m0 && nb == o.nb && K == o.K;
    }

    void validate() const;
};

// Nonnegative step function at the window's finest generation.  Values are
// exact rationals; `approx` flags payloads that originated from floating
// point (stored as the exact binary rational of the double).
struct StepFunction {
    Window w;
    std::vector<Rat> v;
    bool approx = false;

    static StepFunction zero(const Window& w);
    // Indicator of a cell-aligned box; throws on misalignment.
    static StepFunction indicator(const Window& w, const Box& b);
    static StepFunction from_doubles(const Window& w, const std::vector<double>& vals);

    const Rat& value(std::size_t idx) const { return v[idx]; }
    bool is_zero() const;
    // Minimal box of nonzero cells, or nullopt when f == 0.
    std::optional<Box> support_box() const;
    void validate() const;
};

// A finite union of pairwise disjoint rational boxes.
struct Region {
    std::vector<Box> parts;

    static Region from_box(const Box& b) { return Region{{b}}; }
    static Region from_cubes(const GridSystem& g, const std::vector<CubeAddress>& cubes);
    Rat measure_within(const Window& w) const;
    Rat measure() const;
};

// Per-axis prefix structure for O(1) exact integrals of clipped boxes.
class Integrator {
public:
    explicit Integrator(const StepFunction& f);

    // Exact integral of f over b (clipped to the window).
    Rat box_integral(const Box& b) const;
    Rat region_integral(const Region& r) const;

private:
    Rat prefix_at(const Rat& x) const;                     // n = 1
    Rat row_integral(long row, const Rat& a, const Rat& b) const;  // n = 2

    const StepFunction& f_;
    long cpa_;
    std::vector<Rat> p_;  // n=1: global prefix; n=2: row-local prefixes
};

Rat integrate(const StepFunction& f, const Region& r);

// s-mean over E: ((1/|E|) ∫_E f^s)^(1/s).  The measure |E| is the full
// geometric measure of E; f vanishes outside the window.  s = 1 is exact.
Rat mean1(const StepFunction& f, const Region& e);
double mean_s(const StepFunction& f, const Region& e, double s);

StepFunction pointwise_map(const StepFunction& f, const std::function<Rat(const Rat&)>& g);

// Exact inner product ⟨f, g⟩ over the shared window.
Rat inner_product(const StepFunction& f, const StepFunction& g);

// True iff b is a union of whole cells of w (after clipping to the window).
bool cell_aligned(const Window& w, const Box& b);

}  // namespace hkd
