#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "hkd/exponent.hpp"
#include "hkd/operators.hpp"

namespace hkd {

// Means of a Phi-family over a cube:
//   (M_{s,Q} phi)(t) = (sum_i w_i (c_i t^{e_i})^s)^(1/s),
// with exact clipped weights w_i = |cell_i ∩ Q| / |Q|.  The cube must lie
// inside the exponent's window (the family is undefined outside it).
class CubeMeanFn {
public:
    CubeMeanFn(const GridSystem& g, const PhiFamily& phi, const CubeAddress& q, double s);

    double eval(double t) const;
    // d/dt of eval; continuous and strictly increasing for the power families.
    double derivative(double t) const;
    double measure() const { return measure_; }
    const CubeAddress& cube() const { return q_; }
    std::size_t pieces() const { return w_.size(); }

private:
    CubeAddress q_;
    double s_;
    double measure_;
    bool bar_tag_;
    std::vector<double> w_, c_, e_;
};

double phi_mean(const GridSystem& g, const PhiFamily& phi, const CubeAddress& q, double s,
                double t);

// Mirror means (M_{s,Q} phi*)*(t), computed as sup_u (t u - (M_{s,Q} phi*)(u))
// via bisection on the monotone stationarity condition.
double mirror_mean(const GridSystem& g, const PhiFamily& phi, const CubeAddress& q, double s,
                   double t);

// Infimal-convolution oracle at s = 1 for cubes covering at most three cell
// portions: minimizes the mean of phi(x, f(x)) subject to M_Q f = t by nested
// golden-section search on the constraint slab.
double mirror_mean_infconv_oracle(const GridSystem& g, const PhiFamily& phi,
                                  const CubeAddress& q, double t);

// alpha_{s,Q}(t) = (M_{s,Q} bar)(t) / (M_{s,Q} bar*)*(t), always >= 1 up to
// solver tolerance.
double ratio_alpha(const GridSystem& g, std::shared_ptr<const Exponent> p, const CubeAddress& q,
                   double s, double t);

// |Q| (M_{1,Q} bar)(1 / ||chi_Q||_bar); equals 1 by the unit sphere property.
double norm_unit_identity(const GridSystem& g, std::shared_ptr<const Exponent> p,
                          const CubeAddress& q);

// Cube-indexed Phi-data.
using CubePhi = std::function<double(const CubeAddress&, double)>;

CubePhi standard_means(const GridSystem& g, PhiFamily phi, double s);
CubePhi mirror_means(const GridSystem& g, PhiFamily phi, double s);

struct DominationConfig {
    std::uint64_t seed = 1;
    int samples_per_family = 16;
    int ascent_rounds = 3;
};

// Lower bound on the domination constant: max over sampled families and
// scalar sequences with sum |Q| phi(Q, t_Q) = 1 of sum |Q| psi(Q, t_Q),
// via global rescaling onto the constraint plus coordinate ascent.
double domination_constant_estimate(const GridSystem& g, const CubePhi& psi, const CubePhi& phi,
                                    const std::vector<CubeFamily>& families,
                                    const DominationConfig& cfg = {});

// The two sides of the strong-domination sum for a ladder of families at
// scales 2^k; experiment logging only.
std::pair<double, double> strong_domination_probe(
    const GridSystem& g, const CubePhi& psi, const CubePhi& phi,
    const std::vector<std::pair<long, CubeFamily>>& ladder);

}  // namespace hkd
