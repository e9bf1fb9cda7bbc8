#pragma once

#include <utility>
#include <vector>

#include "hkd/exponent.hpp"

namespace hkd {

// One constant piece of a nonnegative function weighed against the exponent
// cells it overlaps: contributes weight * coeff * (value/lambda)^power to the
// semimodular at scale lambda.
struct ModularAtom {
    double weight;
    double coeff;
    double power;
    double value;
};

std::vector<ModularAtom> atoms_of(const StepFunction& f, const PhiFamily& phi);

// Piecewise-constant data (piece box, piece value) clipped exactly against
// the window cells; boxes may cross cell boundaries (shifted cubes do).
std::vector<ModularAtom> atoms_of_pieces(const PhiFamily& phi,
                                         const std::vector<std::pair<Box, double>>& pieces);

// rho_phi at scale lambda: sum of w*c*(v/lambda)^e over atoms.
double modular_at(const std::vector<ModularAtom>& atoms, double lambda);

double semimodular(const StepFunction& f, const PhiFamily& phi);

// Luxemburg norm inf{lambda > 0 : rho(f/lambda) <= 1}; 0 for f == 0.
// Exponential bracketing from lambda in [2^-40, 2^40], then bisection to a
// relative tolerance well below 1e-10.
double luxemburg_norm_atoms(const std::vector<ModularAtom>& atoms);
double luxemburg_norm(const StepFunction& f, const PhiFamily& phi);

// Classical q-norm (sum |cell| v^q)^(1/q) for constant-exponent cross-checks.
double classical_norm(const StepFunction& f, double q);

// 2 ||f||_phi ||g||_phi* - <f,g>; nonnegative up to solver tolerance.
double holder_gap(const StepFunction& f, const StepFunction& g, const PhiFamily& phi);

// Conjugate of the scalar power function c t^e (e > 1) evaluated at u,
// computed from the stationarity condition; used by involution tests.
double power_conjugate_value(double c, double e, double u);

}  // namespace hkd
