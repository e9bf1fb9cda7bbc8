#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hkd/step_function.hpp"

namespace hkd {

// Variable exponent p(.) with 1 < p- <= p+ < infinity, stored cellwise as
// exact rationals with a double-precision cache for the power kernels.
class Exponent {
public:
    Exponent(Window w, std::vector<Rat> values);

    const Window& window() const { return w_; }
    const std::vector<Rat>& values() const { return vals_; }
    const std::vector<double>& dvalues() const { return dvals_; }
    double p_minus() const { return pmin_; }
    double p_plus() const { return pmax_; }

    // p'(x) = p(x)/(p(x)-1), cellwise exact.
    Exponent dual() const;

    // Builtin descriptors: "const:q", "jump:p1,p2" (p1 left of 0, p2 right),
    // "smooth:a,b" with p(x) = a + b/(1+|x|) sampled at cell centers.
    static Exponent builtin(const std::string& desc, const Window& w);

    // Cell boundaries where p jumps; used to seed adversarial corpora.
    std::vector<Rat> discontinuities() const;

private:
    Window w_;
    std::vector<Rat> vals_;
    std::vector<double> dvals_;
    double pmin_, pmax_;
};

enum class PhiTag { Bar, Tilde, BarConjugate, TildeConjugate };

std::string to_string(PhiTag tag);

// One of the two power-type Phi-function families of an exponent, or the
// conjugate of either.  Every member has the form phi(x,t) = c(x) t^(e(x)):
//   Bar:            t^p                 (c = 1,            e = p)
//   Tilde:          t^p / p             (c = 1/p,          e = p)
//   BarConjugate:   (p-1) p^(-p') t^p'  (c = (p-1)p^(-p'), e = p')
//   TildeConjugate: t^(p') / p'         (c = 1/p',         e = p')
class PhiFamily {
public:
    PhiFamily(PhiTag tag, std::shared_ptr<const Exponent> p);
    static PhiFamily bar(std::shared_ptr<const Exponent> p) { return {PhiTag::Bar, std::move(p)}; }
    static PhiFamily tilde(std::shared_ptr<const Exponent> p) { return {PhiTag::Tilde, std::move(p)}; }

    PhiTag tag() const { return tag_; }
    const Exponent& exponent() const { return *p_; }
    const Window& window() const { return p_->window(); }
    PhiFamily conjugate() const;

    double coeff(std::size_t cell) const { return c_[cell]; }
    double power(std::size_t cell) const { return e_[cell]; }
    const std::vector<double>& coeffs() const { return c_; }
    const std::vector<double>& powers() const { return e_; }

    // phi(x_cell, t); throws for t < 0.
    double eval(std::size_t cell, double t) const;
    // Delta_2 constant 2^(e+) of the family.
    double delta2() const;

private:
    PhiTag tag_;
    std::shared_ptr<const Exponent> p_;
    std::vector<double> c_, e_;
};

}  // namespace hkd
