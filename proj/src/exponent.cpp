#include "hkd/exponent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hkd {

Exponent::Exponent(Window w, std::vector<Rat> values) : w_(std::move(w)), vals_(std::move(values)) {
    w_.validate();
    if (vals_.size() != w_.cell_count()) throw std::invalid_argument("exponent: value count mismatch");
    Rat lo = vals_[0], hi = vals_[0];
    for (const Rat& p : vals_) {
        if (p <= 1) throw std::invalid_argument("exponent: requires p(x) > 1 everywhere");
        lo = std::min(lo, p);
        hi = std::max(hi, p);
    }
    dvals_.reserve(vals_.size());
    for (const Rat& p : vals_) dvals_.push_back(to_double(p));
    pmin_ = to_double(lo);
    pmax_ = to_double(hi);
}

Exponent Exponent::dual() const {
    std::vector<Rat> dv;
    dv.reserve(vals_.size());
    for (const Rat& p : vals_) dv.push_back(p / (p - 1));
    return Exponent(w_, std::move(dv));
}

std::vector<Rat> Exponent::discontinuities() const {
    std::vector<Rat> pts;
    if (w_.n != 1) return pts;
    long cpa = w_.cells_per_axis();
    Rat h = w_.cell_width();
    Rat threshold = frac(1, 8);  // genuine jumps, not smooth cell-to-cell drift
    for (long i = 0; i + 1 < cpa; ++i) {
        if (abs(vals_[i] - vals_[i + 1]) >= threshold) pts.push_back(w_.axis_lo(0) + Rat(i + 1) * h);
    }
    return pts;
}

Exponent Exponent::builtin(const std::string& desc, const Window& w) {
    auto colon = desc.find(':');
    std::string kind = desc.substr(0, colon == std::string::npos ? desc.size() : colon);
    std::string args = colon == std::string::npos ? "" : desc.substr(colon + 1);
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::size_t pos = 0;
        while (pos <= s.size()) {
            auto comma = s.find(',', pos);
            if (comma == std::string::npos) {
                out.push_back(s.substr(pos));
                break;
            }
            out.push_back(s.substr(pos, comma - pos));
            pos = comma + 1;
        }
        return out;
    };
    std::size_t cells = w.cell_count();
    std::vector<Rat> vals(cells);
    if (kind == "const") {
        Rat q = rat_parse(args);
        std::fill(vals.begin(), vals.end(), q);
    } else if (kind == "jump") {
        auto parts = split(args);
        if (parts.size() != 2 && parts.size() != 3)
            throw std::invalid_argument("jump:p1,p2[,at] expects two values and an optional location");
        Rat p1 = rat_parse(parts[0]), p2 = rat_parse(parts[1]);
        Rat at = parts.size() == 3 ? rat_parse(parts[2]) : Rat(0);
        for (std::size_t i = 0; i < cells; ++i) {
            auto c = w.cell_center(i);
            vals[i] = (c[0] < at) ? p1 : p2;  // jump across the first axis
        }
    } else if (kind == "smooth") {
        auto parts = split(args);
        if (parts.size() != 2) throw std::invalid_argument("smooth:a,b expects two values");
        Rat a = rat_parse(parts[0]), b = rat_parse(parts[1]);
        for (std::size_t i = 0; i < cells; ++i) {
            auto c = w.cell_center(i);
            Rat absx = abs(c[0]);
            if (w.n == 2) absx += abs(c[1]);
            vals[i] = a + b / (1 + absx);
        }
    } else {
        throw std::invalid_argument("unknown exponent descriptor: " + desc);
    }
    return Exponent(w, std::move(vals));
}

std::string to_string(PhiTag tag) {
    switch (tag) {
        case PhiTag::Bar: return "bar";
        case PhiTag::Tilde: return "tilde";
        case PhiTag::BarConjugate: return "bar*";
        case PhiTag::TildeConjugate: return "tilde*";
    }
    return "?";
}

PhiFamily::PhiFamily(PhiTag tag, std::shared_ptr<const Exponent> p) : tag_(tag), p_(std::move(p)) {
    const auto& pv = p_->dvalues();
    c_.resize(pv.size());
    e_.resize(pv.size());
    for (std::size_t i = 0; i < pv.size(); ++i) {
        double p_i = pv[i];
        double q_i = p_i / (p_i - 1.0);
        switch (tag_) {
            case PhiTag::Bar:
                c_[i] = 1.0;
                e_[i] = p_i;
                break;
            case PhiTag::Tilde:
                c_[i] = 1.0 / p_i;
                e_[i] = p_i;
                break;
            case PhiTag::BarConjugate:
                c_[i] = (p_i - 1.0) * std::pow(p_i, -q_i);
                e_[i] = q_i;
                break;
            case PhiTag::TildeConjugate:
                c_[i] = 1.0 / q_i;
                e_[i] = q_i;
                break;
        }
    }
}

PhiFamily PhiFamily::conjugate() const {
    switch (tag_) {
        case PhiTag::Bar: return {PhiTag::BarConjugate, p_};
        case PhiTag::Tilde: return {PhiTag::TildeConjugate, p_};
        case PhiTag::BarConjugate: return {PhiTag::Bar, p_};
        case PhiTag::TildeConjugate: return {PhiTag::Tilde, p_};
    }
    throw std::logic_error("unreachable");
}

double PhiFamily::eval(std::size_t cell, double t) const {
    if (t < 0) throw std::domain_error("phi: negative argument");
    if (t == 0) return 0.0;
    return c_[cell] * std::pow(t, e_[cell]);
}

double PhiFamily::delta2() const {
    double emax = 0;
    for (double e : e_) emax = std::max(emax, e);
    return std::pow(2.0, emax);
}

}  // namespace hkd
