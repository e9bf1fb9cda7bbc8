#include "hkd/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace hkd {

json to_json(const Window& w) {
    json j;
    j["k0"] = w.k0;
    j["m0"] = w.m0;
    j["K"] = w.K;
    j["nb"] = w.nb;
    return j;
}

Window window_from_json(const json& j) {
    Window w;
    w.k0 = j.at("k0").get<long>();
    w.m0 = j.at("m0").get<std::vector<long>>();
    w.n = static_cast<int>(w.m0.size());
    w.K = j.at("K").get<long>();
    w.nb = j.value("nb", 1);
    w.validate();
    return w;
}

json to_json(const CubeAddress& a) {
    json j;
    j["t"] = a.t;
    j["k"] = a.k;
    json m = json::array();
    for (const Int& mi : a.m) {
        if (!mpz_fits_slong_p(mi.get_mpz_t()))
            throw std::range_error("cube address lattice vector exceeds JSON integer range");
        m.push_back(mi.get_si());
    }
    j["m"] = m;
    return j;
}

CubeAddress cube_from_json(const json& j) {
    CubeAddress a;
    a.t = j.at("t").get<int>();
    a.k = j.at("k").get<long>();
    for (const auto& mi : j.at("m")) a.m.emplace_back(mi.get<long>());
    return a;
}

json to_json(const StepFunction& f) {
    json j;
    j["window"] = to_json(f.w);
    json vals = json::array();
    if (f.approx) {
        for (const Rat& v : f.v) vals.push_back(to_double(v));
    } else {
        for (const Rat& v : f.v) vals.push_back(rat_str(v));
    }
    j["values"] = vals;
    return j;
}

StepFunction step_from_json(const json& j) {
    StepFunction f;
    f.w = window_from_json(j.at("window"));
    const json& vals = j.at("values");
    f.v.reserve(vals.size());
    bool approx = false;
    for (const auto& v : vals) {
        if (v.is_string()) {
            f.v.push_back(rat_parse(v.get<std::string>()));
        } else {
            approx = true;
            f.v.emplace_back(v.get<double>());
        }
    }
    f.approx = approx;
    f.validate();
    return f;
}

json exponent_to_json(const Exponent& p) {
    json j;
    j["role"] = "exponent";
    j["window"] = to_json(p.window());
    json vals = json::array();
    for (const Rat& v : p.values()) vals.push_back(rat_str(v));
    j["values"] = vals;
    return j;
}

Exponent exponent_from_json(const json& j) {
    Window w = window_from_json(j.at("window"));
    std::vector<Rat> vals;
    for (const auto& v : j.at("values")) {
        if (v.is_string())
            vals.push_back(rat_parse(v.get<std::string>()));
        else
            vals.emplace_back(v.get<double>());
    }
    return Exponent(w, std::move(vals));
}

json to_json(const GridSystem& g, const CZResult& r) {
    json j;
    j["t"] = r.t;
    j["lambda"] = rat_str(r.lambda);
    json cubes = json::array();
    for (const auto& c : r.cubes) cubes.push_back(to_json(c));
    j["cubes"] = cubes;
    json means = json::array();
    for (const Rat& m : r.means) means.push_back(rat_str(m));
    j["means"] = means;
    json mask = json::array();
    for (const Box& b : r.mask) {
        json part = json::array();
        for (int a = 0; a < b.dim(); ++a) {
            part.push_back(rat_str(b.lo[a]));
            part.push_back(rat_str(b.hi[a]));
        }
        mask.push_back(part);
    }
    j["mask"] = mask;
    return j;
}

StepFunction parse_function(const std::string& desc, const Window& w) {
    auto colon = desc.find(':');
    std::string kind = colon == std::string::npos ? desc : desc.substr(0, colon);
    if (kind == "indicator") {
        std::string args = desc.substr(colon + 1);
        auto comma = args.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("indicator:a,b expects two bounds");
        Rat a = rat_parse(args.substr(0, comma));
        Rat b = rat_parse(args.substr(comma + 1));
        if (w.n != 1) throw std::invalid_argument("indicator descriptor is 1-d");
        Box box{{a}, {b}};
        return StepFunction::indicator(w, box);
    }
    std::ifstream in(desc);
    if (!in) throw std::invalid_argument("cannot open function file: " + desc);
    json j = json::parse(in);
    return step_from_json(j);
}

Exponent parse_exponent(const std::string& desc, const Window& w) {
    auto colon = desc.find(':');
    std::string kind = colon == std::string::npos ? desc : desc.substr(0, colon);
    if (kind == "const" || kind == "jump" || kind == "smooth") return Exponent::builtin(desc, w);
    std::ifstream in(desc);
    if (!in) throw std::invalid_argument("cannot open exponent file: " + desc);
    json j = json::parse(in);
    return exponent_from_json(j);
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

}  // namespace hkd
