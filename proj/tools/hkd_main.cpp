// Command-line front end: Luxemburg norms, maximal functions,
// Calderon-Zygmund decompositions, averaging operators, and the
// averaging-vs-maximal refinement experiment.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "hkd/estimators.hpp"
#include "hkd/json_io.hpp"

using namespace hkd;

namespace {

Window parse_window(const std::string& spec) {
    std::vector<long> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(std::stol(item));
    if (parts.size() < 3 || parts.size() > 4)
        throw std::invalid_argument("--window expects k0,m0,K[,nb]");
    Window w;
    w.n = 1;
    w.k0 = parts[0];
    w.m0 = {parts[1]};
    w.K = parts[2];
    w.nb = parts.size() == 4 ? static_cast<int>(parts[3]) : 1;
    w.validate();
    return w;
}

PhiTag parse_family(const std::string& name) {
    if (name == "bar") return PhiTag::Bar;
    if (name == "tilde") return PhiTag::Tilde;
    throw std::invalid_argument("--family must be bar or tilde");
}

std::string timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void write_output(const std::string& path, const std::string& payload) {
    if (path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << payload;
}

json witness_to_json(const Witness& wit) {
    json j;
    j["kind"] = wit.kind;
    j["label"] = wit.label;
    j["ratio"] = wit.ratio;
    j["function"] = to_json(wit.f);
    json cubes = json::array();
    for (const auto& c : wit.cubes) cubes.push_back(to_json(c));
    j["cubes"] = cubes;
    return j;
}

json report_to_json(const EstimatorReport& rep) {
    json j;
    j["mode"] = rep.mode;
    j["exponent"] = rep.cfg.exponent;
    j["family"] = to_string(rep.cfg.family);
    j["window"] = to_json(rep.cfg.window());
    j["K"] = rep.cfg.K;
    j["seed"] = rep.cfg.seed;
    j["grids"] = rep.cfg.grid0_only ? "0" : "all";
    j["candidates"] = rep.candidates;
    j["best_ratio"] = rep.best_ratio;
    j["witness"] = witness_to_json(rep.witness);
    return j;
}

StepFunction load_function(const std::string& desc, const Window& w) {
    if (desc.empty()) throw std::invalid_argument("--f is required");
    return parse_function(desc, w);
}

std::vector<CubeAddress> load_cubes(const std::string& spec) {
    json j;
    if (!spec.empty() && spec.front() == '[') {
        j = json::parse(spec);
    } else {
        std::ifstream in(spec);
        if (!in) throw std::invalid_argument("cannot open cube file: " + spec);
        j = json::parse(in);
    }
    std::vector<CubeAddress> cubes;
    for (const auto& c : j) cubes.push_back(cube_from_json(c));
    return cubes;
}

void emit_step_csv(const StepFunction& f, const std::string& path) {
    std::ostringstream out;
    out << "midpoint,value\n";
    for (std::size_t i = 0; i < f.v.size(); ++i)
        out << to_double(f.w.cell_center(i)[0]) << "," << to_double(f.v[i]) << "\n";
    write_output(path, out.str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dyadic-grid maximal operator toolkit"};
    app.require_subcommand(1);

    std::string window_spec = "-3,-1,8,2";
    std::string family_name = "bar";
    std::string out_path;
    std::uint64_t seed = 42;
    bool check = false;
    app.add_option("--window", window_spec, "window as k0,m0,K[,nb]");
    app.add_option("--family", family_name, "norm family: bar or tilde");
    app.add_option("--out", out_path, "output path (stdout when omitted)");
    app.add_option("--seed", seed, "seed for all randomized corpora");
    app.add_flag("--check", check, "re-validate emitted invariants; exit 1 on violation");

    std::string p_desc, f_desc, lambda_str = "1", cubes_spec, variant = "dyadic", grids = "all",
                               ladder_spec = "6,8,10", csv_path;
    int t_index = 0;
    double s_param = 1.0;

    auto* norm_cmd = app.add_subcommand("norm", "Luxemburg norm of a step function");
    norm_cmd->add_option("--p", p_desc, "exponent descriptor or file")->required();
    norm_cmd->add_option("--f", f_desc, "function descriptor or file")->required();

    auto* maxfn_cmd = app.add_subcommand("maxfn", "maximal function (dyadic, grid:t, or hl)");
    maxfn_cmd->add_option("--f", f_desc)->required();
    maxfn_cmd->add_option("--variant", variant, "dyadic | grid:<t> | hl");
    maxfn_cmd->add_option("--csv", csv_path, "also emit midpoint,value CSV");

    auto* cz_cmd = app.add_subcommand("cz", "Calderon-Zygmund decomposition");
    cz_cmd->add_option("--f", f_desc)->required();
    cz_cmd->add_option("--lambda", lambda_str, "threshold (rational, e.g. 1/3)");
    cz_cmd->add_option("--t", t_index, "grid shift index");

    auto* avg_cmd = app.add_subcommand("avg", "averaging operator over a cube family");
    avg_cmd->add_option("--f", f_desc)->required();
    avg_cmd->add_option("--cubes", cubes_spec, "JSON array of cube addresses (inline or file)")
        ->required();
    avg_cmd->add_option("--s", s_param, "s-mean parameter (>= 1)");

    auto* ad_cmd = app.add_subcommand("adconst", "averaging-operator norm lower bound");
    ad_cmd->add_option("--p", p_desc)->required();
    ad_cmd->add_option("--grids", grids, "all | 0");

    auto* equiv_cmd = app.add_subcommand("equiv-report", "averaging vs maximal refinement trace");
    equiv_cmd->add_option("--p", p_desc)->required();
    equiv_cmd->add_option("--grids", grids, "all | 0");
    equiv_cmd->add_option("--ladder", ladder_spec, "comma-separated resolutions");
    equiv_cmd->add_option("--csv", csv_path, "trace CSV path");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        Window w = parse_window(window_spec);
        PhiTag family = parse_family(family_name);
        GridSystem g(w.n);

        if (norm_cmd->parsed()) {
            auto p = std::make_shared<Exponent>(parse_exponent(p_desc, w));
            StepFunction f = load_function(f_desc, w);
            double norm = luxemburg_norm(f, PhiFamily(family, p));
            std::cout.precision(17);
            std::cout << norm << "\n";
            if (!out_path.empty()) {
                json j;
                j["exponent"] = p_desc;
                j["family"] = family_name;
                j["window"] = to_json(w);
                j["norm"] = norm;
                j["generated_at"] = timestamp();
                write_output(out_path, dump_json(j));
            }
            return 0;
        }

        if (maxfn_cmd->parsed()) {
            StepFunction f = load_function(f_desc, w);
            StepFunction m;
            if (variant == "dyadic")
                m = dyadic_maximal(g, f);
            else if (variant == "hl")
                m = hl_maximal_1d(f);
            else if (variant.rfind("grid:", 0) == 0)
                m = dyadic_maximal_grid(g, f, std::stoi(variant.substr(5)));
            else
                throw std::invalid_argument("unknown maxfn variant: " + variant);
            if (!csv_path.empty()) emit_step_csv(m, csv_path);
            write_output(out_path, dump_json(to_json(m)));
            return 0;
        }

        if (cz_cmd->parsed()) {
            StepFunction f = load_function(f_desc, w);
            Rat lambda = rat_parse(lambda_str);
            if (lambda <= 0) throw std::invalid_argument("--lambda must be positive");
            CZResult r = cz_decompose(g, f, lambda, t_index);
            json j = to_json(g, r);
            j["window"] = to_json(w);
            write_output(out_path, dump_json(j));
            if (check) {
                std::string err = cz_check(g, f, r);
                if (!err.empty()) {
                    std::cerr << "cz check failed: " << err << "\n";
                    return 1;
                }
            }
            return 0;
        }

        if (avg_cmd->parsed()) {
            StepFunction f = load_function(f_desc, w);
            CubeFamily fam(g, load_cubes(cubes_spec));
            StepFunction out = averaging(g, f, fam, s_param);
            write_output(out_path, dump_json(to_json(out)));
            if (check) {
                StepFunction md = dyadic_maximal(g, f);
                if (s_param == 1.0)
                    for (std::size_t i = 0; i < out.v.size(); ++i)
                        if (out.v[i] > md.v[i]) {
                            std::cerr << "averaging exceeds the dyadic maximal function\n";
                            return 1;
                        }
            }
            return 0;
        }

        EstimatorConfig cfg;
        cfg.exponent = p_desc;
        cfg.family = family;
        cfg.seed = seed;
        cfg.grid0_only = grids == "0";
        cfg.k0 = w.k0;
        cfg.m0 = w.m0;
        cfg.nb = w.nb;
        cfg.K = w.K;

        if (ad_cmd->parsed()) {
            EstimatorReport rep = ad_constant_estimate(g, cfg);
            json j = report_to_json(rep);
            json trace = json::array();
            json row;
            row["K"] = rep.cfg.K;
            row["best_ratio"] = rep.best_ratio;
            trace.push_back(row);
            j["trace"] = trace;
            j["generated_at"] = timestamp();
            write_output(out_path, dump_json(j));
            return 0;
        }

        if (equiv_cmd->parsed()) {
            std::vector<long> ladder;
            std::stringstream ss(ladder_spec);
            std::string item;
            while (std::getline(ss, item, ',')) ladder.push_back(std::stol(item));
            EquivReport rep = equiv_report(g, cfg, ladder);
            json j;
            j["exponent"] = cfg.exponent;
            j["family"] = family_name;
            j["grids"] = grids;
            j["seed"] = seed;
            j["window"] = to_json(rep.cfg.window());
            json trace = json::array();
            for (const auto& row : rep.trace) {
                json r;
                r["K"] = row.K;
                r["ad_ratio"] = row.ad_ratio;
                r["maxop_ratio"] = row.max_ratio;
                trace.push_back(r);
            }
            j["trace"] = trace;
            j["ad_growth"] = rep.ad_growth;
            j["maxop_growth"] = rep.max_growth;
            j["verdict"] = rep.verdict;
            j["ad_witness"] = witness_to_json(rep.ad_witness);
            j["maxop_witness"] = witness_to_json(rep.max_witness);
            j["generated_at"] = timestamp();
            write_output(out_path, dump_json(j));
            if (!csv_path.empty()) {
                std::ostringstream csv;
                csv << "K,ad_ratio,maxop_ratio\n";
                csv.precision(17);
                for (const auto& row : rep.trace)
                    csv << row.K << "," << row.ad_ratio << "," << row.max_ratio << "\n";
                write_output(csv_path, csv.str());
            }
            std::cerr << "verdict: " << rep.verdict << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
