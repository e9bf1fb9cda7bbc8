#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hkd/norms.hpp"
#include "hkd/phi_means.hpp"

namespace hkd {

// Verdict thresholds for the refinement experiment: growth of the best found
// ratio across the resolution ladder (finest over coarsest).
inline constexpr double kGrowthUnbounded = 1.15;
inline constexpr double kGrowthBounded = 1.05;

struct EstimatorConfig {
    std::string exponent = "const:2";
    PhiTag family = PhiTag::Bar;
    long K = 8;
    long k0 = -3;
    std::vector<long> m0 = {-1};
    int nb = 2;
    std::uint64_t seed = 42;
    bool grid0_only = false;
    int random_functions = 10;
    int random_families = 8;
    int lambda_lo = -8;   // CZ threshold ladder lambda = 2^k
    int lambda_hi = 16;

    Window window() const {
        Window w;
        w.n = static_cast<int>(m0.size());
        w.k0 = k0;
        w.m0 = m0;
        w.nb = nb;
        w.K = K;
        return w;
    }
};

struct Witness {
    std::string kind;    // "family" or "maximal"
    std::string label;
    StepFunction f;
    std::vector<CubeAddress> cubes;  // empty for maximal witnesses
    double ratio = 0;
};

struct EstimatorReport {
    std::string mode;  // "averaging" or "maximal"
    EstimatorConfig cfg;
    std::size_t candidates = 0;
    double best_ratio = 0;
    Witness witness;
};

// Runs both estimators over one shared candidate corpus, so the averaging
// bound never exceeds the maximal bound on the same inputs.
std::pair<EstimatorReport, EstimatorReport> estimate_pair(const GridSystem& g,
                                                          const EstimatorConfig& cfg);

EstimatorReport ad_constant_estimate(const GridSystem& g, const EstimatorConfig& cfg);
EstimatorReport maximal_norm_estimate(const GridSystem& g, const EstimatorConfig& cfg);

// Recomputes a recorded witness ratio from scratch.
double replay_witness(const GridSystem& g, const EstimatorConfig& cfg, const Witness& wit);

struct EquivRow {
    long K = 0;
    double ad_ratio = 0;
    double max_ratio = 0;
};

struct EquivReport {
    EstimatorConfig cfg;  // K field holds the finest ladder entry
    std::vector<EquivRow> trace;
    double ad_growth = 1.0;
    double max_growth = 1.0;
    std::string verdict;  // bounded-consistent | unbounded-consistent | inconclusive
    Witness ad_witness;   // witnesses at the finest resolution
    Witness max_witness;
};

EquivReport equiv_report(const GridSystem& g, EstimatorConfig cfg,
                         std::vector<long> ladder = {6, 8, 10});

}  // namespace hkd
