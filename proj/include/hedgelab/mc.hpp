#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hedgelab/rng.hpp"
#include "hedgelab/strategy_table.hpp"

namespace hedgelab {

struct SimConfig {
    int64_t n_paths = 100000;
    uint64_t seed = 1;
    int fine_factor = 32;        // fine steps per rebalancing interval
    double jump_cutoff = 1e-3;   // small-jump truncation for infinite activity
    bool gaussian_refinement = true;
    int threads = 1;

    bool operator==(const SimConfig&) const = default;
    void validate() const;
};

struct ErrorEstimate {
    int n = 0;          // rebalancing count
    double h = 0.0;     // T/n
    double mean_sq = 0.0;
    double std_err = 0.0;
    int64_t n_paths = 0;
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_ci_lo = 0.0;
    double slope_ci_hi = 0.0;
    double r_squared = 0.0;
};

// Exact-or-truncated increment sampler for one Levy model at a fixed step.
// Compound-Poisson families are sampled from the exact law; infinite-activity
// families keep jumps above the cutoff and replace the rest by their
// compensator plus (optionally) a variance-matched Gaussian.
class PathSimulator {
public:
    PathSimulator(const LevyModel& model, double dt, const SimConfig& cfg);

    void sample_path(rng::Stream& stream, std::span<double> increments) const;

    double dt() const { return dt_; }
    double small_jump_sd() const { return small_sd_; }   // per step
    double big_jump_intensity() const { return lambda_; }  // per unit time

private:
    double sample_big_jump(rng::Stream& stream) const;

    const LevyModel model_;
    double dt_;
    double drift_step_;    // deterministic part per step
    double gauss_sd_;      // diffusion + optional refinement, per step
    double small_sd_;
    double lambda_ = 0.0;  // big-jump intensity per unit time
    double prob_up_ = 0.0;
    double cutoff_ = 0.0;
    bool finite_activity_ = true;
};

// one path of log-increments on a uniform grid, deterministic in
// (seed, path_index) and independent of threading
std::vector<double> simulate_increments(const LevyModel& model, double horizon, int steps,
                                        const SimConfig& cfg, uint64_t path_index);

// per-path discretization errors eps_T for one rebalancing count; the fine
// grid has fine_total steps (defaults to fine_factor * n) and the table's
// slice times must match it
std::vector<double> discretization_error(const MarketPair& pair, const Payoff& payoff,
                                         const StrategyTable& table, int n,
                                         const SimConfig& cfg, int fine_total = 0);

// shared-path estimates over a ladder of rebalancing counts; builds the
// strategy table internally on the common fine grid
std::vector<ErrorEstimate> estimate_error(const MarketPair& pair, const Payoff& payoff,
                                          StrategyKind strategy, const std::vector<int>& n_list,
                                          const SimConfig& cfg,
                                          const StrategyTable* prebuilt = nullptr);

// helper used by estimate_error and the CLI: the table on the common fine grid
StrategyTable build_experiment_table(const MarketPair& pair, const Payoff& payoff,
                                     StrategyKind strategy, int n_max, const SimConfig& cfg);

// weighted least squares of log mean_sq on log h
RateFit rate_fit(const std::vector<ErrorEstimate>& estimates);

}  // namespace hedgelab
