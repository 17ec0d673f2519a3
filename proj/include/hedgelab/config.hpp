#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hedgelab/mc.hpp"

namespace hedgelab {

enum class MeasureMode { drift_adjust, explicit_q };

struct ExperimentConfig {
    LevyTriplet p_triplet;
    MeasureMode measure = MeasureMode::drift_adjust;
    std::optional<LevyTriplet> q_triplet;
    Payoff payoff;
    std::optional<double> r_override;
    StrategyKind strategy = StrategyKind::delta;
    std::vector<int> n_list = {4, 8, 16, 32, 64};
    SimConfig sim;
    std::string out_dir = "out";
    std::string formats = "csv";

    bool operator==(const ExperimentConfig&) const = default;
};

// Collects every problem instead of stopping at the first; each message is
// anchored to its line.
struct ConfigError : std::runtime_error {
    explicit ConfigError(std::vector<std::string> errs);
    std::vector<std::string> errors;
};

ExperimentConfig parse_config(const std::string& text);
std::string render_config(const ExperimentConfig& cfg);

MarketPair build_pair(const ExperimentConfig& cfg);

}  // namespace hedgelab
