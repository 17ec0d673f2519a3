#pragma once

#include <vector>

#include "hedgelab/fourier.hpp"

namespace hedgelab {

struct TableGridSpec {
    double x_lo = -1.5;
    double x_hi = 1.5;
    int nx = 768;
    bool refine_strike = false;  // extra resolution around ln K (digitals)
    int refine_factor = 8;
};

// log-price range covering P(sup_{t<=T} |X_t| outside) below prob_eps, from
// the exponential-martingale tail bound, widened for interpolation stencils
TableGridSpec default_grid_spec(const MarketPair& pair, const Payoff& payoff,
                                double prob_eps = 1e-6);

// Immutable table of strategy values F(t_k, e^{x_j}) on a uniform log-price
// grid with an optional refined band around the strike.  Slices are strictly
// before maturity.  Lookups clamp x to the covered range.
class StrategyTable {
public:
    static StrategyTable build(const FourierEngine& engine, StrategyKind kind,
                               std::vector<double> times, TableGridSpec grid, int threads = 1);
    // constant-F table (test hook for the zero-error identities)
    static StrategyTable constant(double value, std::vector<double> times, TableGridSpec grid);

    double value(double t, double x) const;        // linear in t between slices
    double value_slice(size_t k, double x) const;  // cubic in x on slice k
    size_t slice_count() const { return slices_.size(); }
    const std::vector<double>& times() const { return times_; }
    const TableGridSpec& grid() const { return grid_; }

private:
    struct Slice {
        std::vector<double> coarse;
        double band_lo = 0.0, band_dx = 0.0;
        std::vector<double> band;
    };
    StrategyTable() = default;

    std::vector<double> times_;
    TableGridSpec grid_;
    double dx_ = 0.0;
    std::vector<Slice> slices_;
};

}  // namespace hedgelab
