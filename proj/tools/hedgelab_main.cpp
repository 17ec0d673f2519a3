// hedgelab: Fourier pricing/hedging in exponential Levy models, discretization
// error rate predictions, and the Monte Carlo hedging experiments behind them.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "hedgelab/config.hpp"
#include "hedgelab/constants.hpp"

namespace fs = std::filesystem;
using namespace hedgelab;

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir;   // overrides config
    int64_t seed = -1;     // overrides config
    int threads = 0;       // 0: env or 1
};

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("HEDGELAB_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

ExperimentConfig load(const CliOptions& opt) {
    std::ifstream in(opt.config_path);
    if (!in) throw ConfigError({"cannot open config file '" + opt.config_path + "'"});
    std::stringstream buf;
    buf << in.rdbuf();
    ExperimentConfig cfg = parse_config(buf.str());
    if (opt.seed >= 0) cfg.sim.seed = static_cast<uint64_t>(opt.seed);
    if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
    cfg.sim.threads = resolve_threads(opt.threads);
    return cfg;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// write-to-temp-then-rename so failures never leave partial files
void write_file_atomically(const fs::path& dir, const std::string& name,
                           const std::string& content) {
    const fs::path tmp = dir / ("." + name + ".tmp");
    const fs::path dst = dir / name;
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("output dir not writable: " + dir.string());
        out << content;
        if (!out.good()) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("failed writing " + tmp.string());
        }
    }
    fs::rename(tmp, dst);
}

void print_assumptions(const AssumptionReport& rep) {
    std::cout << "flags: payoff_strip=" << rep.payoff_strip_ok << " q_moment=" << rep.q_moment_ok
              << " cf_integrable=" << rep.cf_integrable << " deltaint=" << rep.deltaint1 << ","
              << rep.deltaint2 << "," << rep.deltaint3 << " quadint=" << rep.quadint1 << ","
              << rep.quadint2 << "," << rep.quadint3 << " H1=" << rep.h1 << " H2=" << rep.h2;
    if (rep.h2) std::cout << "(alpha=" << fmt6(rep.h2_alpha) << ")";
    std::cout << " H4=" << rep.h4;
    if (rep.h4) std::cout << "(alpha=" << fmt6(rep.h4_alpha) << ")";
    std::cout << "\n";
}

int cmd_predict(const CliOptions& opt) {
    ExperimentConfig cfg = load(opt);
    MarketPair pair = build_pair(cfg);
    RatePrediction pred = predict(pair, cfg.payoff, cfg.strategy, cfg.r_override);
    std::cout << "theorem=" << theorem_name(pred.theorem);
    if (pred.covered()) {
        std::cout << " beta=" << fmt6(pred.rate_exponent) << " constant=" << fmt(pred.constant)
                  << " rate=h^" << fmt6(pred.rate_exponent);
        if (pred.theorem == TheoremTag::t3_regular || pred.theorem == TheoremTag::t5_regular)
            std::cout << " normalization=(2pi)^-2";
    }
    std::cout << "\n";
    if (!pred.note.empty()) std::cout << "note: " << pred.note << "\n";
    print_assumptions(pred.diagnostics);
    return 0;
}

int cmd_price_or_strategy(const CliOptions& opt, bool strategies) {
    ExperimentConfig cfg = load(opt);
    MarketPair pair = build_pair(cfg);
    FourierEngine engine(pair, cfg.payoff, cfg.r_override);
    std::cout << "R=" << fmt6(engine.damping()) << "\n";
    std::cout << (strategies ? "S delta quadratic\n" : "S price\n");
    for (double m : {0.8, 0.9, 0.95, 1.0, 1.05, 1.1, 1.2}) {
        const double S = m * cfg.payoff.strike;
        if (strategies) {
            std::cout << fmt6(S) << " " << fmt(engine.delta(0.0, S)) << " "
                      << fmt(engine.quadratic(0.0, S)) << "\n";
        } else {
            std::cout << fmt6(S) << " " << fmt(engine.price(0.0, S)) << "\n";
        }
    }
    return 0;
}

int cmd_constants(const CliOptions& opt) {
    ExperimentConfig cfg = load(opt);
    MarketPair pair = build_pair(cfg);
    const LevyModel& P = pair.p();
    std::cout << "A=" << fmt(P.quadratic_variation()) << "\n";
    std::cout << "A_bar=" << fmt(pair.q().quadratic_variation()) << "\n";
    const Envelope& env = P.envelope();
    if (env.kind == Envelope::Kind::exponential)
        std::cout << "envelope=exponential alpha_eff=" << fmt6(env.alpha_eff)
                  << " c=" << fmt6(env.c) << "\n";
    else if (env.kind == Envelope::Kind::power_law)
        std::cout << "envelope=power rate_per_t=" << fmt6(env.p_rate) << "\n";
    else
        std::cout << "envelope=none\n";
    std::cout << "D=" << fmt(constant_D()) << "\n";
    if (P.h4() && P.diffusion() == 0.0 && P.h4_alpha() > 1.0 && P.h4_alpha() < 2.0) {
        auto sc = stable_coeffs(P);
        std::cout << "c_plus=" << fmt(sc.c_plus.real()) << (sc.c_plus.imag() < 0 ? "" : "+")
                  << fmt(sc.c_plus.imag()) << "i\n";
        std::cout << "gamma_plus_times_gamma_minus="
                  << fmt((sc.gamma_plus * sc.gamma_minus).real()) << "\n";
        std::cout << "D_alpha=" << fmt(constant_D_alpha(sc.alpha)) << "\n";
        if (sc.alpha > 1.5) std::cout << "Q_alpha=" << fmt(constant_Q_alpha(sc.alpha)) << "\n";
    }
    try {
        std::cout << "p_T_at_log_strike="
                  << fmt(density(P, cfg.payoff.maturity, std::log(cfg.payoff.strike))) << "\n";
    } catch (const std::exception& e) {
        std::cout << "p_T_at_log_strike=unavailable (" << e.what() << ")\n";
    }
    return 0;
}

int cmd_experiment(const CliOptions& opt) {
    ExperimentConfig cfg = load(opt);
    MarketPair pair = build_pair(cfg);

    fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);

    auto estimates = estimate_error(pair, cfg.payoff, cfg.strategy, cfg.n_list, cfg.sim);

    std::ostringstream errors_csv;
    errors_csv << "n,h,mean_sq,std_err,n_paths\n";
    for (const auto& e : estimates)
        errors_csv << e.n << "," << fmt(e.h) << "," << fmt(e.mean_sq) << "," << fmt(e.std_err)
                   << "," << e.n_paths << "\n";

    std::ostringstream ratefit_csv;
    ratefit_csv << "slope,slope_ci_lo,slope_ci_hi,intercept,r_squared\n";
    RateFit fit{};
    bool have_fit = false;
    std::string fit_note;
    try {
        fit = rate_fit(estimates);
        have_fit = true;
        ratefit_csv << fmt(fit.slope) << "," << fmt(fit.slope_ci_lo) << ","
                    << fmt(fit.slope_ci_hi) << "," << fmt(fit.intercept) << ","
                    << fmt(fit.r_squared) << "\n";
    } catch (const std::exception& e) {
        fit_note = e.what();
        ratefit_csv << "nan,nan,nan,nan,nan\n";
    }

    RatePrediction pred = predict(pair, cfg.payoff, cfg.strategy, cfg.r_override);
    std::ostringstream theory_csv;
    theory_csv << "n,h,theorem,beta_pred,constant_pred,pred_mean_sq,ratio\n";
    for (const auto& e : estimates) {
        theory_csv << e.n << "," << fmt(e.h) << "," << theorem_name(pred.theorem) << ",";
        if (pred.covered() && std::isfinite(pred.constant)) {
            const double pm = pred.constant * std::pow(e.h, pred.rate_exponent);
            theory_csv << fmt(pred.rate_exponent) << "," << fmt(pred.constant) << "," << fmt(pm)
                       << "," << fmt(e.mean_sq / pm) << "\n";
        } else {
            theory_csv << "nan,nan,nan,nan\n";
        }
    }

    write_file_atomically(dir, "errors.csv", errors_csv.str());
    write_file_atomically(dir, "ratefit.csv", ratefit_csv.str());
    write_file_atomically(dir, "theory.csv", theory_csv.str());

    std::cout << "wrote " << (dir / "errors.csv").string() << ", ratefit.csv, theory.csv\n";
    std::cout << "theorem=" << theorem_name(pred.theorem);
    if (pred.covered()) std::cout << " beta_pred=" << fmt6(pred.rate_exponent);
    std::cout << "\n";
    if (!pred.note.empty()) std::cout << "note: " << pred.note << "\n";
    if (have_fit) {
        std::cout << "fitted slope=" << fmt6(fit.slope) << " ci=[" << fmt6(fit.slope_ci_lo)
                  << "," << fmt6(fit.slope_ci_hi) << "] r2=" << fmt6(fit.r_squared) << "\n";
    } else {
        std::cout << "rate fit unavailable: " << fit_note << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fourier pricing, hedging strategies and discretization-error experiments in "
                 "exponential Levy models"};
    app.require_subcommand(1);

    CliOptions opt;
    auto add_common = [&](CLI::App* sub, bool with_out) {
        sub->add_option("--config", opt.config_path, "experiment config file")->required();
        if (with_out) sub->add_option("--out", opt.out_dir, "output directory override");
        sub->add_option("--seed", opt.seed, "seed override");
        sub->add_option("--threads", opt.threads,
                        "worker threads (default: HEDGELAB_THREADS or 1)");
    };
    auto* predict_cmd = app.add_subcommand("predict", "rate/constant prediction");
    add_common(predict_cmd, false);
    auto* price_cmd = app.add_subcommand("price", "option prices on a spot grid");
    add_common(price_cmd, false);
    auto* strategy_cmd = app.add_subcommand("strategy", "hedging strategies on a spot grid");
    add_common(strategy_cmd, false);
    auto* constants_cmd = app.add_subcommand("constants", "model and theorem constants");
    add_common(constants_cmd, false);
    auto* experiment_cmd = app.add_subcommand("experiment", "Monte Carlo hedging experiment");
    add_common(experiment_cmd, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (predict_cmd->parsed()) return cmd_predict(opt);
        if (price_cmd->parsed()) return cmd_price_or_strategy(opt, false);
        if (strategy_cmd->parsed()) return cmd_price_or_strategy(opt, true);
        if (constants_cmd->parsed()) return cmd_constants(opt);
        if (experiment_cmd->parsed()) return cmd_experiment(opt);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
