#include "hedgelab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <sstream>

namespace hedgelab {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Entry {
    int line = 0;
    std::string value;
    bool used = false;
};

struct Parsed {
    // (section, key) -> entry
    std::map<std::pair<std::string, std::string>, Entry> kv;
    std::vector<std::string> errors;

    const Entry* find(const std::string& sec, const std::string& key) {
        auto it = kv.find({sec, key});
        if (it == kv.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }
    void err(int line, const std::string& msg) {
        errors.push_back("line " + std::to_string(line) + ": " + msg);
    }
    void err(const std::string& msg) { errors.push_back(msg); }

    double number(const std::string& sec, const std::string& key, double fallback,
                  bool* present = nullptr) {
        const Entry* e = find(sec, key);
        if (present) *present = e != nullptr;
        if (!e) return fallback;
        try {
            size_t pos = 0;
            double v = std::stod(e->value, &pos);
            if (pos != e->value.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            err(e->line, "'" + key + "' is not a number: '" + e->value + "'");
            return fallback;
        }
    }
    double required_number(const std::string& sec, const std::string& key) {
        bool present = false;
        double v = number(sec, key, 0.0, &present);
        if (!present) err("[" + sec + "] is missing the required key '" + key + "'");
        return v;
    }
    std::string word(const std::string& sec, const std::string& key, const std::string& fallback,
                     bool* present = nullptr) {
        const Entry* e = find(sec, key);
        if (present) *present = e != nullptr;
        return e ? e->value : fallback;
    }
};

Parsed scan(const std::string& text) {
    Parsed out;
    std::istringstream in(text);
    std::string raw, section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                out.err(line_no, "malformed section header '" + raw + "'");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            out.err(line_no, "expected key = value, got '" + raw + "'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) {
            out.err(line_no, "key '" + key + "' appears before any [section]");
            continue;
        }
        auto [it, inserted] = out.kv.insert({{section, key}, Entry{line_no, value, false}});
        if (!inserted)
            out.err(line_no, "duplicate key '" + key + "' in [" + section + "], first set on line " +
                                 std::to_string(it->second.line));
    }
    return out;
}

JumpSpec parse_jumps(Parsed& p, const std::string& sec, const std::string& prefix,
                     const std::string& family, int family_line) {
    auto need = [&](const std::string& key) { return p.required_number(sec, prefix + key); };
    if (family == "bs" || family == "none") return NoJumps{};
    if (family == "merton") {
        MertonJumps j{need("lambda"), need("jump_mean"), need("jump_sd")};
        if (j.intensity < 0.0) p.err("lambda must be >= 0");
        if (j.stddev <= 0.0) p.err("jump_sd must be > 0");
        return j;
    }
    if (family == "kou") {
        KouJumps j{need("lambda"), need("p_up"), need("eta_up"), need("eta_down")};
        if (j.p_up < 0.0 || j.p_up > 1.0) p.err("p_up must lie in [0,1]");
        if (j.eta_up <= 0.0 || j.eta_down <= 0.0) p.err("eta_up and eta_down must be > 0");
        return j;
    }
    if (family == "cgmy") {
        CgmyJumps j{need("C"), need("G"), need("M"), need("Y")};
        if (!(j.Y >= 0.0 && j.Y < 2.0)) p.err("Y must lie in [0,2)");
        if (j.C <= 0.0) p.err("C must be > 0");
        if (j.G <= 0.0) p.err("G must be > 0");
        if (j.M <= 1.0) p.err("M must be > 1");
        return j;
    }
    if (family == "vg") {
        VgJumps j{need("sigma"), need("theta"), need("kappa")};
        if (j.sigma <= 0.0) p.err("sigma must be > 0");
        if (j.kappa <= 0.0) p.err("kappa must be > 0");
        return j;
    }
    if (family == "nig") {
        NigJumps j{need("alpha"), need("beta"), need("delta")};
        if (j.alpha <= 0.0) p.err("alpha must be > 0");
        if (std::abs(j.beta) >= j.alpha) p.err("need |beta| < alpha");
        if (j.delta <= 0.0) p.err("delta must be > 0");
        return j;
    }
    p.err(family_line, "unknown family '" + family + "' (bs, merton, kou, cgmy, vg, nig)");
    return NoJumps{};
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errs)
    : std::runtime_error([&] {
          std::string all = "config errors:";
          for (auto& e : errs) all += "\n  " + e;
          return all;
      }()),
      errors(std::move(errs)) {}

ExperimentConfig parse_config(const std::string& text) {
    Parsed p = scan(text);
    ExperimentConfig cfg;

    const Entry* fam = p.find("model", "family");
    std::string family = fam ? fam->value : "";
    if (!fam) p.err("[model] is missing the required key 'family'");
    const int fam_line = fam ? fam->line : 0;

    cfg.p_triplet.a = p.number("model", "a", 0.0);
    cfg.p_triplet.gamma = p.number("model", "gamma", 0.0);
    if (cfg.p_triplet.a < 0.0) p.err("a must be >= 0");
    if (fam) cfg.p_triplet.jumps = parse_jumps(p, "model", "", family, fam_line);

    const std::string mode = p.word("measure", "mode", "drift-adjust");
    if (mode == "drift-adjust") {
        cfg.measure = MeasureMode::drift_adjust;
    } else if (mode == "explicit") {
        cfg.measure = MeasureMode::explicit_q;
        LevyTriplet q;
        q.a = p.number("measure", "q_a", cfg.p_triplet.a);
        q.gamma = p.required_number("measure", "q_gamma");
        if (fam) q.jumps = parse_jumps(p, "measure", "q_", family, fam_line);
        cfg.q_triplet = q;
    } else {
        p.err("unknown measure mode '" + mode + "' (drift-adjust, explicit)");
    }

    const std::string kind = p.word("payoff", "kind", "");
    if (kind == "call")
        cfg.payoff.kind = PayoffKind::call;
    else if (kind == "digital")
        cfg.payoff.kind = PayoffKind::digital;
    else
        p.err("[payoff] needs kind = call | digital");
    cfg.payoff.strike = p.required_number("payoff", "strike");
    cfg.payoff.maturity = p.required_number("payoff", "maturity");
    if (cfg.payoff.strike <= 0.0) p.err("strike must be > 0");
    if (cfg.payoff.maturity <= 0.0) p.err("maturity must be > 0");
    bool has_r = false;
    const double r = p.number("payoff", "R", 0.0, &has_r);
    if (has_r) {
        cfg.r_override = r;
        if (!cfg.payoff.r_admissible(r))
            p.err("R = " + num(r) + " is outside the payoff's admissible damping range");
    }

    const std::string strat = p.word("experiment", "strategy", "delta");
    if (strat == "delta")
        cfg.strategy = StrategyKind::delta;
    else if (strat == "quadratic")
        cfg.strategy = StrategyKind::quadratic;
    else
        p.err("strategy must be delta or quadratic");

    bool has_nlist = false;
    const Entry* nl = p.find("experiment", "n_list");
    has_nlist = nl != nullptr;
    if (has_nlist) {
        cfg.n_list.clear();
        std::istringstream ns(nl->value);
        std::string tok;
        while (std::getline(ns, tok, ',')) {
            try {
                cfg.n_list.push_back(std::stoi(trim(tok)));
            } catch (...) {
                p.err(nl->line, "n_list entry '" + tok + "' is not an integer");
            }
        }
        if (cfg.n_list.empty()) p.err(nl->line, "n_list is empty");
        if (!std::is_sorted(cfg.n_list.begin(), cfg.n_list.end()))
            p.err(nl->line, "n_list must be ascending");
        for (int n : cfg.n_list)
            if (n < 1) p.err(nl->line, "n_list entries must be positive");
    }
    cfg.sim.n_paths = static_cast<int64_t>(p.number("experiment", "paths", 100000.0));
    cfg.sim.seed = static_cast<uint64_t>(p.number("experiment", "seed", 1.0));
    cfg.sim.fine_factor = static_cast<int>(p.number("experiment", "fine_factor", 32.0));
    cfg.sim.jump_cutoff = p.number("experiment", "jump_cutoff", 1e-3);
    const std::string refine = p.word("experiment", "gaussian_refinement", "true");
    if (refine == "true")
        cfg.sim.gaussian_refinement = true;
    else if (refine == "false")
        cfg.sim.gaussian_refinement = false;
    else
        p.err("gaussian_refinement must be true or false");
    if (cfg.sim.n_paths < 1000) p.err("paths must be >= 1000");
    if (cfg.sim.fine_factor < 8) p.err("fine_factor must be >= 8");
    if (cfg.sim.jump_cutoff <= 0.0) p.err("jump_cutoff must be > 0");

    cfg.out_dir = p.word("output", "dir", "out");
    cfg.formats = p.word("output", "formats", "csv");
    if (cfg.formats != "csv") p.err("formats: only 'csv' is supported");

    for (const auto& [sk, e] : p.kv) {
        if (!e.used)
            p.err(e.line, "unknown key '" + sk.second + "' in [" + sk.first + "]");
    }
    if (!p.errors.empty()) throw ConfigError(std::move(p.errors));
    return cfg;
}

std::string render_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "[model]\n";
    const char* fam = family_name(static_cast<JumpFamily>(cfg.p_triplet.jumps.index()));
    out << "family = " << (std::string(fam) == "none" ? "bs" : fam) << "\n";
    out << "a = " << num(cfg.p_triplet.a) << "\n";
    out << "gamma = " << num(cfg.p_triplet.gamma) << "\n";
    auto jump_keys = [&](const JumpSpec& jumps, const std::string& prefix) {
        std::visit(
            [&](const auto& j) {
                using T = std::decay_t<decltype(j)>;
                if constexpr (std::is_same_v<T, MertonJumps>) {
                    out << prefix << "lambda = " << num(j.intensity) << "\n"
                        << prefix << "jump_mean = " << num(j.mean) << "\n"
                        << prefix << "jump_sd = " << num(j.stddev) << "\n";
                } else if constexpr (std::is_same_v<T, KouJumps>) {
                    out << prefix << "lambda = " << num(j.intensity) << "\n"
                        << prefix << "p_up = " << num(j.p_up) << "\n"
                        << prefix << "eta_up = " << num(j.eta_up) << "\n"
                        << prefix << "eta_down = " << num(j.eta_down) << "\n";
                } else if constexpr (std::is_same_v<T, CgmyJumps>) {
                    out << prefix << "C = " << num(j.C) << "\n"
                        << prefix << "G = " << num(j.G) << "\n"
                        << prefix << "M = " << num(j.M) << "\n"
                        << prefix << "Y = " << num(j.Y) << "\n";
                } else if constexpr (std::is_same_v<T, VgJumps>) {
                    out << prefix << "sigma = " << num(j.sigma) << "\n"
                        << prefix << "theta = " << num(j.theta) << "\n"
                        << prefix << "kappa = " << num(j.kappa) << "\n";
                } else if constexpr (std::is_same_v<T, NigJumps>) {
                    out << prefix << "alpha = " << num(j.alpha) << "\n"
                        << prefix << "beta = " << num(j.beta) << "\n"
                        << prefix << "delta = " << num(j.delta) << "\n";
                }
            },
            jumps);
    };
    jump_keys(cfg.p_triplet.jumps, "");

    out << "\n[measure]\n";
    if (cfg.measure == MeasureMode::drift_adjust) {
        out << "mode = drift-adjust\n";
    } else {
        out << "mode = explicit\n";
        out << "q_a = " << num(cfg.q_triplet->a) << "\n";
        out << "q_gamma = " << num(cfg.q_triplet->gamma) << "\n";
        jump_keys(cfg.q_triplet->jumps, "q_");
    }

    out << "\n[payoff]\n";
    out << "kind = " << (cfg.payoff.kind == PayoffKind::call ? "call" : "digital") << "\n";
    out << "strike = " << num(cfg.payoff.strike) << "\n";
    out << "maturity = " << num(cfg.payoff.maturity) << "\n";
    if (cfg.r_override) out << "R = " << num(*cfg.r_override) << "\n";

    out << "\n[experiment]\n";
    out << "strategy = " << (cfg.strategy == StrategyKind::delta ? "delta" : "quadratic") << "\n";
    out << "n_list = ";
    for (size_t i = 0; i < cfg.n_list.size(); ++i) out << (i ? "," : "") << cfg.n_list[i];
    out << "\n";
    out << "paths = " << cfg.sim.n_paths << "\n";
    out << "seed = " << cfg.sim.seed << "\n";
    out << "fine_factor = " << cfg.sim.fine_factor << "\n";
    out << "jump_cutoff = " << num(cfg.sim.jump_cutoff) << "\n";
    out << "gaussian_refinement = " << (cfg.sim.gaussian_refinement ? "true" : "false") << "\n";

    out << "\n[output]\n";
    out << "dir = " << cfg.out_dir << "\n";
    out << "formats = " << cfg.formats << "\n";
    return out.str();
}

MarketPair build_pair(const ExperimentConfig& cfg) {
    LevyModel p(cfg.p_triplet);
    if (cfg.measure == MeasureMode::drift_adjust) return MarketPair::drift_adjusted(p);
    return MarketPair(p, LevyModel(*cfg.q_triplet));
}

}  // namespace hedgelab
