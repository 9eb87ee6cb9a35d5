#include "oe/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

namespace oe::cli {

namespace {

// Keys accepted both as --flags and as config-file keys, in application order.
const std::vector<std::string> kKeys = {"algo",    "param", "grid",    "prior",  "alpha0", "weight",
                                        "runs",    "steps", "gamma",   "tol",    "horizon", "seed",
                                        "out",     "theta-source", "sigma-mode", "freeze-belief",
                                        "lambda",  "samples", "beliefs"};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_real(const std::string& key, const std::string& v) {
    double x = 0.0;
    const char* first = v.data();
    const char* last = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(first, last, x);
    if (ec != std::errc{} || ptr != last || !std::isfinite(x))
        throw ConfigError(key + ": expected a real number (got '" + v + "')");
    return x;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
    std::uint64_t x = 0;
    const char* first = v.data();
    const char* last = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(first, last, x);
    if (ec != std::errc{} || ptr != last) throw ConfigError(key + ": expected a non-negative integer (got '" + v + "')");
    return x;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(key + ": expected true or false (got '" + v + "')");
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read '" + path + "'");
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " is not key=value");
        std::string key = trim(line.substr(0, eq));
        if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end())
            throw ConfigError(key + ": unknown key in config file '" + path + "'");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

struct Pending {
    bool param_set = false;
};

void apply(Command& cmd, Pending& pending, const std::string& key, const std::string& value) {
    ExperimentConfig& c = cmd.config;
    if (key == "algo") {
        auto kind = parse_algorithm(value);
        if (!kind) throw ConfigError("algo: unknown algorithm '" + value + "' (pot|bolt|beb|mbie-eb|vbrb|greedy)");
        c.algorithm.kind = *kind;
    } else if (key == "param") {
        c.algorithm.param = to_real(key, value);
        if (c.algorithm.param < 0.0) throw ConfigError("param: must be >= 0");
        pending.param_set = true;
    } else if (key == "grid") {
        c.grid.clear();
        std::istringstream in(value);
        std::string item;
        while (std::getline(in, item, ',')) {
            const double x = to_real(key, trim(item));
            if (x < 0.0) throw ConfigError("grid: values must be >= 0");
            c.grid.push_back(x);
        }
        if (c.grid.empty()) throw ConfigError("grid: must not be empty");
    } else if (key == "prior") {
        if (value == "uniform") c.prior.kind = PriorKind::Uniform;
        else if (value == "informative") c.prior.kind = PriorKind::Informative;
        else throw ConfigError("prior: expected uniform or informative (got '" + value + "')");
    } else if (key == "alpha0") {
        c.prior.alpha0 = to_real(key, value);
        if (!(c.prior.alpha0 > 0.0)) throw ConfigError("alpha0: must be > 0");
    } else if (key == "weight") {
        c.prior.weight = to_real(key, value);
        if (c.prior.weight < 0.0) throw ConfigError("weight: must be >= 0");
    } else if (key == "runs") {
        c.n_runs = to_uint(key, value);
        if (c.n_runs < 1) throw ConfigError("runs: must be >= 1");
    } else if (key == "steps") {
        c.steps = to_uint(key, value);
        if (c.steps < 1) throw ConfigError("steps: must be >= 1");
    } else if (key == "gamma") {
        c.gamma = to_real(key, value);
        if (!(c.gamma >= 0.0 && c.gamma < 1.0)) throw ConfigError("gamma: must be in [0, 1) (got " + value + ")");
    } else if (key == "tol") {
        c.vi_tol = to_real(key, value);
        if (!(c.vi_tol > 0.0)) throw ConfigError("tol: must be > 0");
    } else if (key == "horizon") {
        c.algorithm.horizon = to_uint(key, value);
        if (c.algorithm.horizon < 1) throw ConfigError("horizon: must be >= 1");
    } else if (key == "seed") {
        c.seed_base = to_uint(key, value);
    } else if (key == "out") {
        if (value.empty()) throw ConfigError("out: empty path");
        c.output = value;
    } else if (key == "theta-source") {
        if (value == "eq6") c.algorithm.theta_source = ThetaSource::Posterior;
        else if (value == "eq7") c.algorithm.theta_source = ThetaSource::OccurrenceBound;
        else throw ConfigError("theta-source: expected eq6 or eq7 (got '" + value + "')");
    } else if (key == "sigma-mode") {
        if (value == "std") c.algorithm.sigma_mode = SigmaMode::Std;
        else if (value == "var") c.algorithm.sigma_mode = SigmaMode::Variance;
        else throw ConfigError("sigma-mode: expected std or var (got '" + value + "')");
    } else if (key == "freeze-belief") {
        c.freeze_belief = to_bool(key, value);
    } else if (key == "lambda") {
        cmd.lambda = to_real(key, value);
        if (!(cmd.lambda >= 1.0)) throw ConfigError("lambda: must be >= 1");
    } else if (key == "samples") {
        cmd.coverage_samples = to_uint(key, value);
        if (cmd.coverage_samples < 1) throw ConfigError("samples: must be >= 1");
    } else if (key == "beliefs") {
        cmd.random_beliefs = to_uint(key, value);
    } else {
        throw ConfigError(key + ": unknown key");
    }
}

std::string verb_name(Verb v) {
    switch (v) {
    case Verb::Run: return "run";
    case Verb::Sweep: return "sweep";
    case Verb::Table1: return "table1";
    case Verb::Validate: return "validate";
    }
    return "?";
}

std::string fmt(double v) {
    std::ostringstream s;
    s << std::setprecision(10) << v;
    return s.str();
}

std::string param_label(Algorithm kind, double param) {
    switch (kind) {
    case Algorithm::Bolt: return "eta=" + fmt(param);
    case Algorithm::Vbrb: return "beta_p=" + fmt(param);
    case Algorithm::GreedyMean: return "-";
    default: return "beta=" + fmt(param);
    }
}

void print_stats(std::ostream& out, const ExperimentConfig& c, const BatchStatistics& st) {
    out << std::fixed << std::setprecision(2) << to_string(c.algorithm.kind) << ' '
        << param_label(c.algorithm.kind, c.algorithm.param) << "  mean=" << st.mean << " stderr=" << st.stderr_
        << " p90=" << st.p90 << " p10=" << st.p10 << " runs=" << st.n_runs << '\n';
    out.unsetf(std::ios::floatfield);
}

DirichletBelief random_belief(std::size_t n, std::size_t m, Rng& rng) {
    numvec alpha(n * m * n);
    for (double& a : alpha) a = std::exp(std::log(0.01) + uniform01(rng) * (std::log(100.0) - std::log(0.01)));
    return DirichletBelief(n, m, std::move(alpha));
}

int validate(const Command& cmd, std::ostream& out) {
    const ExperimentConfig& c = cmd.config;
    const TabularMDP mdp = chain_mdp();
    const DirichletBelief prior = make_prior(c.prior, mdp);
    Rng rng(c.seed_base);
    bool all = true;

    const double target = std::pow(1.0 - 1.0 / (cmd.lambda * cmd.lambda), 2.0);
    const double se = std::sqrt(target * (1.0 - target) / static_cast<double>(cmd.coverage_samples));
    const double threshold = target - 3.0 * se;
    const double freq = z_coverage_estimate(prior, cmd.lambda, c.algorithm.horizon, cmd.coverage_samples, rng);
    const bool cov_ok = freq >= threshold;
    all &= cov_ok;
    out << (cov_ok ? "PASS" : "FAIL") << "  coverage lambda=" << fmt(cmd.lambda) << " H=" << c.algorithm.horizon
        << " samples=" << cmd.coverage_samples << " frequency=" << fmt(freq) << " threshold=" << fmt(threshold) << '\n';

    CoverageOptions z_opts;
    z_opts.bound = CoverageBound::OccurrenceBound;
    const double zfreq = z_coverage_estimate(prior, cmd.lambda, c.algorithm.horizon, cmd.coverage_samples, rng, z_opts);
    const bool z_ok = zfreq >= threshold;
    all &= z_ok;
    out << (z_ok ? "PASS" : "FAIL") << "  occurrence-bound coverage frequency=" << fmt(zfreq)
        << " threshold=" << fmt(threshold) << '\n';

    for (Algorithm kind : {Algorithm::Pot, Algorithm::Bolt}) {
        AlgorithmSpec spec = c.algorithm;
        spec.kind = kind;
        if (c.algorithm.kind != kind) {
            spec.param = default_param(kind);
            spec.theta_source = ThetaSource::Posterior;
        }
        std::size_t held = 0;
        double worst = std::numeric_limits<double>::infinity();
        const std::size_t total = cmd.random_beliefs + 1;
        for (std::size_t i = 0; i < total; ++i) {
            const DirichletBelief b = i == 0 ? prior : random_belief(mdp.n_states(), mdp.n_actions(), rng);
            const DominanceResult r = check_optimism_dominance(b, mdp, spec, c.vi_tol);
            held += r.holds;
            worst = std::min(worst, r.min_gap);
        }
        const bool ok = held == total;
        all &= ok;
        out << (ok ? "PASS" : "FAIL") << "  dominance " << to_string(kind) << ' ' << param_label(kind, spec.param)
            << " beliefs=" << total << " held=" << held << " min_gap=" << fmt(worst) << '\n';
    }
    return all ? kExitOk : kExitFailure;
}

}  // namespace

double default_param(Algorithm kind) {
    switch (kind) {
    case Algorithm::Pot: return 3.2;
    case Algorithm::Bolt: return 1.4;
    case Algorithm::Beb: return 2.5;
    case Algorithm::MbieEb: return 2.5;
    case Algorithm::Vbrb: return 4.9;
    case Algorithm::GreedyMean: return 0.0;
    }
    return 0.0;
}

Command parse_config(const std::vector<std::string>& args) {
    CLI::App app{"Tabular Bayesian exploration benchmark on the chain problem", "oebench"};
    app.require_subcommand(1, 1);
    app.set_help_flag();  // help is handled by the caller

    std::map<std::string, std::string> raw;
    std::map<std::string, CLI::Option*> opts;
    std::string config_path;
    bool freeze = false;

    auto* cfg = app.add_option("--config", config_path, "key=value configuration file");
    for (const std::string& key : kKeys) {
        if (key == "freeze-belief") {
            opts[key] = app.add_flag("--freeze-belief", freeze, "stop updating well-known state-action pairs");
        } else {
            opts[key] = app.add_option("--" + key, raw[key]);
        }
    }
    std::vector<CLI::App*> verbs;
    for (const char* v : {"run", "sweep", "table1", "validate"}) {
        auto* sub = app.add_subcommand(v);
        sub->fallthrough();
        verbs.push_back(sub);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        throw ConfigError(std::string("arguments: ") + e.what());
    }

    Command cmd;
    for (std::size_t i = 0; i < verbs.size(); ++i) {
        if (verbs[i]->parsed()) cmd.verb = static_cast<Verb>(i);
    }

    Pending pending;
    if (cfg->count() > 0) {
        for (const auto& [key, value] : read_config_file(config_path)) apply(cmd, pending, key, value);
    }
    for (const std::string& key : kKeys) {
        if (opts[key]->count() == 0) continue;
        apply(cmd, pending, key, key == "freeze-belief" ? (freeze ? "true" : "false") : raw[key]);
    }

    ExperimentConfig& c = cmd.config;
    if (!pending.param_set) c.algorithm.param = default_param(c.algorithm.kind);
    if (c.output.empty()) c.output = verb_name(cmd.verb) + ".csv";
    if (cmd.verb == Verb::Sweep && c.grid.empty()) throw ConfigError("grid: required for sweep");
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cmd;
}

std::string describe(const Command& cmd) {
    const ExperimentConfig& c = cmd.config;
    std::ostringstream s;
    s << "verb=" << verb_name(cmd.verb) << " algo=" << to_string(c.algorithm.kind) << " param=" << fmt(c.algorithm.param)
      << " horizon=" << c.algorithm.horizon
      << " theta-source=" << (c.algorithm.theta_source == ThetaSource::Posterior ? "eq6" : "eq7")
      << " sigma-mode=" << (c.algorithm.sigma_mode == SigmaMode::Std ? "std" : "var")
      << " prior=" << to_string(c.prior.kind) << " alpha0=" << fmt(c.prior.alpha0) << " weight=" << fmt(c.prior.weight)
      << " runs=" << c.n_runs << " steps=" << c.steps << " gamma=" << fmt(c.gamma) << " tol=" << fmt(c.vi_tol)
      << " seed=" << c.seed_base << " freeze-belief=" << (c.freeze_belief ? "true" : "false")
      << " out=" << c.output.string();
    if (!c.grid.empty()) {
        s << " grid=";
        for (std::size_t i = 0; i < c.grid.size(); ++i) s << (i ? "," : "") << fmt(c.grid[i]);
    }
    if (cmd.verb == Verb::Validate)
        s << " lambda=" << fmt(cmd.lambda) << " samples=" << cmd.coverage_samples << " beliefs=" << cmd.random_beliefs;
    return s.str();
}

std::vector<ExperimentConfig> table1_configs(const ExperimentConfig& base) {
    std::vector<ExperimentConfig> out;
    for (Algorithm kind : {Algorithm::Pot, Algorithm::Bolt, Algorithm::Beb, Algorithm::MbieEb, Algorithm::Vbrb}) {
        ExperimentConfig c = base;
        c.algorithm.kind = kind;
        c.algorithm.param = default_param(kind);
        c.algorithm.theta_source = ThetaSource::Posterior;
        c.grid.clear();
        out.push_back(std::move(c));
    }
    return out;
}

int execute(const Command& cmd, std::ostream& out, std::ostream& err) {
    const ExperimentConfig& c = cmd.config;
    try {
        switch (cmd.verb) {
        case Verb::Run: {
            SweepTable table;
            table.rows.push_back({c, run_batch(c), std::nullopt});
            print_stats(out, c, table.rows.front().stats);
            write_results_csv(table, c.output);
            return kExitOk;
        }
        case Verb::Sweep: {
            const SweepTable table = sweep(c, c.grid);
            for (const SweepRow& r : table.rows) {
                if (r.error) err << "grid point " << fmt(r.config.algorithm.param) << " failed: " << *r.error << '\n';
                else print_stats(out, r.config, r.stats);
            }
            write_results_csv(table, c.output);
            return table.ok() ? kExitOk : kExitFailure;
        }
        case Verb::Table1: {
            const auto configs = table1_configs(c);
            const SweepTable table = run_rows(configs);
            out << "#  Algorithm  Parameter     Average           90%      10%\n";
            for (std::size_t i = 0; i < table.rows.size(); ++i) {
                const SweepRow& r = table.rows[i];
                out << i + 1 << "  " << std::left << std::setw(9) << to_string(r.config.algorithm.kind) << "  "
                    << std::setw(12) << param_label(r.config.algorithm.kind, r.config.algorithm.param) << std::right;
                if (r.error) {
                    out << "  failed: " << *r.error << '\n';
                    continue;
                }
                out << std::fixed << std::setprecision(1) << "  " << std::setw(6) << r.stats.mean << " +- "
                    << std::setprecision(2) << std::setw(5) << r.stats.stderr_ << std::setprecision(1) << "  "
                    << std::setw(7) << r.stats.p90 << "  " << std::setw(7) << r.stats.p10 << '\n';
                out.unsetf(std::ios::floatfield);
            }
            write_results_csv(table, c.output);
            return table.ok() ? kExitOk : kExitFailure;
        }
        case Verb::Validate: return validate(cmd, out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}

int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Command cmd;
    try {
        cmd = parse_config(args);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    err << describe(cmd) << '\n';
    return execute(cmd, out, err);
}

}  // namespace oe::cli
