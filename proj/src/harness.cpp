#include "oe/harness.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace oe {

std::string_view to_string(PriorKind kind) { return kind == PriorKind::Uniform ? "uniform" : "informative"; }

DirichletBelief make_prior(const PriorSpec& prior, const TabularMDP& mdp) {
    if (prior.kind == PriorKind::Uniform) return make_uniform_prior(mdp.n_states(), mdp.n_actions(), prior.alpha0);
    return make_informative_prior(mdp, prior.alpha0, prior.weight);
}

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
    if (n_runs < 1) fail("runs: must be >= 1");
    if (steps < 1) fail("steps: must be >= 1");
    if (!(gamma >= 0.0 && gamma < 1.0)) fail("gamma: must be in [0, 1)");
    if (!(vi_tol > 0.0)) fail("tol: must be > 0");
    if (max_iter < 1) fail("max_iter: must be >= 1");
    if (!(prior.alpha0 > 0.0)) fail("alpha0: must be > 0");
    if (!(prior.weight >= 0.0)) fail("weight: must be >= 0");
    if (algorithm.horizon < 1) fail("horizon: must be >= 1");
    if (!(algorithm.param >= 0.0) || !std::isfinite(algorithm.param)) fail("param: must be a finite value >= 0");
    try {
        algorithm.validate();
    } catch (const std::invalid_argument& e) {
        fail(std::string("param: ") + e.what());
    }
}

TrialOptions ExperimentConfig::trial_options() const {
    TrialOptions t;
    t.steps = steps;
    t.gamma = gamma;
    t.tol = vi_tol;
    t.max_iter = max_iter;
    t.freeze_belief = freeze_belief;
    return t;
}

// ---------------------------------------------------------------------------
// Statistics

double nearest_rank(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("nearest_rank: no samples");
    const double n = static_cast<double>(sorted.size());
    // the small epsilon keeps q*n = 9.000000000000002 from rounding up a rank
    auto rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

BatchStatistics summarize(std::span<const double> samples, bool retain) {
    if (samples.empty()) throw std::invalid_argument("summarize: no samples");
    BatchStatistics st;
    st.n_runs = samples.size();
    const double n = static_cast<double>(samples.size());
    st.mean = pairwise_sum(samples) / n;

    std::vector<double> dev(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) dev[i] = (samples[i] - st.mean) * (samples[i] - st.mean);
    const double sd = samples.size() > 1 ? std::sqrt(pairwise_sum(dev) / (n - 1.0)) : 0.0;
    st.stderr_ = sd / std::sqrt(n);

    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    st.p90 = nearest_rank(sorted, 0.9);
    st.p10 = nearest_rank(sorted, 0.1);
    st.min = sorted.front();
    st.max = sorted.back();
    st.samples_retained = retain;
    if (retain) st.samples.assign(samples.begin(), samples.end());
    return st;
}

std::size_t resolve_workers(std::size_t requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("OE_WORKERS")) {
        std::size_t w = 0;
        const auto* end = env + std::strlen(env);
        if (std::from_chars(env, end, w).ec == std::errc{} && w > 0) return w;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------------------
// Batches

BatchStatistics run_batch(const ExperimentConfig& config) {
    config.validate();
    const TabularMDP mdp = chain_mdp();
    const DirichletBelief prior = make_prior(config.prior, mdp);
    const TrialOptions options = config.trial_options();

    const std::size_t n = config.n_runs;
    std::vector<double> samples(n, 0.0);
    std::vector<std::string> errors(n);
    std::vector<char> failed(n, 0);

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            const std::uint64_t seed = config.seed_base + i;
            try {
                samples[i] = run_trial(config.algorithm, mdp, prior, options, seed).cumulative_reward;
            } catch (const std::exception& e) {
                failed[i] = 1;
                errors[i] = e.what();
            }
        }
    };

    const std::size_t workers = std::min(resolve_workers(config.workers), n);
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (failed[i]) {
            const std::uint64_t seed = config.seed_base + i;
            throw BatchError("trial with seed " + std::to_string(seed) + " failed: " + errors[i], seed);
        }
    }
    return summarize(samples, config.retain_samples);
}

bool SweepTable::ok() const {
    return std::none_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.error.has_value(); });
}

SweepTable run_rows(std::span<const ExperimentConfig> configs) {
    SweepTable table;
    for (const ExperimentConfig& c : configs) {
        SweepRow row{c, {}, std::nullopt};
        try {
            row.stats = run_batch(c);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

SweepTable sweep(const ExperimentConfig& config, std::span<const double> grid) {
    if (grid.empty()) throw std::invalid_argument("grid: must not be empty");
    std::vector<ExperimentConfig> configs;
    configs.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        ExperimentConfig c = config;
        c.algorithm.param = grid[i];
        c.seed_base = config.seed_base + i * config.n_runs;
        c.grid.clear();
        configs.push_back(std::move(c));
    }
    return run_rows(configs);
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void fnv(std::uint64_t& h, std::string_view s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    h ^= 0xff;
    h *= 1099511628211ULL;
}

std::string csv_line(const SweepRow& row) {
    const ExperimentConfig& c = row.config;
    const double param = c.algorithm.kind == Algorithm::GreedyMean ? 0.0 : c.algorithm.param;
    std::ostringstream out;
    out << to_string(c.algorithm.kind) << ',' << fmt(param) << ',' << to_string(c.prior.kind) << ','
        << fmt(c.prior.alpha0) << ',' << fmt(c.prior.kind == PriorKind::Informative ? c.prior.weight : 0.0) << ','
        << c.n_runs << ',' << c.steps << ',' << fmt(c.gamma) << ',' << c.seed_base << ',' << fmt(row.stats.mean) << ','
        << fmt(row.stats.stderr_) << ',' << fmt(row.stats.p90) << ',' << fmt(row.stats.p10);
    return out.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

}  // namespace

std::uint64_t config_hash(const ExperimentConfig& c) {
    std::uint64_t h = 1469598103934665603ULL;
    fnv(h, to_string(c.algorithm.kind));
    fnv(h, fmt(c.algorithm.param));
    fnv(h, std::to_string(c.algorithm.horizon));
    fnv(h, c.algorithm.theta_source == ThetaSource::Posterior ? "posterior" : "occurrence");
    fnv(h, c.algorithm.sigma_mode == SigmaMode::Std ? "std" : "var");
    fnv(h, to_string(c.prior.kind));
    fnv(h, fmt(c.prior.alpha0));
    fnv(h, fmt(c.prior.weight));
    fnv(h, std::to_string(c.n_runs));
    fnv(h, std::to_string(c.steps));
    fnv(h, fmt(c.gamma));
    fnv(h, fmt(c.vi_tol));
    fnv(h, std::to_string(c.max_iter));
    fnv(h, std::to_string(c.seed_base));
    fnv(h, c.freeze_belief ? "freeze" : "learn");
    fnv(h, kRngName);
    return h;
}

void write_results_csv(const SweepTable& table, const std::filesystem::path& path) {
    namespace fs = std::filesystem;
    std::uint64_t h = 1469598103934665603ULL;
    for (const SweepRow& r : table.rows) fnv(h, std::to_string(config_hash(r.config)));
    const std::uint64_t seed_base = table.rows.empty() ? 0 : table.rows.front().config.seed_base;

    const fs::path tmp = path.string() + ".tmp-" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + path.string() + ": " + std::strerror(errno));
        }
        char hash[17];
        std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(h));
        out << "# generator=" << kRngName << " seed_base=" << seed_base << " config_hash=" << hash << '\n';
        out << kCsvHeader << '\n';
        for (const SweepRow& r : table.rows) {
            if (!r.error) out << csv_line(r) << '\n';
        }
        out.flush();
        if (!out) {
            const std::string cause = std::strerror(errno);
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("cannot write " + path.string() + ": " + cause);
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignored;
        fs::remove(tmp, ignored);
        throw std::runtime_error("cannot write " + path.string() + ": " + ec.message());
    }
}

std::vector<CsvRow> read_results_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::vector<CsvRow> rows;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != kCsvHeader) throw std::runtime_error(path.string() + ": unexpected header: " + line);
            header = true;
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 13) throw std::runtime_error(path.string() + ": expected 13 fields: " + line);
        CsvRow r;
        r.algorithm = f[0];
        r.parameter = std::stod(f[1]);
        r.prior_kind = f[2];
        r.alpha0 = std::stod(f[3]);
        r.prior_weight = std::stod(f[4]);
        r.n_runs = std::stoull(f[5]);
        r.steps = std::stoull(f[6]);
        r.gamma = std::stod(f[7]);
        r.seed_base = std::stoull(f[8]);
        r.mean = std::stod(f[9]);
        r.stderr_ = std::stod(f[10]);
        r.p90 = std::stod(f[11]);
        r.p10 = std::stod(f[12]);
        rows.push_back(std::move(r));
    }
    if (!header) throw std::runtime_error(path.string() + ": missing header");
    return rows;
}

}  // namespace oe
