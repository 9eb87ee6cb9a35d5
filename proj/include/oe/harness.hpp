#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "oe/explorers.hpp"
#include "oe/simulation.hpp"

namespace oe {

enum class PriorKind { Uniform, Informative };

struct PriorSpec {
    PriorKind kind = PriorKind::Uniform;
    double alpha0 = 0.02;
    /// Ideal-observation weight; only used by informative priors.
    double weight = 0.0;
};

std::string_view to_string(PriorKind kind);
DirichletBelief make_prior(const PriorSpec& prior, const TabularMDP& mdp);

struct ExperimentConfig {
    AlgorithmSpec algorithm;
    PriorSpec prior;
    std::size_t n_runs = 2000;
    std::size_t steps = 1000;
    double gamma = 0.95;
    double vi_tol = 0.1;
    std::size_t max_iter = 100000;
    std::uint64_t seed_base = 0;
    std::vector<double> grid;
    std::filesystem::path output;
    bool freeze_belief = false;
    /// 0 = OE_WORKERS, else hardware concurrency.
    std::size_t workers = 0;
    bool retain_samples = true;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
    TrialOptions trial_options() const;
};

struct BatchStatistics {
    double mean = 0.0;
    double stderr_ = 0.0;
    double p90 = 0.0;
    double p10 = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t n_runs = 0;
    bool samples_retained = false;
    /// Cumulative rewards in trial-index order, when retained.
    std::vector<double> samples;
};

/// Raised by run_batch when a trial fails; carries the failing seed.
class BatchError : public std::runtime_error {
public:
    BatchError(const std::string& what, std::uint64_t seed) : std::runtime_error(what), seed_(seed) {}
    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
};

/// ceil(q n)-th smallest of `sorted` (1-based), clamped to [1, n].
double nearest_rank(std::span<const double> sorted, double q);

/// Pairwise (cascade) sum in index order.
double pairwise_sum(std::span<const double> values);

/// Statistics of samples given in canonical (trial-index) order. stderr is the
/// sample standard deviation over sqrt(n); zero for a single sample.
BatchStatistics summarize(std::span<const double> samples, bool retain = true);

/// Worker count: `requested` if nonzero, else OE_WORKERS, else hardware concurrency.
std::size_t resolve_workers(std::size_t requested);

/// Runs config.n_runs chain trials with seeds seed_base + i.
BatchStatistics run_batch(const ExperimentConfig& config);

struct SweepRow {
    ExperimentConfig config;
    BatchStatistics stats;
    /// Set when this grid point failed; stats are then empty.
    std::optional<std::string> error;
};

struct SweepTable {
    std::vector<SweepRow> rows;
    bool ok() const;
};

/// One batch per grid value (the algorithm parameter), grid order preserved.
/// Grid point i uses seeds starting at seed_base + i * n_runs.
SweepTable sweep(const ExperimentConfig& config, std::span<const double> grid);

/// Runs a sequence of fully specified configurations as rows of one table.
SweepTable run_rows(std::span<const ExperimentConfig> configs);

inline constexpr const char* kCsvHeader =
    "algorithm,parameter,prior_kind,alpha0,prior_weight,n_runs,steps,gamma,seed_base,mean,stderr,p90,p10";

/// Stable 64-bit FNV-1a hash of every field that affects results.
std::uint64_t config_hash(const ExperimentConfig& config);

/// Writes the manifest comment, the header and one line per successful row to
/// a temporary file beside `path`, then renames it into place. Throws
/// std::runtime_error naming the path and the cause.
void write_results_csv(const SweepTable& table, const std::filesystem::path& path);

struct CsvRow {
    std::string algorithm;
    double parameter;
    std::string prior_kind;
    double alpha0;
    double prior_weight;
    std::size_t n_runs;
    std::size_t steps;
    double gamma;
    std::uint64_t seed_base;
    double mean;
    double stderr_;
    double p90;
    double p10;
};

/// Parses a results file written by write_results_csv. `#` lines are skipped;
/// a header other than kCsvHeader is rejected.
std::vector<CsvRow> read_results_csv(const std::filesystem::path& path);

}  // namespace oe
