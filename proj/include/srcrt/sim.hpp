#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "srcrt/iterative.hpp"
#include "srcrt/modular.hpp"
#include "srcrt/noise.hpp"
#include "srcrt/types.hpp"

namespace srcrt::sim {

enum class Algo { Algo1, Algo2, OracleClustered };

std::string algo_name(Algo a);
Algo parse_algo(const std::string& name);

/// `count` consecutive primes starting at the first prime >= start.
std::vector<std::uint64_t> primes_from(std::uint64_t start, std::size_t count);

/// Monte Carlo sweep settings. Read from flat `key = value` text; the keys are
/// the field names below. Lists are comma separated; snr_grid also accepts
/// `start:stop:step` (inclusive) and `inf` for the noiseless case.
struct SweepConfig {
    double gamma = 100.0;
    std::uint64_t prime_start = 23;
    std::vector<std::uint64_t> moduli;  ///< explicit M_l; overrides prime_start when set
    std::vector<std::size_t> n_values{2};
    std::size_t l_per_n = 2;            ///< l_rule "kN": L = k * N
    std::size_t l_fixed = 0;            ///< l_rule "<integer>": fixed L (0 = use l_per_n)
    std::vector<double> snr_grid;       ///< default -40..0 step 2.5
    std::size_t trials = 1000;
    std::vector<Algo> algos{Algo::Algo1, Algo::Algo2, Algo::OracleClustered};
    bool error_correction = false;
    /// Moduli per voting group; 0 or >= L runs each decoder once on all L moduli.
    std::size_t group_size = 2;
    std::uint64_t seed = 0;
    /// Numbers are drawn from [0, gamma * M_1 * ... * M_l0).
    std::size_t l0 = 2;
    InitStrategy init = InitStrategy::FirstColumn;
    std::size_t restarts = 0;
    std::size_t max_iters = 50;
    std::size_t threads = 0;            ///< 0 = hardware concurrency

    SweepConfig();

    /// Set one field from its text form. Throws ValidationError naming the field.
    void set(const std::string& key, const std::string& value);
    /// Parse key = value lines; '#' starts a comment. Errors name the line and field.
    static SweepConfig parse(std::istream& in, const std::string& source = "config");
    void validate() const;

    std::size_t moduli_count(std::size_t n) const;
    std::vector<std::uint64_t> coprimes(std::size_t n) const;
    Quotient quotient_bound(std::size_t n) const;
};

/// Outcome of one algorithm on one instance.
struct TrialRecord {
    std::vector<bool> success;          ///< |y_hat - Y| <= gamma after sorted pairing
    bool perfect = false;               ///< all numbers succeed
    double iterations = 0.0;            ///< mean over decoder runs (iterative decoder)
    std::vector<std::size_t> run_iterations;
    bool assumption1 = false;
};

/// Pairs estimates with truths in sorted order (an optimal assignment for
/// absolute error on the line) and flags those within gamma.
std::vector<bool> match_success(std::vector<double> estimates, std::vector<double> truths,
                                double gamma);

/// Runs one algorithm on one sampled instance, following the config's decoding mode.
TrialRecord run_trial(const Instance& instance, const ModulusSet& ms, Algo algo,
                      const SweepConfig& cfg, Quotient quotient_bound,
                      const IterateOptions& options);

/// Instance seed for a (n, snr index, trial) cell position; shared by all
/// algorithms so comparisons are paired.
std::uint64_t trial_seed(std::uint64_t seed, std::size_t n, std::size_t snr_index,
                         std::size_t trial);

struct CellResult {
    double snr = 0.0;
    std::size_t n = 0;
    Algo algo = Algo::Algo1;
    bool error_correction = false;
    std::size_t trials = 0;
    double success_rate_avg = 0.0;
    double perfect_rate = 0.0;
    double mean_iters = 0.0;
    double p90_iters = 0.0;
    double assumption1_rate = 0.0;
    double stderr_avg = 0.0;            ///< binomial standard error of success_rate_avg
    std::map<std::size_t, std::size_t> iteration_histogram;  ///< per decoder run
};

/// Rows ordered by n, then snr, then algorithm as listed in the config.
std::vector<CellResult> run_sweep(const SweepConfig& cfg);

inline constexpr const char* kSweepHeader =
    "snr,n,algo,error_correction,trials,success_rate_avg,perfect_rate,mean_iters,p90_iters,"
    "assumption1_rate,stderr";

void write_sweep_csv(std::ostream& out, const std::vector<CellResult>& rows);
/// Long-form histogram: snr,n,algo,error_correction,iterations,count
void write_histogram_csv(std::ostream& out, const std::vector<CellResult>& rows);

/// Walks through both worked examples and prints every intermediate value next
/// to its expected value. Returns the number of mismatches beyond 1e-9.
int run_demo(std::ostream& out);

struct ProbabilityGrid {
    std::vector<double> sigmas;
    std::vector<std::size_t> n_values;
    std::vector<std::size_t> l_values;
    double gamma = 100.0;
    std::size_t mc_draws = 0;  ///< adds a Monte Carlo column when positive
    std::uint64_t seed = 0;
};

/// CSV: sigma,n,l,gamma,probability,bound[,monte_carlo]
void run_probability(const ProbabilityGrid& grid, std::ostream& out);

struct OracleCheckReport {
    std::size_t clustering_trials = 0, clustering_agree = 0;
    std::size_t matching_trials = 0, matching_agree = 0;
    std::size_t single_trials = 0, single_agree = 0;

    bool passed() const;
};

/// Paired comparisons of the fast decoders against the brute-force oracles:
/// map_clustering vs exhaustive MAP on instances satisfying the cutting-point
/// assumption, match_step vs exhaustive matching, reconstruct_single vs
/// quotient enumeration. Clustering agreement must reach 99%; the other two 100%.
OracleCheckReport oracle_check(std::size_t trials, std::uint64_t seed);

}  // namespace srcrt::sim
