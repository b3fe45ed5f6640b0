// Monte Carlo harness and worked-example walkthrough.
//
// exit codes: 0 success, 1 validation error, 2 demo or oracle mismatch

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "srcrt/oracle.hpp"
#include "srcrt/sim.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kMismatch = 2;

const char* const kSweepKeys[] = {"gamma", "prime_start", "moduli", "n_values", "l_rule",
                                  "snr_grid", "trials", "algos", "error_correction",
                                  "group_size", "l0", "init", "restarts", "max_iters", "threads"};

template <class T>
std::vector<T> parse_list(const std::string& text, const char* flag)
{
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::stringstream one(item);
        T v{};
        if (!(one >> v) || !(one >> std::ws).eof())
            throw srcrt::ValidationError(std::string(flag) + ": bad list entry '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw srcrt::ValidationError(std::string(flag) + ": empty list");
    return out;
}

// Writes to `path`, or stdout when empty.
template <class Fn>
void with_output(const std::string& path, Fn&& fn)
{
    if (path.empty()) {
        fn(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw srcrt::ValidationError("cannot open '" + path + "' for writing");
    fn(out);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Statistical robust CRT: sweeps, worked examples, probability tables, oracle checks"};
    app.require_subcommand(1);

    auto* sweep = app.add_subcommand("sweep", "Monte Carlo success-rate sweep, CSV output");
    std::string config_path, out_path, hist_path;
    std::string seed_text;
    std::map<std::string, std::string> overrides;
    sweep->add_option("--config", config_path, "key = value config file");
    sweep->add_option("--seed", seed_text, "64-bit seed");
    sweep->add_option("--out", out_path, "CSV path (default stdout)");
    sweep->add_option("--hist", hist_path, "iteration histogram CSV path");
    for (const char* key : kSweepKeys) sweep->add_option(std::string("--") + key, overrides[key], key);

    app.add_subcommand("demo", "Walk through the worked examples");

    auto* prob = app.add_subcommand("prob", "Tabulate the separation probability and its bound");
    std::string sigma_grid = "0.5,1,2,4,8", n_grid = "2,4,6", l_grid = "2,4";
    double prob_gamma = 100.0;
    std::size_t mc_draws = 0;
    std::uint64_t prob_seed = 0;
    std::string prob_out;
    prob->add_option("--sigma-grid", sigma_grid, "comma-separated noise std devs");
    prob->add_option("--n-grid", n_grid, "comma-separated N");
    prob->add_option("--l-grid", l_grid, "comma-separated L");
    prob->add_option("--gamma", prob_gamma, "common modulus factor");
    prob->add_option("--monte-carlo", mc_draws, "add a simulated column with this many draws");
    prob->add_option("--seed", prob_seed, "seed for the simulated column");
    prob->add_option("--out", prob_out, "CSV path (default stdout)");

    auto* check = app.add_subcommand("oracle-check", "Compare the fast decoders with brute force");
    std::size_t check_trials = 500;
    std::uint64_t check_seed = 1;
    check->add_option("--trials", check_trials, "instances per comparison");
    check->add_option("--seed", check_seed, "64-bit seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }

    try {
        if (sweep->parsed()) {
            srcrt::sim::SweepConfig cfg;
            if (!config_path.empty()) {
                std::ifstream in(config_path);
                if (!in) throw srcrt::ValidationError("cannot read config '" + config_path + "'");
                cfg = srcrt::sim::SweepConfig::parse(in, config_path);
            }
            for (const char* key : kSweepKeys)
                if (sweep->count(std::string("--") + key) > 0) {
                    try {
                        cfg.set(key, overrides[key]);
                    } catch (const srcrt::ValidationError& e) {
                        throw srcrt::ValidationError(std::string("--") + key + ": " + e.what());
                    }
                }
            if (!seed_text.empty()) cfg.set("seed", seed_text);
            cfg.validate();
            const auto rows = srcrt::sim::run_sweep(cfg);
            with_output(out_path, [&](std::ostream& o) { srcrt::sim::write_sweep_csv(o, rows); });
            if (!hist_path.empty())
                with_output(hist_path, [&](std::ostream& o) { srcrt::sim::write_histogram_csv(o, rows); });
            return kOk;
        }
        if (app.got_subcommand("demo")) return srcrt::sim::run_demo(std::cout) == 0 ? kOk : kMismatch;
        if (prob->parsed()) {
            srcrt::sim::ProbabilityGrid grid;
            grid.sigmas = parse_list<double>(sigma_grid, "--sigma-grid");
            grid.n_values = parse_list<std::size_t>(n_grid, "--n-grid");
            grid.l_values = parse_list<std::size_t>(l_grid, "--l-grid");
            grid.gamma = prob_gamma;
            grid.mc_draws = mc_draws;
            grid.seed = prob_seed;
            with_output(prob_out, [&](std::ostream& o) { srcrt::sim::run_probability(grid, o); });
            return kOk;
        }
        if (check->parsed()) {
            const auto r = srcrt::sim::oracle_check(check_trials, check_seed);
            std::printf("map clustering vs exhaustive MAP: %zu / %zu agree\n", r.clustering_agree,
                        r.clustering_trials);
            std::printf("rotation matching vs all permutations: %zu / %zu agree\n", r.matching_agree,
                        r.matching_trials);
            std::printf("single-number decoder vs quotient enumeration: %zu / %zu agree\n", r.single_agree,
                        r.single_trials);
            std::printf("%s\n", r.passed() ? "PASS" : "FAIL");
            return r.passed() ? kOk : kMismatch;
        }
    } catch (const srcrt::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kInvalid;
    } catch (const srcrt::oracle::BudgetExceeded& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kInvalid;
    }
    return kOk;
}
