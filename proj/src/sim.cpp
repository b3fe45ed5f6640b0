#include "srcrt/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "srcrt/map_cluster.hpp"
#include "srcrt/oracle.hpp"
#include "srcrt/rng.hpp"
#include "srcrt/single.hpp"
#include "srcrt/voting.hpp"

namespace srcrt::sim {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

[[noreturn]] void bad_field(const std::string& key, const std::string& value, const char* expected)
{
    throw ValidationError("field '" + key + "': expected " + expected + ", got '" + value + "'");
}

double to_double(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size() || !std::isfinite(v)) bad_field(key, text, "a finite real");
        return v;
    } catch (const std::logic_error&) {
        bad_field(key, text, "a real number");
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
        bad_field(key, text, "an unsigned integer");
    try {
        return std::stoull(t);
    } catch (const std::out_of_range&) {
        bad_field(key, text, "a 64-bit unsigned integer");
    }
}

bool to_bool(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    bad_field(key, text, "true or false");
}

std::vector<double> default_snr_grid()
{
    std::vector<double> grid;
    for (int k = 0; k <= 16; ++k) grid.push_back(-40.0 + 2.5 * k);
    return grid;
}

std::vector<double> parse_snr_grid(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    if (std::count(t.begin(), t.end(), ':') == 2) {
        const auto a = t.find(':');
        const auto b = t.find(':', a + 1);
        const double start = to_double(key, t.substr(0, a));
        const double stop = to_double(key, t.substr(a + 1, b - a - 1));
        const double step = to_double(key, t.substr(b + 1));
        if (!(step > 0.0) || stop < start) bad_field(key, text, "start:stop:step with step > 0");
        std::vector<double> grid;
        for (std::size_t k = 0;; ++k) {
            const double v = start + step * static_cast<double>(k);
            if (v > stop + 1e-9 * step) break;
            grid.push_back(v);
        }
        return grid;
    }
    std::vector<double> grid;
    for (const auto& item : split_list(t)) grid.push_back(to_double(key, item));
    if (grid.empty()) bad_field(key, text, "a non-empty list");
    return grid;
}

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

bool is_prime(std::uint64_t x)
{
    if (x < 2) return false;
    for (std::uint64_t d = 2; d * d <= x; ++d)
        if (x % d == 0) return false;
    return true;
}

Clustering restrict_clustering(const Clustering& c, std::span<const std::size_t> cols)
{
    Clustering out;
    for (std::size_t l : cols) out.perms.push_back(c.perms[l]);
    return out;
}

// nearest-rank percentile
double percentile(std::vector<double> xs, double p)
{
    if (xs.empty()) return 0.0;
    std::sort(xs.begin(), xs.end());
    auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(xs.size())));
    rank = std::clamp<std::size_t>(rank, 1, xs.size());
    return xs[rank - 1];
}

template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn)
{
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t k = 0; k < count; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < count; k = next++) {
                try {
                    fn(k);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::string algo_name(Algo a)
{
    switch (a) {
    case Algo::Algo1: return "algo1";
    case Algo::Algo2: return "algo2";
    case Algo::OracleClustered: return "oracle-clustered";
    }
    return "?";
}

Algo parse_algo(const std::string& name)
{
    const std::string t = trim(name);
    if (t == "algo1") return Algo::Algo1;
    if (t == "algo2") return Algo::Algo2;
    if (t == "oracle-clustered") return Algo::OracleClustered;
    throw ValidationError("unknown algorithm '" + name + "' (expected algo1, algo2 or oracle-clustered)");
}

std::vector<std::uint64_t> primes_from(std::uint64_t start, std::size_t count)
{
    std::vector<std::uint64_t> out;
    for (std::uint64_t x = std::max<std::uint64_t>(start, 2); out.size() < count; ++x)
        if (is_prime(x)) out.push_back(x);
    return out;
}

SweepConfig::SweepConfig() : snr_grid(default_snr_grid()) {}

void SweepConfig::set(const std::string& raw_key, const std::string& value)
{
    const std::string key = trim(raw_key);
    if (key == "gamma") {
        gamma = to_double(key, value);
    } else if (key == "prime_start") {
        prime_start = to_u64(key, value);
    } else if (key == "moduli") {
        moduli.clear();
        for (const auto& item : split_list(value)) moduli.push_back(to_u64(key, item));
    } else if (key == "n_values") {
        n_values.clear();
        for (const auto& item : split_list(value)) n_values.push_back(to_u64(key, item));
        if (n_values.empty()) bad_field(key, value, "a non-empty list");
    } else if (key == "l_rule") {
        const std::string t = trim(value);
        if (!t.empty() && (t.back() == 'N' || t.back() == 'n')) {
            l_per_n = t.size() == 1 ? 1 : to_u64(key, t.substr(0, t.size() - 1));
            l_fixed = 0;
        } else {
            l_fixed = to_u64(key, t);
        }
    } else if (key == "snr_grid") {
        snr_grid = parse_snr_grid(key, value);
    } else if (key == "trials") {
        trials = to_u64(key, value);
    } else if (key == "algos") {
        algos.clear();
        try {
            for (const auto& item : split_list(value)) algos.push_back(parse_algo(item));
        } catch (const ValidationError& e) {
            throw ValidationError("field 'algos': " + std::string(e.what()));
        }
        if (algos.empty()) bad_field(key, value, "a non-empty list");
    } else if (key == "error_correction") {
        error_correction = to_bool(key, value);
    } else if (key == "group_size") {
        group_size = to_u64(key, value);
    } else if (key == "seed") {
        seed = to_u64(key, value);
    } else if (key == "l0") {
        l0 = to_u64(key, value);
    } else if (key == "init") {
        const std::string t = trim(value);
        if (t == "first-column") init = InitStrategy::FirstColumn;
        else if (t == "every-column") init = InitStrategy::EveryColumn;
        else bad_field(key, value, "first-column or every-column");
    } else if (key == "restarts") {
        restarts = to_u64(key, value);
    } else if (key == "max_iters") {
        max_iters = to_u64(key, value);
    } else if (key == "threads") {
        threads = to_u64(key, value);
    } else {
        throw ValidationError("unknown field '" + key + "'");
    }
}

SweepConfig SweepConfig::parse(std::istream& in, const std::string& source)
{
    SweepConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        try {
            if (eq == std::string::npos) throw ValidationError("expected key = value");
            cfg.set(line.substr(0, eq), line.substr(eq + 1));
        } catch (const ValidationError& e) {
            throw ValidationError(source + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

std::size_t SweepConfig::moduli_count(std::size_t n) const
{
    return l_fixed > 0 ? l_fixed : l_per_n * n;
}

std::vector<std::uint64_t> SweepConfig::coprimes(std::size_t n) const
{
    const std::size_t l = moduli_count(n);
    if (moduli.empty()) return primes_from(prime_start, l);
    if (moduli.size() < l)
        throw ValidationError("field 'moduli': " + std::to_string(l) + " moduli needed for N=" +
                              std::to_string(n) + ", " + std::to_string(moduli.size()) + " given");
    return {moduli.begin(), moduli.begin() + static_cast<std::ptrdiff_t>(l)};
}

Quotient SweepConfig::quotient_bound(std::size_t n) const
{
    const auto m = coprimes(n);
    if (l0 == 0 || l0 > m.size())
        throw ValidationError("field 'l0': must lie in [1, L] (L=" + std::to_string(m.size()) + ")");
    Quotient q = 1;
    for (std::size_t l = 0; l < l0; ++l) q *= m[l];
    return q;
}

void SweepConfig::validate() const
{
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError("field 'gamma': must be positive");
    if (trials == 0) throw ValidationError("field 'trials': must be positive");
    if (max_iters == 0) throw ValidationError("field 'max_iters': must be positive");
    if (snr_grid.empty()) throw ValidationError("field 'snr_grid': must not be empty");
    if (algos.empty()) throw ValidationError("field 'algos': must not be empty");
    for (std::size_t n : n_values) {
        if (n == 0) throw ValidationError("field 'n_values': entries must be positive");
        const auto m = coprimes(n);
        if (m.empty()) throw ValidationError("field 'l_rule': L must be positive");
        ModulusSet::uniform(gamma, m, 1.0);  // co-primality and overflow
        const auto bound = quotient_bound(n);
        if (error_correction) {
            const auto l0_needed = minimal_prefix(ModulusSet::uniform(gamma, m, 1.0), bound);
            if (m.size() <= l0_needed)
                throw ValidationError("field 'error_correction': needs L > L0 (L=" +
                                      std::to_string(m.size()) + ")");
        } else if (group_size > 0 && group_size < m.size()) {
            VotingConfig::make(ModulusSet::uniform(gamma, m, 1.0), bound, group_size);
        }
    }
}

std::vector<bool> match_success(std::vector<double> estimates, std::vector<double> truths, double gamma)
{
    if (estimates.size() != truths.size())
        throw ValidationError("success matching: estimate and truth counts differ");
    std::sort(estimates.begin(), estimates.end());
    std::sort(truths.begin(), truths.end());
    std::vector<bool> ok(truths.size());
    for (std::size_t i = 0; i < truths.size(); ++i) ok[i] = std::abs(estimates[i] - truths[i]) <= gamma;
    return ok;
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t n, std::size_t snr_index, std::size_t trial)
{
    std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL);
    h = mix64(h ^ static_cast<std::uint64_t>(n));
    h = mix64(h ^ (static_cast<std::uint64_t>(snr_index) << 20));
    return mix64(h ^ (static_cast<std::uint64_t>(trial) << 40 | static_cast<std::uint64_t>(trial) >> 24));
}

TrialRecord run_trial(const Instance& instance, const ModulusSet& ms, Algo algo, const SweepConfig& cfg,
                      Quotient quotient_bound, const IterateOptions& options)
{
    const auto& obs = instance.observations;
    const auto& truth = instance.truth;
    const std::size_t n = obs.rows();
    const std::size_t l_count = ms.size();
    const double gamma = ms.gamma();

    TrialRecord rec;
    rec.assumption1 = assumption1_holds(truth, gamma);
    std::vector<double> y_hat;
    y_hat.reserve(n);

    if (cfg.error_correction) {
        Clustering clustering;
        if (algo == Algo::Algo1) {
            clustering = reconstruct_algo1(obs, ms).clustering;
        } else if (algo == Algo::Algo2) {
            const auto r = reconstruct_algo2(obs, ms, options);
            clustering = r.clustering;
            rec.run_iterations.push_back(r.iterations);
        } else {
            clustering = truth.true_perms;
        }
        const std::size_t l0 = minimal_prefix(ms, quotient_bound);
        for (std::size_t i = 0; i < n; ++i)
            y_hat.push_back(decode_with_errors(ClusterResidues(clustering.gather(obs, i), ms), ms, l0).y_hat);
    } else if (cfg.group_size > 0 && cfg.group_size < l_count) {
        const auto vcfg = VotingConfig::make(ms, quotient_bound, cfg.group_size);
        VoteOutcome vote;
        if (algo == Algo::OracleClustered) {
            std::vector<Estimate> candidates;
            for (const auto& subset : regroup_moduli(ms, vcfg)) {
                const auto sub_ms = ms.subset(subset);
                const auto est = reconstruct_clustered(obs.select_columns(subset),
                                                       restrict_clustering(truth.true_perms, subset), sub_ms);
                candidates.insert(candidates.end(), est.begin(), est.end());
            }
            vote = tally_votes(candidates, n, gamma);
        } else {
            vote = vote_reconstruct(obs, ms, vcfg, algo == Algo::Algo1 ? Decoder::MapCutting : Decoder::Iterative,
                                    options);
            if (algo == Algo::Algo2) rec.run_iterations = vote.iterations;
        }
        for (const auto& e : vote.estimates) y_hat.push_back(e.y_hat);
    } else {
        std::vector<Estimate> est;
        if (algo == Algo::Algo1) {
            est = reconstruct_algo1(obs, ms).estimates;
        } else if (algo == Algo::Algo2) {
            auto r = reconstruct_algo2(obs, ms, options);
            est = std::move(r.estimates);
            rec.run_iterations.push_back(r.iterations);
        } else {
            est = reconstruct_clustered(obs, truth.true_perms, ms);
        }
        for (const auto& e : est) y_hat.push_back(e.y_hat);
    }

    rec.success = match_success(std::move(y_hat), truth.ys, gamma);
    rec.perfect = std::all_of(rec.success.begin(), rec.success.end(), [](bool b) { return b; });
    if (!rec.run_iterations.empty()) {
        const auto total = std::accumulate(rec.run_iterations.begin(), rec.run_iterations.end(), std::size_t{0});
        rec.iterations = static_cast<double>(total) / static_cast<double>(rec.run_iterations.size());
    }
    return rec;
}

std::vector<CellResult> run_sweep(const SweepConfig& cfg)
{
    cfg.validate();
    std::vector<CellResult> rows;
    for (std::size_t n : cfg.n_values) {
        const auto coprimes = cfg.coprimes(n);
        const Quotient bound = cfg.quotient_bound(n);
        const double range = cfg.gamma * static_cast<double>(bound);

        for (std::size_t s = 0; s < cfg.snr_grid.size(); ++s) {
            const double snr = cfg.snr_grid[s];
            const auto base = InstanceSpec::from_snr(n, cfg.gamma, coprimes, snr, 0, range);
            std::vector<std::vector<TrialRecord>> records(cfg.algos.size(),
                                                          std::vector<TrialRecord>(cfg.trials));

            parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
                InstanceSpec spec = base;
                spec.seed = trial_seed(cfg.seed, n, s, t);
                const auto instance = sample_instance(spec);
                IterateOptions options{cfg.max_iters, cfg.init, cfg.restarts, mix64(spec.seed + 1)};
                for (std::size_t a = 0; a < cfg.algos.size(); ++a)
                    records[a][t] = run_trial(instance, base.ms, cfg.algos[a], cfg, bound, options);
            });

            for (std::size_t a = 0; a < cfg.algos.size(); ++a) {
                CellResult cell;
                cell.snr = snr;
                cell.n = n;
                cell.algo = cfg.algos[a];
                cell.error_correction = cfg.error_correction;
                cell.trials = cfg.trials;
                std::size_t successes = 0, perfect = 0, a1 = 0;
                std::vector<double> iters;
                iters.reserve(cfg.trials);
                for (const auto& r : records[a]) {
                    successes += static_cast<std::size_t>(std::count(r.success.begin(), r.success.end(), true));
                    perfect += r.perfect ? 1 : 0;
                    a1 += r.assumption1 ? 1 : 0;
                    iters.push_back(r.iterations);
                    for (std::size_t k : r.run_iterations) ++cell.iteration_histogram[k];
                }
                const double trials = static_cast<double>(cfg.trials);
                const double numbers = trials * static_cast<double>(n);
                cell.success_rate_avg = static_cast<double>(successes) / numbers;
                cell.perfect_rate = static_cast<double>(perfect) / trials;
                cell.assumption1_rate = static_cast<double>(a1) / trials;
                cell.mean_iters = std::accumulate(iters.begin(), iters.end(), 0.0) / trials;
                cell.p90_iters = percentile(iters, 0.9);
                const double p = cell.success_rate_avg;
                cell.stderr_avg = std::sqrt(p * (1.0 - p) / numbers);
                rows.push_back(std::move(cell));
            }
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<CellResult>& rows)
{
    out << kSweepHeader << '\n';
    for (const auto& r : rows) {
        out << fmt(r.snr) << ',' << r.n << ',' << algo_name(r.algo) << ',' << (r.error_correction ? 1 : 0)
            << ',' << r.trials << ',' << fmt(r.success_rate_avg) << ',' << fmt(r.perfect_rate) << ','
            << fmt(r.mean_iters) << ',' << fmt(r.p90_iters) << ',' << fmt(r.assumption1_rate) << ','
            << fmt(r.stderr_avg) << '\n';
    }
}

void write_histogram_csv(std::ostream& out, const std::vector<CellResult>& rows)
{
    out << "snr,n,algo,error_correction,iterations,count\n";
    for (const auto& r : rows)
        for (const auto& [iters, count] : r.iteration_histogram)
            out << fmt(r.snr) << ',' << r.n << ',' << algo_name(r.algo) << ','
                << (r.error_correction ? 1 : 0) << ',' << iters << ',' << count << '\n';
}

// ---------------------------------------------------------------------------
// demo

namespace {

class Checker {
public:
    explicit Checker(std::ostream& out) : out_(out) {}

    void value(const std::string& label, double got, double expected)
    {
        const bool ok = std::abs(got - expected) <= 1e-9;
        out_ << "  " << label << " = " << fmt(got) << "  (expected " << fmt(expected) << ")"
             << (ok ? "" : "  MISMATCH") << '\n';
        if (!ok) ++mismatches_;
    }

    void flag(const std::string& label, bool ok)
    {
        out_ << "  " << label << ": " << (ok ? "ok" : "MISMATCH") << '\n';
        if (!ok) ++mismatches_;
    }

    int mismatches() const { return mismatches_; }

private:
    std::ostream& out_;
    int mismatches_ = 0;
};

std::string join(const std::vector<double>& xs)
{
    std::string s = "{";
    for (std::size_t k = 0; k < xs.size(); ++k) s += (k ? ", " : "") + fmt(xs[k]);
    return s + "}";
}

void demo_example1(std::ostream& out, Checker& check)
{
    out << "Example 1: gamma = 5, m = {10, 15}, R_1 = {1, 9}, R_2 = {10, 3}\n";
    const auto ms = ModulusSet::with_weights(5.0, {2, 3}, {1.0, 1.0});
    const auto obs = ResidueMatrix::from_columns({{1.0, 9.0}, {10.0, 3.0}});
    const auto commons = common_residues(obs, ms.gamma());
    out << "  r_1 = " << join(commons.column(0)) << ", r_2 = " << join(commons.column(1)) << '\n';

    struct Expect {
        double tau;
        std::vector<double> col1, col2;
        double score;
    };
    const Expect cases[] = {{1.0, {1.0, -1.0}, {0.0, -2.0}, -1.0}, {3.0, {1.0, -1.0}, {0.0, 3.0}, -2.5}};
    for (const auto& c : cases) {
        const auto shifted = shift_residues(commons, c.tau, ms.gamma());
        out << " tau = " << fmt(c.tau) << ": shifted r_1 = " << join(shifted.values.column(0))
            << ", r_2 = " << join(shifted.values.column(1)) << '\n';
        for (std::size_t i = 0; i < 2; ++i) {
            check.value("shifted r_1[" + std::to_string(i) + "]", shifted.values(i, 0), c.col1[i]);
            check.value("shifted r_2[" + std::to_string(i) + "]", shifted.values(i, 1), c.col2[i]);
        }
        // i-th smallest of each column grouped together
        auto a = shifted.values.column(0), b = shifted.values.column(1);
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        check.value("score", cluster_score({{a[0], b[0]}, {a[1], b[1]}}, ms.weights()), c.score);
    }

    const auto map = map_clustering(commons, ms);
    out << " MAP cut tau* = " << fmt(map.tau_star) << '\n';
    check.value("best score", map.score, -1.0);
    const auto canon = map.clustering.canonical();
    check.flag("grouping {1, 10} / {9, 3}", canon.perms[1] == std::vector<std::size_t>{0, 1});

    const auto rec = reconstruct_algo1(obs, ms);
    const double expected[] = {10.5, 18.5};
    for (std::size_t i = 0; i < 2; ++i) {
        const auto group = rec.clustering.gather(obs, i);
        out << "  group " << join(group) << " -> quotient " << to_string(rec.estimates[i].quotient)
            << ", mu = " << fmt(rec.estimates[i].mu_hat) << '\n';
    }
    std::vector<double> y;
    for (const auto& e : rec.estimates) y.push_back(e.y_hat);
    std::sort(y.begin(), y.end());
    check.value("y_hat_1 (true 11)", y[0], expected[0]);
    check.value("y_hat_2 (true 18)", y[1], expected[1]);
}

void demo_example2(std::ostream& out, Checker& check)
{
    out << "Example 2: gamma = 5, m = {10, 15, 35}, R_1 = {2, 9, 4.3}, R_2 = {10, 3, 3.6}, "
           "R_3 = {10.5, 19.1, 29.4}\n";
    const auto ms = ModulusSet::with_weights(5.0, {2, 3, 7}, {1.0, 1.0, 1.0});
    const auto obs = ResidueMatrix::from_columns({{2.0, 9.0, 4.3}, {10.0, 3.0, 3.6}, {10.5, 19.1, 29.4}});
    const auto commons = common_residues(obs, ms.gamma());
    const double gamma = ms.gamma();
    for (std::size_t l = 0; l < 3; ++l) out << "  r_" << l + 1 << " = " << join(commons.column(l)) << '\n';

    const auto mu0 = commons.column(0);
    out << " init mu^0 = " << join(mu0) << '\n';

    const auto col2 = commons.column(1);
    const char* names[] = {"(a)", "(b)", "(c)"};
    // the three rotations of column rows {0, 1, 2} against mu = {2, 4, 4.3}
    const std::vector<std::vector<std::size_t>> as_perm{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
    const double rotation_costs[] = {matching_cost(col2, mu0, as_perm[0], gamma),
                                     matching_cost(col2, mu0, as_perm[1], gamma),
                                     matching_cost(col2, mu0, as_perm[2], gamma)};
    for (int k = 0; k < 3; ++k) out << "  K_2 candidate " << names[k] << " cost " << fmt(rotation_costs[k]) << '\n';
    const auto k2 = match_step(col2, mu0, gamma);
    check.flag("K_2^1 is (b): 0->4.3, 3->2, 3.6->4", k2 == std::vector<std::size_t>{1, 2, 0});
    check.flag("(b) is the minimum over all 3! matchings",
               matching_cost(col2, mu0, oracle::brute_force_matching(col2, mu0, gamma), gamma) ==
                   rotation_costs[1]);
    const auto k3 = match_step(commons.column(2), mu0, gamma);
    check.flag("K_3^1: 0.5->2, 4.1->4, 4.4->4.3", k3 == std::vector<std::size_t>{0, 1, 2});

    const auto step = iterate(obs, ms, mu0, 1);
    const auto group = step.clustering.gather(commons, 0);
    out << "  cluster of mu_1: " << join(group) << '\n';
    const double base = 0.5 + 2.0 + 3.0;
    for (int j = 0; j < 3; ++j) {
        const double cand = wrap((base + gamma * j) / 3.0, gamma);
        out << "  candidate " << fmt((base + gamma * j)) << "/3 -> " << fmt(cand) << ", loss "
            << fmt(common_residue_loss(cand, group, ms.weights(), gamma)) << '\n';
    }
    check.value("mu_1^1", step.mu[0], 5.5 / 3.0);

    // full run, for reference; the first-column start stops at a local optimum here
    const auto full = iterate(obs, ms, mu0);
    out << " stationary after " << full.iteration << " iterations, objective " << fmt(full.objective)
        << ", mu = " << join(full.mu) << '\n';
    const auto rec = reconstruct_algo2(obs, ms);
    std::vector<double> y;
    for (const auto& e : rec.estimates) y.push_back(e.y_hat);
    std::sort(y.begin(), y.end());
    out << "  y_hat (first-column start) = " << join(y) << "  (true {11, 18, 64})\n";
    IterateOptions every;
    every.init = InitStrategy::EveryColumn;
    const auto best = iterate_multi(obs, ms, every);
    const auto rec_every = reconstruct_algo2(obs, ms, every);
    y.clear();
    for (const auto& e : rec_every.estimates) y.push_back(e.y_hat);
    std::sort(y.begin(), y.end());
    out << "  y_hat (every-column start, objective " << fmt(best.objective) << ") = " << join(y) << '\n';
}

}  // namespace

int run_demo(std::ostream& out)
{
    Checker check(out);
    demo_example1(out, check);
    out << '\n';
    demo_example2(out, check);
    out << '\n' << (check.mismatches() == 0 ? "all checks passed" : "checks FAILED: " +
                                                                       std::to_string(check.mismatches()))
        << '\n';
    return check.mismatches();
}

// ---------------------------------------------------------------------------

void run_probability(const ProbabilityGrid& grid, std::ostream& out)
{
    out << "sigma,n,l,gamma,probability,bound" << (grid.mc_draws > 0 ? ",monte_carlo" : "") << '\n';
    std::uint64_t cell = 0;
    for (double sigma : grid.sigmas)
        for (std::size_t n : grid.n_values)
            for (std::size_t l : grid.l_values) {
                out << fmt(sigma) << ',' << n << ',' << l << ',' << fmt(grid.gamma) << ','
                    << fmt(separation_probability(sigma, grid.gamma, n, l)) << ','
                    << fmt(separation_bound(sigma, grid.gamma, n, l));
                if (grid.mc_draws > 0)
                    out << ',' << fmt(separation_frequency(sigma, grid.gamma, n, l, grid.mc_draws,
                                                           mix64(grid.seed + cell)));
                out << '\n';
                ++cell;
            }
}

bool OracleCheckReport::passed() const
{
    return clustering_agree * 100 >= clustering_trials * 99 && matching_agree == matching_trials &&
           single_agree == single_trials;
}

OracleCheckReport oracle_check(std::size_t trials, std::uint64_t seed)
{
    OracleCheckReport report;
    const double gamma = 100.0;

    // map clustering vs exhaustive MAP, conditioned on a cutting point existing
    std::uint64_t draw = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        while (true) {
            auto rng = CounterRng::substream(seed, draw++);
            const std::size_t n = 2 + rng.below(2);
            const std::size_t l = 2 + rng.below(2);
            const double snr = rng.uniform(0.0, 10.0);
            auto spec = InstanceSpec::from_snr(n, gamma, primes_from(23, l), snr, rng.next_u64());
            const auto inst = sample_instance(spec);
            if (!assumption1_holds(inst.truth, gamma)) continue;
            const auto commons = common_residues(inst.observations, gamma);
            const auto fast = map_clustering(commons, spec.ms).clustering.canonical();
            const auto slow = oracle::brute_force_map_clustering(commons, spec.ms).canonical();
            ++report.clustering_trials;
            report.clustering_agree += fast == slow ? 1 : 0;
            break;
        }
    }

    // rotation matching vs all permutations
    for (std::size_t t = 0; t < 2 * trials; ++t) {
        auto rng = CounterRng::substream(seed ^ 0x5a5a5a5a5a5a5a5aULL, t);
        const std::size_t n = 1 + rng.below(6);
        std::vector<double> column(n), mu(n);
        for (double& x : column) x = rng.uniform(0.0, gamma);
        for (double& x : mu) x = rng.uniform(0.0, gamma);
        const double fast = matching_cost(column, mu, match_step(column, mu, gamma), gamma);
        const double slow = matching_cost(column, mu, oracle::brute_force_matching(column, mu, gamma), gamma);
        ++report.matching_trials;
        report.matching_agree += std::abs(fast - slow) <= 1e-9 ? 1 : 0;
    }

    // single-number decoder vs quotient enumeration
    for (std::size_t t = 0; t < trials; ++t) {
        auto rng = CounterRng::substream(seed ^ 0xa5a5a5a5a5a5a5a5ULL, t);
        const std::size_t l = 2 + rng.below(2);
        const auto ms = ModulusSet::uniform(gamma, primes_from(23, l), 10.0);
        const double y = rng.uniform(0.0, ms.dynamic_range());
        std::vector<double> raws(l);
        for (std::size_t k = 0; k < l; ++k) raws[k] = wrap(y + 10.0 * rng.normal(), ms.modulus(k));
        const ClusterResidues cluster(raws, ms);
        const double fast = reconstruct_single(cluster, ms).y_hat;
        const double slow = oracle::exhaustive_reconstruct(cluster, ms).y_hat;
        ++report.single_trials;
        report.single_agree += std::abs(fast - slow) <= 1e-9 * std::max(1.0, std::abs(slow)) ? 1 : 0;
    }
    return report;
}

}  // namespace srcrt::sim
