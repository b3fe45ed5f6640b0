#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "srcrt/noise.hpp"
#include "srcrt/rng.hpp"
#include "srcrt/voting.hpp"

using namespace srcrt;

namespace {

ModulusSet primes_set(std::size_t l)
{
    const std::vector<std::uint64_t> p{23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71};
    return ModulusSet::uniform(100.0, {p.begin(), p.begin() + static_cast<std::ptrdiff_t>(l)}, 1.0);
}

std::size_t choose(std::size_t n, std::size_t k)
{
    std::size_t c = 1;
    for (std::size_t j = 1; j <= k; ++j) c = c * (n - k + j) / j;
    return c;
}

}  // namespace

TEST_CASE("combinations are lexicographic and complete")
{
    const auto c = combinations(4, 2);
    REQUIRE(c.size() == 6);
    CHECK(c.front() == std::vector<std::size_t>{0, 1});
    CHECK(c.back() == std::vector<std::size_t>{2, 3});
    CHECK(std::is_sorted(c.begin(), c.end()));
    CHECK(combinations(5, 0).size() == 1);
    CHECK(combinations(2, 3).empty());
    for (std::size_t n = 1; n <= 8; ++n)
        for (std::size_t k = 0; k <= n; ++k) CHECK(combinations(n, k).size() == choose(n, k));
}

TEST_CASE("minimal prefix with the simulation range")
{
    const auto ms = primes_set(4);
    CHECK(minimal_prefix(ms, 23 * 29) == 2);
    CHECK(minimal_prefix(ms, 23 * 29 + 1) == 3);
    CHECK(minimal_prefix(ms, 1) == 1);
    CHECK_THROWS_AS(minimal_prefix(ms, Quotient{23} * 29 * 31 * 37 + 1), ValidationError);
}

TEST_CASE("regrouping counts")
{
    const auto four = primes_set(4);
    CHECK(regroup_moduli(four, VotingConfig::make(four, 23 * 29, 2)).size() == 6);
    for (std::size_t n = 1; n <= 6; ++n) {
        const auto ms = primes_set(2 * n);
        CHECK(regroup_moduli(ms, VotingConfig::make(ms, 23 * 29, 2)).size() == choose(2 * n, 2));
    }
    // a tighter range drops the pairs whose product is too small
    CHECK_THROWS_AS(VotingConfig::make(four, 23 * 31, 2), ValidationError);
    const VotingConfig cfg{2, 2, 23 * 31};
    const auto groups = regroup_moduli(four, cfg);
    CHECK(groups.size() == 5);
    CHECK(std::find(groups.begin(), groups.end(), std::vector<std::size_t>{0, 1}) == groups.end());

    CHECK_THROWS_AS(VotingConfig::make(four, 23 * 29, 1), ValidationError);
    VotingConfig bad = VotingConfig::make(four, 23 * 29, 2);
    bad.group_size = 5;
    CHECK_THROWS_AS(regroup_moduli(four, bad), ValidationError);
}

TEST_CASE("tally picks the most supported quotients")
{
    const std::vector<Estimate> c{{510, 5, 10}, {520, 5, 20}, {730, 7, 30}, {940, 9, 40}, {550, 5, 50}, {760, 7, 60}};
    const auto out = tally_votes(c, 2, 100.0);
    REQUIRE(out.estimates.size() == 2);
    CHECK(out.estimates[0].quotient == 5);
    CHECK(out.estimates[0].y_hat == doctest::Approx(500.0 + 80.0 / 3.0));
    CHECK(out.support[0] == 3);
    CHECK(out.estimates[1].quotient == 7);
    CHECK(out.distinct_quotients == 3);
    CHECK_FALSE(out.degenerate);
}

TEST_CASE("tally merges votes split by the wrap point")
{
    // 499 and 501 straddle a multiple of gamma: (4, 99) and (5, 1)
    const std::vector<Estimate> c{{499, 4, 99}, {501, 5, 1}, {800, 8, 0}};
    const auto out = tally_votes(c, 1, 100.0);
    CHECK(out.estimates[0].quotient == 4);
    CHECK(out.support[0] == 2);
    CHECK(out.estimates[0].y_hat == doctest::Approx(500.0));
}

TEST_CASE("tally ties go to the smaller quotient and degeneracy is flagged")
{
    const std::vector<Estimate> c{{910, 9, 10}, {310, 3, 10}};
    const auto out = tally_votes(c, 3, 100.0);
    CHECK(out.degenerate);
    CHECK(out.distinct_quotients == 2);
    CHECK(out.estimates[0].quotient == 3);
    CHECK(out.estimates[1].quotient == 9);
    CHECK(out.estimates[2].quotient == 3);
    CHECK_THROWS_AS(tally_votes(c, 0, 100.0), ValidationError);
}

TEST_CASE("tally is invariant to candidate order")
{
    auto rng = CounterRng::substream(4, 0);
    for (int t = 0; t < 200; ++t) {
        std::vector<Estimate> c;
        for (int k = 0; k < 12; ++k) {
            const Quotient q = rng.below(6);
            const double mu = rng.uniform(0.0, 100.0);
            c.push_back({static_cast<double>(q) * 100.0 + mu, q, mu});
        }
        const auto a = tally_votes(c, 3, 100.0);
        auto shuffled = c;
        rng.shuffle(std::span<Estimate>(shuffled));
        const auto b = tally_votes(shuffled, 3, 100.0);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(a.estimates[i].quotient == b.estimates[i].quotient);
            CHECK(a.estimates[i].y_hat == doctest::Approx(b.estimates[i].y_hat));
        }
    }
}

TEST_CASE("voting recovers noiseless numbers")
{
    const auto ms = primes_set(4);
    const auto cfg = VotingConfig::make(ms, 23 * 29, 2);
    for (std::uint64_t t = 0; t < 50; ++t) {
        InstanceSpec spec{2, ms, INFINITY, t, 66700.0};
        const auto inst = sample_instance(spec);
        for (auto decoder : {Decoder::MapCutting, Decoder::Iterative}) {
            const auto out = vote_reconstruct(inst.observations, ms, cfg, decoder);
            std::vector<double> y, truth = inst.truth.ys;
            for (const auto& e : out.estimates) y.push_back(e.y_hat);
            std::sort(y.begin(), y.end());
            std::sort(truth.begin(), truth.end());
            for (std::size_t i = 0; i < 2; ++i) CHECK(y[i] == doctest::Approx(truth[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("error-tolerant decoding survives one corrupted residue")
{
    const auto ms = primes_set(4);
    auto rng = CounterRng::substream(8, 0);
    for (int t = 0; t < 300; ++t) {
        const double y = rng.uniform(0.0, 66700.0);
        std::vector<double> raws(4);
        for (std::size_t l = 0; l < 4; ++l) raws[l] = wrap(y + rng.uniform(-10.0, 10.0), ms.modulus(l));
        const std::size_t bad = rng.below(4);
        raws[bad] = rng.uniform(0.0, ms.modulus(bad));
        const auto out = decode_with_errors(ClusterResidues(raws, ms), ms, 2);
        CHECK(std::abs(out.y_hat - y) <= 75.0);
        CHECK(out.confidence > 0.0);
    }
}

TEST_CASE("error-tolerant decoding preconditions")
{
    const auto ms = primes_set(2);
    CHECK_THROWS_AS(decode_with_errors(ClusterResidues({1.0, 2.0}, ms), ms, 2), ValidationError);
}

TEST_CASE("unanimous subsets give the single-subset answer")
{
    const auto ms = primes_set(4);
    const auto cfg = VotingConfig::make(ms, 23 * 29, 2);
    const auto inst = sample_instance(InstanceSpec{3, ms, 10.0, 12, 66700.0});
    const auto out = vote_reconstruct(inst.observations, ms, cfg, Decoder::MapCutting);
    const std::vector<std::size_t> first{0, 1};
    const auto single = reconstruct_algo1(inst.observations.select_columns(first), ms.subset(first));
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(out.support[i] == 6);
        const auto match = std::find_if(single.estimates.begin(), single.estimates.end(),
                                        [&](const Estimate& e) { return e.quotient == out.estimates[i].quotient; });
        REQUIRE(match != single.estimates.end());
        CHECK(std::abs(match->y_hat - out.estimates[i].y_hat) < 1.0);
    }
}

TEST_CASE("one corrupted subset is outvoted")
{
    // six pair subsets; replace one subset's candidates with garbage quotients
    const auto ms = primes_set(4);
    const auto cfg = VotingConfig::make(ms, 23 * 29, 2);
    const auto subsets = regroup_moduli(ms, cfg);
    const auto inst = sample_instance(InstanceSpec{2, ms, 0.0, 4, 66700.0});
    std::vector<Estimate> candidates;
    for (std::size_t s = 0; s < subsets.size(); ++s) {
        auto rec = reconstruct_algo1(inst.observations.select_columns(subsets[s]), ms.subset(subsets[s]));
        if (s == 2)
            for (auto& e : rec.estimates) e = {e.y_hat + 31400.0, e.quotient + 314, e.mu_hat};
        candidates.insert(candidates.end(), rec.estimates.begin(), rec.estimates.end());
    }
    const auto out = tally_votes(candidates, 2, 100.0);
    std::vector<double> y{out.estimates[0].y_hat, out.estimates[1].y_hat}, truth = inst.truth.ys;
    std::sort(y.begin(), y.end());
    std::sort(truth.begin(), truth.end());
    for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(y[i] - truth[i]) <= 100.0);
}

TEST_CASE("voting is at least as good as a single pair")
{
    const auto ms = primes_set(4);
    const auto cfg = VotingConfig::make(ms, 23 * 29, 2);
    const std::vector<std::size_t> first{0, 1};
    const auto pair_ms = ms.subset(first);
    std::size_t vote_ok = 0, pair_ok = 0;
    for (std::uint64_t t = 0; t < 500; ++t) {
        InstanceSpec spec{2, ModulusSet::uniform(100.0, {23, 29, 31, 37}, 10.0), -20.0, 7000 + t, 66700.0};
        const auto inst = sample_instance(spec);
        auto truth = inst.truth.ys;
        std::sort(truth.begin(), truth.end());
        auto count = [&](std::vector<double> y) {
            std::sort(y.begin(), y.end());
            std::size_t ok = 0;
            for (std::size_t i = 0; i < 2; ++i) ok += std::abs(y[i] - truth[i]) <= 100.0 ? 1 : 0;
            return ok;
        };
        const auto vote = vote_reconstruct(inst.observations, ms, cfg, Decoder::Iterative);
        const auto pair = reconstruct_algo2(inst.observations.select_columns(first), pair_ms);
        vote_ok += count({vote.estimates[0].y_hat, vote.estimates[1].y_hat});
        pair_ok += count({pair.estimates[0].y_hat, pair.estimates[1].y_hat});
    }
    CHECK(vote_ok >= pair_ok);
}

TEST_CASE("error-tolerant decoding without corruption matches the plain decoder")
{
    const auto ms = primes_set(4);
    auto rng = CounterRng::substream(13, 0);
    for (int t = 0; t < 200; ++t) {
        const double y = rng.uniform(0.0, 66700.0);
        std::vector<double> raws(4);
        for (std::size_t l = 0; l < 4; ++l) raws[l] = wrap(y + rng.uniform(-2.0, 2.0), ms.modulus(l));
        const ClusterResidues cluster(raws, ms);
        const auto out = decode_with_errors(cluster, ms, 2);
        CHECK(out.confidence == 1.0);
        CHECK(out.consistent == 4);
        CHECK_FALSE(out.low_confidence);
        CHECK(out.y_hat == doctest::Approx(reconstruct_single(cluster, ms).y_hat).epsilon(1e-9));
    }
}

TEST_CASE("error-tolerant decoding outside its contract still completes")
{
    const auto ms = primes_set(3);
    auto rng = CounterRng::substream(14, 0);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> raws(3);
        for (std::size_t l = 0; l < 3; ++l) raws[l] = rng.uniform(0.0, ms.modulus(l));
        const auto out = decode_with_errors(ClusterResidues(raws, ms), ms, 2);
        CHECK(out.confidence > 0.0);
        CHECK(out.confidence <= 1.0);
    }
}
