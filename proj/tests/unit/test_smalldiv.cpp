#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include <nlskam/smalldiv.hpp>

#include "enumerate.hpp"
#include "random_ham.hpp"

using namespace nlskam;

namespace
{

// Naive oracle for the resonant set: recursive walk over every integer vector
// on [-J, J] with |l| <= lmax, then the defining filters.
std::vector<IntVector> naive_A(int J, int lmax, const std::vector<int> &sites)
{
    std::vector<IntVector> out;
    IntVector cur;
    auto rec = [&](auto &&self, int j, int budget) -> void {
        if (j > J) {
            const int n = abs_sum(cur);
            if (n == 0 || mass(cur) != 0 || momentum(cur) != 0 || std::llabs(quad_moment(cur)) >= n) {
                return;
            }
            int normal = 0;
            for (const auto &[m, v] : cur) {
                normal += std::binary_search(sites.begin(), sites.end(), m) ? 0 : std::abs(v);
            }
            if (normal <= 2) {
                out.push_back(cur);
            }
            return;
        }
        for (int v = -budget; v <= budget; ++v) {
            if (v != 0) {
                cur[j] = v;
            }
            self(self, j + 1, budget - std::abs(v));
            cur.erase(j);
        }
    };
    rec(rec, -J, lmax);
    std::sort(out.begin(), out.end());
    return out;
}

IntVector difference(const MultiIndex &a, const MultiIndex &b)
{
    IntVector l;
    for (const auto &[j, e] : a.entries()) {
        l[j] += e;
    }
    for (const auto &[j, e] : b.entries()) {
        if ((l[j] -= e) == 0) {
            l.erase(j);
        }
    }
    return l;
}

} // namespace

TEST(TdWeight, HandValues)
{
    const auto sched = power2_schedule();
    EXPECT_EQ(td_weight({}, sched), 1.0);
    EXPECT_EQ(td_weight({{3, 5}, {5, -2}}, sched), 1.0); // normal support only
    EXPECT_DOUBLE_EQ(td_weight({{4, 1}}, sched), std::pow(5.0, -1.5));
    EXPECT_DOUBLE_EQ(td_weight({{4, 1}, {8, -2}}, sched), td_weight({{4, 1}}, sched) * td_weight({{8, -2}}, sched));
}

TEST(EnumerateA, MatchesNaiveOracle)
{
    const auto sched = power2_schedule();
    for (int J = 1; J <= 6; ++J) {
        for (int lmax = 2; lmax <= 6; ++lmax) {
            EXPECT_EQ(enumerate_A(J, lmax, sched), naive_A(J, lmax, gen_sites(sched, J))) << J << " " << lmax;
        }
    }
}

TEST(EnumerateA, EvenLengthAtLeastFour)
{
    const auto sched = power2_schedule();
    for (const auto &l : enumerate_A(8, 8, sched)) {
        EXPECT_EQ(abs_sum(l) % 2, 0);
        EXPECT_GE(abs_sum(l), 4);
    }
    const auto A = enumerate_A(4, 4, sched);
    const IntVector included{{1, 1}, {3, 1}, {2, -2}};
    EXPECT_NE(std::find(A.begin(), A.end(), included), A.end());
    EXPECT_EQ(quad_moment(included), 2);
    const IntVector excluded{{2, 1}, {1, -1}};
    EXPECT_EQ(std::find(A.begin(), A.end(), excluded), A.end());
}

TEST(Diophantine, UnperturbedFrequenciesAreResonant)
{
    const auto sched = power2_schedule();
    const auto A = enumerate_A(8, 6, sched);
    const auto rep = check_diophantine(FrequencyVector::from_potential(8, {}), DiophParams(1e-3, sched), A);
    EXPECT_FALSE(rep.pass);
    EXPECT_EQ(quad_moment(rep.worst_l), 0);
    EXPECT_EQ(rep.worst_ratio, 0.0);
}

TEST(Diophantine, LargeQuadMomentIsNeverSmall)
{
    // |q(l)| >= |l| gives |omega.l| >= |l| / 2 for |V| <= 1/4.
    for (std::uint64_t k = 0; k < 20; ++k) {
        const auto w = fixtures::random_omega(5, 41, k);
        fixtures::for_each_balanced_pair(3, 5, [&](const MultiIndex &a, const MultiIndex &b) {
            const auto l = difference(a, b);
            const int n = abs_sum(l);
            if (n > 0 && std::llabs(quad_moment(l)) >= n) {
                ASSERT_GE(std::abs(w.dot(l)), 0.5 * n);
            }
        });
    }
}

TEST(Nhat, HandValues)
{
    EXPECT_EQ(nhat(MultiIndex{{-6, 1}, {-3, 4}, {-1, 1}, {0, 1}, {1, 2}, {6, 2}}),
              (std::vector<int>{6, 6, 6, 3, 3, 3, 3, 1, 1, 1, 1}));
    EXPECT_EQ(nhat(MultiIndex{{0, 1}}), (std::vector<int>{1}));
    EXPECT_EQ(nhat(MultiIndex{{2, 1}, {-2, 1}}), (std::vector<int>{2, 2}));
}

TEST(Sigma, HandValueAndCancellationOnEnumeration)
{
    EXPECT_EQ(sigma_assign(MultiIndex{{1, 1}, {3, 1}}, MultiIndex{{2, 2}}), (std::vector<int>{1, -1, -1, 1}));
    fixtures::for_each_balanced_pair(3, 5, [](const MultiIndex &a, const MultiIndex &b) {
        const auto n = nhat(a + b);
        const auto s = sigma_assign(a, b);
        long long sum = 0;
        for (std::size_t l = 0; l < n.size(); ++l) {
            sum += s[l] * n[l];
            if (n[l] != 1) {
                ASSERT_NE(s[l], 0);
            }
        }
        ASSERT_EQ(sum, 0) << to_string(a) << " | " << to_string(b);
    });
}

TEST(Mlist, HandValues)
{
    const auto m = mlist({{3, -2}, {1, 1}});
    EXPECT_EQ(m, (std::vector<std::pair<int, int>>{{3, -1}, {3, -1}, {1, 1}}));
    EXPECT_EQ(mlist({{5, 1}}), (std::vector<std::pair<int, int>>{{5, 1}}));
}

TEST(RatioInequality, HandValuesAndSweep)
{
    const auto [l, r] = luchino_lhs_rhs({2, 2});
    EXPECT_DOUBLE_EQ(l, 2.0);
    EXPECT_DOUBLE_EQ(r, std::sqrt(2.0) + 4 / std::sqrt(2.0));
    const auto [l1, r1] = luchino_lhs_rhs({7});
    EXPECT_LE(l1, r1);
    const CounterRng rng(42);
    for (std::uint64_t k = 0; k < 2000; ++k) {
        const int N = 1 + static_cast<int>(rng.uniform(0, k) * 8);
        std::vector<double> x;
        for (int q = 0; q < N; ++q) {
            x.push_back(std::floor(rng.uniform(1 + q, k, 2, 51)));
        }
        std::sort(x.rbegin(), x.rend());
        const auto [a, b] = luchino_lhs_rhs(x);
        EXPECT_LE(a, b * (1 + 1e-15));
    }
}

TEST(SmallDivisorBounds, ExhaustiveSmallCase)
{
    const std::vector<int> sites{1, 2, 4};
    long violations = 0, checked = 0;
    fixtures::for_each_balanced_pair(3, 6, [&](const MultiIndex &a, const MultiIndex &b) {
        if (a == b) {
            return;
        }
        const int n = abs_sum(difference(a, b));
        violations += (n % 2 != 0 || n == 2) ? 1 : 0;
        const auto nh = nhat(a + b);
        long tail = 0;
        for (std::size_t l = 1; l < nh.size(); ++l) {
            tail += nh[l];
        }
        violations += nh[0] > tail ? 1 : 0;
        if (divisor_condition(a, b)) {
            const auto [m1, bound] = mlist_bound_sides(a, b);
            violations += m1 > bound ? 1 : 0;
            for (int j = -6; j <= 6; ++j) {
                if (in_M_j(a, b, j, sites)) {
                    const auto [lhs, rhs] = site_weight_sides(a, b, j);
                    violations += lhs > rhs * (1 + 1e-12) ? 1 : 0;
                    ++checked;
                }
            }
        }
    });
    EXPECT_EQ(violations, 0);
    EXPECT_GT(checked, 100);
}

TEST(AkValue, HandValuesAndFrozenBound)
{
    const auto sched = power2_schedule();
    EXPECT_EQ(a_k_value({}, 0.5, sched), 0.0);
    EXPECT_DOUBLE_EQ(a_k_value({{2, 1}}, 0.5, sched), -(0.5 / 9) * std::log(4.0) + std::log(5.0));
    // C fitted on power2 from the exact supremum at delta in {0.1, 0.3, 0.5}: 1.72e-32.
    constexpr double C = 1e-31;
    const CounterRng rng(43);
    for (double delta : {0.1, 0.3, 0.5}) {
        const double cap = C * std::exp(45 * std::pow(delta, -1 / 1.2));
        EXPECT_LE(a_k_sup(delta, sched), cap);
        for (std::uint64_t t = 0; t < 200; ++t) {
            std::map<int, int> k;
            for (int i = 0; i < 30; ++i) {
                const int v = static_cast<int>(rng.uniform(t, static_cast<std::uint64_t>(i)) * 40) - 20;
                if (v > 0) {
                    k[i] = v;
                }
            }
            EXPECT_LE(a_k_value(k, delta, sched), a_k_sup(delta, sched) + 1e-9);
        }
    }
}

TEST(Measure, WilsonInterval)
{
    const auto e = binomial_estimate(0, 100);
    EXPECT_EQ(e.fraction, 0.0);
    EXPECT_EQ(e.ci_lo, 0.0);
    EXPECT_NEAR(e.ci_hi, 1.96 * 1.96 / (100 + 1.96 * 1.96), 1e-12);
    const auto h = binomial_estimate(50, 100);
    EXPECT_NEAR(h.ci_lo + h.ci_hi, 1.0, 1e-12);
}

TEST(Measure, MonteCarloMatchesGridOracle)
{
    // J = 3 has two tangential sites. Every l in A there has |q(l)| = 2 while
    // the tangential shifts move omega.l by at most 3/2 and V by 1/4, so the
    // resonant set is empty even at gamma = 1; the grid must see exactly that.
    const DiophParams params(1.0, power2_schedule());
    const std::map<int, double> V{{0, -0.25}, {3, -0.25}};
    for (const auto &l : enumerate_A(3, 6, params.schedule)) {
        EXPECT_EQ(std::llabs(quad_moment(l)), 2);
    }
    const double grid = measure_complement_grid(params, 3, 6, 400, V);
    const auto mc = measure_complement_mc(params, 3, 6, 20000, 44, V);
    EXPECT_EQ(grid, 0.0);
    EXPECT_GE(grid, mc.ci_lo);
    EXPECT_LE(grid, mc.ci_hi);
}

TEST(Measure, MonotoneInGammaAndBelowBound)
{
    const auto sched = power2_schedule();
    double prev_lo = 1;
    const double cop = coperta_sum(4, 6, sched);
    for (double g : {1.0, 0.5, 0.25}) {
        const auto e = measure_complement_mc(DiophParams(g, sched), 4, 6, 5000, 45);
        EXPECT_LE(e.fraction, 16 * g * cop);
        EXPECT_LE(e.ci_lo, prev_lo);
        prev_lo = e.ci_hi;
    }
}

TEST(Measure, ThreadCountDoesNotChangeTheResult)
{
    const DiophParams params(0.5, power2_schedule());
    const auto a = measure_complement_mc(params, 4, 6, 3000, 46, {}, 1);
    const auto b = measure_complement_mc(params, 4, 6, 3000, 46, {}, 3);
    EXPECT_EQ(a.failures, b.failures);
}

TEST(ResonantSum, EmptySetAndMajorant)
{
    const auto sched = power2_schedule();
    EXPECT_TRUE(enumerate_A(1, 6, sched).empty());
    EXPECT_EQ(coperta_sum(1, 6, sched), 0.0);
    for (int J = 2; J <= 8; ++J) {
        EXPECT_LE(coperta_sum(J, 6, sched), coperta_sum_bound(J, sched)) << J;
    }
}

TEST(ResonantSum, TailSettlesWithLmax)
{
    const auto sched = power2_schedule();
    int threshold = -1;
    for (int lmax = 2; lmax <= 8 && threshold < 0; lmax += 2) {
        if (coperta_sum(3, 2 * lmax, sched) - coperta_sum(3, lmax, sched) < 1e-3) {
            threshold = lmax;
        }
    }
    RecordProperty("lmax_threshold_J3", threshold);
    EXPECT_EQ(threshold, 8);
    EXPECT_LE(coperta_sum(8, 6, sched), coperta_sum(8, 8, sched));
}

TEST(Slab, LineBoundHolds)
{
    const auto one = slab_measure_check(1, {1.0}, 4096, 47);
    EXPECT_NEAR(one.meas_E, one.delta_E, one.grid_error + 1e-12);
    EXPECT_TRUE(one.holds);
    const auto none = slab_measure_check(2, {0.3, 1.0}, 64, 47, 0);
    EXPECT_EQ(none.meas_E, 0.0);
    EXPECT_TRUE(none.holds);
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto r = slab_measure_check(2, {0.5 - 0.1 * static_cast<double>(s), 1.0}, 512, s);
        EXPECT_TRUE(r.holds) << r.meas_E << " " << r.bound << " " << r.grid_error;
    }
}
