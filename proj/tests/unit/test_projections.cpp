#include <cmath>

#include <gtest/gtest.h>

#include <nlskam/hamops.hpp>
#include <nlskam/projections.hpp>

#include "random_ham.hpp"

using namespace nlskam;
using fixtures::random_hamiltonian;

namespace
{

const std::vector<int> sites{1, 2, 4};

// Dyadic actions keep the binomial re-expansion exact in binary.
Torus dyadic_torus()
{
    return Torus(sites, {{1, 1.0 / 64}, {2, 1.0 / 256}, {4, 1.0 / 1024}});
}

Hamiltonian single(const HamParams &hp, MultiIndex a, MultiIndex b, Complex c = 1.0)
{
    HamBuilder bld(hp);
    bld.add(a, b, c);
    return bld.build();
}

Hamiltonian sum_of(const std::map<int, Hamiltonian> &parts, const HamParams &hp)
{
    Hamiltonian s(hp);
    for (const auto &[d, h] : parts) {
        s += h;
    }
    return s;
}

double max_coeff(const Hamiltonian &h)
{
    double m = 0;
    for (const auto &[k, c] : h.terms()) {
        m = std::max(m, std::abs(c));
    }
    return m;
}

} // namespace

TEST(ProjectDegree, TangentialAction)
{
    const HamParams hp{4, 2, 1, 1};
    const Torus torus(sites, {{2, 0.25}});
    const auto H = single(hp, {{2, 1}}, {{2, 1}});
    const auto parts = split_by_degree(H, torus);
    ASSERT_EQ(parts.size(), 2u);
    EXPECT_EQ(parts.at(-2).coeff(MonoKey()), Complex(0.25));
    EXPECT_EQ(parts.at(-2).size(), 1u);
    EXPECT_EQ(parts.at(0), H - single(hp, {}, {}, 0.25));
}

TEST(ProjectDegree, NormalQuadraticIsDegreeZero)
{
    const HamParams hp{4, 2, 1, 1};
    const auto H = single(hp, {{3, 1}}, {{3, 1}}) + single(hp, {{3, 1}, {-1, 1}}, {{0, 1}, {2, 1}});
    const auto torus = dyadic_torus();
    EXPECT_EQ(project_degree(H.filtered([](const MonoKey &k) { return k.degree() == 2; }), 0, torus),
              single(hp, {{3, 1}}, {{3, 1}}));
    EXPECT_EQ(normal_letters(MonoKey::make({{3, 1}, {-1, 1}}, {{0, 1}, {2, 1}}), torus), 3);
}

TEST(ProjectDegree, TelescopesExactly)
{
    const auto torus = dyadic_torus();
    for (std::uint64_t k = 0; k < 30; ++k) {
        const HamParams hp{5, 3, 1, 1};
        const auto H = random_hamiltonian(hp, 31, k, {.terms = 25, .dyadic = true});
        EXPECT_EQ(sum_of(split_by_degree(H, torus), hp), H);
        const auto low = split_low(H, torus);
        EXPECT_EQ(low.m2 + low.m1 + low.zero + low.high, H);
    }
}

TEST(ProjectDegree, IdempotentAndOrthogonal)
{
    const auto torus = dyadic_torus();
    const HamParams hp{5, 3, 1, 1};
    for (std::uint64_t k = 0; k < 10; ++k) {
        const auto H = random_hamiltonian(hp, 32, k, {.terms = 20, .dyadic = true});
        for (int d = -2; d <= 6; ++d) {
            const auto Pd = project_degree(H, d, torus);
            EXPECT_EQ(project_degree(Pd, d, torus), Pd) << "d=" << d;
            for (int e = -2; e <= 6; ++e) {
                if (e != d) {
                    EXPECT_TRUE(project_degree(Pd, e, torus).empty()) << d << " " << e;
                }
            }
        }
    }
}

TEST(ProjectDegree, NormBounds)
{
    // I in I(p, r) with r' = sqrt(2) r: the setting of the projection estimates.
    const double p = 1;
    for (std::uint64_t k = 0; k < 40; ++k) {
        const CounterRng rng(33);
        const double rp = rng.uniform(0, k, 0.01, 0.5);
        const double r = rp / std::sqrt(2.0);
        const Torus torus(sites, fixtures::actions_with_radius(sites, 0.99 * r, p));
        const HamParams hp{5, 3, rp, p};
        const auto H = random_hamiltonian(hp, 34, k, {.terms = 25});
        const double nH = majorant_norm(H, rp, p);
        for (const auto &[d, Pd] : split_by_degree(H, torus)) {
            EXPECT_LE(majorant_norm(Pd, rp, p), std::pow(3.0, d / 2.0 + 1) * nH) << "d=" << d;
        }
        const auto low = split_low(H, torus);
        EXPECT_LE(majorant_norm(low.zero, rp, p), 3 * nH);
        EXPECT_LE(sup_abs(kernel_lambda(project_kernel(low.zero).first)), 3 * nH);
        EXPECT_LE(majorant_norm(low.m1, rp, p), nH);
        EXPECT_LE(majorant_norm(low.m2, rp, p), nH);
        EXPECT_LE(majorant_norm(low.high, rp, p), 6 * nH);
    }
}

TEST(ProjectDegree, BracketRespectsDegree)
{
    const auto torus = dyadic_torus();
    const HamParams hp{4, 7, 1, 1};
    for (std::uint64_t k = 0; k < 20; ++k) {
        const int d1 = static_cast<int>(k % 3) - 1, d2 = static_cast<int>(k / 3 % 3);
        const HamParams small{4, 2, 1, 1};
        const auto F = project_degree(random_hamiltonian(small, 35, k, {.terms = 8}).with_params(hp), d1, torus);
        const auto G = project_degree(random_hamiltonian(small, 36, k, {.terms = 8}).with_params(hp), d2, torus);
        const auto B = poisson(F, G);
        for (int d = -2; d < d1 + d2; ++d) {
            EXPECT_LT(max_coeff(project_degree(B, d, torus)), 1e-14) << d1 << " " << d2 << " " << d;
        }
    }
}

TEST(ProjectKernel, SplitsByAlphaEqualsBeta)
{
    const HamParams hp{4, 2, 1, 1};
    const auto K = single(hp, {{1, 1}}, {{1, 1}});
    const auto R = single(hp, {{1, 1}, {3, 1}}, {{2, 2}});
    const auto [hk, hr] = project_kernel(K + R);
    EXPECT_EQ(hk, K);
    EXPECT_EQ(hr, R);
    EXPECT_TRUE(project_kernel(K).second.empty());
    for (std::uint64_t k = 0; k < 10; ++k) {
        const auto H = random_hamiltonian(hp, 37, k, {.terms = 15});
        EXPECT_TRUE(project_kernel(project_kernel(H).second).first.empty());
    }
}

TEST(ProjectKernel, OddDegreeKernelIsEmpty)
{
    const auto torus = dyadic_torus();
    for (std::uint64_t k = 0; k < 10; ++k) {
        const auto H = random_hamiltonian(HamParams{5, 3, 1, 1}, 38, k, {.terms = 30});
        EXPECT_TRUE(project_kernel(project_degree(H, -1, torus)).first.empty());
        EXPECT_TRUE(project_kernel(project_degree(H, 1, torus)).first.empty());
    }
}

TEST(LambdaEmbed, HandValuesAndIsometry)
{
    const HamParams hp{4, 2, 0.1, 1};
    const Torus torus(sites, {{1, 0.1}});
    EXPECT_EQ(lambda_embed({{1, 2.0}}, torus, hp), 2.0 * (single(hp, {{1, 1}}, {{1, 1}}) - single(hp, {}, {}, 0.1)));
    EXPECT_TRUE(lambda_embed({}, torus, hp).empty());
    EXPECT_TRUE(lambda_embed({{3, 0.0}}, torus, hp).empty());
    const CounterRng rng(39);
    for (std::uint64_t k = 0; k < 20; ++k) {
        LambdaVector lam;
        for (int j = -4; j <= 4; ++j) {
            lam[j] = rng.uniform(k, static_cast<std::uint64_t>(j + 4), -1, 1);
        }
        const auto L = lambda_embed(lam, torus, hp);
        EXPECT_NEAR(majorant_norm(L, 0.3, 1.5), sup_abs(lam), 1e-15);
        const auto back = kernel_lambda(project_kernel(project_degree(L, 0, torus)).first);
        for (const auto &[j, v] : lam) {
            EXPECT_DOUBLE_EQ(back.at(j), v);
        }
    }
}
