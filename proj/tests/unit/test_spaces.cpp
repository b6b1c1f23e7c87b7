#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <nlskam/spaces.hpp>

#include "random_ham.hpp"

using namespace nlskam;

TEST(Jjap, SmallModesUseTwo)
{
    EXPECT_EQ(jjap(0), 2.0);
    EXPECT_EQ(jjap(1), 2.0);
    EXPECT_EQ(jjap(-1), 2.0);
    EXPECT_EQ(jjap(3), 3.0);
    EXPECT_EQ(jjap(-5), 5.0);
}

TEST(WpNorm, HandValues)
{
    EXPECT_DOUBLE_EQ(wp_norm(ModeSeq(4, {{1, 1.0}}), 2), 4.0);
    EXPECT_EQ(wp_norm(ModeSeq(4), 1), 0.0);
    EXPECT_DOUBLE_EQ(wp_norm(ModeSeq(4, {{0, 0.5}, {4, 0.1}}), 1), 1.0);
}

TEST(WpNorm, IsANormOnRandomPairs)
{
    for (std::uint64_t k = 0; k < 50; ++k) {
        const auto u = fixtures::random_modes(6, 1.0, 3, 2 * k);
        const auto v = fixtures::random_modes(6, 0.5, 3, 2 * k + 1);
        const double p = 0.5 + 0.05 * static_cast<double>(k);
        std::map<int, Complex> sum, scaled;
        for (int j = -6; j <= 6; ++j) {
            sum[j] = u[j] + v[j];
            scaled[j] = Complex(-2.5, 1.0) * u[j];
        }
        EXPECT_LE(wp_norm(ModeSeq(6, sum), p), wp_norm(u, p) + wp_norm(v, p) + 1e-12);
        EXPECT_NEAR(wp_norm(ModeSeq(6, scaled), p), std::abs(Complex(-2.5, 1.0)) * wp_norm(u, p), 1e-12);
        EXPECT_GT(wp_norm(u, p), 0.0);
        // jjap >= 2 makes the weights increase with p.
        EXPECT_GE(wp_norm(u, p + 0.3), wp_norm(u, p));
    }
}

TEST(WpNorm, BoundsTheSupNormOfTheField)
{
    const int J = 8;
    const double p = 1.5;
    const auto u = fixtures::random_modes(J, 0.3, 17, 0);
    double weight_sum = 0;
    for (int j = -J; j <= J; ++j) {
        weight_sum += std::pow(jjap(j), -p);
    }
    double sup = 0;
    for (int m = 0; m < 512; ++m) {
        const double x = 2 * std::numbers::pi * m / 512;
        Complex s = 0;
        for (const auto &[j, c] : u.entries()) {
            s += c * std::exp(Complex(0, j * x));
        }
        sup = std::max(sup, std::abs(s));
    }
    EXPECT_LE(sup, weight_sum * wp_norm(u, p));
}

TEST(ReferencePoint, HandValues)
{
    const auto a = reference_point(1, 1, 1);
    EXPECT_EQ(a.entries().size(), 3u);
    for (int j = -1; j <= 1; ++j) {
        EXPECT_DOUBLE_EQ(a[j].real(), 0.5);
    }
    EXPECT_DOUBLE_EQ(reference_point(2, 2, 0)[0].real(), 0.5);
    for (double r : {0.01, 0.3, 2.0}) {
        for (double p : {0.5, 1.0, 3.0}) {
            EXPECT_NEAR(wp_norm(reference_point(r, p, 9), p), r, 1e-15 * r);
        }
    }
}

TEST(EmbeddingConstants, HandValueAndMonotoneInJ)
{
    const auto e = embedding_constants(2, 0, 1);
    EXPECT_NEAR(e.lower, 4.0 / 3.0, 1e-15);
    double prev = 0;
    for (int J = 1; J <= 40; ++J) {
        const double inv = 1 / embedding_constants(2, 0, J).lower;
        EXPECT_GT(inv, prev);
        prev = inv;
    }
    EXPECT_THROW(embedding_constants(1.5, 1, 4), std::domain_error);
}

TEST(ModeSeq, TextRoundTripIsExact)
{
    const auto u = fixtures::random_modes(7, 0.1, 5, 1);
    EXPECT_EQ(ModeSeq::from_text(u.to_text()), u);
}
