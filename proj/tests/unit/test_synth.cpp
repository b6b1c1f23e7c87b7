#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <nlskam/hamops.hpp>
#include <nlskam/kamflow.hpp>
#include <nlskam/random.hpp>
#include <nlskam/synth.hpp>

using namespace nlskam;

namespace
{

constexpr double pi = std::numbers::pi;

// Plane-wave sum u(t) = sum_j a_j e^{i nu_j t} e_j.
ModeField plane_waves(const std::map<int, Complex> &a, const std::map<int, double> &nu, int J)
{
    return [=](double t) {
        std::map<int, Complex> m;
        for (const auto &[j, c] : a) {
            m[j] = c * std::polar(1.0, nu.at(j) * t);
        }
        return ModeSeq(J, m);
    };
}

const TestFunction chi{0.0, 1.0, {{1, 1.0}, {2, 0.5}, {-1, Complex(0, 0.3)}, {0, 0.2}}};

} // namespace

TEST(TorusPoint, SquareRootOfActions)
{
    const auto u = torus_point({{1, 0.04}}, {{1, 0.0}}, 3);
    EXPECT_EQ(u[1], Complex(0.2));
    EXPECT_EQ(u.entries().size(), 1u);

    const ActionVector I{{1, 0.04}, {2, 0.01}, {4, 1e-4}};
    const auto v = torus_point(I, {{1, 0.3}, {2, -2.0}, {4, 5.0}}, 4);
    double sup = 0;
    for (const auto &[j, a] : I) {
        EXPECT_NEAR(std::norm(v[j]), a, 1e-17);
        sup = std::max(sup, a * std::pow(jjap(j), 2 * 1.5));
    }
    EXPECT_NEAR(wp_norm(v, 1.5), std::sqrt(sup), 1e-15);
    EXPECT_THROW(torus_point(I, {{3, 0.1}}, 4), std::invalid_argument);
}

TEST(Phases, WrapAndDistance)
{
    EXPECT_NEAR(wrap_phase(1.0, 2 * pi + 0.5), 0.5, 1e-15);
    EXPECT_NEAR(wrap_phase(-1.0, 0.5), 2 * pi - 0.5, 1e-15);
    // 1e6 periods: the naive product loses about 1e-10, wrap_phase keeps it.
    EXPECT_NEAR(wrap_phase(3.0, 2e6 * pi / 3 + 0.25), 0.75, 1e-9);
    EXPECT_NEAR(circle_distance(0.1, 2 * pi - 0.1), 0.2, 1e-15);
    EXPECT_NEAR(circle_distance(1.0, 1.0 + pi), pi, 1e-15);
}

TEST(SynthSolution, LinearFlowFormula)
{
    const ActionVector I{{1, 0.01}, {2, 0.0025}, {4, 1e-4}};
    const PhaseMap nu{{1, 1.1}, {2, 3.9}, {4, 16.2}};
    const std::vector<double> t{0.0, 0.3, 2.5};
    const std::vector<double> x{0.0, 1.0, 4.0};
    const auto g = synth_solution({}, I, nu, t, x, 4);
    for (std::size_t it = 0; it < t.size(); ++it) {
        for (std::size_t ix = 0; ix < x.size(); ++ix) {
            Complex expect = 0;
            for (const auto &[j, a] : I) {
                expect += std::sqrt(a) * std::polar(1.0, j * x[ix] + nu.at(j) * t[it]);
            }
            EXPECT_NEAR(std::abs(g.u[it * x.size() + ix] - expect), 0.0, 1e-15);
        }
    }
}

TEST(WeakResidual, LinearExactSolution)
{
    const std::map<int, double> V{{1, 0.1}, {2, -0.1}, {-1, 0.05}, {4, 0.2}};
    const std::map<int, Complex> a{{1, 0.1}, {2, 0.05}, {-1, Complex(0, 0.07)}, {4, 0.01}};
    std::map<int, double> nu;
    for (const auto &[j, c] : a) {
        nu[j] = j * j + V.at(j);
    }
    const auto exact = weak_residual(plane_waves(a, nu, 4), V, {}, chi, Quadrature{256, 256});
    EXPECT_LE(std::abs(exact), 1e-6);

    // Control: a wrong frequency on one mode is visible.
    nu[1] += 0.1;
    const auto wrong = weak_residual(plane_waves(a, nu, 4), V, {}, chi, Quadrature{256, 256});
    EXPECT_GT(std::abs(wrong), 1e-4);
}

TEST(WeakResidual, ConstantFieldIntegratesToZero)
{
    const auto u = [](double) { return ModeSeq(2, {{0, Complex(0.3, -0.1)}}); };
    const TestFunction c0{0.2, 0.9, {{0, 1.0}}};
    EXPECT_LE(std::abs(weak_residual(u, {}, {}, c0, Quadrature{128, 16})), 1e-12);
}

TEST(WeakResidual, NonlinearPlaneWave)
{
    // u = a e^{i(kx + nu t)} solves the cubic equation iff nu = k^2 + V_k - f a^2.
    const double amp = 0.3, f = 2.0;
    const std::map<int, double> V{{2, 0.15}};
    const auto good = plane_waves({{2, amp}}, {{2, 4 + 0.15 - f * amp * amp}}, 2);
    const auto bad = plane_waves({{2, amp}}, {{2, 4 + 0.15 + f * amp * amp}}, 2);
    const std::vector<std::pair<int, double>> fc{{1, f}};
    // The pairing has no conjugate: mode 2 of u meets mode -2 of chi.
    const TestFunction c2{0.0, 1.0, {{-2, 1.0}}};
    EXPECT_LE(std::abs(weak_residual(good, V, fc, c2, Quadrature{256, 64})), 1e-7);
    EXPECT_GT(std::abs(weak_residual(bad, V, fc, c2, Quadrature{256, 64})), 1e-3);
}

TEST(WeakResidual, RejectsBadQuadrature)
{
    const auto u = [](double) { return ModeSeq(1, {}); };
    EXPECT_THROW(weak_residual(u, {}, {}, chi, Quadrature{3, 8}), std::invalid_argument);
    EXPECT_THROW(weak_residual(u, {}, {}, TestFunction{1.0, 1.0, {}}, Quadrature{4, 8}), std::invalid_argument);
}

TEST(Regularity, DecayDecidesTheClass)
{
    // sqrt(I_j) = (r/2) jjap(j)^{-p} on 2^0 .. 2^10
    const double r = 0.1;
    auto actions = [&](double p) {
        ActionVector I;
        for (int i = 0; i <= 10; ++i) {
            const int j = 1 << i;
            I[j] = std::pow(0.5 * r * std::pow(jjap(j), -p), 2);
        }
        return I;
    };
    const auto p2 = regularity_probe(actions(2), 2);
    EXPECT_EQ(p2.cls, RegularityClass::non_classical_witness);
    EXPECT_NEAR(p2.tail_stat, r / 2, 1e-15);
    const auto p4 = regularity_probe(actions(4), 4);
    EXPECT_EQ(p4.cls, RegularityClass::classical_capable);
    EXPECT_LE(p4.tail_stat, r / 2 * std::pow(2.0, -14));
    EXPECT_EQ(regularity_probe({{3, 0.01}}, 2).cls, RegularityClass::indeterminate);
    EXPECT_EQ(to_string(RegularityClass::non_classical_witness), "non-classical-witness");
}

TEST(Density, SingleSiteFirstEntry)
{
    const double nu = 1.3, target = 2.0, tol = 0.01;
    const auto rep = density_check({{1, nu}}, {{1, target}}, tol, 100);
    ASSERT_TRUE(rep.hit_time.has_value());
    EXPECT_NEAR(*rep.hit_time, (target - tol) / nu, 1e-12);
    EXPECT_EQ(rep.criterion_value, 0.0);
}

TEST(Density, SparseSitesHit)
{
    const PhaseMap nu{{1, 1 + 0.1 * std::numbers::sqrt2}, {2, 4 + 0.1 * std::numbers::sqrt3}, {4, 16 + 0.1 * pi}};
    const PhaseMap target{{1, 1.0}, {2, 5.0}, {4, 0.5}};
    const auto rep = density_check(nu, target, 0.1, 1e4);
    ASSERT_TRUE(rep.hit_time.has_value());
    EXPECT_LT(rep.criterion_value, 0.35);
    for (const auto &[j, v] : nu) {
        EXPECT_LT(circle_distance(wrap_phase(v, *rep.hit_time), target.at(j)), 0.1);
    }
}

TEST(Density, ResonantPairMisses)
{
    // nu = (1, 2): 2 phi_1 - phi_2 is conserved, so (0, 1) is never approached.
    const auto rep = density_check({{1, 1.0}, {2, 2.0}}, {{1, 0.0}, {2, 1.0}}, 0.05, 2000);
    EXPECT_FALSE(rep.hit_time.has_value());
    EXPECT_GT(rep.max_distance, 0.3);
    EXPECT_GT(rep.candidates, 100);
}

TEST(Invariance, LinearTorusIsExact)
{
    const HamParams hp{4, 2, 0.1, 1};
    std::map<int, double> omega;
    for (int j = -4; j <= 4; ++j) {
        omega[j] = j * j + 0.01 * j;
    }
    const auto D = diagonal(omega, hp);
    const ActionVector I{{1, 1e-4}, {2, 1e-5}, {4, 1e-6}};
    const PhaseMap nu{{1, omega[1]}, {2, omega[2]}, {4, omega[4]}};
    const std::vector<PhaseMap> samples{{{1, 0.0}}, {{1, 1.0}, {2, 2.0}, {4, 3.0}}};
    EXPECT_LE(invariance_residual({}, nu, I, D, samples), 1e-15);
    // The nonlinear Hamiltonian without conjugation is not invariant.
    const auto H = build_nls({{1, 1.0}}, {}, hp);
    EXPECT_GT(invariance_residual({}, nu, I, H, samples), 1e-7);
}

TEST(Invariance, ToyRunClosesTheTorus)
{
    const int J = 4;
    const auto sched = power2_schedule();
    const auto sites = gen_sites(sched, J);
    ActionVector I;
    for (int s : sites) {
        I[s] = 1e-5 / std::pow(s, 4);
    }
    const CounterRng rng(7);
    std::map<int, double> V;
    for (int j = -J; j <= J; ++j) {
        V[j] = rng.uniform(0, static_cast<std::uint64_t>(j + 100), -0.25, 0.25);
    }
    const HamParams hp{J, 2, 0.01, 1.0};
    const auto omega = FrequencyVector::from_potential(J, V);
    const KamProblem problem{omega, Torus(sites, I), 0.01, sched, 1.5, Schedules(0.01, 1.0, 0.005, 0.5, 1.2)};
    const auto H = build_nls({{1, 1.0}}, V, hp);
    const auto res = run_kam(H, diagonal(omega.as_map(), hp), problem, RunOptions{.max_steps = 5, .tol = 1e-15});
    ASSERT_TRUE(res.converged);

    PhaseMap nu;
    for (int s : sites) {
        nu[s] = omega(s);
    }
    const auto Htot = H + lambda_embed(res.lambda, problem.torus, hp);
    std::vector<PhaseMap> samples;
    for (int k = 0; k < 6; ++k) {
        samples.push_back({{1, 0.7 * k}, {2, 1.3 * k}, {4, 2.9 * k}});
    }
    std::vector<double> per;
    for (const auto &s : samples) {
        per.push_back(invariance_residual(res.psi, nu, I, Htot, {s}));
    }
    const double worst = *std::max_element(per.begin(), per.end());
    EXPECT_LE(worst, 1e-13);
    // Without the conjugation the residual is at the size of the nonlinearity.
    EXPECT_GT(invariance_residual({}, nu, I, Htot, samples), 1e3 * worst);

    // Psi is near the identity on the torus.
    const auto v = torus_point(I, samples[3], J);
    EXPECT_LE(wp_norm(apply_psi(res.psi, v) - v, 1.0), problem.schedules.rho_total() / 4);
}
