#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <nlskam/frequency.hpp>
#include <nlskam/monomial.hpp>
#include <nlskam/sites.hpp>

namespace nlskam
{

struct DiophParams {
    DiophParams(double gamma, SiteSchedule schedule, double tau = 1.5);

    double gamma;
    SiteSchedule schedule;
    double tau;
};

int abs_sum(const IntVector &l);
int mass(const IntVector &l);
long long momentum(const IntVector &l);
long long quad_moment(const IntVector &l); // q(l) = sum j^2 l_j

// prod over tangential s with l_s != 0 of (1 + l_s^2 <i(s)>^2)^{-tau}
double td_weight(const IntVector &l, const SiteSchedule &sched, double tau = 1.5);

// Resonant index set: 0 < |l| <= lmax, support in [-J, J], at most two units
// on normal sites, zero mass and momentum, |q(l)| < |l|. Sorted.
std::vector<IntVector> enumerate_A(int J, int lmax, const SiteSchedule &sched);

struct DiophantineReport {
    bool pass = true;
    double worst_ratio = 0; // min |omega.l| / (gamma td(l)); +inf if A is empty
    IntVector worst_l;
    std::size_t violations = 0;
};

// |omega.l| >= gamma td(l) on A; |omega.l| < 1e-14 always counts as a failure.
DiophantineReport check_diophantine(const FrequencyVector &omega, const DiophParams &params,
                                    const std::vector<IntVector> &A);

// Precomputed (l, td(l)) pairs for repeated checks against the same A.
struct WeightedSet {
    std::vector<IntVector> l;
    std::vector<double> td;
};
WeightedSet weigh(const std::vector<IntVector> &A, const SiteSchedule &sched, double tau);
bool diophantine_ok(const FrequencyVector &omega, double gamma, const WeightedSet &A);

inline constexpr double exact_resonance_floor = 1e-14;

// Decreasing rearrangement: h > 1 repeated v_h + v_{-h} times, 1 repeated
// v_1 + v_{-1} + v_0 times.
std::vector<int> nhat(const MultiIndex &v);

// Signs aligned with nhat(alpha + beta) so that sum sigma_l nhat_l = 0.
std::vector<int> sigma_assign(const MultiIndex &alpha, const MultiIndex &beta);

// Nonzero modes of u repeated |u_j| times by decreasing |j|; each entry is
// (j, sign of u_j). Ties in |j| list the positive mode first.
std::vector<std::pair<int, int>> mlist(const IntVector &u);

// (sum x / prod sqrt x, sqrt x_1 + 4 / sqrt x_1)
std::pair<double, double> luchino_lhs_rhs(const std::vector<double> &x);

// |sum (alpha - beta)_s s^2| < 2 sum |alpha_s - beta_s|
bool divisor_condition(const MultiIndex &alpha, const MultiIndex &beta);

// Membership in M_j: alpha != beta, at most two normal factors, j in the support.
bool in_M_j(const MultiIndex &alpha, const MultiIndex &beta, int j, const std::vector<int> &sites);

// (jjap(j)^2 / prod jjap(s)^{alpha_s + beta_s}, 3 / prod_{l>=3} jjap(nhat_l)^{1/2})
std::pair<double, double> site_weight_sides(const MultiIndex &alpha, const MultiIndex &beta, int j);

// (|m_1|, 31 sum_{l>=3} nhat_l^2) with m = mlist(alpha - beta), nhat = nhat(alpha + beta)
std::pair<double, double> mlist_bound_sides(const MultiIndex &alpha, const MultiIndex &beta);

// sum over k_i >= 1 of -(delta/9) k_i log jjap(s(i)) + log(1 + <i>^2 k_i^2)
double a_k_value(const std::map<int, int> &k, double delta, const SiteSchedule &sched);
// sup over all k of a_k_value: the sum of the positive per-index maxima.
double a_k_sup(double delta, const SiteSchedule &sched, int i_limit = 4096);

struct MeasureEstimate {
    double fraction = 0;
    double ci_lo = 0;
    double ci_hi = 0;
    std::size_t samples = 0;
    std::size_t failures = 0;
};

// Wilson score interval at z = 1.96.
MeasureEstimate binomial_estimate(std::size_t failures, std::size_t samples);

// nu_s = s^2 + U(-1/2, 1/2) on tangential sites, omega_j = j^2 + V_j elsewhere.
MeasureEstimate measure_complement_mc(const DiophParams &params, int J, int lmax, std::size_t samples,
                                      std::uint64_t seed, const std::map<int, double> &V_normal = {},
                                      int threads = 1);

// Same fraction on a midpoint grid of the tangential cube (<= 2 tangential sites).
double measure_complement_grid(const DiophParams &params, int J, int lmax, int grid,
                               const std::map<int, double> &V_normal = {});

double coperta_sum(int J, int lmax, const SiteSchedule &sched, double tau = 1.5);
// 72 (prod_i (pi/<i>) coth(pi/<i>) - 1) over the site indices of S cap [-J, J]
double coperta_sum_bound(int J, const SiteSchedule &sched);

struct SlabReport {
    double meas_E = 0;
    double delta_E = 0; // sup over lines of the t-measure of the line inside E
    double bound = 0;   // 2^{1-n} delta_E |xi|_2^2
    double grid_error = 0;
    bool holds = true;
};

// Draws a random union of `boxes` axis-parallel boxes inside [-1/4, 1/4]^n,
// measures it on a grid^n midpoint grid and compares with the line bound.
SlabReport slab_measure_check(int n, const std::vector<double> &xi, int grid, std::uint64_t seed, int boxes = 3);

} // namespace nlskam
