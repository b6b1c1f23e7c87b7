#pragma once

#include <optional>
#include <vector>

#include <nlskam/frequency.hpp>
#include <nlskam/hamiltonian.hpp>
#include <nlskam/sites.hpp>

namespace nlskam
{

// Smallest admissible |omega.(alpha - beta)| for a monomial: either a
// constant, or gamma td(alpha - beta) / 2 (half the Diophantine margin).
class DivisorFloor
{
public:
    static DivisorFloor constant(double floor);
    static DivisorFloor coupled(double gamma, SiteSchedule sched, double tau = 1.5);

    double at(const MonoKey &k) const;

private:
    DivisorFloor() = default;
    double constant_ = 0;
    double gamma_ = 0;
    double tau_ = 1.5;
    std::optional<SiteSchedule> sched_;
};

// alpha - beta as an integer vector
IntVector key_difference(const MonoKey &k);

struct HomologicalMode {
    // KAM mode: reject monomials with more than two normal factors.
    bool restrict_normal = false;
    std::vector<int> sites;
};

// S_{ab} = -i F_{ab} / (omega.(alpha - beta)), so that {D(omega), S} = F.
Hamiltonian solve_homological(const Hamiltonian &F, const FrequencyVector &omega, const DivisorFloor &floor,
                              const HomologicalMode &mode = {});

// L_omega S = {D(omega), S}, coefficientwise i omega.(alpha - beta) S_{ab}.
Hamiltonian apply_L(const Hamiltonian &S, const FrequencyVector &omega);

// Frozen constant c in |L^{-1}F|_{r,p+delta} <= gamma^{-1} exp(exp(c delta^{-1/eta})) |F|_{r,p}.
// Fitted once on power2 sites (J in [4, 8], D <= 3, omega tuned to 1.01x the
// Diophantine margin, delta up to 0.95): the sweep needs c >= 1.465.
inline constexpr double loss_constant = 2.0;

struct LossReport {
    double lhs = 0;     // |L^{-1} F|_{r, p + delta}
    double norm_F = 0;  // |F|_{r, p}
    double log_rhs = 0; // log of gamma^{-1} exp(exp(c delta^{-1/eta})) |F|_{r,p}
    double k_factor = 0; // sup per-monomial factor, see loss_k_factor
    bool holds = true;
};

LossReport loss_bound_report(const Hamiltonian &F, const FrequencyVector &omega, double delta, double gamma, double r,
                             double p, double eta, const DivisorFloor &floor, double c = loss_constant);

// sup over monomials and j in their support of
// (jjap(j)^2 / prod_s jjap(s)^{alpha_s + beta_s})^delta / |omega.(alpha - beta)|,
// so that |L^{-1}F|_{r,p+delta} <= k_factor |F|_{r,p}.
double loss_k_factor(const Hamiltonian &F, const FrequencyVector &omega, double delta);

} // namespace nlskam
