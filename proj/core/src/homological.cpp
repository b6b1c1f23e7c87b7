#include <nlskam/errors.hpp>
#include <nlskam/hamops.hpp>
#include <nlskam/homological.hpp>
#include <nlskam/smalldiv.hpp>

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace nlskam
{

DivisorFloor DivisorFloor::constant(double floor)
{
    DivisorFloor f;
    f.constant_ = floor;
    return f;
}

DivisorFloor DivisorFloor::coupled(double gamma, SiteSchedule sched, double tau)
{
    DivisorFloor f;
    f.constant_ = exact_resonance_floor;
    f.gamma_ = gamma;
    f.tau_ = tau;
    f.sched_ = std::move(sched);
    return f;
}

IntVector key_difference(const MonoKey &k)
{
    IntVector l;
    for (const auto &me : decode(k)) {
        if (me.a != me.b) {
            l[me.j] = me.a - me.b;
        }
    }
    return l;
}

double DivisorFloor::at(const MonoKey &k) const
{
    if (!sched_) {
        return constant_;
    }
    return std::max(constant_, 0.5 * gamma_ * td_weight(key_difference(k), *sched_, tau_));
}

Hamiltonian solve_homological(const Hamiltonian &F, const FrequencyVector &omega, const DivisorFloor &floor,
                              const HomologicalMode &mode)
{
    if (omega.cutoff() < F.params().J) {
        throw std::invalid_argument("solve_homological: frequency vector shorter than the mode cutoff");
    }
    HamBuilder b(F.params(), F.size());
    for (const auto &[k, c] : F.terms()) {
        if (k.is_kernel()) {
            throw std::domain_error("solve_homological: kernel monomial " + k.to_string() + " in the right-hand side");
        }
        if (mode.restrict_normal) {
            int normal = 0;
            for (const auto &me : decode(k)) {
                if (!std::binary_search(mode.sites.begin(), mode.sites.end(), me.j)) {
                    normal += me.a + me.b;
                }
            }
            if (normal > 2) {
                throw std::domain_error("solve_homological: monomial " + k.to_string() +
                                        " has more than two normal factors");
            }
        }
        const double d = omega.divisor(k);
        const double fl = floor.at(k);
        if (!(std::abs(d) >= fl)) {
            throw SmallDivisorError(fmt::format("small divisor {} below floor {} at {}", d, fl, k.to_string()),
                                    k.to_string(), d, fl);
        }
        b.add(k, Complex(0, -1) * c / d);
    }
    return b.build();
}

Hamiltonian apply_L(const Hamiltonian &S, const FrequencyVector &omega)
{
    HamBuilder b(S.params(), S.size());
    for (const auto &[k, c] : S.terms()) {
        b.add(k, Complex(0, 1) * omega.divisor(k) * c);
    }
    return b.build();
}

double loss_k_factor(const Hamiltonian &F, const FrequencyVector &omega, double delta)
{
    double K = 0;
    for (const auto &[k, c] : F.terms()) {
        const double d = std::abs(omega.divisor(k));
        double prod = 1;
        const auto dk = decode(k);
        for (const auto &me : dk) {
            prod *= std::pow(jjap(me.j), me.a + me.b);
        }
        for (const auto &me : dk) {
            K = std::max(K, std::pow(jjap(me.j) * jjap(me.j) / prod, delta) / d);
        }
    }
    return K;
}

LossReport loss_bound_report(const Hamiltonian &F, const FrequencyVector &omega, double delta, double gamma, double r,
                             double p, double eta, const DivisorFloor &floor, double c)
{
    if (!(delta > 0 && delta < 1)) {
        throw std::invalid_argument("loss_bound_report: delta must lie in (0, 1)");
    }
    LossReport rep;
    const auto S = solve_homological(F, omega, floor);
    rep.lhs = majorant_norm(S, r, p + delta);
    rep.norm_F = majorant_norm(F, r, p);
    rep.k_factor = loss_k_factor(F, omega, delta);
    rep.log_rhs = -std::log(gamma) + std::exp(c * std::pow(delta, -1.0 / eta)) + std::log(rep.norm_F);
    rep.holds = rep.lhs == 0 || std::log(rep.lhs) <= rep.log_rhs;
    return rep;
}

} // namespace nlskam
