#pragma once

#include <map>
#include <utility>
#include <vector>

#include <nlskam/hamiltonian.hpp>

namespace nlskam
{

using ActionVector = std::map<int, double>;
using LambdaVector = std::map<int, double>;

// Tangential sites S together with the actions I_s of the torus.
class Torus
{
public:
    Torus() = default;
    Torus(std::vector<int> sites, ActionVector actions);

    const std::vector<int> &sites() const noexcept { return sites_; }
    const ActionVector &actions() const noexcept { return actions_; }
    bool is_tangential(int j) const;
    double action(int s) const;

    // sqrt(sup_s I_s jjap(s)^{2p}); I lies in I(p, r) iff this is < r.
    double action_radius(double p) const;

private:
    std::vector<int> sites_;
    ActionVector actions_;
};

// Number of letters u_j, ubar_j with j outside S. A monomial with n normal
// letters has Pi^d components only for d >= n - 2.
int normal_letters(const MonoKey &k, const Torus &torus);

// Pi^d H for d >= -2, re-expanded in u, ubar.
Hamiltonian project_degree(const Hamiltonian &H, int d, const Torus &torus);

// All nonzero Pi^d H at once, keyed by d.
std::map<int, Hamiltonian> split_by_degree(const Hamiltonian &H, const Torus &torus);

struct LowSplit {
    Hamiltonian m2;   // Pi^{-2}
    Hamiltonian m1;   // Pi^{-1}
    Hamiltonian zero; // Pi^{0}
    Hamiltonian high; // H - Pi^{<=0} H
};
LowSplit split_low(const Hamiltonian &H, const Torus &torus);

// (Pi^K H, Pi^R H): alpha == beta versus the rest.
std::pair<Hamiltonian, Hamiltonian> project_kernel(const Hamiltonian &H);

// sum_{s in S} l_s (|u_s|^2 - I_s) + sum_{j not in S} l_j |u_j|^2
Hamiltonian lambda_embed(const LambdaVector &lambda, const Torus &torus, const HamParams &params);

// Inverse of lambda_embed on Pi^{0,K}: reads the |u_j|^2 coefficients.
LambdaVector kernel_lambda(const Hamiltonian &zero_kernel);

double sup_abs(const LambdaVector &v);

} // namespace nlskam
