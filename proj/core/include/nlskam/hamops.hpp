#pragma once

#include <map>
#include <utility>
#include <vector>

#include <nlskam/hamiltonian.hpp>
#include <nlskam/spaces.hpp>

namespace nlskam
{

// (1/2) sup_j sum |H_{ab}| (a_j + b_j) u_p(r)^{a+b-2e_j}
double majorant_norm(const Hamiltonian &H, double r, double p);
inline double majorant_norm(const Hamiltonian &H)
{
    return majorant_norm(H, H.params().r, H.params().p);
}

// {F, G} with the sign fixed by {D(omega), M} = i omega.(alpha - beta) M:
// H_{ab} = i sum_j sum F_{a'b'} G_{a''b''} (b'_j a''_j - a'_j b''_j).
// Terms above the degree cutoff are dropped and reported.
Hamiltonian poisson(const Hamiltonian &F, const Hamiltonian &G, TruncationReport *report = nullptr);

struct LieReport {
    int terms_used = 0;
    double last_term_norm = 0;
    TruncationReport truncation;
};

// sum_{k=0}^{terms} ad_S^k H / k!, ad_S = {S, .}
Hamiltonian lie_transform(const Hamiltonian &H, const Hamiltonian &S, int terms, LieReport *report = nullptr);

// Adds terms until one has majorant norm below tol (at H's norm parameters)
// or vanishes; at most 2D+2 terms, which is exact when S has no quadratic part.
Hamiltonian lie_transform_adaptive(const Hamiltonian &H, const Hamiltonian &S, double tol = 1e-14,
                                   LieReport *report = nullptr);

// The same series without the k = 0 term, summed on its own so that small
// corrections do not lose digits against H.
Hamiltonian lie_increment_adaptive(const Hamiltonian &H, const Hamiltonian &S, double tol = 1e-14,
                                   LieReport *report = nullptr);

// |S|_{r+rho,p} <= rho / (16 e (r + rho))
bool lie_generator_admissible(const Hamiltonian &S, double r, double rho, double p);

// D(omega) = sum omega_j |u_j|^2
Hamiltonian diagonal(const std::map<int, double> &omega, const HamParams &params);

// sum_j (j^2 + V_j)|u_j|^2 - (1/2pi) int F(|u|^2) dx with F(y) = sum_d f_d y^{d+1}/(d+1).
// Refuses (std::length_error) when the monomial count would exceed ceiling.
Hamiltonian build_nls(const std::vector<std::pair<int, double>> &fcoeffs, const std::map<int, double> &V,
                      const HamParams &params, std::size_t ceiling = 2'000'000);
// Only the nonlinear part P.
Hamiltonian nls_nonlinearity(const std::vector<std::pair<int, double>> &fcoeffs, const HamParams &params,
                             std::size_t ceiling = 2'000'000);

// H(u, conj(u))
Complex evaluate(const Hamiltonian &H, const ModeSeq &u);
// X_H^{(j)}(u) = i dH/d(ubar_j), for |j| <= J
ModeSeq vector_field(const Hamiltonian &H, const ModeSeq &u);

// max |H_{ab} - conj(H_{ba})|
double reality_defect(const Hamiltonian &H);

// |H|_{r,p} over |H|_{r+rho,p} type quantities need the same monomials at
// another radius; this is just majorant_norm with a different r.
inline double norm_at(const Hamiltonian &H, double r)
{
    return majorant_norm(H, r, H.params().p);
}

} // namespace nlskam
