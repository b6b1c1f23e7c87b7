#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include <nlskam/frequency.hpp>
#include <nlskam/hamiltonian.hpp>
#include <nlskam/homological.hpp>
#include <nlskam/projections.hpp>
#include <nlskam/sites.hpp>

namespace nlskam
{

// Radii, weights and their decrements for the iteration:
// rho_n = (rho/6) 2^{-n}, delta_0 = delta/8, delta_n = c_eta delta n^{-(1+eta)/2},
// r_{n+1} = r_n - 3 rho_n, p_{n+1} = p_n + 3 delta_n.
class Schedules
{
public:
    static constexpr double chi = 1.5;

    Schedules(double r0, double p0, double rho, double delta, double eta);

    double r(int n) const;
    double p(int n) const;
    double rho(int n) const;
    double delta(int n) const;
    double c_eta() const noexcept { return c_eta_; }

    double r0() const noexcept { return r0_; }
    double p0() const noexcept { return p0_; }
    double rho_total() const noexcept { return rho_; }
    double delta_total() const noexcept { return delta_; }
    double eta() const noexcept { return eta_; }

private:
    double r0_, p0_, rho_, delta_, eta_, c_eta_;
};

// Everything a step needs besides the state.
struct KamProblem {
    FrequencyVector omega;
    Torus torus;
    double gamma = 1e-2;
    SiteSchedule sites;
    double tau = 1.5;
    Schedules schedules;
    double neumann_tol = 1e-13;
    int neumann_max = 200;
    double lie_tol = 1e-14;
    // Upfront Diophantine check of omega over A(J, 2D+2) at the coupled floor.
    bool check_frequencies = true;
};

struct StepDiagnostics {
    int n = 0;
    double eps = 0;
    double theta = 0;
    double lambda_sup = 0;       // sup |lambda bar_n|
    double m_norm = 0;           // largest measured |M_n h|_inf / |h|_inf
    int neumann_terms = 0;
    double counter_residual = 0; // sup |(Id + M_n) lambda bar - rhs|
    double homological_residual = 0;
    double generator_norm = 0;   // |S_n|_{r_n, p_n}
    double dropped_mass = 0;
};

struct KamState {
    int n = 0;
    // G = G_low + G_high with G_low = Pi^{<=0} G and G_high = Pi^{>=1} G kept
    // apart, so the small part is never computed as a difference of large ones.
    Hamiltonian G_low;
    Hamiltonian G_high;
    LambdaVector lambda;
    std::vector<Hamiltonian> gen_history;
    double eps = 0;
    double theta = 0;
    double dropped_mass = 0;
    std::vector<StepDiagnostics> trace;

    Hamiltonian G() const { return G_low + G_high; }
};

// gamma^{-1}(sup|lambda(Pi^{0,K})| + |Pi^{0,R}| + |Pi^{-2}| + |Pi^{-1}|) at (r, p)
double eps_functional(const Hamiltonian &low, const Torus &torus, double gamma, double r, double p);

// G_0 = H - D(omega) split into low and high parts; eps_0, theta_0 at (r_0, p_0).
KamState init_state(const Hamiltonian &H, const KamProblem &problem);

// L_n h = e^{S_{n-1}} ... e^{S_0} Lambda_h - Lambda_h, summed without forming the difference.
Hamiltonian apply_Ln(const KamState &state, const LambdaVector &h, const KamProblem &problem);

// Throws SmallDivisorError, or NumericalError when |M_n|_inf >= 1.
KamState kam_step(const KamState &state, const KamProblem &problem);

struct KamResult {
    std::vector<Hamiltonian> psi; // S_0 .. S_{n-1}
    LambdaVector lambda;
    Hamiltonian N;
    std::vector<StepDiagnostics> trace;
    KamState final_state;
    // Initial smallness measured against N0 and against D(omega).
    double eps_vs_N0 = 0;
    double eps_vs_D = 0;
    // eps_functional of (H + Lambda) o Psi - D(omega), recomputed from scratch.
    double conjugacy_residual = 0;
    bool converged = false;
};

struct RunOptions {
    int max_steps = 8;
    double tol = 1e-12;
    bool check_conjugacy = true;
    // Refuse to start unless (1 + theta_0)^5 eps_0 <= smallness_gate.
    double smallness_gate = 1.0;
};

// Throws NumericalError when the smallness gate fails or eps_{n+1} > eps_n;
// the message carries the trace. The torus must lie in I(p_0, r_0).
KamResult run_kam(const Hamiltonian &H, const Hamiltonian &N0, const KamProblem &problem, const RunOptions &opts);

// H o Psi with Psi = Phi_{S_0} o ... o Phi_{S_{n-1}}, via Lie series
// (lie_tol = 0 sums each series until it terminates at the degree cutoff).
Hamiltonian conjugate(const Hamiltonian &H, const std::vector<Hamiltonian> &psi, double lie_tol = 1e-14);

// Counter-term as a function of (nu on S, Omega on S^c, I).
using LambdaFn = std::function<LambdaVector(const std::map<int, double> &nu, const std::map<int, double> &Omega,
                                            const ActionVector &I)>;

struct Elimination {
    std::map<int, double> Omega; // normal frequencies
    std::map<int, double> VS;    // potential on the tangential sites
    int iterations = 0;
    double contraction = 0;      // largest observed ratio of successive updates
    bool bound_ok = true;        // |Omega_j - j^2 - V_j| <= 2 sup|lambda|
};

// Solves Omega_j + lambda_j(nu, Omega, I) = j^2 + V_j on S^c by fixed point, then
// V_S,j = nu_j + lambda_j - j^2. Throws NumericalError on non-contraction.
Elimination eliminate_params(const LambdaFn &lambda_fn, const std::map<int, double> &nu0,
                             const std::map<int, double> &VSc, const ActionVector &I, double tol = 1e-14,
                             int max_iter = 200);

// inf_k (f_k + L |x - x_k|_inf), optionally clamped to [-M, M].
// Throws std::invalid_argument when two samples violate the L-Lipschitz bound.
double mcshane_extend(const std::vector<std::pair<std::vector<double>, double>> &samples, double L,
                      const std::vector<double> &query, std::optional<double> clamp = std::nullopt);

} // namespace nlskam
