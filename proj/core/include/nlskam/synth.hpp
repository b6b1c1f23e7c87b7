#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlskam/hamiltonian.hpp>
#include <nlskam/projections.hpp>
#include <nlskam/spaces.hpp>

namespace nlskam
{

using PhaseMap = std::map<int, double>;

// nu t reduced to [0, 2pi), keeping the rounding error of the product.
double wrap_phase(double nu, double t);
// Distance on the circle between two angles.
double circle_distance(double a, double b);

// u_j = sqrt(I_j) e^{i phi_j} on the support of I, zero elsewhere; modes in [-J, J].
ModeSeq torus_point(const ActionVector &I, const PhaseMap &phi, int J);

// Time-1 flow of X_S = i dS/d(ubar), RK4 with the given number of steps.
// Returns u unchanged when X_S(u) is below 1e-17 |u|.
ModeSeq flow_generator(const Hamiltonian &S, const ModeSeq &u, int steps = 16);

// Psi(v) = Phi_{S_0} o ... o Phi_{S_{n-1}}(v): S_{n-1} acts first.
ModeSeq apply_psi(const std::vector<Hamiltonian> &psi, const ModeSeq &v, int steps = 16);

// sum_j u_j e^{i j x}
Complex mode_sum(const ModeSeq &u, double x);

struct SynthGrid {
    std::vector<double> t;
    std::vector<double> x;
    std::vector<Complex> u; // row major: u[it * x.size() + ix]
};

// u(t, x) = Psi(v(t))(x) with v(t) = torus_point(I, nu t mod 2pi).
SynthGrid synth_solution(const std::vector<Hamiltonian> &psi, const ActionVector &I, const PhaseMap &nu,
                         const std::vector<double> &t, const std::vector<double> &x, int J, int steps = 16);

// chi(t, x) = b(t) sum_k c_k e^{ikx} with the bump
// b(t) = exp(-1 / (1 - s^2)), s = (2t - t0 - t1) / (t1 - t0), for t in (t0, t1).
struct TestFunction {
    double t0 = 0;
    double t1 = 1;
    std::map<int, Complex> modes;

    double bump(double t) const;
    double bump_dt(double t) const;
};

struct Quadrature {
    int nt = 256; // Simpson intervals over [t0, t1], even
    int nx = 256; // trapezoid nodes on [0, 2pi)
};

using ModeField = std::function<ModeSeq(double t)>;

// (1/2pi) int int (i chi_t + chi_xx) u - (V*u - f(|u|^2) u) chi dx dt, with
// f(y) = sum_d f_d y^d. V*u is applied in mode space, f(|u|^2) u pointwise.
Complex weak_residual(const ModeField &u, const std::map<int, double> &V,
                      const std::vector<std::pair<int, double>> &fcoeffs, const TestFunction &chi,
                      const Quadrature &quad);

enum class RegularityClass { classical_capable, non_classical_witness, indeterminate };
std::string to_string(RegularityClass c);

struct RegularityReport {
    double tail_stat = 0;
    double reference = 0; // j^2 sqrt(I_j) at the smallest |j| of the tail third
    RegularityClass cls = RegularityClass::indeterminate;
};

RegularityReport regularity_probe(const ActionVector &I, double p_star);

struct DensityReport {
    double criterion_value = 0;
    std::optional<double> hit_time;
    double max_distance = 0; // at hit_time, or the best candidate otherwise
    int candidates = 0;
};

// Looks for t in [0, horizon] with all |nu_j t - target_j| < deltatol (mod 2pi),
// following the constructive schedule: align the slowest site, then correct
// the faster ones in order of increasing |nu|.
DensityReport density_check(const PhaseMap &nu, const PhaseMap &target, double deltatol, double horizon);

// sup over phase samples and j of |X_{H o Psi}(u) - i nu_j u_j| at u = torus_point(I, phi).
double invariance_residual(const std::vector<Hamiltonian> &psi, const PhaseMap &nu, const ActionVector &I,
                           const Hamiltonian &H_total, const std::vector<PhaseMap> &samples);
// Same with H o Psi already computed.
double invariance_residual(const Hamiltonian &H_conj, const PhaseMap &nu, const ActionVector &I,
                           const std::vector<PhaseMap> &samples);

} // namespace nlskam
