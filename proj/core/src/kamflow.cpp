#include <nlskam/errors.hpp>
#include <nlskam/hamops.hpp>
#include <nlskam/kamflow.hpp>
#include <nlskam/random.hpp>
#include <nlskam/smalldiv.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/zeta.hpp>
#include <fmt/format.h>

namespace nlskam
{

Schedules::Schedules(double r0, double p0, double rho, double delta, double eta)
    : r0_(r0), p0_(p0), rho_(rho), delta_(delta), eta_(eta)
{
    if (!(rho > 0 && rho < r0)) {
        throw std::invalid_argument("Schedules: need 0 < rho < r0");
    }
    if (!(delta > 0 && delta < 1)) {
        throw std::invalid_argument("Schedules: delta must lie in (0, 1)");
    }
    if (!(eta > 1 && eta <= 2)) {
        throw std::invalid_argument("Schedules: eta must lie in (1, 2]");
    }
    c_eta_ = 1.0 / (4.8 * boost::math::zeta((1.0 + eta) / 2.0));
}

double Schedules::rho(int n) const
{
    return rho_ / 6.0 * std::ldexp(1.0, -n);
}

double Schedules::delta(int n) const
{
    if (n == 0) {
        return delta_ / 8.0;
    }
    return c_eta_ * delta_ * std::pow(static_cast<double>(n), -(1.0 + eta_) / 2.0);
}

double Schedules::r(int n) const
{
    // sum_{k<n} 3 rho_k = rho (1 - 2^{-n})
    return r0_ - rho_ * (1.0 - std::ldexp(1.0, -n));
}

double Schedules::p(int n) const
{
    double p = p0_;
    for (int k = 0; k < n; ++k) {
        p += 3.0 * delta(k);
    }
    return p;
}

namespace
{

struct LowParts {
    Hamiltonian m2K, m2R, m1, zeroR;
    LambdaVector zeroK;
    Hamiltonian spill; // rounding residue of Pi^{>=1}
};

LowParts decompose_low(const Hamiltonian &low, const Torus &torus)
{
    auto s = split_low(low, torus);
    LowParts out;
    std::tie(out.m2K, out.m2R) = project_kernel(s.m2);
    auto [m1K, m1R] = project_kernel(s.m1);
    if (!m1K.empty()) {
        throw std::logic_error("Pi^{-1,K} must vanish: kernel monomials have even degree");
    }
    out.m1 = std::move(m1R);
    auto [zK, zR] = project_kernel(s.zero);
    out.zeroK = kernel_lambda(zK);
    out.zeroR = std::move(zR);
    out.spill = std::move(s.high);
    return out;
}

double eps_of(const LowParts &lp, double gamma, double r, double p)
{
    return (sup_abs(lp.zeroK) + majorant_norm(lp.zeroR, r, p) + majorant_norm(lp.m2R, r, p) +
            majorant_norm(lp.m1, r, p)) /
           gamma;
}

LambdaVector axpy(const LambdaVector &a, double s, const LambdaVector &b)
{
    LambdaVector out = a;
    for (const auto &[j, v] : b) {
        out[j] += s * v;
    }
    return out;
}

} // namespace

double eps_functional(const Hamiltonian &low, const Torus &torus, double gamma, double r, double p)
{
    return eps_of(decompose_low(low, torus), gamma, r, p);
}

KamState init_state(const Hamiltonian &H, const KamProblem &problem)
{
    const auto &sch = problem.schedules;
    const Hamiltonian D = diagonal(problem.omega.as_map(), H.params());
    const Hamiltonian G0 = H - D;
    auto s = split_low(G0, problem.torus);
    KamState st;
    st.G_low = s.m2 + s.m1 + s.zero;
    st.G_high = std::move(s.high);
    st.eps = eps_functional(st.G_low, problem.torus, problem.gamma, sch.r(0), sch.p(0));
    st.theta = majorant_norm(st.G_high, sch.r(0), sch.p(0)) / problem.gamma + st.eps;
    for (int j = -H.params().J; j <= H.params().J; ++j) {
        st.lambda[j] = 0.0;
    }
    StepDiagnostics d;
    d.eps = st.eps;
    d.theta = st.theta;
    st.trace.push_back(d);
    return st;
}

Hamiltonian apply_Ln(const KamState &state, const LambdaVector &h, const KamProblem &problem)
{
    const HamParams &params = state.G_high.params();
    Hamiltonian x = lambda_embed(h, problem.torus, params);
    Hamiltonian corr(params);
    for (const auto &S : state.gen_history) {
        Hamiltonian inc = lie_increment_adaptive(x, S, problem.lie_tol);
        x += inc;
        corr += inc;
    }
    return corr;
}

KamState kam_step(const KamState &state, const KamProblem &problem)
{
    const auto &torus = problem.torus;
    const auto &omega = problem.omega;
    const HamParams &params = state.G_high.params();
    const double gamma = problem.gamma;
    const int n = state.n;
    const auto floor = DivisorFloor::coupled(gamma, problem.sites, problem.tau);
    HomologicalMode mode{true, torus.sites()};
    auto Linv = [&](const Hamiltonian &F) { return solve_homological(F, omega, floor, mode); };

    TruncationReport trunc;
    const LowParts G = decompose_low(state.G_low, torus);
    const Hamiltonian high = state.G_high + G.spill;
    // Only terms with at most three normal letters can feed Pi^{<=0} of a
    // bracket; the chain below never needs the rest.
    const Hamiltonian high_low =
        high.filtered([&](const MonoKey &k) { return normal_letters(k, torus) <= 3; });

    StepDiagnostics diag;
    diag.n = n + 1;

    // chain(X2, X1) = Pi^{0,K}{A + B, G^{>=1}} with A = L^{-1} X2 and
    // B = L^{-1}(Pi^{-1}{A, G^{>=1}} + X1). Also returns Pi^{0,R} of the bracket.
    struct Chain {
        LambdaVector kernel;
        Hamiltonian zeroR;
        Hamiltonian A, B;
    };
    auto chain = [&](const Hamiltonian &X2, const Hamiltonian &X1) {
        Chain out{{}, Hamiltonian(params), Hamiltonian(params), Hamiltonian(params)};
        if (!X2.empty()) {
            out.A = Linv(X2);
        }
        Hamiltonian inner = X1;
        if (!out.A.empty()) {
            inner += project_degree(poisson(out.A, high_low, &trunc), -1, torus);
        }
        if (!inner.empty()) {
            out.B = Linv(inner);
        }
        const Hamiltonian AB = out.A + out.B;
        if (!AB.empty()) {
            auto [zK, zR] = project_kernel(project_degree(poisson(AB, high_low, &trunc), 0, torus));
            out.kernel = kernel_lambda(zK);
            out.zeroR = std::move(zR);
        }
        return out;
    };

    // M_n h = chain(Pi^{-2,R} L_n h, Pi^{-1} L_n h) + lambda(Pi^{0,K} L_n h)
    const bool has_history = !state.gen_history.empty();
    auto apply_M = [&](const LambdaVector &h) {
        if (!has_history) {
            return LambdaVector{};
        }
        const LowParts lp = decompose_low(apply_Ln(state, h, problem), torus);
        return axpy(chain(lp.m2R, lp.m1).kernel, 1.0, lp.zeroK);
    };

    // Contraction probes: random sign vectors, deterministic in n.
    if (has_history) {
        CounterRng rng(0x6b616d ^ static_cast<std::uint64_t>(n));
        for (int probe = 0; probe < 2; ++probe) {
            LambdaVector h;
            for (int j = -params.J; j <= params.J; ++j) {
                h[j] = rng.uniform(static_cast<std::uint64_t>(probe), static_cast<std::uint64_t>(j + params.J)) < 0.5
                           ? -1.0
                           : 1.0;
            }
            diag.m_norm = std::max(diag.m_norm, sup_abs(apply_M(h)));
        }
    }

    // rhs = -chain(G^{(-2,R)}, G^{(-1)}) - lambda(G^{(0,K)})
    const LambdaVector rhs = axpy(axpy(LambdaVector{}, -1.0, chain(G.m2R, G.m1).kernel), -1.0, G.zeroK);

    // Neumann series for (Id + M) x = rhs; successive ratios are contraction probes too.
    LambdaVector lam = rhs;
    LambdaVector term = rhs;
    const double scale = std::max(sup_abs(rhs), 1e-300);
    for (int k = 1; k <= problem.neumann_max && has_history; ++k) {
        const double prev = sup_abs(term);
        if (prev == 0) {
            break;
        }
        term = axpy(LambdaVector{}, -1.0, apply_M(term));
        diag.m_norm = std::max(diag.m_norm, sup_abs(term) / prev);
        if (diag.m_norm >= 1.0) {
            break;
        }
        lam = axpy(lam, 1.0, term);
        diag.neumann_terms = k;
        if (sup_abs(term) < problem.neumann_tol * scale) {
            break;
        }
    }
    if (diag.m_norm >= 1.0) {
        throw NumericalError(fmt::format("kam_step {}: measured |M_n h| / |h| = {} >= 1, the counter-term "
                                         "equation does not contract",
                                         n, diag.m_norm));
    }
    diag.counter_residual = sup_abs(axpy(axpy(lam, 1.0, apply_M(lam)), -1.0, rhs));
    diag.lambda_sup = sup_abs(lam);

    // L_n Lambda bar and its low projections.
    const Hamiltonian LnL = has_history ? apply_Ln(state, lam, problem) : Hamiltonian(params);
    const LowParts LnP = decompose_low(LnL, torus);

    // Triangular system for the generators.
    const Chain gen = chain(LnP.m2R + G.m2R, LnP.m1 + G.m1);
    const Hamiltonian S0_rhs = gen.zeroR + LnP.zeroR + G.zeroR;
    const Hamiltonian S0 = S0_rhs.empty() ? Hamiltonian(params) : Linv(S0_rhs);
    const Hamiltonian S = gen.A + gen.B + S0;

    const Hamiltonian Lambda_bar = lambda_embed(lam, torus, params);
    KamState next = state;
    next.n = n + 1;
    next.lambda = axpy(state.lambda, 1.0, lam);
    next.gen_history.push_back(S);

    const auto &sch = problem.schedules;
    // Y - G^{>=1} = G_low + Lambda bar + L_n Lambda bar
    const Hamiltonian Ysmall = state.G_low - G.spill + Lambda_bar + LnL;
    const Hamiltonian Z = apply_L(S, omega).scaled(-1.0);
    const Hamiltonian SG = poisson(S, high, &trunc);
    const Hamiltonian SY = poisson(S, Ysmall, &trunc);
    Hamiltonian W = Z + SG + SY;

    // Q = {S, Y - G^{>=1}} + sum_{h>=2} ad_S^{h-1} W / h!
    Hamiltonian Q = SY;
    Hamiltonian t = W;
    double q_scale = -1;
    for (int h = 2; h <= params.max_degree() + 1; ++h) {
        t = poisson(S, t, &trunc).scaled(1.0 / h);
        if (t.empty()) {
            break;
        }
        Q += t;
        // Successive terms shrink by a factor of order |S|; stop once they are
        // invisible against the first one.
        const double tn = majorant_norm(t, sch.r(n), sch.p(n));
        if (q_scale < 0) {
            q_scale = tn;
        } else if (tn <= 1e-17 * q_scale) {
            break;
        }
    }
    auto Qs = split_low(Q, torus);
    auto Xs = split_low(LnL + SG, torus);
    next.G_low = Qs.m2 + Qs.m1 + Qs.zero + G.m2K;
    next.G_high = high + Xs.high + Qs.high;

    // Direct check of the homological identity:
    // Pi^{<=0}(Z + {S, G^{>=1}} + Y) = G^{(-2,K)}.
    auto check = split_low(Z + SG + state.G_low + Lambda_bar + LnL, torus);
    Hamiltonian defect = check.m2 + check.m1 + check.zero - G.m2K;
    diag.homological_residual = eps_functional(defect, torus, gamma, sch.r(n), sch.p(n));
    diag.generator_norm = majorant_norm(S, sch.r(n), sch.p(n));
    next.dropped_mass = state.dropped_mass + trunc.dropped_mass;
    next.eps = eps_functional(next.G_low, torus, gamma, sch.r(n + 1), sch.p(n + 1));
    next.theta = majorant_norm(next.G_high, sch.r(n + 1), sch.p(n + 1)) / gamma + next.eps;
    diag.eps = next.eps;
    diag.theta = next.theta;
    diag.dropped_mass = next.dropped_mass;
    next.trace.push_back(diag);
    return next;
}

Hamiltonian conjugate(const Hamiltonian &H, const std::vector<Hamiltonian> &psi, double lie_tol)
{
    // H o Phi_{S_0} o ... o Phi_{S_{n-1}} = e^{S_{n-1}} ... e^{S_0} H
    Hamiltonian x = H;
    for (const auto &S : psi) {
        x += lie_increment_adaptive(x, S, lie_tol);
    }
    return x;
}

KamResult run_kam(const Hamiltonian &H, const Hamiltonian &N0, const KamProblem &problem, const RunOptions &opts)
{
    if (H.params().D != N0.params().D || H.params().J != N0.params().J) {
        throw std::invalid_argument("run_kam: H and N0 must share cutoffs");
    }
    const auto &params = H.params();
    if (problem.omega.cutoff() < params.J) {
        throw std::invalid_argument("run_kam: frequency vector shorter than the mode cutoff");
    }
    if (!(problem.torus.action_radius(problem.schedules.p0()) < problem.schedules.r0())) {
        throw std::invalid_argument(fmt::format("run_kam: actions lie outside I(p0, r0): radius {} >= r0 = {}",
                                                problem.torus.action_radius(problem.schedules.p0()),
                                                problem.schedules.r0()));
    }
    if (problem.check_frequencies) {
        const auto A = enumerate_A(params.J, params.max_degree(), problem.sites);
        const auto rep = check_diophantine(problem.omega, DiophParams(problem.gamma, problem.sites, problem.tau), A);
        if (!rep.pass) {
            throw NumericalError(fmt::format("run_kam: omega fails the Diophantine condition (worst ratio {})",
                                             rep.worst_ratio));
        }
    }

    const auto &sch = problem.schedules;
    KamResult res;
    const Hamiltonian D = diagonal(problem.omega.as_map(), params);
    res.eps_vs_N0 = majorant_norm(H - N0, sch.r(0), sch.p(0)) / problem.gamma;
    res.eps_vs_D = majorant_norm(D - N0, sch.r(0), sch.p(0)) / problem.gamma;

    KamState st = init_state(H, problem);
    if (!(std::pow(1 + st.theta, 5) * st.eps <= opts.smallness_gate)) {
        throw NumericalError(fmt::format("run_kam: smallness gate failed, (1 + theta_0)^5 eps_0 = {} > {}",
                                         std::pow(1 + st.theta, 5) * st.eps, opts.smallness_gate));
    }
    while (st.n < opts.max_steps && st.eps >= opts.tol) {
        KamState next = kam_step(st, problem);
        if (next.eps > st.eps) {
            std::ostringstream os;
            os << "run_kam: divergence at step " << next.n << "; trace (n, eps, theta):";
            for (const auto &d : next.trace) {
                os << fmt::format(" ({}, {:.3e}, {:.3e})", d.n, d.eps, d.theta);
            }
            throw NumericalError(os.str());
        }
        st = std::move(next);
    }
    res.converged = st.eps < opts.tol;
    res.psi = st.gen_history;
    res.lambda = st.lambda;
    res.trace = st.trace;

    HamBuilder nb(params);
    nb.add(D);
    nb.add(st.G_high);
    for (const auto &[k, c] : st.G_low.terms()) {
        if (k.degree() == 0) {
            nb.add(k, c);
        }
    }
    res.N = nb.build().with_norm_params(sch.r(st.n), sch.p(st.n));

    if (opts.check_conjugacy) {
        const Hamiltonian Hc = conjugate(H + lambda_embed(st.lambda, problem.torus, params), res.psi, 0.0);
        auto s = split_low(Hc - D, problem.torus);
        res.conjugacy_residual =
            eps_functional(s.m2 + s.m1 + s.zero, problem.torus, problem.gamma, sch.r(st.n), sch.p(st.n));
    }
    res.final_state = std::move(st);
    return res;
}

} // namespace nlskam
