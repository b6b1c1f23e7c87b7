#include <nlskam/hamops.hpp>
#include <nlskam/kamflow.hpp>
#include <nlskam/synth.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nlskam
{

namespace
{

constexpr double two_pi_hi = 6.283185307179586;
constexpr double two_pi_lo = 2.4492935982947064e-16;
constexpr double two_pi = 2 * std::numbers::pi;

using Dense = std::vector<Complex>;

Dense to_dense(const ModeSeq &u, int J)
{
    Dense d(static_cast<std::size_t>(2 * J + 1));
    for (const auto &[j, v] : u.entries()) {
        d[static_cast<std::size_t>(j + J)] = v;
    }
    return d;
}

ModeSeq from_dense(const Dense &d, int J)
{
    std::map<int, Complex> m;
    for (int j = -J; j <= J; ++j) {
        m[j] = d[static_cast<std::size_t>(j + J)];
    }
    return ModeSeq(J, m);
}

double sup_abs(const Dense &d)
{
    double m = 0;
    for (const auto &v : d) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

} // namespace

double wrap_phase(double nu, double t)
{
    const double p = nu * t;
    const double e = std::fma(nu, t, -p);
    const double k = std::floor(p / two_pi_hi);
    double r = std::fma(-k, two_pi_hi, p);
    r -= k * two_pi_lo;
    r += e;
    while (r < 0) {
        r += two_pi;
    }
    while (r >= two_pi) {
        r -= two_pi;
    }
    return r;
}

double circle_distance(double a, double b)
{
    double d = std::fmod(std::abs(a - b), two_pi);
    return std::min(d, two_pi - d);
}

ModeSeq torus_point(const ActionVector &I, const PhaseMap &phi, int J)
{
    std::map<int, Complex> m;
    for (const auto &[j, phase] : phi) {
        if (I.find(j) == I.end()) {
            throw std::invalid_argument("torus_point: phase given outside the support of I");
        }
        (void)phase;
    }
    for (const auto &[j, a] : I) {
        if (a < 0) {
            throw std::invalid_argument("torus_point: negative action");
        }
        auto it = phi.find(j);
        const double ph = it == phi.end() ? 0.0 : it->second;
        m[j] = std::polar(std::sqrt(a), ph);
    }
    return ModeSeq(J, m);
}

ModeSeq flow_generator(const Hamiltonian &S, const ModeSeq &u, int steps)
{
    if (steps < 1) {
        throw std::invalid_argument("flow_generator: steps must be positive");
    }
    const int J = u.cutoff();
    auto field = [&](const Dense &x) { return to_dense(vector_field(S, from_dense(x, J)), J); };
    Dense x = to_dense(u, J);
    const Dense x0 = field(x);
    if (sup_abs(x0) <= 1e-17 * sup_abs(x)) {
        return u;
    }
    const double h = 1.0 / steps;
    const std::size_t n = x.size();
    Dense tmp(n);
    for (int s = 0; s < steps; ++s) {
        const Dense k1 = s == 0 ? x0 : field(x);
        for (std::size_t i = 0; i < n; ++i) {
            tmp[i] = x[i] + 0.5 * h * k1[i];
        }
        const Dense k2 = field(tmp);
        for (std::size_t i = 0; i < n; ++i) {
            tmp[i] = x[i] + 0.5 * h * k2[i];
        }
        const Dense k3 = field(tmp);
        for (std::size_t i = 0; i < n; ++i) {
            tmp[i] = x[i] + h * k3[i];
        }
        const Dense k4 = field(tmp);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    return from_dense(x, J);
}

ModeSeq apply_psi(const std::vector<Hamiltonian> &psi, const ModeSeq &v, int steps)
{
    ModeSeq u = v;
    for (auto it = psi.rbegin(); it != psi.rend(); ++it) {
        u = flow_generator(*it, u, steps);
    }
    return u;
}

Complex mode_sum(const ModeSeq &u, double x)
{
    Complex s = 0;
    for (const auto &[j, v] : u.entries()) {
        s += v * std::polar(1.0, j * x);
    }
    return s;
}

SynthGrid synth_solution(const std::vector<Hamiltonian> &psi, const ActionVector &I, const PhaseMap &nu,
                         const std::vector<double> &t, const std::vector<double> &x, int J, int steps)
{
    SynthGrid g{t, x, {}};
    g.u.reserve(t.size() * x.size());
    for (double tt : t) {
        PhaseMap phi;
        for (const auto &[j, a] : I) {
            auto it = nu.find(j);
            phi[j] = it == nu.end() ? 0.0 : wrap_phase(it->second, tt);
            (void)a;
        }
        const ModeSeq u = apply_psi(psi, torus_point(I, phi, J), steps);
        for (double xx : x) {
            g.u.push_back(mode_sum(u, xx));
        }
    }
    return g;
}

double TestFunction::bump(double t) const
{
    const double s = (2 * t - t0 - t1) / (t1 - t0);
    if (std::abs(s) >= 1) {
        return 0;
    }
    return std::exp(-1.0 / (1 - s * s));
}

double TestFunction::bump_dt(double t) const
{
    const double s = (2 * t - t0 - t1) / (t1 - t0);
    if (std::abs(s) >= 1) {
        return 0;
    }
    const double q = 1 - s * s;
    return std::exp(-1.0 / q) * (-2 * s / (q * q)) * (2 / (t1 - t0));
}

Complex weak_residual(const ModeField &u, const std::map<int, double> &V,
                      const std::vector<std::pair<int, double>> &fcoeffs, const TestFunction &chi,
                      const Quadrature &quad)
{
    if (quad.nt < 2 || quad.nt % 2 != 0 || quad.nx < 1) {
        throw std::invalid_argument("weak_residual: nt must be even and positive, nx positive");
    }
    if (!(chi.t1 > chi.t0)) {
        throw std::invalid_argument("weak_residual: empty time support");
    }
    const int nx = quad.nx;
    std::vector<Complex> c(static_cast<std::size_t>(nx)), cxx(static_cast<std::size_t>(nx));
    std::vector<double> xs(static_cast<std::size_t>(nx));
    for (int m = 0; m < nx; ++m) {
        const double x = two_pi * m / nx;
        xs[static_cast<std::size_t>(m)] = x;
        for (const auto &[k, ck] : chi.modes) {
            const Complex e = ck * std::polar(1.0, k * x);
            c[static_cast<std::size_t>(m)] += e;
            cxx[static_cast<std::size_t>(m)] -= static_cast<double>(k) * k * e;
        }
    }
    const double h = (chi.t1 - chi.t0) / quad.nt;
    Complex total = 0;
    for (int i = 0; i <= quad.nt; ++i) {
        const double t = chi.t0 + i * h;
        const double b = chi.bump(t);
        const double bt = chi.bump_dt(t);
        if (b == 0 && bt == 0) {
            continue;
        }
        const ModeSeq us = u(t);
        std::map<int, Complex> vu;
        for (const auto &[j, v] : us.entries()) {
            auto it = V.find(j);
            if (it != V.end()) {
                vu[j] = it->second * v;
            }
        }
        Complex row = 0;
        for (int m = 0; m < nx; ++m) {
            const auto sm = static_cast<std::size_t>(m);
            Complex ux = 0, vx = 0;
            for (const auto &[j, v] : us.entries()) {
                ux += v * std::polar(1.0, j * xs[sm]);
            }
            for (const auto &[j, v] : vu) {
                vx += v * std::polar(1.0, j * xs[sm]);
            }
            const double y = std::norm(ux);
            double fy = 0;
            for (const auto &[d, fd] : fcoeffs) {
                fy += fd * std::pow(y, d);
            }
            row += (Complex(0, bt) * c[sm] + b * cxx[sm]) * ux - (vx - fy * ux) * b * c[sm];
        }
        const double w = (i == 0 || i == quad.nt) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        total += w * row / static_cast<double>(nx);
    }
    return total * h / 3.0;
}

std::string to_string(RegularityClass c)
{
    switch (c) {
    case RegularityClass::classical_capable:
        return "classical-capable";
    case RegularityClass::non_classical_witness:
        return "non-classical-witness";
    case RegularityClass::indeterminate:
        break;
    }
    return "indeterminate";
}

RegularityReport regularity_probe(const ActionVector &I, double p_star)
{
    std::vector<int> support;
    for (const auto &[j, a] : I) {
        if (a > 0) {
            support.push_back(j);
        }
    }
    std::sort(support.begin(), support.end(), [](int a, int b) {
        return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : a < b;
    });
    RegularityReport rep;
    if (support.empty()) {
        return rep;
    }
    auto g = [&](int j) { return static_cast<double>(j) * j * std::sqrt(I.at(j)); };
    const std::size_t n = support.size();
    const std::size_t tail = (n + 2) / 3;
    for (std::size_t q = n - tail; q < n; ++q) {
        rep.tail_stat = std::max(rep.tail_stat, g(support[q]));
    }
    rep.reference = g(support.front());
    if (n == 1) {
        rep.cls = RegularityClass::indeterminate;
    } else if (p_star > 3) {
        rep.cls = RegularityClass::classical_capable;
    } else if (p_star <= 2 && rep.tail_stat >= 0.5 * rep.reference && rep.tail_stat > 0) {
        rep.cls = RegularityClass::non_classical_witness;
    }
    return rep;
}

namespace
{

// Smallest T >= start with nu T = target (mod 2pi).
double next_alignment(double nu, double target, double start)
{
    const double d = std::fmod(std::fmod(target - wrap_phase(nu, start), two_pi) + two_pi, two_pi);
    if (nu > 0) {
        return start + d / nu;
    }
    return start + (d == 0 ? 0.0 : (two_pi - d) / -nu);
}

} // namespace

DensityReport density_check(const PhaseMap &nu, const PhaseMap &target, double deltatol, double horizon)
{
    std::vector<std::pair<int, double>> sites;
    for (const auto &[j, v] : nu) {
        if (v == 0) {
            throw std::invalid_argument("density_check: zero frequency");
        }
        if (target.find(j) == target.end()) {
            throw std::invalid_argument("density_check: missing target phase");
        }
        sites.emplace_back(j, v);
    }
    if (sites.empty()) {
        throw std::invalid_argument("density_check: no sites");
    }
    std::stable_sort(sites.begin(), sites.end(),
                     [](const auto &a, const auto &b) { return std::abs(a.second) < std::abs(b.second); });
    DensityReport rep;
    for (std::size_t k = 0; k + 1 < sites.size(); ++k) {
        double tail = 0;
        for (std::size_t l = k + 1; l < sites.size(); ++l) {
            tail += 1.0 / std::abs(sites[l].second);
        }
        rep.criterion_value = std::max(rep.criterion_value, std::abs(sites[k].second) * tail);
    }
    auto worst = [&](double t) {
        double m = 0;
        for (const auto &[j, v] : sites) {
            m = std::max(m, circle_distance(wrap_phase(v, t), target.at(j)));
        }
        return m;
    };

    const double period = two_pi / std::abs(sites.front().second);
    double base = next_alignment(sites.front().second, target.at(sites.front().first), 0.0);
    rep.max_distance = INFINITY;
    constexpr int max_candidates = 1'000'000;
    for (; base <= horizon && rep.candidates < max_candidates; base += period) {
        ++rep.candidates;
        double T = base;
        for (std::size_t k = 1; k < sites.size(); ++k) {
            T = next_alignment(sites[k].second, target.at(sites[k].first), T);
        }
        if (T > horizon) {
            break;
        }
        const double w = worst(T);
        rep.max_distance = std::min(rep.max_distance, w);
        if (w < deltatol) {
            // Walk back to where the trajectory entered the target box.
            double fast = 0;
            for (const auto &s : sites) {
                fast = std::max(fast, std::abs(s.second));
            }
            const double h = deltatol / (4 * fast);
            double inside = T;
            double outside = -1;
            while (inside > 0) {
                const double t = std::max(0.0, inside - h);
                if (worst(t) < deltatol) {
                    inside = t;
                } else {
                    outside = t;
                    break;
                }
            }
            if (outside >= 0) {
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (inside + outside);
                    (worst(mid) < deltatol ? inside : outside) = mid;
                }
            }
            rep.hit_time = inside;
            rep.max_distance = worst(inside);
            return rep;
        }
    }
    return rep;
}

double invariance_residual(const Hamiltonian &H_conj, const PhaseMap &nu, const ActionVector &I,
                           const std::vector<PhaseMap> &samples)
{
    const int J = H_conj.params().J;
    double res = 0;
    for (const auto &phi : samples) {
        const ModeSeq u = torus_point(I, phi, J);
        const ModeSeq X = vector_field(H_conj, u);
        for (int j = -J; j <= J; ++j) {
            auto it = nu.find(j);
            const Complex expect = it == nu.end() ? Complex(0) : Complex(0, it->second) * u[j];
            res = std::max(res, std::abs(X[j] - expect));
        }
    }
    return res;
}

double invariance_residual(const std::vector<Hamiltonian> &psi, const PhaseMap &nu, const ActionVector &I,
                           const Hamiltonian &H_total, const std::vector<PhaseMap> &samples)
{
    return invariance_residual(conjugate(H_total, psi, 0.0), nu, I, samples);
}

} // namespace nlskam
