#include "random_ham.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlskam/smalldiv.hpp>

namespace nlskam::fixtures
{

Hamiltonian random_hamiltonian(const HamParams &params, std::uint64_t seed, std::uint64_t stream,
                               const RandomHamOptions &opts)
{
    const CounterRng rng(seed);
    HamBuilder b(params);
    const int J = params.J;
    const int max_half = params.D + 1;
    auto is_site = [&](int j) { return std::find(opts.sites.begin(), opts.sites.end(), j) != opts.sites.end(); };
    std::uint64_t idx = 0;
    std::size_t made = 0;
    auto draw = [&] { return rng.uniform(stream, idx++); };
    auto draw_mode = [&] { return static_cast<int>(std::floor(draw() * (2 * J + 1))) - J; };
    for (std::size_t attempt = 0; made < opts.terms && attempt < 200 * opts.terms + 1000; ++attempt) {
        const int n = opts.min_half_degree + static_cast<int>(draw() * (max_half - opts.min_half_degree + 1));
        MultiIndex alpha, beta;
        long long mom = 0;
        for (int q = 0; q < n; ++q) {
            const int j = draw_mode();
            alpha.add(j, 1);
            mom += j;
        }
        for (int q = 0; q + 1 < n; ++q) {
            const int j = draw_mode();
            beta.add(j, 1);
            mom -= j;
        }
        if (std::abs(mom) > J) {
            continue;
        }
        beta.add(static_cast<int>(mom), 1);
        if (opts.range_only && alpha == beta) {
            continue;
        }
        if (opts.max_normal >= 0) {
            int normal = 0;
            for (const auto &[j, e] : (alpha + beta).entries()) {
                normal += is_site(j) ? 0 : e;
            }
            if (normal > opts.max_normal) {
                continue;
            }
        }
        Complex c(opts.coeff_scale * (2 * draw() - 1), opts.coeff_scale * (2 * draw() - 1));
        if (opts.dyadic) {
            c = Complex(std::round(16 * c.real()), std::round(16 * c.imag())) / 16.0;
        }
        if (opts.real) {
            if (alpha == beta) {
                b.add(alpha, beta, c.real());
            } else {
                b.add(alpha, beta, c);
                b.add(beta, alpha, std::conj(c));
            }
        } else {
            b.add(alpha, beta, c);
        }
        ++made;
    }
    return b.build();
}

ModeSeq random_modes(int J, double scale, std::uint64_t seed, std::uint64_t stream)
{
    const CounterRng rng(seed);
    std::map<int, Complex> e;
    for (int j = -J; j <= J; ++j) {
        const auto k = static_cast<std::uint64_t>(2 * (j + J));
        e[j] = scale * Complex(rng.uniform(stream, k, -1, 1), rng.uniform(stream, k + 1, -1, 1));
    }
    return ModeSeq(J, e);
}

FrequencyVector random_omega(int J, std::uint64_t seed, std::uint64_t stream)
{
    const CounterRng rng(seed);
    std::map<int, double> V;
    for (int j = -J; j <= J; ++j) {
        V[j] = rng.uniform(stream, static_cast<std::uint64_t>(j + J), -0.25, 0.25);
    }
    return FrequencyVector::from_potential(J, V);
}

FrequencyVector random_diophantine_omega(int J, int lmax, double gamma, const SiteSchedule &sched,
                                         std::uint64_t seed, std::uint64_t stream, int *attempts)
{
    const auto A = weigh(enumerate_A(J, lmax, sched), sched, 1.5);
    for (int a = 0; a < 1000; ++a) {
        auto w = random_omega(J, seed, stream * 1000 + static_cast<std::uint64_t>(a));
        if (diophantine_ok(w, gamma, A)) {
            if (attempts) {
                *attempts = a + 1;
            }
            return w;
        }
    }
    throw std::runtime_error("random_diophantine_omega: no admissible draw in 1000 attempts");
}

ActionVector actions_with_radius(const std::vector<int> &sites, double radius, double p)
{
    ActionVector I;
    for (int s : sites) {
        const double amp = radius * std::pow(jjap(s), -p);
        I[s] = amp * amp;
    }
    return I;
}

} // namespace nlskam::fixtures

namespace nlskam::fixtures
{

FrequencyVector edge_diophantine_omega(int J, int lmax, double gamma, const SiteSchedule &sched,
                                       std::uint64_t seed, std::uint64_t stream, double margin)
{
    const auto raw = enumerate_A(J, lmax, sched);
    const auto A = weigh(raw, sched, 1.5);
    const CounterRng rng(seed ^ 0x5bd1e995ULL);
    const auto sites = gen_sites(sched, J);
    for (int a = 0; a < 2000; ++a) {
        const auto w0 = random_omega(J, seed, stream * 4000 + static_cast<std::uint64_t>(a));
        const auto pick = static_cast<std::size_t>(rng.uniform(stream, static_cast<std::uint64_t>(a)) * A.l.size());
        const IntVector &l = A.l[pick];
        int s = 0, ls = 0;
        for (const auto &[j, v] : l) {
            if (std::binary_search(sites.begin(), sites.end(), j)) {
                s = j;
                ls = v;
            }
        }
        if (ls == 0) {
            continue;
        }
        auto w = w0.as_map();
        const double dot = w0.dot(l);
        const double target = (dot >= 0 ? 1 : -1) * margin * gamma * A.td[pick];
        w[s] += (target - dot) / ls;
        if (std::abs(w[s] - static_cast<double>(s) * s) > 0.25) {
            continue;
        }
        const FrequencyVector out(J, w);
        if (diophantine_ok(out, gamma, A)) {
            return out;
        }
    }
    return FrequencyVector();
}

} // namespace nlskam::fixtures
