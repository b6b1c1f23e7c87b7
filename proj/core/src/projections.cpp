#include <nlskam/projections.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace nlskam
{

Torus::Torus(std::vector<int> sites, ActionVector actions) : sites_(std::move(sites)), actions_(std::move(actions))
{
    std::sort(sites_.begin(), sites_.end());
    sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
    for (const auto &[s, I] : actions_) {
        if (!(I >= 0)) {
            throw std::invalid_argument(fmt::format("action I_{} = {} must be non-negative", s, I));
        }
        if (!is_tangential(s)) {
            throw std::invalid_argument(fmt::format("action given on non-tangential site {}", s));
        }
    }
}

bool Torus::is_tangential(int j) const
{
    return std::binary_search(sites_.begin(), sites_.end(), j);
}

double Torus::action(int s) const
{
    auto it = actions_.find(s);
    return it == actions_.end() ? 0.0 : it->second;
}

double Torus::action_radius(double p) const
{
    double m = 0;
    for (const auto &[s, I] : actions_) {
        m = std::max(m, I * std::pow(jjap(s), 2 * p));
    }
    return std::sqrt(m);
}

namespace
{

double binom(int n, int k)
{
    double b = 1;
    for (int q = 1; q <= k; ++q) {
        b = b * (n - k + q) / q;
    }
    return b;
}

double ipow(double x, int n)
{
    double r = 1;
    for (int q = 0; q < n; ++q) {
        r *= x;
    }
    return r;
}

struct ActionFactor {
    int s;
    int m;
    double I;
};

// Expands one monomial into its degree components. For each tangential s
// with m_s = min(alpha_s, beta_s) > 0,
//   |v_s|^{2m} = sum_{delta <= m} binom(m, delta) I^{m-delta} (|v_s|^2 - I)^delta
//   (|v_s|^2 - I)^delta = sum_{zeta <= delta} binom(delta, zeta) (-I)^{delta-zeta} |v_s|^{2 zeta}
// and the piece has degree 2|delta| + |a| + |b| - 2 (a, b: normal exponents).
// Pieces of degree above max_deg are skipped.
template <typename Sink>
void expand_degrees(const MonoKey &key, Complex c, const Torus &torus, Sink &&sink, int max_deg = 1 << 20)
{
    std::uint8_t base[max_letters];
    int nb = 0;
    int normal = 0;
    std::vector<ActionFactor> act;
    for (const auto &me : decode(key)) {
        int a = me.a, b = me.b;
        if (torus.is_tangential(me.j)) {
            const int m = std::min(a, b);
            if (m > 0) {
                act.push_back({me.j, m, torus.action(me.j)});
            }
            a -= m;
            b -= m;
        } else {
            normal += a + b;
        }
        for (int q = 0; q < a; ++q) {
            base[nb++] = MonoKey::u_letter(me.j);
        }
        for (int q = 0; q < b; ++q) {
            base[nb++] = MonoKey::ubar_letter(me.j);
        }
    }
    if (normal - 2 > max_deg) {
        return;
    }
    std::vector<int> zeta(act.size());
    // Recursive walk over (delta_s, zeta_s) per action factor.
    auto rec = [&](auto &&self, std::size_t t, int dsum, Complex coeff) -> void {
        if (t == act.size()) {
            std::uint8_t buf[max_letters];
            int n = nb;
            std::copy(base, base + nb, buf);
            for (std::size_t q = 0; q < act.size(); ++q) {
                for (int z = 0; z < zeta[q]; ++z) {
                    buf[n++] = MonoKey::u_letter(act[q].s);
                    buf[n++] = MonoKey::ubar_letter(act[q].s);
                }
            }
            std::sort(buf, buf + n);
            sink(2 * dsum + normal - 2, MonoKey::from_letters(buf, n), coeff);
            return;
        }
        const auto &f = act[t];
        for (int delta = 0; delta <= f.m && 2 * (dsum + delta) + normal - 2 <= max_deg; ++delta) {
            const double cd = binom(f.m, delta) * ipow(f.I, f.m - delta);
            if (cd == 0) {
                continue;
            }
            for (int z = 0; z <= delta; ++z) {
                const double cz = binom(delta, z) * ipow(-f.I, delta - z);
                if (cz == 0) {
                    continue;
                }
                zeta[t] = z;
                self(self, t + 1, dsum + delta, coeff * (cd * cz));
            }
        }
    };
    rec(rec, 0, 0, c);
}

} // namespace

int normal_letters(const MonoKey &k, const Torus &torus)
{
    int n = 0;
    for (int q = 0; q < max_letters && k.letters()[q] != 0xff; ++q) {
        n += torus.is_tangential(MonoKey::mode_of(k.letters()[q])) ? 0 : 1;
    }
    return n;
}

Hamiltonian project_degree(const Hamiltonian &H, int d, const Torus &torus)
{
    if (d < -2) {
        throw std::invalid_argument("project_degree: d must be >= -2");
    }
    HamBuilder b(H.params(), H.size());
    for (const auto &[k, c] : H.terms()) {
        expand_degrees(k, c, torus, [&](int deg, const MonoKey &key, Complex v) {
            if (deg == d) {
                b.add(key, v);
            }
        }, d);
    }
    return b.build();
}

std::map<int, Hamiltonian> split_by_degree(const Hamiltonian &H, const Torus &torus)
{
    std::map<int, HamBuilder> builders;
    for (const auto &[k, c] : H.terms()) {
        expand_degrees(k, c, torus, [&](int deg, const MonoKey &key, Complex v) {
            builders.try_emplace(deg, H.params()).first->second.add(key, v);
        });
    }
    std::map<int, Hamiltonian> out;
    for (auto &[d, b] : builders) {
        auto h = b.build();
        if (!h.empty()) {
            out.emplace(d, std::move(h));
        }
    }
    return out;
}

LowSplit split_low(const Hamiltonian &H, const Torus &torus)
{
    HamBuilder m2(H.params()), m1(H.params()), z0(H.params());
    for (const auto &[k, c] : H.terms()) {
        expand_degrees(k, c, torus, [&](int deg, const MonoKey &key, Complex v) {
            if (deg == -2) {
                m2.add(key, v);
            } else if (deg == -1) {
                m1.add(key, v);
            } else if (deg == 0) {
                z0.add(key, v);
            }
        }, 0);
    }
    LowSplit out{m2.build(), m1.build(), z0.build(), {}};
    out.high = H - out.m2 - out.m1 - out.zero;
    return out;
}

std::pair<Hamiltonian, Hamiltonian> project_kernel(const Hamiltonian &H)
{
    return {H.filtered([](const MonoKey &k) { return k.is_kernel(); }),
            H.filtered([](const MonoKey &k) { return !k.is_kernel(); })};
}

Hamiltonian lambda_embed(const LambdaVector &lambda, const Torus &torus, const HamParams &params)
{
    HamBuilder b(params);
    for (const auto &[j, l] : lambda) {
        if (l == 0) {
            continue;
        }
        b.add(MultiIndex{{j, 1}}, MultiIndex{{j, 1}}, l);
        if (torus.is_tangential(j)) {
            b.add(MultiIndex{}, MultiIndex{}, -l * torus.action(j));
        }
    }
    return b.build();
}

LambdaVector kernel_lambda(const Hamiltonian &zero_kernel)
{
    LambdaVector out;
    for (const auto &[k, c] : zero_kernel.terms()) {
        if (k.degree() == 2) {
            out[MonoKey::mode_of(k.letters()[0])] = c.real();
        }
    }
    return out;
}

double sup_abs(const LambdaVector &v)
{
    double m = 0;
    for (const auto &[j, x] : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

} // namespace nlskam
