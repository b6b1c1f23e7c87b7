#include <nlskam/hamops.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace nlskam
{

namespace
{

constexpr Complex I_unit{0.0, 1.0};

// u_p(r) on [-J, J], indexed by j + J.
std::vector<double> reference_table(int J, double r, double p)
{
    std::vector<double> u(2 * J + 1);
    for (int j = -J; j <= J; ++j) {
        u[j + J] = reference_entry(r, p, j);
    }
    return u;
}

double key_weight(const MonoKey &k, const std::vector<double> &u, int J)
{
    double w = 1;
    for (auto l : k.letters()) {
        if (l == MonoKey::pad) {
            break;
        }
        w *= u[MonoKey::mode_of(l) + J];
    }
    return w;
}

// Merge two sorted letter arrays and drop one u_j and one ubar_j.
int merge_drop(const MonoKey &f, int nf, const MonoKey &g, int ng, std::uint8_t uj, std::uint8_t ubj,
               std::uint8_t *out)
{
    const auto &a = f.letters();
    const auto &b = g.letters();
    int i = 0, k = 0, n = 0;
    bool dropped_u = false, dropped_ub = false;
    while (i < nf || k < ng) {
        std::uint8_t l;
        if (k >= ng || (i < nf && a[i] <= b[k])) {
            l = a[i++];
        } else {
            l = b[k++];
        }
        if (!dropped_u && l == uj) {
            dropped_u = true;
            continue;
        }
        if (!dropped_ub && l == ubj) {
            dropped_ub = true;
            continue;
        }
        out[n++] = l;
    }
    return n;
}

struct Partner {
    std::uint32_t idx;
    int deg;
    int e; // exponent of the shared mode
};

} // namespace

double majorant_norm(const Hamiltonian &H, double r, double p)
{
    const int J = H.params().J;
    const auto u = reference_table(J, r, p);
    std::vector<double> acc(2 * J + 1, 0.0);
    for (const auto &[k, c] : H.terms()) {
        const double w = std::abs(c) * key_weight(k, u, J);
        for (const auto &me : decode(k)) {
            const double uj = u[me.j + J];
            acc[me.j + J] += (me.a + me.b) * w / (uj * uj);
        }
    }
    double s = 0;
    for (double v : acc) {
        s = std::max(s, v);
    }
    return 0.5 * s;
}

Hamiltonian poisson(const Hamiltonian &F, const Hamiltonian &G, TruncationReport *report)
{
    if (F.params().D != G.params().D) {
        throw std::invalid_argument(
            fmt::format("poisson: degree cutoffs differ ({} vs {})", F.params().D, G.params().D));
    }
    HamParams params = F.params();
    params.J = std::max(F.params().J, G.params().J);
    const int J = params.J;
    const int maxdeg = params.max_degree();
    const auto u = reference_table(J, params.r, params.p);

    // Index G by shared mode: A[j] lists terms with alpha''_j > 0, B[j]
    // those with beta''_j > 0, both sorted by degree, with suffix masses so
    // that the truncated part can be accounted for without enumerating it.
    const auto &gt = G.terms();
    std::vector<std::vector<Partner>> A(2 * J + 1), B(2 * J + 1);
    std::vector<double> gw(gt.size());
    for (std::uint32_t t = 0; t < gt.size(); ++t) {
        const auto &k = gt[t].first;
        gw[t] = std::abs(gt[t].second) * key_weight(k, u, J);
        const int deg = k.degree();
        for (const auto &me : decode(k)) {
            if (me.a > 0) {
                A[me.j + J].push_back({t, deg, me.a});
            }
            if (me.b > 0) {
                B[me.j + J].push_back({t, deg, me.b});
            }
        }
    }
    std::vector<std::vector<double>> Amass(2 * J + 1), Bmass(2 * J + 1);
    auto prepare = [&](std::vector<Partner> &list, std::vector<double> &mass) {
        std::stable_sort(list.begin(), list.end(), [](const Partner &x, const Partner &y) { return x.deg < y.deg; });
        mass.assign(list.size() + 1, 0.0);
        for (std::size_t q = list.size(); q-- > 0;) {
            mass[q] = mass[q + 1] + list[q].e * gw[list[q].idx];
        }
    };
    for (int j = 0; j <= 2 * J; ++j) {
        prepare(A[j], Amass[j]);
        prepare(B[j], Bmass[j]);
    }

    HamBuilder out(params, F.size() * 4 + 16);
    TruncationReport trunc;
    std::uint8_t buf[2 * max_letters];
    for (const auto &[fk, fc] : F.terms()) {
        const int nf = fk.degree();
        const int lim = maxdeg + 2 - nf;
        const double fw = std::abs(fc) * key_weight(fk, u, J);
        for (const auto &me : decode(fk)) {
            const double uj2 = u[me.j + J] * u[me.j + J];
            for (int side = 0; side < 2; ++side) {
                const int e_f = side == 0 ? me.a : me.b;
                if (e_f == 0) {
                    continue;
                }
                // side 0: alpha'_j beta''_j enters with -i; side 1: beta'_j alpha''_j with +i.
                const auto &list = side == 0 ? B[me.j + J] : A[me.j + J];
                const auto &mass = side == 0 ? Bmass[me.j + J] : Amass[me.j + J];
                const Complex pref = (side == 0 ? -I_unit : I_unit) * static_cast<double>(e_f) * fc;
                std::size_t q = 0;
                for (; q < list.size() && list[q].deg <= lim; ++q) {
                    const auto &pt = list[q];
                    const auto &[gk, gc] = gt[pt.idx];
                    const int n = merge_drop(fk, nf, gk, pt.deg, MonoKey::u_letter(me.j), MonoKey::ubar_letter(me.j),
                                             buf);
                    out.add(MonoKey::from_letters(buf, n), pref * static_cast<double>(pt.e) * gc);
                }
                if (q < list.size()) {
                    trunc.dropped_terms += list.size() - q;
                    trunc.dropped_mass += e_f * fw * mass[q] / uj2;
                }
            }
        }
    }
    if (report != nullptr) {
        report->merge(trunc);
    }
    return out.build();
}

Hamiltonian lie_transform(const Hamiltonian &H, const Hamiltonian &S, int terms, LieReport *report)
{
    Hamiltonian result = H;
    Hamiltonian term = H;
    LieReport rep;
    for (int k = 1; k <= terms; ++k) {
        term = poisson(S, term, &rep.truncation).scaled(1.0 / k);
        rep.terms_used = k;
        if (term.empty()) {
            break;
        }
        result += term;
    }
    rep.last_term_norm = terms > 0 ? majorant_norm(term, H.params().r, H.params().p) : 0.0;
    if (report != nullptr) {
        *report = rep;
    }
    return result;
}

Hamiltonian lie_increment_adaptive(const Hamiltonian &H, const Hamiltonian &S, double tol, LieReport *report)
{
    Hamiltonian result(H.params());
    Hamiltonian term = H;
    LieReport rep;
    const int cap = H.params().max_degree();
    for (int k = 1; k <= cap; ++k) {
        term = poisson(S, term, &rep.truncation).scaled(1.0 / k);
        rep.terms_used = k;
        if (term.empty()) {
            rep.last_term_norm = 0;
            break;
        }
        result += term;
        rep.last_term_norm = majorant_norm(term, H.params().r, H.params().p);
        if (rep.last_term_norm < tol) {
            break;
        }
    }
    if (report != nullptr) {
        *report = rep;
    }
    return result;
}

Hamiltonian lie_transform_adaptive(const Hamiltonian &H, const Hamiltonian &S, double tol, LieReport *report)
{
    return H + lie_increment_adaptive(H, S, tol, report);
}

bool lie_generator_admissible(const Hamiltonian &S, double r, double rho, double p)
{
    return majorant_norm(S, r + rho, p) <= rho / (16.0 * std::numbers::e * (r + rho));
}

Hamiltonian diagonal(const std::map<int, double> &omega, const HamParams &params)
{
    HamBuilder b(params);
    for (const auto &[j, w] : omega) {
        b.add(MultiIndex{{j, 1}}, MultiIndex{{j, 1}}, w);
    }
    return b.build();
}

namespace
{

// Multisets of size n from [-J, J] as sorted mode lists.
void multisets(int J, int n, int lo, std::vector<int> &cur, std::vector<std::vector<int>> &out)
{
    if (static_cast<int>(cur.size()) == n) {
        out.push_back(cur);
        return;
    }
    for (int j = lo; j <= J; ++j) {
        cur.push_back(j);
        multisets(J, n, j, cur, out);
        cur.pop_back();
    }
}

double factorial(int n)
{
    double f = 1;
    for (int k = 2; k <= n; ++k) {
        f *= k;
    }
    return f;
}

} // namespace

Hamiltonian nls_nonlinearity(const std::vector<std::pair<int, double>> &fcoeffs, const HamParams &params,
                             std::size_t ceiling)
{
    const int J = params.J;
    HamBuilder b(params);
    for (const auto &[d, f] : fcoeffs) {
        if (d < 1) {
            throw std::invalid_argument(fmt::format("nonlinearity degree d={} must be >= 1", d));
        }
        if (d > params.D) {
            throw std::invalid_argument(
                fmt::format("nonlinearity degree d={} exceeds the degree cutoff D={}", d, params.D));
        }
        if (f == 0) {
            continue;
        }
        const int n = d + 1;
        std::vector<std::vector<int>> sets;
        std::vector<int> cur;
        multisets(J, n, -J, cur, sets);
        std::map<int, std::vector<std::size_t>> by_momentum;
        for (std::size_t q = 0; q < sets.size(); ++q) {
            int m = 0;
            for (int j : sets[q]) {
                m += j;
            }
            by_momentum[m].push_back(q);
        }
        std::size_t count = 0;
        for (const auto &[m, v] : by_momentum) {
            count += v.size() * v.size();
        }
        if (count > ceiling) {
            throw std::length_error(
                fmt::format("build_nls: {} monomials for d={} exceed the ceiling {}", count, d, ceiling));
        }
        // Each monomial collects the ordered tuples (j_1..j_n, k_1..k_n) that
        // sort to it: n!/prod alpha! * n!/prod beta! of them.
        const double base = -f / n * factorial(n) * factorial(n);
        std::vector<MultiIndex> idx(sets.size());
        std::vector<double> inv_fact(sets.size());
        for (std::size_t q = 0; q < sets.size(); ++q) {
            for (int j : sets[q]) {
                idx[q].add(j, 1);
            }
            double pf = 1;
            for (const auto &[j, e] : idx[q].entries()) {
                pf *= factorial(e);
            }
            inv_fact[q] = 1.0 / pf;
        }
        for (const auto &[m, v] : by_momentum) {
            for (auto qa : v) {
                for (auto qb : v) {
                    b.add(idx[qa], idx[qb], base * inv_fact[qa] * inv_fact[qb]);
                }
            }
        }
    }
    return b.build();
}

Hamiltonian build_nls(const std::vector<std::pair<int, double>> &fcoeffs, const std::map<int, double> &V,
                      const HamParams &params, std::size_t ceiling)
{
    std::map<int, double> omega;
    for (int j = -params.J; j <= params.J; ++j) {
        omega[j] = static_cast<double>(j) * j;
    }
    for (const auto &[j, v] : V) {
        if (std::abs(v) > 0.25) {
            throw std::invalid_argument(fmt::format("potential |V_{}| = {} exceeds 1/4", j, std::abs(v)));
        }
        if (j >= -params.J && j <= params.J) {
            omega[j] += v;
        }
    }
    return diagonal(omega, params) + nls_nonlinearity(fcoeffs, params, ceiling);
}

namespace
{

// u^alpha ubar^beta at u, skipping one ubar_skip factor when skip is set.
Complex monomial_value(const MonoKey &k, const ModeSeq &u, int skip_bar_mode, bool skip)
{
    Complex v = 1.0;
    bool skipped = false;
    for (auto l : k.letters()) {
        if (l == MonoKey::pad) {
            break;
        }
        const int j = MonoKey::mode_of(l);
        if (MonoKey::is_ubar(l)) {
            if (skip && !skipped && j == skip_bar_mode) {
                skipped = true;
                continue;
            }
            v *= std::conj(u[j]);
        } else {
            v *= u[j];
        }
        if (v == Complex{}) {
            return v;
        }
    }
    return v;
}

} // namespace

Complex evaluate(const Hamiltonian &H, const ModeSeq &u)
{
    Complex s = 0;
    for (const auto &[k, c] : H.terms()) {
        s += c * monomial_value(k, u, 0, false);
    }
    return s;
}

ModeSeq vector_field(const Hamiltonian &H, const ModeSeq &u)
{
    const int J = std::max(H.params().J, u.cutoff());
    std::vector<Complex> x(2 * J + 1, Complex{});
    for (const auto &[k, c] : H.terms()) {
        for (const auto &me : decode(k)) {
            if (me.b == 0) {
                continue;
            }
            x[me.j + J] += I_unit * c * static_cast<double>(me.b) * monomial_value(k, u, me.j, true);
        }
    }
    std::map<int, Complex> e;
    for (int j = -J; j <= J; ++j) {
        e[j] = x[j + J];
    }
    return ModeSeq(J, e);
}

double reality_defect(const Hamiltonian &H)
{
    double d = 0;
    for (const auto &[k, c] : H.terms()) {
        d = std::max(d, std::abs(c - std::conj(H.coeff(k.conjugate()))));
    }
    return d;
}

} // namespace nlskam
