#include <nlskam/smalldiv.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace nlskam
{

FrequencyVector::FrequencyVector(int J, const std::map<int, double> &omega) : J_(J), w_(2 * J + 1)
{
    for (int j = -J; j <= J; ++j) {
        auto it = omega.find(j);
        if (it == omega.end()) {
            throw std::invalid_argument(fmt::format("frequency vector misses mode {}", j));
        }
        const double dev = it->second - static_cast<double>(j) * j;
        if (!(std::abs(dev) < 0.5)) {
            throw std::invalid_argument(fmt::format("|omega_{} - {}^2| = {} is not < 1/2", j, j, std::abs(dev)));
        }
        w_[j + J] = it->second;
    }
}

FrequencyVector FrequencyVector::from_potential(int J, const std::map<int, double> &V)
{
    std::map<int, double> w;
    for (int j = -J; j <= J; ++j) {
        auto it = V.find(j);
        w[j] = static_cast<double>(j) * j + (it == V.end() ? 0.0 : it->second);
    }
    return FrequencyVector(J, w);
}

std::map<int, double> FrequencyVector::as_map() const
{
    std::map<int, double> m;
    for (int j = -J_; j <= J_; ++j) {
        m[j] = w_[j + J_];
    }
    return m;
}

double FrequencyVector::dot(const IntVector &l) const
{
    double s = 0;
    for (const auto &[j, v] : l) {
        s += v * (*this)(j);
    }
    return s;
}

double FrequencyVector::divisor(const MonoKey &k) const
{
    double s = 0;
    for (const auto &me : decode(k)) {
        s += (me.a - me.b) * (*this)(me.j);
    }
    return s;
}

DiophParams::DiophParams(double gamma_, SiteSchedule schedule_, double tau_)
    : gamma(gamma_), schedule(std::move(schedule_)), tau(tau_)
{
    if (!(gamma > 0 && gamma <= 1)) {
        throw std::invalid_argument("gamma must lie in (0, 1]");
    }
    if (!(tau > 1)) {
        throw std::invalid_argument("tau must be > 1");
    }
}

int abs_sum(const IntVector &l)
{
    int s = 0;
    for (const auto &[j, v] : l) {
        s += std::abs(v);
    }
    return s;
}

int mass(const IntVector &l)
{
    int s = 0;
    for (const auto &[j, v] : l) {
        s += v;
    }
    return s;
}

long long momentum(const IntVector &l)
{
    long long s = 0;
    for (const auto &[j, v] : l) {
        s += static_cast<long long>(j) * v;
    }
    return s;
}

long long quad_moment(const IntVector &l)
{
    long long s = 0;
    for (const auto &[j, v] : l) {
        s += static_cast<long long>(j) * j * v;
    }
    return s;
}

double td_weight(const IntVector &l, const SiteSchedule &sched, double tau)
{
    double w = 1;
    for (const auto &[s, v] : l) {
        if (v == 0) {
            continue;
        }
        if (auto i = site_index(sched, s)) {
            const double a = jap(*i);
            w *= std::pow(1.0 + static_cast<double>(v) * v * a * a, -tau);
        }
    }
    return w;
}

std::vector<IntVector> enumerate_A(int J, int lmax, const SiteSchedule &sched)
{
    if (lmax < 2) {
        throw std::invalid_argument("enumerate_A: lmax must be >= 2");
    }
    const auto sites = gen_sites(sched, J);
    std::vector<int> normal;
    for (int j = -J; j <= J; ++j) {
        if (!std::binary_search(sites.begin(), sites.end(), j)) {
            normal.push_back(j);
        }
    }
    // Normal parts with at most two units: 0, +-e_j, +-e_j +- e_k.
    std::vector<IntVector> normal_parts{{}};
    for (std::size_t a = 0; a < normal.size(); ++a) {
        for (int sa : {1, -1}) {
            normal_parts.push_back({{normal[a], sa}});
            for (std::size_t b = a; b < normal.size(); ++b) {
                for (int sb : {1, -1}) {
                    if (b == a && sb != sa) {
                        continue;
                    }
                    if (b == a) {
                        normal_parts.push_back({{normal[a], 2 * sa}});
                    } else {
                        normal_parts.push_back({{normal[a], sa}, {normal[b], sb}});
                    }
                }
            }
        }
    }
    std::vector<IntVector> out;
    IntVector tang;
    auto visit = [&](auto &&self, std::size_t t, int used) -> void {
        if (t == sites.size()) {
            const int m = mass(tang);
            const long long pi = momentum(tang);
            const long long q = quad_moment(tang);
            for (const auto &np : normal_parts) {
                const int units = abs_sum(np);
                if (used + units == 0 || used + units > lmax) {
                    continue;
                }
                if (m + mass(np) != 0 || pi + momentum(np) != 0) {
                    continue;
                }
                if (std::llabs(q + quad_moment(np)) >= used + units) {
                    continue;
                }
                IntVector l = tang;
                l.insert(np.begin(), np.end());
                out.push_back(std::move(l));
            }
            return;
        }
        for (int v = -(lmax - used); v <= lmax - used; ++v) {
            if (v != 0) {
                tang[sites[t]] = v;
            }
            self(self, t + 1, used + std::abs(v));
            tang.erase(sites[t]);
        }
    };
    visit(visit, 0, 0);
    std::sort(out.begin(), out.end());
    return out;
}

WeightedSet weigh(const std::vector<IntVector> &A, const SiteSchedule &sched, double tau)
{
    WeightedSet w;
    w.l = A;
    w.td.reserve(A.size());
    for (const auto &l : A) {
        w.td.push_back(td_weight(l, sched, tau));
    }
    return w;
}

bool diophantine_ok(const FrequencyVector &omega, double gamma, const WeightedSet &A)
{
    for (std::size_t q = 0; q < A.l.size(); ++q) {
        const double d = std::abs(omega.dot(A.l[q]));
        if (d < exact_resonance_floor || d < gamma * A.td[q]) {
            return false;
        }
    }
    return true;
}

DiophantineReport check_diophantine(const FrequencyVector &omega, const DiophParams &params,
                                    const std::vector<IntVector> &A)
{
    DiophantineReport rep;
    rep.worst_ratio = std::numeric_limits<double>::infinity();
    for (const auto &l : A) {
        const double d = std::abs(omega.dot(l));
        const double ratio = d / (params.gamma * td_weight(l, params.schedule, params.tau));
        if (ratio < rep.worst_ratio) {
            rep.worst_ratio = ratio;
            rep.worst_l = l;
        }
        if (d < exact_resonance_floor || ratio < 1.0) {
            rep.pass = false;
            ++rep.violations;
        }
    }
    return rep;
}

std::vector<int> nhat(const MultiIndex &v)
{
    if (v.empty()) {
        throw std::invalid_argument("nhat: empty multi-index");
    }
    std::vector<int> out;
    for (const auto &[j, e] : v.entries()) {
        const int h = std::max(1, std::abs(j));
        out.insert(out.end(), e, h);
    }
    std::sort(out.rbegin(), out.rend());
    return out;
}

std::vector<int> sigma_assign(const MultiIndex &alpha, const MultiIndex &beta)
{
    if (alpha.total() != beta.total() || alpha.total() < 1 || momentum(alpha, beta) != 0) {
        throw std::invalid_argument("sigma_assign: need |alpha| = |beta| >= 1 and zero momentum");
    }
    const auto n = nhat(alpha + beta);
    // Budget of +1 signs per value h (the remaining copies of h > 1 get -1;
    // for h = 1 the copies coming from mode 0 get 0).
    std::map<int, int> plus, minus;
    for (const auto &[j, e] : alpha.entries()) {
        (j > 0 ? plus : (j < 0 ? minus : plus))[std::max(1, std::abs(j))] += (j == 0 ? 0 : e);
    }
    for (const auto &[j, e] : beta.entries()) {
        (j < 0 ? plus : (j > 0 ? minus : plus))[std::max(1, std::abs(j))] += (j == 0 ? 0 : e);
    }
    std::vector<int> sigma(n.size(), 0);
    for (std::size_t l = 0; l < n.size(); ++l) {
        const int h = n[l];
        if (plus[h] > 0) {
            sigma[l] = 1;
            --plus[h];
        } else if (minus[h] > 0) {
            sigma[l] = -1;
            --minus[h];
        }
    }
    return sigma;
}

std::vector<std::pair<int, int>> mlist(const IntVector &u)
{
    std::vector<std::pair<int, int>> out;
    for (const auto &[j, v] : u) {
        if (j == 0 || v == 0) {
            continue;
        }
        for (int c = 0; c < std::abs(v); ++c) {
            out.emplace_back(j, v > 0 ? 1 : -1);
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const auto &x, const auto &y) {
        if (std::abs(x.first) != std::abs(y.first)) {
            return std::abs(x.first) > std::abs(y.first);
        }
        return x.first > y.first;
    });
    return out;
}

std::pair<double, double> luchino_lhs_rhs(const std::vector<double> &x)
{
    if (x.empty()) {
        throw std::invalid_argument("luchino_lhs_rhs: empty list");
    }
    double sum = 0, prod = 1;
    for (std::size_t l = 0; l < x.size(); ++l) {
        if (x[l] < 2 || (l > 0 && x[l] > x[l - 1])) {
            throw std::invalid_argument("luchino_lhs_rhs: list must be decreasing with entries >= 2");
        }
        sum += x[l];
        prod *= std::sqrt(x[l]);
    }
    return {sum / prod, std::sqrt(x[0]) + 4 / std::sqrt(x[0])};
}

bool divisor_condition(const MultiIndex &alpha, const MultiIndex &beta)
{
    std::map<int, int> d;
    for (const auto &[j, e] : alpha.entries()) {
        d[j] += e;
    }
    for (const auto &[j, e] : beta.entries()) {
        d[j] -= e;
    }
    long long q = 0;
    long long l1 = 0;
    for (const auto &[j, v] : d) {
        q += static_cast<long long>(v) * j * j;
        l1 += std::abs(v);
    }
    return std::llabs(q) < 2 * l1;
}

bool in_M_j(const MultiIndex &alpha, const MultiIndex &beta, int j, const std::vector<int> &sites)
{
    if (alpha == beta || alpha[j] + beta[j] == 0) {
        return false;
    }
    int normal = 0;
    for (const auto *idx : {&alpha, &beta}) {
        for (const auto &[s, e] : idx->entries()) {
            if (!std::binary_search(sites.begin(), sites.end(), s)) {
                normal += e;
            }
        }
    }
    return normal <= 2;
}

std::pair<double, double> site_weight_sides(const MultiIndex &alpha, const MultiIndex &beta, int j)
{
    double lhs = jjap(j) * jjap(j);
    for (const auto *idx : {&alpha, &beta}) {
        for (const auto &[s, e] : idx->entries()) {
            lhs /= std::pow(jjap(s), e);
        }
    }
    const auto n = nhat(alpha + beta);
    double rhs = 3;
    for (std::size_t l = 2; l < n.size(); ++l) {
        rhs /= std::sqrt(jjap(n[l]));
    }
    return {lhs, rhs};
}

std::pair<double, double> mlist_bound_sides(const MultiIndex &alpha, const MultiIndex &beta)
{
    IntVector diff;
    for (const auto &[j, e] : alpha.entries()) {
        diff[j] += e;
    }
    for (const auto &[j, e] : beta.entries()) {
        diff[j] -= e;
    }
    const auto m = mlist(diff);
    const auto n = nhat(alpha + beta);
    double rhs = 0;
    for (std::size_t l = 2; l < n.size(); ++l) {
        rhs += static_cast<double>(n[l]) * n[l];
    }
    return {m.empty() ? 0.0 : static_cast<double>(std::abs(m.front().first)), 31 * rhs};
}

namespace
{

double log_jjap_site(const SiteSchedule &sched, int i)
{
    // s(i) >= 1; jjap(s) = max(2, s).
    const long double ls = sched.primary.log_s(i);
    return static_cast<double>(std::max(ls, std::log(2.0L)));
}

} // namespace

double a_k_value(const std::map<int, int> &k, double delta, const SiteSchedule &sched)
{
    if (!(delta > 0 && delta < 1)) {
        throw std::invalid_argument("a_k_value: delta must lie in (0, 1)");
    }
    double s = 0;
    for (const auto &[i, ki] : k) {
        if (ki < 1) {
            continue;
        }
        const double a = jap(i);
        s += -(delta / 9) * ki * log_jjap_site(sched, i) + std::log1p(a * a * static_cast<double>(ki) * ki);
    }
    return s;
}

double a_k_sup(double delta, const SiteSchedule &sched, int i_limit)
{
    if (!(delta > 0 && delta < 1)) {
        throw std::invalid_argument("a_k_sup: delta must lie in (0, 1)");
    }
    const double c = delta / 9;
    double total = 0;
    for (int i = 0; i <= i_limit; ++i) {
        const double L = log_jjap_site(sched, i);
        const double a = jap(i);
        auto f = [&](double k) { return -c * k * L + std::log1p(a * a * k * k); };
        // f is increasing while 2 a^2 k / (1 + a^2 k^2) > cL, then decreasing.
        const double kstar = std::max(1.0, std::ceil(2.0 / (c * L)) + 1);
        double best = 0;
        for (double kk = 1; kk <= kstar; kk += 1) {
            best = std::max(best, f(kk));
        }
        total += best;
        if (c * L > 2 && f(1) < 0) {
            break; // every later index is non-positive as well
        }
    }
    return total;
}

} // namespace nlskam
