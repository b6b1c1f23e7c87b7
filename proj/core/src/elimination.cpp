#include <nlskam/errors.hpp>
#include <nlskam/kamflow.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace nlskam
{

Elimination eliminate_params(const LambdaFn &lambda_fn, const std::map<int, double> &nu0,
                             const std::map<int, double> &VSc, const ActionVector &I, double tol, int max_iter)
{
    auto square = [](int j) { return static_cast<double>(j) * j; };
    Elimination out;
    for (const auto &[j, v] : VSc) {
        out.Omega[j] = square(j) + v;
    }
    double prev_change = -1;
    LambdaVector lam = lambda_fn(nu0, out.Omega, I);
    for (int it = 1; it <= max_iter; ++it) {
        double change = 0;
        std::map<int, double> next;
        for (const auto &[j, v] : VSc) {
            const auto l = lam.find(j);
            const double w = square(j) + v - (l == lam.end() ? 0.0 : l->second);
            change = std::max(change, std::abs(w - out.Omega.at(j)));
            next[j] = w;
        }
        out.Omega = std::move(next);
        out.iterations = it;
        if (prev_change > 0) {
            const double ratio = change / prev_change;
            out.contraction = std::max(out.contraction, ratio);
            if (ratio >= 1.0 && change > tol) {
                throw NumericalError(
                    fmt::format("eliminate_params: fixed-point map does not contract (ratio {} at iteration {})",
                                ratio, it));
            }
        }
        if (change <= tol) {
            break;
        }
        if (it == max_iter) {
            throw NumericalError(fmt::format("eliminate_params: no convergence after {} iterations", max_iter));
        }
        prev_change = change;
        lam = lambda_fn(nu0, out.Omega, I);
    }
    lam = lambda_fn(nu0, out.Omega, I);
    double lam_sup = 0;
    for (const auto &[j, l] : lam) {
        lam_sup = std::max(lam_sup, std::abs(l));
    }
    for (const auto &[j, nu] : nu0) {
        const auto l = lam.find(j);
        out.VS[j] = nu + (l == lam.end() ? 0.0 : l->second) - square(j);
    }
    for (const auto &[j, v] : VSc) {
        if (std::abs(out.Omega.at(j) - square(j) - v) > 2 * lam_sup + tol) {
            out.bound_ok = false;
        }
    }
    return out;
}

namespace
{

double sup_distance(const std::vector<double> &a, const std::vector<double> &b)
{
    if (a.size() != b.size()) {
        throw std::invalid_argument("mcshane_extend: dimension mismatch");
    }
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a[i] - b[i]));
    }
    return d;
}

} // namespace

double mcshane_extend(const std::vector<std::pair<std::vector<double>, double>> &samples, double L,
                      const std::vector<double> &query, std::optional<double> clamp)
{
    if (samples.empty()) {
        throw std::invalid_argument("mcshane_extend: no samples");
    }
    if (!(L >= 0)) {
        throw std::invalid_argument("mcshane_extend: L must be nonnegative");
    }
    for (std::size_t a = 0; a < samples.size(); ++a) {
        for (std::size_t b = a + 1; b < samples.size(); ++b) {
            const double d = sup_distance(samples[a].first, samples[b].first);
            const double diff = std::abs(samples[a].second - samples[b].second);
            if (diff > L * d * (1 + 1e-12) + 1e-300) {
                throw std::invalid_argument(
                    fmt::format("mcshane_extend: samples {} and {} are not {}-Lipschitz compatible", a, b, L));
            }
        }
    }
    double best = INFINITY;
    for (const auto &[x, f] : samples) {
        best = std::min(best, f + L * sup_distance(query, x));
    }
    if (clamp) {
        best = std::clamp(best, -*clamp, *clamp);
    }
    return best;
}

} // namespace nlskam
