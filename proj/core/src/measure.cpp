#include <nlskam/random.hpp>
#include <nlskam/smalldiv.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace nlskam
{

MeasureEstimate binomial_estimate(std::size_t failures, std::size_t samples)
{
    if (samples == 0) {
        throw std::invalid_argument("binomial_estimate: no samples");
    }
    constexpr double z = 1.96;
    const double n = static_cast<double>(samples);
    const double p = static_cast<double>(failures) / n;
    const double denom = 1 + z * z / n;
    const double centre = (p + z * z / (2 * n)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
    return {p, std::max(0.0, centre - half), std::min(1.0, centre + half), samples, failures};
}

namespace
{

struct Completion {
    std::vector<int> sites;
    std::map<int, double> base; // j^2 + V_j on normal modes, s^2 on tangential ones
};

Completion completion(const SiteSchedule &sched, int J, const std::map<int, double> &V_normal)
{
    Completion c;
    c.sites = gen_sites(sched, J);
    for (int j = -J; j <= J; ++j) {
        double w = static_cast<double>(j) * j;
        if (!std::binary_search(c.sites.begin(), c.sites.end(), j)) {
            auto it = V_normal.find(j);
            if (it != V_normal.end()) {
                w += it->second;
            }
        }
        c.base[j] = w;
    }
    return c;
}

} // namespace

MeasureEstimate measure_complement_mc(const DiophParams &params, int J, int lmax, std::size_t samples,
                                      std::uint64_t seed, const std::map<int, double> &V_normal, int threads)
{
    if (samples < 100) {
        throw std::invalid_argument("measure_complement_mc: need at least 100 samples");
    }
    const auto A = weigh(enumerate_A(J, lmax, params.schedule), params.schedule, params.tau);
    const auto comp = completion(params.schedule, J, V_normal);
    const CounterRng rng(seed);
    std::vector<char> failed(samples, 0);

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t n = begin; n < end; ++n) {
            auto w = comp.base;
            for (std::size_t t = 0; t < comp.sites.size(); ++t) {
                w[comp.sites[t]] += rng.uniform(t, n, -0.5, 0.5);
            }
            failed[n] = diophantine_ok(FrequencyVector(J, w), params.gamma, A) ? 0 : 1;
        }
    };
    threads = std::max(1, threads);
    if (threads == 1) {
        work(0, samples);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (samples + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const std::size_t b = std::min(samples, t * chunk);
            const std::size_t e = std::min(samples, b + chunk);
            pool.emplace_back(work, b, e);
        }
        for (auto &th : pool) {
            th.join();
        }
    }
    std::size_t fails = 0;
    for (char f : failed) {
        fails += f;
    }
    return binomial_estimate(fails, samples);
}

double measure_complement_grid(const DiophParams &params, int J, int lmax, int grid,
                               const std::map<int, double> &V_normal)
{
    const auto A = weigh(enumerate_A(J, lmax, params.schedule), params.schedule, params.tau);
    const auto comp = completion(params.schedule, J, V_normal);
    const auto nt = comp.sites.size();
    if (nt == 0 || nt > 2) {
        throw std::invalid_argument("measure_complement_grid: supports one or two tangential sites");
    }
    std::size_t fails = 0, total = 0;
    const int g2 = nt == 2 ? grid : 1;
    for (int a = 0; a < grid; ++a) {
        for (int b = 0; b < g2; ++b) {
            auto w = comp.base;
            w[comp.sites[0]] += -0.5 + (a + 0.5) / grid;
            if (nt == 2) {
                w[comp.sites[1]] += -0.5 + (b + 0.5) / grid;
            }
            fails += diophantine_ok(FrequencyVector(J, w), params.gamma, A) ? 0 : 1;
            ++total;
        }
    }
    return static_cast<double>(fails) / static_cast<double>(total);
}

double coperta_sum(int J, int lmax, const SiteSchedule &sched, double tau)
{
    double s = 0;
    for (const auto &l : enumerate_A(J, lmax, sched)) {
        s += td_weight(l, sched, tau);
    }
    return s;
}

double coperta_sum_bound(int J, const SiteSchedule &sched)
{
    double prod = 1;
    for (int s : gen_sites(sched, J)) {
        const double a = jap(site_index(sched, s).value());
        const double x = std::numbers::pi / a;
        prod *= x / std::tanh(x); // sum_{k in Z} 1 / (1 + a^2 k^2)
    }
    return 72 * (prod - 1);
}

SlabReport slab_measure_check(int n, const std::vector<double> &xi, int grid, std::uint64_t seed, int boxes)
{
    if (n < 1 || n > 3 || static_cast<int>(xi.size()) != n || std::abs(std::abs(xi.back()) - 1) > 0) {
        throw std::invalid_argument("slab_measure_check: need n in [1,3] and xi = (xi_hat, +-1)");
    }
    const CounterRng rng(seed);
    struct Box {
        double lo[3], hi[3];
    };
    std::vector<Box> E;
    for (int b = 0; b < boxes; ++b) {
        Box bx{};
        for (int i = 0; i < n; ++i) {
            const double c = rng.uniform(b, 2 * i, -0.25, 0.25);
            const double h = rng.uniform(b, 2 * i + 1, 0.005, 0.08);
            bx.lo[i] = std::max(-0.25, c - h);
            bx.hi[i] = std::min(0.25, c + h);
        }
        E.push_back(bx);
    }
    auto inside = [&](const double *x) {
        for (const auto &bx : E) {
            bool in = true;
            for (int i = 0; i < n && in; ++i) {
                in = x[i] >= bx.lo[i] && x[i] < bx.hi[i];
            }
            if (in) {
                return true;
            }
        }
        return false;
    };
    // Measure of E on the midpoint grid.
    SlabReport rep;
    const double h = 0.5 / grid;
    std::size_t count = 0, cells = 1;
    for (int i = 0; i < n; ++i) {
        cells *= static_cast<std::size_t>(grid);
    }
    for (std::size_t c = 0; c < cells; ++c) {
        double x[3];
        std::size_t rem = c;
        for (int i = 0; i < n; ++i) {
            x[i] = -0.25 + (static_cast<double>(rem % grid) + 0.5) * h;
            rem /= grid;
        }
        count += inside(x) ? 1 : 0;
    }
    rep.meas_E = static_cast<double>(count) * std::pow(h, n);

    // Lines y + t xi with y in {x_n = 0}: the t-measure inside E is the union
    // length of the per-box parameter intervals, computed exactly.
    auto line_measure = [&](const double *y) {
        std::vector<std::pair<double, double>> iv;
        for (const auto &bx : E) {
            double t0 = -1e300, t1 = 1e300;
            for (int i = 0; i < n; ++i) {
                if (xi[i] == 0) {
                    if (y[i] < bx.lo[i] || y[i] >= bx.hi[i]) {
                        t0 = 1;
                        t1 = 0;
                    }
                    continue;
                }
                double a = (bx.lo[i] - y[i]) / xi[i];
                double b = (bx.hi[i] - y[i]) / xi[i];
                if (a > b) {
                    std::swap(a, b);
                }
                t0 = std::max(t0, a);
                t1 = std::min(t1, b);
            }
            if (t1 > t0) {
                iv.emplace_back(t0, t1);
            }
        }
        std::sort(iv.begin(), iv.end());
        double len = 0, cur0 = 0, cur1 = -1e300;
        for (const auto &[a, b] : iv) {
            if (a > cur1) {
                if (cur1 > cur0) {
                    len += cur1 - cur0;
                }
                cur0 = a;
                cur1 = b;
            } else {
                cur1 = std::max(cur1, b);
            }
        }
        if (cur1 > cur0) {
            len += cur1 - cur0;
        }
        return len;
    };
    const int ly = n == 1 ? 1 : (n == 2 ? 8 * grid : 2 * grid);
    std::size_t ycells = 1;
    for (int i = 0; i + 1 < n; ++i) {
        ycells *= static_cast<std::size_t>(ly);
    }
    for (std::size_t c = 0; c < ycells; ++c) {
        double y[3] = {0, 0, 0};
        std::size_t rem = c;
        for (int i = 0; i + 1 < n; ++i) {
            const double ext = 0.25 * (1 + std::abs(xi[i]));
            y[i] = -ext + (static_cast<double>(rem % ly) + 0.5) * (2 * ext / ly);
            rem /= ly;
        }
        rep.delta_E = std::max(rep.delta_E, line_measure(y));
    }
    double xi2 = 0;
    for (double v : xi) {
        xi2 += v * v;
    }
    rep.bound = std::pow(2.0, 1 - n) * rep.delta_E * xi2;
    rep.grid_error = 2.0 / grid;
    rep.holds = rep.meas_E <= rep.bound + rep.grid_error;
    return rep;
}

} // namespace nlskam
