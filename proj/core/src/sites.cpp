#include <nlskam/sites.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

namespace nlskam
{

namespace
{

// Above this, log s(i) is compared in floating point; below it, exactly.
constexpr long double exact_log_limit = 43.0L; // e^43 ~ 4.7e18 < 2^63

long double gevrey_exponent(int i, double eta)
{
    return std::pow(std::log(static_cast<long double>(i)), 1.0L + eta);
}

} // namespace

std::string to_string(SiteKind k)
{
    return k == SiteKind::power2 ? "power2" : "loggevrey";
}

std::string to_string(SiteVariant v)
{
    switch (v) {
        case SiteVariant::S1:
            return "S1";
        case SiteVariant::minus_S1:
            return "-S1";
        case SiteVariant::minus_S1_S0:
            return "-S1+S0";
        case SiteVariant::S1_S0:
            return "S1+S0";
        case SiteVariant::minus_S1_S2_S0:
            return "-S1+S2+S0";
    }
    return "?";
}

SiteKind parse_site_kind(const std::string &s)
{
    if (s == "power2") {
        return SiteKind::power2;
    }
    if (s == "loggevrey") {
        return SiteKind::loggevrey;
    }
    throw std::invalid_argument("unknown site kind '" + s + "'");
}

SiteVariant parse_site_variant(const std::string &s)
{
    for (auto v : {SiteVariant::S1, SiteVariant::minus_S1, SiteVariant::minus_S1_S0, SiteVariant::S1_S0,
                   SiteVariant::minus_S1_S2_S0}) {
        if (to_string(v) == s) {
            return v;
        }
    }
    throw std::invalid_argument("unknown site variant '" + s + "'");
}

SiteFunction::SiteFunction(SiteKind kind, double eta) : kind_(kind), eta_(eta)
{
    if (!(eta > 1.0 && eta <= 2.0)) {
        throw std::invalid_argument("eta must lie in (1,2]");
    }
    if (kind_ == SiteKind::loggevrey) {
        // Every value that fits in int64 is tabulated up front, so the object
        // stays immutable after construction.
        prefix_ = {1, 2};
        for (int k = 2; gevrey_exponent(k, eta_) < exact_log_limit; ++k) {
            const auto raw = static_cast<std::int64_t>(std::floor(std::exp(gevrey_exponent(k, eta_))));
            prefix_.push_back(std::max(raw, prefix_.back() + 1));
        }
    }
}

long double SiteFunction::log_s(int i) const
{
    if (i < 0) {
        throw std::domain_error("site index must be non-negative");
    }
    if (kind_ == SiteKind::power2) {
        return i * std::log(2.0L);
    }
    // Below the point where the raw formula overtakes s(i-1)+1, s is the
    // minimal strictly increasing continuation of the prefix 1, 2.
    if (i < static_cast<int>(prefix_.size())) {
        return std::log(static_cast<long double>(prefix_[i]));
    }
    return gevrey_exponent(i, eta_);
}

std::int64_t SiteFunction::s_of(int i) const
{
    if (i < 0) {
        throw std::domain_error("site index must be non-negative");
    }
    if (kind_ == SiteKind::power2) {
        if (i > 62) {
            throw std::overflow_error(fmt::format("s({}) = 2^{} overflows int64", i, i));
        }
        return std::int64_t{1} << i;
    }
    if (i >= static_cast<int>(prefix_.size())) {
        throw std::overflow_error(fmt::format("loggevrey s({}) overflows int64", i));
    }
    return prefix_[i];
}

SiteFunction::Inverse SiteFunction::i_of(std::int64_t s) const
{
    if (s < 1) {
        throw std::domain_error(fmt::format("i_of: s = {} is below s(0) = 1", s));
    }
    int i = 0;
    while (true) {
        std::int64_t next = 0;
        try {
            next = s_of(i + 1);
        } catch (const std::overflow_error &) {
            break;
        }
        if (next > s) {
            break;
        }
        ++i;
    }
    return {i, s_of(i) == s};
}

SiteSchedule::SiteSchedule(SiteFunction primary_, int i_star_, SiteVariant variant_, std::vector<int> s0_,
                           std::optional<SiteFunction> secondary_)
    : primary(primary_), i_star(i_star_), variant(variant_), s0(std::move(s0_)), secondary(secondary_)
{
    if (i_star < 21) {
        throw std::invalid_argument(fmt::format("i_star must be >= 21, got {}", i_star));
    }
    if (variant == SiteVariant::minus_S1_S2_S0 && !secondary) {
        throw std::invalid_argument("variant -S1+S2+S0 needs a second site function");
    }
    std::sort(s0.begin(), s0.end());
    s0.erase(std::unique(s0.begin(), s0.end()), s0.end());
}

SiteSchedule power2_schedule(double eta, int i_star, SiteVariant variant, std::vector<int> s0)
{
    return SiteSchedule(SiteFunction(SiteKind::power2, eta), i_star, variant, std::move(s0));
}

SiteSchedule loggevrey_schedule(double eta, int i_star, SiteVariant variant, std::vector<int> s0)
{
    return SiteSchedule(SiteFunction(SiteKind::loggevrey, eta), i_star, variant, std::move(s0));
}

namespace
{

void append_range(const SiteFunction &f, int J, int sign, std::set<int> &out)
{
    for (int i = 0;; ++i) {
        if (f.log_s(i) > std::log(static_cast<long double>(J)) + 1e-12L) {
            break;
        }
        const auto s = f.s_of(i);
        if (s > J) {
            break;
        }
        out.insert(sign * static_cast<int>(s));
    }
}

bool uses_s0(SiteVariant v)
{
    return v == SiteVariant::minus_S1_S0 || v == SiteVariant::S1_S0 || v == SiteVariant::minus_S1_S2_S0;
}

bool in_function(const SiteFunction &f, long long s)
{
    if (s < 1) {
        return false;
    }
    return f.i_of(s).member;
}

} // namespace

std::vector<int> gen_sites(const SiteSchedule &sched, int J)
{
    if (J < 1) {
        throw std::invalid_argument("gen_sites: J must be >= 1");
    }
    std::set<int> out;
    const bool negative = sched.variant == SiteVariant::minus_S1 || sched.variant == SiteVariant::minus_S1_S0 ||
                          sched.variant == SiteVariant::minus_S1_S2_S0;
    append_range(sched.primary, J, negative ? -1 : 1, out);
    if (sched.variant == SiteVariant::minus_S1_S2_S0) {
        append_range(*sched.secondary, J, 1, out);
    }
    if (uses_s0(sched.variant)) {
        for (int s : sched.s0) {
            if (s >= -J && s <= J) {
                out.insert(s);
            }
        }
    }
    return {out.begin(), out.end()};
}

std::optional<int> site_index(const SiteSchedule &sched, int s)
{
    const bool negative = sched.variant == SiteVariant::minus_S1 || sched.variant == SiteVariant::minus_S1_S0 ||
                          sched.variant == SiteVariant::minus_S1_S2_S0;
    const long long signed_s = negative ? -static_cast<long long>(s) : s;
    if (in_function(sched.primary, signed_s)) {
        return sched.primary.i_of(signed_s).i;
    }
    if (sched.variant == SiteVariant::minus_S1_S2_S0 && in_function(*sched.secondary, s)) {
        return sched.secondary->i_of(s).i;
    }
    if (uses_s0(sched.variant) && std::binary_search(sched.s0.begin(), sched.s0.end(), s)) {
        return 0;
    }
    return std::nullopt;
}

AdmissibilityReport validate_admissible(const SiteSchedule &sched, int i_max)
{
    const SiteFunction &f = sched.primary;
    return validate_admissible([&f](int i) { return f.log_s(i); }, sched.eta(), sched.i_star, i_max);
}

AdmissibilityReport validate_admissible(const std::function<long double(int)> &log_s, double eta, int i_star,
                                        int i_max)
{
    if (i_max < i_star) {
        throw std::invalid_argument("validate_admissible: i_max < i_star");
    }
    AdmissibilityReport rep;
    // Relative slack for comparisons carried out on logarithms.
    constexpr long double slack = 1e-15L;
    auto fail = [](ConditionResult &c, std::string msg) {
        if (c.passed) {
            c.passed = false;
            c.counterexample = std::move(msg);
        }
    };
    auto log_add = [](long double a, long double b) {
        const long double m = std::max(a, b);
        return m + std::log1p(std::exp(std::min(a, b) - m));
    };

    for (int i = i_star; i <= i_max; ++i) {
        const long double lhs = log_s(i);
        const long double rhs = gevrey_exponent(i, eta);
        if (lhs < rhs * (1 - slack)) {
            fail(rep.growth, fmt::format("i={}: log s(i)={} < (log i)^(1+eta)={}", i, static_cast<double>(lhs),
                                         static_cast<double>(rhs)));
        }
    }
    for (int i = i_star; i <= i_max; ++i) {
        for (int ip = i_star; i + ip <= i_max; ++ip) {
            if (log_s(i + ip) < log_add(log_s(i), log_s(ip)) - slack * log_s(i + ip)) {
                fail(rep.superadditive, fmt::format("s({}) < s({}) + s({})", i + ip, i, ip));
            }
        }
        for (int h = 2; h * i <= i_max; ++h) {
            if (log_s(h * i) < std::log(static_cast<long double>(h)) + log_s(i) - slack * log_s(h * i)) {
                fail(rep.superadditive, fmt::format("s({}) < {} s({})", h * i, h, i));
            }
        }
        if (static_cast<long long>(i) * i <= i_max) {
            if (log_s(i * i) < 2 * log_s(i) * (1 - slack)) {
                fail(rep.square, fmt::format("s({}) < s({})^2", i * i, i));
            }
        }
    }
    return rep;
}

} // namespace nlskam
