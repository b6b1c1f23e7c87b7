#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace nlskam
{

enum class SiteKind { power2, loggevrey };

// The five sign/union combinations allowed for S.
enum class SiteVariant { S1, minus_S1, minus_S1_S0, S1_S0, minus_S1_S2_S0 };

std::string to_string(SiteKind k);
std::string to_string(SiteVariant v);
SiteKind parse_site_kind(const std::string &s);
SiteVariant parse_site_variant(const std::string &s);

// One strictly increasing function i -> s(i) with s(0) = 1.
class SiteFunction
{
public:
    SiteFunction(SiteKind kind, double eta);

    SiteKind kind() const noexcept { return kind_; }
    double eta() const noexcept { return eta_; }

    // Natural log of s(i); finite for every i >= 0 even when s(i) does not
    // fit in 64 bits.
    long double log_s(int i) const;
    // Throws std::overflow_error if s(i) does not fit in int64.
    std::int64_t s_of(int i) const;

    struct Inverse {
        int i;
        bool member;
    };
    // Floor inverse: largest i with s(i) <= s. Throws std::domain_error if s < s(0).
    Inverse i_of(std::int64_t s) const;

private:
    SiteKind kind_;
    double eta_;
    std::vector<std::int64_t> prefix_; // loggevrey values that fit in int64
};

struct SiteSchedule {
    SiteSchedule(SiteFunction primary, int i_star = 21, SiteVariant variant = SiteVariant::S1,
                 std::vector<int> s0 = {}, std::optional<SiteFunction> secondary = std::nullopt);

    SiteFunction primary;
    int i_star;
    SiteVariant variant;
    std::vector<int> s0;
    std::optional<SiteFunction> secondary; // S2, used by minus_S1_S2_S0 only

    double eta() const noexcept { return primary.eta(); }
};

// Convenience constructors; power2 defaults to eta = 1.2 (2^i satisfies the
// growth lower bound from i = 21 on only for eta <= 1.405).
SiteSchedule power2_schedule(double eta = 1.2, int i_star = 21, SiteVariant variant = SiteVariant::S1,
                             std::vector<int> s0 = {});
SiteSchedule loggevrey_schedule(double eta, int i_star = 21, SiteVariant variant = SiteVariant::S1,
                                std::vector<int> s0 = {});

// S intersected with [-J, J], sorted and duplicate free.
std::vector<int> gen_sites(const SiteSchedule &sched, int J);

// Index i(s) attached to a tangential site; sites that only belong to the
// finite prefix S0 get index 0. nullopt if s is not in S.
std::optional<int> site_index(const SiteSchedule &sched, int s);

struct ConditionResult {
    bool passed = true;
    std::string counterexample; // first failure, human readable
};

struct AdmissibilityReport {
    ConditionResult growth;        // s(i) >= exp((log i)^{1+eta})
    ConditionResult superadditive; // s(i+i') >= s(i)+s(i'), s(h i) >= h s(i)
    ConditionResult square;        // s(i^2) >= s(i)^2
    bool all_passed() const { return growth.passed && superadditive.passed && square.passed; }
};

// Brute-force check of the admissibility inequalities for i_star <= i, i' and
// all products / sums up to i_max. Conditions below i_star are not required.
AdmissibilityReport validate_admissible(const SiteSchedule &sched, int i_max);
AdmissibilityReport validate_admissible(const std::function<long double(int)> &log_s, double eta, int i_star,
                                        int i_max);

} // namespace nlskam
