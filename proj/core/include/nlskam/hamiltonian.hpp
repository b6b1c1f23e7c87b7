#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlskam/monomial.hpp>

namespace nlskam
{

// Truncation and norm metadata carried by every Hamiltonian.
struct HamParams {
    int J = 1;      // modes live in [-J, J]
    int D = 1;      // degree cutoff: |alpha| + |beta| <= 2D + 2
    double r = 1.0; // radius used for default norms
    double p = 1.0; // weight used for default norms

    int max_degree() const noexcept { return 2 * D + 2; }
    friend bool operator==(const HamParams &, const HamParams &) = default;
};

struct TruncationReport {
    std::size_t dropped_terms = 0;
    // Sum over dropped contributions of |coeff| u_p(r)^{alpha+beta}: the
    // majorant series of the dropped part evaluated at the reference point.
    double dropped_mass = 0;

    void merge(const TruncationReport &o)
    {
        dropped_terms += o.dropped_terms;
        dropped_mass += o.dropped_mass;
    }
};

// Finite sum of monomials H_{alpha,beta} u^alpha ubar^beta, stored sorted by
// key. Every stored monomial has zero mass and zero momentum, modes in
// [-J, J] and degree within the cutoff; values are immutable once built.
class Hamiltonian
{
public:
    using Term = std::pair<MonoKey, Complex>;

    Hamiltonian() = default;
    explicit Hamiltonian(const HamParams &params);

    const HamParams &params() const noexcept { return params_; }
    const std::vector<Term> &terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    bool empty() const noexcept { return terms_.empty(); }

    Complex coeff(const MonoKey &k) const;
    Complex coeff(const MultiIndex &alpha, const MultiIndex &beta) const;
    std::vector<Monomial> monomials() const;

    // Same terms, new metadata. Throws if a term violates the new cutoffs.
    Hamiltonian with_params(const HamParams &params) const;
    Hamiltonian with_norm_params(double r, double p) const;

    Hamiltonian scaled(Complex c) const;
    // Keeps only terms for which pred(key) is true.
    template <typename Pred>
    Hamiltonian filtered(Pred pred) const
    {
        Hamiltonian out(params_);
        for (const auto &t : terms_) {
            if (pred(t.first)) {
                out.terms_.push_back(t);
            }
        }
        return out;
    }

    Hamiltonian &operator+=(const Hamiltonian &o);
    Hamiltonian &operator-=(const Hamiltonian &o);

    // "ham r=<r> p=<p> D=<D> J=<J>" then one "alpha | beta | re im" line per term.
    std::string dump() const;
    static Hamiltonian parse(std::string_view text);

    friend bool operator==(const Hamiltonian &, const Hamiltonian &) = default;

private:
    friend class HamBuilder;
    static Hamiltonian combine(const Hamiltonian &a, const Hamiltonian &b, double sign);

    HamParams params_;
    std::vector<Term> terms_;
};

Hamiltonian operator+(const Hamiltonian &a, const Hamiltonian &b);
Hamiltonian operator-(const Hamiltonian &a, const Hamiltonian &b);
Hamiltonian operator*(Complex c, const Hamiltonian &h);

// Accumulates coefficients before producing a canonical Hamiltonian.
class HamBuilder
{
public:
    explicit HamBuilder(const HamParams &params, std::size_t reserve = 0);

    // Fast path for operations that preserve the invariants by construction.
    void add(const MonoKey &k, Complex c) { acc_[k] += c; }
    // Validates mass, momentum and mode range; degree overflow is dropped and
    // recorded in the truncation report.
    void add(const MultiIndex &alpha, const MultiIndex &beta, Complex c);
    void add(const Hamiltonian &h, Complex scale = 1.0);

    const TruncationReport &truncation() const noexcept { return trunc_; }
    // Entries with |c| < 1e-300 are dropped (canonical form).
    Hamiltonian build() const;

private:
    HamParams params_;
    std::unordered_map<MonoKey, Complex, MonoKeyHash> acc_;
    TruncationReport trunc_;
};

// Majorant-series weight u_p(r)^{alpha+beta} of a key.
double reference_weight(const MonoKey &k, double r, double p);

} // namespace nlskam
