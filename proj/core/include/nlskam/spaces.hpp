#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <string_view>

namespace nlskam
{

using Complex = std::complex<double>;

// Japanese brackets used throughout: jjap(j) = max(2, |j|) for the weights,
// jap(i) = max(1, |i|) for site indices in the Diophantine weight.
inline double jjap(long long j)
{
    const long long a = j < 0 ? -j : j;
    return a < 2 ? 2.0 : static_cast<double>(a);
}

inline double jap(long long i)
{
    const long long a = i < 0 ? -i : i;
    return a < 1 ? 1.0 : static_cast<double>(a);
}

// Finitely supported sequence (u_j)_{|j| <= J}. Entries below 1e-300 in
// modulus are not stored, so two sequences compare equal iff they hold the
// same nonzero entries.
class ModeSeq
{
public:
    static constexpr double zero_threshold = 1e-300;

    ModeSeq() = default;
    explicit ModeSeq(int J);
    ModeSeq(int J, const std::map<int, Complex> &entries);

    int cutoff() const noexcept { return J_; }
    Complex operator[](int j) const;
    const std::map<int, Complex> &entries() const noexcept { return entries_; }
    bool empty() const noexcept { return entries_.empty(); }

    ModeSeq with(int j, Complex value) const;
    // Drop entries with |u_j| < threshold.
    ModeSeq pruned(double threshold) const;

    // "modeseq J=<J>" followed by "j re im" lines in increasing j.
    std::string to_text() const;
    static ModeSeq from_text(std::string_view text);

    friend bool operator==(const ModeSeq &, const ModeSeq &) = default;

private:
    int J_ = 0;
    std::map<int, Complex> entries_;
};

ModeSeq operator-(const ModeSeq &a, const ModeSeq &b);

// sup_j |u_j| jjap(j)^p
double wp_norm(const ModeSeq &u, double p);

// u_{p,j}(r) = r jjap(j)^{-p} for |j| <= J.
ModeSeq reference_point(double r, double p, int J);

// Scalar version of one entry of the reference point.
inline double reference_entry(double r, double p, int j)
{
    return r * std::pow(jjap(j), -p);
}

struct EmbeddingConstants {
    double lower; // c with c |u|_{h^k} <= |u|_{w_p}
    double upper; // |u|_{w_p} <= upper |u|_{h^p}
};

// Constants of h^k <-> w_p on the truncation |j| <= J; requires 0 <= k < p-1.
EmbeddingConstants embedding_constants(double p, double k, int J);

// h^k norm: (sum |u_j|^2 jjap(j)^{2k})^{1/2}
double hk_norm(const ModeSeq &u, double k);

} // namespace nlskam
