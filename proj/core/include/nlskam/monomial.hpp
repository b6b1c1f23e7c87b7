#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlskam/spaces.hpp>

namespace nlskam
{

inline constexpr int max_mode = 62;    // |j| <= 62 so that a mode fits in one key byte
inline constexpr int max_letters = 16; // |alpha| + |beta| <= 16, i.e. D <= 7

// Sparse exponent vector j -> alpha_j, stored sorted by j with alpha_j >= 1.
class MultiIndex
{
public:
    MultiIndex() = default;
    MultiIndex(std::initializer_list<std::pair<int, int>> entries);
    explicit MultiIndex(const std::map<int, int> &entries);

    int operator[](int j) const;
    int total() const;
    const std::vector<std::pair<int, int>> &entries() const noexcept { return e_; }
    bool empty() const noexcept { return e_.empty(); }

    // Adds (possibly negative) delta to the exponent of mode j.
    void add(int j, int delta);

    friend bool operator==(const MultiIndex &, const MultiIndex &) = default;
    friend auto operator<=>(const MultiIndex &, const MultiIndex &) = default;

private:
    std::vector<std::pair<int, int>> e_;
};

MultiIndex operator+(const MultiIndex &a, const MultiIndex &b);

// Sum of (alpha_j - beta_j) and of j (alpha_j - beta_j).
int mass(const MultiIndex &alpha, const MultiIndex &beta);
long long momentum(const MultiIndex &alpha, const MultiIndex &beta);

// "j^e j^e ..." (empty string for the zero index)
std::string to_string(const MultiIndex &m);

// Packed canonical key of u^alpha ubar^beta. Each factor is one byte
// ("letter"): u_j -> j + 64, ubar_j -> j + 192, padded with 0xff and kept
// sorted, so alpha letters precede beta letters and byte order is a total
// order on monomials.
class MonoKey
{
public:
    static constexpr std::uint8_t pad = 0xff;

    MonoKey() { letters_.fill(pad); }
    static MonoKey make(const MultiIndex &alpha, const MultiIndex &beta);
    // Letters must already be sorted; count <= max_letters.
    static MonoKey from_letters(const std::uint8_t *letters, int count);

    static constexpr std::uint8_t u_letter(int j) { return static_cast<std::uint8_t>(j + 64); }
    static constexpr std::uint8_t ubar_letter(int j) { return static_cast<std::uint8_t>(j + 192); }
    static constexpr bool is_ubar(std::uint8_t l) { return l >= 128; }
    static constexpr int mode_of(std::uint8_t l) { return is_ubar(l) ? l - 192 : l - 64; }

    int degree() const;
    const std::array<std::uint8_t, max_letters> &letters() const noexcept { return letters_; }

    MultiIndex alpha() const;
    MultiIndex beta() const;
    bool is_kernel() const; // alpha == beta
    MonoKey conjugate() const;
    std::string to_string() const;

    friend bool operator==(const MonoKey &, const MonoKey &) = default;
    friend auto operator<=>(const MonoKey &, const MonoKey &) = default;

private:
    std::array<std::uint8_t, max_letters> letters_;
};

struct MonoKeyHash {
    std::size_t operator()(const MonoKey &k) const noexcept;
};

struct Monomial {
    MultiIndex alpha;
    MultiIndex beta;
    Complex coeff;
};

// Per-mode view of a key: (j, alpha_j, beta_j) for every mode present.
struct ModeExp {
    int j;
    int a;
    int b;
};

struct DecodedKey {
    std::array<ModeExp, max_letters> m;
    int n = 0;

    const ModeExp *begin() const { return m.data(); }
    const ModeExp *end() const { return m.data() + n; }
};

DecodedKey decode(const MonoKey &k);

} // namespace nlskam
