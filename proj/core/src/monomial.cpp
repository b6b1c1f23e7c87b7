#include <nlskam/monomial.hpp>

#include <algorithm>
#include <cstring>
#include <stdexcept>

#include <fmt/format.h>

namespace nlskam
{

MultiIndex::MultiIndex(std::initializer_list<std::pair<int, int>> entries)
{
    for (const auto &[j, e] : entries) {
        add(j, e);
    }
}

MultiIndex::MultiIndex(const std::map<int, int> &entries)
{
    for (const auto &[j, e] : entries) {
        add(j, e);
    }
}

int MultiIndex::operator[](int j) const
{
    auto it = std::lower_bound(e_.begin(), e_.end(), j, [](const auto &p, int v) { return p.first < v; });
    return (it != e_.end() && it->first == j) ? it->second : 0;
}

int MultiIndex::total() const
{
    int t = 0;
    for (const auto &p : e_) {
        t += p.second;
    }
    return t;
}

void MultiIndex::add(int j, int delta)
{
    if (delta == 0) {
        return;
    }
    auto it = std::lower_bound(e_.begin(), e_.end(), j, [](const auto &p, int v) { return p.first < v; });
    if (it != e_.end() && it->first == j) {
        it->second += delta;
        if (it->second < 0) {
            throw std::domain_error("MultiIndex: negative exponent");
        }
        if (it->second == 0) {
            e_.erase(it);
        }
        return;
    }
    if (delta < 0) {
        throw std::domain_error("MultiIndex: negative exponent");
    }
    e_.insert(it, {j, delta});
}

MultiIndex operator+(const MultiIndex &a, const MultiIndex &b)
{
    MultiIndex out = a;
    for (const auto &[j, e] : b.entries()) {
        out.add(j, e);
    }
    return out;
}

int mass(const MultiIndex &alpha, const MultiIndex &beta)
{
    return alpha.total() - beta.total();
}

long long momentum(const MultiIndex &alpha, const MultiIndex &beta)
{
    long long m = 0;
    for (const auto &[j, e] : alpha.entries()) {
        m += static_cast<long long>(j) * e;
    }
    for (const auto &[j, e] : beta.entries()) {
        m -= static_cast<long long>(j) * e;
    }
    return m;
}

std::string to_string(const MultiIndex &m)
{
    std::string out;
    for (const auto &[j, e] : m.entries()) {
        if (!out.empty()) {
            out += ' ';
        }
        out += fmt::format("{}^{}", j, e);
    }
    return out;
}

MonoKey MonoKey::make(const MultiIndex &alpha, const MultiIndex &beta)
{
    std::uint8_t buf[max_letters];
    int n = 0;
    auto put = [&](const MultiIndex &m, bool bar) {
        for (const auto &[j, e] : m.entries()) {
            if (j < -max_mode || j > max_mode) {
                throw std::out_of_range(fmt::format("mode {} outside [-{}, {}]", j, max_mode, max_mode));
            }
            if (n + e > max_letters) {
                throw std::length_error(fmt::format("monomial degree exceeds {}", max_letters));
            }
            for (int k = 0; k < e; ++k) {
                buf[n++] = bar ? ubar_letter(j) : u_letter(j);
            }
        }
    };
    put(alpha, false);
    put(beta, true);
    return from_letters(buf, n);
}

MonoKey MonoKey::from_letters(const std::uint8_t *letters, int count)
{
    MonoKey k;
    std::copy(letters, letters + count, k.letters_.begin());
    return k;
}

int MonoKey::degree() const
{
    return static_cast<int>(std::find(letters_.begin(), letters_.end(), pad) - letters_.begin());
}

MultiIndex MonoKey::alpha() const
{
    MultiIndex m;
    for (auto l : letters_) {
        if (l == pad || is_ubar(l)) {
            break;
        }
        m.add(mode_of(l), 1);
    }
    return m;
}

MultiIndex MonoKey::beta() const
{
    MultiIndex m;
    for (auto l : letters_) {
        if (l == pad) {
            break;
        }
        if (is_ubar(l)) {
            m.add(mode_of(l), 1);
        }
    }
    return m;
}

bool MonoKey::is_kernel() const
{
    const int n = degree();
    if (n % 2 != 0) {
        return false;
    }
    for (int k = 0; k < n / 2; ++k) {
        if (is_ubar(letters_[k]) || letters_[k] + 128 != letters_[n / 2 + k]) {
            return false;
        }
    }
    return true;
}

MonoKey MonoKey::conjugate() const
{
    const int n = degree();
    std::uint8_t buf[max_letters];
    for (int k = 0; k < n; ++k) {
        const auto l = letters_[k];
        buf[k] = is_ubar(l) ? u_letter(mode_of(l)) : ubar_letter(mode_of(l));
    }
    std::sort(buf, buf + n);
    return from_letters(buf, n);
}

std::string MonoKey::to_string() const
{
    return nlskam::to_string(alpha()) + " | " + nlskam::to_string(beta());
}

std::size_t MonoKeyHash::operator()(const MonoKey &k) const noexcept
{
    std::uint64_t w[2];
    std::memcpy(w, k.letters().data(), sizeof(w));
    auto mix = [](std::uint64_t x) {
        x ^= x >> 33;
        x *= 0xff51afd7ed558ccdULL;
        x ^= x >> 33;
        x *= 0xc4ceb9fe1a85ec53ULL;
        x ^= x >> 33;
        return x;
    };
    return static_cast<std::size_t>(mix(w[0] ^ mix(w[1] + 0x9e3779b97f4a7c15ULL)));
}

DecodedKey decode(const MonoKey &k)
{
    DecodedKey d;
    for (auto l : k.letters()) {
        if (l == MonoKey::pad) {
            break;
        }
        const int j = MonoKey::mode_of(l);
        ModeExp *slot = nullptr;
        for (int t = 0; t < d.n; ++t) {
            if (d.m[t].j == j) {
                slot = &d.m[t];
                break;
            }
        }
        if (slot == nullptr) {
            slot = &d.m[d.n++];
            *slot = {j, 0, 0};
        }
        (MonoKey::is_ubar(l) ? slot->b : slot->a) += 1;
    }
    std::sort(d.m.begin(), d.m.begin() + d.n, [](const ModeExp &x, const ModeExp &y) { return x.j < y.j; });
    return d;
}

} // namespace nlskam
