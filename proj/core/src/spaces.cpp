#include <nlskam/format.hpp>
#include <nlskam/spaces.hpp>

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace nlskam
{

std::string format_real(double x)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

double parse_real(std::string_view token)
{
    double out = 0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), out);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
        throw std::invalid_argument("not a real number: '" + std::string(token) + "'");
    }
    return out;
}

long long parse_integer(std::string_view token)
{
    long long out = 0;
    if (!token.empty() && token.front() == '+') {
        token.remove_prefix(1);
    }
    auto res = std::from_chars(token.data(), token.data() + token.size(), out);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
        throw std::invalid_argument("not an integer: '" + std::string(token) + "'");
    }
    return out;
}

ModeSeq::ModeSeq(int J) : J_(J)
{
    if (J < 0) {
        throw std::invalid_argument("ModeSeq: negative cutoff");
    }
}

ModeSeq::ModeSeq(int J, const std::map<int, Complex> &entries) : ModeSeq(J)
{
    for (const auto &[j, v] : entries) {
        if (j < -J || j > J) {
            throw std::invalid_argument(fmt::format("ModeSeq: index {} outside [-{}, {}]", j, J, J));
        }
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw std::invalid_argument(fmt::format("ModeSeq: non-finite entry at {}", j));
        }
        if (std::abs(v) >= zero_threshold) {
            entries_.emplace(j, v);
        }
    }
}

Complex ModeSeq::operator[](int j) const
{
    auto it = entries_.find(j);
    return it == entries_.end() ? Complex{} : it->second;
}

ModeSeq ModeSeq::with(int j, Complex value) const
{
    auto e = entries_;
    e[j] = value;
    return ModeSeq(J_, e);
}

ModeSeq ModeSeq::pruned(double threshold) const
{
    std::map<int, Complex> e;
    for (const auto &[j, v] : entries_) {
        if (std::abs(v) >= threshold) {
            e.emplace(j, v);
        }
    }
    return ModeSeq(J_, e);
}

std::string ModeSeq::to_text() const
{
    std::string out = fmt::format("modeseq J={}\n", J_);
    for (const auto &[j, v] : entries_) {
        out += fmt::format("{} {} {}\n", j, format_real(v.real()), format_real(v.imag()));
    }
    return out;
}

ModeSeq ModeSeq::from_text(std::string_view text)
{
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line.rfind("modeseq J=", 0) != 0) {
        throw std::invalid_argument("ModeSeq: missing 'modeseq J=' header");
    }
    const int J = static_cast<int>(parse_integer(std::string_view(line).substr(10)));
    std::map<int, Complex> e;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        std::istringstream ls(line);
        std::string sj, sre, sim, extra;
        if (!(ls >> sj >> sre >> sim) || (ls >> extra)) {
            throw std::invalid_argument(fmt::format("ModeSeq: malformed line {}", lineno));
        }
        const int j = static_cast<int>(parse_integer(sj));
        if (e.count(j) != 0) {
            throw std::invalid_argument(fmt::format("ModeSeq: duplicate index {} on line {}", j, lineno));
        }
        e[j] = Complex(parse_real(sre), parse_real(sim));
    }
    return ModeSeq(J, e);
}

ModeSeq operator-(const ModeSeq &a, const ModeSeq &b)
{
    std::map<int, Complex> e = a.entries();
    for (const auto &[j, v] : b.entries()) {
        e[j] -= v;
    }
    return ModeSeq(std::max(a.cutoff(), b.cutoff()), e);
}

double wp_norm(const ModeSeq &u, double p)
{
    double s = 0;
    for (const auto &[j, v] : u.entries()) {
        s = std::max(s, std::abs(v) * std::pow(jjap(j), p));
    }
    return s;
}

double hk_norm(const ModeSeq &u, double k)
{
    double s = 0;
    for (const auto &[j, v] : u.entries()) {
        s += std::norm(v) * std::pow(jjap(j), 2 * k);
    }
    return std::sqrt(s);
}

ModeSeq reference_point(double r, double p, int J)
{
    std::map<int, Complex> e;
    for (int j = -J; j <= J; ++j) {
        e[j] = reference_entry(r, p, j);
    }
    return ModeSeq(J, e);
}

EmbeddingConstants embedding_constants(double p, double k, int J)
{
    if (k < 0 || k >= p - 1) {
        throw std::domain_error(fmt::format("embedding_constants: need 0 <= k < p-1, got k={} p={}", k, p));
    }
    double inv = 0;
    for (int j = -J; j <= J; ++j) {
        inv += std::pow(jjap(j), k - p);
    }
    return {1.0 / inv, std::pow(2.0, p)};
}

} // namespace nlskam
