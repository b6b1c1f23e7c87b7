#include <nlskam/format.hpp>
#include <nlskam/hamiltonian.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace nlskam
{

namespace
{

void check_params(const HamParams &p)
{
    if (p.J < 0 || p.J > max_mode) {
        throw std::invalid_argument(fmt::format("mode cutoff J={} outside [0, {}]", p.J, max_mode));
    }
    if (p.D < 0 || p.max_degree() > max_letters) {
        throw std::invalid_argument(fmt::format("degree cutoff D={} outside [0, {}]", p.D, max_letters / 2 - 1));
    }
    if (!(p.r > 0) || !(p.p >= 0)) {
        throw std::invalid_argument("Hamiltonian needs r > 0 and p >= 0");
    }
}

bool fits(const MonoKey &k, const HamParams &p)
{
    if (k.degree() > p.max_degree()) {
        return false;
    }
    for (auto l : k.letters()) {
        if (l == MonoKey::pad) {
            break;
        }
        const int j = MonoKey::mode_of(l);
        if (j < -p.J || j > p.J) {
            return false;
        }
    }
    return true;
}

} // namespace

Hamiltonian::Hamiltonian(const HamParams &params) : params_(params)
{
    check_params(params_);
}

Complex Hamiltonian::coeff(const MonoKey &k) const
{
    auto it = std::lower_bound(terms_.begin(), terms_.end(), k,
                               [](const Term &t, const MonoKey &v) { return t.first < v; });
    return (it != terms_.end() && it->first == k) ? it->second : Complex{};
}

Complex Hamiltonian::coeff(const MultiIndex &alpha, const MultiIndex &beta) const
{
    return coeff(MonoKey::make(alpha, beta));
}

std::vector<Monomial> Hamiltonian::monomials() const
{
    std::vector<Monomial> out;
    out.reserve(terms_.size());
    for (const auto &[k, c] : terms_) {
        out.push_back({k.alpha(), k.beta(), c});
    }
    return out;
}

Hamiltonian Hamiltonian::with_params(const HamParams &params) const
{
    Hamiltonian out(params);
    for (const auto &t : terms_) {
        if (!fits(t.first, params)) {
            throw std::invalid_argument("with_params: monomial " + t.first.to_string() + " violates new cutoffs");
        }
    }
    out.terms_ = terms_;
    return out;
}

Hamiltonian Hamiltonian::with_norm_params(double r, double p) const
{
    HamParams q = params_;
    q.r = r;
    q.p = p;
    Hamiltonian out(q);
    out.terms_ = terms_;
    return out;
}

Hamiltonian Hamiltonian::scaled(Complex c) const
{
    Hamiltonian out(params_);
    if (c == Complex{}) {
        return out;
    }
    out.terms_.reserve(terms_.size());
    for (const auto &[k, v] : terms_) {
        const Complex w = c * v;
        if (std::abs(w) >= ModeSeq::zero_threshold) {
            out.terms_.emplace_back(k, w);
        }
    }
    return out;
}

Hamiltonian Hamiltonian::combine(const Hamiltonian &a, const Hamiltonian &b, double sign)
{
    if (a.params_.D != b.params_.D) {
        throw std::invalid_argument(
            fmt::format("cannot combine Hamiltonians with degree cutoffs {} and {}", a.params_.D, b.params_.D));
    }
    HamParams p = a.params_;
    p.J = std::max(a.params_.J, b.params_.J);
    Hamiltonian out(p);
    out.terms_.reserve(a.terms_.size() + b.terms_.size());
    auto ia = a.terms_.begin();
    auto ib = b.terms_.begin();
    auto push = [&out](const MonoKey &k, Complex c) {
        if (std::abs(c) >= ModeSeq::zero_threshold) {
            out.terms_.emplace_back(k, c);
        }
    };
    while (ia != a.terms_.end() || ib != b.terms_.end()) {
        if (ib == b.terms_.end() || (ia != a.terms_.end() && ia->first < ib->first)) {
            push(ia->first, ia->second);
            ++ia;
        } else if (ia == a.terms_.end() || ib->first < ia->first) {
            push(ib->first, sign * ib->second);
            ++ib;
        } else {
            push(ia->first, ia->second + sign * ib->second);
            ++ia;
            ++ib;
        }
    }
    return out;
}

Hamiltonian &Hamiltonian::operator+=(const Hamiltonian &o)
{
    *this = combine(*this, o, 1.0);
    return *this;
}

Hamiltonian &Hamiltonian::operator-=(const Hamiltonian &o)
{
    *this = combine(*this, o, -1.0);
    return *this;
}

Hamiltonian operator+(const Hamiltonian &a, const Hamiltonian &b)
{
    Hamiltonian out = a;
    out += b;
    return out;
}

Hamiltonian operator-(const Hamiltonian &a, const Hamiltonian &b)
{
    Hamiltonian out = a;
    out -= b;
    return out;
}

Hamiltonian operator*(Complex c, const Hamiltonian &h)
{
    return h.scaled(c);
}

std::string Hamiltonian::dump() const
{
    std::string out = fmt::format("ham r={} p={} D={} J={}\n", format_real(params_.r), format_real(params_.p),
                                  params_.D, params_.J);
    for (const auto &[k, c] : terms_) {
        out += fmt::format("{} | {} | {} {}\n", to_string(k.alpha()), to_string(k.beta()), format_real(c.real()),
                           format_real(c.imag()));
    }
    return out;
}

namespace
{

MultiIndex parse_index(std::string_view field, int lineno)
{
    MultiIndex m;
    std::istringstream in{std::string(field)};
    std::string tok;
    while (in >> tok) {
        const auto caret = tok.find('^');
        if (caret == std::string::npos) {
            throw std::invalid_argument(fmt::format("ham line {}: token '{}' is not j^e", lineno, tok));
        }
        const auto j = parse_integer(std::string_view(tok).substr(0, caret));
        const auto e = parse_integer(std::string_view(tok).substr(caret + 1));
        if (e < 1 || m[static_cast<int>(j)] != 0) {
            throw std::invalid_argument(fmt::format("ham line {}: bad exponent in '{}'", lineno, tok));
        }
        m.add(static_cast<int>(j), static_cast<int>(e));
    }
    return m;
}

} // namespace

Hamiltonian Hamiltonian::parse(std::string_view text)
{
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line.rfind("ham ", 0) != 0) {
        throw std::invalid_argument("ham: missing header");
    }
    HamParams p;
    bool have_J = false;
    {
        std::istringstream hs(line.substr(4));
        std::string kv;
        while (hs >> kv) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                throw std::invalid_argument("ham: malformed header field '" + kv + "'");
            }
            const auto key = kv.substr(0, eq);
            const std::string_view val = std::string_view(kv).substr(eq + 1);
            if (key == "r") {
                p.r = parse_real(val);
            } else if (key == "p") {
                p.p = parse_real(val);
            } else if (key == "D") {
                p.D = static_cast<int>(parse_integer(val));
            } else if (key == "J") {
                p.J = static_cast<int>(parse_integer(val));
                have_J = true;
            } else {
                throw std::invalid_argument("ham: unknown header field '" + key + "'");
            }
        }
    }
    std::vector<Monomial> monos;
    int lineno = 1;
    int max_j = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto b1 = line.find('|');
        const auto b2 = b1 == std::string::npos ? b1 : line.find('|', b1 + 1);
        if (b2 == std::string::npos) {
            throw std::invalid_argument(fmt::format("ham line {}: expected 'alpha | beta | re im'", lineno));
        }
        Monomial m{parse_index(std::string_view(line).substr(0, b1), lineno),
                   parse_index(std::string_view(line).substr(b1 + 1, b2 - b1 - 1), lineno),
                   {}};
        std::istringstream cs(line.substr(b2 + 1));
        std::string re, im, extra;
        if (!(cs >> re >> im) || (cs >> extra)) {
            throw std::invalid_argument(fmt::format("ham line {}: expected two reals after beta", lineno));
        }
        m.coeff = Complex(parse_real(re), parse_real(im));
        for (const auto *idx : {&m.alpha, &m.beta}) {
            for (const auto &[j, e] : idx->entries()) {
                max_j = std::max(max_j, std::abs(j));
            }
        }
        monos.push_back(std::move(m));
    }
    if (!have_J) {
        p.J = max_j;
    }
    HamBuilder b(p, monos.size());
    for (const auto &m : monos) {
        if (m.alpha.total() + m.beta.total() > p.max_degree()) {
            throw std::invalid_argument("ham: monomial above the degree cutoff");
        }
        b.add(m.alpha, m.beta, m.coeff);
    }
    return b.build();
}

HamBuilder::HamBuilder(const HamParams &params, std::size_t reserve) : params_(params)
{
    check_params(params_);
    if (reserve > 0) {
        acc_.reserve(reserve);
    }
}

void HamBuilder::add(const MultiIndex &alpha, const MultiIndex &beta, Complex c)
{
    if (mass(alpha, beta) != 0) {
        throw std::invalid_argument("monomial " + to_string(alpha) + " | " + to_string(beta) + " has nonzero mass");
    }
    if (momentum(alpha, beta) != 0) {
        throw std::invalid_argument("monomial " + to_string(alpha) + " | " + to_string(beta) +
                                    " has nonzero momentum");
    }
    for (const auto *idx : {&alpha, &beta}) {
        for (const auto &[j, e] : idx->entries()) {
            if (j < -params_.J || j > params_.J) {
                throw std::invalid_argument(fmt::format("mode {} outside [-{}, {}]", j, params_.J, params_.J));
            }
        }
    }
    if (alpha.total() + beta.total() > params_.max_degree()) {
        trunc_.dropped_terms += 1;
        double w = std::abs(c);
        for (const auto *idx : {&alpha, &beta}) {
            for (const auto &[j, e] : idx->entries()) {
                w *= std::pow(reference_entry(params_.r, params_.p, j), e);
            }
        }
        trunc_.dropped_mass += w;
        return;
    }
    add(MonoKey::make(alpha, beta), c);
}

void HamBuilder::add(const Hamiltonian &h, Complex scale)
{
    for (const auto &[k, c] : h.terms()) {
        acc_[k] += scale * c;
    }
}

Hamiltonian HamBuilder::build() const
{
    Hamiltonian out(params_);
    out.terms_.reserve(acc_.size());
    for (const auto &[k, c] : acc_) {
        if (std::abs(c) >= ModeSeq::zero_threshold) {
            out.terms_.emplace_back(k, c);
        }
    }
    std::sort(out.terms_.begin(), out.terms_.end(), [](const auto &x, const auto &y) { return x.first < y.first; });
    return out;
}

double reference_weight(const MonoKey &k, double r, double p)
{
    double w = 1;
    for (auto l : k.letters()) {
        if (l == MonoKey::pad) {
            break;
        }
        w *= reference_entry(r, p, MonoKey::mode_of(l));
    }
    return w;
}

} // namespace nlskam
