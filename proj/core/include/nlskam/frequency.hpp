#pragma once

#include <map>
#include <vector>

#include <nlskam/monomial.hpp>

namespace nlskam
{

// Integer vector l with finite support, j -> l_j (zero entries not stored).
using IntVector = std::map<int, int>;

// omega_j for |j| <= J, with |omega_j - j^2| < 1/2.
class FrequencyVector
{
public:
    FrequencyVector() = default;
    FrequencyVector(int J, const std::map<int, double> &omega);
    // omega_j = j^2 + V_j with missing V_j taken as 0.
    static FrequencyVector from_potential(int J, const std::map<int, double> &V);

    int cutoff() const noexcept { return J_; }
    double operator()(int j) const { return w_.at(static_cast<std::size_t>(j + J_)); }
    std::map<int, double> as_map() const;

    double dot(const IntVector &l) const;
    // omega.(alpha - beta)
    double divisor(const MonoKey &k) const;

private:
    int J_ = 0;
    std::vector<double> w_;
};

} // namespace nlskam
