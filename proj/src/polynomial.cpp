// SPDX-License-Identifier: Apache-2.0

#include "wpt/polynomial.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace wpt {

SparsePolynomial SparsePolynomial::linear(
    std::size_t variables, const std::vector<std::pair<std::size_t, std::complex<double>>>& terms)
{
    SparsePolynomial p(variables);
    for (const auto& [index, c] : terms) {
        if (index >= variables) throw std::out_of_range("linear term index out of range");
        Key key(variables, 0);
        key[index] = 1;
        p.add(key, c);
    }
    return p;
}

void SparsePolynomial::add(const Key& key, std::complex<double> c)
{
    if (key.size() != vars_) throw std::invalid_argument("polynomial key has wrong length");
    terms_[key] += c;
}

SparsePolynomial SparsePolynomial::operator*(const SparsePolynomial& other) const
{
    if (other.vars_ != vars_) throw std::invalid_argument("polynomial product over different variables");
    SparsePolynomial out(vars_);
    Key key(vars_);
    for (const auto& [ka, ca] : terms_) {
        for (const auto& [kb, cb] : other.terms_) {
            for (std::size_t j = 0; j < vars_; ++j) {
                const unsigned e = unsigned{ka[j]} + unsigned{kb[j]};
                if (e > std::numeric_limits<std::uint8_t>::max())
                    throw std::overflow_error("polynomial degree exceeds 255");
                key[j] = static_cast<std::uint8_t>(e);
            }
            out.terms_[key] += ca * cb;
        }
    }
    return out;
}

SparsePolynomial& SparsePolynomial::operator+=(const SparsePolynomial& other)
{
    if (other.vars_ != vars_) throw std::invalid_argument("polynomial sum over different variables");
    for (const auto& [k, c] : other.terms_) terms_[k] += c;
    return *this;
}

SparsePolynomial SparsePolynomial::scaled(std::complex<double> c) const
{
    SparsePolynomial out(*this);
    for (auto& kv : out.terms_) kv.second *= c;
    return out;
}

SparsePolynomial SparsePolynomial::conjugate() const
{
    SparsePolynomial out(*this);
    for (auto& kv : out.terms_) kv.second = std::conj(kv.second);
    return out;
}

std::complex<double> SparsePolynomial::evaluate(const Eigen::VectorXd& x) const
{
    if (static_cast<std::size_t>(x.size()) != vars_)
        throw std::invalid_argument("polynomial evaluated with wrong variable count");
    std::complex<double> sum = 0.0;
    for (const auto& [k, c] : terms_) {
        double v = 1.0;
        for (std::size_t j = 0; j < vars_; ++j)
            for (unsigned e = 0; e < k[j]; ++e) v *= x[static_cast<Eigen::Index>(j)];
        sum += c * v;
    }
    return sum;
}

gp::Signomial SparsePolynomial::real_part_split() const
{
    gp::Signomial out{gp::Posynomial(vars_), gp::Posynomial(vars_)};
    Eigen::VectorXd a(static_cast<Eigen::Index>(vars_));
    for (const auto& [k, c] : terms_) {
        const double re = c.real();
        if (re == 0.0) continue;
        for (std::size_t j = 0; j < vars_; ++j) a[static_cast<Eigen::Index>(j)] = k[j];
        if (re > 0.0)
            out.positive.add_term(re, a);
        else
            out.negative.add_term(-re, a);
    }
    return out;
}

}  // namespace wpt
