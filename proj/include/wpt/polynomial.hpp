// SPDX-License-Identifier: Apache-2.0
//
// Sparse polynomials with complex coefficients over real positive variables.
// Used to expand |sum of products of linear forms|^2 into monomials before
// splitting the real part into posynomial pieces.

#pragma once

#include "wpt/gp.hpp"

#include <complex>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace wpt {

class SparsePolynomial {
public:
    using Key = std::vector<std::uint8_t>;

    explicit SparsePolynomial(std::size_t variables = 0) : vars_(variables) {}

    /// sum_j coefficient_j * x_{index_j}
    static SparsePolynomial linear(std::size_t variables,
                                   const std::vector<std::pair<std::size_t, std::complex<double>>>& terms);

    std::size_t variables() const { return vars_; }
    std::size_t size() const { return terms_.size(); }
    const std::map<Key, std::complex<double>>& terms() const { return terms_; }

    void add(const Key& key, std::complex<double> c);
    SparsePolynomial operator*(const SparsePolynomial& other) const;
    SparsePolynomial& operator+=(const SparsePolynomial& other);
    SparsePolynomial scaled(std::complex<double> c) const;
    SparsePolynomial conjugate() const;

    std::complex<double> evaluate(const Eigen::VectorXd& x) const;

    /// Splits the real part into positive and negative coefficient groups.
    /// Exact zeros are dropped; imaginary parts are ignored.
    gp::Signomial real_part_split() const;

private:
    std::size_t vars_;
    std::map<Key, std::complex<double>> terms_;
};

}  // namespace wpt
