// Copyright 2026 The qfeedback Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Shared models and random states for the unit and acceptance suites.

#pragma once

#include <cmath>
#include <cstdint>

#include "qfb/hermitian.hpp"
#include "qfb/rng.hpp"
#include "qfb/sme.hpp"

namespace qfb::testing {

inline CMatrix pauli_x() {
    CMatrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

inline CMatrix pauli_y() {
    CMatrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
}

inline CMatrix pauli_z() {
    CMatrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

/// C = sz, H_a = h_a sz, H_b = sx.
inline ModelSpec two_level(double mu, double eta, double h_a = 1.0) {
    return ModelSpec::create(HermitianMatrix(h_a * pauli_z()), HermitianMatrix(pauli_x()),
                             HermitianMatrix(pauli_z()), mu, eta);
}

/// C = H_a = diag(1, 0, -1), H_b with every off-diagonal entry 1.
inline ModelSpec three_level(double mu, double eta) {
    CMatrix hb = CMatrix::Ones(3, 3);
    hb.diagonal().setZero();
    return ModelSpec::create(HermitianMatrix::diagonal({1.0, 0.0, -1.0}), HermitianMatrix(hb),
                             HermitianMatrix::diagonal({1.0, 0.0, -1.0}), mu, eta);
}

/// Target diag(1, 0, ..., 0): the largest eigenvalue of C in both models.
inline TargetSpec top_target(const ModelSpec& m) { return TargetSpec::for_level(m, m.dim() - 1); }

/// Haar-random pure state from a Gaussian vector.
inline DensityMatrix random_pure(Eigen::Index n, NormalStream& g) {
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(g.next(), g.next());
    return DensityMatrix::pure(v);
}

/// Ginibre-random full-rank density.
inline DensityMatrix random_density(Eigen::Index n, NormalStream& g) {
    CMatrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = Complex(g.next(), g.next());
    CMatrix r = a * a.adjoint();
    r /= r.trace().real();
    return DensityMatrix::trusted(r);
}

/// Uniform on [lo, hi) from the normal stream (through the normal CDF).
inline double uniform(NormalStream& g, double lo, double hi) {
    const double p = 0.5 * std::erfc(-g.next() / std::sqrt(2.0));
    return lo + (hi - lo) * p;
}

}  // namespace qfb::testing
