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

#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qfb {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Thrown when operands of a matrix operation have incompatible shapes.
class DimensionError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a value violates a domain invariant (not Hermitian, not a
/// density, not a projector, invalid model, ...). Maps to CLI exit code 2.
class ValidationError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical procedure cannot produce a valid result
/// (non-positive trace during projection, vanishing norm, ...). Maps to CLI
/// exit code 3.
class NumericalError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Numerical tolerances used throughout the engine. The defaults are the
/// values every invariant in the test suite is stated against; a config file
/// may override them.
struct Tolerances {
    double hermitian = 1e-12;    ///< max |a_ij - conj(a_ji)|
    double trace = 1e-9;         ///< |tr(rho) - 1|
    double psd = 1e-9;           ///< eigenvalues >= -psd count as non-negative
    double degeneracy = 1e-10;   ///< eigenvalue merge distance
    double commutation = 1e-10;  ///< max-abs entry of [H_a, C]
    double projector = 1e-9;     ///< max-abs entry of P^2 - P
    double zero_probability = 1e-12;
};

/// A square complex matrix equal to its conjugate transpose.
class HermitianMatrix {
   public:
    HermitianMatrix() = default;

    /// Validates squareness and Hermiticity; throws ValidationError.
    explicit HermitianMatrix(CMatrix m, const Tolerances& tol = {});

    /// Returns (m + m^dagger)/2 without validation. Used for results of
    /// arithmetic that is Hermitian up to rounding.
    static HermitianMatrix symmetrized(const CMatrix& m);

    static HermitianMatrix identity(Eigen::Index n);
    static HermitianMatrix diagonal(const std::vector<double>& d);

    Eigen::Index dim() const { return m_.rows(); }
    const CMatrix& matrix() const { return m_; }
    Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

   private:
    CMatrix m_;
};

/// Hermitian, unit-trace, positive-semidefinite state.
class DensityMatrix {
   public:
    DensityMatrix() = default;

    /// Validates trace (1e-9) and minimum eigenvalue (>= -1e-9).
    explicit DensityMatrix(const HermitianMatrix& m, const Tolerances& tol = {});
    explicit DensityMatrix(const CMatrix& m, const Tolerances& tol = {})
        : DensityMatrix(HermitianMatrix(m, tol), tol) {}

    /// Wraps a matrix already known to satisfy the invariants (the output of
    /// project_to_density or an equivalent projection). Only symmetrizes.
    static DensityMatrix trusted(const CMatrix& m);

    /// |psi><psi| / <psi|psi>.
    static DensityMatrix pure(const CVector& psi);
    static DensityMatrix maximally_mixed(Eigen::Index n);
    static DensityMatrix diagonal(const std::vector<double>& p);

    Eigen::Index dim() const { return m_.dim(); }
    const CMatrix& matrix() const { return m_.matrix(); }
    const HermitianMatrix& hermitian() const { return m_; }

   private:
    HermitianMatrix m_;
};

/// C = sum_i c_i P_i with ascending, merged eigenvalues.
struct SpectralDecomposition {
    std::vector<double> eigenvalues;
    std::vector<HermitianMatrix> projectors;
    bool degenerate = false;  ///< some projector has rank > 1
};

CMatrix commutator(const CMatrix& a, const CMatrix& b);
CMatrix commutator(const HermitianMatrix& a, const HermitianMatrix& b);

double expectation(const HermitianMatrix& c, const DensityMatrix& rho);
double variance(const HermitianMatrix& c, const DensityMatrix& rho);
double purity(const DensityMatrix& rho);

/// tr(P rho); throws ValidationError when p is not idempotent.
double born_probability(const HermitianMatrix& p, const DensityMatrix& rho,
                        const Tolerances& tol = {});

/// P rho P / tr(P rho); throws ValidationError on a zero-probability outcome.
DensityMatrix luders_condition(const HermitianMatrix& p, const DensityMatrix& rho,
                               const Tolerances& tol = {});

SpectralDecomposition spectral_decompose(const HermitianMatrix& c, const Tolerances& tol = {});

/// Clips eigenvalues below -tol.psd to zero and renormalizes to unit trace.
/// Matrices that are already valid densities are only trace-normalized.
/// Throws NumericalError when the trace is not positive.
DensityMatrix project_to_density(const HermitianMatrix& m, const Tolerances& tol = {});

/// Raw kernels on plain matrices. The typed API above forwards to these; the
/// integrator calls them directly to avoid revalidating every step.
namespace kernel {

/// Re tr(a b) for Hermitian a, b.
inline double trace_product(const CMatrix& a, const CMatrix& b) {
    return (a.cwiseProduct(b.transpose())).sum().real();
}

inline double expectation(const CMatrix& c, const CMatrix& rho) { return trace_product(c, rho); }

inline CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

/// In-place (m + m^dagger)/2.
void symmetrize(CMatrix& m);

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const CMatrix& m);

/// True when every eigenvalue of the Hermitian m is >= -tol.
bool is_psd(const CMatrix& m, double tol);

struct ProjectionOutcome {
    bool clipped = false;  ///< an eigenvalue was below -tol and got clipped
};

/// In-place version of project_to_density. Throws NumericalError on a
/// non-positive trace.
ProjectionOutcome project_to_density(CMatrix& m, double psd_tol);

/// Replaces m with the rank-1 projector on its leading eigenvector (nearest
/// pure state in Frobenius norm).
void project_to_pure(CMatrix& m);

/// Leading eigenvector of a Hermitian matrix, unit norm.
CVector leading_eigenvector(const CMatrix& m);

}  // namespace kernel

}  // namespace qfb
