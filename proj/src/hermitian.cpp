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

#include "qfb/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qfb {

namespace {

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
    if (a != b) {
        std::ostringstream os;
        os << what << ": dimension mismatch (" << a << " vs " << b << ")";
        throw DimensionError(os.str());
    }
}

double hermiticity_defect(const CMatrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

}  // namespace

HermitianMatrix::HermitianMatrix(CMatrix m, const Tolerances& tol) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0) {
        throw ValidationError("Hermitian matrix must be square and non-empty");
    }
    const double defect = hermiticity_defect(m_);
    if (defect > tol.hermitian) {
        std::ostringstream os;
        os << "matrix is not Hermitian (max |a_ij - conj(a_ji)| = " << defect << ")";
        throw ValidationError(os.str());
    }
}

HermitianMatrix HermitianMatrix::symmetrized(const CMatrix& m) {
    if (m.rows() != m.cols()) {
        throw DimensionError("symmetrized: matrix is not square");
    }
    HermitianMatrix h;
    h.m_ = m;
    kernel::symmetrize(h.m_);
    return h;
}

HermitianMatrix HermitianMatrix::identity(Eigen::Index n) {
    return HermitianMatrix(CMatrix::Identity(n, n));
}

HermitianMatrix HermitianMatrix::diagonal(const std::vector<double>& d) {
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
    return HermitianMatrix(std::move(m));
}

DensityMatrix::DensityMatrix(const HermitianMatrix& m, const Tolerances& tol) : m_(m) {
    const double tr = m.matrix().trace().real();
    if (std::abs(tr - 1.0) > tol.trace) {
        std::ostringstream os;
        os << "density matrix trace is " << tr << ", expected 1";
        throw ValidationError(os.str());
    }
    const double lmin = kernel::min_eigenvalue(m.matrix());
    if (lmin < -tol.psd) {
        std::ostringstream os;
        os << "density matrix has negative eigenvalue " << lmin;
        throw ValidationError(os.str());
    }
}

DensityMatrix DensityMatrix::trusted(const CMatrix& m) {
    DensityMatrix d;
    d.m_ = HermitianMatrix::symmetrized(m);
    return d;
}

DensityMatrix DensityMatrix::pure(const CVector& psi) {
    const double n2 = psi.squaredNorm();
    if (!(n2 > 0.0)) throw ValidationError("pure state from a zero vector");
    return DensityMatrix(HermitianMatrix::symmetrized(psi * psi.adjoint() / n2));
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index n) {
    return DensityMatrix(HermitianMatrix(CMatrix::Identity(n, n) / static_cast<double>(n)));
}

DensityMatrix DensityMatrix::diagonal(const std::vector<double>& p) {
    return DensityMatrix(HermitianMatrix::diagonal(p));
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols()) throw DimensionError("commutator: non-square operand");
    require_same_dim(a.rows(), b.rows(), "commutator");
    return kernel::commutator(a, b);
}

CMatrix commutator(const HermitianMatrix& a, const HermitianMatrix& b) {
    return commutator(a.matrix(), b.matrix());
}

double expectation(const HermitianMatrix& c, const DensityMatrix& rho) {
    require_same_dim(c.dim(), rho.dim(), "expectation");
    return kernel::expectation(c.matrix(), rho.matrix());
}

double variance(const HermitianMatrix& c, const DensityMatrix& rho) {
    require_same_dim(c.dim(), rho.dim(), "variance");
    const CMatrix c2 = c.matrix() * c.matrix();
    const double mean = kernel::expectation(c.matrix(), rho.matrix());
    return kernel::expectation(c2, rho.matrix()) - mean * mean;
}

double purity(const DensityMatrix& rho) {
    // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
    return rho.matrix().squaredNorm();
}

double born_probability(const HermitianMatrix& p, const DensityMatrix& rho, const Tolerances& tol) {
    require_same_dim(p.dim(), rho.dim(), "born_probability");
    const CMatrix& pm = p.matrix();
    if ((pm * pm - pm).cwiseAbs().maxCoeff() > tol.projector) {
        throw ValidationError("born_probability: operator is not a projector");
    }
    return kernel::trace_product(pm, rho.matrix());
}

DensityMatrix luders_condition(const HermitianMatrix& p, const DensityMatrix& rho, const Tolerances& tol) {
    const double prob = born_probability(p, rho, tol);
    if (prob <= tol.zero_probability) {
        throw ValidationError("luders_condition: outcome has zero probability");
    }
    const CMatrix& pm = p.matrix();
    return DensityMatrix(HermitianMatrix::symmetrized(pm * rho.matrix() * pm / prob), tol);
}

SpectralDecomposition spectral_decompose(const HermitianMatrix& c, const Tolerances& tol) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(c.matrix());
    const RVector& w = es.eigenvalues();  // ascending
    const CMatrix& v = es.eigenvectors();

    SpectralDecomposition out;
    Eigen::Index i = 0;
    const Eigen::Index n = w.size();
    while (i < n) {
        Eigen::Index j = i + 1;
        // Chain merge: consecutive eigenvalues within tol belong to one cluster.
        while (j < n && w(j) - w(j - 1) <= tol.degeneracy) ++j;
        const CMatrix block = v.middleCols(i, j - i);
        out.eigenvalues.push_back(w.segment(i, j - i).mean());
        out.projectors.push_back(HermitianMatrix::symmetrized(block * block.adjoint()));
        if (j - i > 1) out.degenerate = true;
        i = j;
    }
    return out;
}

DensityMatrix project_to_density(const HermitianMatrix& m, const Tolerances& tol) {
    CMatrix work = m.matrix();
    kernel::project_to_density(work, tol.psd);
    return DensityMatrix::trusted(work);
}

namespace kernel {

void symmetrize(CMatrix& m) {
    const Eigen::Index n = m.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        m(i, i) = Complex(m(i, i).real(), 0.0);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const Complex avg = 0.5 * (m(i, j) + std::conj(m(j, i)));
            m(i, j) = avg;
            m(j, i) = std::conj(avg);
        }
    }
}

double min_eigenvalue(const CMatrix& m) {
    if (m.rows() == 2) {
        const double a = m(0, 0).real();
        const double d = m(1, 1).real();
        const double half_gap = std::hypot(0.5 * (a - d), std::abs(m(0, 1)));
        return 0.5 * (a + d) - half_gap;
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

bool is_psd(const CMatrix& m, double tol) {
    if (m.rows() == 2) return min_eigenvalue(m) >= -tol;
    // m + tol*I positive definite <=> min eigenvalue > -tol; a Cholesky attempt
    // is much cheaper than an eigensolve.
    CMatrix shifted = m;
    shifted.diagonal().array() += tol;
    Eigen::LLT<CMatrix> llt(shifted);
    return llt.info() == Eigen::Success;
}

ProjectionOutcome project_to_density(CMatrix& m, double psd_tol) {
    symmetrize(m);
    const double tr = m.trace().real();
    if (!(tr > 0.0) || !std::isfinite(tr)) {
        throw NumericalError("project_to_density: non-positive trace");
    }
    ProjectionOutcome out;
    if (is_psd(m, psd_tol)) {
        m /= tr;
        return out;
    }
    out.clipped = true;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
    RVector w = es.eigenvalues().cwiseMax(0.0);
    const double s = w.sum();
    if (!(s > 0.0)) throw NumericalError("project_to_density: no positive spectrum left after clipping");
    w /= s;
    m = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
    symmetrize(m);
    return out;
}

CVector leading_eigenvector(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
    return es.eigenvectors().col(m.cols() - 1);
}

void project_to_pure(CMatrix& m) {
    const CVector v = leading_eigenvector(m);
    m = v * v.adjoint();
    symmetrize(m);
}

}  // namespace kernel

}  // namespace qfb
