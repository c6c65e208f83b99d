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

#include "qfb/sme.hpp"

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

// Levels i and j are linked when <i|H_b|j> != 0 in the eigenbasis of C.
bool transition_graph_connected(const CMatrix& h_b_in_c_basis, double tol) {
    const Eigen::Index n = h_b_in_c_basis.rows();
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::vector<Eigen::Index> frontier{0};
    seen[0] = true;
    while (!frontier.empty()) {
        const Eigen::Index i = frontier.back();
        frontier.pop_back();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!seen[static_cast<std::size_t>(j)] && std::abs(h_b_in_c_basis(i, j)) > tol) {
                seen[static_cast<std::size_t>(j)] = true;
                frontier.push_back(j);
            }
        }
    }
    for (bool s : seen)
        if (!s) return false;
    return true;
}

}  // namespace

std::vector<ModelCheck> check_model(const HermitianMatrix& h_a, const HermitianMatrix& h_b,
                                    const HermitianMatrix& c, double mu, double eta,
                                    const Tolerances& tol) {
    std::vector<ModelCheck> checks;
    const bool dims_ok = h_a.dim() == c.dim() && h_b.dim() == c.dim() && c.dim() >= 2;
    {
        std::ostringstream os;
        os << "dim(H_a)=" << h_a.dim() << " dim(H_b)=" << h_b.dim() << " dim(C)=" << c.dim();
        checks.push_back({"dimensions", dims_ok, os.str()});
    }
    checks.push_back({"mu > 0", mu > 0.0 && std::isfinite(mu), "mu=" + std::to_string(mu)});
    checks.push_back({"eta in (0, 1]", eta > 0.0 && eta <= 1.0, "eta=" + std::to_string(eta)});
    if (!dims_ok) return checks;

    {
        const double defect = commutator(h_a, c).cwiseAbs().maxCoeff();
        std::ostringstream os;
        os << "max |[H_a, C]_ij| = " << defect;
        checks.push_back({"[H_a, C] = 0", defect <= tol.commutation, os.str()});
    }

    const auto spectrum = spectral_decompose(c, tol);
    {
        std::ostringstream os;
        os << spectrum.eigenvalues.size() << " distinct eigenvalues for N=" << c.dim();
        checks.push_back({"spectrum of C non-degenerate", !spectrum.degenerate, os.str()});
    }

    {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(c.matrix());
        const CMatrix hb = es.eigenvectors().adjoint() * h_b.matrix() * es.eigenvectors();
        const bool connected = transition_graph_connected(hb, tol.degeneracy);
        checks.push_back({"Graph(H_b) connected", connected,
                          connected ? "all levels reachable through H_b transitions"
                                    : "some level is not reachable through H_b transitions"});
    }
    return checks;
}

ModelSpec ModelSpec::create(HermitianMatrix h_a, HermitianMatrix h_b, HermitianMatrix c, double mu,
                            double eta, const Tolerances& tol) {
    const auto checks = check_model(h_a, h_b, c, mu, eta, tol);
    std::ostringstream failures;
    bool ok = true;
    for (const auto& chk : checks) {
        if (!chk.passed) {
            failures << (ok ? "" : "; ") << chk.name << " (" << chk.detail << ")";
            ok = false;
        }
    }
    if (!ok) throw ValidationError("invalid model: " + failures.str());

    ModelSpec m;
    m.h_a_ = std::move(h_a);
    m.h_b_ = std::move(h_b);
    m.c_ = std::move(c);
    m.mu_ = mu;
    m.eta_ = eta;
    m.tol_ = tol;
    m.c2_ = m.c_.matrix() * m.c_.matrix();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m.c_.matrix());
    m.c_spectrum_ = es.eigenvalues();
    m.c_basis_ = es.eigenvectors();
    return m;
}

TargetSpec TargetSpec::create(const ModelSpec& model, const DensityMatrix& rho_d) {
    require_same_dim(model.dim(), rho_d.dim(), "TargetSpec");
    const Tolerances& tol = model.tolerances();
    if (std::abs(purity(rho_d) - 1.0) > tol.trace) {
        throw ValidationError("target rho_d must be a pure (rank-1) state");
    }
    if (commutator(rho_d.matrix(), model.h_a().matrix()).cwiseAbs().maxCoeff() > tol.commutation) {
        throw ValidationError("target rho_d is not an eigenstate of H_a");
    }
    const CMatrix& basis = model.c_eigenbasis();
    Eigen::Index level = -1;
    for (Eigen::Index i = 0; i < model.dim(); ++i) {
        const CVector v = basis.col(i);
        const double fid = (v.adjoint() * rho_d.matrix() * v)(0, 0).real();
        if (fid >= 1.0 - tol.trace) {
            level = i;
            break;
        }
    }
    if (level < 0) throw ValidationError("target rho_d is not an eigenstate of C");
    return for_level(model, level);
}

TargetSpec TargetSpec::for_level(const ModelSpec& model, Eigen::Index level) {
    if (level < 0 || level >= model.dim()) throw ValidationError("target level out of range");
    const CMatrix& basis = model.c_eigenbasis();
    TargetSpec t;
    t.level_ = level;
    for (Eigen::Index i = 0; i < model.dim(); ++i) {
        auto proj = DensityMatrix::pure(basis.col(i));
        if (i == level) {
            t.rho_d_ = std::move(proj);
        } else {
            t.antipodal_.push_back(std::move(proj));
        }
    }
    if (commutator(t.rho_d_.matrix(), model.h_a().matrix()).cwiseAbs().maxCoeff() >
        model.tolerances().commutation) {
        throw ValidationError("target rho_d is not an eigenstate of H_a");
    }
    return t;
}

StateVector::StateVector(CVector amplitudes) : psi_(std::move(amplitudes)) {
    if (psi_.size() == 0 || std::abs(psi_.squaredNorm() - 1.0) > 1e-9) {
        throw ValidationError("state vector must have unit norm");
    }
}

StateVector StateVector::normalized(const CVector& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw NumericalError("cannot normalize a zero state vector");
    return StateVector(v / n);
}

HermitianMatrix hamiltonian_drift(const HermitianMatrix& h, const DensityMatrix& rho) {
    require_same_dim(h.dim(), rho.dim(), "hamiltonian_drift");
    CMatrix out;
    kernel::hamiltonian_drift(h.matrix(), rho.matrix(), out);
    return HermitianMatrix::symmetrized(out);
}

HermitianMatrix lindblad_drift(const HermitianMatrix& c, const DensityMatrix& rho, double mu) {
    require_same_dim(c.dim(), rho.dim(), "lindblad_drift");
    CMatrix out;
    kernel::lindblad_drift(c.matrix(), c.matrix() * c.matrix(), rho.matrix(), mu, out);
    return HermitianMatrix::symmetrized(out);
}

HermitianMatrix diffusion(const HermitianMatrix& c, const DensityMatrix& rho, double mu, double eta) {
    require_same_dim(c.dim(), rho.dim(), "diffusion");
    CMatrix out;
    kernel::diffusion(c.matrix(), rho.matrix(), std::sqrt(mu * eta), out);
    return HermitianMatrix::symmetrized(out);
}

double measurement_increment(const DensityMatrix& rho, const HermitianMatrix& c, double eta, double dt,
                             double dW) {
    require_same_dim(c.dim(), rho.dim(), "measurement_increment");
    return std::sqrt(eta) * expectation(c, rho) * dt + dW;
}

CVector sse_drift(const StateVector& psi, const ModelSpec& model, double u) {
    require_same_dim(psi.dim(), model.dim(), "sse_drift");
    if (model.eta() < 1.0) throw ValidationError("sse_drift requires eta = 1");
    const CVector& v = psi.amplitudes();
    const CMatrix& c = model.c().matrix();
    const double mean = kernel::vector_expectation(c, v);
    const CVector a_psi = c * v - mean * v;  // (C - <C>) psi
    const CVector a2_psi = c * a_psi - mean * a_psi;
    const CVector h_psi = model.h_a().matrix() * v + u * (model.h_b().matrix() * v);
    return Complex(0.0, -1.0) * h_psi - 0.5 * model.mu() * a2_psi;
}

CVector sse_diffusion(const StateVector& psi, const HermitianMatrix& c, double mu) {
    require_same_dim(psi.dim(), c.dim(), "sse_diffusion");
    const CVector& v = psi.amplitudes();
    const double mean = kernel::vector_expectation(c.matrix(), v);
    return std::sqrt(mu) * (c.matrix() * v - mean * v);
}

namespace kernel {

void hamiltonian_drift(const CMatrix& h, const CMatrix& rho, CMatrix& out) {
    out.noalias() = h * rho;
    // -i (h rho - rho h) = -i (h rho - (h rho)^dagger) for Hermitian h, rho.
    out = Complex(0.0, -1.0) * (out - out.adjoint()).eval();
}

void lindblad_drift(const CMatrix& c, const CMatrix& c2, const CMatrix& rho, double mu, CMatrix& out) {
    const CMatrix c2rho = c2 * rho;
    out.noalias() = c * rho * c;
    out -= 0.5 * (c2rho + c2rho.adjoint());
    out *= mu;
}

void diffusion(const CMatrix& c, const CMatrix& rho, double scale, CMatrix& out) {
    const double mean = trace_product(c, rho);
    const CMatrix crho = c * rho;
    out = scale * (crho + crho.adjoint() - 2.0 * mean * rho);
}

double vector_expectation(const CMatrix& c, const CVector& psi) { return psi.dot(c * psi).real(); }

}  // namespace kernel

}  // namespace qfb
