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

// Terms of the Ito stochastic master equation for a continuously monitored
// observable C with Hamiltonian H = H_a + u H_b:
//
//   d rho = ( -i[H, rho] + D(C, rho) ) dt + G(C, rho) dW
//   D(C, rho) = mu ( C rho C - (C^2 rho + rho C^2)/2 )
//   G(C, rho) = sqrt(mu eta) ( C rho + rho C - 2 tr(C rho) rho )
//
// and of the equivalent state-vector equation at eta = 1.

#pragma once

#include <string>
#include <vector>

#include "qfb/hermitian.hpp"

namespace qfb {

/// One named structural check performed on a candidate model.
struct ModelCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Runs every model check without throwing: dimensions, mu > 0,
/// eta in (0, 1], [H_a, C] = 0, non-degenerate spectrum of C and
/// connectivity of the transition graph of H_b in the eigenbasis of C.
std::vector<ModelCheck> check_model(const HermitianMatrix& h_a, const HermitianMatrix& h_b,
                                    const HermitianMatrix& c, double mu, double eta,
                                    const Tolerances& tol = {});

/// Validated (H_a, H_b, C, mu, eta). Immutable.
class ModelSpec {
   public:
    /// Throws ValidationError listing every failed check.
    static ModelSpec create(HermitianMatrix h_a, HermitianMatrix h_b, HermitianMatrix c, double mu,
                            double eta, const Tolerances& tol = {});

    Eigen::Index dim() const { return c_.dim(); }
    const HermitianMatrix& h_a() const { return h_a_; }
    const HermitianMatrix& h_b() const { return h_b_; }
    const HermitianMatrix& c() const { return c_; }
    double mu() const { return mu_; }
    double eta() const { return eta_; }
    const Tolerances& tolerances() const { return tol_; }

    const CMatrix& c_squared() const { return c2_; }
    /// Ascending eigenvalues of C and the matching orthonormal eigenvectors.
    const RVector& c_spectrum() const { return c_spectrum_; }
    const CMatrix& c_eigenbasis() const { return c_basis_; }

   private:
    ModelSpec() = default;

    HermitianMatrix h_a_, h_b_, c_;
    double mu_ = 0.0, eta_ = 0.0;
    Tolerances tol_;
    CMatrix c2_;
    RVector c_spectrum_;
    CMatrix c_basis_;
};

/// Target rho_d (a joint eigenprojector of H_a and C) and its antipodal
/// states, the remaining eigenprojectors of C.
class TargetSpec {
   public:
    /// Throws ValidationError if rho_d is not rank-1 or not an eigenprojector
    /// of both C and H_a.
    static TargetSpec create(const ModelSpec& model, const DensityMatrix& rho_d);

    /// Target = eigenprojector of the level-th smallest eigenvalue of C.
    static TargetSpec for_level(const ModelSpec& model, Eigen::Index level);

    const DensityMatrix& rho_d() const { return rho_d_; }
    const std::vector<DensityMatrix>& antipodal() const { return antipodal_; }
    /// Index of rho_d in the ascending spectrum of C.
    Eigen::Index level() const { return level_; }

   private:
    TargetSpec() = default;

    DensityMatrix rho_d_;
    std::vector<DensityMatrix> antipodal_;
    Eigen::Index level_ = 0;
};

/// Unit-norm state vector.
class StateVector {
   public:
    StateVector() = default;
    /// Validates unit norm within 1e-9.
    explicit StateVector(CVector amplitudes);
    /// Scales a non-zero vector to unit norm.
    static StateVector normalized(const CVector& v);

    Eigen::Index dim() const { return psi_.size(); }
    const CVector& amplitudes() const { return psi_; }
    DensityMatrix density() const { return DensityMatrix::pure(psi_); }

   private:
    CVector psi_;
};

/// -i[h, rho].
HermitianMatrix hamiltonian_drift(const HermitianMatrix& h, const DensityMatrix& rho);

/// mu ( C rho C - (C^2 rho + rho C^2)/2 ).
HermitianMatrix lindblad_drift(const HermitianMatrix& c, const DensityMatrix& rho, double mu);

/// sqrt(mu eta) ( C rho + rho C - 2 tr(C rho) rho ).
HermitianMatrix diffusion(const HermitianMatrix& c, const DensityMatrix& rho, double mu, double eta);

/// Homodyne record increment dY = sqrt(eta) tr(rho C) dt + dW.
double measurement_increment(const DensityMatrix& rho, const HermitianMatrix& c, double eta, double dt,
                             double dW);

/// (-iH - (mu/2)(C - <C>)^2) psi with H = H_a + u H_b. Requires eta = 1.
CVector sse_drift(const StateVector& psi, const ModelSpec& model, double u);

/// sqrt(mu) (C - <C>) psi.
CVector sse_diffusion(const StateVector& psi, const HermitianMatrix& c, double mu);

namespace kernel {

/// out = -i[h, rho]
void hamiltonian_drift(const CMatrix& h, const CMatrix& rho, CMatrix& out);

/// out = mu (C rho C - (C^2 rho + rho C^2)/2)
void lindblad_drift(const CMatrix& c, const CMatrix& c2, const CMatrix& rho, double mu, CMatrix& out);

/// out = scale (C rho + rho C - 2 tr(C rho) rho), scale = sqrt(mu eta)
void diffusion(const CMatrix& c, const CMatrix& rho, double scale, CMatrix& out);

/// <psi|C|psi> for unit psi.
double vector_expectation(const CMatrix& c, const CVector& psi);

}  // namespace kernel

}  // namespace qfb
