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

// Feedback laws and Lyapunov functions for state reduction toward rho_d.
//
// With K = -i[H_b, rho] and the l-rescaled weight
//   M_l = rho_d + (2 <C> C - C^2) / l^2
// the control direction is T_l = tr(K M_l) and
//
//   V1 = tr(rho_d^2) - tr(rho_d rho)          (Hilbert-Schmidt distance)
//   V2 = <C^2> - <C>^2                         (variance along C)
//   V~ = V1 + V2 / l^2
//   L V~ = -T_l u - (4 mu eta / l^2) V2^2      (Ito generator)
//
// The laws are
//   linear          u = k tr(K rho_d)
//   sum_of_squares  u = k T_l                          -> L V~ = -k T_l^2 - 4 mu eta V2^2 / l^2
//   square_of_sum   u = k^2 T_l - 4 k sqrt(mu eta) V2 / l
//                                                       -> L V~ = -(k T_l - 2 sqrt(mu eta) V2 / l)^2
//   tuned           same expression as square_of_sum; kept as a separate kind
//                   so configs can name the gain-tuned variant explicitly.
//
// For N = 2, C = sigma_z, H_b = sigma_x, rho_d = diag(1, 0) the direction is
// T_l = y (1 + 4 z / l^2). The plus sign is what the Ito generator of V~
// gives and is confirmed by the Monte-Carlo generator estimate below.

#pragma once

#include <cstdint>
#include <string>

#include "qfb/hermitian.hpp"
#include "qfb/sme.hpp"

namespace qfb {

enum class ControlLaw { open_loop, linear, sum_of_squares, square_of_sum, tuned };

std::string to_string(ControlLaw law);
/// Throws ValidationError for unknown names.
ControlLaw control_law_from_string(const std::string& name);

struct ControllerSpec {
    ControlLaw kind = ControlLaw::open_loop;
    double k = 1.0;    ///< feedback gain
    double ell = 1.0;  ///< variance rescaling gain

    /// Throws ValidationError unless k and ell are finite and positive.
    static ControllerSpec create(ControlLaw kind, double k = 1.0, double ell = 1.0);
};

struct LyapunovReport {
    double v1 = 0.0;
    double v2 = 0.0;
    double v_tilde = 0.0;
    double lv_closed_loop = 0.0;  ///< L V~ at the applied control
    double l0_v = 0.0;            ///< uncontrolled part of L V~
    double lb_v = 0.0;            ///< coefficient of u in L V~ (= -T_l)
    double third_moment = 0.0;    ///< <C^3> - 3<C><C^2> + 2<C>^3
};

double v1(const DensityMatrix& rho, const TargetSpec& target);
double v2(const DensityMatrix& rho, const HermitianMatrix& c);
double v_tilde(const DensityMatrix& rho, const TargetSpec& target, const HermitianMatrix& c, double ell);
double third_central_moment(const DensityMatrix& rho, const HermitianMatrix& c);

/// L_b V1 = -tr(-i[H_b, rho] rho_d).
double lb_v1(const DensityMatrix& rho, const TargetSpec& target, const HermitianMatrix& h_b);

/// T_l = tr(-i[H_b, rho] (rho_d + (2<C>C - C^2)/l^2)).
double control_direction(const DensityMatrix& rho, const ModelSpec& model, const TargetSpec& target,
                         double ell);

double feedback(const DensityMatrix& rho, const ModelSpec& model, const TargetSpec& target,
                const ControllerSpec& ctrl);

/// Closed-form L V~ at control u.
double generator_v(const DensityMatrix& rho, const ModelSpec& model, const TargetSpec& target, double u,
                   double ell);

LyapunovReport lyapunov_report(const DensityMatrix& rho, const ModelSpec& model, const TargetSpec& target,
                               const ControllerSpec& ctrl, double u);

struct GeneratorEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
};

/// Sampling estimate of L V~: (E[V~(rho + d rho)] - V~(rho)) / dt with d rho
/// one unprojected Euler-Maruyama increment at fixed u. Draws are used in
/// antithetic pairs (dW, -dW); n_samples is the number of pairs and the
/// standard error is computed from the pair means.
/// Requires n_samples >= 1000 and 0 < dt <= 1e-3.
GeneratorEstimate generator_v_montecarlo_check(const DensityMatrix& rho, const ModelSpec& model,
                                               const TargetSpec& target, double u, double ell,
                                               std::size_t n_samples, double dt, std::uint64_t seed);

namespace kernel {

/// Scalars needed by every law, computed in one pass over rho.
struct ControlTerms {
    double mean_c = 0.0;    ///< <C>
    double variance = 0.0;  ///< V2
    double lin = 0.0;       ///< tr(-i[H_b, rho] rho_d)
    double quad = 0.0;      ///< tr(-i[H_b, rho] (2<C>C - C^2))
    double fidelity = 0.0;  ///< tr(rho_d rho)

    double direction(double ell) const { return lin + quad / (ell * ell); }
};

ControlTerms control_terms(const CMatrix& rho, const ModelSpec& model, const CMatrix& rho_d);

double feedback(const ControlTerms& t, const ModelSpec& model, const ControllerSpec& ctrl);

}  // namespace kernel

}  // namespace qfb
