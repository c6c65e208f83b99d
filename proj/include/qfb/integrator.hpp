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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qfb/control.hpp"
#include "qfb/hermitian.hpp"
#include "qfb/sme.hpp"

namespace qfb {

enum class Representation { sme, sse };

std::string to_string(Representation r);
Representation representation_from_string(const std::string& name);

struct SimConfig {
    double dt = 1e-4;
    double t_final = 1.0;
    std::uint64_t seed = 0;
    std::size_t record_stride = 1;
    double convergence_fidelity = 0.99;
    Representation representation = Representation::sme;

    /// Throws ValidationError on inconsistent values (sse needs eta = 1).
    void validate(const ModelSpec& model) const;
    std::size_t n_steps() const;
};

enum class OutcomeKind { converged_target, converged_antipodal, undetermined };

struct Outcome {
    OutcomeKind kind = OutcomeKind::undetermined;
    int antipodal_index = -1;  ///< into TargetSpec::antipodal() for converged_antipodal

    std::string label() const;
    friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// Target if tr(rho_d rho) >= threshold, else the first antipodal state with
/// tr(rho_a rho) >= threshold, else undetermined.
Outcome classify(const DensityMatrix& rho, const TargetSpec& target, double threshold);

struct StepDiagnostics {
    std::size_t steps = 0;
    std::size_t clipped_steps = 0;   ///< pre-projection min eigenvalue < -1e-9
    std::size_t rejected_steps = 0;  ///< projection failed; state kept
    double max_abs_control = 0.0;
    double max_coherence = 0.0;  ///< off-diagonal Frobenius norm in the eigenbasis of C

    friend bool operator==(const StepDiagnostics&, const StepDiagnostics&) = default;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
    std::vector<double> controls;  ///< u applied from each recorded state
    std::vector<double> records;   ///< dY accumulated since the previous record
    std::vector<LyapunovReport> lyapunov;
    Outcome outcome;
    StepDiagnostics diagnostics;
    bool valid = true;  ///< false when more than 0.1% of steps were rejected
};

struct EmStep {
    DensityMatrix rho;
    double u = 0.0;
    double dY = 0.0;
    bool clipped = false;
    bool rejected = false;
};

/// One Euler-Maruyama step of the closed-loop SME followed by projection
/// onto the density matrices. The control is evaluated at the pre-step
/// state. At eta = 1 a pure input is projected back onto the pure states
/// (nearest rank-1 projector), which keeps the purity of the exact flow.
EmStep em_step(const DensityMatrix& rho, const ModelSpec& model, const TargetSpec& target,
               const ControllerSpec& ctrl, double dt, double dW);

/// One explicit step of the state-vector equation at control u, then
/// renormalization. Throws NumericalError on a vanishing norm and
/// ValidationError when eta < 1.
StateVector sse_step(const StateVector& psi, const ModelSpec& model, double u, double dt, double dW);

/// Integrates one trajectory. Brownian increments come from the Philox
/// stream (sim.seed, stream); identical inputs give bit-identical output.
Trajectory simulate(const DensityMatrix& rho0, const ModelSpec& model, const TargetSpec& target,
                    const ControllerSpec& ctrl, const SimConfig& sim, std::uint64_t stream = 0);

/// CSV columns: t,u,dY,fidelity_target,purity,v1,v2,v_tilde,lv
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const TargetSpec& target);

namespace kernel {

struct StepWorkspace {
    CMatrix h, ham, lind, diff;
};

struct RawStep {
    double u = 0.0;
    double dY = 0.0;
    bool clipped = false;
    bool rejected = false;
};

/// In-place em_step on a plain matrix.
RawStep em_step(CMatrix& rho, const ModelSpec& model, const CMatrix& rho_d, const ControllerSpec& ctrl,
                double dt, double dW, StepWorkspace& ws);

/// In-place sse_step; returns false on a vanishing norm.
bool sse_step(CVector& psi, const ModelSpec& model, double u, double dt, double dW);

}  // namespace kernel

}  // namespace qfb
