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

#include "qfb/integrator.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "qfb/rng.hpp"

namespace qfb {

namespace {

// Purity threshold above which an eta = 1 state is treated as pure.
constexpr double kPureTolerance = 1e-9;

bool is_diagonal(const CMatrix& m, double tol) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (i != j && std::abs(m(i, j)) > tol) return false;
    return true;
}

double off_diagonal_norm(const CMatrix& m) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (i != j) s += std::norm(m(i, j));
    return std::sqrt(s);
}

// Tracks diagnostics that need the state in the eigenbasis of C.
class CoherenceMeter {
   public:
    explicit CoherenceMeter(const ModelSpec& model)
        : basis_(model.c_eigenbasis()), diagonal_c_(is_diagonal(model.c().matrix(), 0.0)) {}

    double operator()(const CMatrix& rho) const {
        if (diagonal_c_) return off_diagonal_norm(rho);
        return off_diagonal_norm(basis_.adjoint() * rho * basis_);
    }

   private:
    const CMatrix& basis_;
    bool diagonal_c_;
};

}  // namespace

std::string to_string(Representation r) { return r == Representation::sme ? "sme" : "sse"; }

Representation representation_from_string(const std::string& name) {
    if (name == "sme") return Representation::sme;
    if (name == "sse") return Representation::sse;
    throw ValidationError("unknown representation '" + name + "' (expected sme or sse)");
}

void SimConfig::validate(const ModelSpec& model) const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("sim.dt must be > 0");
    if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ValidationError("sim.t_final must be > 0");
    if (dt > t_final) throw ValidationError("sim.dt must not exceed sim.t_final");
    if (record_stride < 1) throw ValidationError("sim.record_stride must be >= 1");
    if (!(convergence_fidelity > 0.0 && convergence_fidelity < 1.0)) {
        throw ValidationError("sim.convergence_fidelity must lie in (0, 1)");
    }
    if (representation == Representation::sse && model.eta() < 1.0) {
        throw ValidationError("the sse representation requires eta = 1");
    }
}

std::size_t SimConfig::n_steps() const { return static_cast<std::size_t>(std::llround(t_final / dt)); }

std::string Outcome::label() const {
    switch (kind) {
        case OutcomeKind::converged_target: return "converged_target";
        case OutcomeKind::converged_antipodal: return "converged_antipodal_" + std::to_string(antipodal_index);
        case OutcomeKind::undetermined: return "undetermined";
    }
    return "undetermined";
}

Outcome classify(const DensityMatrix& rho, const TargetSpec& target, double threshold) {
    if (kernel::trace_product(target.rho_d().matrix(), rho.matrix()) >= threshold) {
        return {OutcomeKind::converged_target, -1};
    }
    const auto& anti = target.antipodal();
    for (std::size_t a = 0; a < anti.size(); ++a) {
        if (kernel::trace_product(anti[a].matrix(), rho.matrix()) >= threshold) {
            return {OutcomeKind::converged_antipodal, static_cast<int>(a)};
        }
    }
    return {};
}

EmStep em_step(const DensityMatrix& rho, const ModelSpec& model, const TargetSpec& target,
               const ControllerSpec& ctrl, double dt, double dW) {
    if (rho.dim() != model.dim()) throw DimensionError("em_step: dimension mismatch");
    if (!(dt > 0.0)) throw ValidationError("em_step: dt must be > 0");
    if (!std::isfinite(dW)) throw ValidationError("em_step: dW must be finite");
    CMatrix work = rho.matrix();
    kernel::StepWorkspace ws;
    const auto r = kernel::em_step(work, model, target.rho_d().matrix(), ctrl, dt, dW, ws);
    return {DensityMatrix::trusted(work), r.u, r.dY, r.clipped, r.rejected};
}

StateVector sse_step(const StateVector& psi, const ModelSpec& model, double u, double dt, double dW) {
    if (psi.dim() != model.dim()) throw DimensionError("sse_step: dimension mismatch");
    if (model.eta() < 1.0) throw ValidationError("sse_step requires eta = 1");
    CVector v = psi.amplitudes();
    if (!kernel::sse_step(v, model, u, dt, dW)) throw NumericalError("sse_step: state norm vanished");
    return StateVector(v);
}

Trajectory simulate(const DensityMatrix& rho0, const ModelSpec& model, const TargetSpec& target,
                    const ControllerSpec& ctrl, const SimConfig& sim, std::uint64_t stream) {
    if (rho0.dim() != model.dim()) throw DimensionError("simulate: rho0 dimension mismatch");
    sim.validate(model);

    const bool use_sse = sim.representation == Representation::sse;
    const CMatrix& rho_d = target.rho_d().matrix();
    const std::size_t n_steps = sim.n_steps();
    const double sqdt = std::sqrt(sim.dt);
    const CoherenceMeter coherence(model);

    CMatrix rho = rho0.matrix();
    CVector psi;
    if (use_sse) {
        if (std::abs(purity(rho0) - 1.0) > kPureTolerance) {
            throw ValidationError("the sse representation requires a pure initial state");
        }
        psi = kernel::leading_eigenvector(rho0.matrix());
        rho = psi * psi.adjoint();
    }

    Trajectory traj;
    const std::size_t n_records = n_steps / sim.record_stride + 2;
    traj.times.reserve(n_records);
    traj.states.reserve(n_records);
    traj.controls.reserve(n_records);
    traj.records.reserve(n_records);
    traj.lyapunov.reserve(n_records);

    double pending_dy = 0.0;
    auto record = [&](std::size_t step) {
        const auto state = DensityMatrix::trusted(rho);
        const double u = kernel::feedback(kernel::control_terms(rho, model, rho_d), model, ctrl);
        traj.times.push_back(static_cast<double>(step) * sim.dt);
        traj.controls.push_back(u);
        traj.records.push_back(pending_dy);
        traj.lyapunov.push_back(lyapunov_report(state, model, target, ctrl, u));
        traj.states.push_back(state);
        pending_dy = 0.0;
    };

    auto& diag = traj.diagnostics;
    diag.max_coherence = coherence(rho);
    record(0);

    NormalStream noise(sim.seed, stream);
    kernel::StepWorkspace ws;
    for (std::size_t step = 1; step <= n_steps; ++step) {
        const double dw = sqdt * noise.next();
        if (use_sse) {
            const auto terms = kernel::control_terms(rho, model, rho_d);
            const double u = kernel::feedback(terms, model, ctrl);
            pending_dy += std::sqrt(model.eta()) * terms.mean_c * sim.dt + dw;
            diag.max_abs_control = std::max(diag.max_abs_control, std::abs(u));
            if (!kernel::sse_step(psi, model, u, sim.dt, dw)) {
                ++diag.rejected_steps;
            } else {
                rho.noalias() = psi * psi.adjoint();
            }
        } else {
            const auto r = kernel::em_step(rho, model, rho_d, ctrl, sim.dt, dw, ws);
            pending_dy += r.dY;
            diag.max_abs_control = std::max(diag.max_abs_control, std::abs(r.u));
            if (r.clipped) ++diag.clipped_steps;
            if (r.rejected) ++diag.rejected_steps;
        }
        ++diag.steps;
        diag.max_coherence = std::max(diag.max_coherence, coherence(rho));
        if (step % sim.record_stride == 0 || step == n_steps) record(step);
    }

    traj.outcome = classify(traj.states.back(), target, sim.convergence_fidelity);
    traj.valid = static_cast<double>(diag.rejected_steps) <= 1e-3 * static_cast<double>(diag.steps);
    return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const TargetSpec& target) {
    os << "t,u,dY,fidelity_target,purity,v1,v2,v_tilde,lv\n";
    os << std::setprecision(17);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const auto& s = traj.states[i];
        const auto& l = traj.lyapunov[i];
        os << traj.times[i] << ',' << traj.controls[i] << ',' << traj.records[i] << ','
           << kernel::trace_product(target.rho_d().matrix(), s.matrix()) << ',' << purity(s) << ',' << l.v1
           << ',' << l.v2 << ',' << l.v_tilde << ',' << l.lv_closed_loop << '\n';
    }
}

namespace kernel {

RawStep em_step(CMatrix& rho, const ModelSpec& model, const CMatrix& rho_d, const ControllerSpec& ctrl,
                double dt, double dW, StepWorkspace& ws) {
    const auto terms = control_terms(rho, model, rho_d);
    RawStep out;
    out.u = feedback(terms, model, ctrl);
    out.dY = std::sqrt(model.eta()) * terms.mean_c * dt + dW;

    ws.h = model.h_a().matrix();
    if (out.u != 0.0) ws.h += out.u * model.h_b().matrix();
    hamiltonian_drift(ws.h, rho, ws.ham);
    lindblad_drift(model.c().matrix(), model.c_squared(), rho, model.mu(), ws.lind);
    diffusion(model.c().matrix(), rho, std::sqrt(model.mu() * model.eta()), ws.diff);

    const bool pure_flow = model.eta() >= 1.0 && std::abs(rho.squaredNorm() - 1.0) <= kPureTolerance;

    CMatrix next = rho + (ws.ham + ws.lind) * dt + ws.diff * dW;
    try {
        if (pure_flow) {
            symmetrize(next);
            out.clipped = !is_psd(next, model.tolerances().psd);
            if (!(next.trace().real() > 0.0)) throw NumericalError("non-positive trace");
            project_to_pure(next);
        } else {
            out.clipped = project_to_density(next, model.tolerances().psd).clipped;
        }
        rho = std::move(next);
    } catch (const NumericalError&) {
        out.rejected = true;
    }
    return out;
}

bool sse_step(CVector& psi, const ModelSpec& model, double u, double dt, double dW) {
    const CMatrix& c = model.c().matrix();
    const double mean = vector_expectation(c, psi);
    const CVector a_psi = c * psi - mean * psi;
    const CVector a2_psi = c * a_psi - mean * a_psi;
    const CVector h_psi = model.h_a().matrix() * psi + u * (model.h_b().matrix() * psi);
    CVector next = psi + (Complex(0.0, -1.0) * h_psi - 0.5 * model.mu() * a2_psi) * dt +
                   std::sqrt(model.mu()) * a_psi * dW;
    const double n = next.norm();
    if (!(n > 1e-300) || !std::isfinite(n)) return false;
    psi = next / n;
    return true;
}

}  // namespace kernel

}  // namespace qfb
