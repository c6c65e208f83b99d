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

#include "qfb/control.hpp"

#include <cmath>

#include "qfb/rng.hpp"

namespace qfb {

namespace {

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
    if (a != b) throw DimensionError(std::string(what) + ": dimension mismatch");
}

// V~ on an arbitrary Hermitian matrix (no density checks).
double v_tilde_raw(const CMatrix& m, const CMatrix& rho_d, const CMatrix& c, const CMatrix& c2, double ell) {
    const double v1 = kernel::trace_product(rho_d, rho_d) - kernel::trace_product(rho_d, m);
    const double mean = kernel::trace_product(c, m);
    const double v2 = kernel::trace_product(c2, m) - mean * mean;
    return v1 + v2 / (ell * ell);
}

}  // namespace

std::string to_string(ControlLaw law) {
    switch (law) {
        case ControlLaw::open_loop: return "open_loop";
        case ControlLaw::linear: return "linear";
        case ControlLaw::sum_of_squares: return "sum_of_squares";
        case ControlLaw::square_of_sum: return "square_of_sum";
        case ControlLaw::tuned: return "tuned";
    }
    return "unknown";
}

ControlLaw control_law_from_string(const std::string& name) {
    for (auto law : {ControlLaw::open_loop, ControlLaw::linear, ControlLaw::sum_of_squares,
                     ControlLaw::square_of_sum, ControlLaw::tuned}) {
        if (to_string(law) == name) return law;
    }
    throw ValidationError("unknown controller kind '" + name + "'");
}

ControllerSpec ControllerSpec::create(ControlLaw kind, double k, double ell) {
    if (!(k > 0.0) || !std::isfinite(k)) throw ValidationError("controller gain k must be finite and > 0");
    if (!(ell > 0.0) || !std::isfinite(ell)) throw ValidationError("controller gain ell must be finite and > 0");
    return ControllerSpec{kind, k, ell};
}

double v1(const DensityMatrix& rho, const TargetSpec& target) {
    require_same_dim(rho.dim(), target.rho_d().dim(), "v1");
    const CMatrix& rd = target.rho_d().matrix();
    return kernel::trace_product(rd, rd) - kernel::trace_product(rd, rho.matrix());
}

double v2(const DensityMatrix& rho, const HermitianMatrix& c) { return variance(c, rho); }

double v_tilde(const DensityMatrix& rho, const TargetSpec& target, const HermitianMatrix& c, double ell) {
    if (!(ell > 0.0)) throw ValidationError("v_tilde: ell must be > 0");
    return v1(rho, target) + v2(rho, c) / (ell * ell);
}

double third_central_moment(const DensityMatrix& rho, const HermitianMatrix& c) {
    require_same_dim(rho.dim(), c.dim(), "third_central_moment");
    const CMatrix c2 = c.matrix() * c.matrix();
    const CMatrix c3 = c2 * c.matrix();
    const double m1 = kernel::trace_product(c.matrix(), rho.matrix());
    const double m2 = kernel::trace_product(c2, rho.matrix());
    const double m3 = kernel::trace_product(c3, rho.matrix());
    return m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1;
}

double lb_v1(const DensityMatrix& rho, const TargetSpec& target, const HermitianMatrix& h_b) {
    require_same_dim(rho.dim(), h_b.dim(), "lb_v1");
    CMatrix k;
    kernel::hamiltonian_drift(h_b.matrix(), rho.matrix(), k);
    return -kernel::trace_product(k, target.rho_d().matrix());
}

double control_direction(const DensityMatrix& rho, const ModelSpec& model, const TargetSpec& target,
                         double ell) {
    require_same_dim(rho.dim(), model.dim(), "control_direction");
    return kernel::control_terms(rho.matrix(), model, target.rho_d().matrix()).direction(ell);
}

double feedback(const DensityMatrix& rho, const ModelSpec& model, const TargetSpec& target,
                const ControllerSpec& ctrl) {
    require_same_dim(rho.dim(), model.dim(), "feedback");
    return kernel::feedback(kernel::control_terms(rho.matrix(), model, target.rho_d().matrix()), model, ctrl);
}

double generator_v(const DensityMatrix& rho, const ModelSpec& model, const TargetSpec& target, double u,
                   double ell) {
    require_same_dim(rho.dim(), model.dim(), "generator_v");
    const auto t = kernel::control_terms(rho.matrix(), model, target.rho_d().matrix());
    const double l2 = ell * ell;
    return -t.direction(ell) * u - 4.0 * model.mu() * model.eta() * t.variance * t.variance / l2;
}

LyapunovReport lyapunov_report(const DensityMatrix& rho, const ModelSpec& model, const TargetSpec& target,
                               const ControllerSpec& ctrl, double u) {
    const auto t = kernel::control_terms(rho.matrix(), model, target.rho_d().matrix());
    const double l2 = ctrl.ell * ctrl.ell;
    LyapunovReport r;
    r.v1 = v1(rho, target);
    r.v2 = t.variance;
    r.v_tilde = r.v1 + r.v2 / l2;
    r.lb_v = -t.direction(ctrl.ell);
    r.l0_v = -4.0 * model.mu() * model.eta() * t.variance * t.variance / l2;
    r.lv_closed_loop = r.l0_v + r.lb_v * u;
    r.third_moment = third_central_moment(rho, model.c());
    return r;
}

GeneratorEstimate generator_v_montecarlo_check(const DensityMatrix& rho, const ModelSpec& model,
                                               const TargetSpec& target, double u, double ell,
                                               std::size_t n_samples, double dt, std::uint64_t seed) {
    require_same_dim(rho.dim(), model.dim(), "generator_v_montecarlo_check");
    if (n_samples < 1000) throw ValidationError("generator_v_montecarlo_check: need n_samples >= 1000");
    if (!(dt > 0.0) || dt > 1e-3) throw ValidationError("generator_v_montecarlo_check: need 0 < dt <= 1e-3");

    const CMatrix& r = rho.matrix();
    const CMatrix& c = model.c().matrix();
    const CMatrix& c2 = model.c_squared();
    const CMatrix& rd = target.rho_d().matrix();
    const CMatrix h = model.h_a().matrix() + u * model.h_b().matrix();

    CMatrix ham, lind, diff;
    kernel::hamiltonian_drift(h, r, ham);
    kernel::lindblad_drift(c, c2, r, model.mu(), lind);
    kernel::diffusion(c, r, std::sqrt(model.mu() * model.eta()), diff);
    const CMatrix base = r + (ham + lind) * dt;
    const double v0 = v_tilde_raw(r, rd, c, c2, ell);

    NormalStream noise(seed, 0);
    const double sqdt = std::sqrt(dt);
    double mean = 0.0, m2 = 0.0;  // Welford
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double dw = sqdt * noise.next();
        const double vp = v_tilde_raw(base + diff * dw, rd, c, c2, ell);
        const double vm = v_tilde_raw(base - diff * dw, rd, c, c2, ell);
        const double sample = (0.5 * (vp + vm) - v0) / dt;
        const double delta = sample - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (sample - mean);
    }
    const double n = static_cast<double>(n_samples);
    return {mean, std::sqrt(m2 / (n - 1.0) / n)};
}

namespace kernel {

ControlTerms control_terms(const CMatrix& rho, const ModelSpec& model, const CMatrix& rho_d) {
    const CMatrix& c = model.c().matrix();
    const CMatrix& c2 = model.c_squared();
    CMatrix k;
    hamiltonian_drift(model.h_b().matrix(), rho, k);

    ControlTerms t;
    t.mean_c = trace_product(c, rho);
    t.variance = trace_product(c2, rho) - t.mean_c * t.mean_c;
    t.lin = trace_product(k, rho_d);
    t.quad = 2.0 * t.mean_c * trace_product(k, c) - trace_product(k, c2);
    t.fidelity = trace_product(rho_d, rho);
    return t;
}

double feedback(const ControlTerms& t, const ModelSpec& model, const ControllerSpec& ctrl) {
    switch (ctrl.kind) {
        case ControlLaw::open_loop: return 0.0;
        case ControlLaw::linear: return ctrl.k * t.lin;
        case ControlLaw::sum_of_squares: return ctrl.k * t.direction(ctrl.ell);
        case ControlLaw::square_of_sum:
        case ControlLaw::tuned:
            return ctrl.k * ctrl.k * t.direction(ctrl.ell) -
                   4.0 * ctrl.k * std::sqrt(model.mu() * model.eta()) / ctrl.ell * t.variance;
    }
    return 0.0;
}

}  // namespace kernel

}  // namespace qfb
