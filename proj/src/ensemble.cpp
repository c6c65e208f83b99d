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

#include "qfb/ensemble.hpp"

#include <cmath>
#include <cstdint>
#include <exception>
#include <iomanip>
#include <limits>
#include <ostream>

namespace qfb {

namespace {

// Absolute slack on the supermartingale test, for records where every
// trajectory moves identically (zero spread).
constexpr double kMonotoneSlack = 1e-12;

struct Sample {
    TrajectoryResult result;
    std::vector<double> t, v1, v2, v_tilde, purity, fidelity;
};

Sample run_one(const EnsembleConfig& cfg, std::size_t index) {
    const Trajectory traj = simulate(cfg.rho0, cfg.model, cfg.target, cfg.controller, cfg.sim, index);
    Sample s;
    s.result.outcome = traj.outcome;
    s.result.valid = traj.valid;
    s.result.diagnostics = traj.diagnostics;
    const CMatrix& rd = cfg.target.rho_d().matrix();
    const std::size_t n = traj.times.size();
    s.t = traj.times;
    s.v1.resize(n);
    s.v2.resize(n);
    s.v_tilde.resize(n);
    s.purity.resize(n);
    s.fidelity.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.v1[i] = traj.lyapunov[i].v1;
        s.v2[i] = traj.lyapunov[i].v2;
        s.v_tilde[i] = traj.lyapunov[i].v_tilde;
        s.purity[i] = purity(traj.states[i]);
        s.fidelity[i] = kernel::trace_product(rd, traj.states[i].matrix());
    }
    s.result.final_fidelity = s.fidelity.empty() ? 0.0 : s.fidelity.back();
    return s;
}

EnsembleStats reduce(const EnsembleConfig& cfg, std::vector<Sample>& samples) {
    EnsembleStats st;
    st.n_trajectories = samples.size();
    st.outcome_counts[Outcome{OutcomeKind::converged_target, -1}.label()] = 0;
    for (std::size_t a = 0; a < cfg.target.antipodal().size(); ++a) {
        st.outcome_counts[Outcome{OutcomeKind::converged_antipodal, static_cast<int>(a)}.label()] = 0;
    }
    st.outcome_counts[Outcome{}.label()] = 0;

    std::vector<const Sample*> valid;
    for (const auto& s : samples) {
        st.trajectories.push_back(s.result);
        if (!s.result.valid) {
            ++st.n_invalid;
            continue;
        }
        valid.push_back(&s);
        ++st.outcome_counts[s.result.outcome.label()];
    }
    st.n_valid = valid.size();
    if (static_cast<double>(st.n_invalid) > 0.01 * static_cast<double>(st.n_trajectories)) {
        throw NumericalError("ensemble: " + std::to_string(st.n_invalid) + " of " +
                             std::to_string(st.n_trajectories) + " trajectories were invalid (limit 1%)");
    }
    if (valid.empty()) return st;

    st.target_frequency = st.frequency(Outcome{OutcomeKind::converged_target, -1}.label());
    st.target_stderr = st.stderr_of(Outcome{OutcomeKind::converged_target, -1}.label());

    const std::size_t n_rec = valid.front()->t.size();
    const double inv = 1.0 / static_cast<double>(valid.size());
    auto& mc = st.mean_curves;
    mc.t = valid.front()->t;
    mc.v1.assign(n_rec, 0.0);
    mc.v2.assign(n_rec, 0.0);
    mc.v_tilde.assign(n_rec, 0.0);
    mc.purity.assign(n_rec, 0.0);
    mc.fidelity.assign(n_rec, 0.0);
    for (const Sample* s : valid) {
        for (std::size_t i = 0; i < n_rec; ++i) {
            mc.v1[i] += s->v1[i] * inv;
            mc.v2[i] += s->v2[i] * inv;
            mc.v_tilde[i] += s->v_tilde[i] * inv;
            mc.purity[i] += s->purity[i] * inv;
            mc.fidelity[i] += s->fidelity[i] * inv;
        }
    }

    // Paired increments of V~ between consecutive records.
    st.max_increase_z = -std::numeric_limits<double>::infinity();
    const double n = static_cast<double>(valid.size());
    for (std::size_t i = 0; i + 1 < n_rec; ++i) {
        double mean = 0.0, m2 = 0.0;
        std::size_t count = 0;
        for (const Sample* s : valid) {
            const double d = s->v_tilde[i + 1] - s->v_tilde[i];
            ++count;
            const double delta = d - mean;
            mean += delta / static_cast<double>(count);
            m2 += delta * (d - mean);
        }
        const double se = valid.size() > 1 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0;
        if (mean > 3.0 * se + kMonotoneSlack) ++st.supermartingale_violations;
        if (se > 0.0) st.max_increase_z = std::max(st.max_increase_z, mean / se);
    }
    if (!std::isfinite(st.max_increase_z)) st.max_increase_z = 0.0;
    return st;
}

}  // namespace

void EnsembleConfig::validate() const {
    if (n_trajectories < 1) throw ValidationError("ensemble.n_trajectories must be >= 1");
    if (rho0.dim() != model.dim()) throw ValidationError("rho0 dimension does not match the model");
    if (target.rho_d().dim() != model.dim()) throw ValidationError("target dimension does not match the model");
    sim.validate(model);
}

double EnsembleStats::frequency(const std::string& label) const {
    const auto it = outcome_counts.find(label);
    if (it == outcome_counts.end() || n_valid == 0) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(n_valid);
}

double EnsembleStats::stderr_of(const std::string& label) const {
    if (n_valid == 0) return 0.0;
    const double p = frequency(label);
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n_valid));
}

EnsembleStats run_ensemble(const EnsembleConfig& cfg) {
    cfg.validate();
    std::vector<Sample> samples(cfg.n_trajectories);
    const auto n = static_cast<std::int64_t>(cfg.n_trajectories);
    // Exceptions must not escape an OpenMP region; keep the first one.
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            samples[static_cast<std::size_t>(i)] = run_one(cfg, static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(qfb_ensemble_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return reduce(cfg, samples);
}

EnsembleStats run_ensemble_serial(const EnsembleConfig& cfg) {
    cfg.validate();
    std::vector<Sample> samples;
    samples.reserve(cfg.n_trajectories);
    for (std::size_t i = 0; i < cfg.n_trajectories; ++i) samples.push_back(run_one(cfg, i));
    return reduce(cfg, samples);
}

void write_summary_csv(std::ostream& os, const EnsembleStats& stats) {
    os << "outcome,count,frequency,stderr\n" << std::setprecision(17);
    for (const auto& [label, count] : stats.outcome_counts) {
        os << label << ',' << count << ',' << stats.frequency(label) << ',' << stats.stderr_of(label) << '\n';
    }
    const double n = static_cast<double>(stats.n_trajectories);
    const double p = n > 0.0 ? static_cast<double>(stats.n_invalid) / n : 0.0;
    os << "invalid," << stats.n_invalid << ',' << p << ',' << (n > 0.0 ? std::sqrt(p * (1.0 - p) / n) : 0.0)
       << '\n';
}

void write_mean_curves_csv(std::ostream& os, const EnsembleStats& stats) {
    const auto& mc = stats.mean_curves;
    os << "t,mean_v1,mean_v2,mean_vtilde,mean_purity,mean_fidelity\n" << std::setprecision(17);
    for (std::size_t i = 0; i < mc.t.size(); ++i) {
        os << mc.t[i] << ',' << mc.v1[i] << ',' << mc.v2[i] << ',' << mc.v_tilde[i] << ',' << mc.purity[i] << ','
           << mc.fidelity[i] << '\n';
    }
}

}  // namespace qfb
