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

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qfb/control.hpp"
#include "qfb/hermitian.hpp"
#include "qfb/integrator.hpp"
#include "qfb/sme.hpp"

namespace qfb {

struct EnsembleConfig {
    std::size_t n_trajectories = 1;
    ModelSpec model;
    TargetSpec target;
    ControllerSpec controller;
    SimConfig sim;
    DensityMatrix rho0;
    std::string output_dir = ".";

    /// Throws ValidationError on n_trajectories == 0, a rho0 of the wrong
    /// dimension or an invalid SimConfig.
    void validate() const;
};

/// Per-trajectory facts kept after reduction.
struct TrajectoryResult {
    Outcome outcome;
    bool valid = true;
    StepDiagnostics diagnostics;
    double final_fidelity = 0.0;
};

struct MeanCurves {
    std::vector<double> t;
    std::vector<double> v1, v2, v_tilde, purity, fidelity;
};

struct EnsembleStats {
    std::size_t n_trajectories = 0;
    std::size_t n_valid = 0;
    std::size_t n_invalid = 0;
    /// Outcome label -> count over valid trajectories. Every possible label
    /// is present, zero counts included.
    std::map<std::string, std::size_t> outcome_counts;
    double target_frequency = 0.0;
    double target_stderr = 0.0;  ///< binomial, sqrt(p (1 - p) / n_valid)
    MeanCurves mean_curves;
    /// Number of consecutive record pairs whose mean increase of V~
    /// (paired over trajectories) exceeds 3 standard errors.
    std::size_t supermartingale_violations = 0;
    /// Largest z-score of those paired increases; negative when E[V~] only falls.
    double max_increase_z = 0.0;
    std::vector<TrajectoryResult> trajectories;

    /// count / n_valid and its binomial standard error; 0 for unknown labels.
    double frequency(const std::string& label) const;
    double stderr_of(const std::string& label) const;
};

/// Runs cfg.n_trajectories independent trajectories, trajectory i on noise
/// stream i of cfg.sim.seed, distributed over OpenMP threads. Results are
/// reduced in index order, so the stats do not depend on the thread count.
/// Invalid trajectories are excluded and counted; more than 1% invalid
/// throws NumericalError.
EnsembleStats run_ensemble(const EnsembleConfig& cfg);

/// Single-threaded reference for run_ensemble; identical output.
EnsembleStats run_ensemble_serial(const EnsembleConfig& cfg);

/// CSV columns: outcome,count,frequency,stderr. A final "invalid" row is
/// relative to n_trajectories; every other row to the valid trajectories.
void write_summary_csv(std::ostream& os, const EnsembleStats& stats);

/// CSV columns: t,mean_v1,mean_v2,mean_vtilde,mean_purity,mean_fidelity
void write_mean_curves_csv(std::ostream& os, const EnsembleStats& stats);

}  // namespace qfb
