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

// JSON run configuration.
//
//   {
//     "model":      {"n": 2, "h_a": M, "h_b": M, "c": M, "mu": 1.0, "eta": 1.0},
//     "target":     {"rho_d": M},                       optional
//     "controller": {"kind": "square_of_sum", "k": 1.0, "ell": 1.0},
//     "sim":        {"dt": 1e-4, "t_final": 1.0, "seed": 0, "record_stride": 1,
//                    "convergence_fidelity": 0.99, "representation": "sme"},
//     "ensemble":   {"n_trajectories": 1000},
//     "rho0":       M,                                  optional, default I/N
//     "output_dir": "out",
//     "tolerances": {"hermitian": 1e-12, ...}           optional
//   }
//
// A matrix M is a list of rows; each entry is [re, im] or a bare real
// number. Without a target the eigenprojector of the largest eigenvalue of
// C is used. Any malformed or inconsistent document raises ValidationError.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qfb/control.hpp"
#include "qfb/ensemble.hpp"
#include "qfb/hermitian.hpp"
#include "qfb/integrator.hpp"
#include "qfb/sme.hpp"

namespace qfb {

/// Parsed but not yet cross-validated document.
struct ConfigDocument {
    Eigen::Index n = 0;
    CMatrix h_a, h_b, c;
    double mu = 0.0;
    double eta = 0.0;
    Tolerances tolerances;
    std::optional<CMatrix> rho_d;
    ControllerSpec controller;
    SimConfig sim;
    std::size_t n_trajectories = 1;
    std::optional<CMatrix> rho0;
    std::string output_dir = ".";
};

ConfigDocument parse_config(std::string_view json_text);
ConfigDocument load_config(const std::string& path);

/// Model checks on the document without throwing (the validate command).
/// Hermiticity failures are reported as checks too.
std::vector<ModelCheck> check_document(const ConfigDocument& doc);

ModelSpec build_model(const ConfigDocument& doc);
TargetSpec build_target(const ConfigDocument& doc, const ModelSpec& model);
EnsembleConfig build_ensemble_config(const ConfigDocument& doc);

/// Reverse of the matrix literal, for writing configs from code.
std::string matrix_to_json(const CMatrix& m);

}  // namespace qfb
