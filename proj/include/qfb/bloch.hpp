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

// Two-level closed forms in Bloch coordinates, rho = (I + x sx + y sy + z sz)/2,
// for C = sz, H_a = h_a sz, H_b = sx, rho_d = diag(1, 0).
//
// The general engine is normative; these expressions are its N = 2 image:
//
//   dx = 2(-h_a y - mu x) dt - 2 sqrt(mu eta) x z dW
//   dy = 2( h_a x - u z - mu y) dt - 2 sqrt(mu eta) y z dW
//   dz = 2 u y dt + 2 sqrt(mu eta) (1 - z^2) dW
//
// The factor 2 comes from d rho = (dx sx + dy sy + dz sz)/2: the Pauli
// coefficients of -i[H, rho], D and G are half the Bloch increments. With
// V1 = (1 - z)/2, V2 = 1 - z^2 the generator is
//
//   L V~ = -y (1 + 4z/l^2) u - (4 mu eta / l^2) (1 - z^2)^2.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "qfb/control.hpp"
#include "qfb/hermitian.hpp"
#include "qfb/integrator.hpp"

namespace qfb::bloch {

struct BlochState {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm2() const { return x * x + y * y + z * z; }
};

/// Throws ValidationError when x^2 + y^2 + z^2 > 1 + 1e-9.
DensityMatrix to_density(const BlochState& b);
/// Throws DimensionError unless rho is 2x2.
BlochState from_density(const DensityMatrix& rho);

/// Euler-Maruyama increment (dx, dy, dz) of the two-level SME.
BlochState bloch_sme_increment(const BlochState& b, double h_a, double u, double mu, double eta, double dt,
                               double dW);

/// y (1 + 4 z / l^2).
double bloch_control_direction(const BlochState& b, double ell);

double bloch_feedback(const BlochState& b, const ControllerSpec& ctrl, double mu, double eta);

/// Closed-loop L V~ under the square_of_sum law:
/// -(k y (1 + 4z/l^2) - (2 sqrt(mu eta)/l)(1 - z^2))^2.
double bloch_generator_vtilde(const BlochState& b, double k, double ell, double mu, double eta);

struct LevelsetPoint {
    double y = 0.0;
    double z = 0.0;
    double lv = 0.0;
    bool physical = false;  ///< y^2 + z^2 <= 1
};

struct LevelsetGrid {
    std::size_t resolution = 0;
    std::vector<LevelsetPoint> points;  ///< row-major: z outer, y inner
};

/// Closed-loop generator over (y, z) in [-1, 1]^2, rows evaluated in
/// parallel. Throws ValidationError when resolution < 2.
LevelsetGrid levelset_grid(double k, double ell, double mu, double eta, std::size_t resolution = 201);

/// Single-threaded reference for levelset_grid.
LevelsetGrid levelset_grid_serial(double k, double ell, double mu, double eta, std::size_t resolution = 201);

/// CSV columns: y,z,lv,physical
void write_levelset_csv(std::ostream& os, const LevelsetGrid& grid);

/// Points (y, z) inside the unit disk where the square_of_sum generator
/// vanishes, one root per sampled z (the completed sum is linear in y).
std::vector<BlochState> zero_locus(double k, double ell, double mu, double eta, const std::vector<double>& z_values);

struct BlochTrajectory {
    std::vector<double> times;
    std::vector<BlochState> states;
    std::vector<double> controls;
};

/// Integrates the Bloch equations with the same noise stream, step rule and
/// projection as qfb::simulate on the matching N = 2 model.
BlochTrajectory bloch_simulate(const BlochState& b0, double h_a, const ControllerSpec& ctrl, double mu,
                               double eta, const SimConfig& sim, std::uint64_t stream = 0);

}  // namespace qfb::bloch
