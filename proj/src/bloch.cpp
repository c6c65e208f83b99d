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

#include "qfb/bloch.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "qfb/rng.hpp"

namespace qfb::bloch {

namespace {

constexpr double kBallTolerance = 1e-9;
constexpr double kPureTolerance = 1e-9;  // same purity threshold as the general engine

double square_of_sum_residual(const BlochState& b, double k, double ell, double mu, double eta) {
    return k * bloch_control_direction(b, ell) - 2.0 * std::sqrt(mu * eta) / ell * (1.0 - b.z * b.z);
}

void fill_row(LevelsetGrid& g, std::size_t row, double k, double ell, double mu, double eta) {
    const std::size_t r = g.resolution;
    const double step = 2.0 / static_cast<double>(r - 1);
    const double z = -1.0 + step * static_cast<double>(row);
    for (std::size_t col = 0; col < r; ++col) {
        const double y = -1.0 + step * static_cast<double>(col);
        const BlochState b{0.0, y, z};
        g.points[row * r + col] = {y, z, bloch_generator_vtilde(b, k, ell, mu, eta), y * y + z * z <= 1.0};
    }
}

LevelsetGrid empty_grid(std::size_t resolution) {
    if (resolution < 2) throw ValidationError("levelset grid resolution must be >= 2");
    LevelsetGrid g;
    g.resolution = resolution;
    g.points.resize(resolution * resolution);
    return g;
}

}  // namespace

DensityMatrix to_density(const BlochState& b) {
    if (!(b.norm2() <= 1.0 + kBallTolerance)) throw ValidationError("Bloch vector lies outside the unit ball");
    CMatrix m(2, 2);
    m << Complex(0.5 * (1.0 + b.z), 0.0), Complex(0.5 * b.x, -0.5 * b.y), Complex(0.5 * b.x, 0.5 * b.y),
        Complex(0.5 * (1.0 - b.z), 0.0);
    return DensityMatrix::trusted(m);
}

BlochState from_density(const DensityMatrix& rho) {
    if (rho.dim() != 2) throw DimensionError("from_density: Bloch coordinates need a 2x2 density");
    const CMatrix& m = rho.matrix();
    return {2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(), (m(0, 0) - m(1, 1)).real()};
}

BlochState bloch_sme_increment(const BlochState& b, double h_a, double u, double mu, double eta, double dt,
                               double dW) {
    const double s = 2.0 * std::sqrt(mu * eta);
    return {2.0 * (-h_a * b.y - mu * b.x) * dt - s * b.x * b.z * dW,
            2.0 * (h_a * b.x - u * b.z - mu * b.y) * dt - s * b.y * b.z * dW,
            2.0 * u * b.y * dt + s * (1.0 - b.z * b.z) * dW};
}

double bloch_control_direction(const BlochState& b, double ell) { return b.y * (1.0 + 4.0 * b.z / (ell * ell)); }

double bloch_feedback(const BlochState& b, const ControllerSpec& ctrl, double mu, double eta) {
    switch (ctrl.kind) {
        case ControlLaw::open_loop: return 0.0;
        case ControlLaw::linear: return ctrl.k * b.y;
        case ControlLaw::sum_of_squares: return ctrl.k * bloch_control_direction(b, ctrl.ell);
        case ControlLaw::square_of_sum:
        case ControlLaw::tuned:
            return ctrl.k * ctrl.k * bloch_control_direction(b, ctrl.ell) -
                   4.0 * ctrl.k * std::sqrt(mu * eta) / ctrl.ell * (1.0 - b.z * b.z);
    }
    return 0.0;
}

double bloch_generator_vtilde(const BlochState& b, double k, double ell, double mu, double eta) {
    const double s = square_of_sum_residual(b, k, ell, mu, eta);
    return -s * s;
}

LevelsetGrid levelset_grid(double k, double ell, double mu, double eta, std::size_t resolution) {
    LevelsetGrid g = empty_grid(resolution);
    const auto rows = static_cast<std::int64_t>(resolution);
#pragma omp parallel for schedule(static)
    for (std::int64_t row = 0; row < rows; ++row) {
        fill_row(g, static_cast<std::size_t>(row), k, ell, mu, eta);
    }
    return g;
}

LevelsetGrid levelset_grid_serial(double k, double ell, double mu, double eta, std::size_t resolution) {
    LevelsetGrid g = empty_grid(resolution);
    for (std::size_t row = 0; row < resolution; ++row) fill_row(g, row, k, ell, mu, eta);
    return g;
}

void write_levelset_csv(std::ostream& os, const LevelsetGrid& grid) {
    os << "y,z,lv,physical\n" << std::setprecision(17);
    for (const auto& p : grid.points) os << p.y << ',' << p.z << ',' << p.lv << ',' << (p.physical ? 1 : 0) << '\n';
}

std::vector<BlochState> zero_locus(double k, double ell, double mu, double eta, const std::vector<double>& z_values) {
    std::vector<BlochState> out;
    for (double z : z_values) {
        // residual(y) = k y (1 + 4z/l^2) - (2 sqrt(mu eta)/l)(1 - z^2) is affine in y.
        const double slope = k * (1.0 + 4.0 * z / (ell * ell));
        const double offset = 2.0 * std::sqrt(mu * eta) / ell * (1.0 - z * z);
        if (slope == 0.0) continue;
        const double y = offset / slope;
        if (y * y + z * z <= 1.0) out.push_back({0.0, y, z});
    }
    return out;
}

BlochTrajectory bloch_simulate(const BlochState& b0, double h_a, const ControllerSpec& ctrl, double mu,
                               double eta, const SimConfig& sim, std::uint64_t stream) {
    if (!(b0.norm2() <= 1.0 + kBallTolerance)) throw ValidationError("Bloch vector lies outside the unit ball");
    const std::size_t n_steps = sim.n_steps();
    const double sqdt = std::sqrt(sim.dt);
    NormalStream noise(sim.seed, stream);

    BlochTrajectory traj;
    BlochState b = b0;
    auto record = [&](std::size_t step) {
        traj.times.push_back(static_cast<double>(step) * sim.dt);
        traj.states.push_back(b);
        traj.controls.push_back(bloch_feedback(b, ctrl, mu, eta));
    };
    record(0);
    for (std::size_t step = 1; step <= n_steps; ++step) {
        const double dw = sqdt * noise.next();
        const double u = bloch_feedback(b, ctrl, mu, eta);
        // purity = (1 + |b|^2)/2
        const bool pure_flow = eta >= 1.0 && std::abs(0.5 * (1.0 + b.norm2()) - 1.0) <= kPureTolerance;
        const BlochState d = bloch_sme_increment(b, h_a, u, mu, eta, sim.dt, dw);
        BlochState next{b.x + d.x, b.y + d.y, b.z + d.z};
        const double r = std::sqrt(next.norm2());
        // Smallest eigenvalue is (1 - |b|)/2; clipping it to zero maps b to b/|b|.
        if (pure_flow || 0.5 * (1.0 - r) < -1e-9) {
            next = {next.x / r, next.y / r, next.z / r};
        }
        b = next;
        if (step % sim.record_stride == 0 || step == n_steps) record(step);
    }
    return traj;
}

}  // namespace qfb::bloch
