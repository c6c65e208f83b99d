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

#include <gtest/gtest.h>

#include <cmath>

#include "../support/fixtures.hpp"
#include "qfb/control.hpp"

using namespace qfb;
using namespace qfb::testing;

namespace {

DensityMatrix bloch_density(double x, double y, double z) {
    return DensityMatrix(CMatrix(0.5 * (CMatrix::Identity(2, 2) + x * pauli_x() + y * pauli_y() + z * pauli_z())));
}

}  // namespace

TEST(control, law_names_round_trip) {
    for (auto law : {ControlLaw::open_loop, ControlLaw::linear, ControlLaw::sum_of_squares, ControlLaw::square_of_sum,
                     ControlLaw::tuned}) {
        EXPECT_EQ(control_law_from_string(to_string(law)), law);
    }
    EXPECT_THROW(control_law_from_string("bang_bang"), ValidationError);
    EXPECT_THROW(ControllerSpec::create(ControlLaw::linear, 0.0, 1.0), ValidationError);
    EXPECT_THROW(ControllerSpec::create(ControlLaw::linear, 1.0, -1.0), ValidationError);
}

TEST(control, lyapunov_terms_at_eigenstates) {
    const auto model = two_level(1.0, 0.5);
    const auto target = top_target(model);
    const auto rd = DensityMatrix::diagonal({1.0, 0.0});
    const auto anti = DensityMatrix::diagonal({0.0, 1.0});
    EXPECT_NEAR(v1(rd, target), 0.0, 1e-15);
    EXPECT_NEAR(v1(anti, target), 1.0, 1e-15);
    EXPECT_NEAR(v2(anti, model.c()), 0.0, 1e-15);
    EXPECT_NEAR(v_tilde(DensityMatrix::maximally_mixed(2), target, model.c(), 2.0), 0.5 + 1.0 / 4.0, 1e-15);
    EXPECT_THROW(v_tilde(rd, target, model.c(), 0.0), ValidationError);
}

TEST(control, third_moment_closed_form) {
    // C = sz, rho = diag(p, 1-p): m = 2p - 1, <C^2> = 1, <C^3> = m.
    const HermitianMatrix c(pauli_z());
    for (double p : {0.1, 0.5, 0.8}) {
        const double m = 2.0 * p - 1.0;
        EXPECT_NEAR(third_central_moment(DensityMatrix::diagonal({p, 1.0 - p}), c), -2.0 * m + 2.0 * m * m * m, 1e-14);
    }
}

// Two-level oracle: T_l = y (1 + 4 z / l^2), V2 = 1 - z^2.
TEST(control, two_level_direction_closed_form) {
    const auto model = two_level(1.0, 0.5);
    const auto target = top_target(model);
    NormalStream g(21, 0);
    for (int i = 0; i < 50; ++i) {
        const double x = uniform(g, -0.5, 0.5), y = uniform(g, -0.5, 0.5), z = uniform(g, -0.7, 0.7);
        const double ell = uniform(g, 0.3, 3.0);
        const auto rho = bloch_density(x, y, z);
        EXPECT_NEAR(control_direction(rho, model, target, ell), y * (1.0 + 4.0 * z / (ell * ell)), 1e-13);
        EXPECT_NEAR(lb_v1(rho, target, model.h_b()), -y, 1e-13);
        EXPECT_NEAR(v2(rho, model.c()), 1.0 - z * z, 1e-13);
    }
}

TEST(control, feedback_worked_examples) {
    // mu eta = 1/2, k = l = 1, y = z = 0: u = -4 sqrt(1/2).
    const auto model = two_level(1.0, 0.5);
    const auto target = top_target(model);
    const auto mixed = DensityMatrix::maximally_mixed(2);
    const auto sq = ControllerSpec::create(ControlLaw::square_of_sum, 1.0, 1.0);
    EXPECT_NEAR(feedback(mixed, model, target, sq), -4.0 * std::sqrt(0.5), 1e-14);
    EXPECT_NEAR(generator_v(mixed, model, target, feedback(mixed, model, target, sq), 1.0), -2.0, 1e-14);
    // tuned is an alias of square_of_sum.
    EXPECT_EQ(feedback(mixed, model, target, sq),
              feedback(mixed, model, target, ControllerSpec::create(ControlLaw::tuned, 1.0, 1.0)));

    // linear, k = 2, y = 0.3: u = 0.6.
    const auto lin = ControllerSpec::create(ControlLaw::linear, 2.0, 1.0);
    EXPECT_NEAR(feedback(bloch_density(0.0, 0.3, 0.0), model, target, lin), 0.6, 1e-14);
    EXPECT_EQ(feedback(bloch_density(0.2, 0.3, 0.1), model, target, ControllerSpec{}), 0.0);
}

TEST(control, square_of_sum_completes_the_square) {
    NormalStream g(22, 0);
    for (const auto& model : {two_level(0.7, 0.4), three_level(1.3, 0.9)}) {
        const auto target = top_target(model);
        for (int i = 0; i < 30; ++i) {
            const auto rho = random_density(model.dim(), g);
            const double k = uniform(g, 0.2, 3.0), ell = uniform(g, 0.2, 3.0);
            const auto ctrl = ControllerSpec::create(ControlLaw::square_of_sum, k, ell);
            const double t = control_direction(rho, model, target, ell);
            const double w = v2(rho, model.c());
            const double s = k * t - 2.0 * std::sqrt(model.mu() * model.eta()) * w / ell;
            const double lv = generator_v(rho, model, target, feedback(rho, model, target, ctrl), ell);
            EXPECT_NEAR(lv, -s * s, 1e-12 * (1.0 + s * s));

            const auto rep = lyapunov_report(rho, model, target, ctrl, feedback(rho, model, target, ctrl));
            EXPECT_NEAR(rep.lv_closed_loop, lv, 1e-13);
            EXPECT_NEAR(rep.lb_v, -t, 1e-13);
            EXPECT_NEAR(rep.l0_v, -4.0 * model.mu() * model.eta() * w * w / (ell * ell), 1e-13);
        }
    }
}

TEST(control, generator_agrees_with_finite_difference_estimate) {
    const auto model = three_level(0.9, 0.6);
    const auto target = top_target(model);
    NormalStream g(23, 0);
    const auto rho = random_density(3, g);
    const double u = 0.35, ell = 1.4;
    const auto est = generator_v_montecarlo_check(rho, model, target, u, ell, 20000, 1e-4, 5);
    const double exact = generator_v(rho, model, target, u, ell);
    EXPECT_NEAR(est.estimate, exact, 4.0 * est.standard_error + 1e-3 * (1.0 + std::abs(exact)));
    EXPECT_THROW(generator_v_montecarlo_check(rho, model, target, u, ell, 10, 1e-4, 5), ValidationError);
}
