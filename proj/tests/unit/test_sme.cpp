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

#include <algorithm>

#include "../support/fixtures.hpp"
#include "qfb/sme.hpp"

using namespace qfb;
using namespace qfb::testing;

namespace {

DensityMatrix bloch_density(double x, double y, double z) {
    const CMatrix m = 0.5 * (CMatrix::Identity(2, 2) + x * pauli_x() + y * pauli_y() + z * pauli_z());
    return DensityMatrix(m);
}

bool failed(const std::vector<ModelCheck>& checks, const std::string& name) {
    return std::any_of(checks.begin(), checks.end(), [&](const auto& c) { return c.name == name && !c.passed; });
}

}  // namespace

TEST(model, accepts_canonical_two_level) { EXPECT_NO_THROW(two_level(1.0, 0.5)); }

TEST(model, reports_each_failed_check) {
    const HermitianMatrix sz(pauli_z()), sx(pauli_x());
    EXPECT_TRUE(failed(check_model(sx, sx, sz, 1.0, 1.0), "[H_a, C] = 0"));
    EXPECT_TRUE(failed(check_model(sz, sx, HermitianMatrix::identity(2), 1.0, 1.0), "spectrum of C non-degenerate"));
    EXPECT_TRUE(failed(check_model(sz, sz, sz, 1.0, 1.0), "Graph(H_b) connected"));
    EXPECT_TRUE(failed(check_model(sz, sx, sz, 0.0, 1.0), "mu > 0"));
    EXPECT_TRUE(failed(check_model(sz, sx, sz, 1.0, 1.5), "eta in (0, 1]"));
    EXPECT_TRUE(failed(check_model(sz, sx, sz, 1.0, 0.0), "eta in (0, 1]"));
    EXPECT_TRUE(failed(check_model(HermitianMatrix::identity(3), sx, sz, 1.0, 1.0), "dimensions"));
    EXPECT_THROW(ModelSpec::create(sx, sx, sz, 1.0, 1.0), ValidationError);
}

TEST(model, graph_connectivity_in_eigenbasis_of_c) {
    // Chain 1-2-3 is connected even though (H_b)_13 = 0.
    CMatrix hb = CMatrix::Zero(3, 3);
    hb(0, 1) = hb(1, 0) = 1.0;
    hb(1, 2) = hb(2, 1) = 1.0;
    const auto c = HermitianMatrix::diagonal({1.0, 0.0, -1.0});
    EXPECT_FALSE(failed(check_model(c, HermitianMatrix(hb), c, 1.0, 1.0), "Graph(H_b) connected"));
    hb(1, 2) = hb(2, 1) = 0.0;
    EXPECT_TRUE(failed(check_model(c, HermitianMatrix(hb), c, 1.0, 1.0), "Graph(H_b) connected"));
}

TEST(target, antipodal_states_for_three_levels) {
    const auto model = three_level(1.0, 1.0);
    const auto t = TargetSpec::create(model, DensityMatrix::diagonal({1.0, 0.0, 0.0}));
    ASSERT_EQ(t.antipodal().size(), 2u);
    std::vector<std::vector<double>> diags;
    for (const auto& a : t.antipodal()) {
        diags.push_back({a.matrix()(0, 0).real(), a.matrix()(1, 1).real(), a.matrix()(2, 2).real()});
    }
    std::sort(diags.begin(), diags.end());
    EXPECT_EQ(diags[0], (std::vector<double>{0.0, 0.0, 1.0}));
    EXPECT_EQ(diags[1], (std::vector<double>{0.0, 1.0, 0.0}));
    EXPECT_THROW(TargetSpec::create(model, DensityMatrix::maximally_mixed(3)), ValidationError);
    EXPECT_THROW(TargetSpec::create(two_level(1.0, 1.0), bloch_density(1.0, 0.0, 0.0)), ValidationError);
}

// Pauli coefficients for rho = (I + x sx + y sy + z sz)/2, C = sz, H = h sz:
//   -i[H, rho] = h (x sy - y sx),  D = -mu (x sx + y sy),
//   G = sqrt(mu eta) (-x z sx - y z sy + (1 - z^2) sz).
TEST(dynamics, two_level_terms_by_hand) {
    const double x = 0.3, y = -0.4, z = 0.5, h = 0.7, mu = 1.3, eta = 0.6;
    const auto rho = bloch_density(x, y, z);
    const HermitianMatrix hz(h * pauli_z()), sz(pauli_z());

    EXPECT_TRUE(hamiltonian_drift(hz, rho).matrix().isApprox(h * (x * pauli_y() - y * pauli_x()), 1e-14));
    EXPECT_TRUE(lindblad_drift(sz, rho, mu).matrix().isApprox(-mu * (x * pauli_x() + y * pauli_y()), 1e-14));
    const CMatrix g = std::sqrt(mu * eta) * (-x * z * pauli_x() - y * z * pauli_y() + (1.0 - z * z) * pauli_z());
    EXPECT_TRUE(diffusion(sz, rho, mu, eta).matrix().isApprox(g, 1e-14));
    EXPECT_NEAR(measurement_increment(rho, sz, eta, 0.01, 0.02), std::sqrt(eta) * z * 0.01 + 0.02, 1e-15);
}

TEST(dynamics, increments_are_traceless_and_hermitian) {
    NormalStream g(9, 0);
    const auto model = three_level(0.8, 0.7);
    for (int i = 0; i < 20; ++i) {
        const auto rho = random_density(3, g);
        for (const auto& m : {hamiltonian_drift(model.h_b(), rho), lindblad_drift(model.c(), rho, model.mu()),
                              diffusion(model.c(), rho, model.mu(), model.eta())}) {
            EXPECT_NEAR(std::abs(m.matrix().trace()), 0.0, 1e-14);
            EXPECT_NEAR((m.matrix() - m.matrix().adjoint()).norm(), 0.0, 1e-14);
        }
    }
}

TEST(dynamics, state_vector_equation_matches_density_equation) {
    // For pure rho = |psi><psi| the SME drift equals d(psi psi^dagger) from
    // the SSE up to the Ito correction (mu/... terms cancel in expectation):
    // drift_sme = a psi^dagger + psi a^dagger + b b^dagger with a, b the SSE
    // drift and diffusion.
    NormalStream g(10, 0);
    const auto model = three_level(1.1, 1.0);
    for (int i = 0; i < 10; ++i) {
        const auto rho = random_pure(3, g);
        const StateVector psi(kernel::leading_eigenvector(rho.matrix()));
        const double u = 0.4;
        const CVector a = sse_drift(psi, model, u);
        const CVector b = sse_diffusion(psi, model.c(), model.mu());
        const CVector& v = psi.amplitudes();
        const CMatrix from_sse = a * v.adjoint() + v * a.adjoint() + b * b.adjoint();
        const HermitianMatrix h = HermitianMatrix::symmetrized(model.h_a().matrix() + u * model.h_b().matrix());
        const CMatrix from_sme =
            hamiltonian_drift(h, rho).matrix() + lindblad_drift(model.c(), rho, model.mu()).matrix();
        EXPECT_TRUE(from_sse.isApprox(from_sme, 1e-12));
        // Diffusion: b psi^dagger + psi b^dagger = G.
        EXPECT_TRUE((b * v.adjoint() + v * b.adjoint()).isApprox(diffusion(model.c(), rho, model.mu(), 1.0).matrix(), 1e-12));
    }
    EXPECT_THROW(sse_drift(StateVector(CVector::Unit(2, 0)), two_level(1.0, 0.5), 0.0), ValidationError);
}

TEST(dynamics, state_vector_validation) {
    EXPECT_THROW(StateVector(CVector::Ones(2)), ValidationError);
    EXPECT_NEAR(StateVector::normalized(CVector::Ones(2)).amplitudes().norm(), 1.0, 1e-15);
}

// Brute-force Ito expansion of tr(rho^2): drift 2 tr(rho F) + tr(G^2),
// diffusion 2 tr(rho G). Both vanish on pure states when eta = 1.
TEST(dynamics, purity_ito_expansion) {
    NormalStream g(12, 0);
    for (const auto& model : {two_level(0.9, 1.0), three_level(1.4, 1.0)}) {
        for (int i = 0; i < 10; ++i) {
            const auto rho = random_pure(model.dim(), g);
            const double u = g.next();
            const HermitianMatrix h = HermitianMatrix::symmetrized(model.h_a().matrix() + u * model.h_b().matrix());
            const CMatrix f = hamiltonian_drift(h, rho).matrix() + lindblad_drift(model.c(), rho, model.mu()).matrix();
            const CMatrix gg = diffusion(model.c(), rho, model.mu(), 1.0).matrix();
            EXPECT_NEAR(2.0 * kernel::trace_product(rho.matrix(), f) + kernel::trace_product(gg, gg), 0.0, 1e-12);
            EXPECT_NEAR(2.0 * kernel::trace_product(rho.matrix(), gg), 0.0, 1e-12);
        }
    }
    // eta < 1 on a pure state: purity drift is -2 mu (1 - eta) Var(C). Here Var = 1.
    const auto model = two_level(1.0, 0.5);
    const auto rho = DensityMatrix::pure(CVector::Constant(2, Complex(1.0 / std::sqrt(2.0), 0.0)));
    const CMatrix f = lindblad_drift(model.c(), rho, 1.0).matrix();
    const CMatrix gg = diffusion(model.c(), rho, 1.0, 0.5).matrix();
    EXPECT_NEAR(2.0 * kernel::trace_product(rho.matrix(), f) + kernel::trace_product(gg, gg), -2.0 * 1.0 * (1.0 - 0.5) * 1.0, 1e-12);
}

// -i[sx, diag(1, 0)] by explicit 2x2 products: [[0, i], [-i, 0]] = -sy.
TEST(dynamics, hamiltonian_drift_brute_force_product) {
    CMatrix sx(2, 2), p0(2, 2);
    sx << 0.0, 1.0, 1.0, 0.0;
    p0 << 1.0, 0.0, 0.0, 0.0;
    CMatrix expected(2, 2);
    expected << 0.0, Complex(0.0, 1.0), Complex(0.0, -1.0), 0.0;
    const auto d = hamiltonian_drift(HermitianMatrix(sx), DensityMatrix(p0)).matrix();
    EXPECT_TRUE(d.isApprox(expected));
    EXPECT_TRUE(d.isApprox(-pauli_y()));
    // -i[sx, (I + y sy + z sz)/2] = y sz - z sy.
    const double y = 0.3, z = -0.6;
    const DensityMatrix rho(CMatrix(0.5 * (CMatrix::Identity(2, 2) + y * pauli_y() + z * pauli_z())));
    EXPECT_TRUE(hamiltonian_drift(HermitianMatrix(sx), rho).matrix().isApprox(y * pauli_z() - z * pauli_y()));
}
