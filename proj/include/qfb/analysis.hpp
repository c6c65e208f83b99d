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

// Structural checks on a model: the commutator rank condition, strong
// regularity and the diagonal / antipodal sets.
//
// Rank counting. Each N x N complex matrix X is mapped to the real vector
// (Re X_00, Re X_01, ..., Re X_{N-1,N-1}, Im X_00, ..., Im X_{N-1,N-1}) of
// length 2 N^2 and the rank is the number of singular values of the stacked
// vectors above 1e-10 times the largest. The full embedding is used because
// brackets with C turn anti-Hermitian matrices into Hermitian ones, so a
// family can mix both kinds.
//
// Required rank. b0 = -i[H_b, rho_d] is supported on the first row and
// column of rho_d's basis, and ad_{-iH_a}, ad_C with H_a, C diagonal in that
// basis keep this support. The family therefore spans at most the 2(N-1)
// dimensional tangent space of the pure states at rho_d, which equals
// N^2 - N only for N = 2. required_rank is 2(N-1).

#pragma once

#include <string>
#include <vector>

#include "qfb/hermitian.hpp"
#include "qfb/sme.hpp"

namespace qfb {

struct RankReport {
    std::vector<std::string> generators_tested;
    int achieved_rank = 0;
    int required_rank = 0;
    bool passed = false;
    int commutator_depth_used = 0;
};

/// [b0, [a, b0], [a, [a, b0]], ...] with depth entries. Throws
/// ValidationError when depth < 1 and DimensionError on shape mismatch.
std::vector<CMatrix> iterated_commutators(const CMatrix& a, const CMatrix& b0, int depth);

/// Numerical real rank of a matrix family (relative threshold 1e-10).
int real_span_rank(const std::vector<CMatrix>& family);

enum class RankGenerator { h_a, c };

std::string to_string(RankGenerator g);
/// Throws ValidationError for names other than "h_a" and "c".
RankGenerator rank_generator_from_string(const std::string& name);

/// Default depth N^2 - N (at least 1).
int default_commutator_depth(Eigen::Index n);

/// Rank of iterated_commutators(A, -i[H_b, rho_d], depth) with A = -iH_a or
/// A = C. depth <= 0 selects default_commutator_depth.
RankReport kalman_like_rank(const ModelSpec& model, const TargetSpec& target, RankGenerator use,
                            int depth = 0);

/// Same check on raw matrices, for inputs that would not pass model
/// validation (e.g. an H_b with a missing transition).
RankReport kalman_like_rank(const CMatrix& a, const CMatrix& h_b, const CMatrix& rho_d, int depth = 0);

/// Distinct eigenvalues with pairwise distinct gaps, tolerance 1e-10.
bool strong_regularity(const HermitianMatrix& h, double tol = 1e-10);

/// Off-diagonal Frobenius mass of rho in the eigenbasis of C below tol.
bool is_diagonal_set(const DensityMatrix& rho, const ModelSpec& model, double tol = 1e-10);
bool is_diagonal_set(const DensityMatrix& rho, const CMatrix& c_eigenbasis, double tol = 1e-10);

/// The N-1 eigenprojectors of C other than rho_d.
const std::vector<DensityMatrix>& antipodal_states(const TargetSpec& target);

/// All words of length <= depth in ad_{-iH_a} and -(mu/2) ad_C ad_C applied
/// to b0 = -i[H_b, rho_d]. required_rank is the rank of the pure H_a chain
/// at the same depth; passed when achieved_rank >= required_rank.
RankReport stochastic_jq_commutators(const ModelSpec& model, const TargetSpec& target, int depth = 0);

/// Raw-matrix form. Accepts inputs a validated model rejects (C = 0).
RankReport stochastic_jq_commutators(const CMatrix& h_a, const CMatrix& c, double mu, const CMatrix& h_b,
                                     const CMatrix& rho_d, int depth);

}  // namespace qfb
