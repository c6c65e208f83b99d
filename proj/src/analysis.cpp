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

#include "qfb/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace qfb {

namespace {

constexpr double kRankThreshold = 1e-10;
constexpr int kMaxWordDepth = 16;  // 2^17 words is already far past useful

const Complex kMinusI(0.0, -1.0);

void require_square_pair(const CMatrix& a, const CMatrix& b, const char* what) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
        throw DimensionError(std::string(what) + ": need square matrices of equal dimension");
    }
}

std::string power_label(const std::string& op, int p) {
    if (p == 0) return "b0";
    if (p == 1) return "ad_" + op + " b0";
    return "ad_" + op + "^" + std::to_string(p) + " b0";
}

RankReport chain_report(const CMatrix& a, const std::string& op, const CMatrix& h_b, const CMatrix& rho_d,
                        int depth) {
    require_square_pair(a, h_b, "kalman_like_rank");
    require_square_pair(a, rho_d, "kalman_like_rank");
    const Eigen::Index n = a.rows();
    if (depth <= 0) depth = default_commutator_depth(n);
    const CMatrix b0 = kMinusI * kernel::commutator(h_b, rho_d);

    RankReport r;
    const auto family = iterated_commutators(a, b0, depth);
    for (int p = 0; p < depth; ++p) r.generators_tested.push_back(power_label(op, p));
    r.achieved_rank = real_span_rank(family);
    r.required_rank = static_cast<int>(2 * (n - 1));
    r.passed = r.achieved_rank == r.required_rank;
    r.commutator_depth_used = depth;
    return r;
}

}  // namespace

std::vector<CMatrix> iterated_commutators(const CMatrix& a, const CMatrix& b0, int depth) {
    require_square_pair(a, b0, "iterated_commutators");
    if (depth < 1) throw ValidationError("iterated_commutators: depth must be >= 1");
    std::vector<CMatrix> out;
    out.reserve(static_cast<std::size_t>(depth));
    out.push_back(b0);
    for (int i = 1; i < depth; ++i) out.push_back(kernel::commutator(a, out.back()));
    return out;
}

int real_span_rank(const std::vector<CMatrix>& family) {
    if (family.empty()) return 0;
    const Eigen::Index n2 = family.front().size();
    Eigen::MatrixXd stacked(2 * n2, static_cast<Eigen::Index>(family.size()));
    for (std::size_t j = 0; j < family.size(); ++j) {
        if (family[j].size() != n2) throw DimensionError("real_span_rank: mixed dimensions");
        const auto col = static_cast<Eigen::Index>(j);
        // Row-major flattening so the layout matches the documented order.
        Eigen::Index k = 0;
        for (Eigen::Index r = 0; r < family[j].rows(); ++r) {
            for (Eigen::Index c = 0; c < family[j].cols(); ++c, ++k) {
                stacked(k, col) = family[j](r, c).real();
                stacked(n2 + k, col) = family[j](r, c).imag();
            }
        }
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || !(s(0) > 0.0)) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > kRankThreshold * s(0)) ++rank;
    return rank;
}

std::string to_string(RankGenerator g) { return g == RankGenerator::h_a ? "h_a" : "c"; }

RankGenerator rank_generator_from_string(const std::string& name) {
    if (name == "h_a") return RankGenerator::h_a;
    if (name == "c") return RankGenerator::c;
    throw ValidationError("unknown rank generator '" + name + "' (expected h_a or c)");
}

int default_commutator_depth(Eigen::Index n) { return std::max<int>(1, static_cast<int>(n * n - n)); }

RankReport kalman_like_rank(const ModelSpec& model, const TargetSpec& target, RankGenerator use, int depth) {
    if (use == RankGenerator::h_a) {
        return chain_report(kMinusI * model.h_a().matrix(), "-iH_a", model.h_b().matrix(),
                            target.rho_d().matrix(), depth);
    }
    return chain_report(model.c().matrix(), "C", model.h_b().matrix(), target.rho_d().matrix(), depth);
}

RankReport kalman_like_rank(const CMatrix& a, const CMatrix& h_b, const CMatrix& rho_d, int depth) {
    return chain_report(a, "A", h_b, rho_d, depth);
}

bool strong_regularity(const HermitianMatrix& h, double tol) {
    const Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix(), Eigen::EigenvaluesOnly);
    const RVector& ev = es.eigenvalues();
    const Eigen::Index n = ev.size();
    std::vector<double> gaps;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double g = ev(j) - ev(i);
            if (g <= tol) return false;
            gaps.push_back(g);
        }
    }
    std::sort(gaps.begin(), gaps.end());
    for (std::size_t i = 1; i < gaps.size(); ++i)
        if (gaps[i] - gaps[i - 1] <= tol) return false;
    return true;
}

bool is_diagonal_set(const DensityMatrix& rho, const CMatrix& c_eigenbasis, double tol) {
    if (rho.dim() != c_eigenbasis.rows()) throw DimensionError("is_diagonal_set: dimension mismatch");
    const CMatrix m = c_eigenbasis.adjoint() * rho.matrix() * c_eigenbasis;
    double off = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (i != j) off += std::norm(m(i, j));
    return std::sqrt(off) < tol;
}

bool is_diagonal_set(const DensityMatrix& rho, const ModelSpec& model, double tol) {
    return is_diagonal_set(rho, model.c_eigenbasis(), tol);
}

const std::vector<DensityMatrix>& antipodal_states(const TargetSpec& target) { return target.antipodal(); }

RankReport stochastic_jq_commutators(const CMatrix& h_a, const CMatrix& c, double mu, const CMatrix& h_b,
                                     const CMatrix& rho_d, int depth) {
    require_square_pair(h_a, c, "stochastic_jq_commutators");
    require_square_pair(h_a, h_b, "stochastic_jq_commutators");
    require_square_pair(h_a, rho_d, "stochastic_jq_commutators");
    if (depth < 1) throw ValidationError("stochastic_jq_commutators: depth must be >= 1");
    if (depth > kMaxWordDepth) throw ValidationError("stochastic_jq_commutators: depth must be <= 16");

    const CMatrix a = kMinusI * h_a;
    const CMatrix b0 = kMinusI * kernel::commutator(h_b, rho_d);
    // Breadth-first over words; level L holds every word of length L.
    struct Word {
        CMatrix m;
        std::string label;
    };
    std::vector<Word> level{{b0, "b0"}};
    std::vector<CMatrix> family{b0};
    RankReport r;
    r.generators_tested.push_back("b0");
    for (int len = 1; len <= depth; ++len) {
        std::vector<Word> next;
        next.reserve(level.size() * 2);
        for (const auto& w : level) {
            Word h{kernel::commutator(a, w.m), "H " + w.label};
            Word d{-0.5 * mu * kernel::commutator(c, kernel::commutator(c, w.m)), "CC " + w.label};
            next.push_back(std::move(h));
            next.push_back(std::move(d));
        }
        for (const auto& w : next) {
            family.push_back(w.m);
            r.generators_tested.push_back(w.label);
        }
        level = std::move(next);
    }
    r.achieved_rank = real_span_rank(family);
    r.required_rank = real_span_rank(iterated_commutators(a, b0, depth + 1));
    r.passed = r.achieved_rank >= r.required_rank;
    r.commutator_depth_used = depth;
    return r;
}

RankReport stochastic_jq_commutators(const ModelSpec& model, const TargetSpec& target, int depth) {
    if (depth <= 0) depth = std::min(default_commutator_depth(model.dim()), kMaxWordDepth);
    return stochastic_jq_commutators(model.h_a().matrix(), model.c().matrix(), model.mu(), model.h_b().matrix(),
                                     target.rho_d().matrix(), depth);
}

}  // namespace qfb
