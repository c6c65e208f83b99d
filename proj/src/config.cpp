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

#include "qfb/config.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace qfb {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
    throw ValidationError("config: " + where + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) bad(where, std::string("missing key '") + key + "'");
    return obj.at(key);
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) bad(where, "expected a number");
    return v.get<double>();
}

Complex entry(const json& v, const std::string& where) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    bad(where, "matrix entries must be [re, im] pairs or real numbers");
}

CMatrix matrix(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) bad(where, "expected a non-empty list of rows");
    const auto rows = static_cast<Eigen::Index>(v.size());
    CMatrix m(rows, rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = v[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows) {
            bad(where, "matrix must be square (" + std::to_string(rows) + " rows)");
        }
        for (Eigen::Index j = 0; j < rows; ++j) {
            m(i, j) = entry(row[static_cast<std::size_t>(j)], where + "[" + std::to_string(i) + "][" +
                                                                  std::to_string(j) + "]");
        }
    }
    return m;
}

void check_dim(const CMatrix& m, Eigen::Index n, const std::string& where) {
    if (m.rows() != n) bad(where, "expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
}

HermitianMatrix hermitian(const CMatrix& m, const Tolerances& tol, const char* name) {
    try {
        return HermitianMatrix(m, tol);
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("config: model.") + name + ": " + e.what());
    }
}

ConfigDocument from_json(const json& root) {
    if (!root.is_object()) bad("document", "top level must be an object");

    ConfigDocument doc;
    if (root.contains("tolerances")) {
        const json& t = root.at("tolerances");
        if (!t.is_object()) bad("tolerances", "expected an object");
        auto opt = [&](const char* key, double& field) {
            if (t.contains(key)) field = number(t.at(key), std::string("tolerances.") + key);
        };
        opt("hermitian", doc.tolerances.hermitian);
        opt("trace", doc.tolerances.trace);
        opt("psd", doc.tolerances.psd);
        opt("degeneracy", doc.tolerances.degeneracy);
        opt("commutation", doc.tolerances.commutation);
        opt("projector", doc.tolerances.projector);
        opt("zero_probability", doc.tolerances.zero_probability);
    }

    const json& model = require(root, "model", "document");
    const json& n = require(model, "n", "model");
    if (!n.is_number_integer() || n.get<long long>() < 2) bad("model.n", "expected an integer >= 2");
    doc.n = static_cast<Eigen::Index>(n.get<long long>());
    doc.h_a = matrix(require(model, "h_a", "model"), "model.h_a");
    doc.h_b = matrix(require(model, "h_b", "model"), "model.h_b");
    doc.c = matrix(require(model, "c", "model"), "model.c");
    check_dim(doc.h_a, doc.n, "model.h_a");
    check_dim(doc.h_b, doc.n, "model.h_b");
    check_dim(doc.c, doc.n, "model.c");
    doc.mu = number(require(model, "mu", "model"), "model.mu");
    doc.eta = number(require(model, "eta", "model"), "model.eta");

    if (root.contains("target")) {
        doc.rho_d = matrix(require(root.at("target"), "rho_d", "target"), "target.rho_d");
        check_dim(*doc.rho_d, doc.n, "target.rho_d");
    }

    if (root.contains("controller")) {
        const json& c = root.at("controller");
        if (!c.is_object()) bad("controller", "expected an object");
        const ControlLaw kind =
            c.contains("kind") ? control_law_from_string(c.at("kind").get<std::string>()) : ControlLaw::open_loop;
        const double k = c.contains("k") ? number(c.at("k"), "controller.k") : 1.0;
        const double ell = c.contains("ell") ? number(c.at("ell"), "controller.ell") : 1.0;
        doc.controller = ControllerSpec::create(kind, k, ell);
    }

    if (root.contains("sim")) {
        const json& s = root.at("sim");
        if (!s.is_object()) bad("sim", "expected an object");
        if (s.contains("dt")) doc.sim.dt = number(s.at("dt"), "sim.dt");
        if (s.contains("t_final")) doc.sim.t_final = number(s.at("t_final"), "sim.t_final");
        if (s.contains("seed")) {
            if (!s.at("seed").is_number_unsigned()) bad("sim.seed", "expected a non-negative integer");
            doc.sim.seed = s.at("seed").get<std::uint64_t>();
        }
        if (s.contains("record_stride")) {
            if (!s.at("record_stride").is_number_unsigned()) bad("sim.record_stride", "expected an integer >= 1");
            doc.sim.record_stride = s.at("record_stride").get<std::size_t>();
        }
        if (s.contains("convergence_fidelity")) {
            doc.sim.convergence_fidelity = number(s.at("convergence_fidelity"), "sim.convergence_fidelity");
        }
        if (s.contains("representation")) {
            if (!s.at("representation").is_string()) bad("sim.representation", "expected \"sme\" or \"sse\"");
            doc.sim.representation = representation_from_string(s.at("representation").get<std::string>());
        }
    }

    if (root.contains("ensemble")) {
        const json& e = require(root.at("ensemble"), "n_trajectories", "ensemble");
        if (!e.is_number_unsigned() || e.get<std::size_t>() < 1) {
            bad("ensemble.n_trajectories", "expected an integer >= 1");
        }
        doc.n_trajectories = e.get<std::size_t>();
    }

    if (root.contains("rho0")) {
        doc.rho0 = matrix(root.at("rho0"), "rho0");
        check_dim(*doc.rho0, doc.n, "rho0");
    }
    if (root.contains("output_dir")) {
        if (!root.at("output_dir").is_string()) bad("output_dir", "expected a string");
        doc.output_dir = root.at("output_dir").get<std::string>();
    }
    return doc;
}

}  // namespace

ConfigDocument parse_config(std::string_view json_text) {
    try {
        return from_json(json::parse(json_text));
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config: malformed JSON: ") + e.what());
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
}

ConfigDocument load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::vector<ModelCheck> check_document(const ConfigDocument& doc) {
    std::vector<ModelCheck> checks;
    bool all_hermitian = true;
    auto herm = [&](const CMatrix& m, const char* name) {
        const double defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
        const bool ok = defect <= doc.tolerances.hermitian;
        all_hermitian = all_hermitian && ok;
        checks.push_back({std::string(name) + " Hermitian", ok, "max |a_ij - conj(a_ji)| = " + std::to_string(defect)});
    };
    herm(doc.h_a, "H_a");
    herm(doc.h_b, "H_b");
    herm(doc.c, "C");
    if (!all_hermitian) return checks;
    auto rest = check_model(HermitianMatrix::symmetrized(doc.h_a), HermitianMatrix::symmetrized(doc.h_b),
                            HermitianMatrix::symmetrized(doc.c), doc.mu, doc.eta, doc.tolerances);
    checks.insert(checks.end(), rest.begin(), rest.end());
    return checks;
}

ModelSpec build_model(const ConfigDocument& doc) {
    return ModelSpec::create(hermitian(doc.h_a, doc.tolerances, "h_a"), hermitian(doc.h_b, doc.tolerances, "h_b"),
                             hermitian(doc.c, doc.tolerances, "c"), doc.mu, doc.eta, doc.tolerances);
}

TargetSpec build_target(const ConfigDocument& doc, const ModelSpec& model) {
    if (!doc.rho_d) return TargetSpec::for_level(model, model.dim() - 1);
    return TargetSpec::create(model, DensityMatrix(*doc.rho_d, doc.tolerances));
}

EnsembleConfig build_ensemble_config(const ConfigDocument& doc) {
    ModelSpec model = build_model(doc);
    TargetSpec target = build_target(doc, model);
    DensityMatrix rho0 =
        doc.rho0 ? DensityMatrix(*doc.rho0, doc.tolerances) : DensityMatrix::maximally_mixed(doc.n);
    EnsembleConfig cfg{doc.n_trajectories, std::move(model),  std::move(target), doc.controller,
                       doc.sim,            std::move(rho0), doc.output_dir};
    cfg.validate();
    return cfg;
}

std::string matrix_to_json(const CMatrix& m) {
    std::ostringstream os;
    os << std::setprecision(17) << '[';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        os << (i ? ", [" : "[");
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            os << (j ? ", [" : "[") << m(i, j).real() << ", " << m(i, j).imag() << ']';
        }
        os << ']';
    }
    os << ']';
    return os.str();
}

}  // namespace qfb
