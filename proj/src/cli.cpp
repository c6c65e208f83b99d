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

#include "qfb/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "qfb/analysis.hpp"
#include "qfb/bloch.hpp"
#include "qfb/config.hpp"
#include "qfb/ensemble.hpp"
#include "qfb/integrator.hpp"

namespace qfb {

namespace {

namespace fs = std::filesystem;

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<double> k, ell, mu, eta;
};

void add_common(CLI::App* sub, Overrides& o, bool config_required) {
    auto* c = sub->add_option("--config", o.config, "JSON run configuration");
    if (config_required) c->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "override sim.seed");
    sub->add_option("--out", o.out, "override output_dir");
    sub->add_option("--k", o.k, "override controller.k");
    sub->add_option("--ell", o.ell, "override controller.ell");
    sub->add_option("--mu", o.mu, "override model.mu");
    sub->add_option("--eta", o.eta, "override model.eta");
}

ConfigDocument load_with_overrides(const Overrides& o) {
    ConfigDocument doc = load_config(o.config);
    if (o.seed) doc.sim.seed = *o.seed;
    if (o.out) doc.output_dir = *o.out;
    if (o.mu) doc.mu = *o.mu;
    if (o.eta) doc.eta = *o.eta;
    if (o.k || o.ell) {
        doc.controller = ControllerSpec::create(doc.controller.kind, o.k.value_or(doc.controller.k),
                                                o.ell.value_or(doc.controller.ell));
    }
    return doc;
}

fs::path prepare_dir(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw ValidationError("cannot create output directory '" + dir + "': " + ec.message());
    return p;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path);
    if (!f) throw ValidationError("cannot write '" + path.string() + "'");
    return f;
}

void print_rank(std::ostream& os, const std::string& title, const RankReport& r) {
    os << title << '\n';
    os << "  achieved_rank: " << r.achieved_rank << '\n';
    os << "  required_rank: " << r.required_rank << '\n';
    os << "  commutator_depth: " << r.commutator_depth_used << '\n';
    os << "  generators:";
    constexpr std::size_t kShown = 16;
    for (std::size_t i = 0; i < r.generators_tested.size() && i < kShown; ++i) {
        os << (i ? ", " : " ") << r.generators_tested[i];
    }
    if (r.generators_tested.size() > kShown) os << ", ... (" << r.generators_tested.size() << " total)";
    os << '\n' << "  result: " << (r.passed ? "PASS" : "FAIL") << '\n';
}

int cmd_simulate(const Overrides& o, std::ostream& out) {
    const auto doc = load_with_overrides(o);
    const auto cfg = build_ensemble_config(doc);
    const auto traj = simulate(cfg.rho0, cfg.model, cfg.target, cfg.controller, cfg.sim);
    const auto dir = prepare_dir(doc.output_dir);
    {
        auto f = open_out(dir / "trajectory.csv");
        write_trajectory_csv(f, traj, cfg.target);
    }
    const auto& d = traj.diagnostics;
    out << std::setprecision(6) << "outcome=" << traj.outcome.label()
        << " final_fidelity=" << kernel::trace_product(cfg.target.rho_d().matrix(), traj.states.back().matrix())
        << " final_vtilde=" << traj.lyapunov.back().v_tilde << " steps=" << d.steps << " clipped=" << d.clipped_steps
        << " rejected=" << d.rejected_steps << " valid=" << (traj.valid ? 1 : 0) << " csv=" << (dir / "trajectory.csv").string()
        << '\n';
    if (!traj.valid) throw NumericalError("trajectory invalid: too many rejected steps");
    return kExitOk;
}

int cmd_ensemble(const Overrides& o, std::optional<std::size_t> n, bool serial, std::ostream& out) {
    auto doc = load_with_overrides(o);
    if (n) doc.n_trajectories = *n;
    const auto cfg = build_ensemble_config(doc);
    const auto stats = serial ? run_ensemble_serial(cfg) : run_ensemble(cfg);
    const auto dir = prepare_dir(doc.output_dir);
    {
        auto f = open_out(dir / "summary.csv");
        write_summary_csv(f, stats);
    }
    {
        auto f = open_out(dir / "mean_curves.csv");
        write_mean_curves_csv(f, stats);
    }
    out << std::setprecision(6) << "trajectories=" << stats.n_trajectories << " valid=" << stats.n_valid
        << " target_frequency=" << stats.target_frequency << " stderr=" << stats.target_stderr
        << " supermartingale_violations=" << stats.supermartingale_violations << " out=" << dir.string() << '\n';
    for (const auto& [label, count] : stats.outcome_counts) out << "  " << label << ": " << count << '\n';
    return kExitOk;
}

int cmd_levelset(double k, double ell, double mu, double eta, std::size_t resolution, const std::string& dir_name,
                 std::ostream& out) {
    if (!(k > 0.0) || !(ell > 0.0)) throw ValidationError("levelset: k and ell must be > 0");
    if (!(mu > 0.0)) throw ValidationError("levelset: mu must be > 0");
    if (!(eta > 0.0 && eta <= 1.0)) throw ValidationError("levelset: eta must lie in (0, 1]");
    const auto grid = bloch::levelset_grid(k, ell, mu, eta, resolution);
    const auto dir = prepare_dir(dir_name);
    std::ostringstream name;
    name << "levelset_k" << k << "_ell" << ell << ".csv";
    {
        auto f = open_out(dir / name.str());
        bloch::write_levelset_csv(f, grid);
    }
    double max_lv = -std::numeric_limits<double>::infinity();
    double min_lv = std::numeric_limits<double>::infinity();
    for (const auto& p : grid.points) {
        max_lv = std::max(max_lv, p.lv);
        min_lv = std::min(min_lv, p.lv);
    }
    out << std::setprecision(6) << "resolution=" << resolution << " points=" << grid.points.size()
        << " min_lv=" << min_lv << " max_lv=" << max_lv << " csv=" << (dir / name.str()).string() << '\n';
    return kExitOk;
}

int cmd_rankcheck(const Overrides& o, int depth, std::ostream& out) {
    const auto doc = load_with_overrides(o);
    const auto model = build_model(doc);
    const auto target = build_target(doc, model);
    std::ostringstream report;
    report << "N = " << model.dim() << '\n';
    print_rank(report, "kalman_like_rank (A = -iH_a)", kalman_like_rank(model, target, RankGenerator::h_a, depth));
    print_rank(report, "kalman_like_rank (A = C)", kalman_like_rank(model, target, RankGenerator::c, depth));
    print_rank(report, "stochastic_jq_commutators", stochastic_jq_commutators(model, target, depth));
    report << "strong_regularity(H_a): " << (strong_regularity(model.h_a()) ? "yes" : "no") << '\n';
    report << "strong_regularity(C): " << (strong_regularity(model.c()) ? "yes" : "no") << '\n';
    const auto dir = prepare_dir(doc.output_dir);
    {
        auto f = open_out(dir / "rank_report.txt");
        f << report.str();
    }
    out << report.str();
    return kExitOk;
}

int cmd_validate(const Overrides& o, std::ostream& out) {
    const auto doc = load_with_overrides(o);
    bool ok = true;
    for (const auto& c : check_document(doc)) {
        out << (c.passed ? "PASS  " : "FAIL  ") << c.name << "  (" << c.detail << ")\n";
        ok = ok && c.passed;
    }
    if (ok) {
        // Target, rho0, controller and sim are only checked once the model is valid.
        build_ensemble_config(doc);
        out << "PASS  target, rho0, controller and sim\n";
    }
    out << (ok ? "model valid" : "model invalid") << '\n';
    return ok ? kExitOk : kExitBadInput;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Feedback stabilization of continuously measured quantum systems", "qfb"};
    app.require_subcommand(1);

    Overrides sim_o, ens_o, rank_o, val_o;
    auto* sim = app.add_subcommand("simulate", "integrate a single trajectory");
    add_common(sim, sim_o, true);

    auto* ens = app.add_subcommand("ensemble", "run a Monte-Carlo ensemble");
    add_common(ens, ens_o, true);
    std::optional<std::size_t> n_traj;
    bool serial = false;
    ens->add_option("--n", n_traj, "override ensemble.n_trajectories")->check(CLI::PositiveNumber);
    ens->add_flag("--serial", serial, "single-threaded reference runner");

    auto* lvl = app.add_subcommand("levelset", "two-level closed-loop generator on a (y, z) grid");
    double lk = 1.0, lell = 1.0, lmu = 1.0, leta = 0.5;
    std::size_t resolution = 201;
    std::string lout = ".";
    lvl->add_option("--k", lk, "feedback gain")->capture_default_str();
    lvl->add_option("--ell", lell, "variance rescaling gain")->capture_default_str();
    lvl->add_option("--mu", lmu, "measurement strength")->capture_default_str();
    lvl->add_option("--eta", leta, "measurement efficiency")->capture_default_str();
    lvl->add_option("--resolution", resolution, "grid points per axis")->capture_default_str();
    lvl->add_option("--out", lout, "output directory")->capture_default_str();

    auto* rank = app.add_subcommand("rankcheck", "commutator rank condition report");
    add_common(rank, rank_o, true);
    int depth = 0;
    rank->add_option("--depth", depth, "commutator depth (default N^2 - N)");

    auto* val = app.add_subcommand("validate", "model checks only");
    add_common(val, val_o, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitBadInput;
    }

    try {
        if (*sim) return cmd_simulate(sim_o, out);
        if (*ens) return cmd_ensemble(ens_o, n_traj, serial, out);
        if (*lvl) return cmd_levelset(lk, lell, lmu, leta, resolution, lout, out);
        if (*rank) return cmd_rankcheck(rank_o, depth, out);
        if (*val) return cmd_validate(val_o, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const DimensionError& e) {
        err << "error: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitBadInput;
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"qfb"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace qfb
