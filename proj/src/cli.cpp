#include "msglass/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <utility>

#include <CLI11.hpp>
#include <json.hpp>

#include "msglass/bipartite.hpp"
#include "msglass/critical.hpp"
#include "msglass/errors.hpp"
#include "msglass/format.hpp"
#include "msglass/mcverify.hpp"
#include "msglass/model_io.hpp"
#include "msglass/supercritical.hpp"

namespace msglass {

namespace {

bool log_enabled() {
    const char* v = std::getenv("MSGLASS_LOG");
    return v != nullptr && *v != '\0';
}

struct Logger {
    std::ostream& err;
    void operator()(const std::string& line) const {
        if (log_enabled()) err << "[msglass] " << line << "\n";
    }
};

SolvedModel load_and_solve(const std::string& model_arg, std::ostream& err, const Logger& log) {
    ParsedModel parsed = load_model(model_arg);
    for (const std::string& w : parsed.warnings) err << "warning: " << w << "\n";
    log("model: " + std::to_string(parsed.model.n_species()) + " species, |p| = " +
        std::to_string(parsed.model.total_degree()) +
        (parsed.bipartite ? ", bipartite route" : ", general route"));
    return solve_model(std::move(parsed));
}

double critical_residual_of(const SolvedModel& sm) {
    if (sm.parsed.bipartite) {
        // q_c ≡ 0 sits outside the domain of the stationarity system; the
        // defining equation here is κ(β_c) = 0.
        return std::abs(kappa(bipartite_from(sm.parsed.model), sm.critical.beta_c).value);
    }
    double worst = critical_residuals(sm.parsed.model, sm.critical.beta_c, sm.critical.q_c,
                                      sm.critical.e_star)
                       .max();
    for (double r : qc_system_residuals(sm.parsed.model, sm.critical.q_c)) {
        worst = std::max(worst, r);
    }
    return worst;
}

int cmd_critical(const std::string& model_arg, bool as_json, std::ostream& out,
                 std::ostream& err, const Logger& log) {
    const SolvedModel sm = load_and_solve(model_arg, err, log);
    const double residual = critical_residual_of(sm);
    const char* route = sm.parsed.bipartite ? "bipartite" : "general";
    if (as_json) {
        nlohmann::json j;
        j["route"] = route;
        j["beta_c"] = sm.critical.beta_c;
        j["e_star"] = sm.critical.e_star;
        j["phi_qc"] = sm.critical.phi_qc;
        for (std::size_t s = 0; s < sm.parsed.model.n_species(); ++s) {
            j["q_c"][sm.parsed.model.labels()[s]] = sm.critical.q_c[s];
        }
        j["max_residual"] = residual;
        out << j.dump(2) << "\n";
    } else {
        out << "route        " << route << "\n";
        out << "beta_c       " << format_g17(sm.critical.beta_c) << "\n";
        out << "e_star       " << format_g17(sm.critical.e_star) << "\n";
        out << "phi_qc       " << format_g17(sm.critical.phi_qc) << "\n";
        for (std::size_t s = 0; s < sm.parsed.model.n_species(); ++s) {
            out << "q_c[" << sm.parsed.model.labels()[s] << "]  "
                << format_g17(sm.critical.q_c[s]) << "\n";
        }
        out << "max_residual " << format_g(residual, 6) << "\n";
    }
    return 0;
}

int cmd_solve(const std::string& model_arg, double beta, bool as_json, std::ostream& out,
              std::ostream& err, const Logger& log) {
    const SolvedModel sm = load_and_solve(model_arg, err, log);
    const BranchPoint bp = evaluate_at(sm, beta);
    const char* branch = bp.supercritical ? "supercritical" : "subcritical";
    if (as_json) {
        nlohmann::json j;
        j["beta"] = bp.beta;
        j["branch"] = branch;
        j["beta_c"] = sm.critical.beta_c;
        j["free_energy"] = bp.free_energy;
        j["xi_q_one"] = bp.xi_q_one;
        if (bp.supercritical) j["y_star"] = bp.y_star;
        for (std::size_t s = 0; s < sm.parsed.model.n_species(); ++s) {
            j["q"][sm.parsed.model.labels()[s]] = bp.q[s];
        }
        out << j.dump(2) << "\n";
    } else {
        out << "beta         " << format_g17(bp.beta) << "\n";
        out << "branch       " << branch << " (beta_c = " << format_g17(sm.critical.beta_c)
            << ")\n";
        out << "F            " << format_g17(bp.free_energy) << "\n";
        out << "xi_q_one     " << format_g17(bp.xi_q_one) << "\n";
        if (bp.supercritical) out << "y_star       " << format_g17(bp.y_star) << "\n";
        for (std::size_t s = 0; s < sm.parsed.model.n_species(); ++s) {
            out << "q[" << sm.parsed.model.labels()[s] << "]         " << format_g17(bp.q[s])
                << "\n";
        }
    }
    return 0;
}

int cmd_sweep(const std::string& model_arg, double beta_min, double beta_max, int steps,
              const std::string& out_path, std::ostream& err, const Logger& log) {
    const SolvedModel sm = load_and_solve(model_arg, err, log);
    std::ofstream file(out_path);
    if (!file) {
        err << "error: cannot open '" << out_path << "' for writing\n";
        return 2;
    }
    write_sweep_csv(file, sm, beta_min, beta_max, steps);
    if (!file.good()) {
        err << "error: write to '" << out_path << "' failed\n";
        return 2;
    }
    log("wrote " + std::to_string(steps) + " rows to " + out_path);
    return 0;
}

int cmd_bipartite(const std::string& model_arg, bool beta_given, double beta, bool as_json,
                  std::ostream& out, std::ostream& err, const Logger& log) {
    ParsedModel parsed = load_model(model_arg);
    for (const std::string& w : parsed.warnings) err << "warning: " << w << "\n";
    if (!parsed.bipartite) {
        err << "error: model has |p| = " << parsed.model.total_degree()
            << "; the bipartite command needs two species with p = (1,1)\n";
        return 2;
    }
    log("bipartite closed forms");
    const BipartiteModel bm = bipartite_from(parsed.model);
    const BipartiteCritical crit = bipartite_critical(bm);
    if (as_json) {
        nlohmann::json j;
        j["beta_c"] = crit.beta_c;
        j["e_star"] = crit.e_star;
        j["q_c"] = {crit.q_c[0], crit.q_c[1]};
        if (beta_given) {
            const BipartiteOverlap q = bipartite_overlap(bm, beta);
            const KappaValue k = kappa(bm, beta);
            j["beta"] = beta;
            j["q_s"] = q.q_s;
            j["q_t"] = q.q_t;
            j["subcritical"] = q.subcritical;
            j["free_energy"] = bipartite_free_energy(bm, beta);
            j["kappa"] = k.value;
            j["kappa_prime"] = k.derivative;
        }
        out << j.dump(2) << "\n";
    } else {
        out << "beta_c       " << format_g17(crit.beta_c) << "\n";
        out << "e_star       " << format_g17(crit.e_star) << "\n";
        out << "q_c          (0, 0)\n";
        if (beta_given) {
            const BipartiteOverlap q = bipartite_overlap(bm, beta);
            const KappaValue k = kappa(bm, beta);
            out << "beta         " << format_g17(beta) << "\n";
            out << "branch       " << (q.subcritical ? "subcritical" : "supercritical") << "\n";
            out << "q_s          " << format_g17(q.q_s) << "\n";
            out << "q_t          " << format_g17(q.q_t) << "\n";
            out << "F            " << format_g17(bipartite_free_energy(bm, beta)) << "\n";
            out << "kappa        " << format_g17(k.value) << "\n";
            out << "kappa_prime  " << format_g17(k.derivative) << "\n";
        }
    }
    return 0;
}

int verify_covariance(const std::string& model_arg, int n_total, int trials, int pairs,
                      std::uint64_t seed, std::ostream& out, std::ostream& err,
                      const Logger& log) {
    ParsedModel parsed = load_model(model_arg);
    for (const std::string& w : parsed.warnings) err << "warning: " << w << "\n";
    const std::vector<int> sizes = species_sizes(parsed.model, n_total);
    log("covariance check on sizes n = " + std::to_string(n_total));
    const CovarianceReport rep = covariance_check(parsed.model, sizes, trials, pairs, seed);
    for (std::size_t k = 0; k < rep.pairs.size(); ++k) {
        const CovariancePair& p = rep.pairs[k];
        out << "pair " << k << ": target " << format_g(p.target, 8) << ", observed "
            << format_g(p.mean, 8) << " +- " << format_g(p.std_error, 4) << ", deviation "
            << format_g(p.deviation, 4) << " sigma\n";
    }
    const bool pass = rep.max_abs_deviation <= 5.0;
    out << (pass ? "PASS" : "FAIL") << " covariance: max |deviation| "
        << format_g(rep.max_abs_deviation, 4) << " sigma, tolerance 5 (" << rep.trials
        << " trials)\n";
    return pass ? 0 : 4;
}

int verify_wishart(int n_total, double lambda_s, int seeds, std::uint64_t seed,
                   std::ostream& out, const Logger& log) {
    const double limit = std::sqrt(lambda_s) + std::sqrt(1.0 - lambda_s);
    log("wishart check, n = " + std::to_string(n_total));
    double sum = 0.0;
    for (int k = 1; k <= seeds; ++k) {
        const double est = wishart_ground_state(n_total, lambda_s, replica_seed(seed, k));
        out << "seed replica " << k << ": " << format_g17(est) << "\n";
        sum += est;
    }
    const double mean = sum / seeds;
    const double lo = limit * 0.98, hi = limit * 1.005;
    const bool pass = mean >= lo && mean <= hi;
    out << (pass ? "PASS" : "FAIL") << " wishart: mean " << format_g(mean, 10)
        << ", expected within [" << format_g(lo, 10) << ", " << format_g(hi, 10)
        << "] around " << format_g(limit, 10) << "\n";
    return pass ? 0 : 4;
}

int verify_groundstate(const std::string& model_arg, int n_total, int restarts,
                       std::uint64_t seed, std::ostream& out, std::ostream& err,
                       const Logger& log) {
    const SolvedModel sm = load_and_solve(model_arg, err, log);
    const std::vector<int> sizes = species_sizes(sm.parsed.model, n_total);
    const double est = gradient_ascent_ground_state(sm.parsed.model, sizes, restarts, seed);
    const double e_star = sm.critical.e_star;
    const double lo = e_star - 0.2, hi = e_star + 0.05;
    const bool pass = est >= lo && est <= hi;
    out << (pass ? "PASS" : "FAIL") << " groundstate: ascent " << format_g(est, 10)
        << ", expected within [" << format_g(lo, 10) << ", " << format_g(hi, 10)
        << "] around e_star " << format_g(e_star, 10) << " (" << restarts << " restarts)\n";
    return pass ? 0 : 4;
}

int verify_smallbeta(const std::string& model_arg, int n_total, double beta,
                     std::int64_t samples, std::uint64_t seed, std::ostream& out,
                     std::ostream& err, const Logger& log) {
    const SolvedModel sm = load_and_solve(model_arg, err, log);
    if (beta > 0.5 * sm.critical.beta_c) {
        err << "error: beta " << format_g(beta, 10) << " is above half of beta_c "
            << format_g(sm.critical.beta_c, 10)
            << "; the uniform-sampling estimator is only meaningful deep in the "
               "sub-critical phase\n";
        return 2;
    }
    const std::vector<int> sizes = species_sizes(sm.parsed.model, n_total);
    const SmallBetaEstimate est =
        small_beta_free_energy(sm.parsed.model, sizes, beta, samples, seed);
    const double target = 0.5 * beta * beta;
    const bool pass = std::abs(est.value - target) <= 0.02;
    out << (pass ? "PASS" : "FAIL") << " smallbeta: observed " << format_g(est.value, 10)
        << " +- " << format_g(est.std_error, 4) << ", expected " << format_g(target, 10)
        << ", tolerance 0.02\n";
    return pass ? 0 : 4;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const Logger log{err};
    CLI::App app{"multi-species spherical pure p-spin model: critical points, free energy, "
                 "Monte Carlo checks"};
    app.require_subcommand(1);

    std::string model_arg, out_path;
    bool as_json = false;
    double beta = 0.0, beta_min = 0.0, beta_max = 0.0, lambda_s = 0.5;
    int steps = 0, n_total = 0, trials = 2000, pairs = 10, restarts = 20, seeds = 1;
    std::int64_t samples = 100000;
    std::uint64_t seed = 1;

    CLI::App* critical = app.add_subcommand("critical", "critical temperature and overlap");
    critical->add_option("--model", model_arg, "model file or inline JSON")->required();
    critical->add_flag("--json", as_json, "machine-readable output");

    CLI::App* solve = app.add_subcommand("solve", "free energy and overlap at one beta");
    solve->add_option("--model", model_arg)->required();
    solve->add_option("--beta", beta, "inverse temperature")->required();
    solve->add_flag("--json", as_json);

    CLI::App* sweep = app.add_subcommand("sweep", "CSV sweep over a beta grid");
    sweep->add_option("--model", model_arg)->required();
    sweep->add_option("--beta-min", beta_min)->required();
    sweep->add_option("--beta-max", beta_max)->required();
    sweep->add_option("--steps", steps)->required();
    sweep->add_option("--out", out_path, "output CSV path")->required();

    CLI::App* bipartite = app.add_subcommand("bipartite", "closed forms for two species, p=(1,1)");
    bipartite->add_option("--model", model_arg)->required();
    CLI::Option* bip_beta = bipartite->add_option("--beta", beta);
    bipartite->add_flag("--json", as_json);

    CLI::App* verify = app.add_subcommand("verify", "finite-size Monte Carlo checks");
    verify->require_subcommand(1);

    CLI::App* vcov = verify->add_subcommand("covariance", "Hamiltonian covariance identity");
    vcov->add_option("--model", model_arg)->required();
    vcov->add_option("--n", n_total, "total size")->default_val(60);
    vcov->add_option("--trials", trials)->default_val(2000);
    vcov->add_option("--pairs", pairs)->default_val(10);
    vcov->add_option("--seed", seed)->default_val(1);

    CLI::App* vwis = verify->add_subcommand("wishart", "bilinear ground state vs the exact limit");
    vwis->add_option("--n", n_total)->default_val(1000);
    vwis->add_option("--lambda-s", lambda_s)->default_val(0.5);
    vwis->add_option("--seeds", seeds, "number of seed replicas to average")->default_val(1);
    vwis->add_option("--seed", seed)->default_val(1);

    CLI::App* vgs = verify->add_subcommand("groundstate", "gradient-ascent energy vs e_star");
    vgs->add_option("--model", model_arg)->required();
    vgs->add_option("--n", n_total)->default_val(150);
    vgs->add_option("--restarts", restarts)->default_val(20);
    vgs->add_option("--seed", seed)->default_val(1);

    CLI::App* vsb = verify->add_subcommand("smallbeta", "sub-critical free energy smoke test");
    vsb->add_option("--model", model_arg)->required();
    vsb->add_option("--n", n_total)->default_val(200);
    vsb->add_option("--beta", beta)->default_val(0.2);
    vsb->add_option("--samples", samples)->default_val(100000);
    vsb->add_option("--seed", seed)->default_val(1);

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("msglass");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (critical->parsed()) return cmd_critical(model_arg, as_json, out, err, log);
        if (solve->parsed()) return cmd_solve(model_arg, beta, as_json, out, err, log);
        if (sweep->parsed())
            return cmd_sweep(model_arg, beta_min, beta_max, steps, out_path, err, log);
        if (bipartite->parsed())
            return cmd_bipartite(model_arg, bip_beta->count() > 0, beta, as_json, out, err, log);
        if (verify->parsed()) {
            if (vcov->parsed())
                return verify_covariance(model_arg, n_total, trials, pairs, seed, out, err, log);
            if (vwis->parsed()) return verify_wishart(n_total, lambda_s, seeds, seed, out, log);
            if (vgs->parsed())
                return verify_groundstate(model_arg, n_total, restarts, seed, out, err, log);
            if (vsb->parsed())
                return verify_smallbeta(model_arg, n_total, beta, samples, seed, out, err, log);
        }
        err << "error: no command\n";
        return 2;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace msglass
