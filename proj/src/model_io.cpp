#include "msglass/model_io.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "msglass/bipartite.hpp"
#include "msglass/format.hpp"
#include "msglass/supercritical.hpp"

namespace msglass {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw ModelParseError(message); }

} // namespace

ParsedModel parse_model_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(std::string("model JSON: ") + e.what());
    }
    if (!root.is_object() || !root.contains("species")) {
        fail("model JSON: top-level object with a \"species\" array required");
    }
    const json& species = root["species"];
    if (!species.is_array() || species.size() < 2) {
        fail("species must be an array with at least 2 entries");
    }

    std::vector<std::string> labels;
    std::vector<double> lambda;
    std::vector<int> degree;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < species.size(); ++i) {
        const json& entry = species[i];
        const std::string where = "species[" + std::to_string(i) + "]";
        if (!entry.is_object()) fail(where + " must be an object");
        if (!entry.contains("label") || !entry["label"].is_string()) {
            fail(where + ".label must be a string");
        }
        const std::string label = entry["label"].get<std::string>();
        if (label.empty()) fail(where + ".label must be nonempty");
        if (!seen.insert(label).second) fail("duplicate species label '" + label + "'");
        if (!entry.contains("lambda") || !entry["lambda"].is_number()) {
            fail(where + ".lambda must be a number");
        }
        const double lam = entry["lambda"].get<double>();
        if (!(lam > 0.0 && lam < 1.0)) {
            fail(where + ".lambda must lie in (0,1), got " + format_g(lam, 12));
        }
        if (!entry.contains("p") || !entry["p"].is_number_integer()) {
            fail(where + ".p must be an integer");
        }
        const auto p = entry["p"].get<std::int64_t>();
        if (p < 1) fail(where + ".p must be >= 1, got " + std::to_string(p));
        if (p > 64) fail(where + ".p must be <= 64, got " + std::to_string(p));
        labels.push_back(label);
        lambda.push_back(lam);
        degree.push_back(static_cast<int>(p));
    }

    double sum = 0.0;
    for (double l : lambda) sum += l;
    std::vector<std::string> warnings;
    if (std::abs(sum - 1.0) > 1e-6) {
        fail("lambda sums to " + format_g(sum, 12));
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        warnings.push_back("lambda sums to " + format_g(sum, 12) + "; renormalized");
    }
    for (double& l : lambda) l /= sum;

    std::map<std::string, std::string> metadata;
    if (root.contains("metadata")) {
        const json& meta = root["metadata"];
        if (!meta.is_object()) fail("metadata must be an object of strings");
        for (auto it = meta.begin(); it != meta.end(); ++it) {
            if (!it.value().is_string()) fail("metadata." + it.key() + " must be a string");
            metadata[it.key()] = it.value().get<std::string>();
        }
    }

    ModelSpec model(std::move(labels), std::move(lambda), std::move(degree));
    const bool bipartite = model.total_degree() == 2;
    return ParsedModel{std::move(model), bipartite, std::move(metadata), std::move(warnings)};
}

ParsedModel load_model(const std::string& path_or_inline) {
    if (!path_or_inline.empty() && path_or_inline.front() == '{') {
        return parse_model_json(path_or_inline);
    }
    std::ifstream in(path_or_inline);
    if (!in) fail("cannot read model file '" + path_or_inline + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model_json(buf.str());
}

SolvedModel solve_model(ParsedModel parsed) {
    CriticalPoint cp = parsed.bipartite
                           ? bipartite_critical_point(bipartite_from(parsed.model))
                           : solve_critical(parsed.model);
    return SolvedModel{std::move(parsed), std::move(cp)};
}

BranchPoint evaluate_at(const SolvedModel& sm, double beta) {
    if (beta < 0.0) {
        throw std::invalid_argument("evaluate_at: beta must be nonnegative, got " +
                                    format_g(beta, 12));
    }
    const ModelSpec& model = sm.parsed.model;
    BranchPoint bp;
    bp.beta = beta;
    if (beta <= sm.critical.beta_c * (1.0 + 1e-10)) {
        bp.supercritical = false;
        bp.q.assign(model.n_species(), 0.0);
        bp.y_star = 0.0;
        bp.free_energy = 0.5 * beta * beta;
        bp.xi_q_one = 1.0;
        return bp;
    }
    bp.supercritical = true;
    if (sm.parsed.bipartite) {
        const BipartiteModel bm = bipartite_from(model);
        const BipartiteOverlap q = bipartite_overlap(bm, beta);
        bp.q = {q.q_s, q.q_t};
        bp.free_energy = bipartite_free_energy(bm, beta);
        bp.xi_q_one = (1.0 - q.q_s) * (1.0 - q.q_t);
        bp.y_star = beta * std::sqrt(xi_eval(model, bp.q));
    } else {
        SupercriticalSolution sol = solve_supercritical(model, sm.critical, beta);
        bp.q = std::move(sol.q);
        bp.y_star = sol.y_star;
        bp.free_energy = sol.free_energy;
        bp.xi_q_one = sol.xi_q_one;
    }
    return bp;
}

void write_sweep_csv(std::ostream& out, const SolvedModel& sm, double beta_min, double beta_max,
                     int steps) {
    if (!(beta_min >= 0.0) || !(beta_min < beta_max)) {
        throw std::invalid_argument("sweep: need 0 <= beta_min < beta_max, got [" +
                                    format_g(beta_min, 12) + ", " + format_g(beta_max, 12) + "]");
    }
    if (steps < 2) {
        throw std::invalid_argument("sweep: steps must be >= 2, got " + std::to_string(steps));
    }
    out << "beta,y_star,F,xi_q_one";
    for (const std::string& label : sm.parsed.model.labels()) out << ",q_" << label;
    out << "\n";
    for (int i = 0; i < steps; ++i) {
        const double beta =
            beta_min + (beta_max - beta_min) * static_cast<double>(i) / (steps - 1);
        const BranchPoint bp = evaluate_at(sm, beta);
        out << format_g17(bp.beta) << ",";
        if (bp.supercritical) out << format_g17(bp.y_star);
        out << "," << format_g17(bp.free_energy) << "," << format_g17(bp.xi_q_one);
        for (double q : bp.q) out << "," << format_g17(q);
        out << "\n";
    }
}

} // namespace msglass
