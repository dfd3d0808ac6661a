#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "msglass/critical.hpp"
#include "msglass/model.hpp"

namespace msglass {

struct ModelParseError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Model file contents: the validated spec plus routing and bookkeeping.
struct ParsedModel {
    ModelSpec model;
    bool bipartite;  ///< |p| = 2: closed forms apply, general solver refuses
    std::map<std::string, std::string> metadata;
    std::vector<std::string> warnings;
};

/// Parses the model JSON schema:
///   {"species":[{"label":"s","lambda":0.5,"p":1}, ...], "metadata":{...}}
/// λ is renormalized when its sum drifts from 1 by at most 1e-6 (with a
/// warning above 1e-9) and rejected beyond that.
ParsedModel parse_model_json(const std::string& text);

/// Accepts either a file path or inline JSON (detected by a leading '{').
ParsedModel load_model(const std::string& path_or_inline);

/// A parsed model with its critical point attached (general solve or the
/// two-species closed forms, depending on the route).
struct SolvedModel {
    ParsedModel parsed;
    CriticalPoint critical;
};

SolvedModel solve_model(ParsedModel parsed);

/// One point of the phase diagram on the branch that β falls in. β within
/// relative 1e-10 above β_c is reported on the sub-critical branch.
struct BranchPoint {
    double beta;
    bool supercritical;
    OverlapVector q;      ///< all zeros on the sub-critical branch
    double y_star;        ///< meaningful only when supercritical
    double free_energy;
    double xi_q_one;      ///< 1 on the sub-critical branch
};

BranchPoint evaluate_at(const SolvedModel& sm, double beta);

/// Uniform-grid sweep, header `beta,y_star,F,xi_q_one,q_<label>...`; values
/// at 17 significant digits, y_star blank on sub-critical rows.
void write_sweep_csv(std::ostream& out, const SolvedModel& sm, double beta_min, double beta_max,
                     int steps);

} // namespace msglass
