#pragma once

#include "msglass/critical.hpp"
#include "msglass/model.hpp"

namespace msglass {

/// Two species, one degree each (|p| = 2). Everything has closed forms.
struct BipartiteModel {
    BipartiteModel(double lambda_s, double lambda_t);

    double lambda_s;
    double lambda_t;
};

/// Extracts the bipartite parameters; throws UnsupportedModel unless the
/// model has exactly two species with p = (1,1).
BipartiteModel bipartite_from(const ModelSpec& model);

struct BipartiteCritical {
    double beta_c;    ///< (λ_s λ_t)^{1/4}
    double e_star;    ///< √λ_s + √λ_t
    OverlapVector q_c;  ///< always (0,0): the maximal overlap is trivial here
};

BipartiteCritical bipartite_critical(const BipartiteModel& m);

/// The same critical point shaped for the general low-temperature solver:
/// q_c = (0,0), Φ(q_c) = 0, z_root = 0.
CriticalPoint bipartite_critical_point(const BipartiteModel& m);

struct BipartiteOverlap {
    double q_s;
    double q_t;
    bool subcritical;  ///< β ≤ β_c: overlap pinned at zero
};

/// Closed-form overlap at inverse temperature β ≥ 0.
BipartiteOverlap bipartite_overlap(const BipartiteModel& m, double beta);

/// Closed-form free energy: ½β² up to β_c, the explicit formula above it.
double bipartite_free_energy(const BipartiteModel& m, double beta);

struct KappaValue {
    double value;
    double derivative;
};

/// κ(β) = (√λ_s+√λ_t)·D(β) − 1 − 2β² with D = √((√λ_s−√λ_t)² + 4β²), and
/// κ′(β) = 4β((√λ_s+√λ_t)/D − 1). κ ≤ 0 everywhere; β_c is its global
/// maximizer and the unique β ≥ 0 with κ(β) = 0, which is how the critical
/// temperature is characterized in this case.
KappaValue kappa(const BipartiteModel& m, double beta);

} // namespace msglass
