#include "msglass/mcverify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "msglass/errors.hpp"
#include "msglass/format.hpp"

namespace msglass {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t replica_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master ^ mix64(index));
}

namespace {

void check_sizes(const ModelSpec& model, const std::vector<int>& sizes, const char* what) {
    if (sizes.size() != model.n_species()) {
        throw std::invalid_argument(std::string(what) + ": got " + std::to_string(sizes.size()) +
                                    " sizes for " + std::to_string(model.n_species()) +
                                    " species");
    }
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        if (sizes[s] < 2) {
            throw std::invalid_argument(std::string(what) + ": size of species " +
                                        std::to_string(s) + " must be >= 2, got " +
                                        std::to_string(sizes[s]));
        }
    }
}

void check_configuration(const HamiltonianSample& h, const Configuration& sigma,
                         const char* what) {
    if (sigma.block.size() != h.model.n_species()) {
        throw std::invalid_argument(std::string(what) + ": configuration has " +
                                    std::to_string(sigma.block.size()) + " blocks, expected " +
                                    std::to_string(h.model.n_species()));
    }
    for (std::size_t s = 0; s < sigma.block.size(); ++s) {
        if (sigma.block[s].size() != static_cast<std::size_t>(h.n_per_species[s])) {
            throw std::invalid_argument(std::string(what) + ": block " + std::to_string(s) +
                                        " has length " + std::to_string(sigma.block[s].size()) +
                                        ", expected " + std::to_string(h.n_per_species[s]));
        }
    }
}

double total_size(const std::vector<int>& sizes) {
    double n = 0.0;
    for (int v : sizes) n += v;
    return n;
}

// |p|!/Π p(s)! as a product of binomials, in double (inf on overflow, which
// the memory guard then rejects).
double pattern_count(const ModelSpec& model) {
    double m = 1.0;
    int placed = 0;
    for (std::size_t s = 0; s < model.n_species(); ++s) {
        placed += model.degree(s);
        double binom = 1.0;
        for (int i = 1; i <= model.degree(s); ++i) {
            binom = binom * static_cast<double>(placed - model.degree(s) + i) /
                    static_cast<double>(i);
        }
        m *= binom;
    }
    return m;
}

void fill_coefficients(HamiltonianSample& h, std::uint64_t seed) {
    h.seed = seed;
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& c : h.coefficients) c = normal(eng);
    std::fill(h.contracted.begin(), h.contracted.end(), 0.0);
    for (std::size_t pat = 0; pat < h.n_patterns; ++pat) {
        const double* blk = h.coefficients.data() + pat * h.block_size;
        for (std::size_t i = 0; i < h.block_size; ++i) h.contracted[i] += blk[i];
    }
}

// Contract the leading axis (size n, stride out_len) of `in` with v.
void contract_first(const double* in, std::size_t out_len, int n, const double* v, double* out) {
    std::fill(out, out + out_len, 0.0);
    for (int t = 0; t < n; ++t) {
        const double vt = v[t];
        const double* base = in + static_cast<std::size_t>(t) * out_len;
        for (std::size_t i = 0; i < out_len; ++i) out[i] += vt * base[i];
    }
}

} // namespace

void retract(Configuration& sigma) {
    for (std::size_t s = 0; s < sigma.block.size(); ++s) {
        auto& blk = sigma.block[s];
        double norm2 = 0.0;
        for (double x : blk) norm2 += x * x;
        if (norm2 <= 0.0) {
            throw std::invalid_argument("retract: block " + std::to_string(s) + " is zero");
        }
        const double scale = std::sqrt(static_cast<double>(blk.size()) / norm2);
        for (double& x : blk) x *= scale;
    }
}

Configuration random_configuration(const std::vector<int>& n_per_species, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Configuration sigma;
    sigma.block.resize(n_per_species.size());
    for (std::size_t s = 0; s < n_per_species.size(); ++s) {
        sigma.block[s].resize(static_cast<std::size_t>(n_per_species[s]));
        for (double& x : sigma.block[s]) x = normal(rng);
    }
    retract(sigma);
    return sigma;
}

HamiltonianSample sample_hamiltonian(const ModelSpec& model, const std::vector<int>& n_per_species,
                                     std::uint64_t seed) {
    check_sizes(model, n_per_species, "sample_hamiltonian");

    double block_dbl = 1.0;
    for (std::size_t s = 0; s < model.n_species(); ++s) {
        for (int k = 0; k < model.degree(s); ++k) block_dbl *= n_per_species[s];
    }
    const double m_dbl = pattern_count(model);
    if (!(m_dbl * block_dbl <= 1e8)) {
        throw std::invalid_argument("sample_hamiltonian: realization needs " +
                                    format_g(m_dbl * block_dbl, 6) +
                                    " stored entries, above the 1e8 guard");
    }

    HamiltonianSample h{model,
                        n_per_species,
                        0,
                        0.0,
                        static_cast<std::size_t>(m_dbl + 0.5),
                        static_cast<std::size_t>(block_dbl + 0.5),
                        {},
                        {},
                        {},
                        {}};
    for (std::size_t s = 0; s < model.n_species(); ++s) {
        for (int k = 0; k < model.degree(s); ++k) {
            h.axis_species.push_back(static_cast<int>(s));
            h.axis_size.push_back(n_per_species[s]);
        }
    }
    const double n_total = total_size(n_per_species);
    h.normalization = std::sqrt(n_total / block_dbl / m_dbl);
    h.coefficients.resize(h.n_patterns * h.block_size);
    h.contracted.resize(h.block_size);
    fill_coefficients(h, seed);
    return h;
}

void resample(HamiltonianSample& h, std::uint64_t seed) {
    fill_coefficients(h, seed);
}

double eval_hamiltonian(const HamiltonianSample& h, const Configuration& sigma) {
    check_configuration(h, sigma, "eval_hamiltonian");
    const std::size_t axes = h.axis_size.size();
    // First contraction reads the shared sum tensor, the rest run in place.
    std::size_t len = h.block_size;
    int n = h.axis_size[axes - 1];
    std::size_t out_len = len / static_cast<std::size_t>(n);
    std::vector<double> buf(out_len);
    {
        const double* v = sigma.block[static_cast<std::size_t>(h.axis_species[axes - 1])].data();
        for (std::size_t i = 0; i < out_len; ++i) {
            const double* row = h.contracted.data() + i * static_cast<std::size_t>(n);
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += row[j] * v[j];
            buf[i] = acc;
        }
        len = out_len;
    }
    for (std::size_t a = axes - 1; a-- > 0;) {
        n = h.axis_size[a];
        out_len = len / static_cast<std::size_t>(n);
        const double* v = sigma.block[static_cast<std::size_t>(h.axis_species[a])].data();
        for (std::size_t i = 0; i < out_len; ++i) {
            const double* row = buf.data() + i * static_cast<std::size_t>(n);
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += row[j] * v[j];
            buf[i] = acc;
        }
        len = out_len;
    }
    return h.normalization * buf[0];
}

std::vector<std::vector<double>> hamiltonian_gradient(const HamiltonianSample& h,
                                                      const Configuration& sigma) {
    check_configuration(h, sigma, "hamiltonian_gradient");
    const std::size_t axes = h.axis_size.size();

    // suffix[a] = coefficient sum contracted over axes a+1..end, laid out over
    // axes 0..a; the last one is the stored tensor itself.
    std::vector<std::vector<double>> suffix(axes > 1 ? axes - 1 : 0);
    std::vector<std::size_t> prefix_len(axes);
    {
        std::size_t len = 1;
        for (std::size_t a = 0; a < axes; ++a) {
            len *= static_cast<std::size_t>(h.axis_size[a]);
            prefix_len[a] = len;
        }
    }
    {
        const double* cur = h.contracted.data();
        std::size_t len = h.block_size;
        for (std::size_t a = axes - 1; a >= 1; --a) {
            const int n = h.axis_size[a];
            const double* v = sigma.block[static_cast<std::size_t>(h.axis_species[a])].data();
            const std::size_t out_len = len / static_cast<std::size_t>(n);
            suffix[a - 1].resize(out_len);
            for (std::size_t i = 0; i < out_len; ++i) {
                const double* row = cur + i * static_cast<std::size_t>(n);
                double acc = 0.0;
                for (int j = 0; j < n; ++j) acc += row[j] * v[j];
                suffix[a - 1][i] = acc;
            }
            cur = suffix[a - 1].data();
            len = out_len;
        }
    }

    std::vector<std::vector<double>> grad(h.model.n_species());
    for (std::size_t s = 0; s < grad.size(); ++s) {
        grad[s].assign(static_cast<std::size_t>(h.n_per_species[s]), 0.0);
    }

    std::vector<double> fa, fb;
    for (std::size_t a = 0; a < axes; ++a) {
        const double* cur = (a == axes - 1) ? h.contracted.data() : suffix[a].data();
        std::size_t len = prefix_len[a];
        bool in_fa = false;
        for (std::size_t j = 0; j < a; ++j) {
            const int n = h.axis_size[j];
            const double* v = sigma.block[static_cast<std::size_t>(h.axis_species[j])].data();
            const std::size_t out_len = len / static_cast<std::size_t>(n);
            std::vector<double>& dst = in_fa ? fb : fa;
            dst.resize(out_len);
            contract_first(cur, out_len, n, v, dst.data());
            cur = dst.data();
            len = out_len;
            in_fa = !in_fa;
        }
        // cur now has length axis_size[a]: the derivative along this axis.
        auto& g = grad[static_cast<std::size_t>(h.axis_species[a])];
        for (std::size_t i = 0; i < len; ++i) g[i] += cur[i];
    }
    for (auto& g : grad) {
        for (double& x : g) x *= h.normalization;
    }
    return grad;
}

OverlapVector overlap(const Configuration& a, const Configuration& b) {
    if (a.block.size() != b.block.size()) {
        throw std::invalid_argument("overlap: configurations have different species counts");
    }
    OverlapVector r(a.block.size());
    for (std::size_t s = 0; s < a.block.size(); ++s) {
        if (a.block[s].size() != b.block[s].size()) {
            throw std::invalid_argument("overlap: block " + std::to_string(s) +
                                        " length mismatch");
        }
        double dot = 0.0;
        for (std::size_t i = 0; i < a.block[s].size(); ++i) dot += a.block[s][i] * b.block[s][i];
        r[s] = dot / static_cast<double>(a.block[s].size());
    }
    return r;
}

CovarianceReport covariance_check_pairs(
    const ModelSpec& model, const std::vector<int>& n_per_species,
    const std::vector<std::pair<Configuration, Configuration>>& pairs, int trials,
    std::uint64_t seed) {
    if (trials < 100) {
        throw std::invalid_argument("covariance check: trials must be >= 100, got " +
                                    std::to_string(trials));
    }
    if (pairs.empty()) {
        throw std::invalid_argument("covariance check: needs at least one configuration pair");
    }
    HamiltonianSample h = sample_hamiltonian(model, n_per_species, replica_seed(seed, 1));
    const double n_total = total_size(n_per_species);

    CovarianceReport report;
    report.trials = trials;
    report.pairs.resize(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        report.pairs[k].r = overlap(pairs[k].first, pairs[k].second);
        report.pairs[k].target = n_total * xi_eval(model, report.pairs[k].r);
    }

    std::vector<long double> sum(pairs.size(), 0.0L), sumsq(pairs.size(), 0.0L);
    for (int t = 0; t < trials; ++t) {
        if (t > 0) resample(h, replica_seed(seed, static_cast<std::uint64_t>(t) + 1));
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const double x =
                eval_hamiltonian(h, pairs[k].first) * eval_hamiltonian(h, pairs[k].second);
            sum[k] += x;
            sumsq[k] += static_cast<long double>(x) * x;
        }
    }
    report.max_abs_deviation = 0.0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        auto& p = report.pairs[k];
        const long double mean = sum[k] / trials;
        const long double var =
            std::max(0.0L, (sumsq[k] - static_cast<long double>(trials) * mean * mean) /
                               (trials - 1));
        p.mean = static_cast<double>(mean);
        p.std_error = static_cast<double>(std::sqrt(var / trials));
        if (p.std_error == 0.0) {
            p.deviation = (p.mean == p.target) ? 0.0 : std::numeric_limits<double>::infinity();
        } else {
            p.deviation = (p.mean - p.target) / p.std_error;
        }
        report.max_abs_deviation = std::max(report.max_abs_deviation, std::abs(p.deviation));
    }
    return report;
}

CovarianceReport covariance_check(const ModelSpec& model, const std::vector<int>& n_per_species,
                                  int trials, int pairs, std::uint64_t seed) {
    if (pairs < 1) {
        throw std::invalid_argument("covariance check: pairs must be >= 1, got " +
                                    std::to_string(pairs));
    }
    check_sizes(model, n_per_species, "covariance_check");
    std::mt19937_64 rng(replica_seed(seed, 0));
    std::vector<std::pair<Configuration, Configuration>> cfg;
    cfg.reserve(static_cast<std::size_t>(pairs));
    for (int k = 0; k < pairs; ++k) {
        Configuration a = random_configuration(n_per_species, rng);
        Configuration b = random_configuration(n_per_species, rng);
        cfg.emplace_back(std::move(a), std::move(b));
    }
    return covariance_check_pairs(model, n_per_species, cfg, trials, seed);
}

double wishart_ground_state(int n_total, double lambda_s, std::uint64_t seed) {
    if (n_total < 50) {
        throw std::invalid_argument("wishart_ground_state: n must be >= 50, got " +
                                    std::to_string(n_total));
    }
    if (!(lambda_s > 0.0 && lambda_s < 1.0)) {
        throw std::invalid_argument("wishart_ground_state: lambda_s must lie in (0,1), got " +
                                    format_g(lambda_s, 12));
    }
    const int rows = static_cast<int>(std::floor(lambda_s * n_total));
    const int cols = n_total - rows;
    if (rows < 1 || cols < 1) {
        throw std::invalid_argument("wishart_ground_state: degenerate split " +
                                    std::to_string(rows) + "x" + std::to_string(cols));
    }
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = normal(eng);
    }
    Eigen::VectorXd v = Eigen::VectorXd::Constant(cols, 1.0 / std::sqrt(double(cols)));
    double nu = 0.0, nu_prev = -1.0;
    const int max_iter = 500000;
    for (int it = 0; it < max_iter; ++it) {
        const Eigen::VectorXd u = m * v;
        nu = u.squaredNorm();
        if (nu_prev >= 0.0 && std::abs(nu - nu_prev) <= 1e-10 * nu) {
            return std::sqrt(nu / n_total);
        }
        nu_prev = nu;
        Eigen::VectorXd w = m.transpose() * u;
        const double wn = w.norm();
        if (wn == 0.0) break;
        v = w / wn;
    }
    throw NumericalError("wishart_ground_state: power iteration did not converge in " +
                         std::to_string(max_iter) + " iterations");
}

namespace {

double ascend_from(const HamiltonianSample& h, Configuration sigma) {
    const double n_total = total_size(h.n_per_species);
    const double dir_scale_target = std::sqrt(n_total);
    double e = eval_hamiltonian(h, sigma);
    Configuration cand = sigma;
    for (int it = 0; it < 10000; ++it) {
        std::vector<std::vector<double>> grad = hamiltonian_gradient(h, sigma);
        double gnorm2 = 0.0;
        for (std::size_t s = 0; s < grad.size(); ++s) {
            const auto& blk = sigma.block[s];
            double dot = 0.0;
            for (std::size_t i = 0; i < blk.size(); ++i) dot += grad[s][i] * blk[i];
            const double radial = dot / static_cast<double>(blk.size());
            for (std::size_t i = 0; i < blk.size(); ++i) {
                grad[s][i] -= radial * blk[i];
                gnorm2 += grad[s][i] * grad[s][i];
            }
        }
        if (gnorm2 <= 0.0) break;
        // Scale the direction to configuration norm so the step size is the
        // fraction of a radian moved along the manifold.
        const double dir_scale = dir_scale_target / std::sqrt(gnorm2);
        double step = 0.1;
        double e_new = e;
        bool improved = false;
        while (step >= 1e-14) {
            for (std::size_t s = 0; s < grad.size(); ++s) {
                for (std::size_t i = 0; i < grad[s].size(); ++i) {
                    cand.block[s][i] = sigma.block[s][i] + step * dir_scale * grad[s][i];
                }
            }
            retract(cand);
            e_new = eval_hamiltonian(h, cand);
            if (e_new > e) {
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;
        sigma.block.swap(cand.block);
        const double gain = e_new - e;
        e = e_new;
        if (gain <= 1e-10 * std::max(std::abs(e), 1e-300)) break;
    }
    return e;
}

} // namespace

double gradient_ascent_ground_state(const ModelSpec& model, const std::vector<int>& n_per_species,
                                    int restarts, std::uint64_t seed) {
    if (restarts < 1) {
        throw std::invalid_argument("gradient_ascent_ground_state: restarts must be >= 1, got " +
                                    std::to_string(restarts));
    }
    const HamiltonianSample h = sample_hamiltonian(model, n_per_species, replica_seed(seed, 0));
    double best = -std::numeric_limits<double>::infinity();
    for (int r = 1; r <= restarts; ++r) {
        std::mt19937_64 rng(replica_seed(seed, static_cast<std::uint64_t>(r)));
        Configuration sigma = random_configuration(n_per_species, rng);
        best = std::max(best, ascend_from(h, std::move(sigma)));
    }
    return best / total_size(n_per_species);
}

SmallBetaEstimate small_beta_free_energy(const ModelSpec& model,
                                         const std::vector<int>& n_per_species, double beta,
                                         std::int64_t samples, std::uint64_t seed) {
    if (beta < 0.0) {
        throw std::invalid_argument("small_beta_free_energy: beta must be nonnegative, got " +
                                    format_g(beta, 12));
    }
    if (samples < 2) {
        throw std::invalid_argument("small_beta_free_energy: needs at least 2 samples, got " +
                                    std::to_string(samples));
    }
    const HamiltonianSample h = sample_hamiltonian(model, n_per_species, replica_seed(seed, 0));
    std::mt19937_64 rng(replica_seed(seed, 1));
    const double n_total = total_size(n_per_species);

    long double sum = 0.0L, sumsq = 0.0L;
    for (std::int64_t i = 0; i < samples; ++i) {
        const Configuration sigma = random_configuration(n_per_species, rng);
        const long double w = std::exp(static_cast<long double>(beta) *
                                       eval_hamiltonian(h, sigma));
        sum += w;
        sumsq += w * w;
    }
    const long double mean = sum / samples;
    const long double var =
        std::max(0.0L, (sumsq - static_cast<long double>(samples) * mean * mean) / (samples - 1));
    SmallBetaEstimate est;
    est.value = static_cast<double>(std::log(mean) / n_total);
    est.std_error =
        static_cast<double>(std::sqrt(var / samples) / mean / n_total);
    return est;
}

std::vector<int> species_sizes(const ModelSpec& model, int n_total) {
    if (n_total < static_cast<int>(2 * model.n_species())) {
        throw std::invalid_argument("species_sizes: n = " + std::to_string(n_total) +
                                    " is too small for " + std::to_string(model.n_species()) +
                                    " species");
    }
    std::vector<int> sizes(model.n_species());
    int assigned = 0;
    for (std::size_t s = 0; s < model.n_species(); ++s) {
        sizes[s] = static_cast<int>(std::floor(model.lambda(s) * n_total));
        assigned += sizes[s];
    }
    for (std::size_t s = 0; assigned < n_total; ++s, ++assigned) sizes[s] += 1;
    return sizes;
}

} // namespace msglass
