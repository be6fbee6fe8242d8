#include "sldisco/sim.hpp"

#include <cmath>

#include "sldisco/errors.hpp"
#include "sldisco/graph.hpp"

namespace sldisco::sim {

double round_half_even(double x) {
    const double f = std::floor(x);
    const double frac = x - f;
    if (frac > 0.5) return f + 1.0;
    if (frac < 0.5) return f;
    return std::fmod(f, 2.0) == 0.0 ? f : f + 1.0;
}

PdagMatrix sample_dag(int p, Rng& rng) {
    if (p < 2) throw DataError("sample_dag: p must be at least 2");
    const int n_lowtri = p * (p - 1) / 2;
    const double s = rng.uniform(0.0, 0.8);
    const int n_zero = static_cast<int>(round_half_even(s * n_lowtri));

    // Lower-triangular cells in row-major order; partial Fisher-Yates picks
    // the deletions uniformly without replacement.
    std::vector<std::pair<int, int>> cells;
    cells.reserve(n_lowtri);
    for (int i = 1; i < p; ++i)
        for (int j = 0; j < i; ++j) cells.push_back({i, j});
    for (int k = 0; k < n_zero; ++k) {
        const auto r = k + static_cast<int>(rng.uniform_index(n_lowtri - k));
        std::swap(cells[k], cells[r]);
    }

    PdagMatrix dag(p);
    for (int i = 1; i < p; ++i)
        for (int j = 0; j < i; ++j) dag.add_directed(j, i);
    for (int k = 0; k < n_zero; ++k) dag.remove_edge(cells[k].first, cells[k].second);
    return dag;
}

SemModel sample_sem(const PdagMatrix& dag, Rng& rng) {
    if (!dag.is_dag()) throw DataError("sample_sem: input is not a DAG");
    const int p = dag.node_count();
    SemModel sem{dag, Eigen::MatrixXd::Zero(p, p), Eigen::VectorXd::Zero(p)};
    for (int i = 0; i < p; ++i) sem.sigma(i) = rng.uniform(0.5, 2.0);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            if (i != j && dag.has_directed(j, i)) {
                const double b_val = rng.uniform(0.1, 2.0);
                const double b_sign = rng.bernoulli(0.6) ? 1.0 : -1.0;
                sem.beta(i, j) = b_val * b_sign;
            }
    return sem;
}

Eigen::MatrixXd simulate_data(const SemModel& sem, int n, Rng& rng) {
    if (n < 2) throw DataError("simulate_data: n must be at least 2");
    const int p = sem.dag.node_count();
    Eigen::MatrixXd data(n, p);
    for (int r = 0; r < n; ++r)
        for (int i = 0; i < p; ++i) data(r, i) = sem.sigma(i) * rng.normal();
    const auto order = sem.dag.topological_order();
    for (int r = 0; r < n; ++r)
        for (int idx : order) {
            double acc = data(r, idx);
            for (int j = 0; j < p; ++j)
                if (sem.beta(idx, j) != 0.0) acc += data(r, j) * sem.beta(idx, j);
            data(r, idx) = acc;
        }
    return data;
}

Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& data) {
    const int n = static_cast<int>(data.rows());
    const int p = static_cast<int>(data.cols());
    if (n < 2) throw DataError("correlation_matrix: need at least 2 rows");
    Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
    Eigen::VectorXd norms(p);
    for (int j = 0; j < p; ++j) {
        norms(j) = centered.col(j).norm();
        if (norms(j) == 0.0)
            throw DataError("correlation_matrix: column " + std::to_string(j + 1) +
                            " has zero variance");
    }
    Eigen::MatrixXd c(p, p);
    for (int i = 0; i < p; ++i) {
        c(i, i) = 1.0;
        for (int j = i + 1; j < p; ++j) {
            const double v = centered.col(i).dot(centered.col(j)) / (norms(i) * norms(j));
            c(i, j) = v;
            c(j, i) = v;
        }
    }
    return c;
}

Eigen::MatrixXd analytic_correlation(const SemModel& sem) {
    const int p = sem.dag.node_count();
    const Eigen::MatrixXd ib = Eigen::MatrixXd::Identity(p, p) - sem.beta;
    const Eigen::MatrixXd inv = ib.inverse();  // always invertible for a DAG
    const Eigen::MatrixXd cov =
        inv * sem.sigma.array().square().matrix().asDiagonal() * inv.transpose();
    Eigen::MatrixXd corr(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            corr(i, j) = cov(i, j) / std::sqrt(cov(i, i) * cov(j, j));
    return corr;
}

Eigen::MatrixXd permute_matrix(const Eigen::MatrixXd& m, const std::vector<int>& perm) {
    const int p = static_cast<int>(m.rows());
    if (static_cast<int>(perm.size()) != p || m.cols() != p)
        throw DataError("permute_matrix: size mismatch");
    Eigen::MatrixXd out(p, p);
    for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b) out(a, b) = m(perm[a], perm[b]);
    return out;
}

PdagMatrix permute_graph(const PdagMatrix& g, const std::vector<int>& perm) {
    const int p = g.node_count();
    if (static_cast<int>(perm.size()) != p) throw DataError("permute_graph: size mismatch");
    PdagMatrix out(p);
    for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b) out.set_entry(a, b, g.entry(perm[a], perm[b]));
    return out;
}

TrainingPair permute_pair(const Eigen::MatrixXd& c, const PdagMatrix& label,
                          const std::vector<int>& perm) {
    if (c.rows() != label.node_count())
        throw DataError("permute_pair: feature and label sizes differ");
    return {permute_matrix(c, perm), permute_graph(label, perm), perm};
}

std::vector<int> random_permutation(int p, Rng& rng) {
    std::vector<int> perm(p);
    for (int i = 0; i < p; ++i) perm[i] = i;
    for (int i = p - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.uniform_index(i + 1));
        std::swap(perm[i], perm[j]);
    }
    return perm;
}

TrainingPair make_training_pair(int p, int n, std::uint64_t item_seed) {
    Rng rng(item_seed);
    const PdagMatrix dag = sample_dag(p, rng);
    const SemModel sem = sample_sem(dag, rng);
    const Eigen::MatrixXd data = simulate_data(sem, n, rng);
    const Eigen::MatrixXd corr = correlation_matrix(data);
    const PdagMatrix label = graph::dag_to_cpdag(dag);
    const auto perm = random_permutation(p, rng);
    return permute_pair(corr, label, perm);
}

}  // namespace sldisco::sim
