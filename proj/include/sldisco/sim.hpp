#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sldisco/pdag.hpp"
#include "sldisco/rng.hpp"

namespace sldisco::sim {

// Linear Gaussian structural equation model. beta(i, j) is the coefficient of
// Xj in the equation for Xi and is nonzero exactly on the DAG's edges j -> i;
// sigma(i) is the noise standard deviation of Xi.
struct SemModel {
    PdagMatrix dag;
    Eigen::MatrixXd beta;
    Eigen::VectorXd sigma;
};

// One supervised example: permuted correlation matrix plus the equally
// permuted class representative of the generating DAG.
struct TrainingPair {
    Eigen::MatrixXd feature;
    PdagMatrix label;
    std::vector<int> permutation;
};

// Round-half-to-even, exposed for direct testing.
double round_half_even(double x);

// Random DAG in the causal order X1..Xp: start from the complete
// lower-triangular pattern, draw sparsity s ~ Unif[0, 0.8] and delete
// round(s * p(p-1)/2) uniformly chosen edges. Requires p >= 2.
PdagMatrix sample_dag(int p, Rng& rng);

// sigma_i ~ Unif[0.5, 2]; each edge weight is magnitude Unif[0.1, 2] with
// sign -1/+1 drawn with probabilities 0.4/0.6. Requires a DAG.
SemModel sample_sem(const PdagMatrix& dag, Rng& rng);

// n i.i.d. rows from the SEM, one column per variable. Noise is drawn in
// column-index order so the stream is independent of the internal evaluation
// order; variables are resolved along a topological order of the DAG.
// Requires n >= 2.
Eigen::MatrixXd simulate_data(const SemModel& sem, int n, Rng& rng);

// Pearson correlations of the columns. A zero-variance column is an error.
Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& data);

// Population correlation matrix of the SEM: the n -> infinity limit of
// correlation_matrix(simulate_data(sem, n)). Covariance is
// (I - B)^-1 diag(sigma^2) (I - B)^-T for the weight matrix above.
Eigen::MatrixXd analytic_correlation(const SemModel& sem);

// Apply permutation perm to rows and columns: out[a][b] = in[perm[a]][perm[b]].
Eigen::MatrixXd permute_matrix(const Eigen::MatrixXd& m, const std::vector<int>& perm);
PdagMatrix permute_graph(const PdagMatrix& g, const std::vector<int>& perm);

TrainingPair permute_pair(const Eigen::MatrixXd& c, const PdagMatrix& label,
                          const std::vector<int>& perm);

std::vector<int> random_permutation(int p, Rng& rng);

// The full per-item pipeline from a dedicated item seed:
// sample_dag -> sample_sem -> simulate_data -> correlation_matrix,
// label = class representative of the DAG, then a fresh permutation of both.
TrainingPair make_training_pair(int p, int n, std::uint64_t item_seed);

}  // namespace sldisco::sim
