#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sldisco/corpus.hpp"
#include "sldisco/pdag.hpp"
#include "sldisco/rng.hpp"

namespace sldisco::net {

using MatRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Hyperparameters {
    int p = 5;
    int filters = 32;        // per branch
    int dense_units = 0;     // 0 resolves to 4 p^2
    int pool = 2;            // pool x pool window, stride = pool
    double dropout_rate = 0.2;
    int epochs = 150;
    int batch_size = 256;
    double learning_rate = 1e-3;

    int resolved_dense_units() const { return dense_units > 0 ? dense_units : 4 * p * p; }
    int pooled_side() const { return p / pool; }
    int flat_size() const { return 4 * filters * pooled_side() * pooled_side(); }
    void validate() const;
};

// Trainable tensors in declaration order; this order fixes initialization,
// the optimizer sweep and the on-disk layout. Branches: column-wise (p,1)
// kernel, row-wise (1,p), entry-wise (1,1), local 3x3. All convolutions are
// same-padded so the branches concatenate channel-wise at p x p.
struct NetworkParameters {
    Hyperparameters hyper;
    Eigen::MatrixXd col_w;  // filters x p
    Eigen::VectorXd col_b;
    Eigen::MatrixXd row_w;  // filters x p
    Eigen::VectorXd row_b;
    Eigen::VectorXd pix_w;  // filters
    Eigen::VectorXd pix_b;
    Eigen::MatrixXd loc_w;  // filters x 9
    Eigen::VectorXd loc_b;
    Eigen::MatrixXd fc_w;   // dense_units x flat
    Eigen::VectorXd fc_b;
    Eigen::MatrixXd out_w;  // p^2 x dense_units
    Eigen::VectorXd out_b;  // p^2

    std::int64_t parameter_count() const;

    struct View {
        double* data;
        std::int64_t size;
    };
    struct ConstView {
        const double* data;
        std::int64_t size;
    };
    std::vector<View> tensor_views();
    std::vector<ConstView> tensor_views() const;
};

std::int64_t parameter_count_formula(const Hyperparameters& hyper);

// Glorot-uniform weights, zero biases. Requires p >= 3.
NetworkParameters build_network(const Hyperparameters& hyper, Rng& rng);

// Inverted-dropout scale vectors: entries are 0 (dropped) or 1/(1-rate).
// Default-constructed masks act as the identity (inference).
struct DropoutMasks {
    Eigen::VectorXd flat;
    Eigen::VectorXd dense;
    bool active() const { return flat.size() > 0; }
};

DropoutMasks draw_masks(const Hyperparameters& hyper, Rng& rng);

struct Batch {
    MatRM features;  // B x p^2, row-major flattening of the correlation matrix
    MatRM labels;    // B x p^2 in {0,1}
};

// Deterministic inference pass; entries strictly inside (0,1).
Eigen::MatrixXd forward(const NetworkParameters& params, const Eigen::MatrixXd& feature);
// Training-mode pass with explicit dropout masks.
Eigen::MatrixXd forward_train(const NetworkParameters& params, const Eigen::MatrixXd& feature,
                              const DropoutMasks& masks);

// Mean binary cross-entropy over all p^2 cells, probabilities clamped to
// [1e-7, 1 - 1e-7].
double bce_loss(const Eigen::MatrixXd& probs, const PdagMatrix& label);

// Mean BCE over the batch under fixed masks (pass inactive masks for none).
double batch_loss(const NetworkParameters& params, const Batch& batch,
                  const DropoutMasks& masks);

// Gradient of batch_loss with respect to every trainable scalar, returned in
// parameter shape. The rng overload draws the masks for the batch first.
NetworkParameters gradient(const NetworkParameters& params, const Batch& batch,
                           const DropoutMasks& masks);
NetworkParameters gradient(const NetworkParameters& params, const Batch& batch, Rng& rng);

struct TrainLogRow {
    int epoch;
    double mean_loss;
    double wall_seconds;
};

struct TrainResult {
    NetworkParameters params;
    std::vector<TrainLogRow> log;
};

// Adam (lr from hyper, beta1 0.9, beta2 0.999, eps 1e-7) over shuffled
// mini-batches for the configured epochs. Deterministic given the seed.
// Throws NumericError naming the epoch if the loss becomes non-finite.
TrainResult train(const corpus::Corpus& corpus, const Hyperparameters& hyper,
                  std::uint64_t seed);

void write_training_log(const std::filesystem::path& path,
                        const std::vector<TrainLogRow>& log);

// Model container: text header (hyperparameters, training sample size, seed,
// corpus hash, tensor table, weight checksum) followed by little-endian
// float32 tensors in declaration order (column-major within each tensor).
void save_model(const std::filesystem::path& path, const NetworkParameters& params,
                std::uint64_t seed, std::uint64_t corpus_hash, int train_n);

struct LoadedModel {
    NetworkParameters params;
    std::uint64_t seed = 0;
    std::uint64_t corpus_hash = 0;
    int train_n = 0;
};

LoadedModel load_model(const std::filesystem::path& path);

}  // namespace sldisco::net
