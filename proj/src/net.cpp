#include "sldisco/net.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "sldisco/errors.hpp"

namespace sldisco::net {

void Hyperparameters::validate() const {
    if (p < 3) throw DataError("network: p must be at least 3 (3x3 kernel with same padding)");
    if (filters < 1) throw DataError("network: filters must be positive");
    if (resolved_dense_units() < 1) throw DataError("network: dense_units must be positive");
    if (pool < 1 || pooled_side() < 1)
        throw DataError("network: pool window must satisfy 1 <= pool <= p");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
        throw DataError("network: dropout_rate must lie in [0, 1)");
    if (epochs < 1) throw DataError("network: epochs must be positive");
    if (batch_size < 1) throw DataError("network: batch_size must be positive");
    if (!(learning_rate > 0.0)) throw DataError("network: learning_rate must be positive");
}

std::vector<NetworkParameters::View> NetworkParameters::tensor_views() {
    return {
        {col_w.data(), col_w.size()}, {col_b.data(), col_b.size()},
        {row_w.data(), row_w.size()}, {row_b.data(), row_b.size()},
        {pix_w.data(), pix_w.size()}, {pix_b.data(), pix_b.size()},
        {loc_w.data(), loc_w.size()}, {loc_b.data(), loc_b.size()},
        {fc_w.data(), fc_w.size()},   {fc_b.data(), fc_b.size()},
        {out_w.data(), out_w.size()}, {out_b.data(), out_b.size()},
    };
}

std::vector<NetworkParameters::ConstView> NetworkParameters::tensor_views() const {
    return {
        {col_w.data(), col_w.size()}, {col_b.data(), col_b.size()},
        {row_w.data(), row_w.size()}, {row_b.data(), row_b.size()},
        {pix_w.data(), pix_w.size()}, {pix_b.data(), pix_b.size()},
        {loc_w.data(), loc_w.size()}, {loc_b.data(), loc_b.size()},
        {fc_w.data(), fc_w.size()},   {fc_b.data(), fc_b.size()},
        {out_w.data(), out_w.size()}, {out_b.data(), out_b.size()},
    };
}

std::int64_t NetworkParameters::parameter_count() const {
    std::int64_t total = 0;
    for (const auto& v : tensor_views()) total += v.size;
    return total;
}

std::int64_t parameter_count_formula(const Hyperparameters& hyper) {
    const std::int64_t f = hyper.filters;
    const std::int64_t p = hyper.p;
    const std::int64_t d = hyper.resolved_dense_units();
    const std::int64_t s = hyper.flat_size();
    return 2 * (f * p + f) + (f + f) + (9 * f + f) + d * s + d + p * p * d + p * p;
}

NetworkParameters build_network(const Hyperparameters& hyper, Rng& rng) {
    hyper.validate();
    const int f = hyper.filters;
    const int p = hyper.p;
    const int d = hyper.resolved_dense_units();
    const int s = hyper.flat_size();

    NetworkParameters params;
    params.hyper = hyper;
    params.col_w.resize(f, p);
    params.col_b = Eigen::VectorXd::Zero(f);
    params.row_w.resize(f, p);
    params.row_b = Eigen::VectorXd::Zero(f);
    params.pix_w.resize(f);
    params.pix_b = Eigen::VectorXd::Zero(f);
    params.loc_w.resize(f, 9);
    params.loc_b = Eigen::VectorXd::Zero(f);
    params.fc_w.resize(d, s);
    params.fc_b = Eigen::VectorXd::Zero(d);
    params.out_w.resize(p * p, d);
    params.out_b = Eigen::VectorXd::Zero(p * p);

    const auto glorot = [&rng](double* data, std::int64_t size, double fan_in, double fan_out) {
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        for (std::int64_t k = 0; k < size; ++k) data[k] = rng.uniform(-limit, limit);
    };
    glorot(params.col_w.data(), params.col_w.size(), p, static_cast<double>(p) * f);
    glorot(params.row_w.data(), params.row_w.size(), p, static_cast<double>(p) * f);
    glorot(params.pix_w.data(), params.pix_w.size(), 1, f);
    glorot(params.loc_w.data(), params.loc_w.size(), 9, 9.0 * f);
    glorot(params.fc_w.data(), params.fc_w.size(), s, d);
    glorot(params.out_w.data(), params.out_w.size(), d, static_cast<double>(p) * p);
    return params;
}

DropoutMasks draw_masks(const Hyperparameters& hyper, Rng& rng) {
    DropoutMasks masks;
    if (hyper.dropout_rate <= 0.0) return masks;
    const double keep = 1.0 - hyper.dropout_rate;
    const double scale = 1.0 / keep;
    masks.flat.resize(hyper.flat_size());
    for (Eigen::Index k = 0; k < masks.flat.size(); ++k)
        masks.flat(k) = rng.bernoulli(keep) ? scale : 0.0;
    masks.dense.resize(hyper.resolved_dense_units());
    for (Eigen::Index k = 0; k < masks.dense.size(); ++k)
        masks.dense(k) = rng.bernoulli(keep) ? scale : 0.0;
    return masks;
}

namespace {

struct ForwardCache {
    int batch = 0;
    std::vector<double> conv;            // B * 4F * p * p, post-relu
    std::vector<std::uint8_t> pool_idx;  // B * 4F * q * q, offset of the window max
    MatRM x;                             // B x S, pooled + flattened
    MatRM x_drop;                        // B x S
    MatRM a1;                            // B x D, post-relu
    MatRM a1_drop;                       // B x D
    MatRM probs;                         // B x p^2
};

void conv_forward(const NetworkParameters& params, const MatRM& features,
                  std::vector<double>& conv) {
    const auto& h = params.hyper;
    const int p = h.p;
    const int f = h.filters;
    const int c_total = 4 * f;
    const int b_total = static_cast<int>(features.rows());
    const int pb_long = (p - 1) / 2;  // same padding for the (p,1)/(1,p) kernels
    conv.assign(static_cast<std::size_t>(b_total) * c_total * p * p, 0.0);

    for (int b = 0; b < b_total; ++b) {
        const double* in = features.data() + static_cast<std::ptrdiff_t>(b) * p * p;
        double* out_base = conv.data() + static_cast<std::ptrdiff_t>(b) * c_total * p * p;
        for (int ff = 0; ff < f; ++ff) {
            // column-wise kernel (p, 1): taps walk the row index
            double* out = out_base + static_cast<std::ptrdiff_t>(ff) * p * p;
            for (int i = 0; i < p; ++i) {
                const int klo = std::max(0, pb_long - i);
                const int khi = std::min(p - 1, p - 1 + pb_long - i);
                for (int j = 0; j < p; ++j) {
                    double acc = params.col_b(ff);
                    for (int k = klo; k <= khi; ++k)
                        acc += params.col_w(ff, k) * in[(i - pb_long + k) * p + j];
                    out[i * p + j] = acc > 0.0 ? acc : 0.0;
                }
            }
            // row-wise kernel (1, p)
            out = out_base + static_cast<std::ptrdiff_t>(f + ff) * p * p;
            for (int i = 0; i < p; ++i)
                for (int j = 0; j < p; ++j) {
                    const int klo = std::max(0, pb_long - j);
                    const int khi = std::min(p - 1, p - 1 + pb_long - j);
                    double acc = params.row_b(ff);
                    for (int k = klo; k <= khi; ++k)
                        acc += params.row_w(ff, k) * in[i * p + (j - pb_long + k)];
                    out[i * p + j] = acc > 0.0 ? acc : 0.0;
                }
            // entry-wise kernel (1, 1)
            out = out_base + static_cast<std::ptrdiff_t>(2 * f + ff) * p * p;
            for (int ij = 0; ij < p * p; ++ij) {
                const double acc = params.pix_b(ff) + params.pix_w(ff) * in[ij];
                out[ij] = acc > 0.0 ? acc : 0.0;
            }
            // local 3x3 kernel
            out = out_base + static_cast<std::ptrdiff_t>(3 * f + ff) * p * p;
            for (int i = 0; i < p; ++i)
                for (int j = 0; j < p; ++j) {
                    double acc = params.loc_b(ff);
                    for (int u = 0; u < 3; ++u) {
                        const int r = i - 1 + u;
                        if (r < 0 || r >= p) continue;
                        for (int v = 0; v < 3; ++v) {
                            const int cc = j - 1 + v;
                            if (cc < 0 || cc >= p) continue;
                            acc += params.loc_w(ff, 3 * u + v) * in[r * p + cc];
                        }
                    }
                    out[i * p + j] = acc > 0.0 ? acc : 0.0;
                }
        }
    }
}

void run_forward(const NetworkParameters& params, const MatRM& features,
                 const DropoutMasks& masks, ForwardCache& cache) {
    const auto& h = params.hyper;
    const int p = h.p;
    const int c_total = 4 * h.filters;
    const int q = h.pooled_side();
    const int s = h.flat_size();
    const int b_total = static_cast<int>(features.rows());
    cache.batch = b_total;

    conv_forward(params, features, cache.conv);

    cache.pool_idx.assign(static_cast<std::size_t>(b_total) * c_total * q * q, 0);
    cache.x.resize(b_total, s);
    const int window = h.pool;
    for (int b = 0; b < b_total; ++b) {
        const double* conv_base = cache.conv.data() + static_cast<std::ptrdiff_t>(b) * c_total * p * p;
        std::uint8_t* idx_base =
            cache.pool_idx.data() + static_cast<std::ptrdiff_t>(b) * c_total * q * q;
        for (int c = 0; c < c_total; ++c) {
            const double* plane = conv_base + static_cast<std::ptrdiff_t>(c) * p * p;
            for (int a = 0; a < q; ++a)
                for (int d = 0; d < q; ++d) {
                    double best = plane[(a * window) * p + (d * window)];
                    int best_uv = 0;
                    for (int u = 0; u < window; ++u)
                        for (int v = 0; v < window; ++v) {
                            const double val = plane[(a * window + u) * p + (d * window + v)];
                            if (val > best) {
                                best = val;
                                best_uv = u * window + v;
                            }
                        }
                    idx_base[(c * q + a) * q + d] = static_cast<std::uint8_t>(best_uv);
                    cache.x(b, c * q * q + a * q + d) = best;
                }
        }
    }

    if (masks.active())
        cache.x_drop = (cache.x.array().rowwise() * masks.flat.transpose().array()).matrix();
    else
        cache.x_drop = cache.x;

    cache.a1 = ((cache.x_drop * params.fc_w.transpose()).rowwise() +
                params.fc_b.transpose())
                   .cwiseMax(0.0);
    if (masks.active())
        cache.a1_drop = (cache.a1.array().rowwise() * masks.dense.transpose().array()).matrix();
    else
        cache.a1_drop = cache.a1;

    MatRM z2 = (cache.a1_drop * params.out_w.transpose()).rowwise() + params.out_b.transpose();
    cache.probs = (1.0 / (1.0 + (-z2.array()).exp())).matrix();
}

double mean_bce(const MatRM& probs, const MatRM& labels) {
    constexpr double eps = 1e-7;
    const auto o = probs.array().max(eps).min(1.0 - eps);
    const auto y = labels.array();
    const double total = -(y * o.log() + (1.0 - y) * (1.0 - o).log()).sum();
    return total / static_cast<double>(probs.size());
}

NetworkParameters zero_like(const NetworkParameters& params) {
    NetworkParameters g;
    g.hyper = params.hyper;
    g.col_w = Eigen::MatrixXd::Zero(params.col_w.rows(), params.col_w.cols());
    g.col_b = Eigen::VectorXd::Zero(params.col_b.size());
    g.row_w = Eigen::MatrixXd::Zero(params.row_w.rows(), params.row_w.cols());
    g.row_b = Eigen::VectorXd::Zero(params.row_b.size());
    g.pix_w = Eigen::VectorXd::Zero(params.pix_w.size());
    g.pix_b = Eigen::VectorXd::Zero(params.pix_b.size());
    g.loc_w = Eigen::MatrixXd::Zero(params.loc_w.rows(), params.loc_w.cols());
    g.loc_b = Eigen::VectorXd::Zero(params.loc_b.size());
    g.fc_w = Eigen::MatrixXd::Zero(params.fc_w.rows(), params.fc_w.cols());
    g.fc_b = Eigen::VectorXd::Zero(params.fc_b.size());
    g.out_w = Eigen::MatrixXd::Zero(params.out_w.rows(), params.out_w.cols());
    g.out_b = Eigen::VectorXd::Zero(params.out_b.size());
    return g;
}

NetworkParameters run_backward(const NetworkParameters& params, const MatRM& features,
                               const MatRM& labels, const DropoutMasks& masks,
                               const ForwardCache& cache) {
    const auto& h = params.hyper;
    const int p = h.p;
    const int f = h.filters;
    const int c_total = 4 * f;
    const int q = h.pooled_side();
    const int b_total = cache.batch;
    const int window = h.pool;
    const int pb_long = (p - 1) / 2;
    NetworkParameters g = zero_like(params);

    const double scale = 1.0 / (static_cast<double>(p) * p * b_total);
    const MatRM d_z2 = (cache.probs - labels) * scale;

    g.out_w = d_z2.transpose() * cache.a1_drop;
    g.out_b = d_z2.colwise().sum().transpose();

    MatRM d_a1 = d_z2 * params.out_w;
    if (masks.active())
        d_a1 = (d_a1.array().rowwise() * masks.dense.transpose().array()).matrix();
    const MatRM d_z1 =
        ((cache.a1.array() > 0.0).cast<double>() * d_a1.array()).matrix();

    g.fc_w = d_z1.transpose() * cache.x_drop;
    g.fc_b = d_z1.colwise().sum().transpose();

    MatRM d_x = d_z1 * params.fc_w;
    if (masks.active())
        d_x = (d_x.array().rowwise() * masks.flat.transpose().array()).matrix();

    // Route pooled gradients back to the window maxima. The relu mask is
    // implicit: a selected maximum of 0 has a zero upstream activation.
    std::vector<double> d_conv(static_cast<std::size_t>(b_total) * c_total * p * p, 0.0);
    for (int b = 0; b < b_total; ++b) {
        const std::uint8_t* idx_base =
            cache.pool_idx.data() + static_cast<std::ptrdiff_t>(b) * c_total * q * q;
        const double* conv_base =
            cache.conv.data() + static_cast<std::ptrdiff_t>(b) * c_total * p * p;
        double* dcv_base = d_conv.data() + static_cast<std::ptrdiff_t>(b) * c_total * p * p;
        for (int c = 0; c < c_total; ++c)
            for (int a = 0; a < q; ++a)
                for (int d = 0; d < q; ++d) {
                    const int uv = idx_base[(c * q + a) * q + d];
                    const int i = a * window + uv / window;
                    const int j = d * window + uv % window;
                    const std::ptrdiff_t cell = static_cast<std::ptrdiff_t>(c) * p * p + i * p + j;
                    if (conv_base[cell] > 0.0)
                        dcv_base[cell] += d_x(b, c * q * q + a * q + d);
                }
    }

    for (int b = 0; b < b_total; ++b) {
        const double* in = features.data() + static_cast<std::ptrdiff_t>(b) * p * p;
        const double* dcv_base = d_conv.data() + static_cast<std::ptrdiff_t>(b) * c_total * p * p;
        for (int ff = 0; ff < f; ++ff) {
            const double* dcv = dcv_base + static_cast<std::ptrdiff_t>(ff) * p * p;
            for (int i = 0; i < p; ++i) {
                const int klo = std::max(0, pb_long - i);
                const int khi = std::min(p - 1, p - 1 + pb_long - i);
                for (int j = 0; j < p; ++j) {
                    const double d_out = dcv[i * p + j];
                    if (d_out == 0.0) continue;
                    g.col_b(ff) += d_out;
                    for (int k = klo; k <= khi; ++k)
                        g.col_w(ff, k) += d_out * in[(i - pb_long + k) * p + j];
                }
            }
            dcv = dcv_base + static_cast<std::ptrdiff_t>(f + ff) * p * p;
            for (int i = 0; i < p; ++i)
                for (int j = 0; j < p; ++j) {
                    const double d_out = dcv[i * p + j];
                    if (d_out == 0.0) continue;
                    g.row_b(ff) += d_out;
                    const int klo = std::max(0, pb_long - j);
                    const int khi = std::min(p - 1, p - 1 + pb_long - j);
                    for (int k = klo; k <= khi; ++k)
                        g.row_w(ff, k) += d_out * in[i * p + (j - pb_long + k)];
                }
            dcv = dcv_base + static_cast<std::ptrdiff_t>(2 * f + ff) * p * p;
            for (int ij = 0; ij < p * p; ++ij) {
                const double d_out = dcv[ij];
                if (d_out == 0.0) continue;
                g.pix_b(ff) += d_out;
                g.pix_w(ff) += d_out * in[ij];
            }
            dcv = dcv_base + static_cast<std::ptrdiff_t>(3 * f + ff) * p * p;
            for (int i = 0; i < p; ++i)
                for (int j = 0; j < p; ++j) {
                    const double d_out = dcv[i * p + j];
                    if (d_out == 0.0) continue;
                    g.loc_b(ff) += d_out;
                    for (int u = 0; u < 3; ++u) {
                        const int r = i - 1 + u;
                        if (r < 0 || r >= p) continue;
                        for (int v = 0; v < 3; ++v) {
                            const int cc = j - 1 + v;
                            if (cc < 0 || cc >= p) continue;
                            g.loc_w(ff, 3 * u + v) += d_out * in[r * p + cc];
                        }
                    }
                }
        }
    }
    return g;
}

MatRM to_row(const Eigen::MatrixXd& feature) {
    const int p = static_cast<int>(feature.rows());
    MatRM row(1, p * p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) row(0, i * p + j) = feature(i, j);
    return row;
}

void require_input(const NetworkParameters& params, const Eigen::MatrixXd& feature) {
    if (feature.rows() != params.hyper.p || feature.cols() != params.hyper.p)
        throw DataError("forward: feature is not p x p for the model's p");
    if (!feature.allFinite()) throw DataError("forward: non-finite input");
}

Eigen::MatrixXd reshape_probs(const MatRM& probs, int p) {
    Eigen::MatrixXd out(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) out(i, j) = probs(0, i * p + j);
    return out;
}

}  // namespace

Eigen::MatrixXd forward(const NetworkParameters& params, const Eigen::MatrixXd& feature) {
    require_input(params, feature);
    ForwardCache cache;
    run_forward(params, to_row(feature), DropoutMasks{}, cache);
    return reshape_probs(cache.probs, params.hyper.p);
}

Eigen::MatrixXd forward_train(const NetworkParameters& params, const Eigen::MatrixXd& feature,
                              const DropoutMasks& masks) {
    require_input(params, feature);
    ForwardCache cache;
    run_forward(params, to_row(feature), masks, cache);
    return reshape_probs(cache.probs, params.hyper.p);
}

double bce_loss(const Eigen::MatrixXd& probs, const PdagMatrix& label) {
    const int p = label.node_count();
    if (probs.rows() != p || probs.cols() != p)
        throw DataError("bce_loss: shape mismatch between probabilities and label");
    constexpr double eps = 1e-7;
    double total = 0.0;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            const double o = std::clamp(probs(i, j), eps, 1.0 - eps);
            const double y = label.entry(i, j);
            total -= y * std::log(o) + (1.0 - y) * std::log(1.0 - o);
        }
    return total / (static_cast<double>(p) * p);
}

double batch_loss(const NetworkParameters& params, const Batch& batch,
                  const DropoutMasks& masks) {
    if (batch.features.rows() == 0) throw DataError("batch_loss: empty batch");
    ForwardCache cache;
    run_forward(params, batch.features, masks, cache);
    return mean_bce(cache.probs, batch.labels);
}

NetworkParameters gradient(const NetworkParameters& params, const Batch& batch,
                           const DropoutMasks& masks) {
    if (batch.features.rows() == 0) throw DataError("gradient: empty batch");
    if (batch.features.cols() != params.hyper.p * params.hyper.p ||
        batch.labels.rows() != batch.features.rows() ||
        batch.labels.cols() != batch.features.cols())
        throw DataError("gradient: batch shapes do not match the model");
    ForwardCache cache;
    run_forward(params, batch.features, masks, cache);
    return run_backward(params, batch.features, batch.labels, masks, cache);
}

NetworkParameters gradient(const NetworkParameters& params, const Batch& batch, Rng& rng) {
    const DropoutMasks masks = draw_masks(params.hyper, rng);
    return gradient(params, batch, masks);
}

TrainResult train(const corpus::Corpus& corpus, const Hyperparameters& hyper,
                  std::uint64_t seed) {
    hyper.validate();
    if (corpus.items.empty()) throw DataError("train: corpus is empty");
    if (corpus.p != hyper.p)
        throw DataError("train: corpus p=" + std::to_string(corpus.p) +
                        " does not match network p=" + std::to_string(hyper.p));

    const int p = hyper.p;
    const int cells = p * p;
    const auto n_items = static_cast<int>(corpus.items.size());
    MatRM features(n_items, cells);
    MatRM labels(n_items, cells);
    for (int k = 0; k < n_items; ++k) {
        const auto& item = corpus.items[static_cast<std::size_t>(k)];
        for (int c = 0; c < cells; ++c) {
            features(k, c) = static_cast<double>(item.feature[static_cast<std::size_t>(c)]);
            labels(k, c) = static_cast<double>(item.label[static_cast<std::size_t>(c)]);
        }
    }

    Rng rng(seed);
    TrainResult result{build_network(hyper, rng), {}};
    NetworkParameters adam_m = zero_like(result.params);
    NetworkParameters adam_v = zero_like(result.params);
    auto theta = result.params.tensor_views();
    auto m_view = adam_m.tensor_views();
    auto v_view = adam_v.tensor_views();

    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    constexpr double adam_eps = 1e-7;
    long step = 0;

    std::vector<int> order(static_cast<std::size_t>(n_items));
    for (int k = 0; k < n_items; ++k) order[static_cast<std::size_t>(k)] = k;

    const auto start = std::chrono::steady_clock::now();
    ForwardCache cache;
    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        for (int k = n_items - 1; k > 0; --k) {
            const int j = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(k) + 1));
            std::swap(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(j)]);
        }
        double loss_sum = 0.0;
        for (int begin = 0; begin < n_items; begin += hyper.batch_size) {
            const int b_eff = std::min(hyper.batch_size, n_items - begin);
            MatRM bf(b_eff, cells), bl(b_eff, cells);
            for (int r = 0; r < b_eff; ++r) {
                const int src = order[static_cast<std::size_t>(begin + r)];
                bf.row(r) = features.row(src);
                bl.row(r) = labels.row(src);
            }
            const DropoutMasks masks = draw_masks(hyper, rng);
            run_forward(result.params, bf, masks, cache);
            const double loss = mean_bce(cache.probs, bl);
            if (!std::isfinite(loss))
                throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch));
            loss_sum += loss * b_eff;

            NetworkParameters grads = run_backward(result.params, bf, bl, masks, cache);
            const auto g_view = grads.tensor_views();
            ++step;
            const double corr1 = 1.0 - std::pow(beta1, static_cast<double>(step));
            const double corr2 = 1.0 - std::pow(beta2, static_cast<double>(step));
            for (std::size_t t = 0; t < theta.size(); ++t) {
                double* th = theta[t].data;
                double* mm = m_view[t].data;
                double* vv = v_view[t].data;
                const double* gg = g_view[t].data;
                const auto size = theta[t].size;
                for (std::int64_t k = 0; k < size; ++k) {
                    mm[k] = beta1 * mm[k] + (1.0 - beta1) * gg[k];
                    vv[k] = beta2 * vv[k] + (1.0 - beta2) * gg[k] * gg[k];
                    const double mh = mm[k] / corr1;
                    const double vh = vv[k] / corr2;
                    th[k] -= hyper.learning_rate * mh / (std::sqrt(vh) + adam_eps);
                }
            }
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.log.push_back({epoch, loss_sum / n_items, elapsed});
    }
    return result;
}

void write_training_log(const std::filesystem::path& path,
                        const std::vector<TrainLogRow>& log) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "epoch,mean_loss,wall_seconds\n";
    char buf[80];
    for (const auto& row : log) {
        std::snprintf(buf, sizeof(buf), "%d,%.10g,%.3f\n", row.epoch, row.mean_loss,
                      row.wall_seconds);
        out << buf;
    }
    if (!out) throw DataError("write failed: " + path.string());
}

namespace {

struct TensorSpec {
    std::string name;
    std::int64_t rows;
    std::int64_t cols;
};

std::vector<TensorSpec> tensor_table(const NetworkParameters& params) {
    return {
        {"col_w", params.col_w.rows(), params.col_w.cols()},
        {"col_b", params.col_b.size(), 1},
        {"row_w", params.row_w.rows(), params.row_w.cols()},
        {"row_b", params.row_b.size(), 1},
        {"pix_w", params.pix_w.size(), 1},
        {"pix_b", params.pix_b.size(), 1},
        {"loc_w", params.loc_w.rows(), params.loc_w.cols()},
        {"loc_b", params.loc_b.size(), 1},
        {"fc_w", params.fc_w.rows(), params.fc_w.cols()},
        {"fc_b", params.fc_b.size(), 1},
        {"out_w", params.out_w.rows(), params.out_w.cols()},
        {"out_b", params.out_b.size(), 1},
    };
}

}  // namespace

void save_model(const std::filesystem::path& path, const NetworkParameters& params,
                std::uint64_t seed, std::uint64_t corpus_hash, int train_n) {
    const auto views = params.tensor_views();
    std::vector<float> blob;
    blob.reserve(static_cast<std::size_t>(params.parameter_count()));
    for (const auto& v : views)
        for (std::int64_t k = 0; k < v.size; ++k)
            blob.push_back(static_cast<float>(v.data[k]));
    const std::uint64_t weights_hash =
        corpus::bytes_fnv1a(blob.data(), blob.size() * sizeof(float));

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    char buf[64];
    out << "SLDISCO-MODEL-V1\n";
    out << "p=" << params.hyper.p << '\n';
    out << "filters=" << params.hyper.filters << '\n';
    out << "dense_units=" << params.hyper.resolved_dense_units() << '\n';
    out << "pool=" << params.hyper.pool << '\n';
    std::snprintf(buf, sizeof(buf), "%.17g", params.hyper.dropout_rate);
    out << "dropout_rate=" << buf << '\n';
    out << "epochs=" << params.hyper.epochs << '\n';
    out << "batch_size=" << params.hyper.batch_size << '\n';
    std::snprintf(buf, sizeof(buf), "%.17g", params.hyper.learning_rate);
    out << "learning_rate=" << buf << '\n';
    out << "train_n=" << train_n << '\n';
    out << "seed=" << seed << '\n';
    out << "corpus_hash=" << corpus::hash_hex(corpus_hash) << '\n';
    out << "weights_fnv=" << corpus::hash_hex(weights_hash) << '\n';
    out << "tensors=";
    const auto table = tensor_table(params);
    for (std::size_t k = 0; k < table.size(); ++k) {
        if (k) out << ',';
        out << table[k].name << ':' << table[k].rows << 'x' << table[k].cols;
    }
    out << "\ndata:\n";
    out.write(reinterpret_cast<const char*>(blob.data()),
              static_cast<std::streamsize>(blob.size() * sizeof(float)));
    if (!out) throw DataError("write failed: " + path.string());
}

LoadedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "SLDISCO-MODEL-V1")
        throw DataError(path.string() + ": not a model file");
    std::map<std::string, std::string> kv;
    while (std::getline(in, line)) {
        if (line == "data:") break;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DataError(path.string() + ": bad header line '" + line + "'");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    const auto need = [&](const std::string& key) {
        const auto it = kv.find(key);
        if (it == kv.end()) throw DataError(path.string() + ": missing header key '" + key + "'");
        return it->second;
    };

    Hyperparameters hyper;
    hyper.p = std::stoi(need("p"));
    hyper.filters = std::stoi(need("filters"));
    hyper.dense_units = std::stoi(need("dense_units"));
    hyper.pool = std::stoi(need("pool"));
    hyper.dropout_rate = std::stod(need("dropout_rate"));
    hyper.epochs = std::stoi(need("epochs"));
    hyper.batch_size = std::stoi(need("batch_size"));
    hyper.learning_rate = std::stod(need("learning_rate"));
    hyper.validate();

    LoadedModel model;
    model.seed = std::stoull(need("seed"));
    model.corpus_hash = std::stoull(need("corpus_hash"), nullptr, 16);
    model.train_n = std::stoi(need("train_n"));
    Rng dummy(0);
    model.params = build_network(hyper, dummy);

    auto views = model.params.tensor_views();
    const auto total = static_cast<std::size_t>(model.params.parameter_count());
    std::vector<float> blob(total);
    in.read(reinterpret_cast<char*>(blob.data()),
            static_cast<std::streamsize>(total * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != total * sizeof(float))
        throw DataError(path.string() + ": truncated tensor data");
    const std::uint64_t weights_hash = corpus::bytes_fnv1a(blob.data(), total * sizeof(float));
    if (corpus::hash_hex(weights_hash) != need("weights_fnv"))
        throw DataError(path.string() + ": weight checksum mismatch (corrupt model file)");
    std::size_t pos = 0;
    for (auto& v : views)
        for (std::int64_t k = 0; k < v.size; ++k)
            v.data[k] = static_cast<double>(blob[pos++]);
    return model;
}

}  // namespace sldisco::net
