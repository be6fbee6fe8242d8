#include "sldisco/bench.hpp"

#include <cstdio>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "sldisco/errors.hpp"
#include "sldisco/graph.hpp"
#include "sldisco/pc.hpp"
#include "sldisco/postprocess.hpp"
#include "sldisco/rng.hpp"

namespace sldisco::bench {

void BenchmarkConfig::validate() const {
    if (p_list.empty() || n_list.empty()) throw DataError("benchmark: empty p or n list");
    for (int p : p_list)
        if (p < 3) throw DataError("benchmark: p must be at least 3");
    for (int n : n_list)
        if (n < 2) throw DataError("benchmark: n must be at least 2");
    for (double t : tau_list)
        if (!(t > 0.0 && t < 1.0)) throw DataError("benchmark: tau must lie in (0, 1)");
    for (double a : alpha_list)
        if (!(a > 0.0 && a < 1.0)) throw DataError("benchmark: alpha must lie in (0, 1)");
    for (const auto& m : postprocess_list)
        if (m != "cutoff" && m != "bpco")
            throw DataError("benchmark: unknown postprocess '" + m + "'");
    if (b_train < 1 || b_test < 1) throw DataError("benchmark: corpus sizes must be positive");
    if (workers < 1) throw DataError("benchmark: workers must be positive");
}

namespace {

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

std::vector<int> parse_ints(const std::string& value, const std::string& key) {
    std::vector<int> out;
    for (const auto& item : split_list(value)) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw DataError("config: bad integer '" + item + "' for key " + key);
        }
    }
    return out;
}

std::vector<double> parse_doubles(const std::string& value, const std::string& key) {
    std::vector<double> out;
    for (const auto& item : split_list(value)) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw DataError("config: bad number '" + item + "' for key " + key);
        }
    }
    return out;
}

}  // namespace

void apply_override(BenchmarkConfig& config, const std::string& key, const std::string& value) {
    if (key == "p") config.p_list = parse_ints(value, key);
    else if (key == "n") config.n_list = parse_ints(value, key);
    else if (key == "tau") config.tau_list = parse_doubles(value, key);
    else if (key == "alpha") config.alpha_list = parse_doubles(value, key);
    else if (key == "postprocess") config.postprocess_list = split_list(value);
    else if (key == "b_train") config.b_train = std::stoi(value);
    else if (key == "b_test") config.b_test = std::stoi(value);
    else if (key == "seed") config.seed = std::stoull(value);
    else if (key == "epochs") config.epochs = std::stoi(value);
    else if (key == "batch_size") config.batch_size = std::stoi(value);
    else if (key == "learning_rate") config.learning_rate = std::stod(value);
    else if (key == "dense_units") config.dense_units = std::stoi(value);
    else if (key == "workers") config.workers = std::stoi(value);
    else if (key == "keep_artifacts") config.keep_artifacts = (value == "1" || value == "true");
    else throw DataError("config: unknown key '" + key + "'");
}

BenchmarkConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    BenchmarkConfig config;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DataError(path.string() + ": bad config line '" + line + "'");
        apply_override(config, line.substr(0, eq), line.substr(eq + 1));
    }
    return config;
}

std::string results_header() {
    return "method,p,n,postprocess,tau,alpha,"
           "adj_f1,adj_npv,adj_precision,adj_recall,"
           "ori_precision,ori_g1,ori_npv,ori_specificity,"
           "mean_est_edges,mean_true_edges,proper_fraction";
}

namespace {

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string fmtg(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string result_row(const std::string& method, int p, int n, const std::string& post,
                       const std::string& tau, const std::string& alpha,
                       const metrics::AggregateReport& agg, double proper_fraction) {
    std::string row = method + "," + std::to_string(p) + "," + std::to_string(n) + "," +
                      post + "," + tau + "," + alpha;
    const auto& m = agg.mean;
    for (const auto* v : {&m.adj_f1, &m.adj_npv, &m.adj_precision, &m.adj_recall,
                          &m.ori_precision, &m.ori_g1, &m.ori_npv, &m.ori_specificity})
        row += "," + fmt6(v->value);
    row += "," + fmt6(agg.mean_est_edges) + "," + fmt6(agg.mean_true_edges) + "," +
           fmt6(proper_fraction);
    return row;
}

Eigen::MatrixXd feature_matrix(const corpus::Corpus& corpus, int k) {
    const int p = corpus.p;
    Eigen::MatrixXd c(p, p);
    const auto& feat = corpus.items[static_cast<std::size_t>(k)].feature;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            c(i, j) = static_cast<double>(feat[static_cast<std::size_t>(i) * p + j]);
    return c;
}

struct Cell {
    int p;
    int n;
    std::size_t index;
};

std::vector<std::string> run_cell(const BenchmarkConfig& config, const Cell& cell,
                                  const std::filesystem::path& work_dir) {
    const std::uint64_t cell_seed = derive_seed(config.seed, cell.index);
    const auto cell_dir = work_dir / ("cell_p" + std::to_string(cell.p) + "_n" +
                                      std::to_string(cell.n));

    corpus::GenerateOptions train_opts;
    train_opts.p = cell.p;
    train_opts.n = cell.n;
    train_opts.count = config.b_train;
    train_opts.seed = derive_seed(cell_seed, 0);
    const auto train_manifest = corpus::generate_corpus(train_opts, cell_dir / "train");

    corpus::GenerateOptions test_opts = train_opts;
    test_opts.count = config.b_test;
    test_opts.seed = derive_seed(cell_seed, 1);
    corpus::generate_corpus(test_opts, cell_dir / "test");

    const auto train_corpus = corpus::load_corpus(cell_dir / "train");
    const auto test_corpus = corpus::load_corpus(cell_dir / "test");

    net::Hyperparameters hyper;
    hyper.p = cell.p;
    hyper.epochs = config.epochs;
    hyper.batch_size = config.batch_size;
    hyper.learning_rate = config.learning_rate;
    hyper.dense_units = config.dense_units;
    const auto trained = net::train(train_corpus, hyper, derive_seed(cell_seed, 2));
    net::save_model(cell_dir / "model.sld", trained.params, derive_seed(cell_seed, 2),
                    corpus::manifest_hash(train_manifest), cell.n);
    net::write_training_log(cell_dir / "train_log.csv", trained.log);

    const int n_test = static_cast<int>(test_corpus.items.size());
    std::vector<Eigen::MatrixXd> probs;
    probs.reserve(static_cast<std::size_t>(n_test));
    std::vector<PdagMatrix> truths;
    truths.reserve(static_cast<std::size_t>(n_test));
    for (int k = 0; k < n_test; ++k) {
        probs.push_back(net::forward(trained.params, feature_matrix(test_corpus, k)));
        truths.push_back(test_corpus.label_graph(k));
    }

    std::vector<std::string> rows;
    for (const auto& post : config.postprocess_list) {
        for (double tau : config.tau_list) {
            std::vector<metrics::MetricsReport> reports;
            reports.reserve(static_cast<std::size_t>(n_test));
            int proper = 0;
            for (int k = 0; k < n_test; ++k) {
                const PdagMatrix est = post == "cutoff"
                                           ? postprocess::cutoff(probs[static_cast<std::size_t>(k)], tau)
                                           : postprocess::bpco(probs[static_cast<std::size_t>(k)], tau);
                if (graph::is_proper_cpdag(est)) ++proper;
                reports.push_back(
                    metrics::evaluate(est, truths[static_cast<std::size_t>(k)]));
            }
            rows.push_back(result_row("sldisco", cell.p, cell.n, post, fmtg(tau), "",
                                      metrics::aggregate(reports),
                                      static_cast<double>(proper) / n_test));
        }
    }
    for (double alpha : config.alpha_list) {
        std::vector<metrics::MetricsReport> reports;
        reports.reserve(static_cast<std::size_t>(n_test));
        int proper = 0;
        for (int k = 0; k < n_test; ++k) {
            const pc::FisherZTest test(feature_matrix(test_corpus, k), test_corpus.n, alpha);
            const auto result = pc::pc(test);
            if (graph::is_proper_cpdag(result.graph)) ++proper;
            reports.push_back(metrics::evaluate(result.graph, truths[static_cast<std::size_t>(k)]));
        }
        rows.push_back(result_row("pc", cell.p, cell.n, "", "", fmtg(alpha),
                                  metrics::aggregate(reports),
                                  static_cast<double>(proper) / n_test));
    }

    if (!config.keep_artifacts) {
        std::error_code ec;
        std::filesystem::remove_all(cell_dir, ec);
    }
    return rows;
}

}  // namespace

void run_benchmark(const BenchmarkConfig& config, const std::filesystem::path& results_csv,
                   const std::filesystem::path& work_dir, std::ostream* progress) {
    config.validate();
    std::filesystem::create_directories(work_dir);
    std::ofstream out(results_csv);
    if (!out) throw DataError("cannot write " + results_csv.string());
    out << results_header() << '\n';
    out.flush();

    std::vector<Cell> cells;
    for (int p : config.p_list)
        for (int n : config.n_list) cells.push_back({p, n, cells.size()});

    if (config.workers == 1) {
        for (const auto& cell : cells) {
            const auto rows = run_cell(config, cell, work_dir);
            for (const auto& row : rows) {
                out << row << '\n';
                out.flush();
            }
            if (progress)
                *progress << "cell p=" << cell.p << " n=" << cell.n << " done ("
                          << rows.size() << " rows)\n";
        }
    } else {
        std::vector<std::vector<std::string>> buffered(cells.size());
        std::mutex mu;
        std::size_t next = 0;
        auto worker = [&] {
            for (;;) {
                std::size_t mine;
                {
                    std::lock_guard<std::mutex> lock(mu);
                    if (next >= cells.size()) return;
                    mine = next++;
                }
                buffered[mine] = run_cell(config, cells[mine], work_dir);
            }
        };
        std::vector<std::thread> pool;
        const auto n_workers =
            std::min<std::size_t>(static_cast<std::size_t>(config.workers), cells.size());
        for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        for (std::size_t k = 0; k < cells.size(); ++k) {
            for (const auto& row : buffered[k]) out << row << '\n';
            if (progress)
                *progress << "cell p=" << cells[k].p << " n=" << cells[k].n << " done ("
                          << buffered[k].size() << " rows)\n";
        }
    }
    if (!out) throw DataError("write failed: " + results_csv.string());
}

}  // namespace sldisco::bench
