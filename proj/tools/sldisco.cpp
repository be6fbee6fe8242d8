// Command-line front end: corpus simulation, network training, one-shot
// discovery, the constraint-based baseline, evaluation and the benchmark
// sweep. Exit codes: 0 success, 1 usage error, 2 data/validation error,
// 3 internal numeric failure.

#include <CLI11.hpp>
#include <iostream>

#include "sldisco/bench.hpp"
#include "sldisco/corpus.hpp"
#include "sldisco/csv_io.hpp"
#include "sldisco/errors.hpp"
#include "sldisco/graph.hpp"
#include "sldisco/metrics.hpp"
#include "sldisco/net.hpp"
#include "sldisco/pc.hpp"
#include "sldisco/postprocess.hpp"

namespace {

using namespace sldisco;

struct SimulateArgs {
    int p = 5;
    int n = 1000;
    int count = 1;
    std::uint64_t seed = 1;
    int shard_size = 8192;
    int workers = 1;
    std::string out;
};

int cmd_simulate(const SimulateArgs& args) {
    corpus::GenerateOptions opts;
    opts.p = args.p;
    opts.n = args.n;
    opts.count = args.count;
    opts.seed = args.seed;
    opts.shard_size = args.shard_size;
    opts.workers = args.workers;
    const auto manifest = corpus::generate_corpus(opts, args.out);
    std::cout << "wrote " << args.count << " pairs, manifest " << manifest.string()
              << " (hash " << corpus::hash_hex(corpus::manifest_hash(manifest)) << ")\n";
    return 0;
}

struct TrainArgs {
    std::string corpus_path;
    std::string model_out;
    std::string log_out;
    std::uint64_t seed = 1;
    int epochs = 150;
    int batch_size = 256;
    double learning_rate = 1e-3;
    int dense_units = 0;
    int filters = 32;
    int pool = 2;
    double dropout = 0.2;
};

int cmd_train(const TrainArgs& args) {
    const auto corpus = corpus::load_corpus(args.corpus_path);
    net::Hyperparameters hyper;
    hyper.p = corpus.p;
    hyper.epochs = args.epochs;
    hyper.batch_size = args.batch_size;
    hyper.learning_rate = args.learning_rate;
    hyper.dense_units = args.dense_units;
    hyper.filters = args.filters;
    hyper.pool = args.pool;
    hyper.dropout_rate = args.dropout;
    const auto result = net::train(corpus, hyper, args.seed);
    net::save_model(args.model_out, result.params, args.seed,
                    corpus::manifest_hash(args.corpus_path), corpus.n);
    if (!args.log_out.empty()) net::write_training_log(args.log_out, result.log);
    std::cout << "trained " << result.params.parameter_count() << " parameters, final loss "
              << result.log.back().mean_loss << ", model " << args.model_out << "\n";
    return 0;
}

struct DiscoverArgs {
    std::string model_path;
    std::string input;
    std::string out;
    std::string probs_out;
    int n = 0;
    double tau = 0.1;
    std::string method = "cutoff";
};

int cmd_discover(const DiscoverArgs& args) {
    const auto model = net::load_model(args.model_path);
    const Eigen::MatrixXd c = read_matrix_csv(args.input);
    require_correlation_matrix(c, args.input);
    if (c.rows() != model.params.hyper.p)
        throw DataError("discover: input p=" + std::to_string(c.rows()) +
                        " does not match model p=" + std::to_string(model.params.hyper.p));
    if (args.n > 0 && args.n != model.train_n)
        std::cerr << "note: model was trained on n=" << model.train_n
                  << " samples per dataset, input has n=" << args.n << "\n";
    if (args.method != "cutoff" && args.method != "bpco")
        throw DataError("discover: method must be cutoff or bpco");
    const Eigen::MatrixXd probs = net::forward(model.params, c);
    const PdagMatrix est = args.method == "cutoff" ? postprocess::cutoff(probs, args.tau)
                                                   : postprocess::bpco(probs, args.tau);
    est.write_adj_csv(args.out);
    if (!args.probs_out.empty()) write_matrix_csv(args.probs_out, probs);
    std::cout << "estimate written to " << args.out << " ("
              << metrics::edge_count(est) << " edges, proper="
              << (graph::is_proper_cpdag(est) ? "yes" : "no") << ")\n";
    return 0;
}

struct PcArgs {
    std::string input;
    std::string out;
    std::string sepsets_out;
    int n = 0;
    double alpha = 0.05;
};

int cmd_pc(const PcArgs& args) {
    const Eigen::MatrixXd c = read_matrix_csv(args.input);
    require_correlation_matrix(c, args.input);
    const pc::FisherZTest test(c, args.n, args.alpha);
    const auto result = pc::pc(test);
    result.graph.write_adj_csv(args.out);
    if (!args.sepsets_out.empty()) pc::write_sepsets(args.sepsets_out, result.sepsets);
    std::cout << "estimate written to " << args.out << " ("
              << metrics::edge_count(result.graph) << " edges, proper="
              << (graph::is_proper_cpdag(result.graph) ? "yes" : "no");
    if (result.orientation_conflicts)
        std::cout << ", " << result.orientation_conflicts << " orientation conflicts";
    std::cout << ")\n";
    return 0;
}

struct EvaluateArgs {
    std::string est;
    std::string truth;
    std::string model_path;
    std::string corpus_path;
    std::string out;
    double tau = 0.1;
    double alpha = 0.05;
    std::string method = "cutoff";
    bool use_pc = false;
    bool exclude_degenerate = false;
};

Eigen::MatrixXd corpus_feature(const corpus::Corpus& corpus, int k) {
    const int p = corpus.p;
    Eigen::MatrixXd c(p, p);
    const auto& feat = corpus.items[static_cast<std::size_t>(k)].feature;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            c(i, j) = static_cast<double>(feat[static_cast<std::size_t>(i) * p + j]);
    return c;
}

int cmd_evaluate(const EvaluateArgs& args) {
    if (!args.est.empty()) {
        const auto est = PdagMatrix::read_adj_csv(args.est);
        const auto truth = PdagMatrix::read_adj_csv(args.truth);
        const auto report = metrics::evaluate(est, truth);
        const auto agg = metrics::aggregate({report}, !args.exclude_degenerate);
        if (!args.out.empty()) metrics::write_report_csv(args.out, {report}, agg);
        std::cout << metrics::summary_table({{"estimate", agg}});
        return 0;
    }

    const auto corpus = corpus::load_corpus(args.corpus_path);
    std::vector<metrics::MetricsReport> reports;
    reports.reserve(corpus.items.size());
    std::string label;
    if (args.use_pc) {
        label = "pc(alpha=" + std::to_string(args.alpha) + ")";
        for (int k = 0; k < static_cast<int>(corpus.items.size()); ++k) {
            const pc::FisherZTest test(corpus_feature(corpus, k), corpus.n, args.alpha);
            reports.push_back(metrics::evaluate(pc::pc(test).graph, corpus.label_graph(k)));
        }
    } else {
        const auto model = net::load_model(args.model_path);
        if (model.params.hyper.p != corpus.p)
            throw DataError("evaluate: model p does not match corpus p");
        if (model.corpus_hash == corpus::manifest_hash(args.corpus_path))
            std::cerr << "warning: evaluation corpus is the model's training corpus\n";
        if (args.method != "cutoff" && args.method != "bpco")
            throw DataError("evaluate: method must be cutoff or bpco");
        label = "sldisco(" + args.method + ", tau=" + std::to_string(args.tau) + ")";
        for (int k = 0; k < static_cast<int>(corpus.items.size()); ++k) {
            const Eigen::MatrixXd probs =
                net::forward(model.params, corpus_feature(corpus, k));
            const PdagMatrix est = args.method == "cutoff"
                                       ? postprocess::cutoff(probs, args.tau)
                                       : postprocess::bpco(probs, args.tau);
            reports.push_back(metrics::evaluate(est, corpus.label_graph(k)));
        }
    }
    const auto agg = metrics::aggregate(reports, !args.exclude_degenerate);
    if (!args.out.empty()) metrics::write_report_csv(args.out, reports, agg);
    std::cout << metrics::summary_table({{label, agg}});
    return 0;
}

struct BenchmarkArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out = "results.csv";
    std::string work_dir = "benchmark_work";
    int workers = 0;  // 0: keep config value
};

int cmd_benchmark(const BenchmarkArgs& args) {
    bench::BenchmarkConfig config;
    if (!args.config_path.empty()) config = bench::load_config(args.config_path);
    for (const auto& item : args.overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw DataError("--set expects key=value, got '" + item + "'");
        bench::apply_override(config, item.substr(0, eq), item.substr(eq + 1));
    }
    if (args.workers > 0) config.workers = args.workers;
    bench::run_benchmark(config, args.out, args.work_dir, &std::cout);
    std::cout << "results written to " << args.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal structure learning from correlation matrices: corpus simulation,\n"
                 "convolutional network training, threshold/BPCO discovery, a PC baseline\n"
                 "and a benchmark sweep."};
    app.require_subcommand(1);

    SimulateArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "Generate a training/test corpus");
    sim->add_option("--p", sim_args.p, "Node count")->capture_default_str();
    sim->add_option("--n", sim_args.n, "Samples per simulated dataset")->capture_default_str();
    sim->add_option("--count", sim_args.count, "Number of (feature,label) pairs")
        ->capture_default_str();
    sim->add_option("--seed", sim_args.seed, "Master seed")->capture_default_str();
    sim->add_option("--shard-size", sim_args.shard_size, "Pairs per shard file")
        ->capture_default_str();
    sim->add_option("--workers", sim_args.workers, "Generator threads (output is identical)")
        ->capture_default_str();
    sim->add_option("--out", sim_args.out, "Output directory")->required();

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "Train the network on a corpus");
    train->add_option("--corpus", train_args.corpus_path, "Corpus directory or manifest")
        ->required();
    train->add_option("--out", train_args.model_out, "Model file (.sld)")->required();
    train->add_option("--log", train_args.log_out, "Training log CSV");
    train->add_option("--seed", train_args.seed, "Training seed")->capture_default_str();
    train->add_option("--epochs", train_args.epochs)->capture_default_str();
    train->add_option("--batch-size", train_args.batch_size)->capture_default_str();
    train->add_option("--learning-rate", train_args.learning_rate)->capture_default_str();
    train->add_option("--dense-units", train_args.dense_units, "0 = 4*p^2")
        ->capture_default_str();
    train->add_option("--filters", train_args.filters)->capture_default_str();
    train->add_option("--pool", train_args.pool)->capture_default_str();
    train->add_option("--dropout", train_args.dropout)->capture_default_str();

    DiscoverArgs disc_args;
    auto* disc = app.add_subcommand("discover", "One-shot discovery on a correlation matrix");
    disc->add_option("--model", disc_args.model_path, "Model file (.sld)")->required();
    disc->add_option("--input", disc_args.input, "Correlation matrix (.cor.csv)")->required();
    disc->add_option("--n", disc_args.n, "Sample size behind the input matrix");
    disc->add_option("--tau", disc_args.tau, "Threshold in (0,1)")->capture_default_str();
    disc->add_option("--method", disc_args.method, "cutoff or bpco")->capture_default_str();
    disc->add_option("--out", disc_args.out, "Output adjacency (.adj.csv)")->required();
    disc->add_option("--probs", disc_args.probs_out, "Raw probability matrix CSV");

    PcArgs pc_args;
    auto* pcc = app.add_subcommand("pc", "Constraint-based baseline on a correlation matrix");
    pcc->add_option("--input", pc_args.input, "Correlation matrix (.cor.csv)")->required();
    pcc->add_option("--n", pc_args.n, "Sample size behind the matrix")->required();
    pcc->add_option("--alpha", pc_args.alpha, "Test significance level")->capture_default_str();
    pcc->add_option("--out", pc_args.out, "Output adjacency (.adj.csv)")->required();
    pcc->add_option("--sepsets", pc_args.sepsets_out, "Separating-set dump (text)");

    EvaluateArgs eval_args;
    auto* eval = app.add_subcommand("evaluate", "Score estimates against ground truth");
    eval->add_option("--est", eval_args.est, "Estimated adjacency (.adj.csv)");
    eval->add_option("--truth", eval_args.truth, "True adjacency (.adj.csv)");
    eval->add_option("--model", eval_args.model_path, "Model file for corpus evaluation");
    eval->add_option("--corpus", eval_args.corpus_path, "Corpus with ground-truth labels");
    eval->add_option("--tau", eval_args.tau)->capture_default_str();
    eval->add_option("--method", eval_args.method, "cutoff or bpco")->capture_default_str();
    eval->add_flag("--pc", eval_args.use_pc, "Evaluate the PC baseline instead of a model");
    eval->add_option("--alpha", eval_args.alpha)->capture_default_str();
    eval->add_option("--out", eval_args.out, "Per-instance report CSV");
    eval->add_flag("--exclude-degenerate", eval_args.exclude_degenerate,
                   "Drop degenerate-ratio instances from means");

    BenchmarkArgs bench_args;
    auto* bench = app.add_subcommand(
        "benchmark", "Grid sweep over (p, n, tau, alpha); one CSV row per setting.\nColumns: " +
                         sldisco::bench::results_header());
    bench->add_option("--config", bench_args.config_path, "Flat key=value config file");
    bench->add_option("--set", bench_args.overrides, "Override config entries (key=value)");
    bench->add_option("--out", bench_args.out, "Results CSV")->capture_default_str();
    bench->add_option("--work-dir", bench_args.work_dir, "Scratch directory")
        ->capture_default_str();
    bench->add_option("--workers", bench_args.workers, "Parallel cells (0 = config value)");

    try {
        app.parse(argc, argv);
        if (*sim) return cmd_simulate(sim_args);
        if (*train) return cmd_train(train_args);
        if (*disc) return cmd_discover(disc_args);
        if (*pcc) return cmd_pc(pc_args);
        if (*eval) {
            if (eval_args.est.empty() == eval_args.corpus_path.empty())
                throw DataError("evaluate: pass either --est/--truth or --corpus");
            if (!eval_args.est.empty() && eval_args.truth.empty())
                throw DataError("evaluate: --est requires --truth");
            return cmd_evaluate(eval_args);
        }
        if (*bench) return cmd_benchmark(bench_args);
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
