#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sldisco/metrics.hpp"
#include "sldisco/net.hpp"

namespace sldisco::bench {

// One grid sweep. Defaults cover the full threshold and significance grids
// at desk scale (single p/n cell, 20k training pairs); paper-scale lists and
// sizes can be set through the config file or CLI flags.
struct BenchmarkConfig {
    std::vector<int> p_list = {5};
    std::vector<int> n_list = {1000};
    std::vector<double> tau_list = {0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
    std::vector<double> alpha_list = {1e-8, 1e-4, 1e-3, 0.01, 0.05, 0.1, 0.2, 0.5, 0.8};
    std::vector<std::string> postprocess_list = {"cutoff", "bpco"};
    int b_train = 20000;
    int b_test = 500;
    std::uint64_t seed = 1;
    int epochs = 150;
    int batch_size = 256;
    double learning_rate = 1e-3;
    int dense_units = 0;  // 0 resolves to 4 p^2
    int workers = 1;
    bool keep_artifacts = false;  // retain per-cell corpora and models

    void validate() const;
};

// Flat key=value file; list values are comma separated. Unknown keys are an
// error so typos do not silently fall back to defaults.
BenchmarkConfig load_config(const std::filesystem::path& path);
void apply_override(BenchmarkConfig& config, const std::string& key, const std::string& value);

// The CSV column list, also shown by the CLI help text.
std::string results_header();

// For each (p, n) cell: generate train/test corpora, train the network, then
// evaluate thresholded network estimates (every postprocess x tau) and the
// constraint-based baseline (every alpha) against the test labels. One CSV
// row per (method, p, n, setting). `work_dir` holds per-cell artifacts;
// `progress` receives one line per completed cell (pass nullptr to silence).
void run_benchmark(const BenchmarkConfig& config, const std::filesystem::path& results_csv,
                   const std::filesystem::path& work_dir, std::ostream* progress);

}  // namespace sldisco::bench
