#pragma once

#include <Eigen/Dense>
#include <filesystem>

namespace sldisco {

// Headerless CSV of decimal reals, full matrix, one row per line. Values are
// written with enough digits to round-trip doubles exactly.
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

// Validation used by commands that consume .cor.csv files.
void require_correlation_matrix(const Eigen::MatrixXd& c, const std::string& source);

}  // namespace sldisco
