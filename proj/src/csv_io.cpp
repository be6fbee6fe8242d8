#include "sldisco/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "sldisco/errors.hpp"

namespace sldisco {

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    char buf[40];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
            if (j) out << ',';
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw DataError("write failed: " + path.string());
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t pos = 0;
                const double v = std::stod(cell, &pos);
                if (pos != cell.size()) throw std::invalid_argument(cell);
                row.push_back(v);
            } catch (const std::exception&) {
                throw DataError(path.string() + ": bad numeric cell '" + cell + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError(path.string() + ": empty matrix file");
    const std::size_t cols = rows[0].size();
    for (const auto& r : rows)
        if (r.size() != cols) throw DataError(path.string() + ": ragged rows");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

void require_correlation_matrix(const Eigen::MatrixXd& c, const std::string& source) {
    if (c.rows() != c.cols()) throw DataError(source + ": matrix is not square");
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        if (std::abs(c(i, i) - 1.0) > 1e-8)
            throw DataError(source + ": diagonal entry " + std::to_string(i + 1) + " is not 1");
        for (Eigen::Index j = 0; j < c.cols(); ++j) {
            if (!std::isfinite(c(i, j)))
                throw DataError(source + ": non-finite entry");
            if (std::abs(c(i, j) - c(j, i)) > 1e-8)
                throw DataError(source + ": matrix is not symmetric");
            if (c(i, j) > 1.0 + 1e-8 || c(i, j) < -1.0 - 1e-8)
                throw DataError(source + ": entry outside [-1, 1]");
        }
    }
}

}  // namespace sldisco
