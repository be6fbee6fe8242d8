#include "sldisco/pdag.hpp"

#include <fstream>
#include <sstream>

#include "sldisco/errors.hpp"

namespace sldisco {

PdagMatrix PdagMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
    const int p = static_cast<int>(rows.size());
    PdagMatrix g(p);
    for (int i = 0; i < p; ++i) {
        if (static_cast<int>(rows[i].size()) != p)
            throw DataError("from_rows: row " + std::to_string(i + 1) + " is not length p");
        for (int j = 0; j < p; ++j) {
            if (rows[i][j] != 0 && rows[i][j] != 1)
                throw DataError("from_rows: entries must be 0 or 1");
            g.set_entry(i, j, rows[i][j]);
        }
    }
    for (int i = 0; i < p; ++i)
        if (g.entry(i, i) != 0) throw DataError("from_rows: nonzero diagonal");
    return g;
}

std::vector<int> PdagMatrix::parents(int i) const {
    std::vector<int> out;
    for (int j = 0; j < p_; ++j)
        if (j != i && has_directed(j, i)) out.push_back(j);
    return out;
}

std::vector<int> PdagMatrix::children(int i) const {
    std::vector<int> out;
    for (int j = 0; j < p_; ++j)
        if (j != i && has_directed(i, j)) out.push_back(j);
    return out;
}

std::vector<int> PdagMatrix::neighbors(int i) const {
    std::vector<int> out;
    for (int j = 0; j < p_; ++j)
        if (j != i && adjacent(i, j)) out.push_back(j);
    return out;
}

std::vector<int> PdagMatrix::undirected_neighbors(int i) const {
    std::vector<int> out;
    for (int j = 0; j < p_; ++j)
        if (j != i && has_undirected(i, j)) out.push_back(j);
    return out;
}

int PdagMatrix::edge_count() const {
    int c = 0;
    for (int i = 0; i < p_; ++i)
        for (int j = i + 1; j < p_; ++j)
            if (adjacent(i, j)) ++c;
    return c;
}

bool PdagMatrix::directed_part_acyclic() const {
    // Kahn's algorithm over directed edges only.
    std::vector<int> indeg(p_, 0);
    for (int i = 0; i < p_; ++i)
        for (int j = 0; j < p_; ++j)
            if (i != j && has_directed(i, j)) ++indeg[j];
    std::vector<int> stack;
    for (int i = 0; i < p_; ++i)
        if (indeg[i] == 0) stack.push_back(i);
    int seen = 0;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        ++seen;
        for (int j = 0; j < p_; ++j)
            if (j != v && has_directed(v, j) && --indeg[j] == 0) stack.push_back(j);
    }
    return seen == p_;
}

bool PdagMatrix::is_dag() const {
    for (int i = 0; i < p_; ++i)
        for (int j = i + 1; j < p_; ++j)
            if (has_undirected(i, j)) return false;
    return directed_part_acyclic();
}

std::vector<int> PdagMatrix::topological_order() const {
    std::vector<int> indeg(p_, 0);
    for (int i = 0; i < p_; ++i)
        for (int j = 0; j < p_; ++j)
            if (i != j && has_directed(i, j)) ++indeg[j];
    std::vector<int> order;
    order.reserve(p_);
    std::vector<bool> placed(p_, false);
    for (int step = 0; step < p_; ++step) {
        int pick = -1;
        for (int i = 0; i < p_; ++i) {
            if (!placed[i] && indeg[i] == 0) {
                pick = i;
                break;
            }
        }
        if (pick < 0) throw NumericError("topological_order: directed cycle");
        placed[pick] = true;
        order.push_back(pick);
        for (int j = 0; j < p_; ++j)
            if (j != pick && has_directed(pick, j)) --indeg[j];
    }
    return order;
}

PdagMatrix PdagMatrix::read_adj_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<std::vector<int>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<int> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            if (cell != "0" && cell != "1")
                throw DataError(path.string() + ": entry '" + cell + "' is not 0/1");
            row.push_back(cell == "1" ? 1 : 0);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError(path.string() + ": empty adjacency file");
    try {
        return from_rows(rows);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void PdagMatrix::write_adj_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    for (int i = 0; i < p_; ++i) {
        for (int j = 0; j < p_; ++j) {
            if (j) out << ',';
            out << entry(i, j);
        }
        out << '\n';
    }
    if (!out) throw DataError("write failed: " + path.string());
}

std::string PdagMatrix::to_string() const {
    std::string s;
    for (int i = 0; i < p_; ++i) {
        for (int j = 0; j < p_; ++j) {
            s += entry(i, j) ? '1' : '0';
            s += (j + 1 < p_) ? ' ' : '\n';
        }
    }
    return s;
}

}  // namespace sldisco
