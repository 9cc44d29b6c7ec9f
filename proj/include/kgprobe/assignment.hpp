#pragma once

// Exact linear sum assignment (Hungarian method with row potentials and
// shortest augmenting paths, O(n^3)).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "kgprobe/error.hpp"

namespace kgprobe {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Dense square matrix, row-major.
class CostMatrix {
public:
    CostMatrix() = default;
    explicit CostMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}
    CostMatrix(std::initializer_list<std::initializer_list<double>> rows) : n_(rows.size()) {
        data_.reserve(n_ * n_);
        for (const auto& r : rows) {
            if (r.size() != n_) throw Error("CostMatrix: rows must form a square matrix");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    std::size_t size() const noexcept { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

struct Assignment {
    std::vector<std::size_t> row_to_col;
    double cost = 0.0;
};

// +infinity entries are forbidden pairings. Throws when every perfect
// assignment uses one.
inline Assignment solve_assignment(const CostMatrix& m) {
    const std::size_t n = m.size();
    if (n == 0) return {};

    double largest = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double c = m(i, j);
            if (std::isnan(c) || c == -kInfinity) throw Error("solve_assignment: entries must be finite or +inf");
            if (std::isfinite(c)) largest = std::max(largest, std::abs(c));
        }
    }
    // Any assignment touching the sentinel costs more than any finite one.
    const double sentinel = (2.0 * static_cast<double>(n) + 1.0) * largest + 1.0;
    auto cost = [&](std::size_t i, std::size_t j) {
        double c = m(i, j);
        return std::isfinite(c) ? c : sentinel;
    };

    // 1-based arrays; row 0 / column 0 are the virtual start.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> col_owner(n + 1, 0), way(n + 1, 0);
    for (std::size_t row = 1; row <= n; ++row) {
        col_owner[0] = row;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, kInfinity);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = col_owner[j0];
            double delta = kInfinity;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[col_owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (col_owner[j0] != 0);
        do {
            std::size_t j1 = way[j0];
            col_owner[j0] = col_owner[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    Assignment out;
    out.row_to_col.assign(n, 0);
    for (std::size_t j = 1; j <= n; ++j) out.row_to_col[col_owner[j] - 1] = j - 1;
    for (std::size_t i = 0; i < n; ++i) {
        double c = m(i, out.row_to_col[i]);
        if (!std::isfinite(c)) throw Error("solve_assignment: no finite-cost assignment exists");
        out.cost += c;
    }
    return out;
}

}  // namespace kgprobe
