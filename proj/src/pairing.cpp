#include "twic/pairing.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>

namespace twic {

namespace {

// Hungarian algorithm on an n x n int64 cost matrix, minimizing. O(n^3).
std::vector<int> hungarian_min(const std::vector<std::vector<long long>>& cost) {
    const int n = static_cast<int>(cost.size());
    const long long kInf = std::numeric_limits<long long>::max() / 4;
    std::vector<long long> u(n + 1, 0), v(n + 1, 0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<long long> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            long long delta = kInf;
            int j1 = -1;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const long long cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> assignment(n, -1);
    for (int j = 1; j <= n; ++j) assignment[p[j] - 1] = j - 1;
    return assignment;
}

long long best_total(const std::vector<std::vector<long long>>& weight) {
    const auto assignment = hungarian_min([&] {
        // negate to turn maximization into minimization
        std::vector<std::vector<long long>> cost(weight.size(),
                                                 std::vector<long long>(weight.size()));
        for (size_t i = 0; i < weight.size(); ++i)
            for (size_t j = 0; j < weight.size(); ++j) cost[i][j] = -weight[i][j];
        return cost;
    }());
    long long total = 0;
    for (size_t i = 0; i < assignment.size(); ++i) total += weight[i][assignment[i]];
    return total;
}

}  // namespace

std::vector<int> max_weight_assignment(const std::vector<std::vector<Rational>>& weight) {
    const int n = static_cast<int>(weight.size());
    if (n == 0) throw std::invalid_argument("empty assignment problem");
    for (const auto& row : weight)
        if (static_cast<int>(row.size()) != n)
            throw std::invalid_argument("assignment matrix must be square");

    long long scale = 1;
    for (const auto& row : weight)
        for (const auto& w : row) scale = std::lcm(scale, w.den);
    std::vector<std::vector<long long>> scaled(n, std::vector<long long>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scaled[i][j] = weight[i][j].num * (scale / weight[i][j].den);

    const long long optimum = best_total(scaled);

    // Lexicographic refinement: fix rows in order to the smallest column that
    // still admits an optimal completion.
    std::vector<int> result(n, -1);
    std::vector<char> taken(n, 0);
    long long fixed_sum = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (taken[j]) continue;
            // Solve the subproblem on remaining rows/cols.
            std::vector<int> rows, cols;
            for (int r = i + 1; r < n; ++r) rows.push_back(r);
            for (int c = 0; c < n; ++c)
                if (!taken[c] && c != j) cols.push_back(c);
            long long rest = 0;
            if (!rows.empty()) {
                std::vector<std::vector<long long>> sub(rows.size(),
                                                        std::vector<long long>(cols.size()));
                for (size_t r = 0; r < rows.size(); ++r)
                    for (size_t c = 0; c < cols.size(); ++c) sub[r][c] = scaled[rows[r]][cols[c]];
                rest = best_total(sub);
            }
            if (fixed_sum + scaled[i][j] + rest == optimum) {
                result[i] = j;
                taken[j] = 1;
                fixed_sum += scaled[i][j];
                break;
            }
        }
    }
    return result;
}

PairingResult pair_subchannels(const std::vector<std::pair<int, int>>& forwards,
                               const std::vector<std::pair<int, int>>& backwards,
                               const Rational& lambda) {
    if (forwards.empty() || forwards.size() != backwards.size())
        throw std::invalid_argument("subchannel lists must be nonempty and of equal length");
    const int n = static_cast<int>(forwards.size());
    std::vector<std::vector<Rational>> weight(n, std::vector<Rational>(n));
    for (int i = 0; i < n; ++i) {
        const Rational base = c_no(forwards[i].first, forwards[i].second);
        for (int j = 0; j < n; ++j) {
            ChannelConfig cfg{forwards[i].first, forwards[i].second, backwards[j].first,
                              backwards[j].second, lambda};
            const Rational fb = inner_sum(cfg) - base;
            const Rational indep = lambda * c_no(backwards[j].first, backwards[j].second);
            weight[i][j] = rat_max(Rational(0), fb - indep);
        }
    }
    const auto assignment = max_weight_assignment(weight);
    PairingResult result;
    result.total_net_gain = Rational(0);
    for (int i = 0; i < n; ++i) {
        result.pairs.push_back({i, assignment[i], weight[i][assignment[i]]});
        result.total_net_gain = result.total_net_gain + weight[i][assignment[i]];
    }
    return result;
}

}  // namespace twic
