#include "volterra/numdiff.hpp"

#include <algorithm>
#include <cmath>

namespace volterra {

std::vector<double> fd_weights(double z, const std::vector<double>& nodes, int deriv) {
    const int n = static_cast<int>(nodes.size()) - 1;
    const int m = deriv;
    // c[i][k]: weight of node i for derivative order k
    std::vector<std::vector<double>> c(nodes.size(), std::vector<double>(static_cast<std::size_t>(m) + 1, 0.0));
    double c1 = 1.0;
    double c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[static_cast<std::size_t>(i)] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[static_cast<std::size_t>(i)] - nodes[static_cast<std::size_t>(j)];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
                        c1 * (k * c[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k - 1)] -
                              c5 * c[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k)]) /
                        c2;
                c[static_cast<std::size_t>(i)][0] = -c1 * c5 * c[static_cast<std::size_t>(i - 1)][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] =
                    (c4 * c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] -
                     k * c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k - 1)]) /
                    c3;
            c[static_cast<std::size_t>(j)][0] = c4 * c[static_cast<std::size_t>(j)][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) w[i] = c[i][static_cast<std::size_t>(m)];
    return w;
}

std::vector<double> taylor_1d(const std::function<double(double)>& g, int N, double span,
                              bool one_sided) {
    const int M = N + 2;
    const double h = span / (one_sided ? (2.0 * M) : M);
    std::vector<double> nodes;
    if (one_sided) {
        for (int k = 0; k <= 2 * M; ++k) nodes.push_back(k * h);
    } else {
        for (int k = -M; k <= M; ++k) nodes.push_back(k * h);
    }
    std::vector<double> values(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) values[i] = g(nodes[i]);

    std::vector<double> coeff(static_cast<std::size_t>(N) + 1, 0.0);
    double factorial = 1.0;
    for (int k = 0; k <= N; ++k) {
        if (k > 0) factorial *= k;
        const std::vector<double> w = fd_weights(0.0, nodes, k);
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += w[i] * values[i];
        coeff[static_cast<std::size_t>(k)] = s / factorial;
    }
    return coeff;
}

double fd_derivative(const std::function<double(double)>& g, double x, double h, double lo,
                     double hi) {
    // 5-point stencil, shifted so all nodes stay inside [lo, hi]
    double start = x - 2.0 * h;
    if (start < lo) start = lo;
    if (start + 4.0 * h > hi) start = hi - 4.0 * h;
    std::vector<double> nodes(5);
    for (int k = 0; k < 5; ++k) nodes[static_cast<std::size_t>(k)] = start + k * h;
    const std::vector<double> w = fd_weights(x, nodes, 1);
    double s = 0.0;
    for (int k = 0; k < 5; ++k) s += w[static_cast<std::size_t>(k)] * g(nodes[static_cast<std::size_t>(k)]);
    return s;
}

}  // namespace volterra
