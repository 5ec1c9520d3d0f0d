#include "network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace otlab::detail {

namespace {

// Spanning-tree basis over n sources + m sinks.  Potentials satisfy
// u_i + v_j = c_ij on basic arcs with the root pinned to 0.
struct Basis {
    int n, m, N;
    std::vector<std::vector<int>> adj;        // tree neighbors
    std::unordered_map<std::int64_t, double> flow; // arc id -> basic flow
    std::vector<int> parent, depth, order;
    std::vector<double> pot;

    std::int64_t arc_id(int u, int v) const {
        int i = u < n ? u : v;
        int j = u < n ? v : u;
        return std::int64_t(i) * m + (j - n);
    }

    void drop_edge(int u, int v) {
        auto& au = adj[u];
        au.erase(std::find(au.begin(), au.end(), v));
        auto& av = adj[v];
        av.erase(std::find(av.begin(), av.end(), u));
    }
};

} // namespace

SimplexResult transport_simplex(int dim, std::size_t n_, const double* xs,
                                const double* a_in, std::size_t m_, const double* ys,
                                const double* b_in, const CostConvention& conv) {
    const int n = static_cast<int>(n_), m = static_cast<int>(m_), N = n + m;
    auto C = [&](int i, int j) {
        return conv.cost(xs + std::size_t(i) * dim, ys + std::size_t(j) * dim, dim);
    };

    Basis T;
    T.n = n;
    T.m = m;
    T.N = N;
    T.adj.assign(N, {});
    T.parent.assign(N, -1);
    T.depth.assign(N, 0);
    T.pot.assign(N, 0.0);

    // Perturb supplies to break degenerate ties during pivoting; the final
    // flows are re-solved on the exact data from the optimal tree.
    std::vector<double> a(a_in, a_in + n), b(b_in, b_in + m);
    double mass = 0.0;
    for (double x : a) mass += x;
    const double d0 = mass * 1e-9 / n;
    double added = 0.0;
    for (int i = 0; i < n; ++i) {
        a[i] += d0 * (i + 1);
        added += d0 * (i + 1);
    }
    b[m - 1] += added;

    // northwest-corner start
    {
        int i = 0, j = 0;
        double ra = a[0], rb = b[0];
        while (true) {
            T.flow[T.arc_id(i, n + j)] = std::min(ra, rb);
            T.adj[i].push_back(n + j);
            T.adj[n + j].push_back(i);
            if (i == n - 1 && j == m - 1) break;
            bool step_i = (i < n - 1) && (j == m - 1 || ra <= rb);
            if (step_i) {
                rb -= ra;
                ra = a[++i];
            } else {
                ra -= rb;
                rb = b[++j];
            }
        }
    }

    auto rebuild = [&]() {
        T.order.clear();
        T.order.reserve(N);
        T.parent[0] = -1;
        T.depth[0] = 0;
        T.pot[0] = 0.0;
        T.order.push_back(0);
        for (std::size_t q = 0; q < T.order.size(); ++q) {
            int u = T.order[q];
            for (int v : T.adj[u]) {
                if (v == T.parent[u]) continue;
                T.parent[v] = u;
                T.depth[v] = T.depth[u] + 1;
                int i = u < n ? u : v, j = (u < n ? v : u) - n;
                T.pot[v] = C(i, j) - T.pot[u];
                T.order.push_back(v);
            }
        }
    };
    rebuild();

    const std::int64_t A = std::int64_t(n) * m;
    const std::int64_t block =
        std::max<std::int64_t>(256, std::int64_t(std::sqrt(double(A))));
    std::int64_t pos = 0;
    double cscale = 1.0;
    const long iter_cap = 2000000;
    long iters = 0;

    std::vector<int> pathS, pathT;
    while (true) {
        // block pricing: most negative reduced cost in the first block that
        // has one, cycling through the arc list
        int ei = -1, ej = -1;
        double best = -1e-12 * cscale;
        for (std::int64_t scanned = 0; scanned < A;) {
            for (std::int64_t k = 0; k < block && scanned < A; ++k, ++scanned) {
                std::int64_t kk = (pos + k) % A;
                int i = int(kk / m), j = int(kk % m);
                double c = C(i, j);
                if (std::abs(c) > cscale) cscale = std::abs(c);
                double rc = c - T.pot[i] - T.pot[n + j];
                if (rc < best) {
                    best = rc;
                    ei = i;
                    ej = j;
                }
            }
            pos += block;
            if (pos >= A) pos -= A;
            if (ei >= 0) break;
        }
        if (ei < 0) break; // optimal
        if (++iters > iter_cap) throw std::runtime_error("solver-stall");

        // cycle created by the entering arc: walk both endpoints to the LCA
        int s = ei, t = n + ej;
        pathS.clear();
        pathT.clear();
        int u = s, w = t;
        while (T.depth[u] > T.depth[w]) { pathS.push_back(u); u = T.parent[u]; }
        while (T.depth[w] > T.depth[u]) { pathT.push_back(w); w = T.parent[w]; }
        while (u != w) {
            pathS.push_back(u);
            u = T.parent[u];
            pathT.push_back(w);
            w = T.parent[w];
        }

        // pushing theta along s -> t decreases flow on source-side arcs whose
        // child is a source and sink-side arcs whose child is a sink
        double theta = std::numeric_limits<double>::infinity();
        int leave_child = -1;
        auto consider = [&](int child, bool on_s_side) {
            bool decrease = on_s_side ? (child < n) : (child >= n);
            if (!decrease) return;
            double f = T.flow[T.arc_id(child, T.parent[child])];
            if (f < theta) {
                theta = f;
                leave_child = child;
            }
        };
        for (int c : pathS) consider(c, true);
        for (int c : pathT) consider(c, false);

        for (int c : pathS) {
            bool decrease = c < n;
            T.flow[T.arc_id(c, T.parent[c])] += decrease ? -theta : theta;
        }
        for (int c : pathT) {
            bool decrease = c >= n;
            T.flow[T.arc_id(c, T.parent[c])] += decrease ? -theta : theta;
        }

        int lp = T.parent[leave_child];
        T.flow.erase(T.arc_id(leave_child, lp));
        T.drop_edge(leave_child, lp);
        T.flow[T.arc_id(s, t)] = theta;
        T.adj[s].push_back(t);
        T.adj[t].push_back(s);
        rebuild();
    }

    // exact flows on the optimal tree from the unperturbed data, leaves up
    std::vector<double> excess(N);
    for (int i = 0; i < n; ++i) excess[i] = a_in[i];
    for (int j = 0; j < m; ++j) excess[n + j] = -b_in[j];
    SimplexResult res;
    res.u.assign(T.pot.begin(), T.pot.begin() + n);
    res.v.assign(T.pot.begin() + n, T.pot.end());
    for (std::size_t q = T.order.size(); q-- > 1;) {
        int c = T.order[q], p = T.parent[c];
        double f = c < n ? excess[c] : -excess[c];
        excess[c] = 0.0;
        excess[p] += c < n ? f : -f;
        if (f <= 0.0) continue;
        int i = c < n ? c : p, j = (c < n ? p : c) - n;
        res.plan.push_back({std::size_t(i), std::size_t(j), f});
        res.cost += f * C(i, j);
    }
    return res;
}

} // namespace otlab::detail
