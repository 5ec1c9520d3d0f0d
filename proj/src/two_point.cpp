#include "otlab/two_point.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>

namespace otlab {

double lambda_eps(const DisplacementField& xi, const std::vector<ScalarField>& f,
                  const Kernel& k, double p) {
    if (f.empty() || int(f.size()) != xi.dim)
        throw std::invalid_argument("lambda_eps: component count mismatch");
    const GridSpec& grid = f[0].spec;
    const int dim = grid.dim;
    DiscretizedKernel dk = discretize(k, dim, grid.h);

    double total = 0.0;
    std::vector<int> mi(dim), mj(dim);
    for (std::size_t i = 0; i < xi.base_mass.size(); ++i) {
        std::size_t base = grid.locate(xi.base.data() + i * dim);
        if (base == GridSpec::npos) continue;
        mi = grid.unflatten(base);
        double acc = 0.0;
        for (std::size_t q = 0; q < dk.size(); ++q) {
            bool ok = true;
            for (int a = 0; a < dim; ++a) {
                mj[a] = mi[a] + dk.offsets[q * dim + a];
                if (mj[a] < 0 || mj[a] >= grid.dims[a]) ok = false;
            }
            if (!ok) continue;
            std::size_t cell = grid.flatten(mj);
            double d2 = 0.0;
            for (int a = 0; a < dim; ++a) {
                double d = xi.xi[i * dim + a] - f[a][cell];
                d2 += d * d;
            }
            acc += dk.weights[q] * std::pow(std::sqrt(d2), p);
        }
        total += xi.base_mass[i] * acc;
    }
    return total;
}

namespace {

// apply fn(cell index, center) to every lambda cell with center within
// distance r of pos
template <typename Fn>
void for_cells_in_ball(const GridMeasure& lambda, const double* pos, double r,
                       Fn&& fn) {
    const GridSpec& spec = lambda.spec();
    const int dim = spec.dim;
    std::vector<int> lo(dim), hi(dim), mi(dim);
    for (int a = 0; a < dim; ++a) {
        lo[a] = std::max(0, int(std::floor((pos[a] - r - spec.origin[a]) / spec.h)));
        hi[a] = std::min(spec.dims[a] - 1,
                         int(std::floor((pos[a] + r - spec.origin[a]) / spec.h)));
        if (lo[a] > hi[a]) return;
        mi[a] = lo[a];
    }
    std::vector<double> c(dim);
    while (true) {
        std::size_t idx = spec.flatten(mi);
        spec.center(idx, c.data());
        double d2 = 0.0;
        for (int a = 0; a < dim; ++a) d2 += (c[a] - pos[a]) * (c[a] - pos[a]);
        if (d2 <= r * r) fn(idx);
        int axis = dim - 1;
        while (axis >= 0 && ++mi[axis] > hi[axis]) mi[axis--] = lo[axis];
        if (axis < 0) break;
    }
}

std::vector<int> bfs_parents(const GridGraph& g, int source) {
    std::vector<int> parent(g.size(), -2);
    parent[source] = -1;
    std::deque<int> queue{source};
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int v : g.adj[u])
            if (parent[v] == -2) {
                parent[v] = u;
                queue.push_back(v);
            }
    }
    return parent;
}

double node_distance(const GridGraph& g, int i, int j) {
    double d2 = 0.0;
    for (int a = 0; a < g.dim; ++a) {
        double d = g.pos(i)[a] - g.pos(j)[a];
        d2 += d * d;
    }
    return std::sqrt(d2);
}

} // namespace

GridGraph build_grid_graph(const GridMeasure& lambda, double r, double eta,
                           const std::vector<double>& zbar) {
    const GridSpec& spec = lambda.spec();
    const int dim = spec.dim;
    if (!(eta > 0.0) || !(eta > 0.0 && eta <= 0.25))
        throw std::invalid_argument("build_grid_graph: eta must be in (0, 1/4]");
    if (r < 2.0 * spec.h)
        throw std::invalid_argument("build_grid_graph: r must be >= 2h");
    if (int(zbar.size()) != dim)
        throw std::invalid_argument("build_grid_graph: zbar dimension mismatch");

    GridGraph g;
    g.dim = dim;
    g.r = r;
    g.eta = eta;
    g.rhat = eta * r;
    g.zbar = zbar;

    // lattice points nearest to some charged cell center
    std::map<std::vector<int>, int> index;
    std::vector<double> c(dim);
    std::vector<int> key(dim);
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        if (lambda.weight(i) <= 0) continue;
        spec.center(i, c.data());
        for (int a = 0; a < dim; ++a)
            key[a] = int(std::llround((c[a] - zbar[a]) / g.rhat));
        if (index.emplace(key, int(index.size())).second)
            for (int a = 0; a < dim; ++a)
                g.node_pos.push_back(zbar[a] + key[a] * g.rhat);
    }
    if (index.empty()) throw std::runtime_error("empty-support");

    const std::size_t N = index.size();
    g.ball_mass.assign(N, 0.0);
    for (const auto& [k, id] : index)
        for_cells_in_ball(lambda, g.pos(id), r, [&](std::size_t cell) {
            g.ball_mass[id] += lambda.weight(cell);
        });

    g.adj.assign(N, {});
    for (const auto& [k, id] : index) {
        key = k;
        for (int a = 0; a < dim; ++a) {
            key[a] += 1;
            auto it = index.find(key);
            if (it != index.end()) {
                g.adj[id].push_back(it->second);
                g.adj[it->second].push_back(id);
            }
            key[a] -= 1;
        }
    }

    auto parent = bfs_parents(g, 0);
    g.connected =
        std::none_of(parent.begin(), parent.end(), [](int p) { return p == -2; });
    return g;
}

double m0(const GridGraph& g, const GridMeasure& lambda) {
    double worst = 1.0; // single node: vacuous max
    const int dim = g.dim;
    std::vector<double> pj(dim);
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (int j : g.adj[i]) {
            if (j < int(i)) continue;
            double overlap = 0.0;
            for_cells_in_ball(lambda, g.pos(i), g.r, [&](std::size_t cell) {
                std::vector<double> c(dim);
                lambda.spec().center(cell, c.data());
                double d2 = 0.0;
                for (int a = 0; a < dim; ++a)
                    d2 += (c[a] - g.pos(j)[a]) * (c[a] - g.pos(j)[a]);
                if (d2 <= g.r * g.r) overlap += lambda.weight(cell);
            });
            double top = std::max(g.ball_mass[i], g.ball_mass[j]);
            if (overlap <= 0) return std::numeric_limits<double>::infinity();
            worst = std::max(worst, top / overlap);
        }
    }
    return worst;
}

ChainTable build_chains(const GridGraph& g, Rng rng,
                        std::size_t exact_node_limit, std::size_t sample_pairs) {
    const std::size_t N = g.size();
    ChainTable table;
    if (N < 2) return table;

    auto reconstruct = [&](const std::vector<int>& parent, int i, int j) {
        std::vector<int> chain;
        for (int u = j; u != -1; u = parent[u]) chain.push_back(u);
        std::reverse(chain.begin(), chain.end());
        if (chain.front() != i) chain.clear(); // unreachable
        return chain;
    };

    if (N <= exact_node_limit) {
        table.exhaustive = true;
        for (std::size_t i = 0; i + 1 < N; ++i) {
            auto parent = bfs_parents(g, int(i));
            for (std::size_t j = i + 1; j < N; ++j) {
                auto chain = reconstruct(parent, int(i), int(j));
                if (chain.empty()) continue;
                table.pairs.emplace_back(int(i), int(j));
                table.chains.push_back(std::move(chain));
            }
        }
    } else {
        table.exhaustive = false;
        // group sampled pairs by source so each source costs one search
        std::size_t sources = std::max<std::size_t>(1, sample_pairs / 8);
        for (std::size_t s = 0; s < sources; ++s) {
            int i = int(rng.uniform_index(N));
            auto parent = bfs_parents(g, i);
            for (int t = 0; t < 8; ++t) {
                int j = int(rng.uniform_index(N));
                if (j == i) continue;
                auto chain = reconstruct(parent, i, j);
                if (chain.empty()) continue;
                table.pairs.emplace_back(i, j);
                table.chains.push_back(std::move(chain));
            }
        }
        double total_pairs = double(N) * double(N - 1) / 2.0;
        table.pair_scale =
            table.pairs.empty() ? 1.0 : total_pairs / double(table.pairs.size());
    }

    for (std::size_t c = 0; c < table.chains.size(); ++c) {
        double steps = double(table.chains[c].size()) - 1.0;
        double d = node_distance(g, table.pairs[c].first, table.pairs[c].second);
        if (d > 0)
            table.kappa_geo = std::max(table.kappa_geo, g.rhat * steps / d);
    }
    return table;
}

TauResult tau(const GridGraph& g, const ChainTable& chains, double p) {
    if (!g.connected) throw std::runtime_error("graph-disconnected");
    TauResult res;
    res.pairs_used = chains.pairs.size();
    res.kappa_geo = chains.kappa_geo;
    if (chains.pairs.empty()) return res; // single node: no pairs

    auto pair_term = [&](std::size_t c) {
        const auto& chain = chains.chains[c];
        double mx = g.ball_mass[chains.pairs[c].first];
        double my = g.ball_mass[chains.pairs[c].second];
        if (p > 1.0) {
            double pprime = p / (p - 1.0);
            double s = 0.0;
            for (int z : chain) s += std::pow(g.ball_mass[z], -pprime / p);
            return mx * my * std::pow(s, p / pprime);
        }
        double worst = 0.0;
        for (int z : chain) worst = std::max(worst, 1.0 / g.ball_mass[z]);
        return mx * my * worst;
    };

    std::vector<double> bins(g.size(), 0.0);
    for (std::size_t c = 0; c < chains.chains.size(); ++c) {
        double term = pair_term(c) * chains.pair_scale;
        for (int z : chains.chains[c]) bins[z] += term;
    }
    std::size_t arg = std::max_element(bins.begin(), bins.end()) - bins.begin();
    res.tau = bins[arg];

    if (!chains.exhaustive) {
        // standard error of the scaled pair sum at the arg-sup node
        double mean = 0.0, m2 = 0.0;
        std::size_t n = chains.chains.size();
        for (std::size_t c = 0; c < n; ++c) {
            const auto& chain = chains.chains[c];
            double v = std::find(chain.begin(), chain.end(), int(arg)) !=
                               chain.end()
                           ? pair_term(c)
                           : 0.0;
            double d = v - mean;
            mean += d / double(c + 1);
            m2 += d * (v - mean);
        }
        double var = n > 1 ? m2 / double(n - 1) : 0.0;
        res.std_error = chains.pair_scale * std::sqrt(var * double(n));
    }
    return res;
}

TwoPointResult two_point_check(const GridMeasure& lambda,
                               const DisplacementField& xi,
                               const std::vector<ScalarField>& f, const Kernel& k,
                               double r, double eta, double p, Rng rng) {
    const int dim = lambda.spec().dim;

    TwoPointResult res;
    // z = lambda-mean of xi, LHS = integral |xi - z|^p d lambda
    std::vector<double> z(dim, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < xi.base_mass.size(); ++i) {
        total += xi.base_mass[i];
        for (int a = 0; a < dim; ++a)
            z[a] += xi.base_mass[i] * xi.xi[i * dim + a];
    }
    for (int a = 0; a < dim; ++a) z[a] /= total;
    for (std::size_t i = 0; i < xi.base_mass.size(); ++i) {
        double d2 = 0.0;
        for (int a = 0; a < dim; ++a) {
            double d = xi.xi[i * dim + a] - z[a];
            d2 += d * d;
        }
        res.lhs += xi.base_mass[i] * std::pow(std::sqrt(d2), p);
    }

    res.lambda_eps_value = lambda_eps(xi, f, k, p);

    // sup over zbar approximated by the two anchors
    std::vector<double> anchor0(dim, 0.0), anchor1(dim, eta * r / 2.0);
    for (const auto& zb : {anchor0, anchor1}) {
        GridGraph g = build_grid_graph(lambda, r, eta, zb);
        ChainTable chains = build_chains(g, rng.fork(zb == anchor0 ? 1 : 2));
        TauResult t = tau(g, chains, p);
        res.tau_value = std::max(res.tau_value, t.tau);
        res.m0_value = std::max(res.m0_value, m0(g, lambda));
    }

    res.bound = res.m0_value * std::pow(k.eps / r, double(dim)) * res.tau_value *
                res.lambda_eps_value;
    res.ratio = res.bound > 0 ? res.lhs / res.bound
                              : (res.lhs > 0
                                     ? std::numeric_limits<double>::infinity()
                                     : 0.0);
    return res;
}

PoincareResult nonlocal_poincare(const ScalarField& f, const Mask& domain,
                                 const Kernel& k, double p) {
    if (!(f.spec == domain.spec))
        throw std::invalid_argument("nonlocal_poincare: grid mismatch");
    const GridSpec& spec = f.spec;
    const int dim = spec.dim;
    const double vol = spec.cell_volume();
    DiscretizedKernel dk = discretize(k, dim, spec.h);

    double mean = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        if (domain.in[i]) {
            mean += f.values[i];
            ++count;
        }
    if (count == 0) throw std::runtime_error("empty-support");
    mean /= double(count);

    PoincareResult res;
    std::vector<int> mi(dim), mj(dim);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        if (!domain.in[i]) continue;
        res.lhs += vol * std::pow(std::abs(f.values[i] - mean), p);
        mi = spec.unflatten(i);
        for (std::size_t q = 0; q < dk.size(); ++q) {
            double off2 = 0.0;
            bool ok = true;
            for (int a = 0; a < dim; ++a) {
                int o = dk.offsets[q * dim + a];
                off2 += double(o) * o;
                mj[a] = mi[a] + o;
                if (mj[a] < 0 || mj[a] >= spec.dims[a]) ok = false;
            }
            if (!ok || off2 == 0.0) continue;
            std::size_t cell = spec.flatten(mj);
            if (!domain.in[cell]) continue;
            double dist = spec.h * std::sqrt(off2);
            res.rhs += vol * dk.weights[q] *
                       std::pow(std::abs(f.values[i] - f.values[cell]) / dist, p);
        }
    }
    res.ratio = res.rhs > 0 ? res.lhs / res.rhs : 0.0;
    return res;
}

} // namespace otlab
