#include "otlab/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "otlab/grid.hpp"

namespace otlab {

DiscreteMeasure::DiscreteMeasure(int dim, std::vector<double> points,
                                 std::vector<double> weights)
    : dim_(dim), pts_(std::move(points)), w_(std::move(weights)) {
    if (dim_ <= 0) throw std::invalid_argument("discrete measure: bad dimension");
    if (pts_.size() != w_.size() * static_cast<std::size_t>(dim_))
        throw std::invalid_argument("discrete measure: point/weight count mismatch");
    if (w_.empty()) throw std::invalid_argument("discrete measure: empty");
    for (double w : w_)
        if (!(w > 0) || !std::isfinite(w))
            throw std::invalid_argument("discrete measure: weights must be > 0");
}

double DiscreteMeasure::total_mass() const {
    return std::accumulate(w_.begin(), w_.end(), 0.0);
}

std::vector<double> DiscreteMeasure::mean() const {
    std::vector<double> m(dim_, 0.0);
    double total = total_mass();
    for (std::size_t i = 0; i < w_.size(); ++i)
        for (int k = 0; k < dim_; ++k) m[k] += w_[i] * pts_[i * dim_ + k];
    for (int k = 0; k < dim_; ++k) m[k] /= total;
    return m;
}

bool DiscreteMeasure::is_probability(double tol) const {
    return std::abs(total_mass() - 1.0) <= tol;
}

DiscreteMeasure DiscreteMeasure::normalized() const {
    double total = total_mass();
    std::vector<double> w = w_;
    for (double& x : w) x /= total;
    return DiscreteMeasure(dim_, pts_, std::move(w));
}

void DiscreteMeasure::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out.precision(17);
    for (std::size_t i = 0; i < w_.size(); ++i) {
        for (int k = 0; k < dim_; ++k) out << pts_[i * dim_ + k] << " ";
        out << w_[i] << "\n";
    }
}

DiscreteMeasure DiscreteMeasure::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::vector<double> row;
        double x;
        while (ss >> x) row.push_back(x);
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("empty discrete measure file");
    int dim = static_cast<int>(rows.front().size()) - 1;
    std::vector<double> pts, w;
    for (auto& row : rows) {
        if (static_cast<int>(row.size()) != dim + 1)
            throw std::runtime_error("ragged discrete measure file");
        pts.insert(pts.end(), row.begin(), row.end() - 1);
        w.push_back(row.back());
    }
    return DiscreteMeasure(dim, std::move(pts), std::move(w));
}

DiscreteMeasure lower_to_discrete(const GridMeasure& m, double cutoff) {
    const GridSpec& spec = m.spec();
    std::vector<double> pts, w;
    std::vector<double> c(spec.dim);
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.weight(i) <= cutoff) continue;
        spec.center(i, c.data());
        pts.insert(pts.end(), c.begin(), c.end());
        w.push_back(m.weight(i));
    }
    return DiscreteMeasure(spec.dim, std::move(pts), std::move(w));
}

DiscreteMeasure sorted_1d(const DiscreteMeasure& m) {
    if (m.dim() != 1) throw std::invalid_argument("sorted_1d: measure not 1D");
    std::vector<std::size_t> order(m.size());
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return m.point(a)[0] < m.point(b)[0];
    });
    std::vector<double> pts, w;
    for (std::size_t i : order) {
        double x = m.point(i)[0];
        if (!pts.empty() && pts.back() == x) {
            w.back() += m.weight(i);
        } else {
            pts.push_back(x);
            w.push_back(m.weight(i));
        }
    }
    return DiscreteMeasure(1, std::move(pts), std::move(w));
}

} // namespace otlab
