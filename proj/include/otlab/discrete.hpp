#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace otlab {

class GridMeasure;

// Weighted point cloud; points stored flat, point i at [i*dim, (i+1)*dim).
class DiscreteMeasure {
public:
    DiscreteMeasure(int dim, std::vector<double> points, std::vector<double> weights);

    int dim() const { return dim_; }
    std::size_t size() const { return w_.size(); }
    const double* point(std::size_t i) const { return pts_.data() + i * dim_; }
    double weight(std::size_t i) const { return w_[i]; }
    const std::vector<double>& points() const { return pts_; }
    const std::vector<double>& weights() const { return w_; }

    double total_mass() const;
    std::vector<double> mean() const;
    bool is_probability(double tol = 1e-9) const;
    DiscreteMeasure normalized() const;

    void save(const std::string& path) const;
    static DiscreteMeasure load(const std::string& path);

private:
    int dim_;
    std::vector<double> pts_;
    std::vector<double> w_;
};

// Cell centers of positive-mass cells as atoms.
DiscreteMeasure lower_to_discrete(const GridMeasure& m, double cutoff = 0.0);

// 1D helper: sorted copy (atoms ordered by position, equal positions merged).
DiscreteMeasure sorted_1d(const DiscreteMeasure& m);

} // namespace otlab
