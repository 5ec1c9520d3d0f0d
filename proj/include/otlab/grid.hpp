#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace otlab {

// Regular axis-aligned grid with uniform spacing.  Cell (i0,...,i_{n-1}) has
// center origin + (i+1/2)h along each axis; weights are stored row-major
// (last axis fastest).
struct GridSpec {
    int dim = 1;
    std::vector<double> origin;
    double h = 1.0;
    std::vector<int> dims;

    static constexpr std::size_t kDefaultCellBudget = std::size_t(1) << 22;

    GridSpec() = default;
    GridSpec(std::vector<double> origin_, double h_, std::vector<int> dims_);

    std::size_t cell_count() const;
    double cell_volume() const;

    std::vector<int> unflatten(std::size_t idx) const;
    std::size_t flatten(const std::vector<int>& mi) const;
    std::vector<double> center(std::size_t idx) const;
    void center(std::size_t idx, double* out) const;

    // cell containing x, or npos if outside the grid
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t locate(const double* x) const;

    bool operator==(const GridSpec& other) const;
};

class GridMeasure {
public:
    GridMeasure(GridSpec spec, std::vector<double> weights);

    const GridSpec& spec() const { return spec_; }
    const std::vector<double>& weights() const { return w_; }
    double weight(std::size_t i) const { return w_[i]; }
    std::size_t size() const { return w_.size(); }

    double total_mass() const;
    std::vector<double> mean() const;
    bool is_probability(double tol = 1e-9) const;
    GridMeasure normalized() const;

    void save(const std::string& path) const;
    static GridMeasure load(const std::string& path);

private:
    GridSpec spec_;
    std::vector<double> w_;
};

// Real-valued field sampled on grid cell centers (dual potentials, test
// functions, displacement components).  No sign or mass constraints.
struct ScalarField {
    GridSpec spec;
    std::vector<double> values;

    ScalarField() = default;
    ScalarField(GridSpec s, std::vector<double> v);
    ScalarField(GridSpec s, double fill = 0.0);

    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }

    // centered finite differences, one-sided at the boundary
    std::vector<ScalarField> gradient() const;
};

// Boolean support mask on a grid.
struct Mask {
    GridSpec spec;
    std::vector<std::uint8_t> in;

    Mask() = default;
    Mask(GridSpec s, std::vector<std::uint8_t> cells);

    std::size_t count() const;
    bool empty() const { return count() == 0; }
};

} // namespace otlab
