#include "otlab/grid.hpp"
#include "otlab/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace otlab {

GridSpec::GridSpec(std::vector<double> origin_, double h_, std::vector<int> dims_)
    : dim(static_cast<int>(origin_.size())), origin(std::move(origin_)), h(h_),
      dims(std::move(dims_)) {
    if (dim <= 0 || static_cast<int>(dims.size()) != dim)
        throw std::invalid_argument("grid: origin/dims size mismatch");
    if (h <= 0) throw std::invalid_argument("grid: spacing must be positive");
    for (int d : dims)
        if (d < 1) throw std::invalid_argument("grid: extents must be >= 1");
    if (cell_count() > kDefaultCellBudget) throw std::runtime_error("grid-budget");
}

std::size_t GridSpec::cell_count() const {
    std::size_t n = 1;
    for (int d : dims) n *= static_cast<std::size_t>(d);
    return n;
}

double GridSpec::cell_volume() const {
    double v = 1.0;
    for (int k = 0; k < dim; ++k) v *= h;
    return v;
}

std::vector<int> GridSpec::unflatten(std::size_t idx) const {
    std::vector<int> mi(dim);
    for (int k = dim - 1; k >= 0; --k) {
        mi[k] = static_cast<int>(idx % dims[k]);
        idx /= dims[k];
    }
    return mi;
}

std::size_t GridSpec::flatten(const std::vector<int>& mi) const {
    std::size_t idx = 0;
    for (int k = 0; k < dim; ++k) idx = idx * dims[k] + mi[k];
    return idx;
}

void GridSpec::center(std::size_t idx, double* out) const {
    for (int k = dim - 1; k >= 0; --k) {
        int i = static_cast<int>(idx % dims[k]);
        idx /= dims[k];
        out[k] = origin[k] + (i + 0.5) * h;
    }
}

std::vector<double> GridSpec::center(std::size_t idx) const {
    std::vector<double> c(dim);
    center(idx, c.data());
    return c;
}

std::size_t GridSpec::locate(const double* x) const {
    std::size_t idx = 0;
    for (int k = 0; k < dim; ++k) {
        double t = (x[k] - origin[k]) / h;
        int i = static_cast<int>(std::floor(t));
        if (i < 0 || i >= dims[k]) return npos;
        idx = idx * dims[k] + i;
    }
    return idx;
}

bool GridSpec::operator==(const GridSpec& other) const {
    return dim == other.dim && origin == other.origin && h == other.h &&
           dims == other.dims;
}

GridMeasure::GridMeasure(GridSpec spec, std::vector<double> weights)
    : spec_(std::move(spec)), w_(std::move(weights)) {
    if (w_.size() != spec_.cell_count())
        throw std::invalid_argument("grid measure: weight count mismatch");
    for (double w : w_)
        if (w < 0 || !std::isfinite(w))
            throw std::invalid_argument("grid measure: weights must be finite and >= 0");
}

double GridMeasure::total_mass() const {
    return std::accumulate(w_.begin(), w_.end(), 0.0);
}

std::vector<double> GridMeasure::mean() const {
    std::vector<double> m(spec_.dim, 0.0), c(spec_.dim);
    double total = 0.0;
    for (std::size_t i = 0; i < w_.size(); ++i) {
        if (w_[i] == 0) continue;
        spec_.center(i, c.data());
        for (int k = 0; k < spec_.dim; ++k) m[k] += w_[i] * c[k];
        total += w_[i];
    }
    for (int k = 0; k < spec_.dim; ++k) m[k] /= total;
    return m;
}

bool GridMeasure::is_probability(double tol) const {
    return std::abs(total_mass() - 1.0) <= tol;
}

GridMeasure GridMeasure::normalized() const {
    double total = total_mass();
    std::vector<double> w = w_;
    for (double& x : w) x /= total;
    return GridMeasure(spec_, std::move(w));
}

void GridMeasure::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out.precision(17);
    out << "grid n=" << spec_.dim << " origin=";
    for (int k = 0; k < spec_.dim; ++k) out << (k ? "," : "") << spec_.origin[k];
    out << " h=" << spec_.h << " dims=";
    for (int k = 0; k < spec_.dim; ++k) out << (k ? "," : "") << spec_.dims[k];
    out << "\n";
    for (std::size_t i = 0; i < w_.size(); ++i)
        out << w_[i] << ((i + 1) % 8 == 0 ? "\n" : " ");
    out << "\n";
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

} // namespace

GridMeasure GridMeasure::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string header;
    // provenance/comment lines start with '#'
    while (std::getline(in, header) && (header.empty() || header[0] == '#')) {}
    std::stringstream hs(header);
    std::string tag, kv;
    hs >> tag;
    if (tag != "grid") throw std::runtime_error("bad grid file header: " + path);
    int n = 0;
    std::vector<double> origin;
    double h = 0;
    std::vector<int> dims;
    while (hs >> kv) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw std::runtime_error("bad grid header field");
        std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
        if (key == "n") n = std::stoi(val);
        else if (key == "h") h = std::stod(val);
        else if (key == "origin")
            for (auto& p : split(val, ',')) origin.push_back(std::stod(p));
        else if (key == "dims")
            for (auto& p : split(val, ',')) dims.push_back(std::stoi(p));
    }
    if (n == 0 || static_cast<int>(origin.size()) != n ||
        static_cast<int>(dims.size()) != n)
        throw std::runtime_error("inconsistent grid header");
    GridSpec spec(origin, h, dims);
    std::vector<double> w;
    w.reserve(spec.cell_count());
    double x;
    while (in >> x) w.push_back(x);
    return GridMeasure(std::move(spec), std::move(w));
}

ScalarField::ScalarField(GridSpec s, std::vector<double> v)
    : spec(std::move(s)), values(std::move(v)) {
    if (values.size() != spec.cell_count())
        throw std::invalid_argument("scalar field: value count mismatch");
}

ScalarField::ScalarField(GridSpec s, double fill)
    : spec(std::move(s)), values(spec.cell_count(), fill) {}

std::vector<ScalarField> ScalarField::gradient() const {
    std::vector<ScalarField> g(spec.dim, ScalarField(spec, 0.0));
    const std::size_t n = values.size();
    for (std::size_t i = 0; i < n; ++i) {
        auto mi = spec.unflatten(i);
        for (int k = 0; k < spec.dim; ++k) {
            auto lo = mi, hi = mi;
            double denom = 0.0;
            if (mi[k] > 0) { lo[k] -= 1; denom += spec.h; }
            if (mi[k] + 1 < spec.dims[k]) { hi[k] += 1; denom += spec.h; }
            if (denom == 0) { g[k].values[i] = 0.0; continue; }
            g[k].values[i] =
                (values[spec.flatten(hi)] - values[spec.flatten(lo)]) / denom;
        }
    }
    return g;
}

Mask::Mask(GridSpec s, std::vector<std::uint8_t> cells)
    : spec(std::move(s)), in(std::move(cells)) {
    if (in.size() != spec.cell_count())
        throw std::invalid_argument("mask: cell count mismatch");
}

std::size_t Mask::count() const {
    return static_cast<std::size_t>(std::count(in.begin(), in.end(), std::uint8_t(1)));
}

} // namespace otlab
