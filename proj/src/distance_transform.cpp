#include "otlab/measures.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace otlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Felzenszwalb-Huttenlocher 1D squared distance transform (lower envelope of
// parabolas), distances in cell units.
// Infinite entries are skipped as sites; at least one finite site must exist
// (guaranteed by the outside padding).
void edt_1d(const std::vector<double>& f, std::vector<double>& out) {
    const int n = static_cast<int>(f.size());
    std::vector<int> v(n);
    std::vector<double> z(n + 1);
    int first = 0;
    while (first < n && f[first] == kInf) ++first;
    int k = 0;
    v[0] = first;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = first + 1; q < n; ++q) {
        if (f[q] == kInf) continue;
        double s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
                   (2.0 * q - 2.0 * v[k]);
        while (s <= z[k]) {
            --k;
            s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
                (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        double d = q - v[k];
        out[q] = d * d + f[v[k]];
    }
}

} // namespace

ScalarField distance_transform(const Mask& mask) {
    const GridSpec& spec = mask.spec;
    const int dim = spec.dim;

    // pad by one cell on each side so the outside world is a boundary
    std::vector<int> pdims(dim);
    for (int a = 0; a < dim; ++a) pdims[a] = spec.dims[a] + 2;
    std::size_t pcount = 1;
    for (int d : pdims) pcount *= static_cast<std::size_t>(d);

    auto pflat = [&](const std::vector<int>& mi) {
        std::size_t idx = 0;
        for (int a = 0; a < dim; ++a) idx = idx * pdims[a] + mi[a];
        return idx;
    };

    std::vector<double> d2(pcount, 0.0); // 0 on outside cells, inf inside
    {
        std::vector<int> mi(dim, 0);
        for (std::size_t i = 0; i < mask.in.size(); ++i) {
            if (!mask.in[i]) continue;
            auto gi = spec.unflatten(i);
            for (int a = 0; a < dim; ++a) mi[a] = gi[a] + 1;
            d2[pflat(mi)] = kInf;
        }
    }

    // separable passes, one axis at a time
    std::vector<double> line, lineOut;
    for (int axis = 0; axis < dim; ++axis) {
        const int len = pdims[axis];
        line.resize(len);
        lineOut.resize(len);
        // iterate over all lines along `axis`
        std::vector<int> mi(dim, 0);
        bool done = false;
        while (!done) {
            for (int q = 0; q < len; ++q) {
                mi[axis] = q;
                line[q] = d2[pflat(mi)];
            }
            edt_1d(line, lineOut);
            for (int q = 0; q < len; ++q) {
                mi[axis] = q;
                d2[pflat(mi)] = lineOut[q];
            }
            mi[axis] = 0;
            // advance the other axes
            int a = dim - 1;
            while (a >= 0) {
                if (a == axis) { --a; continue; }
                if (++mi[a] < pdims[a]) break;
                mi[a] = 0;
                --a;
            }
            if (a < 0) done = true;
        }
    }

    ScalarField out(spec, 0.0);
    {
        std::vector<int> mi(dim, 0);
        const double h = spec.h;
        for (std::size_t i = 0; i < mask.in.size(); ++i) {
            if (!mask.in[i]) continue;
            auto gi = spec.unflatten(i);
            for (int a = 0; a < dim; ++a) mi[a] = gi[a] + 1;
            double d = std::sqrt(d2[pflat(mi)]) * h - 0.5 * h;
            out.values[i] = std::max(d, 0.5 * h);
        }
    }
    return out;
}

} // namespace otlab
