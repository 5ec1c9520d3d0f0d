#include "otlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "otlab/contraction.hpp"
#include "otlab/gaussian.hpp"
#include "otlab/measures.hpp"
#include "otlab/ot.hpp"
#include "otlab/rng.hpp"
#include "otlab/stability.hpp"
#include "otlab/transport_density.hpp"
#include "otlab/two_point.hpp"

namespace fs = std::filesystem;

namespace otlab {

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    ExperimentConfig cfg;
    cfg.source_text = text;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": empty key");
        cfg.kv[section.empty() ? key : section + "." + key] = val;
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

bool ExperimentConfig::has(const std::string& key) const {
    return kv.count(key) != 0;
}

std::string ExperimentConfig::str(const std::string& key,
                                  const std::string& dflt) const {
    auto it = kv.find(key);
    return it == kv.end() ? dflt : it->second;
}

double ExperimentConfig::num(const std::string& key, double dflt) const {
    auto it = kv.find(key);
    if (it == kv.end()) return dflt;
    try {
        return std::stod(it->second);
    } catch (...) {
        throw ConfigError("config key " + key + ": not a number");
    }
}

long ExperimentConfig::integer(const std::string& key, long dflt) const {
    auto it = kv.find(key);
    if (it == kv.end()) return dflt;
    try {
        return std::stol(it->second);
    } catch (...) {
        throw ConfigError("config key " + key + ": not an integer");
    }
}

std::vector<double> ExperimentConfig::list(const std::string& key) const {
    std::vector<double> out;
    auto it = kv.find(key);
    if (it == kv.end()) return out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (...) {
            throw ConfigError("config key " + key + ": bad list entry " + item);
        }
    }
    return out;
}

std::uint64_t ExperimentConfig::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : source_text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

// ---- measure generators -------------------------------------------------

GridMeasure uniform_box(const std::vector<double>& lo,
                        const std::vector<double>& hi, double h) {
    const int dim = int(lo.size());
    std::vector<int> dims(dim);
    for (int a = 0; a < dim; ++a)
        dims[a] = std::max(1, int(std::ceil((hi[a] - lo[a]) / h - 1e-9)));
    GridSpec spec(lo, h, dims);
    std::vector<double> w(spec.cell_count(), 1.0);
    return GridMeasure(std::move(spec), std::move(w)).normalized();
}

GridMeasure bump_measure(int dim, std::uint64_t seed, int count, double h) {
    std::vector<double> lo(dim, 0.0), hi(dim, 1.0);
    std::vector<int> dims(dim, std::max(1, int(std::round(1.0 / h))));
    GridSpec spec(lo, h, dims);
    Rng rng(seed);
    std::vector<double> centers, widths, amps;
    for (int k = 0; k < count; ++k) {
        for (int a = 0; a < dim; ++a) centers.push_back(rng.uniform(0.1, 0.9));
        widths.push_back(rng.uniform(0.08, 0.25));
        amps.push_back(rng.uniform(0.5, 1.5));
    }
    std::vector<double> w(spec.cell_count());
    std::vector<double> c(dim);
    for (std::size_t i = 0; i < w.size(); ++i) {
        spec.center(i, c.data());
        double v = 1e-3; // small floor keeps the support connected
        for (int k = 0; k < count; ++k) {
            double d2 = 0.0;
            for (int a = 0; a < dim; ++a) {
                double d = c[a] - centers[k * dim + a];
                d2 += d * d;
            }
            v += amps[k] * std::exp(-d2 / (2.0 * widths[k] * widths[k]));
        }
        w[i] = v;
    }
    return GridMeasure(std::move(spec), std::move(w)).normalized();
}

GridMeasure star_measure(double h) {
    // star-shaped nonconvex domain: radius oscillates around the center
    std::vector<double> lo{0.0, 0.0};
    int n = std::max(1, int(std::round(1.0 / h)));
    GridSpec spec(lo, h, {n, n});
    std::vector<double> w(spec.cell_count(), 0.0);
    std::vector<double> c(2);
    for (std::size_t i = 0; i < w.size(); ++i) {
        spec.center(i, c.data());
        double x = c[0] - 0.5, y = c[1] - 0.5;
        double rad = std::sqrt(x * x + y * y);
        double theta = std::atan2(y, x);
        double rmax = 0.28 + 0.16 * std::cos(5.0 * theta);
        if (rad <= rmax) w[i] = 1.0;
    }
    return GridMeasure(std::move(spec), std::move(w)).normalized();
}

GridMeasure make_measure(const ExperimentConfig& cfg, const std::string& key,
                         double h) {
    std::string gen = cfg.str(key);
    if (gen.empty()) throw ConfigError("missing measure source: " + key);
    auto colon = gen.find(':');
    std::string kind = gen.substr(0, colon);
    std::vector<double> args;
    if (colon != std::string::npos) {
        std::stringstream ss(gen.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) args.push_back(std::stod(trim(item)));
    }
    if (kind == "file") return GridMeasure::load(gen.substr(colon + 1));
    if (kind == "uniform1d" && args.size() == 2)
        return uniform_box({args[0]}, {args[1]}, h);
    if (kind == "uniform2d" && args.size() == 4)
        return uniform_box({args[0], args[1]}, {args[2], args[3]}, h);
    if (kind == "gauss1d" && args.size() == 4)
        return discretize_gaussian_1d({1, args[1], {args[0]}}, args[2], args[3], h)
            .measure;
    if (kind == "bumps1d" && args.size() == 2)
        return bump_measure(1, std::uint64_t(args[0]), int(args[1]), h);
    if (kind == "bumps2d" && args.size() == 2)
        return bump_measure(2, std::uint64_t(args[0]), int(args[1]), h);
    if (kind == "star2d") return star_measure(h);
    throw ConfigError("unknown measure source: " + gen);
}

// ---- output helpers -----------------------------------------------------

struct Csv {
    std::ofstream out;
    Csv(const fs::path& path, const std::string& header) : out(path) {
        if (!out) throw std::ios_base::failure("cannot open " + path.string());
        out.precision(12);
        out << header << "\n";
    }
    void row(const std::vector<double>& vals, const std::string& prefix = "") {
        if (!prefix.empty()) out << prefix;
        for (std::size_t i = 0; i < vals.size(); ++i)
            out << (i || !prefix.empty() ? "," : "") << vals[i];
        out << "\n";
    }
};

struct Runner {
    fs::path outdir;
    std::vector<std::string> artifacts;
    std::vector<std::string> failures;

    fs::path artifact(const std::string& name) {
        artifacts.push_back(name);
        return outdir / name;
    }
    void check(bool ok, const std::string& name) {
        if (!ok) failures.push_back(name);
    }
};

CostConvention conv_from(const ExperimentConfig& cfg, double p) {
    return {p, cfg.str("convention", "pnorm") != "standard"};
}

// displacement map of a solved pair as grid fields plus the support field
struct PipelineFields {
    TransportSolution sol;
    DisplacementField xi;
    std::vector<ScalarField> f;
};

PipelineFields solve_with_fields(const GridMeasure& lambda, const GridMeasure& mu,
                                 const CostConvention& conv) {
    PipelineFields out;
    DiscreteMeasure dl = lower_to_discrete(lambda), dm = lower_to_discrete(mu);
    out.sol = solve(dl, dm, conv);
    CTransformField ct = c_transform(out.sol.psi, dm, lambda.spec(), conv);
    out.xi = gradient_field(ct, dm, lambda, conv);
    const GridSpec& spec = lambda.spec();
    out.f.assign(spec.dim, ScalarField(spec, 0.0));
    std::vector<double> x(spec.dim);
    for (std::size_t i = 0; i < spec.cell_count(); ++i) {
        spec.center(i, x.data());
        const double* y = dm.point(ct.argmin[i]);
        double r = 0.0;
        for (int a = 0; a < spec.dim; ++a) r += (x[a] - y[a]) * (x[a] - y[a]);
        r = std::sqrt(r);
        for (int a = 0; a < spec.dim; ++a) {
            double v = x[a] - y[a];
            if (conv.p == 1.0) v = r < 1e-12 ? 0.0 : v / r;
            out.f[a][i] = v;
        }
    }
    return out;
}

// ---- experiments --------------------------------------------------------

void run_contract(const ExperimentConfig& cfg, Runner& run) {
    double h = cfg.num("h", 1.0 / 32);
    GridMeasure lambda = make_measure(cfg, "lambda", h);
    GridMeasure mu = make_measure(cfg, "mu", h);
    double p = cfg.num("p", 2.0);
    CostConvention conv = conv_from(cfg, p);
    std::vector<double> eps = cfg.list("eps");
    if (eps.empty()) throw ConfigError("contract: eps list required");
    std::string kernel = cfg.str("kernel", "uniform");

    Csv csv(run.artifact("contract.csv"),
            "p,eps,kernel,wp,wp_eps,delta,gap");
    for (double e : eps) {
        ContractionReport rep = delta_eps(lambda, mu, parse_kernel(kernel, e), conv);
        csv.out << rep.p << "," << rep.eps << "," << rep.kernel << "," << rep.wp
                << "," << rep.wp_eps << "," << rep.delta << "," << rep.gap_sum
                << "\n";
        run.check(rep.delta >= -(rep.gap_sum + 1e-12), "contraction-nonnegativity");
    }
}

void run_rigidity(const ExperimentConfig& cfg, Runner& run) {
    double h = cfg.num("h", 1.0 / 32);
    GridMeasure lambda = make_measure(cfg, "lambda", h);
    std::vector<double> z = cfg.list("shift");
    if (int(z.size()) != lambda.spec().dim)
        throw ConfigError("rigidity: shift dimension mismatch");
    GridMeasure mu = translate(lambda, z).measure;
    double p = cfg.num("p", 2.0);
    CostConvention conv = conv_from(cfg, p);
    double e = cfg.num("eps", 0.1);
    Kernel k = parse_kernel(cfg.str("kernel", "uniform"), e);

    ContractionReport rep = delta_eps(lambda, mu, k, conv);
    PipelineFields pf = solve_with_fields(lambda, mu, conv);

    Csv csv(run.artifact("rigidity.csv"),
            "p,eps,kernel,wp,wp_eps,delta,z,residual,gap");
    if (p > 1.0) {
        TranslationResult tr = recover_translation(pf.xi);
        std::ostringstream zs;
        zs.precision(12);
        for (std::size_t a = 0; a < tr.z.size(); ++a)
            zs << (a ? ";" : "") << tr.z[a];
        csv.out << rep.p << "," << rep.eps << "," << rep.kernel << "," << rep.wp
                << "," << rep.wp_eps << "," << rep.delta << "," << zs.str()
                << "," << tr.residual << "," << rep.gap_sum << "\n";
        run.check(tr.residual <= 1e-6, "translate-residual");
    } else {
        DirectionResult dr = recover_direction(pf.xi);
        std::ostringstream es;
        es.precision(12);
        for (std::size_t a = 0; a < dr.e.size(); ++a)
            es << (a ? ";" : "") << dr.e[a];
        csv.out << rep.p << "," << rep.eps << "," << rep.kernel << "," << rep.wp
                << "," << rep.wp_eps << "," << rep.delta << "," << es.str()
                << "," << dr.residual << "," << rep.gap_sum << "\n";
    }
    run.check(rep.delta <= 1e-6 + rep.gap_sum, "translate-delta");
}

void run_stability(const ExperimentConfig& cfg, Runner& run) {
    std::string mode = cfg.str("mode", "remark");
    if (mode == "remark") {
        std::vector<double> eps = cfg.list("eps");
        if (eps.empty()) eps = {0.05, 0.1, 0.2};
        Csv csv(run.artifact("stability.csv"), "eps,lhs,rhs");
        std::vector<double> ls, rs;
        for (double e : eps) {
            double h = e / cfg.num("cells_per_eps", 100.0);
            GridMeasure lambda = uniform_box({0.0}, {1.0}, h);
            GridMeasure mu = uniform_box({1.0}, {2.0}, h);
            GridSpec grid({0.0}, h, {int(std::round(2.0 / h))});
            ScalarField psi(grid, 0.0);
            std::vector<double> x(1);
            for (std::size_t i = 0; i < grid.cell_count(); ++i) {
                grid.center(i, x.data());
                psi[i] = x[0];
            }
            // the fold: -x left of eps, x - 2 eps right of it
            LipschitzFunction fold;
            fold.dim = 1;
            fold.apex = {e};
            fold.offset = {-e};
            ScalarField phi = fold.sample(grid);
            double w1 = wp_1d(lower_to_discrete(lambda), lower_to_discrete(mu),
                              CostConvention{1.0, true});
            double lhs = grad_l1_distance(psi, phi, lambda);
            double rhs = kantorovich_gap(psi, phi, lambda, mu, w1);
            csv.row({e, lhs, rhs});
            ls.push_back(lhs);
            rs.push_back(rhs);
            run.check(std::abs(lhs - 2.0 * e) <= 0.02 * 2.0 * e, "remark-lhs");
            run.check(std::abs(rhs - e * e) <= 0.02 * e * e, "remark-rhs");
        }
        // slope of log lhs vs log rhs across the family
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < ls.size(); ++i) {
            double lx = std::log(rs[i]), ly = std::log(ls[i]);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        double n = double(ls.size());
        double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        std::ofstream sum(run.artifact("stability_summary.csv"));
        sum.precision(12);
        sum << "slope\n" << slope << "\n";
        run.check(slope >= 0.45 && slope <= 0.55, "remark-slope");
    } else if (mode == "family") {
        double h = cfg.num("h", 1.0 / 64);
        GridMeasure lambda = make_measure(cfg, "lambda", h);
        GridMeasure mu = make_measure(cfg, "mu", h);
        StabilityReport rep = thm1_family_check(
            lambda, mu, std::uint64_t(cfg.integer("seed", 1)),
            int(cfg.integer("trials", 30)), cfg.num("alpha", 3.5));
        Csv csv(run.artifact("stability.csv"), "trial,lhs,rhs");
        for (std::size_t i = 0; i < rep.lhs.size(); ++i) {
            csv.row({double(i), rep.lhs[i], rep.rhs[i]});
            run.check(rep.rhs[i] >= -1e-8, "gap-nonnegativity");
        }
        std::ofstream sum(run.artifact("stability_summary.csv"));
        sum.precision(12);
        sum << "fitted_exponent,empirical_c_inv,window\n"
            << rep.fitted_exponent << "," << rep.empirical_c_inv << ","
            << rep.window_count << "\n";
    } else {
        throw ConfigError("stability: unknown mode " + mode);
    }
}

void run_tau(const ExperimentConfig& cfg, Runner& run) {
    double h = cfg.num("h", 1.0 / 64);
    GridMeasure lambda = make_measure(cfg, "lambda", h);
    std::vector<double> rs = cfg.list("r");
    if (rs.empty()) throw ConfigError("tau: r list required");
    double eta = cfg.num("eta", 0.1);
    double p = cfg.num("p", 2.0);
    Rng rng(std::uint64_t(cfg.integer("seed", 1)));

    Csv csv(run.artifact("tau.csv"), "r,tau,m0,nodes,pairs_used,kappa_geo,anchor_id");
    for (double r : rs) {
        for (int anchor = 0; anchor < 2; ++anchor) {
            std::vector<double> zb(lambda.spec().dim,
                                   anchor == 0 ? 0.0 : eta * r / 2.0);
            GridGraph g = build_grid_graph(lambda, r, eta, zb);
            run.check(g.connected, "graph-connected");
            ChainTable chains = build_chains(g, rng.fork(anchor + 1));
            TauResult t = tau(g, chains, p);
            double m = m0(g, lambda);
            run.check(std::isfinite(m), "m0-finite");
            csv.row({r, t.tau, m, double(g.size()), double(t.pairs_used),
                     t.kappa_geo, double(anchor)});
        }
    }
}

void run_density(const ExperimentConfig& cfg, Runner& run) {
    double h = cfg.num("h", 1.0 / 128);
    GridMeasure lambda = make_measure(cfg, "lambda", h);
    GridMeasure mu = make_measure(cfg, "mu", h);
    DiscreteMeasure dl = lower_to_discrete(lambda), dm = lower_to_discrete(mu);
    CostConvention conv{1.0, true};
    TransportSolution sol = solve(dl, dm, conv);

    // hull grid for the density
    const GridSpec& sa = lambda.spec();
    const GridSpec& sb = mu.spec();
    std::vector<double> lo(sa.dim), hi(sa.dim);
    for (int a = 0; a < sa.dim; ++a) {
        lo[a] = std::min(sa.origin[a], sb.origin[a]);
        hi[a] = std::max(sa.origin[a] + sa.dims[a] * sa.h,
                         sb.origin[a] + sb.dims[a] * sb.h);
    }
    GridMeasure hull = uniform_box(lo, hi, h);
    TransportDensity td = compute_sigma(sol, dl, dm, hull.spec());

    // grid file with a provenance comment line
    fs::path sigma_path = run.artifact("sigma.grid");
    td.sigma.save(sigma_path.string());
    {
        std::ifstream in(sigma_path);
        std::stringstream body;
        body << in.rdbuf();
        in.close();
        std::ofstream out(sigma_path);
        out << td.provenance << "\n" << body.str();
    }

    double plan_length = 0.0;
    for (const PlanArc& arc : sol.plan) {
        double d2 = 0.0;
        for (int a = 0; a < sa.dim; ++a) {
            double d = dl.point(arc.source)[a] - dm.point(arc.target)[a];
            d2 += d * d;
        }
        plan_length += arc.mass * std::sqrt(d2);
    }
    double mass_err = std::abs(td.sigma.total_mass() - plan_length) /
                      std::max(plan_length, 1e-300);
    run.check(mass_err <= 1e-6, "sigma-mass-identity");

    Csv csv(run.artifact("density.csv"),
            "sigma_mass,plan_length,mass_rel_err,max_cell_err,renyi,renyi_bound");
    double max_cell_err = 0.0;
    if (sa.dim == 1) {
        // sigma density equals |F_lambda - F_mu| in 1D
        std::vector<double> x(1);
        for (std::size_t i = 0; i < hull.size(); ++i) {
            hull.spec().center(i, x.data());
            double right = x[0] + 0.5 * h;
            auto cdf_until = [&](const GridMeasure& m, double t) {
                double acc = 0.0;
                for (std::size_t j = 0; j < m.size(); ++j)
                    if (m.spec().center(j)[0] <= t) acc += m.weight(j);
                return acc;
            };
            double expect = std::abs(cdf_until(lambda, right) - cdf_until(mu, right)) * h;
            max_cell_err = std::max(max_cell_err,
                                    std::abs(td.sigma.weight(i) - expect) / h);
        }
        run.check(max_cell_err <= 2.0 * h, "sigma-1d-ground-truth");
    }

    // Renyi against the explicit bound on the lambda support
    GridMeasure lam_on_hull = [&] {
        std::vector<double> w(hull.size(), 0.0);
        std::vector<double> x(sa.dim);
        for (std::size_t i = 0; i < lambda.size(); ++i) {
            lambda.spec().center(i, x.data());
            std::size_t cell = hull.spec().locate(x.data());
            if (cell != GridSpec::npos) w[cell] += lambda.weight(i);
        }
        return GridMeasure(hull.spec(), std::move(w));
    }();
    std::vector<std::uint8_t> in_support(hull.size(), 0);
    for (std::size_t i = 0; i < hull.size(); ++i)
        in_support[i] = lam_on_hull.weight(i) > 0 ? 1 : 0;
    Mask support(hull.spec(), std::move(in_support));
    double alpha = cfg.num("alpha", 1.25);
    double R = cfg.num("R", 2.0);
    double dens = 1.0 / (double(support.count()) * hull.spec().cell_volume());
    double dval = renyi(lam_on_hull, td, alpha);
    double dbound = renyi_bound(support, alpha, R, dens, dens);
    run.check(std::isfinite(dval) && dval <= dbound, "renyi-bound");

    csv.row({td.sigma.total_mass(), plan_length, mass_err, max_cell_err, dval,
             dbound});
}

void run_gaussian(const ExperimentConfig& cfg, Runner& run) {
    std::vector<double> kappas = cfg.list("kappa");
    std::vector<double> epss = cfg.list("eps");
    if (kappas.empty()) kappas = {0.5, 2.0};
    if (epss.empty()) epss = {0.01, 0.04};
    double R = cfg.num("R", 8.0), h = cfg.num("h", 5e-3);

    Csv csv(run.artifact("gaussian.csv"),
            "kappa,eps,delta_closed,delta_numeric,w2min,ratio_beta01,"
            "ratio_beta025,trunc_mass");
    for (double kappa : kappas)
        for (double e : epss) {
            StabGaussReport rep = stabgauss_experiment(kappa, e, R, h);
            csv.row({rep.kappa, rep.eps, rep.delta_closed, rep.delta_numeric,
                     rep.w2min_numeric, rep.ratio_beta01, rep.ratio_beta025,
                     rep.trunc_mass});
            run.check(std::abs(rep.delta_numeric - rep.delta_closed) <=
                          0.01 * std::abs(rep.delta_closed),
                      "gaussian-closed-form");
        }
}

void run_twopoint(const ExperimentConfig& cfg, Runner& run) {
    double h = cfg.num("h", 1.0 / 48);
    int trials = int(cfg.integer("trials", 10));
    double p = cfg.num("p", 2.0);
    double e = cfg.num("eps", 0.1);
    double r = cfg.num("r", e);
    double eta = cfg.num("eta", 0.1);
    Rng rng(std::uint64_t(cfg.integer("seed", 1)));
    Kernel k = parse_kernel(cfg.str("kernel", "uniform"), e);

    GridMeasure lambda = make_measure(cfg, "lambda", h);
    const GridSpec& spec = lambda.spec();

    Csv csv(run.artifact("twopoint.csv"), "trial,lhs,bound,ratio");
    for (int t = 0; t < trials; ++t) {
        Rng tr = rng.fork(t + 1);
        // smooth random vector field sampled as both xi and f
        std::vector<double> freq, amp, phase;
        for (int m = 0; m < 3 * spec.dim; ++m) {
            freq.push_back(std::floor(tr.uniform(1.0, 3.999)));
            amp.push_back(tr.uniform(-0.5, 0.5));
            phase.push_back(tr.uniform(0.0, 6.283185307179586));
        }
        auto field_at = [&](const double* x, int comp) {
            double v = 0.0;
            for (int m = 0; m < 3; ++m) {
                int idx = comp * 3 + m;
                double s = 0.0;
                for (int a = 0; a < spec.dim; ++a) s += x[a];
                v += amp[idx] *
                     std::sin(6.283185307179586 * freq[idx] * (s + x[comp % spec.dim]) +
                              phase[idx]);
            }
            return v;
        };
        std::vector<ScalarField> f(spec.dim, ScalarField(spec, 0.0));
        std::vector<double> x(spec.dim);
        for (std::size_t i = 0; i < spec.cell_count(); ++i) {
            spec.center(i, x.data());
            for (int a = 0; a < spec.dim; ++a) f[a][i] = field_at(x.data(), a);
        }
        DisplacementField xi;
        xi.dim = spec.dim;
        xi.p = p;
        for (std::size_t i = 0; i < lambda.size(); ++i) {
            if (lambda.weight(i) <= 0) continue;
            spec.center(i, x.data());
            xi.base.insert(xi.base.end(), x.begin(), x.end());
            xi.base_mass.push_back(lambda.weight(i));
            xi.defined.push_back(1);
            for (int a = 0; a < spec.dim; ++a) xi.xi.push_back(field_at(x.data(), a));
        }
        TwoPointResult res =
            two_point_check(lambda, xi, f, k, r, eta, p, rng.fork(1000 + t));
        csv.row({double(t), res.lhs, res.bound, res.ratio});
        run.check(res.ratio <= 1e2, "two-point-ratio");
    }
}

} // namespace

int run_experiment(const std::string& config_path) {
    ExperimentConfig cfg;
    try {
        cfg = ExperimentConfig::load(config_path);
    } catch (const ConfigError& e) {
        std::cout << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cout << "io error: " << e.what() << "\n";
        return 3;
    }

    Runner run;
    try {
        run.outdir = cfg.str("output", "out");
        fs::create_directories(run.outdir);
    } catch (const std::exception& e) {
        std::cout << "io error: " << e.what() << "\n";
        return 3;
    }

    std::string name = cfg.str("experiment");
    try {
        if (name == "contract") run_contract(cfg, run);
        else if (name == "rigidity") run_rigidity(cfg, run);
        else if (name == "stability") run_stability(cfg, run);
        else if (name == "tau") run_tau(cfg, run);
        else if (name == "density") run_density(cfg, run);
        else if (name == "gaussian") run_gaussian(cfg, run);
        else if (name == "twopoint") run_twopoint(cfg, run);
        else {
            std::cout << "unknown experiment: " << (name.empty() ? "(none)" : name)
                      << "\n";
            return 2;
        }
    } catch (const ConfigError& e) {
        std::cout << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::ios_base::failure& e) {
        std::cout << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cout << "FAIL " << e.what() << "\n";
        return 1;
    }

    try {
        std::ofstream manifest(run.outdir / "MANIFEST");
        manifest << "config-hash " << std::hex << cfg.hash() << std::dec << "\n";
        for (const std::string& a : run.artifacts) manifest << a << "\n";
    } catch (const std::exception& e) {
        std::cout << "io error: " << e.what() << "\n";
        return 3;
    }

    if (!run.failures.empty()) {
        for (const std::string& f : run.failures) std::cout << "FAIL " << f << "\n";
        return 1;
    }
    return 0;
}

int plot_csv(const std::string& csv_path, const std::string& xcol,
             const std::string& ycol, const std::string& out_path,
             bool log_axes) {
    std::ifstream in(csv_path);
    if (!in) {
        std::cout << "io error: cannot open " << csv_path << "\n";
        return 3;
    }
    std::string header;
    if (!std::getline(in, header)) header = "";
    std::vector<std::string> cols;
    {
        std::stringstream ss(header);
        std::string item;
        while (std::getline(ss, item, ',')) cols.push_back(trim(item));
    }
    auto find_col = [&](const std::string& name) {
        for (std::size_t i = 0; i < cols.size(); ++i)
            if (cols[i] == name) return int(i);
        return -1;
    };
    int xi = find_col(xcol), yi = find_col(ycol);
    if (xi < 0 || yi < 0) {
        std::cout << "missing column: " << (xi < 0 ? xcol : ycol) << "\n";
        return 2;
    }

    std::vector<double> xs, ys;
    std::string line;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string item;
        std::vector<std::string> fields;
        while (std::getline(ss, item, ',')) fields.push_back(item);
        if (int(fields.size()) <= std::max(xi, yi)) continue;
        try {
            double x = std::stod(fields[xi]), y = std::stod(fields[yi]);
            if (log_axes && (x <= 0 || y <= 0)) continue;
            xs.push_back(log_axes ? std::log10(x) : x);
            ys.push_back(log_axes ? std::log10(y) : y);
        } catch (...) {
            continue;
        }
    }

    std::ofstream out(out_path);
    if (!out) {
        std::cout << "io error: cannot open " << out_path << "\n";
        return 3;
    }
    out.precision(8);
    const double W = 640, H = 480, ml = 60, mr = 20, mt = 20, mb = 40;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
        << "\" height=\"" << H << "\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H
        << "\" fill=\"white\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
        << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
        << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
    if (xs.empty()) {
        std::cout << "warning: no plottable rows\n";
        out << "</svg>\n";
        return 0;
    }
    double x0 = *std::min_element(xs.begin(), xs.end());
    double x1 = *std::max_element(xs.begin(), xs.end());
    double y0 = *std::min_element(ys.begin(), ys.end());
    double y1 = *std::max_element(ys.begin(), ys.end());
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
    auto py = [&](double y) {
        return H - mb - (y - y0) / (y1 - y0) * (H - mt - mb);
    };
    out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i)
        out << px(xs[i]) << "," << py(ys[i]) << " ";
    out << "\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"" << H - 8
        << "\" text-anchor=\"middle\" font-size=\"14\">" << xcol
        << (log_axes ? " (log10)" : "") << "</text>\n";
    out << "<text x=\"16\" y=\"" << H / 2
        << "\" font-size=\"14\" transform=\"rotate(-90 16 " << H / 2 << ")\">"
        << ycol << (log_axes ? " (log10)" : "") << "</text>\n";
    if (log_axes && xs.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0, n = double(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
        }
        double denom = n * sxx - sx * sx;
        if (denom > 0) {
            double slope = (n * sxy - sx * sy) / denom;
            out << "<text x=\"" << W - mr - 10 << "\" y=\"" << mt + 16
                << "\" text-anchor=\"end\" font-size=\"13\">slope " << slope
                << "</text>\n";
        }
    }
    out << "</svg>\n";
    return 0;
}

int selftest() {
    int failures = 0;
    auto check = [&](bool ok, const std::string& name) {
        std::cout << (ok ? "ok   " : "FAIL ") << name << "\n";
        if (!ok) ++failures;
    };

    // exact 1D anchors
    {
        DiscreteMeasure a(1, {0.0}, {1.0}), b(1, {1.0}, {1.0});
        check(std::abs(wp_1d(a, b, {2.0, true}) - 0.5) < 1e-15 &&
                  std::abs(wp_1d(a, b, {2.0, false}) - 1.0) < 1e-15,
              "quantile dirac costs");
    }
    // simplex agrees with the quantile solver
    {
        Rng rng(11);
        bool ok = true;
        for (int t = 0; t < 3 && ok; ++t) {
            std::vector<double> xa, xb, wa, wb;
            for (int i = 0; i < 12; ++i) {
                xa.push_back(rng.uniform(-1, 1));
                xb.push_back(rng.uniform(-1, 1));
                wa.push_back(rng.uniform(0.1, 1));
                wb.push_back(rng.uniform(0.1, 1));
            }
            DiscreteMeasure a =
                DiscreteMeasure(1, std::move(xa), std::move(wa)).normalized();
            DiscreteMeasure b =
                DiscreteMeasure(1, std::move(xb), std::move(wb)).normalized();
            CostConvention conv{t == 2 ? 1.0 : 2.0, true};
            ok = std::abs(wp_1d(a, b, conv) - solve_discrete(a, b, conv).cost) <
                 1e-9;
        }
        check(ok, "simplex matches 1D quantile oracle");
    }
    // contraction and translate rigidity
    {
        GridMeasure lambda = bump_measure(2, 5, 3, 1.0 / 16);
        GridMeasure mu = translate(lambda, {3.0 / 16, -2.0 / 16}).measure;
        ContractionReport rep = delta_eps(
            lambda, mu, Kernel{KernelProfile::UniformBall, 0.12}, {2.0, true});
        check(rep.delta >= -(rep.gap_sum + 1e-12), "contraction nonnegativity");
        check(std::abs(rep.delta) <= 1e-6 + rep.gap_sum, "translate deficit zero");
    }
    // 1D sigma ground truth on disjoint intervals
    {
        double h = 1.0 / 128;
        GridMeasure lambda = uniform_box({0.0}, {1.0}, h);
        GridMeasure mu = uniform_box({1.5}, {2.5}, h);
        DiscreteMeasure dl = lower_to_discrete(lambda), dm = lower_to_discrete(mu);
        TransportSolution sol = solve(dl, dm, {1.0, true});
        GridMeasure hull = uniform_box({0.0}, {2.5}, h);
        TransportDensity td = compute_sigma(sol, dl, dm, hull.spec());
        double mass_err = std::abs(td.sigma.total_mass() - sol.cost);
        check(mass_err <= 1e-6 * sol.cost, "sigma mass identity");
        check(support_inclusion(lambda, td) == 0.0, "sigma covers lambda support");
    }
    // explicit-constant sigma stability on the fold configuration
    {
        double e = 0.1, h = e / 200;
        GridMeasure lambda = uniform_box({0.0}, {1.0}, h);
        GridMeasure mu = uniform_box({1.0}, {2.0}, h);
        DiscreteMeasure dl = lower_to_discrete(lambda), dm = lower_to_discrete(mu);
        TransportSolution sol = solve(dl, dm, {1.0, true});
        GridSpec grid({0.0}, h, {int(std::round(2.0 / h))});
        TransportDensity td = compute_sigma(sol, dl, dm, grid);
        ScalarField psi(grid, 0.0);
        std::vector<double> x(1);
        for (std::size_t i = 0; i < grid.cell_count(); ++i) {
            grid.center(i, x.data());
            psi[i] = x[0];
        }
        LipschitzFunction fold;
        fold.dim = 1;
        fold.apex = {e};
        fold.offset = {-e};
        StabSigmaResult res =
            stab_sigma_check(psi, fold.sample(grid), td, lambda, mu);
        check(res.slack >= -1e-6, "stab-sigma slack");
        check(std::abs(res.lhs - 2 * e * e) <= 0.01 * 2 * e * e &&
                  std::abs(res.rhs - 2 * e * e) <= 0.01 * 2 * e * e,
              "stab-sigma fold equality");
    }
    // Renyi bound arithmetic anchor
    {
        GridSpec grid({0.0}, 1.0 / 512, {512});
        Mask mask(grid, std::vector<std::uint8_t>(512, 1));
        double bound = renyi_bound(mask, 1.25, 2.0, 1.0, 1.0);
        double exact = 4.0 * std::log(2.0 + std::sqrt(5.0) * 2.0 * std::sqrt(2.0));
        check(std::abs(bound - exact) < 0.02 * exact, "Renyi bound anchor");
    }
    // Gaussian identity
    {
        GaussianDeficit g = delta_eps_gaussian_closed_form(2.0, 0.04, 1);
        check(std::abs(g.f - 0.16387) < 1e-4, "gaussian deficit value");
    }
    return failures == 0 ? 0 : 1;
}

} // namespace otlab
