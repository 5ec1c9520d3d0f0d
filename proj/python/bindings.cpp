#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "otlab/contraction.hpp"
#include "otlab/experiments.hpp"
#include "otlab/gaussian.hpp"
#include "otlab/measures.hpp"
#include "otlab/ot.hpp"
#include "otlab/transport_density.hpp"

namespace py = pybind11;
using namespace otlab;

PYBIND11_MODULE(_otlab, m) {
    m.doc() = "numerical laboratory for Wasserstein contraction under convolution";

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init<std::vector<double>, double, std::vector<int>>(),
             py::arg("origin"), py::arg("h"), py::arg("dims"))
        .def_readonly("dim", &GridSpec::dim)
        .def_readonly("origin", &GridSpec::origin)
        .def_readonly("h", &GridSpec::h)
        .def_readonly("dims", &GridSpec::dims)
        .def("cell_count", &GridSpec::cell_count)
        .def("center",
             [](const GridSpec& s, std::size_t i) { return s.center(i); });

    py::class_<GridMeasure>(m, "GridMeasure")
        .def(py::init<GridSpec, std::vector<double>>(), py::arg("spec"),
             py::arg("weights"))
        .def_property_readonly("spec", &GridMeasure::spec)
        .def_property_readonly("weights", &GridMeasure::weights)
        .def("total_mass", &GridMeasure::total_mass)
        .def("mean", &GridMeasure::mean)
        .def("normalized", &GridMeasure::normalized)
        .def("save", &GridMeasure::save)
        .def_static("load", &GridMeasure::load);

    py::class_<DiscreteMeasure>(m, "DiscreteMeasure")
        .def(py::init<int, std::vector<double>, std::vector<double>>(),
             py::arg("dim"), py::arg("points"), py::arg("weights"))
        .def_property_readonly("points", &DiscreteMeasure::points)
        .def_property_readonly("weights", &DiscreteMeasure::weights)
        .def("total_mass", &DiscreteMeasure::total_mass)
        .def("mean", &DiscreteMeasure::mean)
        .def("normalized", &DiscreteMeasure::normalized);

    m.def("lower_to_discrete", &lower_to_discrete, py::arg("measure"),
          py::arg("cutoff") = 0.0);

    py::class_<CostConvention>(m, "CostConvention")
        .def(py::init([](double p, bool p_normalized) {
                 return CostConvention{p, p_normalized};
             }),
             py::arg("p") = 2.0, py::arg("p_normalized") = true)
        .def_readwrite("p", &CostConvention::p)
        .def_readwrite("p_normalized", &CostConvention::p_normalized)
        .def("name", &CostConvention::name);

    py::class_<Kernel>(m, "Kernel")
        .def(py::init([](const std::string& name, double eps) {
                 return parse_kernel(name, eps);
             }),
             py::arg("name"), py::arg("eps"))
        .def_readwrite("eps", &Kernel::eps)
        .def("name", &Kernel::name)
        .def("support_radius", &Kernel::support_radius);

    py::class_<PlanArc>(m, "PlanArc")
        .def_readonly("source", &PlanArc::source)
        .def_readonly("target", &PlanArc::target)
        .def_readonly("mass", &PlanArc::mass);

    py::class_<TransportSolution>(m, "TransportSolution")
        .def_readonly("plan", &TransportSolution::plan)
        .def_readonly("cost", &TransportSolution::cost)
        .def_readonly("psi", &TransportSolution::psi)
        .def_readonly("psic", &TransportSolution::psic)
        .def_readonly("duality_gap", &TransportSolution::duality_gap)
        .def("save", &TransportSolution::save)
        .def_static("load", &TransportSolution::load);

    m.def("wp_1d", &wp_1d, py::arg("a"), py::arg("b"), py::arg("convention"));
    m.def("solve", &solve, py::arg("lmbda"), py::arg("mu"), py::arg("convention"),
          py::arg("pair_budget") = std::size_t(40000000));

    m.def("convolve", &convolve, py::arg("measure"), py::arg("kernel"),
          py::arg("cell_budget") = GridSpec::kDefaultCellBudget);

    py::class_<ContractionReport>(m, "ContractionReport")
        .def_readonly("p", &ContractionReport::p)
        .def_readonly("kernel", &ContractionReport::kernel)
        .def_readonly("eps", &ContractionReport::eps)
        .def_readonly("wp", &ContractionReport::wp)
        .def_readonly("wp_eps", &ContractionReport::wp_eps)
        .def_readonly("delta", &ContractionReport::delta)
        .def_readonly("gap_sum", &ContractionReport::gap_sum);

    m.def("delta_eps", &delta_eps, py::arg("lmbda"), py::arg("mu"),
          py::arg("kernel"), py::arg("convention"),
          py::arg("pair_budget") = std::size_t(40000000));

    m.def(
        "recover_translation",
        [](const GridMeasure& lambda, const GridMeasure& mu,
           const CostConvention& conv) {
            DiscreteMeasure dl = lower_to_discrete(lambda);
            DiscreteMeasure dm = lower_to_discrete(mu);
            TransportSolution sol = solve(dl, dm, conv);
            CTransformField ct = c_transform(sol.psi, dm, lambda.spec(), conv);
            TranslationResult tr =
                recover_translation(gradient_field(ct, dm, lambda, conv));
            return py::make_tuple(tr.z, tr.residual);
        },
        py::arg("lmbda"), py::arg("mu"), py::arg("convention"),
        "returns (z, residual): lambda-mean displacement and its p-moment");

    py::class_<GaussianDeficit>(m, "GaussianDeficit")
        .def_readonly("delta", &GaussianDeficit::delta)
        .def_readonly("f", &GaussianDeficit::f);
    m.def("delta_eps_gaussian_closed_form", &delta_eps_gaussian_closed_form,
          py::arg("kappa"), py::arg("eps"), py::arg("n"));

    py::class_<StabGaussReport>(m, "StabGaussReport")
        .def_readonly("kappa", &StabGaussReport::kappa)
        .def_readonly("eps", &StabGaussReport::eps)
        .def_readonly("delta_closed", &StabGaussReport::delta_closed)
        .def_readonly("delta_numeric", &StabGaussReport::delta_numeric)
        .def_readonly("w2min_numeric", &StabGaussReport::w2min_numeric)
        .def_readonly("trunc_mass", &StabGaussReport::trunc_mass);
    m.def("stabgauss_experiment", &stabgauss_experiment, py::arg("kappa"),
          py::arg("eps"), py::arg("R"), py::arg("h"));

    m.def("run_experiment", &run_experiment, py::arg("config_path"));
    m.def("selftest", &selftest);
    m.def("plot_csv", &plot_csv, py::arg("csv_path"), py::arg("xcol"),
          py::arg("ycol"), py::arg("out_path"), py::arg("log_axes") = false);
}
