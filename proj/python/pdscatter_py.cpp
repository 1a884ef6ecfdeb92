#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pdscatter/asymptotics.hpp"
#include "pdscatter/depth.hpp"
#include "pdscatter/errors.hpp"
#include "pdscatter/estimators.hpp"
#include "pdscatter/maxbias.hpp"
#include "pdscatter/simlab.hpp"
#include "pdscatter/univariate.hpp"
#include "pdscatter/weights.hpp"

namespace py = pybind11;
using namespace pdscatter;

namespace {

WeightSpec w1_default() { return WeightSpec{1, 0.3229, 2.0}; }
WeightSpec w2_default() { return WeightSpec{2, 0.3229, 2.0}; }

DepthMethod method_or_default(const std::optional<DepthMethod>& method, int d) {
  return method ? *method : default_method(d);
}

}  // namespace

PYBIND11_MODULE(pdscatter, m) {
  m.doc() = "Projection-depth-weighted location and scatter estimation";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto domain = py::register_exception<DomainError>(m, "DomainError", error.ptr());
  py::register_exception<ContaminationError>(m, "ContaminationError", domain.ptr());
  py::register_exception<PreconditionError>(m, "PreconditionError", domain.ptr());
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<DegenerateWeightsError>(m, "DegenerateWeightsError", error.ptr());
  py::register_exception<NumericError>(m, "NumericError", error.ptr());

  py::enum_<WeightForm>(m, "WeightForm")
      .value("QuadraticBase", WeightForm::QuadraticBase)
      .value("PowerBase", WeightForm::PowerBase);

  py::class_<WeightSpec>(m, "WeightSpec")
      .def(py::init([](int order, double cutoff, double steepness, WeightForm form) {
             WeightSpec w{order, cutoff, steepness, form};
             validate(w);
             return w;
           }),
           py::arg("order") = 2, py::arg("cutoff") = 0.3229, py::arg("steepness") = 2.0,
           py::arg("form") = WeightForm::QuadraticBase)
      .def_readwrite("order", &WeightSpec::order)
      .def_readwrite("cutoff", &WeightSpec::cutoff)
      .def_readwrite("steepness", &WeightSpec::steepness)
      .def_readwrite("form", &WeightSpec::form)
      .def("__call__", [](const WeightSpec& w, double r) { return weight_eval(w, r); })
      .def("deriv", [](const WeightSpec& w, double r) { return weight_deriv(w, r); })
      .def("__repr__", [](const WeightSpec& w) {
        return "WeightSpec(order=" + std::to_string(w.order) + ", cutoff=" + std::to_string(w.cutoff) +
               ", steepness=" + std::to_string(w.steepness) + ")";
      });

  m.def("mad_matched_cutoff", &mad_matched_cutoff, py::arg("d"));
  m.def("xi_cutoff", &xi_cutoff, py::arg("d"), py::arg("xi"));

  m.def(
      "med_k", [](std::vector<double> xs, int k) { return med_k(xs, k); }, py::arg("xs"), py::arg("k") = 1);
  m.def(
      "mad_k", [](std::vector<double> xs, int k) { return mad_k(xs, k); }, py::arg("xs"), py::arg("k") = 1);

  py::class_<Exact1D>(m, "Exact1D").def(py::init<>());
  py::class_<Candidate2D>(m, "Candidate2D")
      .def(py::init([](bool refine) { return Candidate2D{refine}; }), py::arg("refine") = true)
      .def_readwrite("refine", &Candidate2D::refine);
  py::class_<Sampled>(m, "Sampled")
      .def(py::init([](int count, int refine_steps, std::uint64_t seed) {
             return Sampled{count, refine_steps, seed};
           }),
           py::arg("count") = 1000, py::arg("refine_steps") = 20, py::arg("seed") = 1)
      .def_readwrite("count", &Sampled::count)
      .def_readwrite("refine_steps", &Sampled::refine_steps)
      .def_readwrite("seed", &Sampled::seed);

  m.def(
      "projection_depths",
      [](const Eigen::MatrixXd& data, int k, std::optional<DepthMethod> method,
         std::optional<Eigen::MatrixXd> points) {
        const DataMatrix dm(data);
        const DepthMethod meth = method_or_default(method, dm.d());
        return points ? projection_depths(*points, dm, k, meth) : projection_depths(dm, k, meth);
      },
      py::arg("data"), py::arg("k") = 1, py::arg("method") = py::none(), py::arg("points") = py::none(),
      "Projection depth of each query point (default: each data row) with respect to the data rows.");

  m.def(
      "outlyingness",
      [](const Eigen::VectorXd& x, const Eigen::MatrixXd& data, int k, std::optional<DepthMethod> method) {
        const DataMatrix dm(data);
        const auto r = outlyingness_empirical(x, dm, k, method_or_default(method, dm.d()));
        return py::make_tuple(r.value, r.direction);
      },
      py::arg("x"), py::arg("data"), py::arg("k") = 1, py::arg("method") = py::none(),
      "Supremum of |u'x - Med(u'X)| / MAD_k(u'X) and the maximizing direction.");

  py::class_<ScatterEstimate>(m, "ScatterEstimate")
      .def_readonly("location", &ScatterEstimate::location)
      .def_readonly("scatter", &ScatterEstimate::scatter)
      .def_readonly("depths", &ScatterEstimate::depths)
      .def_readonly("weights1", &ScatterEstimate::weights1)
      .def_readonly("weights2", &ScatterEstimate::weights2);

  m.def(
      "pws_fit",
      [](const Eigen::MatrixXd& data, int k, std::optional<DepthMethod> method, std::optional<WeightSpec> w1,
         std::optional<WeightSpec> w2) {
        const DataMatrix dm(data);
        return pws_fit(dm, k, method_or_default(method, dm.d()), w1.value_or(w1_default()),
                       w2.value_or(w2_default()));
      },
      py::arg("data"), py::arg("k") = 1, py::arg("method") = py::none(), py::arg("w1") = py::none(),
      py::arg("w2") = py::none(), "Depth-weighted location and scatter of the data rows.");

  m.def("phi0", &phi0, py::arg("t"));
  m.def("log_phi0", &log_phi0, py::arg("t"));
  m.def(
      "sample_covariance", [](const Eigen::MatrixXd& data) { return sample_covariance(DataMatrix(data)); },
      py::arg("data"));

  py::class_<AsymptoticConstants>(m, "AsymptoticConstants")
      .def_readonly("d", &AsymptoticConstants::d)
      .def_readonly("c0", &AsymptoticConstants::c0)
      .def_readonly("c1", &AsymptoticConstants::c1)
      .def_readonly("c2", &AsymptoticConstants::c2)
      .def_readonly("c3", &AsymptoticConstants::c3)
      .def_readonly("sigma1", &AsymptoticConstants::sigma1)
      .def_readonly("sigma2", &AsymptoticConstants::sigma2)
      .def_readonly("m0", &AsymptoticConstants::m0);

  m.def(
      "asymptotic_constants", [](int d, const WeightSpec& w2) { return asymptotic_constants(d, w2); },
      py::arg("d"), py::arg("w2") = w2_default());
  m.def(
      "are_shape", [](int d, const WeightSpec& w2, double kappa) { return are_shape(d, w2, kappa); },
      py::arg("d"), py::arg("w2") = w2_default(), py::arg("kappa") = 0.0);
  m.def(
      "g2_index", [](int d, const WeightSpec& w2) { return g2_index(d, w2); }, py::arg("d"),
      py::arg("w2") = w2_default());
  m.def(
      "t_funcs",
      [](double r, const AsymptoticConstants& c) {
        const auto t = t_funcs(r, c);
        return py::make_tuple(t.t1, t.t2);
      },
      py::arg("r"), py::arg("constants"));
  m.def("centering_residual", &centering_residual, py::arg("constants"));

  m.def(
      "bias_coeffs",
      [](double r, double eps, int d, const WeightSpec& w1, const WeightSpec& w2) {
        const auto b = bias_coeffs(r, eps, d, w1, w2);
        return py::make_tuple(b.b1, b.b2);
      },
      py::arg("r"), py::arg("eps"), py::arg("d") = 2, py::arg("w1") = w1_default(), py::arg("w2") = w2_default());
  m.def(
      "mbi",
      [](double eps, int d, const WeightSpec& w1, const WeightSpec& w2, int grid) {
        return mbi(eps, EllipticalModel::standard(d), w1, w2, grid);
      },
      py::arg("eps"), py::arg("d") = 2, py::arg("w1") = w1_default(), py::arg("w2") = w2_default(),
      py::arg("grid") = 48, "Maximum-bias index at the standard normal model.");
  m.def(
      "mad_maxbias", [](double eps) { return mad_maxbias(eps, standard_normal_law()); }, py::arg("eps"));

  py::enum_<ContaminationShape>(m, "ContaminationShape")
      .value("PointMass", ContaminationShape::PointMass)
      .value("Shifted", ContaminationShape::Shifted);

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("n", &SimConfig::n)
      .def_readwrite("d", &SimConfig::d)
      .def_readwrite("eps", &SimConfig::eps)
      .def_readwrite("outlier", &SimConfig::outlier)
      .def_readwrite("replicates", &SimConfig::replicates)
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("k", &SimConfig::k)
      .def_readwrite("method", &SimConfig::method)
      .def_readwrite("w1", &SimConfig::w1)
      .def_readwrite("w2", &SimConfig::w2)
      .def_readwrite("fixed_count", &SimConfig::fixed_count)
      .def_readwrite("shape", &SimConfig::shape);

  py::class_<SimReport>(m, "SimReport")
      .def_readonly("lrt_pws", &SimReport::lrt_pws)
      .def_readonly("lrt_cov", &SimReport::lrt_cov)
      .def_readonly("llrt_pws", &SimReport::llrt_pws)
      .def_readonly("llrt_cov", &SimReport::llrt_cov)
      .def_readonly("re", &SimReport::re)
      .def_readonly("replicate_count", &SimReport::replicate_count)
      .def_readonly("phi0_pws", &SimReport::phi0_pws)
      .def_readonly("phi0_cov", &SimReport::phi0_cov)
      .def_readonly("warnings", &SimReport::warnings);

  m.def("sample_contaminated",
        [](const SimConfig& c, int index) { return sample_contaminated(c, index).rows(); },
        py::arg("config"), py::arg("replicate_index"));
  m.def("table3_run", &table3_run, py::arg("config"), py::call_guard<py::gil_scoped_release>());

  m.def(
      "rbp_theoretical",
      [](int n, int d, int k) {
        const auto f = rbp_theoretical(n, d, k);
        return py::make_tuple(f.num, f.den);
      },
      py::arg("n"), py::arg("d"), py::arg("k") = 1);
  m.def(
      "rbp_probe",
      [](const Eigen::MatrixXd& data, int k, std::optional<DepthMethod> method, std::optional<WeightSpec> w1,
         std::optional<WeightSpec> w2) {
        const DataMatrix dm(data);
        const auto r = rbp_probe(dm, k, method_or_default(method, dm.d()), w1.value_or(w1_default()),
                                 w2.value_or(w2_default()));
        py::object family = r.family ? py::str(adversary_name(*r.family)) : py::object(py::none());
        return py::make_tuple(py::make_tuple(r.empirical.num, r.empirical.den), family, r.log);
      },
      py::arg("data"), py::arg("k") = 1, py::arg("method") = py::none(), py::arg("w1") = py::none(),
      py::arg("w2") = py::none());
}
