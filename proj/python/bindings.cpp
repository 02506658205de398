#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "eefluct/commands.hpp"
#include "eefluct/config.hpp"
#include "eefluct/disorder.hpp"
#include "eefluct/ensemble.hpp"
#include "eefluct/error.hpp"
#include "eefluct/lyapunov.hpp"
#include "eefluct/spectral.hpp"
#include "eefluct/statistics.hpp"
#include "eefluct/version.hpp"

namespace py = pybind11;
using namespace eefluct;

namespace {

py::dict stats_dict(const EnsembleStats& s) {
  py::dict d;
  d["n_realizations"] = s.n_realizations;
  d["mean"] = s.mean;
  d["variance"] = s.variance;
  d["coeff_variation"] = s.coeff_variation;
  d["stderr_mean"] = s.stderr_mean;
  d["stderr_cv"] = s.stderr_cv;
  d["stderr_variance"] = s.stderr_variance;
  d["degenerate"] = s.degenerate;
  return d;
}

ChainConfig chain(std::size_t n_sites, std::size_t block_len, double fermi_energy,
                  std::optional<std::size_t> block_start) {
  ChainConfig cfg = ChainConfig::centered(n_sites, block_len, fermi_energy);
  if (block_start) cfg.block.start = *block_start;
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(eefluct, m) {
  m.doc() = "Disorder-ensemble statistics of block entanglement entropy in the 1D Anderson model";
  m.attr("__version__") = std::string(version_string());

  static py::exception<Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object value = py::handle(error.ptr())(e.what());
      value.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error.ptr(), value.ptr());
    }
  });

  py::enum_<Family>(m, "Family")
      .value("UNIFORM", Family::Uniform)
      .value("EXPONENTIAL", Family::Exponential)
      .value("HALF_CAUCHY", Family::HalfCauchy);

  py::class_<DisorderSpec>(m, "DisorderSpec")
      .def(py::init<Family, double>(), py::arg("family"), py::arg("delta"))
      .def(py::init([](const std::string& family, double delta) {
             return DisorderSpec(parse_family(family), delta);
           }),
           py::arg("family"), py::arg("delta"))
      .def_property_readonly("family", &DisorderSpec::family)
      .def_property_readonly("delta", &DisorderSpec::delta)
      .def("__eq__", [](const DisorderSpec& a, const DisorderSpec& b) { return a == b; })
      .def("__repr__", [](const DisorderSpec& s) {
        std::ostringstream os;
        os << "DisorderSpec('" << family_name(s.family()) << "', " << s.delta() << ")";
        return os.str();
      });

  m.def("pdf", &pdf, py::arg("spec"), py::arg("v"));
  m.def("survival", &survival, py::arg("spec"), py::arg("v"));
  m.def("quantile", &quantile, py::arg("spec"), py::arg("u"));
  m.def("sample_potential",
        [](const PotentialLaw& law, std::size_t n, std::uint64_t seed) {
          Rng rng(seed);
          return sample_potential(law, n, rng);
        },
        py::arg("law"), py::arg("n"), py::arg("seed"),
        "n on-site values; law=None gives the clean chain.");
  m.def("fractional_moment", &fractional_moment, py::arg("spec"), py::arg("kappa"));
  m.def("fisher_gap", [](const DisorderSpec& s, double t) { return fisher_gap(s, t).value; },
        py::arg("spec"), py::arg("t"), "F(t) from its closed form.");
  m.def("fisher_gap_quadrature",
        [](const DisorderSpec& s, double t) { return fisher_gap_quadrature(s, t).value; },
        py::arg("spec"), py::arg("t"));
  m.def("jensen_floor", &jensen_floor, py::arg("spec"), py::arg("t"));
  m.def("hcr_bound",
        [](double mean, double mean_shifted, double gap) {
          return hcr_bound(mean, mean_shifted, {0.0, gap, GapMethod::ClosedForm}).value;
        },
        py::arg("mean_phi"), py::arg("mean_phi_shifted"), py::arg("gap"));
  m.def("scalar_hcr_check",
        [](const DisorderSpec& s, double t, std::size_t n_draws, std::uint64_t seed) {
          const auto c = scalar_hcr_check(s, t, n_draws, seed);
          py::dict d;
          d["n_draws"] = c.n_draws;
          d["t"] = c.t;
          d["gap"] = c.gap;
          d["mean_phi"] = c.mean_phi;
          d["mean_phi_shifted"] = c.mean_phi_shifted;
          d["bound"] = c.bound;
          d["variance"] = c.variance;
          d["variance_stderr"] = c.variance_stderr;
          d["exact_bound"] = c.exact_bound;
          d["exact_variance"] = c.exact_variance;
          d["margin_sigmas"] = c.margin_sigmas;
          return d;
        },
        py::arg("spec"), py::arg("t") = 1.0, py::arg("n_draws") = 1'000'000, py::arg("seed") = 1);

  m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("index"));

  m.def("eigendecompose",
        [](const std::vector<double>& potential, std::optional<double> vectors_below) {
          const auto eig = eigendecompose(build_operator(potential), vectors_below);
          return py::make_tuple(eig.values, eig.vectors);
        },
        py::arg("potential"), py::arg("vectors_below") = py::none(),
        "Eigenvalues (ascending) and eigenvectors (columns) of -Laplacian + V.");
  m.def("fermi_projection",
        [](const std::vector<double>& potential, double fermi_energy) {
          return fermi_projection(eigendecompose(build_operator(potential), fermi_energy), fermi_energy)
              .matrix;
        },
        py::arg("potential"), py::arg("fermi_energy"));
  m.def("occupation_spectrum",
        [](const std::vector<double>& potential, double fermi_energy,
           const std::vector<std::size_t>& sites) {
          const auto eig = eigendecompose(build_operator(potential), fermi_energy);
          return occupation_spectrum(eig, fermi_energy, sites).values;
        },
        py::arg("potential"), py::arg("fermi_energy"), py::arg("sites"));
  m.def("renyi_entropy",
        [](std::vector<double> occupations, double alpha) {
          return renyi_entropy(OccupationSpectrum{std::move(occupations)}, alpha);
        },
        py::arg("occupations"), py::arg("alpha") = 1.0);
  m.def("block_entropy",
        [](const std::vector<double>& potential, std::size_t block_len, double fermi_energy,
           double alpha, std::optional<std::size_t> block_start, double shift_t) {
          ChainConfig cfg = chain(potential.size(), block_len, fermi_energy, block_start);
          cfg.shift_t = shift_t;
          return block_entropy(potential, cfg, alpha);
        },
        py::arg("potential"), py::arg("block_len"), py::arg("fermi_energy") = 1.0,
        py::arg("alpha") = 1.0, py::arg("block_start") = py::none(), py::arg("shift_t") = 0.0);

  m.def("lyapunov_exponent",
        [](const PotentialLaw& law, double energy, std::int64_t n_steps, int n_batches,
           std::uint64_t seed) {
          LyapunovOptions o;
          o.n_steps = n_steps;
          o.n_batches = n_batches;
          Rng rng(seed);
          LyapunovResult r;
          {
            py::gil_scoped_release release;
            r = lyapunov_exponent(law, energy, o, rng);
          }
          py::dict d;
          d["energy"] = r.energy;
          d["gamma"] = r.gamma;
          d["radius"] = r.radius;
          d["std_error"] = r.std_error;
          d["n_steps"] = r.n_steps;
          return d;
        },
        py::arg("law"), py::arg("energy") = 1.0, py::arg("n_steps") = 1'000'000,
        py::arg("n_batches") = 100, py::arg("seed") = 1);

  m.def("run_ensemble",
        [](const PotentialLaw& law, std::size_t n_sites, std::size_t block_len, double fermi_energy,
           double alpha, std::size_t n_realizations, std::uint64_t seed, int workers,
           double shift_t) {
          ChainConfig cfg = chain(n_sites, block_len, fermi_energy, std::nullopt);
          cfg.shift_t = shift_t;
          py::gil_scoped_release release;
          return entropies(run_ensemble(law, cfg, alpha, {n_realizations, seed, workers}));
        },
        py::arg("law"), py::arg("n_sites"), py::arg("block_len"), py::arg("fermi_energy") = 1.0,
        py::arg("alpha") = 1.0, py::arg("n_realizations") = 200, py::arg("seed") = 1,
        py::arg("workers") = 1, py::arg("shift_t") = 0.0,
        "Entropy of each realization, in realization order.");
  m.def("statistics", [](const std::vector<double>& x) { return stats_dict(statistics(x)); },
        py::arg("samples"));
  m.def("entropy_vs_length",
        [](const PotentialLaw& law, std::size_t n_sites, const std::vector<std::size_t>& lengths,
           double fermi_energy, double alpha, std::size_t n_realizations, std::uint64_t seed,
           int workers) {
          py::gil_scoped_release release;
          return entropy_vs_length_samples(law, n_sites, lengths, fermi_energy, alpha,
                                           {n_realizations, seed, workers});
        },
        py::arg("law"), py::arg("n_sites"), py::arg("lengths"), py::arg("fermi_energy") = 1.0,
        py::arg("alpha") = 1.0, py::arg("n_realizations") = 200, py::arg("seed") = 1,
        py::arg("workers") = 1, "Entropy samples; row = realization, column = block length.");
  m.def("cv_lower_curve",
        [](const DisorderSpec& spec, std::size_t n_sites, std::size_t block_len, double fermi_energy,
           std::optional<std::vector<double>> t_grid, std::size_t n_realizations, std::uint64_t seed,
           int workers) {
          const ChainConfig cfg = chain(n_sites, block_len, fermi_energy, std::nullopt);
          const auto grid = t_grid ? *t_grid : default_t_grid(spec.delta());
          BoundCurve c;
          {
            py::gil_scoped_release release;
            c = cv_lower_curve(spec, cfg, grid, {n_realizations, seed, workers});
          }
          py::dict d;
          d["t"] = c.t_grid;
          d["gap"] = c.gap;
          d["mean_shifted"] = c.mean_shifted;
          d["cv_lower"] = c.cv_lower;
          d["cv_lower_stderr"] = c.cv_lower_stderr;
          d["unshifted"] = stats_dict(c.unshifted);
          d["measured_cv"] = c.measured_cv;
          d["measured_cv_stderr"] = c.measured_cv_stderr;
          d["argmax_t"] = c.argmax_t;
          d["max_ratio"] = c.max_ratio;
          d["max_ratio_stderr"] = c.max_ratio_stderr;
          d["violations"] = c.violations;
          return d;
        },
        py::arg("spec"), py::arg("n_sites"), py::arg("block_len"), py::arg("fermi_energy") = 1.0,
        py::arg("t_grid") = py::none(), py::arg("n_realizations") = 200, py::arg("seed") = 1,
        py::arg("workers") = 1);
  m.def("variance_factorization_check",
        [](const PotentialLaw& law, std::size_t n_sites, std::size_t block_len, double fermi_energy,
           std::size_t n_realizations, std::uint64_t seed, int workers) {
          FactorizationResult r;
          {
            py::gil_scoped_release release;
            r = variance_factorization_check(law, n_sites, block_len, fermi_energy,
                                             {n_realizations, seed, workers});
          }
          py::dict d;
          d["var_block"] = r.var_block;
          d["var_single_cut"] = r.var_single_cut;
          d["ratio"] = r.ratio;
          d["localization_radius"] = r.localization_radius;
          d["status"] = std::string(to_string(r.status));
          return d;
        },
        py::arg("law"), py::arg("n_sites"), py::arg("block_len"), py::arg("fermi_energy") = 1.0,
        py::arg("n_realizations") = 200, py::arg("seed") = 1, py::arg("workers") = 1);

  m.def("run",
        [](const std::map<std::string, std::string>& settings) {
          KeyValues kv(settings.begin(), settings.end());
          const RunConfig cfg = resolve_config({}, kv);
          std::ostringstream log;
          int status;
          {
            py::gil_scoped_release release;
            status = eefluct::run(cfg, log);
          }
          return py::make_tuple(status, log.str());
        },
        py::arg("settings"),
        "Runs a CLI job from 'section.key' -> value settings; returns (exit status, log).");
}
