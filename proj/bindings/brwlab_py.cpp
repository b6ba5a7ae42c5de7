#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "brwlab/asymptotics.hpp"
#include "brwlab/config.hpp"
#include "brwlab/errors.hpp"
#include "brwlab/montecarlo.hpp"

namespace py = pybind11;
using namespace brwlab;

namespace {

Site to_site(const std::vector<int64_t>& coords) {
  if (coords.size() > std::size_t(kMaxDim))
    throw Error("site has too many coordinates");
  Site s;
  for (std::size_t i = 0; i < coords.size(); ++i) s.c[i] = coords[i];
  return s;
}

std::vector<int64_t> from_site(const Site& s, int dim) {
  return std::vector<int64_t>(s.c.begin(), s.c.begin() + dim);
}

py::dict report_dict(const RegimeReport& r) {
  py::dict d;
  d["regime"] = to_string(r.regime);
  d["beta_star"] = r.beta_star;
  d["beta_c"] = r.beta_c;
  d["death_rate"] = r.death_rate;
  d["lambda0"] = r.lambda0 ? py::object(py::float_(*r.lambda0)) : py::none();
  d["lambda_E"] =
      r.lambda_E ? py::object(py::float_(*r.lambda_E)) : py::none();
  return d;
}

RegimeReport report_from_dict(const py::dict& d) {
  RegimeReport r;
  r.regime = regime_from_string(d["regime"].cast<std::string>());
  r.beta_star = d["beta_star"].cast<double>();
  r.beta_c = d["beta_c"].cast<double>();
  r.death_rate = d["death_rate"].cast<double>();
  if (!d["lambda0"].is_none()) r.lambda0 = d["lambda0"].cast<double>();
  if (!d["lambda_E"].is_none()) r.lambda_E = d["lambda_E"].cast<double>();
  return r;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "branching random walk laboratory core";

  // base first: pybind tries translators newest-first, so the derived
  // ConfigError must be registered after its base to win
  auto base = py::register_exception<Error>(m, "BrwlabError");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::class_<WalkKernel>(m, "WalkKernel")
      .def_static("simple", &WalkKernel::simple, py::arg("dim"))
      .def_static(
          "finite_support",
          [](int dim,
             const std::vector<std::pair<std::vector<int64_t>, double>>&
                 jumps) {
            std::vector<Jump> js;
            for (const auto& [z, rate] : jumps) js.push_back({to_site(z), rate});
            return WalkKernel::finite_support(dim, js);
          },
          py::arg("dim"), py::arg("jumps"))
      .def_static("heavy_tail", &WalkKernel::heavy_tail, py::arg("dim"),
                  py::arg("alpha"), py::arg("total_rate") = 1.0,
                  py::arg("cutoff") = 0)
      .def_property_readonly("dimension", &WalkKernel::dimension)
      .def_property_readonly("total_rate", &WalkKernel::total_rate)
      .def_property_readonly("finite_variance", &WalkKernel::finite_variance)
      .def("rate",
           [](const WalkKernel& k, const std::vector<int64_t>& z) {
             return k.rate(to_site(z));
           })
      .def("tail_rate", &WalkKernel::tail_rate)
      .def("transition_probability",
           [](const WalkKernel& k, double t, const std::vector<int64_t>& x,
              const std::vector<int64_t>& y) {
             return transition_probability(k, t, to_site(x), to_site(y));
           },
           py::arg("t"), py::arg("x"), py::arg("y"))
      .def("green",
           [](const WalkKernel& k, double lam, const std::vector<int64_t>& x,
              const std::vector<int64_t>& y) {
             return green(k, lam, to_site(x), to_site(y));
           },
           py::arg("lam"), py::arg("x"), py::arg("y"))
      .def("is_transient", [](const WalkKernel& k) { return is_transient(k); });

  py::class_<OffspringLaw>(m, "OffspringLaw")
      .def(py::init<const std::map<int, double>&, int>(), py::arg("b"),
           py::arg("n_max") = 6)
      .def_property_readonly("beta_star", &OffspringLaw::beta_star)
      .def_property_readonly("death_rate", &OffspringLaw::death_rate)
      .def("intensity", &OffspringLaw::intensity)
      .def("factorial_moment", &OffspringLaw::factorial_moment)
      .def("generating_function", &OffspringLaw::generating_function)
      .def("g", &OffspringLaw::g, py::arg("n"), py::arg("lower"));

  m.def("beta_critical",
        [](const WalkKernel& k) { return beta_critical(k); });
  m.def("lambda0", [](const WalkKernel& k, double beta_star) {
    auto v = lambda0(k, beta_star);
    return v ? py::object(py::float_(*v)) : py::object(py::none());
  });
  m.def("critical_death_rate", [](const WalkKernel& k, double beta_star) {
    return critical_death_rate(k, beta_star);
  });
  m.def("classify", [](const WalkKernel& k, const OffspringLaw& law) {
    return report_dict(classify(k, law));
  });

  py::class_<MomentTrajectory>(m, "MomentTrajectory")
      .def_property_readonly("times",
                             [](const MomentTrajectory& t) { return t.times; })
      .def_property_readonly("orders",
                             [](const MomentTrajectory& t) { return t.orders; })
      .def_property_readonly(
          "variant",
          [](const MomentTrajectory& t) { return to_string(t.variant); })
      .def_property_readonly(
          "boundary_leak",
          [](const MomentTrajectory& t) { return t.boundary_leak; })
      .def_property_readonly("tracked_sites",
                             [](const MomentTrajectory& t) {
                               std::vector<std::vector<int64_t>> out;
                               for (const auto& s : t.tracked_sites)
                                 out.push_back(from_site(s, t.dimension));
                               return out;
                             })
      .def("series",
           [](const MomentTrajectory& t, int order,
              const std::vector<int64_t>& site) {
             return t.series(order, to_site(site));
           },
           py::arg("order"), py::arg("site"))
      .def("totals", [](const MomentTrajectory& t, int order) {
        return t.total_series(order);
      });

  m.def(
      "solve_moments",
      [](const WalkKernel& k, const OffspringLaw& law, int orders,
         int64_t radius, double horizon, const std::string& variant,
         int64_t track_radius, double rtol, double atol, double leak_tol,
         const std::vector<double>& checkpoints, int threads) {
        SolveOptions o;
        o.orders = orders;
        o.radius = radius;
        o.horizon = horizon;
        o.variant = moment_variant_from_string(variant);
        o.track_radius = track_radius;
        o.rtol = rtol;
        o.atol = atol;
        o.leak_tol = leak_tol;
        o.checkpoints = checkpoints;
        o.threads = threads;
        return solve_moments(k, law, o);
      },
      py::arg("kernel"), py::arg("law"), py::arg("orders") = 1,
      py::arg("radius") = 100, py::arg("horizon") = 50.0,
      py::arg("variant") = "local", py::arg("track_radius") = 0,
      py::arg("rtol") = 1e-8, py::arg("atol") = 1e-12,
      py::arg("leak_tol") = 1e-3,
      py::arg("checkpoints") = std::vector<double>{}, py::arg("threads") = 0,
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "simulate",
      [](const WalkKernel& k, const OffspringLaw& law, double horizon,
         const std::vector<double>& checkpoints, int orders,
         int64_t track_radius, std::size_t replicas, uint64_t seed,
         std::size_t max_population, uint64_t max_events, int threads) {
        SimOptions o;
        o.horizon = horizon;
        o.checkpoints = checkpoints;
        o.orders = orders;
        o.track_radius = track_radius;
        o.replicas = replicas;
        o.seed = seed;
        o.max_population = max_population;
        o.max_events = max_events;
        o.threads = threads;
        auto records = run_replicas(k, law, o);
        SimulationSummary s = estimate_moments(records, k, o);
        py::gil_scoped_acquire gil;
        py::dict d;
        d["replicas"] = s.replicas;
        d["truncated"] = s.truncated;
        d["checkpoints"] = s.checkpoints;
        std::vector<std::vector<int64_t>> sites;
        for (const auto& site : s.tracked_sites)
          sites.push_back(from_site(site, k.dimension()));
        d["tracked_sites"] = sites;
        d["local_mean"] = s.local_mean;
        d["local_se"] = s.local_se;
        d["total_mean"] = s.total_mean;
        d["total_se"] = s.total_se;
        d["extinction_fraction"] = s.extinction_fraction;
        return d;
      },
      py::arg("kernel"), py::arg("law"), py::arg("horizon") = 10.0,
      py::arg("checkpoints") = std::vector<double>{}, py::arg("orders") = 2,
      py::arg("track_radius") = 0, py::arg("replicas") = 1000,
      py::arg("seed") = 0, py::arg("max_population") = 1'000'000,
      py::arg("max_events") = 100'000'000, py::arg("threads") = 0,
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "sample_limit_law",
      [](const WalkKernel& k, const OffspringLaw& law, const py::dict& report,
         double t_large, std::size_t replicas, uint64_t seed,
         int64_t track_radius, int threads) {
        RegimeReport r = report_from_dict(report);
        SimOptions o;
        o.replicas = replicas;
        o.seed = seed;
        o.track_radius = track_radius;
        o.threads = threads;
        LimitLawSample s;
        {
          py::gil_scoped_release release;
          s = sample_limit_law(k, law, r, t_large, o);
        }
        py::dict d;
        d["lambda_E"] = s.lambda_e;
        d["t_primary"] = s.t_primary;
        d["t_secondary"] = s.t_secondary;
        d["rescaled_primary"] = s.rescaled_primary;
        d["rescaled_secondary"] = s.rescaled_secondary;
        d["mean_primary"] = s.mean_primary;
        d["mean_secondary"] = s.mean_secondary;
        d["variance_primary"] = s.variance_primary;
        d["zero_fraction_primary"] = s.zero_fraction_primary;
        d["psi_primary"] = s.psi_primary;
        d["psi_secondary"] = s.psi_secondary;
        return d;
      },
      py::arg("kernel"), py::arg("law"), py::arg("report"),
      py::arg("t_large"), py::arg("replicas") = 1000, py::arg("seed") = 0,
      py::arg("track_radius") = 0, py::arg("threads") = 0);

  m.def("predicted_asymptote",
        [](const py::dict& report, int dim, py::object alpha, int order,
           const std::string& variant) {
          std::optional<double> a;
          if (!alpha.is_none()) a = alpha.cast<double>();
          AsymptoteForm f =
              predicted_asymptote(report_from_dict(report), dim, a, order,
                                  moment_variant_from_string(variant));
          py::dict d;
          d["rho"] = f.rho;
          d["kappa"] = f.kappa;
          d["eta"] = f.eta;
          d["source"] = f.source;
          return d;
        },
        py::arg("report"), py::arg("dim"), py::arg("alpha"), py::arg("order"),
        py::arg("variant"));

  m.def("validate_regime",
        [](const WalkKernel& k, const OffspringLaw& law,
           const MomentTrajectory& traj) {
          auto report = classify(k, law);
          auto verdicts = validate_regime(k, law, report, traj);
          py::list out;
          for (const auto& v : verdicts) {
            py::dict d;
            d["order"] = v.order;
            d["variant"] = to_string(v.variant);
            d["pass"] = v.pass;
            d["detail"] = v.detail;
            d["predicted_rho"] = v.predicted.rho;
            d["predicted_kappa"] = v.predicted.kappa;
            d["predicted_eta"] = v.predicted.eta;
            d["fit_rho"] = v.fit.rho;
            d["fit_kappa"] = v.fit.kappa;
            d["fit_eta"] = v.fit.eta;
            out.append(d);
          }
          return out;
        });

  m.def("fit_growth",
        [](const std::vector<double>& t, const std::vector<double>& v,
           double t_min, double t_max, bool free_rho, bool free_kappa,
           bool free_eta, double rho, double kappa, double eta) {
          FitSpec spec{free_rho, free_kappa, free_eta, rho, kappa, eta};
          GrowthFit f = fit_growth(t, v, t_min, t_max, spec);
          py::dict d;
          d["log_c"] = f.log_c;
          d["rho"] = f.rho;
          d["kappa"] = f.kappa;
          d["eta"] = f.eta;
          d["rms_residual"] = f.rms_residual;
          d["points"] = f.points;
          return d;
        },
        py::arg("t"), py::arg("v"), py::arg("t_min"), py::arg("t_max"),
        py::arg("free_rho") = true, py::arg("free_kappa") = true,
        py::arg("free_eta") = false, py::arg("rho") = 0.0,
        py::arg("kappa") = 0.0, py::arg("eta") = 0.0);

  m.def("parse_config", [](const std::string& text) {
    ModelConfig c = parse_config(text);
    return py::make_tuple(serialize_config(c), config_hash(c));
  });
  m.def("run_config_moments", [](const std::string& text) {
    ModelConfig c = parse_config(text);
    WalkKernel k = make_kernel(c);
    OffspringLaw law = make_law(c, k);
    return solve_moments(k, law, solve_options(c));
  });
  m.def("config_kernel", [](const std::string& text) {
    ModelConfig c = parse_config(text);
    return make_kernel(c);
  });
  m.def("config_law", [](const std::string& text) {
    ModelConfig c = parse_config(text);
    WalkKernel k = make_kernel(c);
    return make_law(c, k);
  });
}
