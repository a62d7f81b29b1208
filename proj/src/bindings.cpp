#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gradstab/scenario.hpp"

namespace py = pybind11;
using namespace gradstab;

namespace {

// pybind11 holders cannot be shared_ptr-to-const; hand the setup around in a
// small wrapper instead.
struct PySetup {
  SetupPtr ptr;
};

FieldKind field_from_string(const std::string& name) {
  if (name == "real") return FieldKind::Real;
  if (name == "complex") return FieldKind::Complex;
  throw ParseError("field must be 'real' or 'complex'");
}

std::string status_name(FlowStatus s) {
  switch (s) {
    case FlowStatus::Converged: return "converged";
    case FlowStatus::Diverged: return "diverged";
    case FlowStatus::BudgetExceeded: return "budget_exceeded";
  }
  return "?";
}

ModelPoint point_from_reps(const ModelSpace& space, const std::vector<Vec>& reps) {
  return make_point(space, std::vector<Vec>(reps));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gradient-map stability analysis for reductive matrix group actions";

  py::register_exception<Error>(m, "GradstabError");

  py::class_<PySetup>(m, "Setup")
      .def_static(
          "make",
          [](const std::string& kind, int n) {
            return PySetup{ReductiveSetup::make(group_kind_from_name(kind), n)};
          },
          py::arg("kind"), py::arg("n"))
      .def_property_readonly("n", [](const PySetup& s) { return s.ptr->n(); })
      .def_property_readonly("kind",
                             [](const PySetup& s) {
                               return std::string(group_kind_name(s.ptr->kind()));
                             })
      .def_property_readonly("dim_k", [](const PySetup& s) { return s.ptr->dim_k(); })
      .def_property_readonly("dim_p", [](const PySetup& s) { return s.ptr->dim_p(); })
      .def_property_readonly("dim_a", [](const PySetup& s) { return s.ptr->dim_a(); })
      .def_property_readonly("p_basis",
                             [](const PySetup& s) { return s.ptr->p_basis(); })
      .def_property_readonly("k_basis",
                             [](const PySetup& s) { return s.ptr->k_basis(); })
      .def_property_readonly("a_basis",
                             [](const PySetup& s) { return s.ptr->a_basis(); })
      .def("project_p", [](const PySetup& s, const Mat& xi) {
        return s.ptr->project_p(xi);
      });

  py::class_<ModelSpace>(m, "ModelSpace")
      .def_static(
          "linear",
          [](const PySetup& setup, const std::string& field) {
            return ModelSpace::linear(setup.ptr, field_from_string(field));
          },
          py::arg("setup"), py::arg("field") = "real")
      .def_static(
          "projective",
          [](const PySetup& setup, const std::string& field) {
            return ModelSpace::projective(setup.ptr, field_from_string(field));
          },
          py::arg("setup"), py::arg("field") = "real")
      .def_static(
          "configuration",
          [](const PySetup& setup, const std::string& field,
             std::vector<double> w) {
            return ModelSpace::configuration(setup.ptr, field_from_string(field),
                                             std::move(w));
          },
          py::arg("setup"), py::arg("field"), py::arg("weights"))
      .def_property_readonly("factors", &ModelSpace::factors);

  py::class_<ModelPoint>(m, "Point")
      .def_property_readonly("reps",
                             [](const ModelPoint& p) { return p.reps; });

  py::class_<Direction>(m, "Direction")
      .def_property_readonly("matrix", &Direction::matrix)
      .def_property_readonly("eigenvalues", &Direction::eigenvalues)
      .def_property_readonly("norm", &Direction::norm)
      .def("exp", &Direction::exp);

  py::class_<GroupElement>(m, "GroupElement")
      .def_property_readonly("matrix",
                             [](const GroupElement& g) { return g.matrix; });

  m.def(
      "point",
      [](const ModelSpace& space, const std::vector<Vec>& reps) {
        return point_from_reps(space, reps);
      },
      py::arg("space"), py::arg("reps"));
  m.def(
      "direction",
      [](const PySetup& setup, const Mat& beta) {
        return Direction(setup.ptr, beta);
      },
      py::arg("setup"), py::arg("matrix"));
  m.def(
      "element",
      [](const PySetup& setup, const Mat& g) {
        return make_group_element(setup.ptr, g);
      },
      py::arg("setup"), py::arg("matrix"));

  m.def("gradient_map",
        [](const ModelSpace& space, const ModelPoint& x) {
          GradientValue v = gradient_map(space, x);
          return py::make_tuple(v.matrix, v.norm);
        });
  m.def("moment_pairing", &moment_pairing);
  m.def("fundamental_field", &fundamental_field);
  m.def("metric_eval", &metric_eval);
  m.def("act", [](const ModelSpace& space, const GroupElement& g,
                  const ModelPoint& x) { return act(space, g.matrix, x); });

  m.def("flow_at", &flow_at);
  m.def("flow_limit", [](const ModelSpace& space, const ModelPoint& x,
                         const Direction& beta) {
    FlowLimit lim = flow_limit(space, x, beta);
    return py::make_tuple(status_name(lim.status),
                          lim.point ? py::cast(*lim.point) : py::none());
  });
  m.def("energy", &energy);
  m.def("lambda_t", &lambda_t);
  m.def("max_weight", [](const ModelSpace& space, const ModelPoint& x,
                         const Direction& beta) {
    MaximalWeight w = max_weight(space, x, beta);
    py::dict out;
    out["value"] = w.value;
    out["energy"] = w.energy_value;
    if (w.limit_point) out["limit"] = *w.limit_point;
    return out;
  });

  m.def("kn_value", &kn_value);
  m.def(
      "kn_descend",
      [](const ModelSpace& space, const ModelPoint& x, double tol, int budget) {
        DescentOptions opts;
        opts.tol = tol;
        opts.budget = budget;
        DescentResult d = kn_descend(space, x, opts);
        py::dict out;
        out["status"] = d.status == DescentStatus::Converged    ? "converged"
                        : d.status == DescentStatus::Stalled    ? "stalled"
                                                                : "divergent_ray";
        out["minimizer"] = d.minimizer;
        out["final_grad_norm"] = d.final_grad_norm;
        out["inf_grad_norm"] = d.inf_grad_norm;
        out["iterations"] = d.iterations;
        if (d.ray_direction) out["ray_direction"] = d.ray_direction->matrix();
        return out;
      },
      py::arg("space"), py::arg("x"), py::arg("tol") = 1e-8,
      py::arg("budget") = 20000);

  m.def(
      "classify",
      [](const ModelSpace& space, const ModelPoint& x, double tol, int budget) {
        ClassifyOptions opts;
        opts.tol = tol;
        opts.budget = budget;
        StabilityVerdict v = classify(space, x, opts);
        py::dict out;
        out["class"] = std::string(stability_class_name(v.klass));
        if (v.destabilizer) {
          out["destabilizer"] = v.destabilizer->beta.matrix();
          out["lambda"] = v.destabilizer->lambda_value;
        }
        if (v.minimizer) {
          out["minimizer"] = v.minimizer->g.matrix;
          out["grad_norm"] = v.minimizer->grad_norm;
          out["stabilizer_dim"] = v.minimizer->stabilizer_dim;
        }
        if (v.chain) {
          py::list steps;
          for (const auto& st : v.chain->steps)
            steps.append(py::make_tuple(st.beta.matrix(), st.lambda_value));
          out["chain"] = steps;
          out["terminal_grad_norm"] = v.chain->terminal_grad_norm;
        }
        return out;
      },
      py::arg("space"), py::arg("x"), py::arg("tol") = 1e-8,
      py::arg("budget") = 20000);

  m.def("torus_oracle", [](const ModelSpace& space, const ModelPoint& x) {
    TorusVerdict v = torus_oracle(space, x);
    py::dict out;
    out["class"] = std::string(stability_class_name(v.klass));
    out["exact"] = v.exact;
    if (v.destabilizer) out["destabilizer"] = v.destabilizer->matrix();
    return out;
  });

  m.def("stratify", [](const ModelSpace& space,
                       const std::vector<ModelPoint>& grid) {
    auto entries = stratify(space, grid);
    py::list out;
    for (const auto& e : entries)
      out.append(py::make_tuple(e.label.orbit_key, e.label.f_value,
                                status_name(e.status)));
    return out;
  });

  m.def("run_scenario", [](const std::string& text) {
    Scenario s = parse_scenario(nlohmann::json::parse(text));
    Report r = run_scenario(s);
    return py::make_tuple(r.body.dump(2), r.exit_code);
  });

  m.def("verify", [](std::uint64_t seed, int sweep) {
    VerifyOptions opts;
    opts.seed = seed;
    opts.sweep = sweep;
    return run_verify_suite(opts).dump(2);
  }, py::arg("seed") = 42, py::arg("sweep") = 2000);

#ifdef GRADSTAB_VERSION
  m.attr("__version__") = GRADSTAB_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
