#include "gradstab/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gradstab/sampling.hpp"

namespace gradstab {

namespace {

using nlohmann::json;

Complex parse_entry(const json& e) {
  if (e.is_number()) return Complex(e.get<double>(), 0.0);
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
    return Complex(e[0].get<double>(), e[1].get<double>());
  throw ParseError("entry must be a number or a [re, im] pair");
}

json entry_to_json(const Complex& z) {
  if (z.imag() == 0.0) return json(z.real());
  return json::array({z.real(), z.imag()});
}

Vec parse_vector(const json& arr, int n) {
  if (!arr.is_array() || static_cast<int>(arr.size()) != n)
    throw ParseError("vector must be an array of length n");
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = parse_entry(arr[i]);
  return v;
}

json vector_to_json(const Vec& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(entry_to_json(v(i)));
  return out;
}

Mat parse_matrix(const json& rows, int n) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != n)
    throw ParseError("matrix must be an array of n rows");
  Mat m(n, n);
  for (int r = 0; r < n; ++r) {
    Vec row = parse_vector(rows[r], n);
    for (int c = 0; c < n; ++c) m(r, c) = row(c);
  }
  return m;
}

json matrix_to_json(const Mat& m) {
  json out = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(entry_to_json(m(r, c)));
    out.push_back(row);
  }
  return out;
}

json point_to_json(const ModelSpace& space, const ModelPoint& p) {
  if (space.kind == ModelKind::Configuration) {
    json out = json::array();
    for (const Vec& v : p.reps) out.push_back(vector_to_json(v));
    return out;
  }
  return vector_to_json(p.reps[0]);
}

json finite_or_inf(double v) {
  if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
  return json(v);
}

ModelPoint parse_point(const ModelSpace& space, const json& doc) {
  std::vector<Vec> reps;
  if (space.kind == ModelKind::Configuration) {
    if (!doc.is_array() || doc.size() != space.weights.size())
      throw ParseError("configuration point must list one vector per factor");
    for (const auto& v : doc) reps.push_back(parse_vector(v, space.n));
  } else {
    reps.push_back(parse_vector(doc, space.n));
  }
  return make_point(space, std::move(reps));
}

std::vector<ModelPoint> projective_line_grid(const ModelSpace& space, int count) {
  std::vector<ModelPoint> out;
  if (space.n != 2)
    throw ParseError("automatic grids exist only for projective lines");
  Vec pole1(2), pole2(2);
  pole1 << 1.0, 0.0;
  pole2 << 0.0, 1.0;
  out.push_back(make_point(space, {pole1}));
  out.push_back(make_point(space, {pole2}));
  const int rest = std::max(0, count - 2);
  const double golden = 2.399963229728653;
  for (int k = 0; k < rest; ++k) {
    Vec v(2);
    if (space.field == FieldKind::Real) {
      double theta = M_PI * (k + 0.7) / (rest + 1);
      v << std::cos(theta), std::sin(theta);
    } else {
      double z = -1.0 + 2.0 * (k + 0.5) / rest;
      double half = 0.5 * std::acos(std::min(1.0, std::max(-1.0, z)));
      double phi = golden * k;
      v(0) = std::cos(half);
      v(1) = std::sin(half) * Complex(std::cos(phi), std::sin(phi));
    }
    out.push_back(make_point(space, {v}));
  }
  return out;
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  if (!doc.is_object()) throw ParseError("scenario must be a JSON object");
  Scenario s;
  if (!doc.contains("command") || !doc["command"].is_string())
    throw ParseError("scenario needs a command");
  s.command = doc["command"].get<std::string>();

  if (doc.contains("params")) {
    const auto& p = doc["params"];
    if (!p.is_object()) throw ParseError("params must be an object");
    if (p.contains("tol")) s.tol = p["tol"].get<double>();
    if (p.contains("t_max")) s.t_max = p["t_max"].get<double>();
    if (p.contains("budget")) s.budget = p["budget"].get<int>();
    if (p.contains("seed")) s.seed = p["seed"].get<std::uint64_t>();
    if (p.contains("sweep")) s.sweep = p["sweep"].get<int>();
    if (p.contains("samples")) s.samples = p["samples"].get<int>();
    if (p.contains("grid")) s.grid = p["grid"].get<int>();
    if (p.contains("t")) s.t = p["t"].get<double>();
  }

  if (s.command != "verify") {
    if (!doc.contains("group") || !doc["group"].is_object())
      throw ParseError("scenario needs a group descriptor");
    const auto& g = doc["group"];
    if (!g.contains("kind") || !g.contains("n"))
      throw ParseError("group needs kind and n");
    s.setup = ReductiveSetup::make(group_kind_from_name(g["kind"].get<std::string>()),
                                   g["n"].get<int>());

    if (!doc.contains("model") || !doc["model"].is_object())
      throw ParseError("scenario needs a model descriptor");
    const auto& m = doc["model"];
    ModelKind mk = model_kind_from_name(m.value("kind", std::string()));
    FieldKind fk;
    std::string field = m.value("field", std::string("real"));
    if (field == "real") fk = FieldKind::Real;
    else if (field == "complex") fk = FieldKind::Complex;
    else throw ParseError("field must be real or complex");
    try {
      if (mk == ModelKind::Linear) s.model = ModelSpace::linear(s.setup, fk);
      else if (mk == ModelKind::Projective) s.model = ModelSpace::projective(s.setup, fk);
      else {
        std::vector<double> w;
        if (!m.contains("weights") || !m["weights"].is_array())
          throw ParseError("configuration model needs weights");
        for (const auto& e : m["weights"]) w.push_back(e.get<double>());
        s.model = ModelSpace::configuration(s.setup, fk, std::move(w));
      }
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(std::string("invalid model: ") + e.what());
    }

    if (doc.contains("point")) {
      try {
        s.point = parse_point(*s.model, doc["point"]);
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        throw ParseError(std::string("invalid point: ") + e.what());
      }
    }
    if (doc.contains("points")) {
      for (const auto& p : doc["points"])
        s.extra_points.push_back(parse_point(*s.model, p));
    }
    if (doc.contains("direction")) {
      Mat m2 = parse_matrix(doc["direction"], s.setup->n());
      try {
        s.direction = Direction(s.setup, m2);
      } catch (const Error& e) {
        throw ParseError(std::string("invalid direction: ") + e.what());
      }
    }
    if (doc.contains("element")) {
      Mat m2 = parse_matrix(doc["element"], s.setup->n());
      try {
        s.element = make_group_element(s.setup, m2);
      } catch (const Error& e) {
        throw ParseError(std::string("invalid element: ") + e.what());
      }
    }
  }

  // Canonical echo of everything understood.
  json echo;
  echo["command"] = s.command;
  if (s.setup) {
    echo["group"] = {{"kind", group_kind_name(s.setup->kind())},
                     {"n", s.setup->n()}};
  }
  if (s.model) {
    json m{{"kind", model_kind_name(s.model->kind)},
           {"field", s.model->field == FieldKind::Real ? "real" : "complex"}};
    if (s.model->kind == ModelKind::Configuration) m["weights"] = s.model->weights;
    echo["model"] = m;
  }
  if (s.point) echo["point"] = point_to_json(*s.model, *s.point);
  if (!s.extra_points.empty()) {
    json pts = json::array();
    for (const auto& p : s.extra_points) pts.push_back(point_to_json(*s.model, p));
    echo["points"] = pts;
  }
  if (s.direction) echo["direction"] = matrix_to_json(s.direction->matrix());
  if (s.element) echo["element"] = matrix_to_json(s.element->matrix);
  echo["params"] = {{"tol", s.tol},     {"t_max", s.t_max}, {"budget", s.budget},
                    {"seed", s.seed},   {"sweep", s.sweep}, {"samples", s.samples},
                    {"grid", s.grid},   {"t", s.t}};
  s.echo = std::move(echo);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw ParseError(std::string("scenario is not valid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

namespace {

json verdict_to_json(const ModelSpace& space, const StabilityVerdict& v) {
  json out;
  out["class"] = stability_class_name(v.klass);
  out["tol"] = v.tol;
  out["budget"] = v.budget;
  if (v.destabilizer) {
    out["certificate"] = {
        {"type", "destabilizing_direction"},
        {"beta", matrix_to_json(v.destabilizer->beta.matrix())},
        {"lambda", v.destabilizer->lambda_value}};
  } else if (v.minimizer) {
    out["certificate"] = {{"type", "minimizer"},
                          {"g", matrix_to_json(v.minimizer->g.matrix)},
                          {"grad_norm", v.minimizer->grad_norm},
                          {"stabilizer_dim", v.minimizer->stabilizer_dim}};
  }
  if (v.chain) {
    json steps = json::array();
    for (const auto& st : v.chain->steps)
      steps.push_back({{"beta", matrix_to_json(st.beta.matrix())},
                       {"lambda", st.lambda_value},
                       {"limit", point_to_json(space, st.limit)}});
    out["certificate"] = {{"type", "reduction_chain"},
                          {"steps", steps},
                          {"terminal", point_to_json(space, v.chain->terminal)},
                          {"terminal_grad_norm", v.chain->terminal_grad_norm}};
  }
  return out;
}

json run_classify(const Scenario& s) {
  if (!s.model || !s.point) throw ParseError("classify needs model and point");
  ClassifyOptions opts;
  opts.tol = s.tol;
  opts.budget = s.budget;
  opts.sweep = s.sweep;
  StabilityVerdict v = classify(*s.model, *s.point, opts);
  return verdict_to_json(*s.model, v);
}

json run_max_weight(const Scenario& s) {
  if (!s.model || !s.point || !s.direction)
    throw ParseError("max-weight needs model, point and direction");
  MaximalWeight w = max_weight(*s.model, *s.point, *s.direction);
  MaximalWeight nw = max_weight_numeric(*s.model, *s.point, *s.direction, s.t_max);
  json out;
  out["value"] = finite_or_inf(w.value);
  out["method"] = "closed_form";
  out["energy"] = finite_or_inf(w.energy_value);
  out["lambda0"] = lambda_t(*s.model, *s.point, *s.direction, 0.0);
  if (w.limit_point) out["limit"] = point_to_json(*s.model, *w.limit_point);
  out["numeric_value"] = finite_or_inf(nw.value);
  if (w.finite() && nw.finite())
    out["agreement"] = std::abs(w.value - nw.value);
  return out;
}

json run_flow(const Scenario& s, const RunOptions& ropts) {
  if (!s.model || !s.point || !s.direction)
    throw ParseError("flow needs model, point and direction");
  std::vector<double> times;
  const int count = std::max(2, s.samples);
  for (int i = 0; i < count; ++i) times.push_back(s.t_max * i / (count - 1));
  FlowTrajectory traj = sample_flow(*s.model, *s.point, *s.direction, times);
  if (ropts.trace_path) export_trace(traj, *ropts.trace_path);
  json out;
  out["status"] = traj.status == FlowStatus::Converged ? "converged"
                  : traj.status == FlowStatus::Diverged ? "diverged"
                                                        : "budget_exceeded";
  out["samples"] = static_cast<int>(traj.times.size());
  out["lambda_first"] = traj.lambda_samples.front();
  out["lambda_last"] = traj.lambda_samples.back();
  double worst = 0.0;
  for (size_t i = 1; i < traj.lambda_samples.size(); ++i)
    worst = std::min(worst, traj.lambda_samples[i] - traj.lambda_samples[i - 1]);
  out["monotonicity_defect"] = -worst;
  out["energy"] = finite_or_inf(energy(*s.model, *s.point, *s.direction));
  if (traj.limit) out["limit"] = point_to_json(*s.model, *traj.limit);
  return out;
}

json run_kempf_ness(const Scenario& s) {
  if (!s.model || !s.point) throw ParseError("kempf-ness needs model and point");
  json out;
  if (s.element)
    out["value"] = kn_value(*s.model, *s.point, s.element->matrix);

  DescentOptions dopts;
  dopts.tol = s.tol;
  dopts.budget = s.budget;
  DescentResult d = kn_descend(*s.model, *s.point, dopts);
  out["descent"] = {
      {"status", d.status == DescentStatus::Converged    ? "converged"
                 : d.status == DescentStatus::Stalled    ? "stalled"
                                                         : "divergent_ray"},
      {"iterations", d.iterations},
      {"final_grad_norm", d.final_grad_norm},
      {"inf_grad_norm", d.inf_grad_norm},
      {"phi", d.phi_value}};
  if (d.ray_direction)
    out["descent"]["ray_direction"] = matrix_to_json(d.ray_direction->matrix());

  Rng rng(s.seed);
  double cocycle = 0.0, kinv = 0.0, deriv = 0.0;
  double convex = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 25; ++i) {
    GroupElement g = random_group_element(s.setup, rng);
    GroupElement h = random_group_element(s.setup, rng);
    cocycle = std::max(cocycle,
                       kn_cocycle_defect(*s.model, *s.point, g.matrix, h.matrix));
    GroupElement k = random_compact_element(s.setup, rng);
    kinv = std::max(kinv, std::abs(kn_value(*s.model, *s.point, k.matrix * g.matrix) -
                                   kn_value(*s.model, *s.point, g.matrix)));
    Direction beta = random_direction(s.setup, rng);
    convex = std::min(convex,
                      kn_convexity_scan(*s.model, *s.point, beta).min_second_difference);
    double t0 = 2.0 * rng.uniform() - 1.0;
    const double h2 = 1e-4;
    double fd = (kn_value(*s.model, *s.point, beta.exp(t0 + h2)) -
                 kn_value(*s.model, *s.point, beta.exp(t0 - h2))) /
                (2.0 * h2);
    deriv = std::max(deriv, std::abs(fd - lambda_t(*s.model, *s.point, beta, t0)));
  }
  out["axioms"] = {{"cocycle_defect_max", cocycle},
                   {"k_invariance_defect_max", kinv},
                   {"convexity_min_second_difference", convex},
                   {"derivative_identity_defect_max", deriv}};
  return out;
}

json run_stratify(const Scenario& s) {
  if (!s.model) throw ParseError("stratify needs a model");
  std::vector<ModelPoint> grid = s.extra_points;
  if (grid.empty()) {
    if (s.model->kind != ModelKind::Projective)
      throw ParseError("stratify needs explicit points for this model");
    grid = projective_line_grid(*s.model, s.grid);
  }
  NormSqFlowOptions fopts;
  fopts.tol = s.tol;
  fopts.budget = s.budget;
  auto entries = stratify(*s.model, grid, fopts);
  json out;
  json list = json::array();
  for (const auto& e : entries) {
    list.push_back({{"orbit_key", e.label.orbit_key},
                    {"f", e.label.f_value},
                    {"status", e.status == FlowStatus::Converged ? "converged"
                                                                 : "budget_exceeded"}});
  }
  out["entries"] = list;
  auto strata = distinct_strata(entries);
  json keys = json::array();
  for (const auto& st : strata) keys.push_back(st.orbit_key);
  out["distinct_orbit_keys"] = keys;
  out["stratum_count"] = static_cast<int>(strata.size());
  return out;
}

}  // namespace

Report run_scenario(const Scenario& s, const RunOptions& ropts) {
  Report report;
  json body;
  body["version"] = "0.1.0";
  body["command"] = s.command;
  body["scenario"] = s.echo;

  try {
    if (s.command == "classify") body["result"] = run_classify(s);
    else if (s.command == "max-weight") body["result"] = run_max_weight(s);
    else if (s.command == "flow") body["result"] = run_flow(s, ropts);
    else if (s.command == "kempf-ness") body["result"] = run_kempf_ness(s);
    else if (s.command == "stratify") body["result"] = run_stratify(s);
    else if (s.command == "verify")
      body["result"] = run_verify_suite(VerifyOptions{s.seed, s.sweep, s.tol, s.budget});
    else
      throw ParseError("unknown command: " + s.command);
  } catch (const UndecidedError& e) {
    body["error"] = {{"kind", "undecided"}, {"what", e.what()}};
    report.exit_code = 2;
  } catch (const BudgetExceededError& e) {
    body["error"] = {{"kind", "budget_exceeded"}, {"what", e.what()}};
    report.exit_code = 2;
  }
  report.body = std::move(body);
  return report;
}

std::string render_report(const Report& report, const std::string& format) {
  if (format == "csv") {
    std::ostringstream os;
    os << "key,value\n";
    std::function<void(const std::string&, const json&)> walk =
        [&](const std::string& prefix, const json& node) {
          if (node.is_object()) {
            for (auto it = node.begin(); it != node.end(); ++it)
              walk(prefix.empty() ? it.key() : prefix + "." + it.key(), it.value());
          } else if (node.is_array()) {
            for (size_t i = 0; i < node.size(); ++i)
              walk(prefix + "[" + std::to_string(i) + "]", node[i]);
          } else {
            os << prefix << "," << node.dump() << "\n";
          }
        };
    walk("", report.body);
    return os.str();
  }
  return report.body.dump(2) + "\n";
}

void export_trace(const FlowTrajectory& trajectory, std::ostream& os) {
  if (trajectory.times.empty())
    throw Error("export_trace: trajectory is empty");
  os << "t,lambda,speed2,f\n";
  char buf[128];
  for (size_t i = 0; i < trajectory.times.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n",
                  trajectory.times[i], trajectory.lambda_samples[i],
                  trajectory.speed2_samples[i], trajectory.f_samples[i]);
    os << buf;
  }
  if (!os) throw NumericFailureError("export_trace: write failure");
}

void export_trace(const FlowTrajectory& trajectory, const std::string& path) {
  if (trajectory.times.empty())
    throw Error("export_trace: trajectory is empty");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NumericFailureError("export_trace: cannot open " + path);
  export_trace(trajectory, out);
  out.flush();
  if (!out) throw NumericFailureError("export_trace: write failure");
}

}  // namespace gradstab
