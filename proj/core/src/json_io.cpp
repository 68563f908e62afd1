#include "polysplit/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "polysplit/errors.hpp"

namespace polysplit {

namespace {

using nlohmann::json;

json read_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("input is not valid JSON");
  return j;
}

MatrixXd as_matrix(const json& j, Eigen::Index cols_hint, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + ": expected a nested array");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return MatrixXd::Zero(0, cols_hint);
  if (!j[0].is_array()) throw ParseError(std::string(what) + ": expected rows of numbers");
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  MatrixXd M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ParseError(std::string(what) + ": ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& v = row[static_cast<size_t>(c)];
      if (!v.is_number()) throw ParseError(std::string(what) + ": non-numeric entry");
      M(r, c) = v.get<double>();
      if (!std::isfinite(M(r, c))) throw ParseError(std::string(what) + ": non-finite entry");
    }
  }
  return M;
}

VectorXd as_vector(const json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array");
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const json& e = j[static_cast<size_t>(i)];
    if (!e.is_number()) throw ParseError(std::string(what) + ": non-numeric entry");
    v(i) = e.get<double>();
    if (!std::isfinite(v(i))) throw ParseError(std::string(what) + ": non-finite entry");
  }
  return v;
}

json matrix_json(const MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

const json& need(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field: ") + key);
  return *it;
}

}  // namespace

InputKind detect_input_kind(const std::string& text) {
  json j = read_json(text);
  if (j.contains("regions")) return InputKind::PwaSystem;
  if (j.contains("stages")) return InputKind::Problem;
  throw ParseError("unrecognized input: neither 'regions' nor 'stages' present");
}

ConsensusProblem parse_problem_json(const std::string& text) {
  json j = read_json(text);
  ConsensusProblem prob;
  prob.n = need(j, "n").get<Eigen::Index>();
  prob.p = need(j, "p").get<Eigen::Index>();
  prob.H = as_matrix(need(j, "H"), prob.n, "H");
  prob.h = as_vector(need(j, "h"), "h");
  prob.A = as_matrix(need(j, "A"), prob.n, "A");
  prob.b = as_vector(need(j, "b"), "b");

  const json& stages = need(j, "stages");
  if (!stages.is_array() || stages.empty()) throw ParseError("stages: expected a non-empty array");
  for (const json& js : stages) {
    StageSet st;
    st.nk = need(js, "nk").get<Eigen::Index>();
    const json& comps = need(js, "components");
    if (!comps.is_array() || comps.empty())
      throw ParseError("components: expected a non-empty array");
    for (const json& jc : comps) {
      Polyhedron c;
      c.G = as_matrix(need(jc, "G"), st.nk, "G");
      c.g0 = as_vector(need(jc, "g0"), "g0");
      c.F = as_matrix(need(jc, "F"), st.nk, "F");
      c.f0 = as_vector(need(jc, "f0"), "f0");
      c.Gtheta = jc.contains("Gtheta") ? as_matrix(jc["Gtheta"], prob.p, "Gtheta")
                                       : MatrixXd(MatrixXd::Zero(0, prob.p));
      c.Ftheta = jc.contains("Ftheta") ? as_matrix(jc["Ftheta"], prob.p, "Ftheta")
                                       : MatrixXd(MatrixXd::Zero(0, prob.p));
      if (c.Gtheta.rows() == 0 && c.G.rows() > 0) c.Gtheta = MatrixXd::Zero(c.G.rows(), prob.p);
      if (c.Ftheta.rows() == 0 && c.F.rows() > 0) c.Ftheta = MatrixXd::Zero(c.F.rows(), prob.p);
      st.components.push_back(std::move(c));
    }
    prob.stages.push_back(std::move(st));
  }
  try {
    validate(prob);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("problem JSON failed validation: ") + e.what());
  }
  return prob;
}

ConsensusProblem load_problem_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem_json(ss.str());
}

std::string problem_to_json(const ConsensusProblem& prob, int indent) {
  json j;
  j["n"] = prob.n;
  j["p"] = prob.p;
  j["H"] = matrix_json(prob.H);
  j["h"] = vector_json(prob.h);
  j["A"] = matrix_json(prob.A);
  j["b"] = vector_json(prob.b);
  json stages = json::array();
  for (const StageSet& st : prob.stages) {
    json js;
    js["nk"] = st.nk;
    json comps = json::array();
    for (const Polyhedron& c : st.components) {
      json jc;
      jc["G"] = matrix_json(c.G);
      jc["g0"] = vector_json(c.g0);
      jc["Gtheta"] = matrix_json(c.Gtheta);
      jc["F"] = matrix_json(c.F);
      jc["f0"] = vector_json(c.f0);
      jc["Ftheta"] = matrix_json(c.Ftheta);
      comps.push_back(std::move(jc));
    }
    js["components"] = std::move(comps);
    stages.push_back(std::move(js));
  }
  j["stages"] = std::move(stages);
  return j.dump(indent);
}

PwaSystem parse_pwa_json(const std::string& text) {
  json j = read_json(text);
  PwaSystem sys;
  sys.n_x = need(j, "n_x").get<Eigen::Index>();
  sys.n_u = need(j, "n_u").get<Eigen::Index>();
  sys.N = need(j, "N").get<int>();

  const json& regs = need(j, "regions");
  if (!regs.is_array() || regs.empty()) throw ParseError("regions: expected a non-empty array");
  // Either one flat list of region objects, or a list of per-step lists.
  auto parse_region = [&](const json& jr) {
    PwaRegion r;
    r.A = as_matrix(need(jr, "A"), sys.n_x, "region A");
    r.B = as_matrix(need(jr, "B"), sys.n_u, "region B");
    r.c = jr.contains("c") ? as_vector(jr["c"], "region c") : VectorXd(VectorXd::Zero(sys.n_x));
    const Eigen::Index nxu = sys.n_x + sys.n_u;
    MatrixXd F = MatrixXd::Zero(0, nxu);
    VectorXd f = VectorXd::Zero(0);
    MatrixXd G = MatrixXd::Zero(0, nxu);
    VectorXd g = VectorXd::Zero(0);
    if (jr.contains("Cf")) {
      F = as_matrix(need(jr["Cf"], "F"), nxu, "region Cf.F");
      f = as_vector(need(jr["Cf"], "f"), "region Cf.f");
    }
    if (jr.contains("Cg")) {
      G = as_matrix(need(jr["Cg"], "G"), nxu, "region Cg.G");
      g = as_vector(need(jr["Cg"], "g"), "region Cg.g");
    }
    r.C = fix_polyhedron(std::move(G), std::move(g), std::move(F), std::move(f));
    return r;
  };

  if (regs[0].is_array()) {
    for (const json& step : regs) {
      std::vector<PwaRegion> lst;
      for (const json& jr : step) lst.push_back(parse_region(jr));
      sys.regions.push_back(std::move(lst));
    }
  } else {
    std::vector<PwaRegion> lst;
    for (const json& jr : regs) lst.push_back(parse_region(jr));
    sys.regions.push_back(std::move(lst));
  }

  auto parse_mat_list = [&](const json& src, const char* what) {
    std::vector<MatrixXd> out;
    if (src.is_array() && !src.empty() && src[0].is_array() && !src[0].empty() &&
        src[0][0].is_array()) {
      for (const json& m : src) out.push_back(as_matrix(m, 0, what));
    } else {
      out.push_back(as_matrix(src, 0, what));
    }
    return out;
  };
  sys.Q = parse_mat_list(need(j, "Q"), "Q");
  sys.R = parse_mat_list(need(j, "R"), "R");

  const json& ja = need(j, "alpha");
  if (ja.is_number())
    sys.alpha.push_back(ja.get<double>());
  else if (ja.is_array())
    for (const json& a : ja) sys.alpha.push_back(a.get<double>());
  else
    throw ParseError("alpha: expected a number or an array");

  auto parse_vec_list = [&](const json& src, const char* what) {
    std::vector<VectorXd> out;
    if (!src.is_array()) throw ParseError(std::string(what) + ": expected an array");
    for (const json& v : src) out.push_back(as_vector(v, what));
    return out;
  };
  if (j.contains("x_ref")) sys.x_ref = parse_vec_list(j["x_ref"], "x_ref");
  if (j.contains("u_ref")) sys.u_ref = parse_vec_list(j["u_ref"], "u_ref");
  return sys;
}

PwaSystem load_pwa_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_pwa_json(ss.str());
}

std::string pwa_to_json(const PwaSystem& sys, int indent) {
  json j;
  j["n_x"] = sys.n_x;
  j["n_u"] = sys.n_u;
  j["N"] = sys.N;
  auto region_json = [&](const PwaRegion& r) {
    json jr;
    jr["A"] = matrix_json(r.A);
    jr["B"] = matrix_json(r.B);
    jr["c"] = vector_json(r.c);
    if (r.C.F.rows() > 0) jr["Cf"] = {{"F", matrix_json(r.C.F)}, {"f", vector_json(r.C.f)}};
    if (r.C.G.rows() > 0) jr["Cg"] = {{"G", matrix_json(r.C.G)}, {"g", vector_json(r.C.g)}};
    return jr;
  };
  if (sys.regions.size() == 1) {
    json lst = json::array();
    for (const PwaRegion& r : sys.regions[0]) lst.push_back(region_json(r));
    j["regions"] = std::move(lst);
  } else {
    json steps = json::array();
    for (const auto& step : sys.regions) {
      json lst = json::array();
      for (const PwaRegion& r : step) lst.push_back(region_json(r));
      steps.push_back(std::move(lst));
    }
    j["regions"] = std::move(steps);
  }
  if (sys.Q.size() == 1)
    j["Q"] = matrix_json(sys.Q[0]);
  else {
    json lst = json::array();
    for (const MatrixXd& m : sys.Q) lst.push_back(matrix_json(m));
    j["Q"] = std::move(lst);
  }
  if (sys.R.size() == 1)
    j["R"] = matrix_json(sys.R[0]);
  else {
    json lst = json::array();
    for (const MatrixXd& m : sys.R) lst.push_back(matrix_json(m));
    j["R"] = std::move(lst);
  }
  if (sys.alpha.size() == 1)
    j["alpha"] = sys.alpha[0];
  else
    j["alpha"] = sys.alpha;
  if (!sys.x_ref.empty()) {
    json lst = json::array();
    for (const VectorXd& v : sys.x_ref) lst.push_back(vector_json(v));
    j["x_ref"] = std::move(lst);
  }
  if (!sys.u_ref.empty()) {
    json lst = json::array();
    for (const VectorXd& v : sys.u_ref) lst.push_back(vector_json(v));
    j["u_ref"] = std::move(lst);
  }
  return j.dump(indent);
}

}  // namespace polysplit
