#include "drs/io_json.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace drs {

using nlohmann::json;

std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12e", x);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::bad_input, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error(errc::bad_input, "cannot write " + path);
  out << text;
}

DoubleComplex load_complex_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw error(errc::bad_input, std::string("invalid JSON: ") + e.what());
  }
  if (!j.contains("quads") || !j["quads"].is_array())
    throw error(errc::bad_input, "missing quads array");
  std::vector<std::array<int, 4>> quads;
  for (const auto& q : j["quads"]) {
    if (!q.is_array() || q.size() != 4)
      throw error(errc::bad_input, "quads must be 4-tuples");
    quads.push_back({q[0].get<int>(), q[1].get<int>(), q[2].get<int>(), q[3].get<int>()});
  }
  std::map<std::pair<int, int>, double> rho_map;
  if (j.contains("rho")) {
    for (const auto& r : j["rho"]) {
      int a = r["edge"][0].get<int>(), b = r["edge"][1].get<int>();
      rho_map[{std::min(a, b), std::max(a, b)}] = r["value"].get<double>();
    }
  }
  // resolve rho per quad from either diagonal
  std::vector<double> rho(quads.size(), 0.0);
  for (size_t q = 0; q < quads.size(); ++q) {
    auto dg = std::pair<int, int>{std::min(quads[q][0], quads[q][2]),
                                  std::max(quads[q][0], quads[q][2])};
    auto ds = std::pair<int, int>{std::min(quads[q][1], quads[q][3]),
                                  std::max(quads[q][1], quads[q][3])};
    auto ig = rho_map.find(dg), is = rho_map.find(ds);
    if (ig == rho_map.end() && is == rho_map.end())
      throw error(errc::bad_input, "no rho given for a quad diagonal");
    if (ig != rho_map.end()) rho[q] = ig->second;
    if (is != rho_map.end()) {
      double dual = 1.0 / is->second;
      if (ig != rho_map.end()) {
        if (std::abs(rho[q] - dual) > 1e-12 * std::max(1.0, std::abs(rho[q])))
          throw error(errc::bad_dual, "rho(e*) differs from 1/rho(e)");
      } else {
        rho[q] = dual;
      }
    }
  }
  DoubleComplex dc = DoubleComplex::build(quads, rho);
  // validate declared colours when present
  if (j.contains("vertices")) {
    for (const auto& v : j["vertices"]) {
      int id = v["id"].get<int>();
      std::string g = v["graph"].get<std::string>();
      if (id < 0 || id >= dc.vertex_count())
        throw error(errc::bad_input, "vertex id out of range");
      Graph want = (g == "G") ? Graph::gamma : Graph::gamma_star;
      if (dc.vertex_graph(id) != want)
        throw error(errc::non_bipartite, "declared colouring is inconsistent");
    }
  }
  return dc;
}

DoubleComplex load_complex_file(const std::string& path) {
  return load_complex_json(read_file(path));
}

std::string save_complex_json(const DoubleComplex& dc) {
  // the pair-keyed format cannot express double diagonals with distinct rho
  std::map<std::pair<int, int>, double> seen;
  for (int q = 0; q < dc.quad_count(); ++q) {
    auto key = std::pair<int, int>{std::min(dc.quad(q)[0], dc.quad(q)[2]),
                                   std::max(dc.quad(q)[0], dc.quad(q)[2])};
    auto [it, fresh] = seen.emplace(key, dc.rho_gamma(q));
    if (!fresh && std::abs(it->second - dc.rho_gamma(q)) > 1e-12 * it->second)
      throw error(errc::bad_input,
                  "complex not representable in the pair-keyed JSON format");
  }
  json j;
  j["vertices"] = json::array();
  for (int v = 0; v < dc.vertex_count(); ++v)
    j["vertices"].push_back(
        {{"id", v}, {"graph", dc.vertex_graph(v) == Graph::gamma ? "G" : "G*"}});
  j["quads"] = json::array();
  for (int q = 0; q < dc.quad_count(); ++q)
    j["quads"].push_back({dc.quad(q)[0], dc.quad(q)[1], dc.quad(q)[2], dc.quad(q)[3]});
  j["rho"] = json::array();
  for (int q = 0; q < dc.quad_count(); ++q)
    j["rho"].push_back({{"edge", {dc.quad(q)[0], dc.quad(q)[2]}},
                        {"value", dc.rho_gamma(q)}});
  return j.dump(2);
}

namespace {

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index jj = 0; jj < m.cols(); ++jj) row.push_back(m(i, jj));
    rows.push_back(row);
  }
  return rows;
}

json cmatrix_json(const Eigen::MatrixXcd& m) {
  json out;
  out["re"] = matrix_json(m.real());
  out["im"] = matrix_json(m.imag());
  return out;
}

}  // namespace

std::string periods_report_json(const PeriodData& pd) {
  json j;
  j["genus"] = pd.g;
  j["gram"] = matrix_json(pd.gram);
  j["pi"] = cmatrix_json(pd.pi);
  j["pi_gamma"] = cmatrix_json(pd.pi_gamma);
  j["pi_gamma_star"] = cmatrix_json(pd.pi_gamma_star);
  j["pi_diamond"] = cmatrix_json(pd.pi_diamond);
  json cycles = json::array();
  for (const Chain& c : pd.dissection.aleph) {
    json edges = json::array();
    for (auto& [e, k] : c.coef) edges.push_back({{"edge", e}, {"coef", k}});
    cycles.push_back(edges);
  }
  j["aleph"] = cycles;
  j["residuals"] = {{"duality", pd.duality_residual},
                    {"holomorphy", pd.holomorphy_residual},
                    {"period_consistency", pd.period_residual},
                    {"gram_symmetry", pd.gram_symmetry},
                    {"harmonicity", pd.harmonicity_residual},
                    {"bilinear", pd.bilinear_residual}};
  return j.dump(2);
}

std::vector<MoveScriptEntry> load_move_script(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw error(errc::bad_input, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_array()) throw error(errc::bad_input, "move script must be an array");
  std::vector<MoveScriptEntry> out;
  for (const auto& e : j) {
    MoveScriptEntry m;
    m.kind = e.at("kind").get<std::string>();
    if (e.contains("site")) m.site = e["site"].get<int>();
    if (e.contains("edge")) m.edge = e["edge"].get<int>();
    if (e.contains("quad")) m.quad = e["quad"].get<int>();
    if (e.contains("axis")) m.axis = e["axis"].get<int>();
    if (e.contains("rho")) m.rho = e["rho"].get<double>();
    out.push_back(m);
  }
  return out;
}

MoveReport run_move_script(const MarkedSurface& start,
                           const std::vector<MoveScriptEntry>& script,
                           bool trace_dimension) {
  MoveReport rep;
  rep.final_surface = start;
  rep.curvature_trace.push_back(total_curvature(rep.final_surface));
  if (trace_dimension)
    rep.holo_dim_trace.push_back(holomorphic_form_dimension(rep.final_surface.dc));
  for (size_t i = 0; i < script.size(); ++i) {
    const MoveScriptEntry& e = script[i];
    try {
      MoveResult r = [&] {
        if (e.kind == "I") return move_I(rep.final_surface, e.site);
        if (e.kind == "II") return move_II(rep.final_surface, e.site);
        if (e.kind == "III") return move_III(rep.final_surface, e.site);
        if (e.kind == "I-") return move_I_inverse(rep.final_surface, e.edge, e.rho);
        if (e.kind == "II-")
          return move_II_inverse(rep.final_surface, e.quad, e.axis, e.rho);
        throw error(errc::bad_input, "unknown move kind " + e.kind);
      }();
      rep.final_surface = std::move(r.surface);
    } catch (const error& err) {
      rep.failed_index = static_cast<int>(i);
      rep.failure = err.what();
      return rep;
    }
    rep.curvature_trace.push_back(total_curvature(rep.final_surface));
    if (trace_dimension)
      rep.holo_dim_trace.push_back(holomorphic_form_dimension(rep.final_surface.dc));
  }
  return rep;
}

std::string move_report_json(const MoveReport& rep) {
  json j;
  j["curvature"] = rep.curvature_trace;
  if (!rep.holo_dim_trace.empty()) j["holomorphic_dimension"] = rep.holo_dim_trace;
  j["failed_index"] = rep.failed_index;
  if (rep.failed_index >= 0) j["failure"] = rep.failure;
  j["final_complex"] = json::parse(save_complex_json(rep.final_surface.dc));
  double c0 = rep.curvature_trace.front();
  double worst = 0;
  for (double c : rep.curvature_trace) worst = std::max(worst, std::abs(c - c0));
  j["residuals"] = {{"curvature_drift", worst}};
  return j.dump(2);
}

}  // namespace drs
