#include "decochain/golden.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "decochain/record_json.hpp"

namespace decochain {

using nlohmann::json;

json record_to_json(const ObservableRecord& r) {
  json j;
  j["chi_renyi2"] = r.chi_renyi2;
  j["chi_linear"] = r.chi_linear;
  j["chi_truncated"] = r.chi_truncated;
  json s2, s1;
  for (const auto& [k, v] : r.string_renyi2) s2[std::to_string(k)] = v;
  for (const auto& [k, v] : r.string_linear) s1[std::to_string(k)] = v;
  j["string_renyi2"] = std::move(s2);
  j["string_linear"] = std::move(s1);
  json ee, es;
  for (const auto& [x, v] : r.ee_rungs) ee[std::to_string(x)] = v;
  for (const auto& [x, v] : r.es_rungs) es[std::to_string(x)] = v;
  j["ee_rungs"] = std::move(ee);
  j["es_rungs"] = std::move(es);
  j["purity_log"] = r.purity_log;
  j["trace_ratio"] = r.trace_ratio;
  return j;
}

ObservableRecord record_from_json(const json& j) {
  ObservableRecord r;
  r.chi_renyi2 = j.at("chi_renyi2").get<double>();
  r.chi_linear = j.at("chi_linear").get<double>();
  r.chi_truncated = j.at("chi_truncated").get<bool>();
  for (const auto& [k, v] : j.at("string_renyi2").items())
    r.string_renyi2[std::stoi(k)] = v.get<double>();
  for (const auto& [k, v] : j.at("string_linear").items())
    r.string_linear[std::stoi(k)] = v.get<double>();
  for (const auto& [k, v] : j.at("ee_rungs").items())
    r.ee_rungs[std::stoi(k)] = v.get<double>();
  for (const auto& [k, v] : j.at("es_rungs").items())
    r.es_rungs[std::stoi(k)] = v.get<std::vector<double>>();
  r.purity_log = j.at("purity_log").get<double>();
  r.trace_ratio = j.at("trace_ratio").get<double>();
  r.solver = j.value("solver", std::string("ed"));
  r.bond_dim = j.value("bond_dim", 0);
  r.trunc_error = j.value("trunc_error", 0.0);
  return r;
}

namespace {

// -ln(lambda) levels deeper than this sit near the eigenvalue floor where the
// dense eigensolver only produces noise; diffs ignore them
constexpr double kEsDiffCeiling = 23.0;

struct DiffSink {
  std::ostringstream out;
  double tol;

  void scalar(const std::string& what, double a, double b) {
    if (std::abs(a - b) > tol * std::max(1.0, std::abs(a)))
      out << what << ": " << a << " vs " << b << "\n";
  }
  void exact(const std::string& what, double a, double b) {
    if (a != b) out << what << ": " << a << " vs " << b << "\n";
  }
};

}  // namespace

std::vector<double> golden_grid() { return {0.0, 0.1, 0.2, 0.3, 0.45}; }

ObservableRequest golden_request(int cells) {
  ObservableRequest req;
  for (int k = 1; k <= cells; ++k) req.string_ks.push_back(k);
  std::vector<int> cuts = {4, cells};
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  for (int x : cuts)
    if (x >= 1 && x < 2 * cells) req.ee_prefix_rungs.push_back(x);
  return req;
}

std::string golden_filename(int cells, bool paired) {
  std::ostringstream name;
  name << "ed_L" << cells << (paired ? "_paired" : "_simplified") << ".json";
  return name.str();
}

GoldenTable compute_golden_table(int cells, double j_zz,
                                 const std::vector<double>& grid, bool paired,
                                 int dense_max_sites) {
  GoldenTable t;
  t.cells = cells;
  t.j_zz = j_zz;
  t.mode = paired ? "paired" : "simplified";

  auto g = exact_ground_state(build_doubled_hamiltonian(cells, j_zz),
                              dense_max_sites);
  t.solver = g.solver;
  t.energy = g.energy;
  t.residual = g.residual;
  t.degenerate = g.degenerate;

  DenseState ground{LatticeLayout(cells, 2), std::move(g.basis.front()), 0.0};
  fix_choi_phase(ground);

  const ObservableRequest req = golden_request(cells);
  for (double p : grid) {
    GoldenPoint pt;
    pt.p_zz = p;
    pt.p_x = paired ? px_of_pzz(p, j_zz) : 0.0;
    DenseState s = decohere_state_ed(ground, j_zz, p, paired);
    pt.obs = oracle_observables(s, req);
    t.points.push_back(std::move(pt));
  }
  return t;
}

std::string golden_to_json(const GoldenTable& t) {
  json j;
  j["schema"] = "decochain-golden-1";
  j["cells"] = t.cells;
  j["j_zz"] = t.j_zz;
  j["mode"] = t.mode;
  j["solver"] = {{"name", t.solver},
                 {"energy", t.energy},
                 {"residual", t.residual},
                 {"degenerate", t.degenerate}};
  json pts = json::array();
  for (const auto& p : t.points) {
    json row = record_to_json(p.obs);
    row["p_zz"] = p.p_zz;
    row["p_x"] = p.p_x;
    pts.push_back(std::move(row));
  }
  j["points"] = std::move(pts);
  return j.dump(2) + "\n";
}

GoldenTable golden_from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.at("schema").get<std::string>() != "decochain-golden-1")
    throw std::runtime_error("golden_from_json: unknown schema");
  GoldenTable t;
  t.cells = j.at("cells").get<int>();
  t.j_zz = j.at("j_zz").get<double>();
  t.mode = j.at("mode").get<std::string>();
  const auto& sv = j.at("solver");
  t.solver = sv.at("name").get<std::string>();
  t.energy = sv.at("energy").get<double>();
  t.residual = sv.at("residual").get<double>();
  t.degenerate = sv.at("degenerate").get<bool>();
  for (const auto& row : j.at("points")) {
    GoldenPoint p;
    p.p_zz = row.at("p_zz").get<double>();
    p.p_x = row.at("p_x").get<double>();
    p.obs = record_from_json(row);
    t.points.push_back(std::move(p));
  }
  return t;
}

GoldenTable load_golden_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_golden_file: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return golden_from_json(buf.str());
}

void write_golden_file(const GoldenTable& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_golden_file: cannot open " + path);
  out << golden_to_json(t);
  if (!out) throw std::runtime_error("write_golden_file: write failed " + path);
}

std::string diff_golden(const GoldenTable& a, const GoldenTable& b, double tol) {
  DiffSink d{{}, tol};
  if (a.cells != b.cells) d.out << "cells: " << a.cells << " vs " << b.cells << "\n";
  if (a.mode != b.mode) d.out << "mode: " << a.mode << " vs " << b.mode << "\n";
  d.exact("j_zz", a.j_zz, b.j_zz);
  if (a.points.size() != b.points.size()) {
    d.out << "points: " << a.points.size() << " vs " << b.points.size() << "\n";
    return d.out.str();
  }
  for (size_t i = 0; i < a.points.size(); ++i) {
    const auto& pa = a.points[i];
    const auto& pb = b.points[i];
    std::ostringstream tag;
    tag << "[" << a.mode << " L=" << a.cells << " p_zz=" << pa.p_zz << "] ";
    const std::string at = tag.str();
    d.exact(at + "p_zz", pa.p_zz, pb.p_zz);
    d.scalar(at + "p_x", pa.p_x, pb.p_x);
    d.scalar(at + "chi_renyi2", pa.obs.chi_renyi2, pb.obs.chi_renyi2);
    d.scalar(at + "chi_linear", pa.obs.chi_linear, pb.obs.chi_linear);
    if (pa.obs.chi_truncated != pb.obs.chi_truncated)
      d.out << at << "chi_truncated mismatch\n";
    auto maps = [&](const char* name, const std::map<int, double>& ma,
                    const std::map<int, double>& mb) {
      if (ma.size() != mb.size()) {
        d.out << at << name << ": size " << ma.size() << " vs " << mb.size() << "\n";
        return;
      }
      for (const auto& [k, v] : ma) {
        auto it = mb.find(k);
        if (it == mb.end())
          d.out << at << name << "[" << k << "] missing\n";
        else
          d.scalar(at + name + ("[" + std::to_string(k) + "]"), v, it->second);
      }
    };
    maps("string_renyi2", pa.obs.string_renyi2, pb.obs.string_renyi2);
    maps("string_linear", pa.obs.string_linear, pb.obs.string_linear);
    maps("ee_rungs", pa.obs.ee_rungs, pb.obs.ee_rungs);
    d.scalar(at + "purity_log", pa.obs.purity_log, pb.obs.purity_log);
    d.scalar(at + "trace_ratio", pa.obs.trace_ratio, pb.obs.trace_ratio);
    for (const auto& [x, la] : pa.obs.es_rungs) {
      auto it = pb.obs.es_rungs.find(x);
      if (it == pb.obs.es_rungs.end()) {
        d.out << at << "es_rungs[" << x << "] missing\n";
        continue;
      }
      const auto& lb = it->second;
      const size_t n = std::min(la.size(), lb.size());
      for (size_t l = 0; l < n; ++l) {
        if (la[l] > kEsDiffCeiling || lb[l] > kEsDiffCeiling) break;
        d.scalar(at + "es_rungs[" + std::to_string(x) + "][" + std::to_string(l) + "]",
                 la[l], lb[l]);
      }
      // a length mismatch only matters while levels are still above the floor
      if (la.size() != lb.size()) {
        const auto& longer = la.size() > lb.size() ? la : lb;
        if (n < longer.size() && longer[n] < kEsDiffCeiling)
          d.out << at << "es_rungs[" << x << "]: length " << la.size() << " vs "
                << lb.size() << "\n";
      }
    }
  }
  return d.out.str();
}

}  // namespace decochain
