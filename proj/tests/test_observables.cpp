#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "decochain/analysis.hpp"
#include "decochain/dmrg.hpp"
#include "decochain/ed.hpp"
#include "decochain/golden.hpp"
#include "decochain/mps_observables.hpp"
#include "doctest.h"

using namespace decochain;

namespace {

const TruncationPolicy kRoomy{128, 1e-9, 1e-8};

DmrgOptions tight_dmrg() {
  DmrgOptions opt;
  opt.tol = 1e-10;
  opt.max_sweeps = 60;
  return opt;
}

// MPS twin of compute_golden_table: same grid, same request, same locking
GoldenTable mps_table(int cells, double j_zz, const std::vector<double>& grid,
                      bool paired) {
  GoldenTable t;
  t.cells = cells;
  t.j_zz = j_zz;
  t.mode = paired ? "paired" : "simplified";
  const ObservableRequest req = golden_request(cells);
  for (double p : grid) {
    MPSState m = decohere_ground_mps(cells, j_zz, p, paired, kRoomy, tight_dmrg());
    GoldenPoint pt;
    pt.p_zz = p;
    pt.p_x = paired ? px_of_pzz(p, j_zz) : 0.0;
    pt.obs = mps_observables(m, req);
    t.points.push_back(std::move(pt));
  }
  return t;
}

GoldenTable grid_subset(const GoldenTable& t, const std::vector<double>& ps) {
  GoldenTable s = t;
  s.points.clear();
  for (const auto& pt : t.points)
    for (double p : ps)
      if (std::abs(pt.p_zz - p) < 1e-12) s.points.push_back(pt);
  return s;
}

}  // namespace

TEST_CASE("correlator and string builders place the expected factors") {
  LatticeLayout lat(3, 2);

  PauliString zz2 = sigma_zz_pair(lat, 0, 1, true);
  REQUIRE(zz2.factors().size() == 4);
  for (int site : {lat.sigma(0, Layer::u), lat.sigma(0, Layer::l),
                   lat.sigma(1, Layer::u), lat.sigma(1, Layer::l)})
    CHECK(zz2.factors().at(site) == PauliOp::Z);
  CHECK(sigma_zz_pair(lat, 0, 1, false).factors().size() == 2);
  // coincident pair multiplies to the identity string
  CHECK(sigma_zz_pair(lat, 2, 2, true).factors().empty());
  CHECK(sigma_zz_pair(lat, 2, 2, true).coefficient() == Complex(1.0, 0.0));

  PauliString s1 = tau_string(lat, 2, false);
  REQUIRE(s1.factors().size() == 4);
  CHECK(s1.factors().at(lat.tau(0, Layer::u)) == PauliOp::Z);
  CHECK(s1.factors().at(lat.sigma(1, Layer::u)) == PauliOp::X);
  CHECK(s1.factors().at(lat.sigma(2, Layer::u)) == PauliOp::X);
  CHECK(s1.factors().at(lat.tau(2, Layer::u)) == PauliOp::Z);
  CHECK(tau_string(lat, 2, true).factors().size() == 8);

  // k = L wraps the tau anchors onto each other: pure sigma-flip remains
  PauliString flip = tau_string(lat, 3, false);
  REQUIRE(flip.factors().size() == 3);
  for (int j = 0; j < 3; ++j)
    CHECK(flip.factors().at(lat.sigma(j, Layer::u)) == PauliOp::X);

  CHECK_THROWS_AS(tau_string(lat, 0, true), std::out_of_range);
  CHECK_THROWS_AS(tau_string(lat, 4, true), std::out_of_range);
  LatticeLayout single(3, 1);
  CHECK_THROWS_AS(sigma_zz_pair(single, 0, 1, false), std::invalid_argument);
  CHECK_THROWS_AS(tau_string(single, 1, false), std::invalid_argument);
}

TEST_CASE("MPS and ED correlators agree on a decohered state") {
  const int L = 3;
  DenseState se = decohere_ground_ed(L, 0.6, 0.2, true);
  MPSState m = decohere_ground_mps(L, 0.6, 0.2, true, kRoomy, tight_dmrg());
  MPSState rel = relative_state_mps(m.layout);

  for (int r = 1; r <= L; ++r) {
    CHECK(renyi2_correlator(m, 0, r % L) ==
          doctest::Approx(renyi2_correlator(se, 0, r % L)).epsilon(1e-7));
    CHECK(linear_correlator(m, rel, 0, r % L) ==
          doctest::Approx(linear_correlator(se, 0, r % L)).epsilon(1e-7));
  }
  CHECK(renyi2_correlator(m, 2, 2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(linear_correlator(m, rel, 2, 2) == doctest::Approx(1.0).epsilon(1e-12));

  for (int k = 1; k <= L; ++k) {
    MPSState rel2 = relative_state_mps(m.layout);
    DenseState sc = se;  // oracle record carries the same strings
    ObservableRequest req;
    req.string_ks = {k};
    CHECK(string_renyi2(m, k) ==
          doctest::Approx(oracle_observables(sc, req).string_renyi2.at(k))
              .epsilon(1e-7));
    CHECK(string_linear(m, rel2, k) ==
          doctest::Approx(oracle_observables(sc, req).string_linear.at(k))
              .epsilon(1e-7));
  }
}

TEST_CASE("mps_observables matches the committed golden tables at L = 3") {
  for (bool paired : {true, false}) {
    GoldenTable ref = load_golden_file(std::string(GOLDEN_DIR) + "/" +
                                       golden_filename(3, paired));
    GoldenTable got = mps_table(3, ref.j_zz, golden_grid(), paired);
    const std::string diff = diff_golden(ref, got, 1e-6);
    INFO("golden vs mps:\n", diff);
    CHECK(diff.empty());
    CHECK(got.points.front().obs.solver == "mps");
    CHECK(got.points.front().obs.bond_dim > 1);
  }
}

TEST_CASE("mps_observables matches the committed golden tables at L = 4") {
  const std::vector<double> ps = {0.0, 0.2, 0.45};
  GoldenTable ref = grid_subset(
      load_golden_file(std::string(GOLDEN_DIR) + "/" + golden_filename(4, true)),
      ps);
  REQUIRE(ref.points.size() == ps.size());
  GoldenTable got = mps_table(4, ref.j_zz, ps, true);
  const std::string diff = diff_golden(ref, got, 1e-6);
  INFO("golden vs mps:\n", diff);
  CHECK(diff.empty());

  // entanglement spectra come out ascending
  for (const auto& pt : got.points)
    for (const auto& [x, levels] : pt.obs.es_rungs)
      CHECK(std::is_sorted(levels.begin(), levels.end()));
}

TEST_CASE("pure-state reductions: squared linear observables at p = 0") {
  // ED at 1e-12
  DenseState se = decohere_ground_ed(3, 0.6, 0.0, false);
  ObservableRequest req;
  req.string_ks = {1, 2, 3};
  ObservableRecord re = oracle_observables(se, req);
  for (int r : {1, 2}) {
    const double c1 = linear_correlator(se, 0, r);
    CHECK(renyi2_correlator(se, 0, r) == doctest::Approx(c1 * c1).epsilon(1e-12));
  }
  for (int k : req.string_ks) {
    const double s1 = re.string_linear.at(k);
    CHECK(re.string_renyi2.at(k) == doctest::Approx(s1 * s1).epsilon(1e-12));
  }

  // MPS at 1e-8
  MPSState m = decohere_ground_mps(3, 0.6, 0.0, false, kRoomy, tight_dmrg());
  MPSState rel = relative_state_mps(m.layout);
  ObservableRecord rm = mps_observables(m, req);
  for (int r : {1, 2}) {
    const double c1 = linear_correlator(m, rel, 0, r);
    CHECK(renyi2_correlator(m, 0, r) == doctest::Approx(c1 * c1).epsilon(1e-8));
  }
  for (int k : req.string_ks) {
    const double s1 = rm.string_linear.at(k);
    CHECK(rm.string_renyi2.at(k) == doctest::Approx(s1 * s1).epsilon(1e-8));
  }
  // the pure normalized ground has unit purity and unit trace ratio
  CHECK(rm.purity_log == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(rm.trace_ratio == doctest::Approx(re.trace_ratio).epsilon(1e-7));
}

TEST_CASE("product states pin the chi extremes") {
  LatticeLayout lat(4, 2);
  ObservableRequest req;
  req.string_ks = {1};
  req.ee_prefix_rungs = {2, 4};

  // Choi vector of |0...0><0...0|: perfect ferromagnet, chi = 1
  std::vector<Eigen::Vector2d> up(lat.sites(), Eigen::Vector2d(1.0, 0.0));
  MPSState ferro = product_mps(lat, up);
  ObservableRecord rf = mps_observables(ferro, req);
  CHECK(rf.chi_renyi2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rf.chi_linear == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rf.chi_truncated == false);

  // Choi vector of |+...+><+...+|: no sigma-z correlations at all
  std::vector<Eigen::Vector2d> px(lat.sites(),
                                  Eigen::Vector2d(std::sqrt(0.5), std::sqrt(0.5)));
  MPSState plus = product_mps(lat, px);
  ObservableRecord rp = mps_observables(plus, req);
  CHECK(std::abs(rp.chi_renyi2) < 1e-12);
  CHECK(std::abs(rp.chi_linear) < 1e-12);
  CHECK(std::abs(rp.string_renyi2.at(1)) < 1e-12);
  CHECK(std::abs(rp.string_linear.at(1)) < 1e-12);

  // product state: no entanglement anywhere
  for (int x : req.ee_prefix_rungs) {
    CHECK(rp.ee_rungs.at(x) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(rp.es_rungs.at(x).size() == 1);
    CHECK(rp.es_rungs.at(x).front() == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("cluster fixed point: unit strings and 16-fold ES") {
  MPSState m = decohere_ground_mps(3, 0.0, 0.0, false, kRoomy, tight_dmrg());
  ObservableRequest req;
  req.string_ks = {1, 2};
  req.ee_prefix_rungs = {3};  // half cut of the 6-rung doubled ladder
  ObservableRecord rec = mps_observables(m, req);

  for (int k : req.string_ks) {
    CHECK(rec.string_renyi2.at(k) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(rec.string_linear.at(k) == doctest::Approx(1.0).epsilon(1e-8));
  }
  CHECK(rec.ee_rungs.at(3) == doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-7));
  const auto& es = rec.es_rungs.at(3);
  REQUIRE(es.size() == 16);
  CHECK(degeneracy_count(es) == 16);
  for (double level : es)
    CHECK(level == doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("k = L string reduces to the global flip symmetry at p = 0") {
  MPSState m = decohere_ground_mps(3, 0.6, 0.0, false, kRoomy, tight_dmrg());
  MPSState rel = relative_state_mps(m.layout);
  CHECK(std::abs(string_linear(m, rel, 3)) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(string_renyi2(m, 3)) == doctest::Approx(1.0).epsilon(1e-9));

  DenseState se = decohere_ground_ed(3, 0.6, 0.0, false);
  ObservableRequest req;
  req.string_ks = {3};
  ObservableRecord re = oracle_observables(se, req);
  CHECK(std::abs(re.string_linear.at(3)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("observables are normalization-independent ratios") {
  DenseState s = decohere_ground_ed(3, 0.6, 0.3, true);
  ObservableRequest req;
  req.string_ks = {1, 2};
  ObservableRecord base = oracle_observables(s, req);

  DenseState scaled = s;
  scaled.v *= 3.7;
  ObservableRecord r2 = oracle_observables(scaled, req);
  CHECK(r2.chi_renyi2 == doctest::Approx(base.chi_renyi2).epsilon(1e-13));
  CHECK(r2.chi_linear == doctest::Approx(base.chi_linear).epsilon(1e-13));
  for (int k : req.string_ks) {
    CHECK(r2.string_renyi2.at(k) ==
          doctest::Approx(base.string_renyi2.at(k)).epsilon(1e-13));
    CHECK(r2.string_linear.at(k) ==
          doctest::Approx(base.string_linear.at(k)).epsilon(1e-13));
  }

  // norm bookkeeping moves only the trace/purity fields, never the ratios
  MPSState m = decohere_ground_mps(3, 0.6, 0.3, true, kRoomy, tight_dmrg());
  ObservableRecord mb = mps_observables(m, req);
  m.norm_log += 1.7;
  ObservableRecord ms = mps_observables(m, req);
  CHECK(ms.chi_renyi2 == doctest::Approx(mb.chi_renyi2).epsilon(1e-14));
  CHECK(ms.chi_linear == doctest::Approx(mb.chi_linear).epsilon(1e-14));
  CHECK(ms.trace_ratio ==
        doctest::Approx(mb.trace_ratio * std::exp(1.7)).epsilon(1e-12));
  CHECK(ms.purity_log == doctest::Approx(mb.purity_log + 3.4).epsilon(1e-12));
}

TEST_CASE("correlators are translation invariant on the periodic chain") {
  MPSState m = decohere_ground_mps(4, 0.6, 0.3, true, kRoomy, tight_dmrg());
  MPSState rel = relative_state_mps(m.layout);
  for (int r = 1; r <= 2; ++r) {
    const double c2 = renyi2_correlator(m, 0, r);
    const double c1 = linear_correlator(m, rel, 0, r);
    for (int s = 1; s <= 3; ++s) {
      CHECK(renyi2_correlator(m, s, s + r) == doctest::Approx(c2).epsilon(1e-6));
      CHECK(linear_correlator(m, rel, s, s + r) ==
            doctest::Approx(c1).epsilon(1e-6));
    }
  }
}

TEST_CASE("relative state is invariant under paired rung flips") {
  LatticeLayout lat(3, 2);
  MPSState rel = relative_state_mps(lat);
  for (int rung = 0; rung < lat.rungs(); ++rung) {
    MPSState flipped = relative_state_mps(lat);
    apply_pauli_product(flipped,
                        PauliString::single(2 * rung, PauliOp::X) *
                            PauliString::single(2 * rung + 1, PauliOp::X));
    CHECK(std::abs(overlap(flipped, rel) - Complex(1.0, 0.0)) < 1e-12);
    CHECK(flipped.norm_log == doctest::Approx(rel.norm_log).epsilon(1e-14));
  }
}

TEST_CASE("default string length follows floor(L/2) - 1 with clamping") {
  CHECK(default_string_k(10) == 4);
  CHECK(default_string_k(12) == 5);
  CHECK(default_string_k(4) == 1);
  CHECK(default_string_k(3) == 1);
  CHECK(default_string_k(2) == 1);
}

TEST_CASE("observable requests are range-checked") {
  LatticeLayout lat(3, 2);
  std::vector<Eigen::Vector2d> up(lat.sites(), Eigen::Vector2d(1.0, 0.0));
  MPSState m = product_mps(lat, up);

  ObservableRequest bad_k;
  bad_k.string_ks = {0};
  CHECK_THROWS_AS(mps_observables(m, bad_k), std::invalid_argument);
  bad_k.string_ks = {4};
  CHECK_THROWS_AS(mps_observables(m, bad_k), std::invalid_argument);

  ObservableRequest bad_x;
  bad_x.ee_prefix_rungs = {0};
  CHECK_THROWS_AS(mps_observables(m, bad_x), std::invalid_argument);
  bad_x.ee_prefix_rungs = {6};
  CHECK_THROWS_AS(mps_observables(m, bad_x), std::invalid_argument);

  LatticeLayout single(3, 1);
  MPSState sm = product_mps(single, std::vector<Eigen::Vector2d>(
                                        single.sites(), Eigen::Vector2d(1, 0)));
  ObservableRequest empty;
  CHECK_THROWS_AS(mps_observables(sm, empty), std::invalid_argument);
}
