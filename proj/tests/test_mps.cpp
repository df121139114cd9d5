#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include <Eigen/Dense>

#include "decochain/ed.hpp"
#include "decochain/mps.hpp"

using namespace decochain;

namespace {

// arbitrary-tensor MPS brought into canonical unit-norm form by two QR sweeps
MPSState random_bond_mps(const LatticeLayout& lay, int chi, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  MPSState m{lay, {}, {}, 0, 0.0, 0.0, {}};
  const int n = lay.sites();
  m.a.resize(n);
  m.schmidt.assign(n + 1, Eigen::VectorXd());
  for (int i = 0; i < n; ++i) {
    const int dl = i == 0 ? 1 : chi;
    const int dr = i == n - 1 ? 1 : chi;
    for (int s = 0; s < 2; ++s) {
      m.a[i][s].resize(dl, dr);
      for (int r = 0; r < dl; ++r)
        for (int c = 0; c < dr; ++c) m.a[i][s](r, c) = g(rng);
    }
  }
  move_center(m, n - 1);
  move_center(m, 0);
  renormalize(m);
  m.norm_log = 0.0;
  return m;
}

bool left_isometric(const std::array<Eigen::MatrixXd, 2>& a, double tol) {
  Eigen::MatrixXd g = a[0].transpose() * a[0] + a[1].transpose() * a[1];
  return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).norm() < tol;
}

bool right_isometric(const std::array<Eigen::MatrixXd, 2>& a, double tol) {
  Eigen::MatrixXd g = a[0] * a[0].transpose() + a[1] * a[1].transpose();
  return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).norm() < tol;
}

}  // namespace

TEST_CASE("product_mps pins amplitudes LSB-first") {
  const LatticeLayout lay(2, 1);  // 4 path sites
  std::vector<Eigen::Vector2d> vecs{{1.0, 0.0},
                                    {0.0, 1.0},
                                    {1.0, 1.0},
                                    {1.0, -1.0}};
  MPSState m = product_mps(lay, vecs);
  Eigen::VectorXcd v = to_statevector(m);
  CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-14));
  // site 0 fixed up, site 1 fixed down: only indices with bit0=0, bit1=1
  for (int b = 0; b < 16; ++b) {
    const double amp = std::abs(v(b));
    if ((b & 1) == 0 && (b & 2) != 0)
      CHECK(amp == doctest::Approx(0.5).epsilon(1e-14));
    else
      CHECK(amp == 0.0);
  }
  // sign pattern of site 3: (1,-1)/sqrt(2) flips sign with bit 3
  CHECK(v(2).real() * v(10).real() < 0.0);
  CHECK_THROWS(product_mps(lay, {vecs[0]}));
  CHECK_THROWS(product_mps(lay, {vecs[0], vecs[1], vecs[2], {0.0, 0.0}}));
}

TEST_CASE("random_product_mps deterministic, normalized, bond 1") {
  const LatticeLayout lay(3, 2);
  MPSState m1 = random_product_mps(lay, 42);
  MPSState m2 = random_product_mps(lay, 42);
  MPSState m3 = random_product_mps(lay, 43);
  CHECK(m1.max_bond_dim() == 1);
  Eigen::VectorXcd v1 = to_statevector(m1);
  Eigen::VectorXcd v2 = to_statevector(m2);
  Eigen::VectorXcd v3 = to_statevector(m3);
  CHECK((v1 - v2).norm() == 0.0);
  CHECK((v1 - v3).norm() > 1e-3);
  CHECK(v1.norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("relative_state_mps matches the dense Choi vector of the identity") {
  const LatticeLayout lay(2, 2);  // 8 path sites, 4 rungs
  MPSState rel = relative_state_mps(lay);
  CHECK(rel.norm_log == doctest::Approx(lay.cells() * std::log(2.0)).epsilon(1e-14));
  Eigen::VectorXcd v = to_statevector(rel);
  CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-14));
  Eigen::VectorXcd dense = dense_relative_state(lay);
  const double scale = std::exp(rel.norm_log);
  for (int b = 0; b < v.size(); ++b)
    CHECK(std::abs(scale * v(b) - dense(b)) < 1e-13);
  // every rung is a Bell pair: Z_u Z_l = X_u X_l = +1
  for (int r = 0; r < lay.rungs(); ++r) {
    PauliString zz = PauliString::single(2 * r, PauliOp::Z) *
                     PauliString::single(2 * r + 1, PauliOp::Z);
    PauliString xx = PauliString::single(2 * r, PauliOp::X) *
                     PauliString::single(2 * r + 1, PauliOp::X);
    CHECK(expectation_pauli(rel, zz).real() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(expectation_pauli(rel, xx).real() == doctest::Approx(1.0).epsilon(1e-13));
  }
  // intra-rung bonds carry a Bell spectrum, inter-rung bonds a product one
  MPSState work = rel;
  const Eigen::VectorXd& s1 = schmidt_spectrum(work, 1);
  CHECK(s1.size() == 2);
  CHECK(s1(0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-13));
  CHECK(entanglement_entropy(work, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(schmidt_spectrum(work, 2).size() == 1);
  CHECK(entanglement_entropy(work, 2) == doctest::Approx(0.0).epsilon(1e-12));
  auto es = entanglement_spectrum(work, 3, 20);
  REQUIRE(es.size() == 2);
  CHECK(es[0] == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(es[1] == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK_THROWS(relative_state_mps(LatticeLayout(2, 1)));
}

TEST_CASE("move_center is exact and leaves isometries on both flanks") {
  const LatticeLayout lay(2, 2);
  MPSState m = random_bond_mps(lay, 5, 7);
  const Eigen::VectorXcd v0 = to_statevector(m);
  CHECK(v0.norm() == doctest::Approx(1.0).epsilon(1e-12));
  for (int target : {5, 0, 3, 7, 2}) {
    move_center(m, target);
    CHECK(m.center == target);
    for (int i = 0; i < target; ++i) CHECK(left_isometric(m.a[i], 1e-12));
    for (int i = target + 1; i < m.n_sites(); ++i)
      CHECK(right_isometric(m.a[i], 1e-12));
    CHECK((to_statevector(m) - v0).norm() < 1e-12);
  }
  CHECK_THROWS(move_center(m, -1));
  CHECK_THROWS(move_center(m, m.n_sites()));
}

TEST_CASE("schmidt spectrum matches the dense reduced density matrix") {
  const LatticeLayout lay(2, 2);
  const int n = lay.sites();
  MPSState m = random_bond_mps(lay, 6, 11);
  const Eigen::VectorXcd v = to_statevector(m);
  for (int bond = 1; bond < n; ++bond) {
    std::vector<int> prefix(bond);
    for (int i = 0; i < bond; ++i) prefix[i] = i;
    Eigen::MatrixXcd rho = reduced_density_matrix(v, n, prefix);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    const Eigen::VectorXd& s = schmidt_spectrum(m, bond);
    CHECK(s.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
    double dense_ee = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      const double w = es.eigenvalues()(i);
      if (w > 1e-14) dense_ee -= w * std::log(w);
    }
    // eigenvalues ascend; schmidt descends
    for (int i = 0; i < s.size(); ++i) {
      const double lam = es.eigenvalues()(es.eigenvalues().size() - 1 - i);
      CHECK(s(i) * s(i) == doctest::Approx(lam).epsilon(1e-10));
    }
    CHECK(entanglement_entropy(m, bond) == doctest::Approx(dense_ee).epsilon(1e-10));
  }
  CHECK_THROWS(schmidt_spectrum(m, 0));
  CHECK_THROWS(schmidt_spectrum(m, n));
}

TEST_CASE("overlap and expectations agree with dense contractions") {
  const LatticeLayout lay(2, 2);
  const int n = lay.sites();
  MPSState a = random_bond_mps(lay, 4, 3);
  MPSState b = random_bond_mps(lay, 5, 4);
  const Eigen::VectorXcd va = to_statevector(a);
  const Eigen::VectorXcd vb = to_statevector(b);
  CHECK(std::abs(overlap(a, a) - Complex(1.0)) < 1e-12);
  CHECK(std::abs(overlap(a, b) - va.dot(vb)) < 1e-12);

  std::vector<PauliString> probes;
  probes.push_back(PauliString::single(0, PauliOp::Z));
  probes.push_back(PauliString::single(2, PauliOp::X) *
                   PauliString::single(5, PauliOp::X));
  probes.push_back(PauliString::single(1, PauliOp::Y));
  probes.push_back(PauliString::single(0, PauliOp::Y) *
                   PauliString::single(3, PauliOp::Y) *
                   PauliString::single(6, PauliOp::Z));
  probes.push_back(PauliString::single(4, PauliOp::X, Complex(0.0, 1.0)));
  PauliString ident;
  ident.set_coefficient(-2.5);
  probes.push_back(ident);
  for (const auto& p : probes) {
    Eigen::VectorXcd pv(va.size());
    p.apply(vb, pv, n);
    CHECK(std::abs(cross_expectation(a, p, b) - va.dot(pv)) < 1e-12);
    CHECK(std::abs(expectation_pauli(b, p) - p.expectation(vb, n)) < 1e-12);
  }
  PauliString outside = PauliString::single(n, PauliOp::Z);
  CHECK_THROWS(expectation_pauli(a, outside));
}

TEST_CASE("apply_pauli_product: dense agreement, involution, phase rules") {
  const LatticeLayout lay(2, 2);
  const int n = lay.sites();
  MPSState m = random_bond_mps(lay, 4, 9);
  const Eigen::VectorXcd v0 = to_statevector(m);

  // YY has external phase i^2 = -1: real, folded into the tensors
  PauliString p = PauliString::single(0, PauliOp::Y) *
                  PauliString::single(3, PauliOp::Y) *
                  PauliString::single(5, PauliOp::X);
  Eigen::VectorXcd pv(v0.size());
  p.apply(v0, pv, n);
  apply_pauli_product(m, p);
  CHECK(m.norm_log == doctest::Approx(0.0).epsilon(1e-14));
  CHECK((to_statevector(m) - pv).norm() < 1e-12);
  apply_pauli_product(m, p);  // p^2 = +1
  CHECK((to_statevector(m) - v0).norm() < 1e-12);

  // scalar coefficients: magnitude goes to norm_log, sign to the tensors
  PauliString scaled = PauliString::single(2, PauliOp::Z, -3.0);
  apply_pauli_product(m, scaled);
  CHECK(m.norm_log == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  Eigen::VectorXcd zv(v0.size());
  PauliString::single(2, PauliOp::Z, -1.0).apply(v0, zv, n);
  CHECK((to_statevector(m) - zv).norm() < 1e-12);

  // a lone Y has phase i: not representable with real tensors
  CHECK_THROWS(apply_pauli_product(m, PauliString::single(1, PauliOp::Y)));
  CHECK_THROWS(apply_pauli_product(m, PauliString::single(0, PauliOp::X, 0.0)));
  CHECK_THROWS(apply_pauli_product(m, PauliString::single(n, PauliOp::X)));
}

TEST_CASE("svd shifts truncate against the policy and track the loss") {
  const LatticeLayout lay(2, 2);
  MPSState m = random_bond_mps(lay, 6, 21);
  MPSState ref = m;
  const Eigen::VectorXcd v0 = to_statevector(ref);

  // exact shifts: no loss, state intact
  move_center(m, 4);
  CHECK(svd_shift_left(m, nullptr) == 0.0);
  CHECK(svd_shift_right(m, nullptr) == doctest::Approx(0.0).epsilon(1e-24));
  CHECK(m.trunc_error < 1e-20);
  CHECK((to_statevector(m) - v0).norm() < 1e-12);

  // brutal cap: loss recorded and consistent with the new fidelity
  TruncationPolicy tight{1, 0.0, 1e-8};
  move_center(m, 4);
  const double disc = svd_shift_left(m, &tight);
  CHECK(disc > 1e-6);  // a chi=6 random state is far from a product state
  CHECK(m.trunc_error == doctest::Approx(disc).epsilon(1e-12));
  CHECK(m.schmidt[4].size() == 1);
  renormalize(m);
  const double fid = std::abs(overlap(ref, m));
  CHECK(fid * fid == doctest::Approx(1.0 - disc).epsilon(1e-10));
}

TEST_CASE("renormalize pushes scale into norm_log") {
  const LatticeLayout lay(2, 1);
  MPSState m = random_bond_mps(lay, 3, 5);
  const Eigen::VectorXcd v0 = to_statevector(m);
  const double before = m.norm_log;
  for (int s = 0; s < 2; ++s) m.a[m.center][s] *= 3.0;
  const double pushed = renormalize(m);
  CHECK(pushed == doctest::Approx(std::log(3.0)).epsilon(1e-13));
  CHECK(m.norm_log == doctest::Approx(before + std::log(3.0)).epsilon(1e-13));
  CHECK((to_statevector(m) - v0).norm() < 1e-12);
}

TEST_CASE("checkpoint round trip is lossless") {
  const LatticeLayout lay(3, 2, Boundary::open);
  MPSState m = random_bond_mps(lay, 5, 13);
  move_center(m, 4);
  schmidt_spectrum(m, 6);
  m.norm_log = 1.25;
  m.trunc_error = 3e-9;
  m.warnings.push_back("gate window [2,5]: discarded 1e-7 > budget 1e-8");
  const std::string path = "mps_roundtrip.ckpt";
  save_mps(m, path);
  MPSState r = load_mps(path);
  std::remove(path.c_str());
  CHECK(r.layout == m.layout);
  CHECK(r.center == m.center);
  CHECK(r.norm_log == m.norm_log);
  CHECK(r.trunc_error == m.trunc_error);
  CHECK(r.warnings == m.warnings);
  REQUIRE(r.n_sites() == m.n_sites());
  for (int i = 0; i < m.n_sites(); ++i)
    for (int s = 0; s < 2; ++s) {
      REQUIRE(r.a[i][s].rows() == m.a[i][s].rows());
      REQUIRE(r.a[i][s].cols() == m.a[i][s].cols());
      CHECK((r.a[i][s] - m.a[i][s]).norm() == 0.0);
    }
  for (int b = 0; b <= m.n_sites(); ++b) {
    REQUIRE(r.schmidt[b].size() == m.schmidt[b].size());
    if (m.schmidt[b].size() > 0)
      CHECK((r.schmidt[b] - m.schmidt[b]).norm() == 0.0);
  }
  CHECK_THROWS(load_mps("no_such_file.ckpt"));
}

TEST_CASE("svd_split reconstructs and reports discarded weight") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  Eigen::MatrixXd theta(8, 6);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 6; ++c) theta(r, c) = g(rng);

  SplitResult full = svd_split(theta, nullptr);
  CHECK(full.discarded == 0.0);
  CHECK(full.s.norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(full.theta_norm == doctest::Approx(theta.norm()).epsilon(1e-13));
  Eigen::MatrixXd rebuilt =
      full.u * (full.s * full.theta_norm).asDiagonal() * full.vt;
  CHECK((rebuilt - theta).norm() < 1e-12);
  for (int i = 1; i < full.s.size(); ++i) CHECK(full.s(i) <= full.s(i - 1));

  TruncationPolicy pol{3, 0.0, 1e-8};
  SplitResult cut = svd_split(theta, &pol);
  REQUIRE(cut.s.size() == 3);
  const double kept_scale = cut.theta_norm * std::sqrt(1.0 - cut.discarded);
  Eigen::MatrixXd approx = cut.u * (cut.s * kept_scale).asDiagonal() * cut.vt;
  CHECK((approx - theta).squaredNorm() ==
        doctest::Approx(cut.discarded * theta.squaredNorm()).epsilon(1e-10));

  CHECK_THROWS(svd_split(Eigen::MatrixXd::Zero(4, 4), nullptr));
}
