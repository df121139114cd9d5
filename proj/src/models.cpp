#include "decochain/models.hpp"

#include <map>
#include <stdexcept>

namespace decochain {

void CliffordCircuit::add_cz(int a, int b) {
  if (a == b) throw std::invalid_argument("add_cz: control equals target");
  gates_.push_back({a, b});
}

PauliString CliffordCircuit::conjugate(const PauliString& p) const {
  // partner sets with mod-2 multiplicity (CZ is an involution)
  std::map<int, std::map<int, int>> partners;
  for (const auto& g : gates_) {
    partners[g.a][g.b] ^= 1;
    partners[g.b][g.a] ^= 1;
  }
  PauliString out(p.coefficient());
  for (const auto& [site, op] : p.factors()) {
    PauliString image = PauliString::single(site, op);
    if (op != PauliOp::Z) {  // X or Y pick up Z on every partner
      auto it = partners.find(site);
      if (it != partners.end())
        for (const auto& [other, parity] : it->second)
          if (parity) image = image * PauliString::single(other, PauliOp::Z);
    }
    out = out * image;
  }
  return out;
}

void CliffordCircuit::apply_to_state(Eigen::VectorXcd& v, int n_sites) const {
  if (n_sites > 24) throw std::invalid_argument("apply_to_state: n_sites > 24");
  const uint64_t dim = uint64_t(1) << n_sites;
  if (static_cast<uint64_t>(v.size()) != dim)
    throw std::invalid_argument("apply_to_state: state dimension mismatch");
  for (const auto& g : gates_)
    if (g.a < 0 || g.a >= n_sites || g.b < 0 || g.b >= n_sites)
      throw std::out_of_range("apply_to_state: gate outside lattice");
  for (uint64_t b = 0; b < dim; ++b) {
    int flips = 0;
    for (const auto& g : gates_)
      flips ^= static_cast<int>((b >> g.a) & (b >> g.b) & 1u);
    if (flips) v[b] = -v[b];
  }
}

namespace {

PauliString two_site(int a, PauliOp opa, int b, PauliOp opb, double coeff) {
  auto p = PauliString::single(a, opa) * PauliString::single(b, opb);
  p.scale(coeff);
  return p;
}

PauliString three_site(int a, PauliOp opa, int b, PauliOp opb, int c, PauliOp opc,
                       double coeff) {
  auto p = PauliString::single(a, opa) * PauliString::single(b, opb) *
           PauliString::single(c, opc);
  p.scale(coeff);
  return p;
}

}  // namespace

HamiltonianTerms build_h0(const LatticeLayout& lat, double j_zz, Layer layer) {
  if (lat.cells() < 2) throw std::invalid_argument("build_h0: need at least 2 cells");
  const bool pbc = lat.boundary() == Boundary::periodic;
  HamiltonianTerms h{lat, j_zz, "h0", {}};
  const int L = lat.cells();
  for (int j = 0; j < L; ++j) {
    h.terms.push_back(PauliString::single(lat.tau(j, layer), PauliOp::X, -1.0));
    h.terms.push_back(PauliString::single(lat.sigma(j, layer), PauliOp::X, -1.0));
    if (j + 1 < L || pbc)
      h.terms.push_back(two_site(lat.sigma(j, layer), PauliOp::Z,
                                 lat.sigma(j + 1, layer), PauliOp::Z, -j_zz));
  }
  return h;
}

HamiltonianTerms build_h0(int cells, double j_zz, Boundary bc) {
  return build_h0(LatticeLayout(cells, 1, bc), j_zz, Layer::u);
}

HamiltonianTerms build_h0_dw(const LatticeLayout& lat, double j_zz, Layer layer) {
  if (lat.cells() < 2) throw std::invalid_argument("build_h0_dw: need at least 2 cells");
  const bool pbc = lat.boundary() == Boundary::periodic;
  HamiltonianTerms h{lat, j_zz, "h0_dw", {}};
  const int L = lat.cells();
  for (int j = 0; j < L; ++j) {
    // -sigma^z_j tau^x_{j+1/2} sigma^z_{j+1}; wraps when j = L-1
    if (j + 1 < L || pbc)
      h.terms.push_back(three_site(lat.sigma(j, layer), PauliOp::Z,
                                   lat.tau(j, layer), PauliOp::X,
                                   lat.sigma(j + 1, layer), PauliOp::Z, -1.0));
    // -tau^z_{j-1/2} sigma^x_j tau^z_{j+1/2}; wraps when j = 0
    if (j > 0 || pbc)
      h.terms.push_back(three_site(lat.tau(j - 1, layer), PauliOp::Z,
                                   lat.sigma(j, layer), PauliOp::X,
                                   lat.tau(j, layer), PauliOp::Z, -1.0));
    if (j + 1 < L || pbc)
      h.terms.push_back(two_site(lat.sigma(j, layer), PauliOp::Z,
                                 lat.sigma(j + 1, layer), PauliOp::Z, -j_zz));
  }
  return h;
}

HamiltonianTerms build_h0_dw(int cells, double j_zz, Boundary bc) {
  return build_h0_dw(LatticeLayout(cells, 1, bc), j_zz, Layer::u);
}

CliffordCircuit build_u_dw(const LatticeLayout& lat, Layer layer) {
  CliffordCircuit c;
  const int L = lat.cells();
  const bool pbc = lat.boundary() == Boundary::periodic;
  // Eq.-(2) ordering: for each j, gates (j-1, j-1/2) then (j, j-1/2). The link
  // j-1/2 carries tau cell index j-1. For open boundary the wrap pair (j = 0)
  // is dropped.
  for (int j = 0; j < L; ++j) {
    if (j == 0 && !pbc) continue;
    const int link = lat.tau(j - 1, layer);
    c.add_cz(lat.sigma(j - 1, layer), link);
    c.add_cz(lat.sigma(j, layer), link);
  }
  return c;
}

PauliString embed_on_layer(const PauliString& p, const LatticeLayout& single_lat,
                           const LatticeLayout& doubled_lat, Layer layer) {
  if (single_lat.layers() != 1 || doubled_lat.layers() != 2 ||
      single_lat.cells() != doubled_lat.cells())
    throw std::invalid_argument("embed_on_layer: incompatible layouts");
  PauliString out(p.coefficient());
  for (const auto& [site, op] : p.factors()) {
    auto s = single_lat.unflatten(site);
    out = out * PauliString::single(doubled_lat.flatten(layer, s.species, s.cell), op);
  }
  return out;
}

HamiltonianTerms build_doubled_hamiltonian(int cells, double j_zz, Boundary bc) {
  LatticeLayout single_lat(cells, 1, bc);
  LatticeLayout doubled(cells, 2, bc);
  HamiltonianTerms h{doubled, j_zz, "doubled_dw", {}};
  auto layer_terms = build_h0_dw(single_lat, j_zz, Layer::u);
  for (const auto& t : layer_terms.terms)
    h.terms.push_back(embed_on_layer(t, single_lat, doubled, Layer::u).conjugated());
  for (const auto& t : layer_terms.terms)
    h.terms.push_back(embed_on_layer(t, single_lat, doubled, Layer::l));
  return h;
}

PauliString global_flip(const LatticeLayout& lat, Species species, Layer layer) {
  PauliString p;
  for (int j = 0; j < lat.cells(); ++j)
    p = p * PauliString::single(lat.flatten(layer, species, j), PauliOp::X);
  return p;
}

}  // namespace decochain
