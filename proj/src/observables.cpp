#include "decochain/observables.hpp"

#include <stdexcept>

namespace decochain {

PauliString sigma_zz_pair(const LatticeLayout& lat, int i, int j,
                          bool both_layers) {
  if (lat.layers() != 2) {
    throw std::invalid_argument("sigma_zz_pair: needs a doubled layout");
  }
  PauliString s = PauliString::single(lat.sigma(i, Layer::u), PauliOp::Z) *
                  PauliString::single(lat.sigma(j, Layer::u), PauliOp::Z);
  if (both_layers) {
    s = s * PauliString::single(lat.sigma(i, Layer::l), PauliOp::Z) *
        PauliString::single(lat.sigma(j, Layer::l), PauliOp::Z);
  }
  return s;
}

PauliString tau_string(const LatticeLayout& lat, int k, bool both_layers) {
  if (lat.layers() != 2) {
    throw std::invalid_argument("tau_string: needs a doubled layout");
  }
  if (k < 1 || k > lat.cells()) {
    throw std::out_of_range("tau_string: k outside 1..cells");
  }
  PauliString s = PauliString::single(lat.tau(0, Layer::u), PauliOp::Z);
  if (both_layers) {
    s = s * PauliString::single(lat.tau(0, Layer::l), PauliOp::Z);
  }
  for (int j = 1; j <= k; ++j) {
    s = s * PauliString::single(lat.sigma(j, Layer::u), PauliOp::X);
    if (both_layers) {
      s = s * PauliString::single(lat.sigma(j, Layer::l), PauliOp::X);
    }
  }
  s = s * PauliString::single(lat.tau(k, Layer::u), PauliOp::Z);
  if (both_layers) {
    s = s * PauliString::single(lat.tau(k, Layer::l), PauliOp::Z);
  }
  return s;
}

}  // namespace decochain
