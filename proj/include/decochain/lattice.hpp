#pragma once

#include <stdexcept>
#include <string>

namespace decochain {

enum class Layer : int { u = 0, l = 1 };
enum class Species : int { sigma = 0, tau = 1 };
enum class Boundary { periodic, open };

// Site indexing for the sigma-tau chain and its doubled (two-layer) ladder.
//
// The 1D path interleaves layers within a rung and species within a cell:
//   [sigma(0,u), sigma(0,l), tau(1/2,u), tau(1/2,l), sigma(1,u), ...]
// so a contiguous block of rungs is always a contiguous path prefix and every
// bipartition of interest sits on a single MPS bond. A single-layer layout
// (layers() == 1) drops the l entries:
//   [sigma(0), tau(1/2), sigma(1), tau(3/2), ...]
//
// tau cell index j labels the link at j + 1/2.
class LatticeLayout {
public:
  LatticeLayout(int cells, int layers = 2, Boundary bc = Boundary::periodic)
      : cells_(cells), layers_(layers), boundary_(bc) {
    if (cells < 2) throw std::invalid_argument("LatticeLayout: need at least 2 cells");
    if (layers != 1 && layers != 2)
      throw std::invalid_argument("LatticeLayout: layers must be 1 or 2");
  }

  int cells() const { return cells_; }
  int layers() const { return layers_; }
  int sites() const { return 2 * cells_ * layers_; }
  int rungs() const { return 2 * cells_; }  // physical sites per layer
  Boundary boundary() const { return boundary_; }

  // mod-L cell index (PBC wrap for any integer, including negatives)
  int wrap(int j) const {
    int m = j % cells_;
    return m < 0 ? m + cells_ : m;
  }

  int flatten(Layer layer, Species species, int j) const {
    if (j < 0 || j >= cells_) throw std::out_of_range("flatten: cell index out of range");
    if (layers_ == 1 && layer == Layer::l)
      throw std::out_of_range("flatten: single-layer layout has no lower layer");
    return 2 * layers_ * j + layers_ * static_cast<int>(species) + static_cast<int>(layer);
  }

  struct SiteLabel {
    Layer layer;
    Species species;
    int cell;
  };

  SiteLabel unflatten(int path) const {
    if (path < 0 || path >= sites()) throw std::out_of_range("unflatten: path index out of range");
    const int per_cell = 2 * layers_;
    SiteLabel s;
    s.cell = path / per_cell;
    int r = path % per_cell;
    s.species = static_cast<Species>(r / layers_);
    s.layer = static_cast<Layer>(r % layers_);
    return s;
  }

  // convenience accessors used all over the model builders
  int sigma(int j, Layer layer = Layer::u) const { return flatten(layer, Species::sigma, wrap(j)); }
  int tau(int j, Layer layer = Layer::u) const { return flatten(layer, Species::tau, wrap(j)); }

  bool operator==(const LatticeLayout& o) const {
    return cells_ == o.cells_ && layers_ == o.layers_ && boundary_ == o.boundary_;
  }

private:
  int cells_;
  int layers_;
  Boundary boundary_;
};

}  // namespace decochain
