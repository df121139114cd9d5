#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>

#include <Eigen/Dense>

namespace decochain {

using Complex = std::complex<double>;

enum class PauliOp : uint8_t { X = 0, Y = 1, Z = 2 };

// Signed product of single-site Pauli operators, the lingua franca for
// Hamiltonian terms, symmetry generators, channel Kraus operators and
// observables. Multiplication tracks the exact +-1, +-i phase.
class PauliString {
public:
  using Factors = std::map<int, PauliOp>;  // path index -> operator

  PauliString() : coeff_(1.0) {}
  explicit PauliString(Complex coeff) : coeff_(coeff) {}

  static PauliString identity() { return PauliString(); }
  static PauliString single(int site, PauliOp op, Complex coeff = 1.0);

  const Factors& factors() const { return factors_; }
  Complex coefficient() const { return coeff_; }
  void set_coefficient(Complex c) { coeff_ = c; }
  void scale(Complex c) { coeff_ *= c; }

  bool is_identity() const { return factors_.empty(); }
  int support_size() const { return static_cast<int>(factors_.size()); }
  int min_site() const;
  int max_site() const;

  // true iff the two strings commute (parity of anticommuting overlaps)
  bool commutes_with(const PauliString& other) const;

  // complex conjugate in the computational basis: X*=X, Z*=Z, Y*=-Y
  PauliString conjugated() const;
  // Hermitian adjoint; the factor product is Hermitian, so only the
  // coefficient conjugates
  PauliString dagger() const;
  bool is_hermitian(double tol = 0.0) const {
    return std::abs(coeff_.imag()) <= tol;
  }

  // factor maps equal (coefficient ignored)
  bool same_factors(const PauliString& other) const { return factors_ == other.factors_; }
  bool operator==(const PauliString& other) const {
    return factors_ == other.factors_ && coeff_ == other.coeff_;
  }

  friend PauliString operator*(const PauliString& a, const PauliString& b);

  // Mask form for fast statevector work. phase = coeff * i^{#Y}; the action is
  //   P |b> = phase * (-1)^{popcount(b & zmask)} |b ^ xmask>
  // with bit s of b = 1 meaning spin down at path site s.
  struct Compiled {
    uint64_t xmask = 0;
    uint64_t zmask = 0;
    Complex phase = 1.0;
  };
  Compiled compile(int n_sites) const;

  // Dense matrix on n_sites path sites (guarded; ED use only).
  Eigen::MatrixXcd to_dense(int n_sites) const;

  // out = P * in (assign), matrix-free; n <= 24 path sites.
  void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out, int n_sites) const;

  // <v|P|v> without materializing P
  Complex expectation(const Eigen::VectorXcd& v, int n_sites) const;

  std::string str() const;

  // Real-arithmetic site matrices: X and Z are themselves, Y is represented by
  // the real matrix [[0,-1],[1,0]] with the factor i pulled into ext_phase.
  // Useful for real-valued MPS contractions.
  static Eigen::Matrix2d real_site_matrix(PauliOp op);
  Complex external_phase() const;  // coeff * i^{#Y}

private:
  Factors factors_;
  Complex coeff_;
};

// parity helper shared by the dense appliers
inline int parity64(uint64_t x) { return __builtin_parityll(x); }

}  // namespace decochain
