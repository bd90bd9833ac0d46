#pragma once

#include <array>
#include <memory>
#include <vector>

// Eigenbasis of the Laplacian on box domains (intervals and rectangles)
// with Dirichlet or Neumann boundary conditions, plus the grid <-> spectral
// transforms and dealiased pointwise products used by the nonlinearities.

namespace semiflow {

enum class Bc { Dirichlet, Neumann };

struct BasisSpec {
  int dim = 1;                              // 1 or 2
  std::array<double, 2> lengths{1.0, 1.0};  // domain (0,L1) x (0,L2)
  Bc bc = Bc::Neumann;
  std::array<int, 2> modes{1, 1};  // cutoff K per axis
  std::array<int, 2> grid{2, 2};   // collocation points per axis, >= 2K
};

/// Immutable eigenbasis: eigenvalue table, eigenfunction evaluation on a
/// midpoint collocation grid, exact quadrature for band-limited products.
class Basis {
 public:
  static std::shared_ptr<const Basis> build(const BasisSpec& spec);

  const BasisSpec& spec() const { return spec_; }
  int dim() const { return spec_.dim; }
  int num_modes() const { return num_modes_; }
  int num_grid() const { return num_grid_; }
  double volume() const { return volume_; }
  double quad_weight() const { return quad_weight_; }  // per grid point

  /// Laplacian eigenvalue lambda_k >= 0 for the flattened mode index.
  double eigenvalue(int k) const { return eigenvalues_[k]; }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }

  /// Euclidean magnitude of the frequency multi-index, floored at 1.
  double mode_magnitude(int k) const { return mode_magnitudes_[k]; }

  /// Collocation coordinates along one axis (midpoint grid).
  const std::vector<double>& grid_coords(int axis) const;

  /// Evaluate coefficients on the collocation grid (row-major over axes).
  std::vector<double> to_grid(const std::vector<double>& coeffs) const;

  /// L2 projection of grid values onto the basis; exact inverse of to_grid
  /// on band-limited data.
  std::vector<double> from_grid(const std::vector<double>& values) const;

  /// Grid values of the partial derivative along `axis`.
  std::vector<double> gradient_grid(const std::vector<double>& coeffs,
                                    int axis) const;

  /// Frequency index along one axis of a flattened mode index.
  int freq(int k, int axis) const;

  bool compatible(const Basis& other) const;

 private:
  explicit Basis(const BasisSpec& spec);

  BasisSpec spec_;
  int num_modes_ = 0;
  int num_grid_ = 0;
  double volume_ = 0.0;
  double quad_weight_ = 0.0;
  std::vector<double> eigenvalues_;
  std::vector<double> mode_magnitudes_;
  // Per axis: eigenfunction and derivative values, grid x modes, row-major.
  std::array<std::vector<double>, 2> eval_;
  std::array<std::vector<double>, 2> deval_;
  std::array<std::vector<double>, 2> coords_;
};

using BasisPtr = std::shared_ptr<const Basis>;

/// Scalar field stored as real coefficients in the eigenbasis.
struct SpectralField {
  BasisPtr basis;
  std::vector<double> coeffs;

  SpectralField() = default;
  explicit SpectralField(BasisPtr b)
      : basis(std::move(b)), coeffs(basis->num_modes(), 0.0) {}
  SpectralField(BasisPtr b, std::vector<double> c);

  std::vector<double> grid_values() const { return basis->to_grid(coeffs); }
  double l2_norm() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField f);

SpectralField field_from_grid(const BasisPtr& basis,
                              const std::vector<double>& values);

/// Zero all modes whose frequency exceeds floor(2K/3) on any axis.
void dealias(SpectralField& f);

/// Pointwise product evaluated on the grid, projected back and dealiased
/// by the 2/3 rule.
SpectralField pseudo_product(const SpectralField& f, const SpectralField& g);

}  // namespace semiflow
