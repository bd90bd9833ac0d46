#pragma once

#include <Eigen/Dense>
#include <vector>

#include "semiflow/spaces.hpp"
#include "semiflow/spectral.hpp"

// Semigroups e^{tA} and evolution operators U(t,s) for the generators used
// by the solver: diagonal (per-component Laplacian + shift), constant
// block-lower-triangular couplings, and variable-coefficient divergence-form
// operators assembled from a coefficient field.

namespace semiflow {

/// Constant-in-time generator acting blockwise on a SystemState. The block
/// for component i contributes -diffusivities[i] * lambda_k on the diagonal;
/// `coupling` is a constant lower-triangular arity x arity matrix added to
/// every per-mode block. The Variable kind replaces the (0,0) block by a
/// dense matrix assembled from a coefficient field (divergence-form
/// operator with spatially varying conductivity).
struct GeneratorSpec {
  enum class Kind { Diagonal, Triangular, Variable };

  Kind kind = Kind::Diagonal;
  BasisPtr basis;
  int arity = 1;
  std::vector<double> diffusivities;  // one per component
  std::vector<double> coupling;       // arity x arity, row-major
  Eigen::MatrixXd dense0;             // Variable only: modes x modes block

  static GeneratorSpec diagonal(BasisPtr basis, std::vector<double> diff,
                                std::vector<double> shifts = {});
  static GeneratorSpec triangular(BasisPtr basis, std::vector<double> diff,
                                  std::vector<double> coupling);
  /// Variable first block div(chi grad .); chi given as a band-limited
  /// coefficient field on the same basis. diffusivities[0] is ignored.
  static GeneratorSpec variable(BasisPtr basis, std::vector<double> diff,
                                std::vector<double> coupling,
                                const SpectralField& chi);

  int total_dim() const { return arity * basis->num_modes(); }
};

/// e^{tA} applied to a state. Diagonal: exact per-mode scalars. Triangular:
/// per-mode closed-form exponential of the lower-triangular block (divided
/// differences of exp, confluent-safe). Variable: scaling-and-squaring
/// matrix exponential of the assembled dense operator.
SystemState apply_semigroup(const GeneratorSpec& gen, double t,
                            const SystemState& state);

/// Piecewise-constant generator path on a mesh: gens[j] acts on
/// [times[j], times[j+1]].
struct GeneratorPath {
  std::vector<double> times;       // size N+1, strictly increasing
  std::vector<GeneratorSpec> gens;  // size N
};

/// U(t,s) x: product of frozen-coefficient exponentials over the cells
/// between s and t, earliest factor applied first.
SystemState evolution_op(const GeneratorPath& path, double s, double t,
                         const SystemState& state);

/// Operator norms ||e^{tA}||_{E_0 -> E_theta} on a time grid, together with
/// the weighted values t^theta * norm. Diagonal generators use the exact
/// per-mode formula; triangular ones the per-mode block 2-norm.
struct SmoothingTable {
  std::vector<double> times;
  std::vector<double> norms;
  std::vector<double> weighted;  // t^theta * norm
};
SmoothingTable measure_smoothing(const GeneratorSpec& gen, double theta,
                                 const std::vector<double>& t_grid);

/// Ground truth: eigendecomposition-based exponential of the fully
/// assembled dense matrix. Throws if total dimension exceeds 512.
SystemState dense_oracle(const GeneratorSpec& gen, double t,
                         const SystemState& state);

/// The full dense matrix of the generator (component-major block layout).
Eigen::MatrixXd assemble_dense(const GeneratorSpec& gen);

/// The generator itself applied to a state (matrix action A x, not e^{tA}).
SystemState apply_generator(const GeneratorSpec& gen, const SystemState& x);

/// Scaling-and-squaring matrix exponential (Pade order 13).
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& A);

/// Reusable propagator for one generator: closed forms for diagonal and
/// triangular kinds, cached eigendecomposition of the assembled matrix for
/// the variable kind (so that many exp(tA) applications per cell are cheap).
class Propagator {
 public:
  explicit Propagator(GeneratorSpec gen);

  const GeneratorSpec& generator() const { return gen_; }
  SystemState apply(double t, const SystemState& state) const;

 private:
  GeneratorSpec gen_;
  Eigen::MatrixXcd vecs_;
  Eigen::MatrixXcd vecs_inv_;
  Eigen::VectorXcd vals_;
};

}  // namespace semiflow
