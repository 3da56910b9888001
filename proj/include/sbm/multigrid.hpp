#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "sbm/assembly.hpp"
#include "sbm/dense.hpp"
#include "sbm/geometry.hpp"
#include "sbm/gmres.hpp"
#include "sbm/mesh.hpp"

namespace sbm {

enum class SmootherKind { ssor, block_jacobi };

enum class LevelSetMode { analytic, interpolated };

struct MgOptions {
  double omega = 1.0;
  int pre_smoothing = 1;
  int post_smoothing = 1;
  SmootherKind smoother = SmootherKind::ssor;
  LevelSetMode level_set = LevelSetMode::interpolated;
  int fraction_depth = -1; ///< < 0 selects default_fraction_depth(dim)
  Exec exec = Exec::parallel;
};

/// Prolongation between consecutive hierarchy levels, either mesh
/// refinement at fixed degree (h) or degree elevation on one mesh (p).
/// Stored as one dense embedding per child position (h) or a single one (p).
class Transfer {
public:
  Transfer(const LevelOperator &coarse, const LevelOperator &fine);

  bool is_h_transfer() const { return h_transfer_; }
  /// Embedding matrix (fine dofs x coarse dofs) for child position `child`.
  const DenseMatrix &embedding(int child) const { return embed_[child]; }

  void prolongate(const LevelOperator &coarse, const LevelOperator &fine,
                  std::span<const double> xc, std::span<double> xf,
                  Exec exec = Exec::parallel) const;
  /// Exact transpose of prolongate.
  void restrict_to(const LevelOperator &coarse, const LevelOperator &fine,
                   std::span<const double> yf, std::span<double> yc,
                   Exec exec = Exec::parallel) const;

private:
  bool h_transfer_;
  std::vector<DenseMatrix> embed_;
};

/// u <- SSOR sweeps: cell blocks in lexicographic order, then reversed.
void smooth_ssor(const LevelOperator &op, std::span<const double> rhs,
                 std::span<double> x, double omega, int sweeps);

/// Additive variant: all block corrections from one residual.
void smooth_block_jacobi(const LevelOperator &op, std::span<const double> rhs,
                         std::span<double> x, double omega, int sweeps,
                         Exec exec = Exec::parallel);

/// hp-multigrid hierarchy: mesh levels 0..L at degree 1, then degrees
/// 2..p on mesh L. Each level is rediscretized with its own classification
/// (shared by all degree levels on the finest mesh).
class MgHierarchy {
public:
  MgHierarchy(const MeshBox &box, int dim, int levels, int degree,
              const LevelSetFunction &geometry, double lambda,
              const SbmParameters &params, const BoundaryValueProblem *problem,
              const MgOptions &options = {});

  int n_levels() const { return static_cast<int>(levels_.size()); }
  const LevelOperator &level(int k) const { return levels_[k]; }
  const LevelOperator &finest() const { return levels_.back(); }
  const Transfer &transfer(int k) const { return transfers_[k - 1]; }
  const MgOptions &options() const { return options_; }
  /// Level set used on the finest mesh (interpolated or analytic).
  const LevelSetFunction &finest_level_set() const { return finest_phi_; }

  /// One V-cycle on level k, updating x in place.
  void v_cycle(int k, std::span<const double> rhs, std::span<double> x) const;

  /// z = V-cycle applied to r from a zero guess on the finest level; entries
  /// of inactive cells are passed through.
  void precondition(std::span<const double> r, std::span<double> z) const;
  LinearOperator as_preconditioner() const;

private:
  void smooth(int k, std::span<const double> rhs, std::span<double> x, int sweeps) const;

  MgOptions options_;
  std::vector<LevelOperator> levels_;
  std::vector<Transfer> transfers_;
  LevelSetFunction finest_phi_;
  DenseLU coarse_lu_;
  mutable std::vector<std::vector<double>> residual_, coarse_rhs_, coarse_x_, fine_corr_;
};

} // namespace sbm
