#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sbm/common.hpp"
#include "sbm/mesh.hpp"

namespace sbm {

/// Value, gradient and Hessian of a level-set function at one point.
struct LevelSetSample {
  double value = 0.0;
  Point gradient{0.0, 0.0, 0.0};
  Tensor2 hessian{};
};

/// Implicit description of the domain: Omega = {phi < 0}, Gamma = {phi = 0}.
///
/// Either analytic (user callbacks) or a continuous tensor-product Lagrange
/// interpolant of another level set on a background mesh level. Copies share
/// the underlying data and are cheap.
class LevelSetFunction {
  struct Interpolant;

public:
  using ValueFn = std::function<double(const Point &)>;
  using SampleFn = std::function<LevelSetSample(const Point &)>;
  using ProjectionFn = std::function<Point(const Point &)>;

  /// Composition hook for user-defined geometries. `sample` must return
  /// analytic first and second derivatives.
  static LevelSetFunction analytic(int dim, ValueFn value, SampleFn sample,
                                   std::string name = "custom");

  /// Interpolates `exact` at the continuous Lagrange nodes of degree
  /// `degree` on `mesh`.
  static LevelSetFunction interpolate(const LevelSetFunction &exact,
                                      const MeshLevel &mesh, int degree);

  /// Attach a closed-form closest-point map; projections then bypass Newton.
  LevelSetFunction with_exact_projection(ProjectionFn projection) const;

  double value(const Point &x) const;
  LevelSetSample evaluate(const Point &x) const;
  Point gradient(const Point &x) const;

  /// Value-only evaluation restricted to one box. When the box lies in a
  /// single interpolation cell the cell coefficients are gathered once.
  class BoxSampler {
  public:
    double operator()(const Point &x) const;
    Point gradient(const Point &x) const;

  private:
    friend class LevelSetFunction;
    void weights(const Point &x, std::array<std::array<double, 4>, 3> &v,
                 std::array<std::array<double, 4>, 3> *d) const;

    const LevelSetFunction *phi_ = nullptr;
    const Interpolant *local_ = nullptr;
    int n_nodes_ = 0;
    std::array<double, 4> nodes_{};
    std::array<double, 4> inv_denominator_{};
    std::array<double, 64> coefficients_{};
    Point lower_{};
    Point inv_h_{};
  };

  BoxSampler sampler(const Point &lower, const Point &upper) const;

  int dim() const { return dim_; }
  bool interpolated() const { return interp_ != nullptr; }
  int interpolation_degree() const;
  const std::string &name() const { return name_; }
  const ProjectionFn *exact_projection() const {
    return projection_ ? &projection_ : nullptr;
  }

private:

  int dim_ = 2;
  std::string name_;
  ValueFn value_;
  SampleFn sample_;
  ProjectionFn projection_;
  std::shared_ptr<const Interpolant> interp_;
};

/// Interpolation degree used for the level set: 2 for p = 1, p otherwise.
int level_set_degree(int solver_degree);

/// Built-in catalog: "disk" (|x|^2 - 1, the unit sphere in 3D) and
/// "deformed" ((1 - 3/4 sin^2(pi x)) (x^2 + y^2) - 1/5, 2D only).
LevelSetFunction make_geometry(const std::string &name, int dim);

/// Box {|x_k - c_k| < a_k} with its exact closest-point projection. The level
/// set is only Lipschitz; intended for grid-aligned verification domains.
LevelSetFunction box_domain(const Point &center, const Point &half_widths,
                            int dim);

enum class CellCategory : std::uint8_t { interior, exterior, intersected };

struct CellClassification {
  double threshold = 1.0;
  std::vector<CellCategory> category;
  std::vector<double> fraction;
  std::vector<std::uint8_t> active;

  bool is_active(std::int64_t cell) const { return active[cell] != 0; }
  std::int64_t n_active() const;
};

/// Default bisection depth for volume fractions: 8 in 2D, 5 in 3D.
int default_fraction_depth(int dim);

/// Estimate of |box ∩ Omega| / |box| by recursive bisection.
double volume_fraction(const Point &lower, const Point &upper, int dim,
                       const LevelSetFunction &phi, int depth);

/// Active iff fraction >= lambda; cells with fraction exactly 1 are always
/// active. Throws std::invalid_argument unless 0 < lambda <= 1.
CellClassification classify(const MeshLevel &mesh, const LevelSetFunction &phi,
                            double lambda, int depth,
                            Exec exec = Exec::parallel);

struct SurrogateFace {
  std::int64_t cell;
  int axis;
  Side side;
  Point normal;
};

/// Faces of active cells whose neighbor is inactive or outside the box,
/// ordered by cell, then axis, then side.
std::vector<SurrogateFace> surrogate_boundary(const MeshLevel &mesh,
                                              const CellClassification &cls);

struct ShiftRecord {
  Point surrogate_point{};
  Point boundary_point{};
  Point shift{};  ///< boundary_point - surrogate_point
  Point normal{}; ///< outward normal of the surrogate boundary
  double signed_shift = 0.0; ///< sign(d . n) |d| / h
  bool fallback = false;     ///< gradient-flow result, first-order only
};

struct ProjectionOptions {
  double tolerance = 1e-10;
  int max_newton_iterations = 50;
  int max_total_steps = 200;
};

/// Closest point on {phi = 0} to `x_tilde` via Newton on the Lagrangian
/// |x - x_tilde|^2 + mu phi(x), with gradient-flow fallback. Throws
/// ProjectionFailure when neither converges.
ShiftRecord closest_point(const Point &x_tilde, const LevelSetFunction &phi,
                          const Point &normal = {0.0, 0.0, 0.0},
                          double h = 1.0, const ProjectionOptions &opts = {});

/// (min, max) signed normalized shift over the records.
std::pair<double, double> shift_statistics(std::span<const ShiftRecord> records);

} // namespace sbm
