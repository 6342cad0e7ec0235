#pragma once

#include <optional>
#include <string>

#include "slowobs/common.hpp"

namespace slowobs {

enum class ModelKind { rotation_example1, lotka_volterra_example2 };

std::string model_name(ModelKind kind);
ModelKind model_from_name(const std::string& name);

/// A builtin control system: fast field f, perturbation field g, constants of
/// motion F with Jacobian F', observable drift h = F'g and running cost r.
struct ModelSpec {
  ModelKind kind = ModelKind::lotka_volterra_example2;
  int m = 2;   // state dimension
  int k = 1;   // observable dimension
  int du = 1;  // control dimension
  Vec u_lo, u_hi;
  Vec state_lo, state_hi;  // box for random sampling / Lipschitz estimates

  static ModelSpec rotation_example1();
  static ModelSpec lotka_volterra_example2();
  static ModelSpec builtin(ModelKind kind);

  bool control_in_box(const Vec& u, double tol = 1e-9) const;
};

struct Fields {
  Vec f;       // m
  Vec g;       // m
  Vec F;       // k
  Vec F_jac;   // k x m, row-major
  Vec h;       // k, computed as F_jac * g
  double r = 0.0;
};

Fields eval_fields(const ModelSpec& model, const Vec& u, const Vec& y);

/// Convenience: F(y) alone (k-vector), with the same domain checks.
Vec observable(const ModelSpec& model, const Vec& y);

/// Max |F'(y) f(u,y)| over sample_count random in-box (u,y) pairs.
double check_constant_of_motion(const ModelSpec& model, int sample_count,
                                unsigned seed);

/// Both builtin models are affine/quadratic in the scalar control:
///   r(u,y) = r2*u^2 + r1*u + r0,  h(u,y) = h1*u + h0,  f(u,y) = f1*u + f0.
/// This exact decomposition drives the closed-form inner minimizations.
struct ControlAffine {
  double r2 = 0.0, r1 = 0.0, r0 = 0.0;
  Vec h1, h0;  // k
  Vec f1, f0;  // m
  bool f_control_independent = false;
};

ControlAffine control_affine_at(const ModelSpec& model, const Vec& y);

/// The autonomous reduced flow used for orbits and synthesis. Example 1 has
/// the reference control u = 1 baked in; the Lotka-Volterra field does not
/// depend on u at all.
Vec reduced_field(const ModelSpec& model, const Vec& y);
Vec reference_control(const ModelSpec& model);

/// Jacobian of the reduced field at y (m x m, row-major).
Vec reduced_field_jacobian(const ModelSpec& model, const Vec& y);

struct ProblemSpec {
  ModelSpec model;
  double epsilon = 0.1;
  double discount = 0.1;  // C, in shrinked time
  Vec y0;
  Vec z0;  // = F(y0); derived when not supplied
  Vec z_lo, z_hi;
  std::optional<Vec> stop_level;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

}  // namespace slowobs
