#include "slowobs/models.hpp"

#include <cmath>
#include <cstdio>
#include <random>

namespace slowobs {

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

double dist(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Vec linspace(double lo, double hi, int n) {
  Vec out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  out.back() = hi;
  return out;
}

std::string model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::rotation_example1:
      return "rotation_example1";
    case ModelKind::lotka_volterra_example2:
      return "lotka_volterra_example2";
  }
  throw Error("unknown model kind");
}

ModelKind model_from_name(const std::string& name) {
  if (name == "rotation_example1") return ModelKind::rotation_example1;
  if (name == "lotka_volterra_example2")
    return ModelKind::lotka_volterra_example2;
  throw std::invalid_argument("unknown model: " + name);
}

ModelSpec ModelSpec::rotation_example1() {
  ModelSpec s;
  s.kind = ModelKind::rotation_example1;
  s.u_lo = {-1.0};
  s.u_hi = {1.0};
  s.state_lo = {-10.0, -10.0};
  s.state_hi = {10.0, 10.0};
  return s;
}

ModelSpec ModelSpec::lotka_volterra_example2() {
  ModelSpec s;
  s.kind = ModelKind::lotka_volterra_example2;
  s.u_lo = {0.0};
  s.u_hi = {1.0};
  s.state_lo = {0.05, 0.05};  // keeps the logarithms in F finite
  s.state_hi = {10.0, 10.0};
  return s;
}

ModelSpec ModelSpec::builtin(ModelKind kind) {
  return kind == ModelKind::rotation_example1 ? rotation_example1()
                                              : lotka_volterra_example2();
}

bool ModelSpec::control_in_box(const Vec& u, double tol) const {
  if (static_cast<int>(u.size()) != du) return false;
  for (int i = 0; i < du; ++i) {
    const auto j = static_cast<std::size_t>(i);
    if (u[j] < u_lo[j] - tol || u[j] > u_hi[j] + tol) return false;
  }
  return true;
}

namespace {

void check_inputs(const ModelSpec& model, const Vec& u, const Vec& y) {
  if (static_cast<int>(y.size()) != model.m)
    throw std::invalid_argument("eval_fields: state dimension mismatch");
  if (!model.control_in_box(u))
    throw std::invalid_argument("eval_fields: control outside [u_lo, u_hi]");
  if (model.kind == ModelKind::lotka_volterra_example2) {
    if (!(y[0] > 0.0) || !(y[1] > 0.0))
      throw DomainError("lotka_volterra_example2: non-positive state component");
  }
}

}  // namespace

Fields eval_fields(const ModelSpec& model, const Vec& u, const Vec& y) {
  check_inputs(model, u, y);
  Fields out;
  switch (model.kind) {
    case ModelKind::rotation_example1: {
      const double uu = u[0];
      out.f = {uu * y[1], -uu * y[0]};
      out.g = {0.0, 0.0};
      out.F = {y[0] * y[0] + y[1] * y[1]};
      out.F_jac = {2.0 * y[0], 2.0 * y[1]};
      out.r = uu * uu;
      break;
    }
    case ModelKind::lotka_volterra_example2: {
      const double uu = u[0];
      out.f = {-y[0] + y[0] * y[1], y[1] - y[0] * y[1]};
      out.g = {-uu * y[0], 0.0};
      const double Fv = std::log(y[1]) - y[1] + std::log(y[0]) - y[0];
      out.F = {Fv};
      out.F_jac = {1.0 / y[0] - 1.0, 1.0 / y[1] - 1.0};
      const double resid = Fv + 2.05;
      out.r = uu * uu + resid * resid;
      break;
    }
  }
  out.h.assign(static_cast<std::size_t>(model.k), 0.0);
  for (int i = 0; i < model.k; ++i) {
    double s = 0.0;
    for (int j = 0; j < model.m; ++j)
      s += out.F_jac[static_cast<std::size_t>(i * model.m + j)] *
           out.g[static_cast<std::size_t>(j)];
    out.h[static_cast<std::size_t>(i)] = s;
  }
  return out;
}

Vec observable(const ModelSpec& model, const Vec& y) {
  return eval_fields(model, model.u_lo, y).F;
}

double check_constant_of_motion(const ModelSpec& model, int sample_count,
                                unsigned seed) {
  if (sample_count < 1)
    throw std::invalid_argument("check_constant_of_motion: empty sample set");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  Vec u(static_cast<std::size_t>(model.du));
  Vec y(static_cast<std::size_t>(model.m));
  for (int s = 0; s < sample_count; ++s) {
    for (int i = 0; i < model.du; ++i) {
      const auto j = static_cast<std::size_t>(i);
      u[j] = model.u_lo[j] + (model.u_hi[j] - model.u_lo[j]) * unit(rng);
    }
    for (int i = 0; i < model.m; ++i) {
      const auto j = static_cast<std::size_t>(i);
      y[j] = model.state_lo[j] + (model.state_hi[j] - model.state_lo[j]) * unit(rng);
    }
    const Fields fl = eval_fields(model, u, y);
    for (int i = 0; i < model.k; ++i) {
      double resid = 0.0;
      for (int j = 0; j < model.m; ++j)
        resid += fl.F_jac[static_cast<std::size_t>(i * model.m + j)] *
                 fl.f[static_cast<std::size_t>(j)];
      worst = std::max(worst, std::abs(resid));
    }
  }
  return worst;
}

ControlAffine control_affine_at(const ModelSpec& model, const Vec& y) {
  ControlAffine out;
  switch (model.kind) {
    case ModelKind::rotation_example1:
      out.r2 = 1.0;
      out.h1 = {0.0};
      out.h0 = {0.0};
      out.f1 = {y[1], -y[0]};
      out.f0 = {0.0, 0.0};
      out.f_control_independent = false;
      break;
    case ModelKind::lotka_volterra_example2: {
      if (!(y[0] > 0.0) || !(y[1] > 0.0))
        throw DomainError("control_affine_at: non-positive state component");
      out.r2 = 1.0;
      const double Fv = std::log(y[1]) - y[1] + std::log(y[0]) - y[0];
      const double resid = Fv + 2.05;
      out.r0 = resid * resid;
      out.h1 = {y[0] - 1.0};
      out.h0 = {0.0};
      out.f1 = {0.0, 0.0};
      out.f0 = {-y[0] + y[0] * y[1], y[1] - y[0] * y[1]};
      out.f_control_independent = true;
      break;
    }
  }
  return out;
}

Vec reference_control(const ModelSpec& model) {
  if (model.kind == ModelKind::rotation_example1) return {1.0};
  return {0.0};
}

Vec reduced_field(const ModelSpec& model, const Vec& y) {
  switch (model.kind) {
    case ModelKind::rotation_example1:
      return {y[1], -y[0]};  // u = 1 baked in
    case ModelKind::lotka_volterra_example2:
      if (!(y[0] > 0.0) || !(y[1] > 0.0))
        throw DomainError("reduced_field: non-positive state component");
      return {-y[0] + y[0] * y[1], y[1] - y[0] * y[1]};
  }
  throw Error("unknown model kind");
}

Vec reduced_field_jacobian(const ModelSpec& model, const Vec& y) {
  switch (model.kind) {
    case ModelKind::rotation_example1:
      return {0.0, 1.0, -1.0, 0.0};
    case ModelKind::lotka_volterra_example2:
      return {-1.0 + y[1], y[0], -y[1], 1.0 - y[0]};
  }
  throw Error("unknown model kind");
}

void ProblemSpec::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (!(discount > 0.0)) throw std::invalid_argument("discount must be > 0");
  if (static_cast<int>(y0.size()) != model.m)
    throw std::invalid_argument("y0: dimension mismatch");
  if (static_cast<int>(z_lo.size()) != model.k ||
      static_cast<int>(z_hi.size()) != model.k)
    throw std::invalid_argument("z_lo/z_hi: dimension mismatch");
  const Vec Fy0 = observable(model, y0);
  if (static_cast<int>(z0.size()) != model.k)
    throw std::invalid_argument("z0: dimension mismatch");
  for (int i = 0; i < model.k; ++i) {
    const auto j = static_cast<std::size_t>(i);
    if (std::abs(z0[j] - Fy0[j]) > 1e-9)
      throw std::invalid_argument("z0: must equal F(y0) to 1e-9");
    if (!(z_lo[j] < z_hi[j]))
      throw std::invalid_argument("z_lo/z_hi: need z_lo < z_hi");
    // 1e-3 slack: published initial points are rounded, so F(y0) may fall a
    // hair outside the declared observable box.
    if (z0[j] < z_lo[j] - 1e-3 || z0[j] > z_hi[j] + 1e-3)
      throw std::invalid_argument("z0: outside [z_lo, z_hi]");
  }
  if (stop_level && static_cast<int>(stop_level->size()) != model.k)
    throw std::invalid_argument("stop_level: dimension mismatch");
}

}  // namespace slowobs
