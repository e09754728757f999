#pragma once

#include <functional>
#include <memory>
#include <string>

#include "qgeo/types.hpp"

namespace qgeo {

/// Inverse-metric data at one event: g^{ab}, first and second coordinate
/// derivatives. Index 0 is t; all built-in fields are static in t.
struct MetricPoint {
  Mat4 g;
  std::array<Mat4, 4> dg;
  std::array<std::array<Mat4, 4>, 4> d2g;
  bool weak_field_warning = false;

  MetricPoint() {
    g.setZero();
    for (auto& m : dg) m.setZero();
    for (auto& row : d2g)
      for (auto& m : row) m.setZero();
  }
};

/// Scalar gravitational potential with analytic gradient and Hessian
/// (spatial arguments only).
struct ScalarPotential {
  std::function<double(const Vec3&)> value;
  std::function<Vec3(const Vec3&)> gradient;
  std::function<Mat3(const Vec3&)> hessian;
};

ScalarPotential point_mass_potential(double GM);
ScalarPotential uniform_potential(double phi0);

/// Classical background with signature (-,+,+,+) and explicit factors of c.
class MetricField {
 public:
  virtual ~MetricField() = default;
  virtual MetricPoint eval(const Vec4& x) const = 0;

  const std::string& name() const { return name_; }
  double c() const { return c_; }
  /// All built-in fields are time-independent; dH/dt vanishes identically.
  bool static_spacetime() const { return true; }

 protected:
  MetricField(std::string name, double c) : name_(std::move(name)), c_(c) {}

 private:
  std::string name_;
  double c_;
};

std::shared_ptr<const MetricField> make_minkowski(double c = 1.0);
std::shared_ptr<const MetricField> make_weak_field(ScalarPotential phi, double c = 1.0);
std::shared_ptr<const MetricField> make_schwarzschild_isotropic(double GM, double c = 1.0);

/// Synthetic field with g^{xy}(x,y) != 0 and a vortical g^{tx}(y) component.
/// Exercises the alpha-coupling of the quadratic tensor; not a solution of
/// any field equation.
std::shared_ptr<const MetricField> make_vortical_test(double eps, double kappa,
                                                      double c = 1.0);

/// Isotropic <-> areal radius for the Schwarzschild field.
double schwarzschild_areal_radius(double GM, double c, double r_iso);
double schwarzschild_isotropic_radius(double GM, double c, double r_areal);

}  // namespace qgeo
