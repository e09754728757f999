#include "qgeo/metrics.hpp"

#include <cmath>

#include "qgeo/errors.hpp"

namespace qgeo {

namespace {

// Value and first two derivatives of a radial profile f(r).
struct Jet2 {
  double f = 0, f1 = 0, f2 = 0;
};

// Fill spatial derivative blocks of a radial function component (a, b):
// d_i f = f' n_i,  d_i d_j f = f'' n_i n_j + f' (delta_ij - n_i n_j)/r.
void add_radial_component(MetricPoint& mp, int a, int b, const Jet2& j,
                          const Vec3& pos, double r) {
  const Vec3 n = pos / r;
  mp.g(a, b) = j.f;
  mp.g(b, a) = j.f;
  for (int i = 0; i < 3; ++i) {
    const double d = j.f1 * n[i];
    mp.dg[i + 1](a, b) = d;
    mp.dg[i + 1](b, a) = d;
    for (int k = 0; k <= i; ++k) {  // mirrored: exactly symmetric in (i,k)
      const double dd = j.f2 * (n[i] * n[k]) +
                        j.f1 * ((i == k ? 1.0 : 0.0) - n[i] * n[k]) / r;
      mp.d2g[i + 1][k + 1](a, b) = dd;
      mp.d2g[i + 1][k + 1](b, a) = dd;
      mp.d2g[k + 1][i + 1](a, b) = dd;
      mp.d2g[k + 1][i + 1](b, a) = dd;
    }
  }
}

class Minkowski final : public MetricField {
 public:
  explicit Minkowski(double c) : MetricField("minkowski", c) {}
  MetricPoint eval(const Vec4&) const override {
    MetricPoint mp;
    mp.g = Mat4::Identity();
    mp.g(0, 0) = -1.0 / (c() * c());
    return mp;
  }
};

class WeakField final : public MetricField {
 public:
  WeakField(ScalarPotential phi, double c)
      : MetricField("weak_field", c), phi_(std::move(phi)) {}

  MetricPoint eval(const Vec4& x) const override {
    const Vec3 pos = x.tail<3>();
    const double c2 = c() * c();
    const double p = phi_.value(pos);
    const Vec3 gp = phi_.gradient(pos);
    const Mat3 hp = phi_.hessian(pos);

    MetricPoint mp;
    mp.weak_field_warning = std::abs(p) / c2 > 0.1;

    // g_tt = -(1 + 2 phi/c^2) c^2, g_ii = 1 - 2 phi/c^2.
    const double w = 1.0 + 2.0 * p / c2;
    const double v = 1.0 - 2.0 * p / c2;
    mp.g(0, 0) = -1.0 / (c2 * w);
    for (int i = 1; i < 4; ++i) mp.g(i, i) = 1.0 / v;
    for (int k = 0; k < 3; ++k) {
      mp.dg[k + 1](0, 0) = 2.0 * gp[k] / (c2 * c2 * w * w);
      for (int i = 1; i < 4; ++i) mp.dg[k + 1](i, i) = 2.0 * gp[k] / (c2 * v * v);
      for (int l = 0; l <= k; ++l) {  // mirrored: exactly symmetric in (k,l)
        const double tt = 2.0 * hp(k, l) / (c2 * c2 * w * w) -
                          8.0 * (gp[k] * gp[l]) / (c2 * c2 * c2 * w * w * w);
        const double ss = 2.0 * hp(k, l) / (c2 * v * v) +
                          8.0 * (gp[k] * gp[l]) / (c2 * c2 * v * v * v);
        mp.d2g[k + 1][l + 1](0, 0) = tt;
        mp.d2g[l + 1][k + 1](0, 0) = tt;
        for (int i = 1; i < 4; ++i) {
          mp.d2g[k + 1][l + 1](i, i) = ss;
          mp.d2g[l + 1][k + 1](i, i) = ss;
        }
      }
    }
    return mp;
  }

 private:
  ScalarPotential phi_;
};

class SchwarzschildIsotropic final : public MetricField {
 public:
  SchwarzschildIsotropic(double GM, double c)
      : MetricField("schwarzschild", c), gm_(GM), mu_(GM / (2.0 * c * c)) {}

  MetricPoint eval(const Vec4& x) const override {
    const Vec3 pos = x.tail<3>();
    const double r = pos.norm();
    if (r <= mu_ * (1.0 + 1e-10))
      throw HorizonError("schwarzschild: event at or inside the horizon");

    // u = mu/r and its radial derivatives
    const Jet2 u{mu_ / r, -mu_ / (r * r), 2.0 * mu_ / (r * r * r)};
    const double up = 1.0 + u.f, um = 1.0 - u.f;

    // time profile: g^tt = -(1+u)^2 / (c^2 (1-u)^2)
    Jet2 jt;
    {
      const double c2 = c() * c();
      const double phi = up * up / (um * um);
      const double dphi_du = 4.0 * up / (um * um * um);
      const double d2phi_du2 = 4.0 * (um + 3.0 * up) / (um * um * um * um);
      jt.f = -phi / c2;
      jt.f1 = -dphi_du * u.f1 / c2;
      jt.f2 = -(d2phi_du2 * u.f1 * u.f1 + dphi_du * u.f2) / c2;
    }
    // spatial profile: g^ii = (1+u)^{-4}
    Jet2 js;
    {
      const double w = std::pow(up, -4.0);
      const double dw_du = -4.0 * std::pow(up, -5.0);
      const double d2w_du2 = 20.0 * std::pow(up, -6.0);
      js.f = w;
      js.f1 = dw_du * u.f1;
      js.f2 = d2w_du2 * u.f1 * u.f1 + dw_du * u.f2;
    }

    MetricPoint mp;
    add_radial_component(mp, 0, 0, jt, pos, r);
    for (int i = 1; i < 4; ++i) add_radial_component(mp, i, i, js, pos, r);
    return mp;
  }

  double mu() const { return mu_; }

 private:
  double gm_;
  double mu_;
};

class VorticalTest final : public MetricField {
 public:
  VorticalTest(double eps, double kappa, double c)
      : MetricField("vortical_test", c), eps_(eps), kappa_(kappa) {}

  MetricPoint eval(const Vec4& x) const override {
    MetricPoint mp;
    mp.g = Mat4::Identity();
    mp.g(0, 0) = -1.0 / (c() * c());

    const double sx = std::sin(x[1]), cx = std::cos(x[1]);
    const double sy = std::sin(x[2]), cy = std::cos(x[2]);

    // h^{xy} = sin(x) sin(y)
    auto set = [&](std::size_t k, std::size_t l, int a, int b, double v) {
      if (k == 0 && l == 0) { mp.g(a, b) += v; mp.g(b, a) = mp.g(a, b); }
      else if (l == 0) { mp.dg[k](a, b) += v; mp.dg[k](b, a) = mp.dg[k](a, b); }
      else {
        mp.d2g[k][l](a, b) += v; mp.d2g[k][l](b, a) = mp.d2g[k][l](a, b);
        if (k != l) { mp.d2g[l][k](a, b) = mp.d2g[k][l](a, b); mp.d2g[l][k](b, a) = mp.d2g[k][l](a, b); }
      }
    };
    set(0, 0, 1, 2, eps_ * sx * sy);
    set(1, 0, 1, 2, eps_ * cx * sy);
    set(2, 0, 1, 2, eps_ * sx * cy);
    set(1, 1, 1, 2, -eps_ * sx * sy);
    set(2, 2, 1, 2, -eps_ * sx * sy);
    set(1, 2, 1, 2, eps_ * cx * cy);

    // h^{tx} = kappa cos(y): vorticity-like coupling
    set(0, 0, 0, 1, eps_ * kappa_ * cy);
    set(2, 0, 0, 1, -eps_ * kappa_ * sy);
    set(2, 2, 0, 1, -eps_ * kappa_ * cy);
    return mp;
  }

 private:
  double eps_, kappa_;
};

}  // namespace

ScalarPotential point_mass_potential(double GM) {
  ScalarPotential p;
  p.value = [GM](const Vec3& x) { return -GM / x.norm(); };
  p.gradient = [GM](const Vec3& x) {
    const double r = x.norm();
    return Vec3(GM * x / (r * r * r));
  };
  p.hessian = [GM](const Vec3& x) {
    const double r = x.norm();
    const double r3 = r * r * r, r5 = r3 * r * r;
    return Mat3(GM * (Mat3::Identity() / r3 - 3.0 * (x * x.transpose()) / r5));
  };
  return p;
}

ScalarPotential uniform_potential(double phi0) {
  ScalarPotential p;
  p.value = [phi0](const Vec3&) { return phi0; };
  p.gradient = [](const Vec3&) { return Vec3::Zero().eval(); };
  p.hessian = [](const Vec3&) { return Mat3::Zero().eval(); };
  return p;
}

std::shared_ptr<const MetricField> make_minkowski(double c) {
  return std::make_shared<Minkowski>(c);
}

std::shared_ptr<const MetricField> make_weak_field(ScalarPotential phi, double c) {
  return std::make_shared<WeakField>(std::move(phi), c);
}

std::shared_ptr<const MetricField> make_schwarzschild_isotropic(double GM, double c) {
  return std::make_shared<SchwarzschildIsotropic>(GM, c);
}

std::shared_ptr<const MetricField> make_vortical_test(double eps, double kappa, double c) {
  return std::make_shared<VorticalTest>(eps, kappa, c);
}

double schwarzschild_areal_radius(double GM, double c, double r_iso) {
  const double mu = GM / (2.0 * c * c);
  const double f = 1.0 + mu / r_iso;
  return r_iso * f * f;
}

double schwarzschild_isotropic_radius(double GM, double c, double r_areal) {
  const double mu = GM / (2.0 * c * c);
  const double b = r_areal - 2.0 * mu;
  const double disc = b * b - 4.0 * mu * mu;
  if (disc < 0)
    throw HorizonError("schwarzschild_isotropic_radius: areal radius inside horizon");
  return 0.5 * (b + std::sqrt(disc));
}

}  // namespace qgeo
