// SPDX-License-Identifier: Apache-2.0
#include "sciexp/mech/models.hpp"

#include <cmath>
#include <vector>

#include "sciexp/error.hpp"

namespace sciexp::mech {

namespace {

using State = std::span<const double>;
using Out = std::span<double>;

double num(const catalog::Json& p, const char* name) {
  if (!p.contains(name) || !p[name].is_number())
    throw Error(ErrorKind::invalid_argument, std::string("model parameter '") + name + "' missing");
  return p[name].get<double>();
}

std::vector<double> list(const catalog::Json& p, const char* name) {
  if (!p.contains(name) || !p[name].is_array())
    throw Error(ErrorKind::invalid_argument, std::string("model parameter '") + name + "' missing");
  return p[name].get<std::vector<double>>();
}

template <class F>
numerics::VectorField one_dof(F accel) {
  return [accel](State X, double t, State, Out d) {
    d[0] = X[1];
    d[1] = accel(X[0], X[1], t);
  };
}

template <class F>
numerics::VectorField planar(F accel) {
  return [accel](State X, double, State, Out d) {
    d[0] = X[2];
    d[1] = X[3];
    accel(X[0], X[1], X[2], X[3], d[2], d[3]);
  };
}

}  // namespace

Model make_model(const std::string& kind, const catalog::Json& p, std::size_t n) {
  Model m{kind, n, {}};
  auto need = [&](std::size_t coords) {
    if (n != coords) throw Error(ErrorKind::invalid_argument, kind + " expects " + std::to_string(coords) + " coordinates");
  };
  if (kind == "duffing") {
    need(1);
    double a = num(p, "a"), b = num(p, "b"), g = num(p, "gamma");
    m.rhs = one_dof([=](double x, double v, double) { return -a * x * x * x - b * x - g * v; });
  } else if (kind == "pendulum") {
    need(1);
    double al = num(p, "alpha"), g = num(p, "gamma");
    m.rhs = one_dof([=](double x, double v, double) { return -al * std::sin(x) - g * v; });
  } else if (kind == "asymmetric_double_well") {
    need(1);
    double a = num(p, "a"), b = num(p, "b"), c = num(p, "c"), g = num(p, "gamma");
    m.rhs = one_dof([=](double x, double v, double) { return -a * x * x * x + b * x + c - g * v; });
  } else if (kind == "velocity_position_coupling") {
    need(1);
    double a = num(p, "a"), k = num(p, "k");
    m.rhs = one_dof([=](double x, double v, double) { return -a * x * x * v - k * x; });
  } else if (kind == "arbitrary_1d_potential") {
    need(1);
    double a = num(p, "a"), k = num(p, "k");
    m.rhs = one_dof([=](double x, double, double) { return -x - a * std::cos(k * x); });
  } else if (kind == "driven_oscillator") {
    need(1);
    double k = num(p, "k"), g = num(p, "gamma"), A = num(p, "A"), w = num(p, "omega");
    m.rhs = one_dof([=](double x, double v, double t) { return -k * x - g * v + A * std::cos(w * t); });
  } else if (kind == "parametric_oscillator") {
    need(1);
    double k = num(p, "k"), A = num(p, "A"), w = num(p, "omega"), g = num(p, "gamma");
    m.rhs = one_dof([=](double x, double v, double t) { return -(k + A * std::cos(w * t)) * x - g * v; });
  } else if (kind == "double_pendulum") {
    need(2);
    double m1 = num(p, "m1"), m2 = num(p, "m2"), l1 = num(p, "l1"), l2 = num(p, "l2"), g = num(p, "gamma");
    m.rhs = [=](State X, double, State, Out d) {
      const double t1 = X[0], t2 = X[1], w1 = X[2], w2 = X[3];
      const double D = t1 - t2, den = 2 * m1 + m2 - m2 * std::cos(2 * D);
      d[0] = w1;
      d[1] = w2;
      d[2] = -((2 * m1 + m2) * std::sin(t1) + m2 * std::sin(t1 - 2 * t2) +
               2 * std::sin(D) * m2 * (w2 * w2 * l2 + w1 * w1 * l1 * std::cos(D))) /
                 (l1 * den) -
             g * w1;
      d[3] = 2 * std::sin(D) * (w1 * w1 * l1 * (m1 + m2) + (m1 + m2) * std::cos(t1) + w2 * w2 * l2 * m2 * std::cos(D)) /
                 (l2 * den) -
             g * w2;
    };
  } else if (kind == "coupled_oscillators") {
    std::vector<double> k = list(p, "k");
    need(k.size());
    struct Bond {
      std::size_t i, j;
      double k;
    };
    std::vector<Bond> bonds;
    for (const auto& c : p.at("couplings")) {
      Bond b{c.at(0).get<std::size_t>(), c.at(1).get<std::size_t>(), c.at(2).get<double>()};
      if (b.i >= n || b.j >= n) throw Error(ErrorKind::invalid_argument, "coupling index out of range");
      bonds.push_back(b);
    }
    double g = num(p, "gamma");
    m.rhs = [=](State X, double, State, Out d) {
      for (std::size_t i = 0; i < n; ++i) {
        d[i] = X[n + i];
        d[n + i] = -k[i] * X[i] - g * X[n + i];
      }
      for (const Bond& b : bonds) {
        const double f = b.k * (X[b.j] - X[b.i]);
        d[n + b.i] += f;
        d[n + b.j] -= f;
      }
    };
  } else if (kind == "mexican_hat") {
    need(2);
    double a = num(p, "a"), b = num(p, "b"), g = num(p, "gamma");
    m.rhs = planar([=](double x, double y, double vx, double vy, double& ax, double& ay) {
      const double f = a - b * (x * x + y * y);
      ax = f * x - g * vx;
      ay = f * y - g * vy;
    });
  } else if (kind == "off_center_gravity") {
    need(2);
    double G = num(p, "G"), cx = num(p, "cx"), cy = num(p, "cy");
    m.rhs = planar([=](double x, double y, double, double, double& ax, double& ay) {
      const double dx = x - cx, dy = y - cy;
      const double r = std::sqrt(dx * dx + dy * dy), r3 = r * r * r;
      ax = -G * dx / r3;
      ay = -G * dy / r3;
    });
  } else if (kind == "arbitrary_2d_potential") {
    need(2);
    double k = num(p, "k"), a = num(p, "a");
    m.rhs = planar([=](double x, double y, double, double, double& ax, double& ay) {
      const double r = std::sqrt(x * x + y * y), c = std::cos(6 * r);
      ax = -k * x - a * x * c / r;
      ay = -k * y - a * y * c / r;
    });
  } else if (kind == "gravity") {
    std::vector<double> mass = list(p, "masses");
    need(2 * mass.size());
    const std::size_t np = mass.size();
    m.rhs = [=](State X, double, State, Out d) {
      for (std::size_t i = 0; i < n; ++i) {
        d[i] = X[n + i];
        d[n + i] = 0.0;
      }
      for (std::size_t i = 0; i < np; ++i) {
        for (std::size_t j = i + 1; j < np; ++j) {
          const double dx = X[2 * i] - X[2 * j], dy = X[2 * i + 1] - X[2 * j + 1];
          const double r = std::sqrt(dx * dx + dy * dy), r3 = r * r * r;
          d[n + 2 * i] -= mass[j] * dx / r3;
          d[n + 2 * i + 1] -= mass[j] * dy / r3;
          d[n + 2 * j] += mass[i] * dx / r3;
          d[n + 2 * j + 1] += mass[i] * dy / r3;
        }
      }
    };
  } else if (kind == "exponential_particles") {
    if (n % 2) throw Error(ErrorKind::invalid_argument, "exponential_particles needs an even coordinate count");
    double a = num(p, "a"), b = num(p, "b");
    const std::size_t np = n / 2;
    m.rhs = [=](State X, double, State, Out d) {
      for (std::size_t i = 0; i < n; ++i) {
        d[i] = X[n + i];
        d[n + i] = 0.0;
      }
      for (std::size_t i = 0; i < np; ++i) {
        for (std::size_t j = i + 1; j < np; ++j) {
          const double dx = X[2 * i] - X[2 * j], dy = X[2 * i + 1] - X[2 * j + 1];
          const double r = std::sqrt(dx * dx + dy * dy);
          const double f = -a * b * std::exp(-b * r) / r;
          d[n + 2 * i] += f * dx;
          d[n + 2 * i + 1] += f * dy;
          d[n + 2 * j] -= f * dx;
          d[n + 2 * j + 1] -= f * dy;
        }
      }
    };
  } else {
    throw Error(ErrorKind::invalid_argument, "unknown mechanical model '" + kind + "'");
  }
  return m;
}

}  // namespace sciexp::mech
