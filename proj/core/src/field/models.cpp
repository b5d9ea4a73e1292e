// SPDX-License-Identifier: Apache-2.0
#include "sciexp/field/models.hpp"

#include <cmath>
#include <numbers>

#include "sciexp/env/environment.hpp"
#include "sciexp/error.hpp"
#include "sciexp/script/interpreter.hpp"
#include "sciexp/script/ops.hpp"

namespace sciexp::field {

namespace {

using std::numbers::pi;
constexpr Complex I{0.0, 1.0};

Complex cnum(const catalog::Json& p, const char* name) {
  if (!p.contains(name)) throw Error(ErrorKind::invalid_argument, std::string("field parameter '") + name + "' missing");
  const auto& j = p[name];
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw Error(ErrorKind::invalid_argument, std::string("field parameter '") + name + "' malformed");
}

double rnum(const catalog::Json& p, const char* name) { return cnum(p, name).real(); }

/// phi_k * exp(-alpha * (c0 - cos k + c2 cos 2k) * dt)
numerics::FourierSpacePropagator dispersion(Complex alpha, double c0, double c2) {
  return [=](std::span<const Complex> phi_k, std::span<const double> k, double, double dt) {
    std::vector<Complex> out(phi_k.size());
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = std::exp(-alpha * (c0 - std::cos(k[i]) + c2 * std::cos(2 * k[i])) * dt) * phi_k[i];
    return out;
  };
}

/// phi * exp(g(x, |phi|^2) * dt)
template <class G>
numerics::RealSpacePropagator local(G g) {
  return [g](std::span<const Complex> phi, std::span<const double> x, double, double dt) {
    std::vector<Complex> out(phi.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(g(x[i], std::norm(phi[i])) * dt) * phi[i];
    return out;
  };
}

numerics::RealSpacePropagator identity() {
  return [](std::span<const Complex> phi, std::span<const double>, double, double) {
    return std::vector<Complex>(phi.begin(), phi.end());
  };
}

}  // namespace

PropagatorPair make_truth(const std::string& kind, const catalog::Json& p) {
  PropagatorPair out;
  out.source = kind;
  if (kind == "linear_schrodinger") {
    out.kinetic = dispersion(I, 1.0, 0.0);
    out.potential = identity();
  } else if (kind == "linear_schrodinger_nnn") {
    out.kinetic = dispersion(I, rnum(p, "A"), rnum(p, "B"));
    out.potential = identity();
  } else if (kind == "linear_schrodinger_confining") {
    const double B = rnum(p, "B"), xm = rnum(p, "x_max");
    out.kinetic = dispersion(I, 1.0, 0.0);
    out.potential = local([=](double x, double) { return -I * B * std::cos(pi * x / xm); });
  } else if (kind == "linear_schrodinger_periodic") {
    const double B = rnum(p, "B"), N = rnum(p, "N"), xm = rnum(p, "x_max");
    out.kinetic = dispersion(I, 1.0, 0.0);
    out.potential = local([=](double x, double) { return -I * B * std::cos(N * 2 * pi * x / xm); });
  } else if (kind == "nls") {
    const double A = rnum(p, "A"), B = rnum(p, "B");
    out.kinetic = dispersion(I * A, 1.0, 0.0);
    out.potential = local([=](double, double n2) { return -I * B * n2; });
  } else if (kind == "nls_nnn") {
    const double A = rnum(p, "A"), B = rnum(p, "B"), C = rnum(p, "C"), D = rnum(p, "D");
    out.kinetic = dispersion(I * A, B, C);
    out.potential = local([=](double, double n2) { return -I * D * n2; });
  } else if (kind == "nls_confining") {
    const double xm = rnum(p, "x_max");
    out.kinetic = dispersion(I, 1.0, 0.0);
    out.potential = local([=](double x, double n2) { return -I * (-std::cos(pi * x / xm) + n2); });
  } else if (kind == "nls_phi6") {
    const double A = rnum(p, "A"), B = rnum(p, "B");
    out.kinetic = dispersion(I * A, 1.0, 0.0);
    out.potential = local([=](double, double n2) { return -I * B * (n2 + 2 * n2 * n2); });
  } else if (kind == "real_ginzburg_landau") {
    const double A = rnum(p, "A"), B = rnum(p, "B");
    out.kinetic = dispersion(A, 1.0, 0.0);
    out.potential = local([=](double, double n2) { return Complex(-B * (2 * n2 - 1)); });
  } else if (kind == "complex_ginzburg_landau") {
    const Complex A = cnum(p, "A"), C = cnum(p, "C");
    const double B = rnum(p, "B");
    out.kinetic = dispersion(A, 1.0, 0.0);
    out.potential = local([=](double, double n2) { return -B * (2.0 * C * n2 - 1.0); });
  } else if (kind == "complex_ginzburg_landau_nnn") {
    const Complex A = cnum(p, "A"), E = cnum(p, "E");
    const double B = rnum(p, "B"), C = rnum(p, "C"), D = rnum(p, "D");
    out.kinetic = dispersion(A, B, C);
    out.potential = local([=](double, double n2) { return -D * (2.0 * E * n2 - 1.0); });
  } else if (kind == "sinusoidal_relaxation") {
    const double A = rnum(p, "A"), B = rnum(p, "B"), C = rnum(p, "C");
    out.kinetic = dispersion(A, 1.0, 0.0);
    out.potential = local([=](double, double n2) { return Complex(B * std::sin(C * n2)); });
  } else {
    throw Error(ErrorKind::invalid_argument, "unknown field model '" + kind + "'");
  }
  return out;
}

namespace {

std::vector<Complex> complex_values(const script::Value& v, const char* what) {
  NdArray a;
  try {
    a = script::to_array(v);
  } catch (const Error&) {
    throw Error(ErrorKind::propagator_fault, std::string(what) + " must return an array.");
  }
  return {a.data().begin(), a.data().end()};
}

}  // namespace

PropagatorPair script_propagators(const std::string& code) {
  auto in = std::make_shared<script::Interpreter>();
  in->exec(code);
  for (const char* name : {"U_potential", "U_kinetic"}) {
    if (!in->has(name) || !in->get(name).is_callable())
      throw Error(ErrorKind::script, std::string("The code must define a function ") + name + ".");
  }
  PropagatorPair p;
  p.source = code;
  script::Value pot = in->get("U_potential"), kin = in->get("U_kinetic");
  p.potential = [in, pot](std::span<const Complex> phi, std::span<const double> x, double t, double dt) {
    in->reset_steps();
    return complex_values(in->call(pot, {script::Value(NdArray::from_complex({phi.size()}, phi)),
                                         script::Value(NdArray::from_real(x)), script::Value(t), script::Value(dt)}),
                          "U_potential");
  };
  p.kinetic = [in, kin](std::span<const Complex> phi_k, std::span<const double> k, double t, double dt) {
    in->reset_steps();
    return complex_values(in->call(kin, {script::Value(NdArray::from_complex({phi_k.size()}, phi_k)),
                                         script::Value(NdArray::from_real(k)), script::Value(t), script::Value(dt)}),
                          "U_kinetic");
  };
  return p;
}

std::vector<Complex> initial_condition(const std::string& code) {
  static const numerics::LatticeGrid grid = numerics::LatticeGrid::standard();
  script::Interpreter in;
  in.define("x", script::Value(NdArray::from_real(grid.x)));
  in.exec(code);
  if (!in.has("phi0")) throw Error(ErrorKind::script, "The initial condition code must set phi0.");
  NdArray a = script::to_array(in.get("phi0"));
  std::vector<Complex> phi(a.data().begin(), a.data().end());
  if (a.ndim() == 0 || (a.size() == 1 && a.ndim() <= 1 && grid.size() != 1)) phi.assign(grid.size(), a[0]);
  if (phi.size() != grid.size())
    throw Error(ErrorKind::shape, "phi0 has shape " + a.shape_string() + ", expected (" + std::to_string(grid.size()) + ",).");
  for (const auto& z : phi) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw Error(ErrorKind::shape, "phi0 contains non-finite values.");
  }
  return phi;
}

numerics::FieldHistory simulate(const PropagatorPair& p, std::span<const Complex> phi0) {
  static const numerics::LatticeGrid grid = numerics::LatticeGrid::standard();
  static const std::vector<double> ts = numerics::uniform_times(experiment_T, experiment_points);
  static const std::size_t substeps = numerics::substeps_for(ts, max_substep);
  if (phi0.size() != grid.size())
    throw Error(ErrorKind::shape, "initial field must have " + std::to_string(grid.size()) + " entries");
  return numerics::split_step_evolve(phi0, p.potential, p.kinetic, grid, ts, substeps);
}

}  // namespace sciexp::field
