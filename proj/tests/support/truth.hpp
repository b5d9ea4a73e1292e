// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <cstdio>
#include <stdexcept>
#include <string>

#include "sciexp/catalog/catalog.hpp"

// Ground-truth submissions written out as agent code, built directly from
// catalog parameters so the sweep checks the whole submission path.
namespace sciexp::testing {

inline std::string lit(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return "(" + s + ")";
}

inline std::string clit(const catalog::Json& j) {
  if (j.is_number()) return lit(j.get<double>());
  return "(" + lit(j[0].get<double>()) + "+" + lit(j[1].get<double>()) + "*1j)";
}

inline std::string mech_rhs(const catalog::SystemSpec& s) {
  const auto& p = s.params;
  auto P = [&](const char* n) { return lit(p.at(n).get<double>()); };
  const std::size_t n = s.n_coords;
  std::string b = "def rhs(X, t):\n";
  const std::string& m = s.model;
  auto one = [&](const std::string& acc) {
    return b + "    x = X[0]\n    v = X[1]\n    return jnp.array([v, " + acc + "])\n";
  };
  if (m == "duffing") return one("-" + P("a") + "*x**3 - " + P("b") + "*x - " + P("gamma") + "*v");
  if (m == "pendulum") return one("-" + P("alpha") + "*jnp.sin(x) - " + P("gamma") + "*v");
  if (m == "asymmetric_double_well")
    return one("-" + P("a") + "*x**3 + " + P("b") + "*x + " + P("c") + " - " + P("gamma") + "*v");
  if (m == "velocity_position_coupling") return one("-" + P("a") + "*x**2*v - " + P("k") + "*x");
  if (m == "arbitrary_1d_potential") return one("-x - " + P("a") + "*jnp.cos(" + P("k") + "*x)");
  if (m == "driven_oscillator")
    return one("-" + P("k") + "*x - " + P("gamma") + "*v + " + P("A") + "*jnp.cos(" + P("omega") + "*t)");
  if (m == "parametric_oscillator")
    return one("-(" + P("k") + " + " + P("A") + "*jnp.cos(" + P("omega") + "*t))*x - " + P("gamma") + "*v");
  if (m == "double_pendulum") {
    return b + "    m1 = " + P("m1") + "\n    m2 = " + P("m2") + "\n    l1 = " + P("l1") + "\n    l2 = " + P("l2") +
           "\n    g = " + P("gamma") +
           "\n    t1, t2, w1, w2 = X[0], X[1], X[2], X[3]\n"
           "    D = t1 - t2\n"
           "    den = 2*m1 + m2 - m2*jnp.cos(2*D)\n"
           "    a1 = -((2*m1 + m2)*jnp.sin(t1) + m2*jnp.sin(t1 - 2*t2) + 2*jnp.sin(D)*m2*(w2**2*l2 + w1**2*l1*jnp.cos(D)))/(l1*den) - g*w1\n"
           "    a2 = 2*jnp.sin(D)*(w1**2*l1*(m1 + m2) + (m1 + m2)*jnp.cos(t1) + w2**2*l2*m2*jnp.cos(D))/(l2*den) - g*w2\n"
           "    return jnp.array([w1, w2, a1, a2])\n";
  }
  if (m == "coupled_oscillators") {
    const auto k = p.at("k");
    std::string body = b + "    n = " + std::to_string(n) + "\n    q = X[:n]\n    v = X[n:]\n    a = [";
    for (std::size_t i = 0; i < n; ++i) {
      body += "-" + lit(k[i].get<double>()) + "*q[" + std::to_string(i) + "] - " + P("gamma") + "*v[" + std::to_string(i) + "]";
      for (const auto& c : p.at("couplings")) {
        const auto ci = c[0].get<std::size_t>(), cj = c[1].get<std::size_t>();
        const std::string kk = lit(c[2].get<double>());
        if (ci == i) body += " + " + kk + "*(q[" + std::to_string(cj) + "] - q[" + std::to_string(i) + "])";
        if (cj == i) body += " - " + kk + "*(q[" + std::to_string(i) + "] - q[" + std::to_string(ci) + "])";
      }
      body += i + 1 < n ? ", " : "";
    }
    return body + "]\n    return jnp.concatenate([v, jnp.array(a)])\n";
  }
  if (m == "mexican_hat") {
    return b + "    x, y, vx, vy = X[0], X[1], X[2], X[3]\n    f = " + P("a") + " - " + P("b") +
           "*(x**2 + y**2)\n    g = " + P("gamma") + "\n    return jnp.array([vx, vy, f*x - g*vx, f*y - g*vy])\n";
  }
  if (m == "off_center_gravity") {
    return b + "    dx = X[0] - " + P("cx") + "\n    dy = X[1] - " + P("cy") +
           "\n    r3 = jnp.sqrt(dx**2 + dy**2)**3\n    G = " + P("G") +
           "\n    return jnp.array([X[2], X[3], -G*dx/r3, -G*dy/r3])\n";
  }
  if (m == "arbitrary_2d_potential") {
    return b + "    x, y = X[0], X[1]\n    r = jnp.sqrt(x**2 + y**2)\n    k = " + P("k") + "\n    a = " + P("a") +
           "\n    return jnp.array([X[2], X[3], -k*x - a*x*jnp.cos(6*r)/r, -k*y - a*y*jnp.cos(6*r)/r])\n";
  }
  if (m == "gravity" || m == "exponential_particles") {
    std::string body = b + "    n = " + std::to_string(n) + "\n    np_ = n // 2\n";
    if (m == "gravity") {
      body += "    mass = [";
      const auto ms = p.at("masses");
      for (std::size_t i = 0; i < ms.size(); ++i) body += lit(ms[i].get<double>()) + (i + 1 < ms.size() ? ", " : "");
      body += "]\n";
    } else {
      body += "    a = " + P("a") + "\n    b = " + P("b") + "\n";
    }
    body +=
        "    acc = [0.0] * n\n"
        "    for i in range(np_):\n"
        "        for j in range(np_):\n"
        "            if i == j:\n"
        "                continue\n"
        "            dx = X[2*i] - X[2*j]\n"
        "            dy = X[2*i+1] - X[2*j+1]\n"
        "            r = jnp.sqrt(dx**2 + dy**2)\n";
    if (m == "gravity") body += "            f = -mass[j]/r**3\n";
    else body += "            f = -a*b*jnp.exp(-b*r)/r\n";
    body +=
        "            acc[2*i] = acc[2*i] + f*dx\n"
        "            acc[2*i+1] = acc[2*i+1] + f*dy\n"
        "    return jnp.concatenate([X[n:], jnp.array(acc)])\n";
    return body;
  }
  throw std::logic_error("no truth rhs for " + m);
}

inline std::string field_code(const catalog::SystemSpec& s) {
  const auto& p = s.params;
  auto P = [&](const char* n) { return clit(p.at(n)); };
  auto kin = [](const std::string& alpha, const std::string& c0, const std::string& c2) {
    return "def U_kinetic(phi_k, k, t, dt):\n    return jnp.exp(-" + alpha + "*(" + c0 + " - jnp.cos(k) + " + c2 +
           "*jnp.cos(2*k))*dt)*phi_k\n";
  };
  auto pot = [](const std::string& g) {
    return "def U_potential(phi, x, t, dt):\n    n2 = jnp.real(phi)**2 + jnp.imag(phi)**2\n    return jnp.exp((" + g + ")*dt)*phi\n";
  };
  const std::string& m = s.model;
  const std::string I = "1j";
  if (m == "linear_schrodinger") return kin(I, "1.0", "0.0") + pot("0.0*x");
  if (m == "linear_schrodinger_nnn") return kin(I, P("A"), P("B")) + pot("0.0*x");
  if (m == "linear_schrodinger_confining")
    return kin(I, "1.0", "0.0") + pot("-1j*" + P("B") + "*jnp.cos(jnp.pi*x/" + P("x_max") + ")");
  if (m == "linear_schrodinger_periodic")
    return kin(I, "1.0", "0.0") + pot("-1j*" + P("B") + "*jnp.cos(" + P("N") + "*2*jnp.pi*x/" + P("x_max") + ")");
  if (m == "nls") return kin("1j*" + P("A"), "1.0", "0.0") + pot("-1j*" + P("B") + "*n2");
  if (m == "nls_nnn") return kin("1j*" + P("A"), P("B"), P("C")) + pot("-1j*" + P("D") + "*n2");
  if (m == "nls_confining") return kin(I, "1.0", "0.0") + pot("-1j*(-jnp.cos(jnp.pi*x/" + P("x_max") + ") + n2)");
  if (m == "nls_phi6") return kin("1j*" + P("A"), "1.0", "0.0") + pot("-1j*" + P("B") + "*(n2 + 2*n2**2)");
  if (m == "real_ginzburg_landau") return kin(P("A"), "1.0", "0.0") + pot("-" + P("B") + "*(2*n2 - 1)");
  if (m == "complex_ginzburg_landau") return kin(P("A"), "1.0", "0.0") + pot("-" + P("B") + "*(2*" + P("C") + "*n2 - 1)");
  if (m == "complex_ginzburg_landau_nnn")
    return kin(P("A"), P("B"), P("C")) + pot("-" + P("D") + "*(2*" + P("E") + "*n2 - 1)");
  if (m == "sinusoidal_relaxation") return kin(P("A"), "1.0", "0.0") + pot(P("B") + "*jnp.sin(" + P("C") + "*n2)");
  throw std::logic_error("no truth propagators for " + m);
}

inline std::string quantum_code(const catalog::SystemSpec& s) {
  auto C = [&](const char* n) {
    const auto c = s.coefficient(n);
    if (c.is_tunable()) return "(" + lit(c.scale) + "*" + c.tunable + ")";
    return lit(c.value);
  };
  const std::string& m = s.model;
  std::string h = "H = 0*Sz[0]\n";
  if (m == "tfi")
    return h + "for j in range(N-1):\n    H = H + " + C("J") + "*Sz[j]@Sz[j+1]\nfor j in range(N):\n    H = H - " + C("h") + "*Sx[j]\n";
  if (m == "heisenberg_chain")
    return h + "for j in range(N-1):\n    H = H + " + C("J") +
           "*(Sx[j]@Sx[j+1] + Sy[j]@Sy[j+1] + Sz[j]@Sz[j+1])\nfor j in range(N):\n    H = H - " + C("h") + "*Sx[j]\n";
  if (m == "heisenberg_2d")
    return h +
           "L = 3\nbonds = []\nfor r in range(L):\n    for c in range(L):\n        if c + 1 < L:\n"
           "            bonds.append((r*L + c, r*L + c + 1))\n        if r + 1 < L:\n            bonds.append((r*L + c, (r+1)*L + c))\n"
           "for (a, b) in bonds:\n    H = H + " + C("J") + "*(Sx[a]@Sx[b] + Sy[a]@Sy[b] + Sz[a]@Sz[b])\n"
           "for j in range(N):\n    H = H - " + C("h") + "*Sx[j]\n";
  if (m == "topological_ising")
    return h + "for j in range(N-2):\n    H = H + " + C("K") + "*Sz[j]@Sx[j+1]@Sz[j+2]\nfor j in range(N-1):\n    H = H - " + C("J") +
           "*Sz[j]@Sz[j+1]\nfor j in range(N):\n    H = H - " + C("h") + "*Sx[j]\n";
  if (m == "arbitrary_gs")
    return h + "for j in range(N-1):\n    H = H + " + C("J_xz") + "*Sx[j]@Sz[j+1] - " + C("J_yx") +
           "*Sy[j]@Sx[j+1]\nfor j in range(N):\n    H = H - " + C("h_x") + "*Sx[j] + " + C("h_y") + "*Sy[j]\n";
  if (m == "arbitrary_dyn")
    return "H = " + C("J_1") + "*Sx[0]@Sz[1] + " + C("J_2") + "*Sy[0]@Sx[2] - " + C("h_1") + "*Sy[1] + " + C("h_2") +
           "*Sy[2] - " + C("K") + "*Sx[1]@Sy[2]\n";
  throw std::logic_error("no truth Hamiltonian for " + m);
}

/// Tool name and arguments of the truth submission for a system.
inline std::pair<std::string, nlohmann::json> truth_submission(const catalog::SystemSpec& s) {
  using catalog::Family;
  switch (s.family) {
    case Family::mechanical: {
      if (s.n_hidden() == 0) return {"save_result_find_eom", {{"rhs", mech_rhs(s)}}};
      const std::size_t h = s.n_hidden();
      auto list = [&](std::size_t off) {
        std::string out = "[";
        for (std::size_t i = 0; i < h; ++i) out += (i ? ", " : "") + lit(s.hidden_initial_conditions[off + i]);
        return out + "]";
      };
      return {"save_result_find_eom_hidden_degrees",
              {{"rhs", mech_rhs(s)}, {"hidden_initial_qs", list(0)}, {"hidden_initial_q_dots", list(h)}}};
    }
    case Family::field: return {"save_result_find_eom", {{"code", field_code(s)}}};
    case Family::quantum_gs:
    case Family::quantum_dyn: return {"announce_Hamiltonian", {{"Hamiltonian", quantum_code(s)}}};
  }
  throw std::logic_error("unknown family");
}

}  // namespace sciexp::testing
