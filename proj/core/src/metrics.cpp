// SPDX-License-Identifier: Apache-2.0
#include "sciexp/metrics.hpp"

#include <cmath>

#include "sciexp/error.hpp"

namespace sciexp::metrics {

double r_squared(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::shape, "r_squared: length mismatch");
  if (x.size() < 2) throw Error(ErrorKind::invalid_argument, "r_squared: need at least two samples");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double res = 0.0, tot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    res += (x[i] - y[i]) * (x[i] - y[i]);
    tot += (mean - x[i]) * (mean - x[i]);
  }
  if (tot == 0.0) throw Error(ErrorKind::invalid_argument, "r_squared: reference is constant");
  return 1.0 - res / tot;
}

namespace {

Complex trace(const numerics::SparseOperator& m) {
  Complex t = 0.0;
  for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
    for (numerics::SparseOperator::InnerIterator it(m, k); it; ++it) {
      if (it.row() == it.col()) t += it.value();
    }
  }
  return t;
}

Complex inner(const numerics::SparseOperator& a, const numerics::SparseOperator& b) {
  return a.conjugate().cwiseProduct(b).sum();
}

}  // namespace

double hamiltonian_overlap(const numerics::SparseOperator& truth, const numerics::SparseOperator& agent) {
  if (truth.rows() != agent.rows() || truth.cols() != agent.cols())
    throw Error(ErrorKind::shape, "Hamiltonian dimensions differ");
  const double d = static_cast<double>(truth.rows());
  const Complex tt = trace(truth), ta = trace(agent);
  const double cross = (inner(truth, agent) - std::conj(tt) * ta / d).real();
  const double nt = std::max(0.0, inner(truth, truth).real() - std::norm(tt) / d);
  const double na = std::max(0.0, inner(agent, agent).real() - std::norm(ta) / d);
  const double denom = std::max(nt, na);
  if (denom == 0.0) return 1.0;
  return cross / denom;
}

double fidelity_per_spin(const Eigen::MatrixXcd& truth_space, const Eigen::MatrixXcd& agent_space,
                         std::size_t n_spins) {
  if (truth_space.rows() != agent_space.rows()) throw Error(ErrorKind::shape, "ground-state dimensions differ");
  Eigen::MatrixXcd s = truth_space.adjoint() * agent_space;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s);
  double sigma = std::min(1.0, svd.singularValues()(0));
  return std::pow(sigma * sigma, 1.0 / static_cast<double>(n_spins));
}

}  // namespace sciexp::metrics
