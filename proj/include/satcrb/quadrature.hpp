#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include <gsl/gsl_integration.h>

namespace satcrb {

/// Gauss-Legendre rule on [-1, 1]; nodes and weights come from GSL.
class GaussLegendre {
 public:
  explicit GaussLegendre(std::size_t n) {
    std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)>
        table(gsl_integration_glfixed_table_alloc(n), &gsl_integration_glfixed_table_free);
    nodes_.resize(n);
    weights_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      gsl_integration_glfixed_point(-1.0, 1.0, i, &nodes_[i], &weights_[i], table.get());
  }

  std::size_t size() const { return nodes_.size(); }

  /// Integral of f over [a, b].
  template <typename F>
  double integrate(F&& f, double a, double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * f(mid + half * nodes_[i]);
    return half * sum;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace satcrb
