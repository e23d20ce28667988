#include "cclust/kernel.hpp"

#include <cmath>

namespace cclust {

double kernel_normalizer(int q) {
  if (q < 1) throw validation_error("kernel dimension must be >= 1");
  const double qd = static_cast<double>(q);
  const double pi = 3.14159265358979323846;
  return qd * (qd + 1.0) * std::tgamma(qd / 2.0) / (2.0 * std::pow(pi, qd / 2.0));
}

KernelSpec make_triangular_kernel(int q) {
  KernelSpec spec;
  spec.dimension = q;
  spec.normalizer = kernel_normalizer(q);
  spec.lipschitz = spec.normalizer;
  return spec;
}

}  // namespace cclust
