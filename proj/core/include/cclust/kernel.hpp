#pragma once

#include "cclust/types.hpp"

namespace cclust {

/// Triangular radial kernel K(u) = c_q * (1 - ||u||_2)_+ on the closed unit
/// ball. The normalizer doubles as the Lipschitz constant: M_K = c_q.
struct KernelSpec {
  int dimension = 0;
  double normalizer = 0.0;  // c_q
  double lipschitz = 0.0;   // M_K = c_q
};

/// c_q = q(q+1)Gamma(q/2) / (2 pi^(q/2)), the constant making
/// integral of c_q (1 - ||u||) over the unit ball equal 1.
double kernel_normalizer(int q);

/// Build the kernel spec for dimension q.
KernelSpec make_triangular_kernel(int q);

}  // namespace cclust
