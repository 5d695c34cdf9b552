#include "blowup/interpolation.hpp"

#include <cmath>

namespace blowup {

namespace {

// weights and derivative weights of the p-point Lagrange basis at offset s
// (s measured in cells from the first stencil node)
void basis(int p, double s, double* w, double* dw) {
  for (int a = 0; a < p; ++a) {
    double num = 1.0, den = 1.0;
    for (int b = 0; b < p; ++b) {
      if (b == a) continue;
      num *= s - b;
      den *= a - b;
    }
    w[a] = num / den;
    double d = 0.0;
    for (int c = 0; c < p; ++c) {
      if (c == a) continue;
      double t = 1.0;
      for (int b = 0; b < p; ++b)
        if (b != a && b != c) t *= s - b;
      d += t;
    }
    dw[a] = d / den;
  }
}

}  // namespace

bool lagrange_interpolate(const Grid& grid, const std::vector<double>& values,
                          const std::vector<char>& valid, const Point& x, double* value,
                          Eigen::Vector3d* gradient) {
  const int n = grid.n();
  const Eigen::Vector3d& h = grid.spacing();
  double s[3];
  int cell[3];
  for (int d = 0; d < 3; ++d) {
    s[d] = (x[d] - grid.lo()[d]) / h[d];
    cell[d] = static_cast<int>(std::floor(s[d]));
  }

  for (int p : {6, 4, 2}) {
    int start[3];
    bool inside = true;
    for (int d = 0; d < 3; ++d) {
      start[d] = cell[d] - p / 2 + 1;
      if (start[d] < 0 || start[d] + p - 1 > n - 1) inside = false;
    }
    if (!inside) continue;
    bool complete = true;
    for (int k = 0; k < p && complete; ++k)
      for (int j = 0; j < p && complete; ++j)
        for (int i = 0; i < p && complete; ++i)
          if (!valid[grid.index(start[0] + i, start[1] + j, start[2] + k)]) complete = false;
    if (!complete) continue;

    double w[3][6], dw[3][6];
    for (int d = 0; d < 3; ++d) basis(p, s[d] - start[d], w[d], dw[d]);
    double v = 0.0;
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    for (int k = 0; k < p; ++k)
      for (int j = 0; j < p; ++j)
        for (int i = 0; i < p; ++i) {
          const double f = values[grid.index(start[0] + i, start[1] + j, start[2] + k)];
          v += f * w[0][i] * w[1][j] * w[2][k];
          if (gradient) {
            g[0] += f * dw[0][i] * w[1][j] * w[2][k];
            g[1] += f * w[0][i] * dw[1][j] * w[2][k];
            g[2] += f * w[0][i] * w[1][j] * dw[2][k];
          }
        }
    *value = v;
    if (gradient) *gradient = g.cwiseQuotient(h);
    return true;
  }
  return false;
}

}  // namespace blowup
