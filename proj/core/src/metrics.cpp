#include "letc/error.hpp"
#include "letc/solver.hpp"

#include <cmath>

namespace letc {

Metrics evaluate(const Matrix& estimate, const Matrix& truth, const Mask& held_out) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols() ||
      held_out.rows() != truth.rows() || held_out.cols() != truth.cols()) {
    throw ShapeError("evaluate: estimate, truth and mask must share a shape");
  }
  Metrics m;
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  double truth_sum = 0.0;
  for (Eigen::Index j = 0; j < truth.cols(); ++j) {
    for (Eigen::Index i = 0; i < truth.rows(); ++i) {
      if (!held_out(i, j)) continue;
      if (!std::isfinite(truth(i, j)))
        throw ParameterError("evaluate: ground truth is not finite on a held-out entry");
      const double err = truth(i, j) - estimate(i, j);
      abs_sum += std::abs(err);
      sq_sum += err * err;
      truth_sum += std::abs(truth(i, j));
      ++m.count;
    }
  }
  if (m.count == 0) throw ParameterError("evaluate: held-out set is empty");
  const auto n = static_cast<double>(m.count);
  m.mae = abs_sum / n;
  m.rmse = std::sqrt(sq_sum / n);
  if (truth_sum > 0.0) m.wmape = abs_sum / truth_sum;
  return m;
}

}  // namespace letc
