#include "selr/dataset.hpp"

#include "selr/error.hpp"

namespace selr {

void Dataset::validate() const {
  if (u.size() < 1) throw Error(ErrorCode::InvalidArgument, "dataset is empty");
  if (y.size() != u.size() || x.rows() != u.size()) {
    throw Error(ErrorCode::InvalidArgument, "u, x and y must have the same length");
  }
  if (x.cols() < 1) throw Error(ErrorCode::InvalidArgument, "dataset needs p >= 1");
  if (!u.allFinite() || !y.allFinite() || !x.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "dataset contains non-finite values");
  }
}

Dataset Dataset::intercept_only(Eigen::VectorXd u, Eigen::VectorXd y) {
  Dataset d;
  d.x = Eigen::MatrixXd::Ones(u.size(), 1);
  d.u = std::move(u);
  d.y = std::move(y);
  return d;
}

}  // namespace selr
