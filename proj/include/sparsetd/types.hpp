#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace sparsetd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using IndexList = std::vector<Index>;
using Warnings = std::vector<std::string>;

}  // namespace sparsetd
