#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace filminfo::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

std::string line_plot(const std::vector<Series>& series, const std::string& title,
                      const std::string& x_label, const std::string& y_label);

/// Heatmap of a matrix indexed (ix, iy); NaN cells are left blank.
std::string heatmap(const Eigen::MatrixXd& values, const std::string& title);

}  // namespace filminfo::svg
