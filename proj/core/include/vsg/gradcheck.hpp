#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "vsg/nn.hpp"

namespace vsg::nn {

struct GradCheckOptions {
  double step = 1e-5;
  // Denominator floor; gradients smaller than this compare absolutely.
  double magnitude_floor = 1e-7;
  // 0 checks every scalar; otherwise at most this many entries per tensor,
  // spread evenly.
  std::size_t max_entries_per_tensor = 0;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_entry;
  std::size_t checked = 0;

  bool passed(double tolerance) const { return max_relative_error < tolerance; }
};

// |a - n| / max(|a|, |n|, floor)
double relative_error(double analytic, double numeric, double floor);

// Central-difference gradient of a scalar function of a matrix.
Matrix numeric_gradient(const std::function<double(const Matrix&)>& f, const Matrix& x,
                        double step = 1e-5);

GradCheckResult compare_gradients(const Matrix& analytic, const Matrix& numeric,
                                  const std::string& label, double floor = 1e-7);

// Checks every parameter of `store`. `accumulate` must zero nothing and add
// dLoss/dParam into the gradient buffers; `loss` must be a pure function of
// the current parameter values.
GradCheckResult check_parameter_gradients(const ParamStore& store,
                                          const std::function<double()>& loss,
                                          const std::function<void()>& accumulate,
                                          const GradCheckOptions& options = {});

}  // namespace vsg::nn
