#include "vsg/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace vsg::nn {

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

Matrix numeric_gradient(const std::function<double(const Matrix&)>& f, const Matrix& x,
                        double step) {
  Matrix g(x.rows(), x.cols());
  Matrix probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double original = probe(i);
    probe(i) = original + step;
    const double plus = f(probe);
    probe(i) = original - step;
    const double minus = f(probe);
    probe(i) = original;
    g(i) = (plus - minus) / (2.0 * step);
  }
  return g;
}

GradCheckResult compare_gradients(const Matrix& analytic, const Matrix& numeric,
                                  const std::string& label, double floor) {
  GradCheckResult r;
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    const double err = relative_error(analytic(i), numeric(i), floor);
    ++r.checked;
    if (err >= r.max_relative_error) {
      r.max_relative_error = err;
      r.worst_entry = label + "[" + std::to_string(i) + "]";
    }
  }
  return r;
}

GradCheckResult check_parameter_gradients(const ParamStore& store,
                                          const std::function<double()>& loss,
                                          const std::function<void()>& accumulate,
                                          const GradCheckOptions& options) {
  const_cast<ParamStore&>(store).zero_grads();
  accumulate();
  GradCheckResult result;
  for (auto* p : store.entries()) {
    const Matrix analytic = p->grad;
    const Eigen::Index total = p->value.size();
    Eigen::Index stride = 1;
    if (options.max_entries_per_tensor > 0 &&
        total > static_cast<Eigen::Index>(options.max_entries_per_tensor)) {
      stride = total / static_cast<Eigen::Index>(options.max_entries_per_tensor);
    }
    for (Eigen::Index i = 0; i < total; i += stride) {
      const double original = p->value(i);
      p->value(i) = original + options.step;
      const double plus = loss();
      p->value(i) = original - options.step;
      const double minus = loss();
      p->value(i) = original;
      const double numeric = (plus - minus) / (2.0 * options.step);
      const double err = relative_error(analytic(i), numeric, options.magnitude_floor);
      ++result.checked;
      if (err >= result.max_relative_error) {
        result.max_relative_error = err;
        result.worst_entry = p->name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return result;
}

}  // namespace vsg::nn
