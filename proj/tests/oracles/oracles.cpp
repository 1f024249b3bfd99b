#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace vsg::oracle {

std::vector<double> mlp_forward(const nn::Mlp& mlp, const std::vector<double>& x) {
  std::vector<double> act = x;
  for (std::size_t l = 0; l < mlp.num_layers(); ++l) {
    const auto& w = mlp.weight(l).value;
    const auto& b = mlp.bias(l).value;
    std::vector<double> next(static_cast<std::size_t>(w.rows()));
    for (Eigen::Index o = 0; o < w.rows(); ++o) {
      double sum = b(o, 0);
      for (Eigen::Index i = 0; i < w.cols(); ++i) sum += w(o, i) * act[static_cast<std::size_t>(i)];
      if (l + 1 < mlp.num_layers() && sum < 0.0) sum = 0.0;
      next[static_cast<std::size_t>(o)] = sum;
    }
    act = std::move(next);
  }
  return act;
}

Rows mp_conv_forward(const MpConv& conv, const Rows& z, const std::vector<Edge>& edges,
                     const Rows& edge_features) {
  Rows out;
  for (const auto& row : z) out.push_back(mlp_forward(conv.self_net(), row));
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto gate = mlp_forward(conv.edge_net(), edge_features[k]);
    const auto& src = z[edges[k].source];
    auto& dst = out[edges[k].target];
    for (std::size_t c = 0; c < dst.size(); ++c) {
      dst[c] += src[c] * (gate.size() == 1 ? gate[0] : gate[c]);
    }
  }
  return out;
}

SymmetricEigen jacobi_eigen(Rows a, double tolerance, int max_sweeps) {
  const std::size_t n = a.size();
  Rows v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    }
    if (off < tolerance * tolerance) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p];
          const double vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a[x][x] > a[y][y]; });
  SymmetricEigen out;
  for (auto i : order) {
    out.values.push_back(a[i][i]);
    std::vector<double> vec(n);
    for (std::size_t k = 0; k < n; ++k) vec[k] = v[k][i];
    out.vectors.push_back(std::move(vec));
  }
  return out;
}

SymmetricEigen covariance_eigen(const Rows& samples) {
  const std::size_t n = samples.size();
  const std::size_t d = samples.front().size();
  std::vector<double> mean(d, 0.0);
  for (const auto& s : samples) {
    for (std::size_t k = 0; k < d; ++k) mean[k] += s[k];
  }
  for (auto& m : mean) m /= static_cast<double>(n);
  Rows cov(d, std::vector<double>(d, 0.0));
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) cov[i][j] += (s[i] - mean[i]) * (s[j] - mean[j]);
    }
  }
  for (auto& row : cov) {
    for (auto& x : row) x /= static_cast<double>(n - 1);
  }
  return jacobi_eigen(std::move(cov));
}

std::pair<double, std::vector<std::size_t>> brute_force_tsp(const std::vector<Vec3>& points,
                                                            const Vec3& start) {
  std::vector<std::size_t> perm(points.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_perm = perm;
  do {
    double length = 0.0;
    Vec3 at = start;
    for (auto i : perm) {
      const Vec3 d = points[i] - at;
      length += std::sqrt(d.x() * d.x() + d.y() * d.y() + d.z() * d.z());
      at = points[i];
    }
    if (length < best) {
      best = length;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {best, best_perm};
}

double focal_loss_element(double p, double y, double w_negative, double w_positive,
                          double gamma) {
  const double clamped = std::min(std::max(p, 1e-7), 1.0 - 1e-7);
  const double pt = y > 0.5 ? clamped : 1.0 - clamped;
  const double w = y > 0.5 ? w_positive : w_negative;
  return -w * std::pow(1.0 - pt, gamma) * std::log(pt);
}

Rows to_rows(const nn::Matrix& m) {
  Rows out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(r)].push_back(m(r, c));
  }
  return out;
}

}  // namespace vsg::oracle
