#pragma once

// Reference implementations used only to check the library: a dense O(n)
// per-event ranker and a dense symmetric eigensolver.

#include <Eigen/Dense>

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace decayrank::oracle {

// Applies the convex mixture update to every entry on every event.
class DenseRanker {
 public:
  explicit DenseRanker(double alpha) : alpha_(alpha) {}
  DenseRanker(double alpha, std::span<const std::string> items) : alpha_(alpha) {
    for (const auto& id : items) p_[id] = 1.0 / static_cast<double>(items.size());
  }

  void observe(std::string_view item) {
    const std::string id(item);
    if (p_.empty()) {
      p_[id] = 1.0;
      return;
    }
    for (auto& [k, v] : p_) v *= alpha_;
    p_[id] += 1.0 - alpha_;
  }

  void set_alpha(double alpha) { alpha_ = alpha; }
  double probability(const std::string& id) const {
    auto it = p_.find(id);
    return it == p_.end() ? 0.0 : it->second;
  }
  const std::map<std::string, double>& distribution() const { return p_; }

 private:
  double alpha_;
  std::map<std::string, double> p_;
};

// Ascending eigenvalues of diag(q) - q q^T.
inline std::vector<double> dense_kernel_eigenvalues(std::span<const double> q) {
  const auto n = static_cast<Eigen::Index>(q.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) k(i, j) = (i == j ? q[i] : 0.0) - q[i] * q[j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k, Eigen::EigenvaluesOnly);
  std::vector<double> out(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace decayrank::oracle
