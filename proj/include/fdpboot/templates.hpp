#pragma once

#include <functional>
#include <vector>

namespace fdpboot {

enum class TemplateKind { Linear, Custom };

// Family of K strictly increasing threshold functions t_k : [0,1] -> R with
// t_k(0) = 0. The linear family is t_k(lambda) = lambda * k / m. Custom
// families carry their own evaluators; inverses fall back to bisection when
// not supplied.
class TemplateFamily {
 public:
  using Fn = std::function<double(double)>;

  static TemplateFamily linear(int size, int total_hypotheses);
  static TemplateFamily custom(int total_hypotheses, std::vector<Fn> thresholds,
                               std::vector<Fn> inverses = {});

  // t_k(lambda); k is 1-based, lambda in [0, 1].
  double threshold(int k, double lambda) const;

  // t_k^{-1}(p) for p in [0, 1]. The linear family returns p*m/k unclamped
  // (values above 1 only ever lose the min in f), custom families report
  // +infinity above t_k(1).
  double inverse_threshold(int k, double p) const;

  int size() const { return size_; }
  int total_hypotheses() const { return total_; }
  TemplateKind kind() const { return kind_; }

 private:
  TemplateFamily(TemplateKind kind, int size, int total);

  TemplateKind kind_;
  int size_ = 0;
  int total_ = 0;
  std::vector<Fn> thresholds_;
  std::vector<Fn> inverses_;
};

}  // namespace fdpboot
