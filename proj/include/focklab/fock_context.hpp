#pragma once

#include <memory>
#include <vector>

#include "focklab/special_fn.hpp"

namespace focklab {

/// Weight exponent m, the monomial norms h_k = (pi/m) Gamma((k+1)/m) and the
/// shared kernel evaluator. Immutable after construction.
class FockContext {
 public:
  explicit FockContext(double m, int trunc_N = 128);

  double m() const noexcept { return m_; }
  int trunc_N() const noexcept { return trunc_N_; }

  double log_h(int k) const;
  double h(int k) const;

  const MittagLeffler& ml() const noexcept { return *ml_; }

 private:
  double m_;
  int trunc_N_;
  std::vector<double> log_h_;
  std::shared_ptr<const MittagLeffler> ml_;
};

}  // namespace focklab
