#include "focklab/fock_context.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace focklab {

FockContext::FockContext(double m, int trunc_N) : m_(m), trunc_N_(trunc_N) {
  if (!(m >= 1.0) || !std::isfinite(m)) throw std::invalid_argument("FockContext: m must be >= 1");
  if (trunc_N < 0) throw std::invalid_argument("FockContext: trunc_N must be >= 0");
  log_h_.resize(static_cast<std::size_t>(trunc_N) + 1);
  for (int k = 0; k <= trunc_N; ++k) {
    log_h_[k] = std::log(std::numbers::pi / m) + log_gamma((k + 1) / m);
  }
  ml_ = mittag_leffler_for(m);
}

double FockContext::log_h(int k) const {
  if (k < 0) throw std::out_of_range("FockContext::log_h: negative index");
  if (k <= trunc_N_) return log_h_[k];
  return std::log(std::numbers::pi / m_) + log_gamma((k + 1) / m_);
}

double FockContext::h(int k) const { return std::exp(log_h(k)); }

}  // namespace focklab
