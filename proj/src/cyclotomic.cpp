#include "circlelab/cyclotomic.hpp"

#include <mutex>

namespace circlelab {

namespace {

// Exact division of integer polynomials (ascending coefficients).
std::vector<i64> zdiv(const std::vector<i64>& num, const std::vector<i64>& den) {
  std::vector<i64> rem = num;
  std::vector<i64> q(num.size() - den.size() + 1, 0);
  for (int i = int(q.size()) - 1; i >= 0; --i) {
    i64 c = rem[size_t(i) + den.size() - 1] / den.back();
    q[size_t(i)] = c;
    for (size_t j = 0; j < den.size(); ++j)
      rem[size_t(i) + j] = narrow(i128(rem[size_t(i) + j]) - i128(c) * den[j], "cyclo div");
  }
  for (i64 r : rem)
    if (r != 0) throw std::logic_error("cyclotomic division not exact");
  return q;
}

std::map<i64, std::vector<i64>> cache;
std::mutex cache_mu;

std::vector<i64> compute_cyclotomic(i64 m) {
  // x^m - 1 divided by the product of all proper-divisor cyclotomics.
  std::vector<i64> num(size_t(m) + 1, 0);
  num[0] = -1;
  num[size_t(m)] = 1;
  for (i64 d = 1; d < m; ++d) {
    if (m % d != 0) continue;
    num = zdiv(num, cyclotomic_poly(d));
  }
  return num;
}

}  // namespace

const std::vector<i64>& cyclotomic_poly(i64 m) {
  {
    std::lock_guard<std::mutex> lock(cache_mu);
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;
  }
  std::vector<i64> poly = m == 1 ? std::vector<i64>{-1, 1} : compute_cyclotomic(m);
  std::lock_guard<std::mutex> lock(cache_mu);
  return cache.emplace(m, std::move(poly)).first->second;
}

std::optional<i128> CycloSum::exact_integer() const {
  if (m == 1) return c[0];
  const auto& phi = cyclotomic_poly(m);
  std::vector<i128> rem(c.begin(), c.end());
  int dphi = int(phi.size()) - 1;
  for (int i = int(rem.size()) - 1; i >= dphi; --i) {
    i128 f = rem[size_t(i)];  // phi is monic
    if (f == 0) continue;
    rem[size_t(i)] = 0;
    for (int j = 0; j < dphi; ++j) rem[size_t(i - dphi + j)] -= f * phi[size_t(j)];
  }
  for (size_t i = 1; i < size_t(dphi); ++i)
    if (rem[i] != 0) return std::nullopt;
  return rem[0];
}

}  // namespace circlelab
