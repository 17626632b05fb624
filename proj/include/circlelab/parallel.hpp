#pragma once

#include <atomic>
#include <complex>
#include <functional>
#include <thread>
#include <vector>

namespace circlelab {

/// Runs fn(chunk) for chunk in [0, n_chunks) on up to `threads` workers.
/// Callers store per-chunk results by index and merge in chunk order, so the
/// outcome never depends on the thread count.
inline void run_chunks(long long n_chunks, int threads, const std::function<void(long long)>& fn) {
  if (threads <= 0) threads = int(std::thread::hardware_concurrency());
  if (threads <= 1 || n_chunks <= 1) {
    for (long long c = 0; c < n_chunks; ++c) fn(c);
    return;
  }
  std::atomic<long long> next{0};
  auto worker = [&] {
    while (true) {
      long long c = next.fetch_add(1);
      if (c >= n_chunks) return;
      fn(c);
    }
  };
  std::vector<std::thread> pool;
  int n_workers = int(std::min<long long>(threads, n_chunks));
  pool.reserve(n_workers);
  for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

/// Kahan compensated accumulator.
struct KahanSum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  double value() const { return s; }
};

struct KahanComplex {
  KahanSum re, im;
  void add(std::complex<double> z) { re.add(z.real()); im.add(z.imag()); }
  std::complex<double> value() const { return {re.value(), im.value()}; }
};

}  // namespace circlelab
