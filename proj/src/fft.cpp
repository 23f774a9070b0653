#include "unidec/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace unidec {

static bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

Fft::Fft(int n) : n_(n) {
  if (!power_of_two(n)) throw std::invalid_argument("fft length must be a power of two");
  rev_.resize(n);
  int lg = 0;
  while ((1 << lg) < n) ++lg;
  for (int i = 0; i < n; ++i) {
    int r = 0;
    for (int b = 0; b < lg; ++b)
      if (i & (1 << b)) r |= 1 << (lg - 1 - b);
    rev_[i] = r;
  }
  w_.resize(n / 2);
  const double pi2 = 6.283185307179586476925287;
  for (int j = 0; j < n / 2; ++j) {
    double ph = -pi2 * j / n;
    w_[j] = {std::cos(ph), std::sin(ph)};
  }
  if (n == 1) w_.push_back({1.0, 0.0});
}

void Fft::run(cplx* a, bool inv) const {
  const int n = n_;
  for (int i = 0; i < n; ++i)
    if (rev_[i] > i) std::swap(a[i], a[rev_[i]]);
  for (int len = 2; len <= n; len <<= 1) {
    const int half = len >> 1;
    const int step = n / len;
    for (int i = 0; i < n; i += len) {
      for (int j = 0; j < half; ++j) {
        cplx w = w_[j * step];
        if (inv) w = std::conj(w);
        cplx u = a[i + j];
        cplx v = a[i + j + half] * w;
        a[i + j] = u + v;
        a[i + j + half] = u - v;
      }
    }
  }
}

void Fft::line(cplx* base, std::size_t stride, bool inv, double scale,
               cplx* scratch) const {
  if (stride == 1) {
    run(base, inv);
    if (scale != 1.0)
      for (int i = 0; i < n_; ++i) base[i] *= scale;
    return;
  }
  for (int i = 0; i < n_; ++i) scratch[i] = base[i * stride];
  run(scratch, inv);
  for (int i = 0; i < n_; ++i) base[i * stride] = scratch[i] * scale;
}

void naive_dft(const cplx* in, cplx* out, int n, bool inv) {
  const double pi2 = 6.283185307179586476925287;
  const double sgn = inv ? 1.0 : -1.0;
  for (int m = 0; m < n; ++m) {
    cplx acc = 0.0;
    for (int j = 0; j < n; ++j) {
      double ph = sgn * pi2 * (static_cast<long long>(j) * m % n) / n;
      acc += in[j] * cplx{std::cos(ph), std::sin(ph)};
    }
    out[m] = acc;
  }
}

}  // namespace unidec
